#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conekit/geometry.hpp"

namespace conekit {

enum class Normalization { AC, ALE };
std::string to_string(Normalization n);
Normalization parse_normalization(const std::string& s);

// Vol(L) for L = S^{N-1} / Gamma, from the quadrature rule used for the integrals.
double link_volume(int N, int quotient_order = 1);
// 1 / (2 (N-1) Vol(L))
double ac_constant(int N, double link_volume);
// Gamma(N/2) / (4 (N-1) pi^{N/2})
double ale_constant(int N);
// Ratio of the AC to the ALE normalized mass for the same metric.
double normalization_ratio(int N, int quotient_order = 1);

// int_{L(r)} (nabla-bar^j g_ij - (tr_{gbar} g)_i) n^i dVol, with L(r) = {|x| = r} / Gamma
// in a Cartesian chart, before normalization.
struct BoundaryIntegral {
  double value = 0.0;
  double error = 0.0;
};
BoundaryIntegral adm_integrand(const MetricField& g, const MetricField& gbar, double r, double tol = 1e-10);
BoundaryIntegral adm_integrand(const MetricField& g, double r, double tol = 1e-10);  // gbar = Euclidean

struct RadiusSchedule {
  double r0 = 10.0;
  double factor = 2.0;
  int count = 11;
  std::vector<double> radii() const;
};

struct ExtrapolationFit {
  double limit = 0.0;
  double error = 0.0;     // disagreement between the fits on the last 3 and last 4 radii plus residual
  double exponent = 0.0;  // q in a + b r^-q; 0 if the sequence is constant
  double amplitude = 0.0; // b
  double residual = 0.0;  // max |model - data| over the fitted radii
  std::vector<double> residuals;  // |model - data| per radius
};

ExtrapolationFit extrapolate(const std::vector<double>& r, const std::vector<double>& values);

struct FormulaComparison {
  double pairing = 0.0;
  double total_scalar = 0.0;
  double rhs = 0.0;
};

struct MassReport {
  std::string family;
  Normalization normalization = Normalization::AC;
  int real_dim = 0;
  int quotient_order = 1;
  double link_volume = 0.0;
  double constant = 0.0;  // normalization factor applied to the raw integrals
  std::vector<double> radii;
  std::vector<double> integrals;      // raw boundary integrals
  std::vector<double> integral_errors;
  std::vector<double> normalized;     // constant * integrals
  ExtrapolationFit fit;
  double mass = 0.0;
  double mass_error = 0.0;
  double fitted_tau = 0.0;
  bool decay_warning = false;  // fitted tau below N/2 - 1
  std::optional<FormulaComparison> formula;
};

struct MassOptions {
  Normalization normalization = Normalization::AC;
  double quadrature_tol = 1e-10;
  bool allow_slow_decay = true;  // warn and proceed instead of throwing
};

// Throws NoLimit when the integrand grows along the schedule.
MassReport mass(const MetricField& g, const RadiusSchedule& schedule, const MassOptions& opt = {});

// Mass from the Ricci-potential boundary term of a radial Kahler potential:
// boundary term / ((2n-1) (n-1)! Vol(L)), extrapolated along the schedule.
MassReport kahler_mass(const RadialPotential& u, const RadiusSchedule& schedule);

// -2 pi pairing / ((2n-1)(n-1)! VolL) + total_scalar / (2 (2n-1) VolL)
double mass_formula_rhs(double pairing, double total_scalar, int n_complex, double link_volume);

// Coefficient of dd^c r^{4-2n} (n >= 3) or dd^c log r (n = 2) in the expansion of omega.
double expansion_coefficient(double m, int n_complex);
double mass_from_coefficient(double c, int n_complex);
// The same relation with the factor that makes the boundary-integral mass of
// u = t/2 + c * (model term) return c; see README.
double expansion_coefficient_consistent(double m, int n_complex);
double mass_from_coefficient_consistent(double c, int n_complex);

// A = (1 / ((n-2) VolL)) int f dVol on the cone over S^{n-1}, with the
// positive Laplacian convention so that int Delta r^{2-n} = (n-2) VolL.
// f(r, x) with x on the unit sphere. Throws TailDivergence if f r^n does not
// decay, InsufficientData for n < 3.
struct LeadingTerm {
  double A = 0.0;
  double integral = 0.0;
  double error = 0.0;
  double tail_slope = 0.0;  // fitted exponent of |f| at large r
};
using ConeFunction = std::function<double(double r, const std::vector<double>& unit)>;
LeadingTerm leading_term_constant(const ConeFunction& f, int n, double r_inner = 0.0, double tol = 1e-10);

// Built-in families for the mass computations.
struct MetricFamily {
  std::string name;
  std::map<std::string, double> params;
  MetricField metric;
  std::optional<RadialPotential> potential;
  bool scalar_flat = false;
  bool ricci_flat = false;
  bool crepant = false;
  // <iota^-1 c_1, [omega]^{n-1}> when a closed form is known.
  std::optional<double> pairing;
};

// Names: flat (N), schwarzschild (N, m), burns (c), eguchi-hanson (a),
// potential (n, c). Unknown names or parameters throw Validation.
MetricFamily make_family(const std::string& name, const std::map<std::string, double>& params);

// int_{r1 < |x| < r2} F dVol_euclid over the annulus, tensor rule in r and the sphere.
double annulus_integral(int N, double r1, double r2, const std::function<double(const std::vector<double>&)>& F,
                        int radial_nodes = 48, double tol = 1e-10);

}  // namespace conekit
