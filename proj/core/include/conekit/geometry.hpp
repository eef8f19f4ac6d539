#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "conekit/jet.hpp"

namespace conekit {

// Metric components g_ij on a coordinate chart of dimension `dim`, written in
// jet arithmetic so that first and second derivatives are exact.
struct MetricField {
  int dim = 0;
  std::string name;
  // x: dim jets, g: dim*dim jets (row major, symmetric).
  std::function<void(const Jet* x, Jet* g)> components;
  double decay_claim = 0.0;  // tau with |g - g0| = O(r^-tau); informational
  int quotient_order = 1;    // |Gamma| when the chart covers R^N / Gamma
};

struct MetricSample {
  int n = 0;
  std::vector<double> g;    // [i*n + j]
  std::vector<double> dg;   // [(k*n + i)*n + j] = d_k g_ij
  std::vector<double> d2g;  // [((l*n + k)*n + i)*n + j] = d_l d_k g_ij
  double at(int i, int j) const { return g[i * n + j]; }
  double d(int k, int i, int j) const { return dg[(k * n + i) * n + j]; }
  double d2(int l, int k, int i, int j) const { return d2g[((l * n + k) * n + i) * n + j]; }
};

MetricSample evaluate(const MetricField& g, const std::vector<double>& x);

// Rank-3 array T[k][i][j] flattened as [(k*n + i)*n + j].
struct Tensor3 {
  int n = 0;
  std::vector<double> data;
  double operator()(int k, int i, int j) const { return data[(k * n + i) * n + j]; }
  double& operator()(int k, int i, int j) { return data[(k * n + i) * n + j]; }
  double max_abs_diff(const Tensor3& o) const;
};

// Gamma^k_ij; throws SingularMetric.
Tensor3 christoffel(const MetricField& g, const std::vector<double>& x);

// A^k_ij from the reference-covariant formula
//   A^k_ij = 1/2 g^{kl} (nabla-bar_i g_jl + nabla-bar_j g_il - nabla-bar_l g_ij).
Tensor3 connection_difference(const MetricField& g, const MetricField& gbar, const std::vector<double>& x);

std::vector<double> ricci(const MetricField& g, const std::vector<double>& x);  // R_ij, row major
double scalar_curvature(const MetricField& g, const std::vector<double>& x);

// R(g) from Ric(gbar) and the connection difference, nabla-bar A and A*A.
double scalar_curvature_relative(const MetricField& g, const MetricField& gbar, const std::vector<double>& x);

struct FiniteDifferenceResult {
  double value = 0.0;
  double error = 0.0;  // |coarse - fine| Richardson estimate
  double step = 0.0;
};

// R(g) from central differences of the component values only (steps h and
// h/2 with Richardson extrapolation). Throws StepSize above tol.
FiniteDifferenceResult scalar_curvature_fd(const MetricField& g, const std::vector<double>& x, double h = 1e-3,
                                           double tol = 1e-5);

// DR_gbar(h) at x for h = g - gbar:
//   -<Ric_gbar, h> + nabla-bar^j nabla-bar^i h_ij - Laplacian-bar tr h.
double linearized_scalar(const MetricField& g, const MetricField& gbar, const std::vector<double>& x);

// The two second-order pieces separately (used by the annulus identity).
struct DivergenceTerms {
  double div_div = 0.0;   // nabla-bar^j nabla-bar^i h_ij
  double lap_trace = 0.0; // Laplacian-bar tr_gbar h (analyst's sign: g^{ab} nabla_a nabla_b)
  double ric_pair = 0.0;  // <Ric_gbar, h>
};
DivergenceTerms divergence_terms(const MetricField& g, const MetricField& gbar, const std::vector<double>& x);

// gbar + t (g - gbar)
MetricField interpolate(const MetricField& gbar, const MetricField& g, double t);
// components g_ij(lambda x): the lambda^-2 rescaled pullback under x -> lambda x
MetricField rescaled(const MetricField& g, double lambda);

// ---------------------------------------------------------------------------
// Radial Kahler potentials u(t), t = |z|^2 on C^n, with omega = i d dbar u and
// flat model u = t / 2. The callback returns u_t and u_tt as jets of t.

struct RadialPotential {
  int n_complex = 2;
  std::string name;
  std::function<void(const Jet& t, Jet& ut, Jet& utt)> derivatives;
  int quotient_order = 1;
};

struct KahlerForm {
  int n_complex = 0;
  // omega = (i/2) sum H_ab dz_a ^ dzb_b; H = identity for the flat model.
  std::vector<std::complex<double>> H;  // row major n x n
  std::vector<double> real_metric;      // 2n x 2n in (x1, y1, x2, y2, ...)
  double volume_ratio = 0.0;            // omega^n / omega_0^n = det H
};

// Throws NonPositiveForm when the induced form is not positive at the point.
KahlerForm kahler_form_from_potential(const RadialPotential& u, const std::vector<double>& x);
MetricField kahler_metric(const RadialPotential& u);

// -1/2 int_{L(r)} d^C log(omega^n / omega_0^n) ^ omega^{n-1}, d^C = i (dbar - d),
// evaluated as -(n-1)!/2 times the flux of grad log det H through |z| = r.
double ricci_potential_boundary_term(const RadialPotential& u, double r, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Built-in metric fields.

MetricField euclidean(int N);
// Cone dr^2 + r^2 g_{S^2} in (r, theta, phi).
MetricField cone_over_round_s2();
// Round unit S^m in stereographic coordinates.
MetricField round_sphere_stereographic(int m);
// Spatial Schwarzschild (1 - 2m r^{2-N})^{-1} dr^2 + r^2 g_S in Cartesian coordinates.
MetricField schwarzschild(int N, double m);
// exp(2 phi) delta with phi given in jet arithmetic.
MetricField conformally_flat(int N, std::function<Jet(const Jet* x)> phi, std::string name = "conformal");
// Euclidean metric plus a jet-valued symmetric perturbation.
MetricField perturbed_euclidean(int N, std::function<void(const Jet* x, Jet* h)> h, std::string name = "perturbed");
// Pullback of delta under x -> x + eps b(|x|^2) v with b supported in |x| < 1.
MetricField pure_gauge(int N, double eps);

RadialPotential flat_potential(int n_complex);
RadialPotential burns_potential(double c);                 // t/2 + (c/2) log t on C^2
RadialPotential power_potential(int n_complex, double c);  // t/2 + c t^{2-n}
RadialPotential eguchi_hanson_potential(double a);         // on C^2 / Z_2

}  // namespace conekit
