#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conekit/indicial.hpp"
#include "conekit/link_spectrum.hpp"

namespace conekit {

using ScalarFn = std::function<double(double)>;

struct RadialGrid {
  std::vector<double> r;
  double points_per_decade = 64;
  // Geometric grid on [1, rmax] with ppd points per decade.
  static RadialGrid geometric(double rmax = 1e4, int ppd = 64);
};

// A radial profile sampled on a grid, with an evaluator valid for any r >= 1.
struct RadialFunction {
  std::vector<double> r;
  std::vector<double> value;
  std::vector<double> d1;
  std::vector<double> d2;
  double decay_order = 0.0;
  std::function<std::array<double, 2>(double)> eval;  // (value, first derivative)

  double operator()(double x) const { return eval(x)[0]; }
  double derivative(double x) const { return eval(x)[1]; }
  // Log-log slope of |value| over the last decade of the grid.
  double fitted_decay() const;
};

RadialFunction sample(const ScalarFn& f, const RadialGrid& grid, double decay_order);

struct SolverOptions {
  double rmax = 1e4;
  int points_per_decade = 64;
  double gap_tol = kDefaultGapTol;
  double tail_tol = 1e-9;       // relative tolerance for the improper-integral tail
  double deriv_tol = 1e-8;      // accuracy gate for the v' differentiator
  double extension = 1e6;       // quadrature grid runs to rmax * extension before the analytic tail
};

enum class ModeKind { Coclosed, ExactPair, Function };

std::string to_string(ModeKind kind);
ModeKind parse_mode_kind(const std::string& s);

struct ModeProblem {
  ModeKind kind = ModeKind::Function;
  int n = 4;
  double eigenvalue = 0.0;
  // Coclosed: rhs = w. Function: rhs = f. Exact pair: rhs = u, rhs2 = v.
  ScalarFn rhs;
  ScalarFn rhs2;
  std::optional<ScalarFn> rhs2_derivative;  // v' if known in closed form
  double rate = 0.0;
  // Optional data at r = 1: (y(1), y'(1)). For the exact pair, data applies
  // to E and data2 to g.
  std::optional<std::array<double, 2>> data;
  std::optional<std::array<double, 2>> data2;
  SolverOptions options;
};

// Euler-type operator -y'' - (p/r) y' + (q/r^2) y.
struct EulerOperator {
  double p = 0.0;
  double q = 0.0;
  std::pair<double, double> roots() const;  // (k-, k+)
  double apply(double r, double y, double dy, double d2y) const {
    return -d2y - p / r * dy + q / (r * r) * y;
  }
};

struct EulerSolveInfo {
  double k_minus = 0.0;
  double k_plus = 0.0;
  bool double_root = false;
  bool plus_from_infinity = false;
  bool minus_from_infinity = false;
  double a_plus = 0.0;
  double a_minus = 0.0;
  double tail_error = 0.0;
};

// Variation-of-parameters solution of L y = F with O(r^target) behaviour.
// Integrals attached to a root above the target run from infinity, the rest
// from 1. Without data the homogeneous coefficients are zero.
RadialFunction solve_euler(const EulerOperator& op, const ScalarFn& F, double target,
                           const RadialGrid& grid, const SolverOptions& opt,
                           const std::optional<std::array<double, 2>>& data = std::nullopt,
                           EulerSolveInfo* info = nullptr);

struct ResidualReport {
  double max_relative = 0.0;
  double max_absolute = 0.0;
  std::vector<double> pointwise;  // relative residual per grid point (0 at excluded ends)
};

// Independent 8th-order log-grid finite-difference residual of L y - F.
ResidualReport euler_residual(const EulerOperator& op, const RadialFunction& y, const ScalarFn& F);

// Radial operators of the coclosed 1-form and function modes.
EulerOperator coclosed_operator(int n, double eigenvalue);
EulerOperator function_operator(int n, double eigenvalue);

RadialFunction solve_coclosed_mode(const ModeProblem& p, EulerSolveInfo* info = nullptr);

struct ExactPairSolution {
  RadialFunction f;
  RadialFunction g;
  RadialFunction E;
  double derivative_error = 0.0;  // estimated error of v'
  bool zero_mode = false;         // lambda' = 0: f solved directly, g = 0
};

ExactPairSolution solve_exact_pair(const ModeProblem& p);

// Residuals of the coupled f/g system evaluated with 8th-order differences.
struct PairResidual {
  double f_equation = 0.0;
  double g_equation = 0.0;
  std::vector<double> pointwise;  // max of the two relative residuals per grid point
};
PairResidual exact_pair_residual(const ModeProblem& p, const ExactPairSolution& s);

RadialFunction solve_function_mode(const ModeProblem& p, EulerSolveInfo* info = nullptr);

struct WeightedNorm {
  int k = 0;
  double rate = 0.0;
  double value = 0.0;
  bool divergent = false;  // norm keeps growing with the grid extent
  double growth = 1.0;     // norm on [1, R] over norm on [1, R/10]
};

WeightedNorm weighted_norm(const RadialFunction& T, int k, double rate);

// Assembly of mode solutions into a 1-form or function expansion.
enum class ModeFamily { RadialKappa, ExactDKappa, Coclosed, Function };

struct ModeTerm {
  ModeFamily family = ModeFamily::Function;
  int mode_index = 0;
  double eigenvalue = 0.0;
  double order = 0.0;
  double sup_weighted = 0.0;
};

struct AssemblyRecord {
  int n = 0;
  std::vector<ModeTerm> terms;
  double aggregate_order = 0.0;
  double aggregate_norm = 0.0;
  double tail_exponent = 0.0;
  double tail_bound = 0.0;
  std::size_t truncation = 0;
};

// Tail of the series sum over j > N of j^(-1 + (2n - k)/(n - 1)).
double truncation_tail_bound(int n, int k, std::size_t truncation);

AssemblyRecord assemble_one_form(const std::vector<ModeTerm>& modes, const LinkSpectrum& spec, int k_reg = -1);

// Derivative of f at r via central differences in log r; returns (value, error estimate).
std::array<double, 2> log_derivative(const ScalarFn& f, double r, double h = 0.02);

}  // namespace conekit
