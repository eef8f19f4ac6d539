#include <doctest.h>

#include <cmath>

#include "conekit/errors.hpp"
#include "conekit/radial_modes.hpp"

using namespace conekit;

namespace {

double max_rel_error(const RadialFunction& y, const ScalarFn& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < y.r.size(); ++i) {
    const double ex = exact(y.r[i]);
    e = std::max(e, std::abs(y.value[i] - ex) / std::abs(ex));
  }
  return e;
}

// L r^s for L = -d^2 - (p/r) d + q/r^2
double euler_symbol(const EulerOperator& op, double s) { return -s * (s - 1.0) - op.p * s + op.q; }

}  // namespace

TEST_CASE("Euler operator roots") {
  const auto [km, kp] = function_operator(4, 3.0).roots();
  CHECK(km == doctest::Approx(-3.0));
  CHECK(kp == doctest::Approx(1.0));
  const auto [cm, cp] = coclosed_operator(4, 0.0).roots();
  CHECK(cm == doctest::Approx(0.0));
  CHECK(cp == doctest::Approx(0.0));
}

TEST_CASE("manufactured coclosed mode") {
  const int n = 5;
  const double lam = 8.0, s = -2.5;
  const double c = euler_symbol(coclosed_operator(n, lam), s);
  ModeProblem p;
  p.kind = ModeKind::Coclosed;
  p.n = n;
  p.eigenvalue = lam;
  p.rhs = [c, s](double r) { return c * std::pow(r, s - 2.0); };
  p.rate = -3.9;
  p.data = std::array<double, 2>{1.0, s};
  p.options.rmax = 1e3;
  const auto y = solve_coclosed_mode(p);
  CHECK(max_rel_error(y, [s](double r) { return std::pow(r, s); }) < 1e-8);
  const auto res = euler_residual(coclosed_operator(n, lam), y, p.rhs);
  CHECK(res.max_relative < 1e-8);
}

TEST_CASE("coclosed logarithmic case in dimension four") {
  ModeProblem p;
  p.kind = ModeKind::Coclosed;
  p.n = 4;
  p.eigenvalue = 0.0;
  p.rhs = [](double r) { return std::pow(r, -3.0); };
  p.rate = -4.0;
  p.options.rmax = 1e3;
  EulerSolveInfo info;
  const auto y = solve_coclosed_mode(p, &info);
  CHECK(info.double_root);
  CHECK(max_rel_error(y, [](double r) { return -1.0 / r; }) < 1e-8);
}

TEST_CASE("manufactured function mode") {
  const int n = 4;
  const double lam = 3.0, s = -2.0;
  const double c = euler_symbol(function_operator(n, lam), s);
  CHECK(c == doctest::Approx(3.0));
  ModeProblem p;
  p.kind = ModeKind::Function;
  p.n = n;
  p.eigenvalue = lam;
  p.rhs = [c, s](double r) { return c * std::pow(r, s - 2.0); };
  p.rate = s;
  p.data = std::array<double, 2>{1.0, s};
  p.options.rmax = 1e3;
  const auto y = solve_function_mode(p);
  CHECK(max_rel_error(y, [s](double r) { return std::pow(r, s); }) < 1e-8);
  CHECK(y.fitted_decay() == doctest::Approx(s).epsilon(1e-6));
}

TEST_CASE("function mode without data decays at the fast rate") {
  ModeProblem p;
  p.kind = ModeKind::Function;
  p.n = 4;
  p.eigenvalue = 0.0;
  // -y'' - 3y'/r = r^{-6} has the particular solution -r^{-4}/8.
  p.rhs = [](double r) { return std::pow(r, -6.0); };
  p.rate = -3.0;
  p.options.rmax = 1e3;
  EulerSolveInfo info;
  const auto y = solve_function_mode(p, &info);
  CHECK(info.plus_from_infinity);
  CHECK(y.fitted_decay() < -1.9);
  CHECK(euler_residual(function_operator(4, 0.0), y, p.rhs).max_relative < 1e-8);
}

TEST_CASE("manufactured exact pair") {
  const double n = 5, lam = 4.0, s = -1.5;
  // E = r^s, g = r^{s+1}, f = g' + E
  const double fc = s + 2.0;
  const double uc = -fc * s * (s - 1) - (n - 1) * fc * s + (n - 1 + lam) * fc - 2 * lam;
  const double vc = -(s + 1) * s - (n - 3) * (s + 1) + lam - 2 * fc;
  ModeProblem p;
  p.kind = ModeKind::ExactPair;
  p.n = 5;
  p.eigenvalue = lam;
  p.rhs = [uc, s](double r) { return uc * std::pow(r, s - 2.0); };
  p.rhs2 = [vc, s](double r) { return vc * std::pow(r, s - 1.0); };
  p.rate = s - 2.0;
  p.data = std::array<double, 2>{1.0, s};
  p.data2 = std::array<double, 2>{1.0, s + 1.0};
  p.options.rmax = 1e3;
  p.options.points_per_decade = 32;

  SUBCASE("closed-form v'") {
    p.rhs2_derivative = [vc, s](double r) { return vc * (s - 1.0) * std::pow(r, s - 2.0); };
    const auto sol = solve_exact_pair(p);
    CHECK(max_rel_error(sol.E, [s](double r) { return std::pow(r, s); }) < 1e-7);
    CHECK(max_rel_error(sol.g, [s](double r) { return std::pow(r, s + 1); }) < 1e-7);
    CHECK(max_rel_error(sol.f, [s, fc](double r) { return fc * std::pow(r, s); }) < 1e-7);
    const auto res = exact_pair_residual(p, sol);
    CHECK(res.f_equation < 1e-7);
    CHECK(res.g_equation < 1e-7);
  }
  SUBCASE("differentiated v") {
    const auto sol = solve_exact_pair(p);
    CHECK(sol.derivative_error < p.options.deriv_tol);
    CHECK(max_rel_error(sol.g, [s](double r) { return std::pow(r, s + 1); }) < 1e-6);
  }
}

TEST_CASE("exact pair with the constant mode reduces to one equation") {
  ModeProblem p;
  p.kind = ModeKind::ExactPair;
  p.n = 4;
  p.eigenvalue = 0.0;
  // -f'' - 3f'/r + 3f/r^2 with f = r^{-2}: -6 + 6 + 3 = 3
  p.rhs = [](double r) { return 3.0 * std::pow(r, -4.0); };
  p.rate = -2.5;
  p.data = std::array<double, 2>{1.0, -2.0};
  p.options.rmax = 1e3;
  const auto sol = solve_exact_pair(p);
  CHECK(sol.zero_mode);
  CHECK(max_rel_error(sol.f, [](double r) { return std::pow(r, -2.0); }) < 1e-8);
  CHECK(exact_pair_residual(p, sol).f_equation < 1e-8);
}

TEST_CASE("exceptional rates are refused") {
  ModeProblem p;
  p.kind = ModeKind::Function;
  p.n = 4;
  p.eigenvalue = 3.0;
  p.rhs = [](double) { return 0.0; };
  p.rate = 1.0;
  try {
    solve_function_mode(p);
    FAIL("expected ExceptionalRate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ExceptionalRate);
  }
  p.rate = -3.0;
  CHECK_THROWS_AS(solve_function_mode(p), Error);
  p.kind = ModeKind::Coclosed;
  p.rate = -2.0;
  CHECK_THROWS_AS(solve_function_mode(p), Error);
}

TEST_CASE("weighted norm detects the decay rate") {
  const auto grid = RadialGrid::geometric(1e4, 32);
  const auto T = sample([](double r) { return std::pow(r, -2.0); }, grid, -2.0);
  const auto ok = weighted_norm(T, 0, -2.0);
  CHECK_FALSE(ok.divergent);
  // sup of (1 + r^-2) is attained at r = 1
  CHECK(ok.value == doctest::Approx(2.0));
  CHECK_FALSE(weighted_norm(T, 2, -2.0).divergent);
  const auto bad = weighted_norm(T, 2, -3.0);
  CHECK(bad.divergent);
  CHECK(bad.growth == doctest::Approx(10.0).epsilon(0.05));
  CHECK_THROWS_AS(weighted_norm(T, -1, 0.0), Error);
}

TEST_CASE("truncation tail bound") {
  CHECK(truncation_tail_bound(4, 12, 10) == doctest::Approx(std::pow(10.0, -4.0 / 3.0) / (4.0 / 3.0)));
  CHECK_THROWS_AS(truncation_tail_bound(4, 8, 10), Error);
  CHECK(truncation_tail_bound(4, 12, 100) < truncation_tail_bound(4, 12, 10));
}

TEST_CASE("one-form assembly bookkeeping") {
  const auto spec = sphere_spectrum(3, 3);
  std::vector<ModeTerm> terms = {{ModeFamily::Coclosed, 1, 4.0, -3.0, 1.0},
                                 {ModeFamily::ExactDKappa, 1, 3.0, -2.5, 2.0},
                                 {ModeFamily::RadialKappa, 0, 0.0, -4.0, 0.5}};
  const auto rec = assemble_one_form(terms, spec);
  CHECK(rec.n == 4);
  CHECK(rec.aggregate_order == -2.5);
  CHECK(rec.aggregate_norm == doctest::Approx(1.0 * std::pow(5.0, 2.5) + 2.0 * std::pow(4.0, 3.5) + 0.5));
  CHECK(rec.tail_bound > 0.0);
  terms.push_back({ModeFamily::ExactDKappa, 0, 0.0, -3.0, 1.0});
  CHECK_THROWS_AS(assemble_one_form(terms, spec), Error);
  terms.back() = {ModeFamily::Coclosed, 1, 5.0, -3.0, 1.0};
  CHECK_THROWS_AS(assemble_one_form(terms, spec), Error);
}

TEST_CASE("log-step derivative") {
  const auto d = log_derivative([](double r) { return r * r * r; }, 2.0);
  CHECK(d[0] == doctest::Approx(12.0).epsilon(1e-10));
  CHECK(d[1] < 1e-6);
}

TEST_CASE("mode kind parsing") {
  CHECK(parse_mode_kind("pair") == ModeKind::ExactPair);
  CHECK(to_string(ModeKind::Coclosed) == "coclosed");
  CHECK_THROWS_AS(parse_mode_kind("scalar"), Error);
}
