#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conekit/errors.hpp"
#include "conekit/mass_expansion.hpp"
#include "conekit/sphere_quadrature.hpp"
#include "fixtures.hpp"

using namespace conekit;

namespace {

std::map<std::string, double> params_of(const nlohmann::json& j) {
  std::map<std::string, double> p;
  for (const auto& [k, v] : j.items()) p[k] = v.get<double>();
  return p;
}

// h_12 = h_21 = eps r^-tau: slow decay, zero flux by symmetry.
MetricField slow_shear(int N, double eps, double tau) {
  return perturbed_euclidean(N, [N, eps, tau](const Jet* x, Jet* h) {
    Jet s(0.0, x[0].n);
    for (int i = 0; i < N; ++i) s = s + x[i] * x[i];
    for (int i = 0; i < N * N; ++i) h[i] = Jet(0.0, x[0].n);
    h[1] = h[N] = eps * pow(s, -0.5 * tau);
  }, "slow-shear");
}

}  // namespace

TEST_CASE("AC and ALE normalizations differ by the order of the group") {
  for (int N : {3, 4, 6})
    for (int q : {1, 2, 3}) {
      CHECK(normalization_ratio(N, q) == doctest::Approx(q).epsilon(1e-10));
      CHECK(link_volume(N, q) == doctest::Approx(sphere_volume_closed_form(N) / q).epsilon(1e-11));
    }
  CHECK(ac_constant(4, link_volume(4)) == doctest::Approx(ale_constant(4)));
  CHECK(parse_normalization("ale") == Normalization::ALE);
  CHECK_THROWS_AS(parse_normalization("adm"), Error);
}

TEST_CASE("boundary masses match the symbolic oracle") {
  const auto fx = load_fixture("boundary_mass.json");
  for (const auto& e : fx["entries"]) {
    const auto fam = make_family(e["family"], params_of(e["params"]));
    const double expected = e["value"];
    const auto rep = mass(fam.metric, {});
    CAPTURE(fam.name);
    CHECK(std::abs(rep.mass - expected) < 1e-5 * std::max(1.0, std::abs(expected)));
    CHECK(rep.mass_error < 1e-4);
    CHECK_FALSE(rep.decay_warning);
  }
}

TEST_CASE("Kahler boundary term agrees with the ADM integral") {
  for (const auto& [name, params] : std::vector<std::pair<std::string, std::map<std::string, double>>>{
           {"burns", {{"c", 0.7}}}, {"potential", {{"n", 3}, {"c", 0.4}}}, {"eguchi-hanson", {{"a", 1.1}}}}) {
    const auto fam = make_family(name, params);
    const auto adm = mass(fam.metric, {});
    const auto km = kahler_mass(*fam.potential, {});
    CAPTURE(name);
    CHECK(std::abs(adm.mass - km.mass) < 1e-5 * std::max(1.0, std::abs(adm.mass)));
  }
}

TEST_CASE("mass formula right-hand side for Burns") {
  const auto fam = make_family("burns", {{"c", 2.0}});
  REQUIRE(fam.pairing.has_value());
  const double rhs = mass_formula_rhs(*fam.pairing, 0.0, 2, link_volume(4));
  CHECK(rhs == doctest::Approx(2.0 / 3.0));
  CHECK(mass(fam.metric, {}).mass == doctest::Approx(rhs).epsilon(1e-5));
  // scalar term alone
  CHECK(mass_formula_rhs(0.0, 6.0, 2, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("expansion coefficient relations") {
  for (int n : {2, 3, 4, 5})
    for (double m : {-1.3, 0.0, 0.25, 4.0}) {
      CHECK(mass_from_coefficient(expansion_coefficient(m, n), n) == doctest::Approx(m));
      CHECK(mass_from_coefficient_consistent(expansion_coefficient_consistent(m, n), n) == doctest::Approx(m));
      CHECK(expansion_coefficient_consistent(m, n) == doctest::Approx(2.0 * expansion_coefficient(m, n)));
    }
  CHECK(expansion_coefficient(1.0, 2) == doctest::Approx(1.5));
  CHECK_THROWS_AS(expansion_coefficient(1.0, 1), Error);
}

TEST_CASE("consistent relation closes the loop through the boundary integral") {
  // u = t/2 + (c/2) log t and u = t/2 + c t^{-1}: model coefficient c.
  for (const auto& [fam, n] : std::vector<std::pair<MetricFamily, int>>{
           {make_family("burns", {{"c", 0.6}}), 2}, {make_family("potential", {{"n", 3}, {"c", 0.6}}), 3}}) {
    const double m = mass(fam.metric, {}).mass;
    CHECK(expansion_coefficient_consistent(m, n) == doctest::Approx(0.6).epsilon(1e-5));
  }
}

TEST_CASE("mass scales like lambda^{2-N}") {
  for (int N : {3, 4}) {
    const auto g = schwarzschild(N, 1.0);
    const double m1 = mass(g, {}).mass;
    const double m2 = mass(rescaled(g, 2.0), {}).mass;
    CHECK(m2 == doctest::Approx(m1 * std::pow(2.0, 2 - N)).epsilon(1e-5));
  }
}

TEST_CASE("pure gauge and flat metrics have zero mass") {
  CHECK(std::abs(mass(pure_gauge(4, 0.3), {0.5, 1.5, 4}).mass) < 1e-10);
  CHECK(std::abs(mass(euclidean(5), {}).mass) < 1e-14);
}

TEST_CASE("crepant and positive-parameter families have nonnegative mass") {
  CHECK(mass(make_family("eguchi-hanson", {{"a", 0.9}}).metric, {}).mass > -1e-8);
  for (double c : {0.2, 1.0, 3.0}) CHECK(mass(make_family("burns", {{"c", c}}).metric, {}).mass > 0.0);
  for (double m : {0.5, 2.0}) CHECK(mass(schwarzschild(4, m), {}).mass > 0.0);
}

TEST_CASE("extrapolation recovers a power-law approach") {
  RadiusSchedule s;
  const auto r = s.radii();
  std::vector<double> v;
  for (double x : r) v.push_back(3.0 + 2.0 * std::pow(x, -1.5));
  const auto fit = extrapolate(r, v);
  CHECK(fit.limit == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.exponent == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.error < 1e-10);
  const auto flat = extrapolate(r, std::vector<double>(r.size(), 1.25));
  CHECK(flat.limit == 1.25);
  CHECK(flat.exponent == 0.0);
  CHECK_THROWS_AS(extrapolate({}, {}), Error);
  CHECK_THROWS_AS((RadiusSchedule{1.0, 1.0, 3}.radii()), Error);
}

TEST_CASE("growing boundary integrals have no limit") {
  const auto g = perturbed_euclidean(3, [](const Jet* x, Jet* h) {
    for (int i = 0; i < 9; ++i) h[i] = Jet(0.0, x[0].n);
    h[0] = h[4] = h[8] = 1e-3 * sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  });
  try {
    mass(g, {});
    FAIL("expected NoLimit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoLimit);
  }
}

TEST_CASE("slow decay warns, or throws in strict mode") {
  const auto g = slow_shear(4, 0.1, 0.5);
  const auto rep = mass(g, {});
  CHECK(rep.decay_warning);
  CHECK(rep.fitted_tau == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(rep.mass) < 1e-10);
  MassOptions strict;
  strict.allow_slow_decay = false;
  CHECK_THROWS_AS(mass(g, {}, strict), Error);
}

TEST_CASE("leading term constant") {
  for (int n : {3, 4, 6}) {
    CAPTURE(n);
    const double a = 0.5 * (2 - n);
    // positive Laplacian of (1 + r^2)^{(2-n)/2}
    const auto lap = [n, a](double r, const std::vector<double>&) {
      const double s = r * r + 1.0;
      return -2.0 * a * std::pow(s, a - 2.0) * (n * s + 2.0 * (a - 1.0) * r * r);
    };
    CHECK(leading_term_constant(lap, n).A == doctest::Approx(1.0).epsilon(1e-8));
    const auto tail = leading_term_constant([n](double r, const std::vector<double>&) { return std::pow(r, -n - 1.0); },
                                            n, 1.0);
    CHECK(tail.A == doctest::Approx(1.0 / (n - 2)).epsilon(1e-8));
    CHECK(tail.tail_slope == doctest::Approx(-n - 1.0).epsilon(1e-6));
  }
  CHECK(leading_term_constant([](double, const std::vector<double>&) { return 0.0; }, 4).A == 0.0);
  // angular dependence averages out
  const auto ang = leading_term_constant(
      [](double r, const std::vector<double>& u) { return (1.0 + u[0]) * std::pow(r, -5.0); }, 4, 1.0);
  CHECK(ang.A == doctest::Approx(0.5).epsilon(1e-8));
  try {
    leading_term_constant([](double r, const std::vector<double>&) { return std::pow(r, -4.0); }, 4, 1.0);
    FAIL("expected TailDivergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TailDivergence);
  }
  try {
    leading_term_constant([](double, const std::vector<double>&) { return 1.0; }, 2);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("annulus integral of DR equals the boundary flux difference") {
  const auto g = perturbed_euclidean(3, [](const Jet* x, Jet* h) {
    for (int i = 0; i < 9; ++i) h[i] = Jet(0.0, x[0].n);
    const Jet s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const Jet b = 0.1 * exp(-0.125 * s);
    h[0] = b * x[0] * x[1];
    h[1] = h[3] = b * x[2] + 0.05 * x[0];
    h[8] = 0.2 / (1.0 + s) * x[0] * x[0];
  });
  const auto flat = euclidean(3);
  const double lhs =
      annulus_integral(3, 1.0, 2.0, [&](const std::vector<double>& x) { return linearized_scalar(g, flat, x); });
  const double rhs = adm_integrand(g, flat, 2.0).value - adm_integrand(g, flat, 1.0).value;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  CHECK(std::abs(rhs) > 1e-3);
  CHECK(adm_integrand(g, 1.5).value == doctest::Approx(adm_integrand(g, flat, 1.5).value).epsilon(1e-10));
}

TEST_CASE("family construction validates parameters") {
  CHECK_THROWS_AS(make_family("taub-nut", {}), Error);
  CHECK_THROWS_AS(make_family("burns", {{"a", 1.0}}), Error);
  CHECK_THROWS_AS(make_family("schwarzschild", {{"N", 2.5}}), Error);
  const auto eh = make_family("eguchi-hanson", {});
  CHECK(eh.metric.quotient_order == 2);
  CHECK(eh.crepant);
}
