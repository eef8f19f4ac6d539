#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "conekit/errors.hpp"
#include "conekit/indicial.hpp"

using namespace conekit;

namespace {

bool contains(const std::vector<double>& v, double x) {
  return std::any_of(v.begin(), v.end(), [&](double y) { return std::abs(x - y) < 1e-12; });
}

LinkSpectrum synthetic(int dim_link, std::vector<Mode> fn, std::vector<Mode> co) {
  LinkSpectrum s;
  s.dim_link = dim_link;
  s.volume = 1.0;
  s.function_modes = std::move(fn);
  s.coclosed_modes = std::move(co);
  return s;
}

}  // namespace

TEST_CASE("D on flat cones is the set of harmonic polynomial degrees") {
  for (int m : {3, 5}) {
    const int n = m + 1;
    const auto D = compute_D(sphere_spectrum(m, 6), n);
    const auto orders = D.orders();
    CAPTURE(n);
    for (int k = 0; k <= 6; ++k) {
      CHECK(contains(orders, k));
      CHECK(contains(orders, -(n - 2) - k));
    }
    CHECK_FALSE(contains(orders, -1.0));
    for (const auto& e : D.entries) {
      CHECK(e.exact.exact);
      CHECK(e.exact.radicand_is_square);
    }
  }
}

TEST_CASE("D on R^3 via the S^2 function spectrum") {
  const auto D = compute_D(sphere_function_spectrum(2, 2), 3, {-3.0, 3.0});
  std::vector<double> expect = {-3, -2, -1, 0, 1, 2};
  CHECK(D.orders() == expect);
}

TEST_CASE("A on cones over S3") {
  const auto A = compute_A(sphere_spectrum(3, 2), 4);
  // lambda'' = 4: roots +-2, shifted by -1
  std::vector<double> first;
  for (const auto& e : A.entries)
    if (e.source_eigenvalue == 4.0) first.push_back(e.order);
  CHECK(first == std::vector<double>{-3.0, 1.0});
  for (const auto& e : A.entries) {
    CHECK(e.shift == -1.0);
    CHECK(e.mode_index >= 1);
    CHECK_FALSE(e.log_case);
  }
}

TEST_CASE("A flags the logarithmic case at a zero coclosed eigenvalue in dimension 4") {
  const auto s = synthetic(3, {{0.0, 1}}, {{0.0, 1}, {4.0, 2}});
  const auto A = compute_A(s, 4);
  int logs = 0;
  for (const auto& e : A.entries)
    if (e.log_case) {
      ++logs;
      CHECK(e.order == doctest::Approx(-1.0));
    }
  CHECK(logs == 2);
}

TEST_CASE("B and C on cones over S3") {
  const auto B = compute_B(sphere_spectrum(3, 2), 4);
  const auto ob = B.orders();
  for (double x : {-3.0, -2.0, -1.0, 1.0, 2.0, 3.0}) CHECK(contains(ob, x));
  for (const auto& e : B.entries) CHECK(e.shift == 0.0);

  const auto C = compute_C(sphere_spectrum(3, 2), 4);
  const auto oc = C.orders();
  CHECK(contains(oc, -4.0));
  CHECK(contains(oc, 0.0));
  for (const auto& e : C.entries) CHECK(e.mode_index >= 1);
  CHECK(C.entries.size() == 4);
}

TEST_CASE("branch sums are independent of the eigenvalue") {
  const auto s = lens_spectrum(3, 6);
  for (SetLabel L : {SetLabel::A, SetLabel::B, SetLabel::C, SetLabel::D}) {
    const auto set = compute_set(L, s, 4);
    const double expected = branch_sum(L, 4) + 2.0 * (L == SetLabel::A || L == SetLabel::C ? -1.0 : 0.0);
    for (std::size_t i = 0; i < set.entries.size(); ++i)
      for (std::size_t j = 0; j < set.entries.size(); ++j) {
        const auto& a = set.entries[i];
        const auto& b = set.entries[j];
        if (a.mode_index == b.mode_index && a.branch != b.branch && a.source_eigenvalue == b.source_eigenvalue)
          CHECK(a.order + b.order == doctest::Approx(expected));
      }
  }
  CHECK(branch_sum(SetLabel::A, 6) == -2.0);
  CHECK(branch_sum(SetLabel::B, 6) == -2.0);
  CHECK(branch_sum(SetLabel::C, 6) == -4.0);
  CHECK(branch_sum(SetLabel::D, 6) == -4.0);
}

TEST_CASE("irrational orders keep an exact radical") {
  const auto s = synthetic(3, {{0.0, 1}, {2.0, 3}}, {{3.0, 1}});
  const auto D = compute_D(s, 4);
  bool found = false;
  for (const auto& e : D.entries)
    if (e.source_eigenvalue == 2.0 && e.branch == Branch::Plus) {
      found = true;
      CHECK(e.exact.exact);
      CHECK_FALSE(e.exact.radicand_is_square);
      CHECK(e.exact.to_string() == "-1 + sqrt(3)");
      CHECK(e.exact.value() == doctest::Approx(-1.0 + std::sqrt(3.0)));
      CHECK(e.order == doctest::Approx(e.exact.value()));
    }
  CHECK(found);
}

TEST_CASE("window filtering and dimension checks") {
  const auto s = sphere_spectrum(5, 8);
  const auto D = compute_D(s, 6, {-6.0, 2.0});
  for (double o : D.orders()) {
    CHECK(o >= -6.0);
    CHECK(o <= 2.0);
  }
  CHECK_THROWS_AS(compute_D(s, 4), Error);
  try {
    compute_A(s, 5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  CHECK_THROWS_AS(parse_set_label("E"), Error);
  CHECK(parse_set_label("c") == SetLabel::C);
}

TEST_CASE("exceptional-rate membership") {
  const auto D = compute_D(sphere_spectrum(3, 4), 4);
  CHECK(is_exceptional(-2.0, D).exceptional);
  CHECK(is_exceptional(-2.0 + 1e-8, D).exceptional);
  const auto mid = is_exceptional(-2.5, D);
  CHECK_FALSE(mid.exceptional);
  CHECK(mid.distance == doctest::Approx(0.5));
  REQUIRE(mid.nearest.has_value());
  CHECK(std::abs(mid.nearest->order + 2.5) == doctest::Approx(0.5));
  const auto gap = is_exceptional(-1.0, D);
  CHECK_FALSE(gap.exceptional);
  CHECK(gap.distance == doctest::Approx(1.0));
  CHECK_THROWS_AS(is_exceptional(0.0, D, 0.0), Error);
}

TEST_CASE("rational detection") {
  auto q = detect_rational(0.75);
  REQUIRE(q);
  CHECK(q->num == 3);
  CHECK(q->den == 4);
  CHECK_FALSE(detect_rational(std::sqrt(2.0)).has_value());
  CHECK_FALSE(detect_rational(std::nan("")).has_value());
}
