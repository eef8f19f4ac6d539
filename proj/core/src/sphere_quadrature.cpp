#include "conekit/sphere_quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "conekit/errors.hpp"

namespace conekit {

namespace {

struct GaussLegendre {
  std::vector<double> x, w;
};

const GaussLegendre& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  GaussLegendre gl;
  for (double z : boost::math::legendre_p_zeros<double>(m)) {
    const double dp = boost::math::legendre_p_prime<double>(m, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    gl.x.push_back(z);
    gl.w.push_back(w);
    if (z != 0.0) {
      gl.x.push_back(-z);
      gl.w.push_back(w);
    }
  }
  return cache.emplace(m, std::move(gl)).first->second;
}

}  // namespace

double SphereRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

void check_rule_args(int N, int m) {
  if (N < 2) throw Error(ErrorKind::UnsupportedDimension, "sphere_rule: ambient dimension must be >= 2");
  if (m < 1) throw Error(ErrorKind::Validation, "sphere_rule: m must be >= 1");
}

// Per polar angle theta_k the weight is sin^p theta_k, p = N - 2 - k. Odd p:
// Gauss-Legendre in u = cos theta with the polynomial weight (1-u^2)^{(p-1)/2}.
// Even p: trapezoid over the full circle with |sin theta|^p / 2, which is
// exact for trigonometric polynomials. Both are symmetric under the antipodal
// map of the remaining coordinates, so the tensor rule is exact for
// polynomials of degree below about m.
struct PolarRule {
  std::vector<double> c, s, w;  // cos, sin, weight
};

PolarRule polar_rule(int p, int m) {
  PolarRule r;
  if (p % 2 == 1) {
    const auto& gl = gauss_legendre(m);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double u = gl.x[i];
      r.c.push_back(u);
      r.s.push_back(std::sqrt(1.0 - u * u));
      r.w.push_back(gl.w[i] * std::pow(1.0 - u * u, 0.5 * (p - 1)));
    }
  } else {
    const int M = 2 * m;
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / M;
      r.c.push_back(std::cos(th));
      r.s.push_back(std::sin(th));
      r.w.push_back(std::numbers::pi / M * std::pow(std::abs(std::sin(th)), p));
    }
  }
  return r;
}

// Visits every node of the rule without storing it.
template <class Visit>
void for_each_node(int N, int m, Visit&& visit) {
  const int polar = N - 2;
  const int az = 2 * m;
  const auto pi = std::numbers::pi;
  std::vector<PolarRule> rules;
  for (int k = 0; k < polar; ++k) rules.push_back(polar_rule(N - 2 - k, m));
  std::vector<int> idx(polar, 0);
  std::vector<double> x(N, 0.0);
  while (true) {
    double w = 1.0, s = 1.0;
    for (int k = 0; k < polar; ++k) {
      const auto& pr = rules[k];
      w *= pr.w[idx[k]];
      x[k] = s * pr.c[idx[k]];
      s *= pr.s[idx[k]];
    }
    for (int j = 0; j < az; ++j) {
      const double ph = 2.0 * pi * (j + 0.5) / az;
      x[N - 2] = s * std::cos(ph);
      x[N - 1] = s * std::sin(ph);
      visit(static_cast<const std::vector<double>&>(x), w * 2.0 * pi / az);
    }
    int k = 0;
    while (k < polar && ++idx[k] == static_cast<int>(rules[k].w.size())) idx[k++] = 0;
    if (k == polar) break;
  }
}

double node_count(int N, int m) {
  double c = 2.0 * m;
  for (int k = 0; k < N - 2; ++k) c *= (N - 2 - k) % 2 == 1 ? m : 2 * m;
  return c;
}

// Smallest level that integrates constants exactly (2m > N - 2) with at least
// 64 nodes.
int automatic_m0(int N) {
  int m = std::max(2, N / 2);
  while (node_count(N, m) < 64) m *= 2;
  return m;
}

}  // namespace

SphereRule sphere_rule(int N, int m) {
  check_rule_args(N, m);
  SphereRule rule;
  rule.ambient_dim = N;
  rule.m = m;
  for_each_node(N, m, [&](const std::vector<double>& x, double w) {
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  });
  return rule;
}

SphereIntegral integrate_sphere(int N, double r, const SphereIntegrand& f, double tol, int m0, int m_max) {
  if (m0 == 0) m0 = automatic_m0(N);
  check_rule_args(N, m0);
  constexpr double kMaxNodes = 4e6;
  auto apply = [&](int m) {
    double s = 0.0;
    std::vector<double> y(N);
    for_each_node(N, m, [&](const std::vector<double>& x, double w) {
      for (int i = 0; i < N; ++i) y[i] = r * x[i];
      s += w * f(y);
    });
    return s * std::pow(r, N - 1);
  };
  SphereIntegral out;
  double prev = apply(m0);
  for (int m = m0 + (m0 + 1) / 2; m <= m_max && node_count(N, m) <= kMaxNodes; m += (m + 1) / 2) {
    const double cur = apply(m);
    out.value = cur;
    out.error = std::abs(cur - prev);
    out.m = m;
    if (out.error <= tol * std::max(1.0, std::abs(cur))) return out;
    prev = cur;
  }
  throw Error(ErrorKind::QuadratureNonconvergence,
              "integrate_sphere: refinement difference " + std::to_string(out.error) + " above tolerance at m = " +
                  std::to_string(out.m));
}

double sphere_volume_closed_form(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / boost::math::tgamma(0.5 * N);
}

}  // namespace conekit
