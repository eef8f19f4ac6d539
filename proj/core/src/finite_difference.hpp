#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace conekit::fd {

// Fornberg weights for the m-th derivative at x0 from nodes x.
inline std::vector<double> fornberg(const std::vector<double>& x, double x0, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

inline constexpr std::array<double, 9> kFirst8 = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                                                  4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
inline constexpr std::array<double, 9> kSecond8 = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                                   8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
inline constexpr std::array<double, 7> kFirst6 = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};

// Unscaled 8th-order central differences of uniformly spaced samples.
inline double central8_first(const std::vector<double>& v, std::size_t i) {
  double s = 0.0;
  for (int k = 0; k < 9; ++k) s += kFirst8[k] * v[i + k - 4];
  return s;
}

inline double central8_second(const std::vector<double>& v, std::size_t i) {
  double s = 0.0;
  for (int k = 0; k < 9; ++k) s += kSecond8[k] * v[i + k - 4];
  return s;
}

// d f / d r at r via differences in t = log r; returns (value, |8th - 6th order|).
template <class F>
std::array<double, 2> log_first_derivative(const F& f, double r, double h) {
  double s8 = 0.0, s6 = 0.0;
  for (int k = -4; k <= 4; ++k) {
    if (k == 0) continue;
    const double v = f(r * std::exp(k * h));
    s8 += kFirst8[k + 4] * v;
    if (k >= -3 && k <= 3) s6 += kFirst6[k + 3] * v;
  }
  return {s8 / (h * r), std::abs(s8 - s6) / (h * r)};
}

template <class F>
double log_second_derivative(const F& f, double r, double h) {
  double s1 = 0.0, s2 = 0.0;
  for (int k = -4; k <= 4; ++k) {
    const double v = f(r * std::exp(k * h));
    s1 += kFirst8[k + 4] * v;
    s2 += kSecond8[k + 4] * v;
  }
  const double ft = s1 / h, ftt = s2 / (h * h);
  return (ftt - ft) / (r * r);
}

// Signed Stirling numbers of the first kind s(k, j).
inline std::int64_t stirling1(int k, int j) {
  std::vector<std::vector<std::int64_t>> s(k + 1, std::vector<std::int64_t>(k + 1, 0));
  s[0][0] = 1;
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= a; ++b) s[a][b] = s[a - 1][b - 1] - (a - 1) * s[a - 1][b];
  return s[k][j];
}

// order-th r-derivative of samples on a geometric grid with log spacing h.
// Points too close to the ends for the stencil are NaN.
inline std::vector<double> radial_derivative(const std::vector<double>& v, const std::vector<double>& r, double h,
                                             int order) {
  const int half = 4 + (order + 1) / 2;
  std::vector<double> nodes;
  for (int k = -half; k <= half; ++k) nodes.push_back(k * h);
  std::vector<std::vector<double>> w(order + 1);
  for (int j = 1; j <= order; ++j) w[j] = fornberg(nodes, 0.0, j);
  std::vector<double> out(v.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = half; i + half < v.size(); ++i) {
    double acc = 0.0;
    for (int j = 1; j <= order; ++j) {
      double dj = 0.0;
      for (int k = 0; k <= 2 * half; ++k) dj += w[j][k] * v[i + k - half];
      acc += double(stirling1(order, j)) * dj;
    }
    out[i] = acc / std::pow(r[i], order);
  }
  return out;
}

}  // namespace conekit::fd
