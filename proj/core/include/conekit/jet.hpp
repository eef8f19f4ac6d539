#pragma once

#include <array>
#include <cmath>

namespace conekit {

inline constexpr int kMaxDim = 8;

// When false, jet arithmetic skips the Hessian (first derivatives only).
inline thread_local bool jet_hessian = true;

struct FirstOrderJets {
  bool saved = jet_hessian;
  FirstOrderJets() { jet_hessian = false; }
  ~FirstOrderJets() { jet_hessian = saved; }
  FirstOrderJets(const FirstOrderJets&) = delete;
  FirstOrderJets& operator=(const FirstOrderJets&) = delete;
};

// Second-order forward-mode jet in up to kMaxDim variables: value, gradient
// and Hessian. Only the first `n` slots are meaningful.
struct Jet {
  int n = 0;
  double v = 0.0;
  std::array<double, kMaxDim> d{};
  std::array<std::array<double, kMaxDim>, kMaxDim> h;  // zeroed only when jet_hessian

  Jet() : Jet(0.0) {}
  Jet(double value, int dim = 0) : n(dim), v(value) {
    if (jet_hessian) h = {};
  }
  static Jet variable(double value, int index, int dim) {
    Jet j(value, dim);
    j.d[index] = 1.0;
    return j;
  }
};

namespace jet_detail {
inline int dim(const Jet& a, const Jet& b) { return a.n > b.n ? a.n : b.n; }

// f(a) with f' = f1, f'' = f2 at a.v
inline Jet chain(const Jet& a, double f0, double f1, double f2) {
  Jet r(f0, a.n);
  for (int i = 0; i < a.n; ++i) {
    r.d[i] = f1 * a.d[i];
    if (jet_hessian)
      for (int j = 0; j < a.n; ++j) r.h[i][j] = f1 * a.h[i][j] + f2 * a.d[i] * a.d[j];
  }
  return r;
}
}  // namespace jet_detail

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.v + b.v, jet_detail::dim(a, b));
  for (int i = 0; i < r.n; ++i) {
    r.d[i] = a.d[i] + b.d[i];
    if (jet_hessian)
      for (int j = 0; j < r.n; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
  }
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r(-a.v, a.n);
  for (int i = 0; i < a.n; ++i) {
    r.d[i] = -a.d[i];
    if (jet_hessian)
      for (int j = 0; j < a.n; ++j) r.h[i][j] = -a.h[i][j];
  }
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v, jet_detail::dim(a, b));
  for (int i = 0; i < r.n; ++i) {
    r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    if (jet_hessian)
      for (int j = 0; j < r.n; ++j)
        r.h[i][j] = a.h[i][j] * b.v + a.v * b.h[i][j] + a.d[i] * b.d[j] + a.d[j] * b.d[i];
  }
  return r;
}
inline Jet operator*(double s, const Jet& a) {
  Jet r(s * a.v, a.n);
  for (int i = 0; i < a.n; ++i) {
    r.d[i] = s * a.d[i];
    if (jet_hessian)
      for (int j = 0; j < a.n; ++j) r.h[i][j] = s * a.h[i][j];
  }
  return r;
}
inline Jet operator*(const Jet& a, double s) { return s * a; }
inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.v += s;
  return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }
inline Jet reciprocal(const Jet& a) {
  const double iv = 1.0 / a.v;
  return jet_detail::chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
inline Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return jet_detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet log(const Jet& a) { return jet_detail::chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return jet_detail::chain(a, e, e, e);
}
inline Jet pow(const Jet& a, double p) {
  const double f = std::pow(a.v, p);
  return jet_detail::chain(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}
inline Jet sin(const Jet& a) { return jet_detail::chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return jet_detail::chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

}  // namespace conekit
