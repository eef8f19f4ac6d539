#pragma once

// Exact polynomial algebra over Q(i) in the formal variables (z1, z2, w1, w2),
// w = conj(z), with r^2 = z1 w1 + z2 w2.

#include <gmpxx.h>

#include <array>
#include <map>
#include <string>
#include <vector>

namespace conekit::exact {

struct Qi {
  mpq_class re = 0;
  mpq_class im = 0;
  Qi() = default;
  Qi(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}
  bool is_zero() const { return re == 0 && im == 0; }
  Qi conj() const { return {re, -im}; }
};

inline Qi operator+(const Qi& a, const Qi& b) { return {a.re + b.re, a.im + b.im}; }
inline Qi operator-(const Qi& a, const Qi& b) { return {a.re - b.re, a.im - b.im}; }
inline Qi operator-(const Qi& a) { return {-a.re, -a.im}; }
inline Qi operator*(const Qi& a, const Qi& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline Qi operator/(const Qi& a, const Qi& b) {
  const mpq_class d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline bool operator==(const Qi& a, const Qi& b) { return a.re == b.re && a.im == b.im; }

using Exponent = std::array<int, 4>;  // powers of z1, z2, w1, w2

enum Var { Z1 = 0, Z2 = 1, W1 = 2, W2 = 3 };

class Poly {
 public:
  std::map<Exponent, Qi> terms;

  static Poly monomial(const Exponent& e, Qi c = Qi(1)) {
    Poly p;
    if (!c.is_zero()) p.terms[e] = std::move(c);
    return p;
  }
  static Poly var(Var v) {
    Exponent e{0, 0, 0, 0};
    e[v] = 1;
    return monomial(e);
  }
  static Poly r2() { return var(Z1) * var(W1) + var(Z2) * var(W2); }

  bool is_zero() const { return terms.empty(); }
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms) d = std::max(d, e[0] + e[1] + e[2] + e[3]);
    return d;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [e, c] : o.terms) add_term(e, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [e, c] : o.terms) add_term(e, -c);
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ea, ca] : a.terms)
      for (const auto& [eb, cb] : b.terms) {
        Exponent e;
        for (int k = 0; k < 4; ++k) e[k] = ea[k] + eb[k];
        out.add_term(e, ca * cb);
      }
    return out;
  }
  friend Poly operator*(const Qi& s, const Poly& a) {
    Poly out;
    if (s.is_zero()) return out;
    for (const auto& [e, c] : a.terms) out.terms[e] = s * c;
    return out;
  }

  Poly derivative(Var v) const {
    Poly out;
    for (const auto& [e, c] : terms) {
      if (e[v] == 0) continue;
      Exponent f = e;
      f[v] -= 1;
      out.add_term(f, Qi(mpq_class(e[v])) * c);
    }
    return out;
  }

  // Complex conjugate: swaps z and w, conjugates coefficients.
  Poly conj() const {
    Poly out;
    for (const auto& [e, c] : terms) out.terms[{e[2], e[3], e[0], e[1]}] = c.conj();
    return out;
  }

  void add_term(const Exponent& e, const Qi& c) {
    if (c.is_zero()) return;
    auto it = terms.find(e);
    if (it == terms.end()) {
      terms.emplace(e, c);
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
};

// All exponent vectors of total degree d in 4 variables, in a fixed order.
std::vector<Exponent> monomials(int d);

// P * r^{-mu} with rational mu.
struct RPoly {
  Poly p;
  mpq_class mu = 0;

  // d/dv (P r^{-mu}) = (r^2 dP/dv - (mu/2) d(r^2)/dv P) r^{-mu-2}
  RPoly derivative(Var v) const;
  RPoly conj() const { return {p.conj(), mu}; }
};

// Sum of RPoly terms with one term per class of mu modulo 2; terms of a class
// are brought to the largest mu seen in it.
struct RSum {
  std::vector<RPoly> terms;
  void add(const RPoly& t);
  RSum derivative(Var v) const;
  RSum conj() const;
  RSum scaled(const Qi& s) const;
  bool is_zero() const;
  void normalize();
};

// Reduced row echelon form over Q(i); returns pivot columns.
std::vector<int> rref(std::vector<std::vector<Qi>>& m);
int rank(std::vector<std::vector<Qi>> m);
// Basis of the right kernel, one vector per free column.
std::vector<std::vector<Qi>> kernel(std::vector<std::vector<Qi>> m, int ncols);

std::string to_string(const mpq_class& q);

}  // namespace conekit::exact
