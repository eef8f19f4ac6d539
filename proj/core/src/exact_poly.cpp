#include "exact_poly.hpp"

#include <algorithm>

namespace conekit::exact {

std::vector<Exponent> monomials(int d) {
  std::vector<Exponent> out;
  if (d < 0) return out;
  for (int a = d; a >= 0; --a)
    for (int b = d - a; b >= 0; --b)
      for (int c = d - a - b; c >= 0; --c) out.push_back({a, b, c, d - a - b - c});
  return out;
}

RPoly RPoly::derivative(Var v) const {
  const Poly r2 = Poly::r2();
  RPoly out;
  out.mu = mu + 2;
  out.p = r2 * p.derivative(v) - Qi(mu / 2) * (r2.derivative(v) * p);
  return out;
}

namespace {

bool same_class(const mpq_class& a, const mpq_class& b) {
  const mpq_class d = (a - b) / 2;
  return d.get_den() == 1;
}

Poly r2_power(int j) {
  Poly out = Poly::monomial({0, 0, 0, 0});
  const Poly r2 = Poly::r2();
  for (int i = 0; i < j; ++i) out = out * r2;
  return out;
}

}  // namespace

void RSum::add(const RPoly& t) {
  if (t.p.is_zero()) return;
  for (auto& s : terms) {
    if (!same_class(s.mu, t.mu)) continue;
    if (s.mu >= t.mu) {
      const mpq_class j = (s.mu - t.mu) / 2;
      s.p += r2_power(static_cast<int>(j.get_num().get_si())) * t.p;
    } else {
      const mpq_class j = (t.mu - s.mu) / 2;
      s.p = r2_power(static_cast<int>(j.get_num().get_si())) * s.p + t.p;
      s.mu = t.mu;
    }
    return;
  }
  terms.push_back(t);
}

RSum RSum::derivative(Var v) const {
  RSum out;
  for (const auto& t : terms) out.add(t.derivative(v));
  return out;
}

RSum RSum::conj() const {
  RSum out;
  for (const auto& t : terms) out.add(t.conj());
  return out;
}

RSum RSum::scaled(const Qi& s) const {
  RSum out;
  for (const auto& t : terms) out.add({s * t.p, t.mu});
  return out;
}

bool RSum::is_zero() const {
  return std::all_of(terms.begin(), terms.end(), [](const RPoly& t) { return t.p.is_zero(); });
}

void RSum::normalize() {
  std::vector<RPoly> old;
  old.swap(terms);
  for (const auto& t : old) add(t);
  terms.erase(std::remove_if(terms.begin(), terms.end(), [](const RPoly& t) { return t.p.is_zero(); }), terms.end());
}

std::vector<int> rref(std::vector<std::vector<Qi>>& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const int rows = static_cast<int>(m.size()), cols = static_cast<int>(m[0].size());
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = -1;
    for (int i = row; i < rows; ++i)
      if (!m[i][col].is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[row], m[piv]);
    const Qi inv = Qi(1) / m[row][col];
    for (int j = col; j < cols; ++j) m[row][j] = m[row][j] * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == row || m[i][col].is_zero()) continue;
      const Qi f = m[i][col];
      for (int j = col; j < cols; ++j)
        if (!m[row][j].is_zero()) m[i][j] = m[i][j] - f * m[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int rank(std::vector<std::vector<Qi>> m) { return static_cast<int>(rref(m).size()); }

std::vector<std::vector<Qi>> kernel(std::vector<std::vector<Qi>> m, int ncols) {
  std::vector<int> piv = m.empty() ? std::vector<int>{} : rref(m);
  std::vector<bool> is_piv(ncols, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<std::vector<Qi>> out;
  for (int free = 0; free < ncols; ++free) {
    if (is_piv[free]) continue;
    std::vector<Qi> v(ncols);
    v[free] = Qi(1);
    for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -m[k][free];
    out.push_back(std::move(v));
  }
  return out;
}

std::string to_string(const mpq_class& q) {
  const mpq_class c = q;
  return c.get_den() == 1 ? c.get_num().get_str() : c.get_str();
}

}  // namespace conekit::exact
