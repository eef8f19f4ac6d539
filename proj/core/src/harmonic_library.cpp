#include "conekit/harmonic_library.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "conekit/errors.hpp"
#include "exact_poly.hpp"
#include "finite_difference.hpp"

namespace conekit {

using exact::Exponent;
using exact::Poly;
using exact::Qi;
using exact::RPoly;
using exact::RSum;
using exact::Var;

namespace {

Rational to_rational(const mpq_class& q) {
  return {q.get_num().get_si(), q.get_den().get_si()};
}

mpq_class to_mpq(const Rational& r) {
  mpq_class q(r.num, r.den);
  q.canonicalize();
  return q;
}

ComplexRational to_public(const Qi& c) { return {to_rational(c.re), to_rational(c.im)}; }
Qi to_qi(const ComplexRational& c) { return {to_mpq(c.re), to_mpq(c.im)}; }

std::vector<PolyTerm> to_public(const Poly& p) {
  std::vector<PolyTerm> out;
  for (const auto& [e, c] : p.terms) out.push_back({e, to_public(c)});
  return out;
}

Poly to_poly(const std::vector<PolyTerm>& terms) {
  Poly p;
  for (const auto& t : terms) p.add_term(t.exponents, to_qi(t.coefficient));
  return p;
}

RSum to_rsum(const RExpr& f) {
  RSum s;
  for (const auto& t : f) s.add({to_poly(t.poly), to_mpq(t.mu)});
  s.normalize();
  return s;
}

RExpr to_rexpr(const RSum& s) {
  RExpr out;
  for (const auto& t : s.terms)
    if (!t.p.is_zero()) out.push_back({to_public(t.p), to_rational(t.mu)});
  return out;
}

std::complex<double> cval(const ComplexRational& c) { return {c.re.value(), c.im.value()}; }

std::complex<double> eval_poly(const std::vector<PolyTerm>& p, std::complex<double> z1, std::complex<double> z2) {
  const std::complex<double> v[4] = {z1, z2, std::conj(z1), std::conj(z2)};
  std::complex<double> acc = 0.0;
  for (const auto& t : p) {
    std::complex<double> m = cval(t.coefficient);
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < t.exponents[k]; ++j) m *= v[k];
    acc += m;
  }
  return acc;
}

std::string qi_string(const Qi& c) {
  if (c.im == 0) return exact::to_string(c.re);
  if (c.re == 0) return exact::to_string(c.im) + "i";
  return "(" + exact::to_string(c.re) + (c.im > 0 ? "+" : "") + exact::to_string(c.im) + "i)";
}

std::string poly_string(const Poly& p) {
  if (p.is_zero()) return "0";
  static const char* names[4] = {"z1", "z2", "zb1", "zb2"};
  std::ostringstream os;
  bool first = true;
  // Descending exponent order for a readable canonical listing.
  for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
    const auto& [e, c] = *it;
    std::string coef = qi_string(c);
    bool neg = !coef.empty() && coef[0] == '-';
    if (neg) coef = coef.substr(1);
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    first = false;
    std::string mono;
    for (int k = 0; k < 4; ++k) {
      if (e[k] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[k];
      if (e[k] > 1) mono += "^" + std::to_string(e[k]);
    }
    if (mono.empty()) {
      os << coef;
    } else {
      if (coef != "1") os << coef << "*";
      os << mono;
    }
  }
  return os.str();
}

void check_complex_dim(const LinkSpectrum& spec, int n_complex) {
  if (n_complex < 2) throw Error(ErrorKind::UnsupportedDimension, "n_complex must be >= 2");
  if (spec.dim_link != 2 * n_complex - 1)
    throw Error(ErrorKind::DimensionMismatch, "link dimension " + std::to_string(spec.dim_link) +
                                                  " is not 2n - 1 for n = " + std::to_string(n_complex));
}

// ---- exact polynomials in N real variables for the brute-force count ----

using RealExp = std::vector<int>;

void real_monomials(int N, int d, RealExp& cur, int var, std::vector<RealExp>& out) {
  if (var == N - 1) {
    cur[var] = d;
    out.push_back(cur);
    return;
  }
  for (int a = d; a >= 0; --a) {
    cur[var] = a;
    real_monomials(N, d - a, cur, var + 1, out);
  }
}

std::vector<RealExp> real_monomials(int N, int d) {
  std::vector<RealExp> out;
  if (d < 0) return out;
  RealExp cur(N, 0);
  real_monomials(N, d, cur, 0, out);
  return out;
}

// dim of { P of degree D : r^2 Delta P - c P = 0 }
std::int64_t harmonic_kernel_dim(int N, int D, const mpq_class& c) {
  const auto in = real_monomials(N, D);
  if (in.empty()) return 0;
  const auto outm = real_monomials(N, D);
  std::map<RealExp, int> index;
  for (std::size_t i = 0; i < outm.size(); ++i) index[outm[i]] = static_cast<int>(i);
  std::vector<std::vector<Qi>> M(outm.size(), std::vector<Qi>(in.size()));
  for (std::size_t col = 0; col < in.size(); ++col) {
    const RealExp& e = in[col];
    M[index.at(e)][col] = M[index.at(e)][col] - Qi(c);
    for (int i = 0; i < N; ++i) {
      if (e[i] < 2) continue;
      RealExp f = e;
      f[i] -= 2;
      const mpq_class coef(e[i] * (e[i] - 1));
      for (int j = 0; j < N; ++j) {
        RealExp g = f;
        g[j] += 2;
        M[index.at(g)][col] = M[index.at(g)][col] + Qi(coef);
      }
    }
  }
  return static_cast<std::int64_t>(in.size()) - exact::rank(std::move(M));
}

}  // namespace

std::string to_string(FormType t) {
  switch (t) {
    case FormType::I: return "I";
    case FormType::II: return "II";
    case FormType::III: return "III";
  }
  return "?";
}

ClassificationReport classify_harmonic_one_forms(const LinkSpectrum& spec, int n_complex, Window window,
                                                 double gap_tol) {
  check_complex_dim(spec, n_complex);
  const double n = n_complex;
  ClassificationReport rep;
  rep.n_complex = n_complex;
  rep.bound_I = 1.0 - 2.0 * n;
  rep.bound_II = 2.0 - 2.0 * n;
  rep.bound_III = 1.0 - 2.0 * n;
  std::vector<HomogeneousHarmonicForm> all;
  for (std::size_t i = 0; i < spec.function_modes.size(); ++i) {
    const auto& m = spec.function_modes[i];
    const double lam = m.eigenvalue;
    HomogeneousHarmonicForm f1;
    f1.form_type = FormType::I;
    f1.mode_index = static_cast<int>(i);
    f1.eigenvalue = lam;
    f1.multiplicity = m.multiplicity;
    f1.raw_exponent = -(n - 1.0) - std::sqrt((n - 1.0) * (n - 1.0) + lam);
    f1.order = f1.raw_exponent - 1.0;
    f1.description = "d(r^{" + std::to_string(f1.raw_exponent) + "} kappa_" + std::to_string(i) + ")";
    all.push_back(f1);
    if (lam > 0.0) {
      HomogeneousHarmonicForm f2;
      f2.form_type = FormType::II;
      f2.mode_index = static_cast<int>(i);
      f2.eigenvalue = lam;
      f2.multiplicity = m.multiplicity;
      const double b = -(n - 2.0) - std::sqrt((n - 2.0) * (n - 2.0) + lam + 2.0 * n - 3.0);
      f2.raw_exponent = b;
      f2.order = b;
      f2.coefficient_B = -b * b - 2.0 * n * b + lam + 1.0 - 2.0 * n;
      std::ostringstream os;
      os << *f2.coefficient_B << " r^{" << b << "} kappa_" << i << " dr + 2 d(r^{" << b + 1 << "} kappa_" << i
         << ")";
      f2.description = os.str();
      all.push_back(f2);
    }
  }
  for (std::size_t j = 0; j < spec.coclosed_modes.size(); ++j) {
    const auto& m = spec.coclosed_modes[j];
    HomogeneousHarmonicForm f3;
    f3.form_type = FormType::III;
    f3.mode_index = static_cast<int>(j) + 1;
    f3.eigenvalue = m.eigenvalue;
    f3.multiplicity = m.multiplicity;
    f3.raw_exponent = -(n - 2.0) - std::sqrt((n - 2.0) * (n - 2.0) + m.eigenvalue);
    f3.order = f3.raw_exponent - 1.0;
    f3.description = "r^{" + std::to_string(f3.raw_exponent) + "} eta_" + std::to_string(j + 1);
    all.push_back(f3);
  }
  const double tol = 1e-9;
  rep.max_order = -std::numeric_limits<double>::infinity();
  rep.bounds_hold = true;
  for (const auto& f : all) {
    rep.max_order = std::max(rep.max_order, f.order);
    const double bound = f.form_type == FormType::I ? rep.bound_I
                         : f.form_type == FormType::II ? rep.bound_II
                                                        : rep.bound_III;
    if (f.order > bound + tol) rep.bounds_hold = false;
    if (std::abs(f.order - bound) < tol) {
      if (f.form_type == FormType::I) rep.attained_I = true;
      if (f.form_type == FormType::II) rep.attained_II = true;
      if (f.form_type == FormType::III) rep.attained_III = true;
    }
  }
  for (auto f : all) {
    if (!window.contains(f.order) && !(std::abs(f.order - window.lo) < gap_tol) &&
        !(std::abs(f.order - window.hi) < gap_tol))
      continue;
    f.flagged = std::abs(f.order - window.lo) < gap_tol || std::abs(f.order - window.hi) < gap_tol;
    rep.forms.push_back(f);
  }
  std::stable_sort(rep.forms.begin(), rep.forms.end(),
                   [](const auto& a, const auto& b) { return a.order > b.order; });
  return rep;
}

std::map<int, std::int64_t> enumerate_flat_harmonic_one_forms(int n_complex, int lo, int hi) {
  if (n_complex < 1) throw Error(ErrorKind::UnsupportedDimension, "n_complex must be >= 1");
  const int N = 2 * n_complex;
  std::map<int, std::int64_t> out;
  for (int d = lo; d <= hi; ++d) {
    // Kelvin transforms of degree-k harmonic polynomials have degree 2 - N - k.
    const int k = 2 - N - d;
    const int m = n_complex + std::max(k, 0);
    const int D = d + 2 * m;
    const mpq_class c(2 * m * (2 * d + 2 * m + N - 2));
    const std::int64_t functions = harmonic_kernel_dim(N, D, c);
    out[d] = functions * N;
  }
  return out;
}

CartesianOneForm realize_flat(const HomogeneousHarmonicForm& form, int n_complex) {
  const int N = 2 * n_complex;
  const double lam = form.eigenvalue;
  const double nn = n_complex;
  // Degree of the harmonic polynomial carrying eigenvalue lambda on S^{N-1}.
  auto degree_of = [&](double eig, double offset) {
    const double b = N - 2 + offset;
    return static_cast<int>(std::llround(0.5 * (-b + std::sqrt(b * b + 4.0 * eig))));
  };
  auto radius = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };
  if (form.form_type == FormType::III) {
    // Coclosed eigenvalue (j+1)(j+N-3): field h * (-x2, x1, 0, ...), h = Re (x3 + i x4)^{j-1}.
    const int j = degree_of(lam + N - 3.0, 0.0) - 1 + 0;
    int deg = 1;
    while (deg < 64 && std::abs(double(deg + 1) * (deg + N - 3) - lam) > 1e-9) ++deg;
    (void)j;
    const double a = form.raw_exponent;
    return [=](const std::vector<double>& x) {
      const double r = radius(x);
      const double h = deg == 1 ? 1.0 : std::real(std::pow(std::complex<double>(x[2], x[3]), deg - 1));
      std::vector<double> out(N, 0.0);
      const double s = std::pow(r, a - deg - 1) * h;
      out[0] = -x[1] * s;
      out[1] = x[0] * s;
      return out;
    };
  }
  const int d = degree_of(lam, 0.0);
  auto H = [d](const std::vector<double>& x) { return std::real(std::pow(std::complex<double>(x[0], x[1]), d)); };
  auto gradH = [d, N](const std::vector<double>& x) {
    std::vector<double> g(N, 0.0);
    if (d == 0) return g;
    const auto zp = std::pow(std::complex<double>(x[0], x[1]), d - 1);
    g[0] = d * std::real(zp);
    g[1] = -d * std::imag(zp);
    return g;
  };
  if (form.form_type == FormType::I) {
    const double q = form.raw_exponent - d;
    return [=](const std::vector<double>& x) {
      const double r = radius(x);
      auto g = gradH(x);
      const double h = H(x);
      for (int i = 0; i < N; ++i) g[i] = std::pow(r, q) * g[i] + q * h * std::pow(r, q - 2) * x[i];
      return g;
    };
  }
  const double b = form.raw_exponent;
  const double B = form.coefficient_B.value_or(-b * b - 2 * nn * b + lam + 1 - 2 * nn);
  return [=](const std::vector<double>& x) {
    const double r = radius(x);
    auto g = gradH(x);
    const double h = H(x);
    const double q = b + 1 - d;
    std::vector<double> out(N);
    for (int i = 0; i < N; ++i)
      out[i] = B * h * std::pow(r, b - d - 1) * x[i] +
               2.0 * (std::pow(r, q) * g[i] + q * h * std::pow(r, q - 2) * x[i]);
    return out;
  };
}

HarmonicResidual verify_harmonic(const CartesianOneForm& form, int N, std::size_t points, unsigned seed) {
  HarmonicResidual rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> rad(1.0, 3.0);
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<double> x(N);
    double s = 0.0;
    for (auto& v : x) v = gauss(rng), s += v * v;
    const double R = rad(rng);
    for (auto& v : x) v *= R / std::sqrt(s);
    const auto f0 = form(x);
    double fmax = 0.0;
    for (double v : f0) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) continue;
    const double h = 0.01 * R;
    std::vector<double> lap(N, 0.0);
    for (int axis = 0; axis < N; ++axis) {
      for (int k = -4; k <= 4; ++k) {
        auto y = x;
        y[axis] += k * h;
        const auto fk = k == 0 ? f0 : form(y);
        for (int c = 0; c < N; ++c) lap[c] += fd::kSecond8[k + 4] * fk[c] / (h * h);
      }
    }
    double lmax = 0.0;
    for (double v : lap) lmax = std::max(lmax, std::abs(v));
    rep.laplacian = std::max(rep.laplacian, lmax / (fmax / (R * R)));
    ++rep.points;
  }
  return rep;
}

HarmonicResidual verify_dbar(const Form01Fn& xi, std::size_t points, unsigned seed) {
  HarmonicResidual rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> rad(1.0, 3.0);
  using C = std::complex<double>;
  for (std::size_t p = 0; p < points; ++p) {
    double x[4], s = 0.0;
    for (double& v : x) v = gauss(rng), s += v * v;
    const double R = rad(rng);
    for (double& v : x) v *= R / std::sqrt(s);
    const C z1(x[0], x[1]), z2(x[2], x[3]);
    const auto f0 = xi(z1, z2);
    const double fmax = std::max(std::abs(f0[0]), std::abs(f0[1]));
    if (fmax == 0.0) continue;
    const double h = 0.01 * R;
    // Real partial derivatives of both components along the four real axes.
    std::array<std::array<C, 2>, 4> D{};
    for (int axis = 0; axis < 4; ++axis) {
      for (int k = -4; k <= 4; ++k) {
        if (k == 0) continue;
        C a = z1, b = z2;
        const double step = k * h;
        if (axis == 0) a += step;
        if (axis == 1) a += C(0, step);
        if (axis == 2) b += step;
        if (axis == 3) b += C(0, step);
        const auto fk = xi(a, b);
        for (int c = 0; c < 2; ++c) D[axis][c] += fd::kFirst8[k + 4] * fk[c] / h;
      }
    }
    auto dz = [&](int j, int c) { return 0.5 * (D[2 * j][c] - C(0, 1) * D[2 * j + 1][c]); };
    auto dw = [&](int j, int c) { return 0.5 * (D[2 * j][c] + C(0, 1) * D[2 * j + 1][c]); };
    const double scale = fmax / R;
    rep.dbar = std::max(rep.dbar, std::abs(dw(0, 1) - dw(1, 0)) / scale);
    rep.dbar_star = std::max(rep.dbar_star, std::abs(dz(0, 0) + dz(1, 1)) / scale);
    ++rep.points;
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::complex<double> evaluate(const RExpr& f, std::complex<double> z1, std::complex<double> z2) {
  const double r = std::sqrt(std::norm(z1) + std::norm(z2));
  std::complex<double> acc = 0.0;
  for (const auto& t : f) acc += eval_poly(t.poly, z1, z2) * std::pow(r, -t.mu.value());
  return acc;
}

std::string to_string(const RExpr& f) {
  if (f.empty()) return "0";
  std::string out;
  for (const auto& t : f) {
    if (!out.empty()) out += " + ";
    out += "(" + poly_string(to_poly(t.poly)) + ")";
    mpq_class mu = to_mpq(t.mu);
    if (mu != 0) out += " r^(" + exact::to_string(-mu) + ")";
  }
  return out;
}

std::array<std::complex<double>, 2> Form01::evaluate(std::complex<double> z1, std::complex<double> z2) const {
  const double r = std::sqrt(std::norm(z1) + std::norm(z2));
  const double s = std::pow(r, -r_power);
  return {eval_poly(components[0], z1, z2) * s, eval_poly(components[1], z1, z2) * s};
}

std::string Form01::to_string() const {
  return "((" + poly_string(to_poly(components[0])) + ") dzb1 + (" + poly_string(to_poly(components[1])) +
         ") dzb2) / r^" + std::to_string(r_power);
}

Form01Fn Form01::callable() const {
  const Form01 self = *this;
  return [self](std::complex<double> a, std::complex<double> b) { return self.evaluate(a, b); };
}

namespace {

struct PairPoly {
  Poly p1, p2;
};

// dbar and dbar* constraints for (P1, P2) / r^{2m}, both cleared of r-powers.
std::array<Poly, 2> constraints(const PairPoly& P, int m) {
  const Poly r2 = Poly::r2();
  const Qi M(m);
  Poly c1 = r2 * (P.p2.derivative(exact::W1) - P.p1.derivative(exact::W2)) -
            M * (Poly::var(exact::Z1) * P.p2 - Poly::var(exact::Z2) * P.p1);
  Poly c2 = r2 * (P.p1.derivative(exact::Z1) + P.p2.derivative(exact::Z2)) -
            M * (Poly::var(exact::W1) * P.p1 + Poly::var(exact::W2) * P.p2);
  return {c1, c2};
}

std::vector<Qi> to_vector(const PairPoly& P, const std::vector<Exponent>& monos) {
  std::vector<Qi> v(2 * monos.size());
  for (std::size_t i = 0; i < monos.size(); ++i) {
    auto a = P.p1.terms.find(monos[i]);
    if (a != P.p1.terms.end()) v[i] = a->second;
    auto b = P.p2.terms.find(monos[i]);
    if (b != P.p2.terms.end()) v[monos.size() + i] = b->second;
  }
  return v;
}

PairPoly from_vector(const std::vector<Qi>& v, const std::vector<Exponent>& monos) {
  PairPoly P;
  for (std::size_t i = 0; i < monos.size(); ++i) {
    P.p1.add_term(monos[i], v[i]);
    P.p2.add_term(monos[i], v[monos.size() + i]);
  }
  return P;
}

Form01 to_form(const PairPoly& P, int m) {
  Form01 f;
  f.components = {to_public(P.p1), to_public(P.p2)};
  f.r_power = 2 * m;
  return f;
}

// w^alpha (w2 dzb1 - w1 dzb2), |alpha| = k - 1, alpha = (k-1-j, j).
PairPoly contact_multiple(int k, int j) {
  const Poly mono = Poly::monomial({0, 0, k - 1 - j, j});
  return {mono * Poly::var(exact::W2), Qi(-1) * (mono * Poly::var(exact::W1))};
}

}  // namespace

ObstructionSpace obstruction_dimensions(int k, int k_max) {
  if (k < 0) throw Error(ErrorKind::Validation, "obstruction_dimensions: k must be >= 0");
  if (k > k_max)
    throw Error(ErrorKind::Validation, "obstruction_dimensions: k = " + std::to_string(k) + " exceeds k_max = " +
                                           std::to_string(k_max));
  ObstructionSpace out;
  out.k = k;
  out.growth_rate = -2 - k;
  const int m = k + 1;
  const auto monos = exact::monomials(k);
  const auto rows = exact::monomials(k + 1);
  std::map<Exponent, int> row_index;
  for (std::size_t i = 0; i < rows.size(); ++i) row_index[rows[i]] = static_cast<int>(i);
  const int ncols = static_cast<int>(2 * monos.size());
  std::vector<std::vector<Qi>> M(2 * rows.size(), std::vector<Qi>(ncols));
  for (int col = 0; col < ncols; ++col) {
    std::vector<Qi> unit(ncols);
    unit[col] = Qi(1);
    const auto c = constraints(from_vector(unit, monos), m);
    for (int eq = 0; eq < 2; ++eq)
      for (const auto& [e, v] : c[eq].terms) M[eq * rows.size() + row_index.at(e)][col] = v;
  }
  const auto ker = exact::kernel(M, ncols);
  out.dim_harmonic = static_cast<int>(ker.size());
  for (const auto& v : ker) out.basis.push_back(to_form(from_vector(v, monos), m));

  // dbar of u = Q / r^{2k}, Q harmonic of degree k - 1.
  std::vector<std::vector<Qi>> image;
  if (k >= 1) {
    const auto qm = exact::monomials(k - 1);
    const auto lm = exact::monomials(std::max(k - 3, 0));
    std::map<Exponent, int> li;
    for (std::size_t i = 0; i < lm.size(); ++i) li[lm[i]] = static_cast<int>(i);
    std::vector<std::vector<Qi>> L(lm.size(), std::vector<Qi>(qm.size()));
    for (std::size_t col = 0; col < qm.size(); ++col) {
      const Poly q = Poly::monomial(qm[col]);
      const Poly lap = q.derivative(exact::Z1).derivative(exact::W1) + q.derivative(exact::Z2).derivative(exact::W2);
      for (const auto& [e, v] : lap.terms) L[li.at(e)][col] = v;
    }
    const auto harm = k >= 3 ? exact::kernel(L, static_cast<int>(qm.size()))
                             : exact::kernel({}, static_cast<int>(qm.size()));
    const Poly r2 = Poly::r2();
    for (const auto& hv : harm) {
      Poly Q;
      for (std::size_t i = 0; i < qm.size(); ++i) Q.add_term(qm[i], hv[i]);
      PairPoly P{r2 * Q.derivative(exact::W1) - Qi(k) * (Poly::var(exact::Z1) * Q),
                 r2 * Q.derivative(exact::W2) - Qi(k) * (Poly::var(exact::Z2) * Q)};
      image.push_back(to_vector(P, monos));
      out.image_basis.push_back(to_form(P, m));
    }
  }
  out.dim_dbar_image = image.empty() ? 0 : exact::rank(image);

  bool in_kernel = true;
  std::vector<std::vector<Qi>> combined = image;
  for (int j = 0; j < k; ++j) {
    const PairPoly P = contact_multiple(k, j);
    const auto c = constraints(P, m);
    in_kernel = in_kernel && c[0].is_zero() && c[1].is_zero();
    combined.push_back(to_vector(P, monos));
    out.quotient_basis.push_back(to_form(P, m));
  }
  const int combined_rank = combined.empty() ? 0 : exact::rank(combined);
  out.quotient_complements_image = in_kernel && combined_rank == out.dim_harmonic;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Form11X = std::array<std::array<RSum, 2>, 2>;

Form11X to_internal(const Form11& w) {
  Form11X x;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) x[a][b] = to_rsum(w.phi[a][b]);
  return x;
}

Form11 to_public(const Form11X& x) {
  Form11 w;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      RSum s = x[a][b];
      s.normalize();
      w.phi[a][b] = to_rexpr(s);
    }
  return w;
}

const Var kZ[2] = {exact::Z1, exact::Z2};
const Var kW[2] = {exact::W1, exact::W2};

Form11X ddc_internal(const RSum& f) {
  Form11X x;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) x[a][b] = f.derivative(kW[b]).derivative(kZ[a]).scaled(Qi(0, 2));
  return x;
}

// phi_{ab} = d_{z_a} xi_b
Form11X del_internal(const PairPoly& P, int m) {
  Form11X x;
  const RPoly xi[2] = {{P.p1, mpq_class(2 * m)}, {P.p2, mpq_class(2 * m)}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) x[a][b].add(xi[b].derivative(kZ[a]));
  return x;
}

// conj(Phi)_{ab} = -conj(phi_{ba})
Form11X conj_form(const Form11X& x) {
  Form11X y;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) y[a][b] = x[b][a].conj().scaled(Qi(-1));
  return y;
}

Form11X combine(const Form11X& x, const Qi& s, const Form11X& y, const Qi& t) {
  Form11X z;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      for (const auto& term : x[a][b].scaled(s).terms) z[a][b].add(term);
      for (const auto& term : y[a][b].scaled(t).terms) z[a][b].add(term);
      z[a][b].normalize();
    }
  return z;
}

Form11X two_re_internal(const PairPoly& P, int m, const Qi& C) {
  const Form11X phi = del_internal(P, m);
  return combine(phi, C, conj_form(phi), C.conj());
}

bool closed_internal(const Form11X& x) {
  for (int b = 0; b < 2; ++b) {
    RSum d = x[1][b].derivative(exact::Z1);
    for (const auto& t : x[0][b].derivative(exact::Z2).scaled(Qi(-1)).terms) d.add(t);
    d.normalize();
    if (!d.is_zero()) return false;
  }
  for (int a = 0; a < 2; ++a) {
    RSum d = x[a][1].derivative(exact::W1);
    for (const auto& t : x[a][0].derivative(exact::W2).scaled(Qi(-1)).terms) d.add(t);
    d.normalize();
    if (!d.is_zero()) return false;
  }
  return true;
}

mpq_class class_of(const mpq_class& mu) {
  // mu modulo 2 in [0, 2)
  mpq_class q = mu / 2;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  mpq_class r = mu - 2 * mpq_class(fl);
  r.canonicalize();
  return r;
}

Poly times_r2_power(const Poly& p, int j) {
  Poly out = p;
  const Poly r2 = Poly::r2();
  for (int i = 0; i < j; ++i) out = out * r2;
  return out;
}

struct GroupKey {
  mpq_class cls;
  mpq_class degree;
  bool operator<(const GroupKey& o) const {
    if (cls != o.cls) return cls < o.cls;
    return degree < o.degree;
  }
};

// Component polynomials of one homogeneous group, all multiplying r^{-mu}.
struct Group {
  mpq_class mu;
  std::array<std::array<Poly, 2>, 2> comp;
};

std::map<GroupKey, Group> split_groups(const Form11X& x) {
  std::map<GroupKey, std::vector<std::tuple<int, int, RPoly>>> raw;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (const auto& t : x[a][b].terms)
        for (const auto& [e, c] : t.p.terms) {
          const int deg = e[0] + e[1] + e[2] + e[3];
          GroupKey key{class_of(t.mu), mpq_class(deg) - t.mu};
          raw[key].push_back({a, b, RPoly{Poly::monomial(e, c), t.mu}});
        }
  std::map<GroupKey, Group> out;
  for (auto& [key, items] : raw) {
    Group g;
    g.mu = std::get<2>(items.front()).mu;
    for (const auto& it : items) g.mu = std::max(g.mu, std::get<2>(it).mu);
    for (const auto& [a, b, t] : items) {
      const mpq_class j = (g.mu - t.mu) / 2;
      g.comp[a][b] += times_r2_power(t.p, static_cast<int>(j.get_num().get_si()));
    }
    out[key] = std::move(g);
  }
  return out;
}

void raise_group(Group& g, const mpq_class& mu) {
  if (mu <= g.mu) return;
  const mpq_class j = (mu - g.mu) / 2;
  for (auto& row : g.comp)
    for (auto& p : row) p = times_r2_power(p, static_cast<int>(j.get_num().get_si()));
  g.mu = mu;
}

// Components of a Form11X restricted to a given mu, assuming matching homogeneity.
std::array<std::array<Poly, 2>, 2> at_mu(const Form11X& x, const mpq_class& mu) {
  std::array<std::array<Poly, 2>, 2> out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (const auto& t : x[a][b].terms) {
        if (t.p.is_zero()) continue;
        const mpq_class j = (mu - t.mu) / 2;
        out[a][b] += times_r2_power(t.p, static_cast<int>(j.get_num().get_si()));
      }
  return out;
}

}  // namespace

Form11 add(const Form11& a, const Form11& b) {
  const auto x = to_internal(a), y = to_internal(b);
  return to_public(combine(x, Qi(1), y, Qi(1)));
}

Form11 ddc_of(const RExpr& f) { return to_public(ddc_internal(to_rsum(f))); }

Form11 two_re_del(const Form01& xi, ComplexRational C) {
  const PairPoly P{to_poly(xi.components[0]), to_poly(xi.components[1])};
  if (xi.r_power % 2 != 0) throw Error(ErrorKind::Validation, "two_re_del: r power must be even");
  return to_public(two_re_internal(P, xi.r_power / 2, to_qi(C)));
}

bool is_closed(const Form11& w) { return closed_internal(to_internal(w)); }

DdbarExpansion ddbar_residual_expansion(const Form11& omega, int depth) {
  const Form11X w = to_internal(omega);
  if (!closed_internal(w)) throw Error(ErrorKind::NotClosed, "ddbar_residual_expansion: input form is not closed");
  DdbarExpansion out;
  out.note =
      "obstruction terms are reported at every rate above the cutoff; stopping after the rate -4 term "
      "would drop the two-dimensional rate -5 obstruction";
  out.reconstruction_exact = true;
  out.residual_order = -depth;
  constexpr int kMax = 6;
  RSum potential;
  auto groups = split_groups(w);
  for (auto& [key, g] : groups) {
    const mpq_class d = key.degree;
    if (d <= -depth) {
      if (d.get_den() == 1) out.residual_order = std::max(out.residual_order, int(d.get_num().get_si()));
      continue;
    }
    int k = 0;
    const bool integral_even = key.cls == 0;
    if (integral_even && d.get_den() == 1) {
      const int kk = -3 - static_cast<int>(d.get_num().get_si());
      if (kk >= 1 && kk <= kMax) k = kk;
    }
    if (k > 0) raise_group(g, mpq_class(2 * k + 4));
    const mpq_class mu_f = g.mu - 4;
    const mpq_class degF_q = d + 2 + mu_f;
    const int degF = degF_q.get_den() == 1 ? static_cast<int>(degF_q.get_num().get_si()) : -1;
    const auto fmonos = exact::monomials(degF);
    // Columns for the homogeneous degree d + mu of every component.
    std::vector<std::array<std::array<Poly, 2>, 2>> cols;
    for (const auto& e : fmonos) cols.push_back(at_mu(ddc_internal(RSum{{RPoly{Poly::monomial(e), mu_f}}}), g.mu));
    std::vector<PairPoly> reps;
    for (int j = 0; j < k; ++j) {
      reps.push_back(contact_multiple(k, j));
      const Form11X phi = del_internal(reps.back(), k + 1);
      const Form11X cphi = conj_form(phi);
      cols.push_back(at_mu(combine(phi, Qi(1), cphi, Qi(1)), g.mu));
      cols.push_back(at_mu(combine(phi, Qi(0, 1), cphi, Qi(0, -1)), g.mu));
    }
    // Row index over (a, b, monomial).
    std::map<std::tuple<int, int, Exponent>, int> rows;
    auto row_of = [&](int a, int b, const Exponent& e) {
      auto key2 = std::make_tuple(a, b, e);
      auto it = rows.find(key2);
      if (it != rows.end()) return it->second;
      const int idx = static_cast<int>(rows.size());
      rows.emplace(key2, idx);
      return idx;
    };
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        for (const auto& [e, c] : g.comp[a][b].terms) row_of(a, b, e);
        for (const auto& col : cols)
          for (const auto& [e, c] : col[a][b].terms) row_of(a, b, e);
      }
    const int nc = static_cast<int>(cols.size());
    std::vector<std::vector<Qi>> M(rows.size(), std::vector<Qi>(nc + 1));
    for (int c = 0; c < nc; ++c)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (const auto& [e, v] : cols[c][a][b].terms) M[rows.at({a, b, e})][c] = v;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (const auto& [e, v] : g.comp[a][b].terms) M[rows.at({a, b, e})][nc] = v;
    const auto piv = exact::rref(M);
    if (!piv.empty() && piv.back() == nc)
      throw Error(ErrorKind::Validation, "ddbar_residual_expansion: homogeneous component of degree " +
                                             exact::to_string(d) + " is not dd^c-exact modulo the obstruction space");
    std::vector<Qi> sol(nc);
    for (std::size_t r = 0; r < piv.size(); ++r) sol[piv[r]] = M[r][nc];
    // Average with the conjugate solution: real potential, real (x, y).
    Poly F;
    for (std::size_t i = 0; i < fmonos.size(); ++i) F.add_term(fmonos[i], sol[i]);
    const Poly Freal = Qi(mpq_class(1, 2)) * (F + F.conj());
    if (!Freal.is_zero()) potential.add({Freal, mu_f});
    Form11X rebuilt = ddc_internal(RSum{{RPoly{Freal, mu_f}}});
    std::vector<std::complex<double>> coeffs;
    for (int j = 0; j < k; ++j) {
      const Qi x = sol[fmonos.size() + 2 * j], y = sol[fmonos.size() + 2 * j + 1];
      const Qi C(x.re, y.re);
      coeffs.emplace_back(C.re.get_d(), C.im.get_d());
      rebuilt = combine(rebuilt, Qi(1), two_re_internal(reps[j], k + 1, C), Qi(1));
    }
    if (k > 0) out.coefficients[k] = coeffs;
    const auto rb = at_mu(rebuilt, g.mu);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Poly diff = rb[a][b] - g.comp[a][b];
        if (!diff.is_zero()) out.reconstruction_exact = false;
      }
  }
  potential.normalize();
  out.potential = to_rexpr(potential);
  if (out.coefficients.count(1)) out.c_minus3 = out.coefficients[1][0];
  if (out.coefficients.count(2)) out.c_minus4 = {out.coefficients[2][0], out.coefficients[2][1]};
  return out;
}

}  // namespace conekit
