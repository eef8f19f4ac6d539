#include "conekit/indicial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conekit/errors.hpp"

namespace conekit {

namespace {

Rational reduce(std::int64_t num, std::int64_t den) {
  if (den < 0) num = -num, den = -den;
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) num /= g, den /= g;
  return {num, den};
}

Rational add(Rational a, Rational b) { return reduce(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational mul(Rational a, Rational b) { return reduce(a.num * b.num, a.den * b.den); }

std::optional<std::int64_t> exact_isqrt(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto s = static_cast<std::int64_t>(std::llround(std::sqrt(double(v))));
  for (std::int64_t c = std::max<std::int64_t>(0, s - 2); c <= s + 2; ++c)
    if (c * c == v) return c;
  return std::nullopt;
}

struct SetShape {
  Rational center;  // -(n-4)/2 or -(n-2)/2
  Rational added;   // constant added to the eigenvalue under the root
  double shift;
};

SetShape shape(SetLabel label, int n) {
  switch (label) {
    case SetLabel::A: return {reduce(-(n - 4), 2), {0, 1}, -1.0};
    case SetLabel::B: return {reduce(-(n - 4), 2), {n - 3, 1}, 0.0};
    case SetLabel::C: return {reduce(-(n - 2), 2), {0, 1}, -1.0};
    case SetLabel::D: return {reduce(-(n - 2), 2), {0, 1}, 0.0};
  }
  return {};
}

void check_dims(SetLabel label, const LinkSpectrum& spec, int n) {
  if (n != spec.dim_link + 1)
    throw Error(ErrorKind::DimensionMismatch, std::string("compute_") + label_char(label) + ": n = " +
                                                  std::to_string(n) + " but link dimension is " +
                                                  std::to_string(spec.dim_link));
  const int min_n = label == SetLabel::D ? 3 : 4;
  if (n < min_n)
    throw Error(ErrorKind::UnsupportedDimension,
                std::string("compute_") + label_char(label) + ": cone dimension must be >= " + std::to_string(min_n));
}

ExactOrder make_exact(const SetShape& sh, double eigenvalue, int sign) {
  ExactOrder e;
  e.sign = sign;
  const auto lam = detect_rational(eigenvalue);
  if (!lam) return e;
  e.exact = true;
  e.q0 = add(sh.center, reduce(static_cast<std::int64_t>(sh.shift), 1));
  e.radicand = add(add(mul(sh.center, sh.center), sh.added), *lam);
  const auto sn = exact_isqrt(e.radicand.num);
  const auto sd = exact_isqrt(e.radicand.den);
  if (sn && sd) {
    e.radicand_is_square = true;
    e.root = reduce(*sn, *sd);
  }
  return e;
}

}  // namespace

char label_char(SetLabel label) { return "ABCD"[static_cast<int>(label)]; }

SetLabel parse_set_label(const std::string& s) {
  if (s == "A" || s == "a") return SetLabel::A;
  if (s == "B" || s == "b") return SetLabel::B;
  if (s == "C" || s == "c") return SetLabel::C;
  if (s == "D" || s == "d") return SetLabel::D;
  throw Error(ErrorKind::Validation, "unknown exceptional set '" + s + "' (expected A, B, C or D)");
}

std::optional<Rational> detect_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x) || std::abs(x) > 1e12) return std::nullopt;
  // Continued fraction convergents.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double frac = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(frac);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::abs(double(h1) / double(k1) - x) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      return reduce(h1, k1);
    const double rem = frac - a;
    if (rem == 0.0) break;
    frac = 1.0 / rem;
  }
  return std::nullopt;
}

double ExactOrder::value() const {
  if (!exact) return std::numeric_limits<double>::quiet_NaN();
  const double r = radicand_is_square ? root.value() : std::sqrt(radicand.value());
  return q0.value() + sign * r;
}

std::string ExactOrder::to_string() const {
  if (!exact) return "";
  auto rat = [](Rational q) {
    return q.den == 1 ? std::to_string(q.num) : std::to_string(q.num) + "/" + std::to_string(q.den);
  };
  if (radicand_is_square) return rat(add(q0, mul(root, {sign, 1})));
  std::string out = q0.num == 0 ? (sign < 0 ? "-" : "") : rat(q0) + (sign < 0 ? " - " : " + ");
  return out + "sqrt(" + rat(radicand) + ")";
}

std::vector<double> ExceptionalSet::orders() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.order);
  return out;
}

std::pair<double, double> indicial_roots(SetLabel label, int n, double eigenvalue) {
  const SetShape sh = shape(label, n);
  const double c = sh.center.value();
  const double disc = c * c + sh.added.value() + eigenvalue;
  if (disc < 0.0) throw Error(ErrorKind::Validation, "negative discriminant in indicial roots");
  const double s = std::sqrt(disc);
  return {c - s, c + s};
}

double branch_sum(SetLabel label, int n) { return 2.0 * shape(label, n).center.value(); }

ExceptionalSet compute_set(SetLabel label, const LinkSpectrum& spec, int n, Window window) {
  check_dims(label, spec, n);
  ExceptionalSet out;
  out.label = label;
  out.cone_dim = n;
  const SetShape sh = shape(label, n);
  const bool coclosed = label == SetLabel::A;
  const auto& modes = coclosed ? spec.coclosed_modes : spec.function_modes;
  // A is indexed from j = 1, C from i = 1, B and D from i = 0.
  const int first_index = coclosed ? 1 : 0;
  for (std::size_t idx = 0; idx < modes.size(); ++idx) {
    const int mode_index = first_index + static_cast<int>(idx);
    if (label == SetLabel::C && mode_index == 0) continue;
    const double lam = modes[idx].eigenvalue;
    const auto [rm, rp] = indicial_roots(label, n, lam);
    const bool log_case = label == SetLabel::A && n == 4 && lam == 0.0;
    for (int sign : {-1, 1}) {
      ExceptionalEntry e;
      e.root = sign < 0 ? rm : rp;
      e.shift = sh.shift;
      e.order = e.root + e.shift;
      e.mode_index = mode_index;
      e.branch = sign < 0 ? Branch::Minus : Branch::Plus;
      e.source_eigenvalue = lam;
      e.log_case = log_case;
      e.exact = make_exact(sh, lam, sign);
      if (e.exact.exact && e.exact.radicand_is_square) {
        e.order = e.exact.value();
        e.root = e.order - e.shift;
      }
      if (window.contains(e.order)) out.entries.push_back(e);
    }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const ExceptionalEntry& a, const ExceptionalEntry& b) { return a.order < b.order; });
  return out;
}

ExceptionalSet compute_A(const LinkSpectrum& spec, int n, Window w) { return compute_set(SetLabel::A, spec, n, w); }
ExceptionalSet compute_B(const LinkSpectrum& spec, int n, Window w) { return compute_set(SetLabel::B, spec, n, w); }
ExceptionalSet compute_C(const LinkSpectrum& spec, int n, Window w) { return compute_set(SetLabel::C, spec, n, w); }
ExceptionalSet compute_D(const LinkSpectrum& spec, int n, Window w) { return compute_set(SetLabel::D, spec, n, w); }

ExceptionalHit is_exceptional(double rate, const ExceptionalSet& set, double gap_tol) {
  if (!(gap_tol > 0.0)) throw Error(ErrorKind::Validation, "gap_tol must be positive");
  ExceptionalHit hit;
  for (const auto& e : set.entries) {
    const double d = std::abs(rate - e.order);
    if (d < hit.distance) {
      hit.distance = d;
      hit.nearest = e;
    }
  }
  hit.exceptional = hit.distance < gap_tol;
  return hit;
}

}  // namespace conekit
