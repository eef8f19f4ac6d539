#include "conekit/mass_expansion.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "conekit/errors.hpp"
#include "conekit/parallel.hpp"
#include "conekit/sphere_quadrature.hpp"

namespace conekit {

std::string to_string(Normalization n) { return n == Normalization::AC ? "ac" : "ale"; }

Normalization parse_normalization(const std::string& s) {
  if (s == "ac") return Normalization::AC;
  if (s == "ale") return Normalization::ALE;
  throw Error(ErrorKind::Validation, "normalization must be 'ac' or 'ale', got '" + s + "'");
}

double link_volume(int N, int quotient_order) {
  if (quotient_order < 1) throw Error(ErrorKind::Validation, "quotient order must be >= 1");
  return integrate_sphere(N, 1.0, [](const std::vector<double>&) { return 1.0; }, 1e-12).value / quotient_order;
}

double ac_constant(int N, double vol) { return 1.0 / (2.0 * (N - 1) * vol); }

double ale_constant(int N) {
  return boost::math::tgamma(0.5 * N) / (4.0 * (N - 1) * std::pow(std::numbers::pi, 0.5 * N));
}

double normalization_ratio(int N, int quotient_order) {
  return ac_constant(N, link_volume(N, quotient_order)) / ale_constant(N);
}

BoundaryIntegral adm_integrand(const MetricField& g, const MetricField& gbar, double r, double tol) {
  if (g.dim != gbar.dim) throw Error(ErrorKind::DimensionMismatch, "adm_integrand: metric dimensions differ");
  const int n = g.dim;
  auto density = [&](const std::vector<double>& x) {
    const FirstOrderJets first_order;
    const MetricSample s = evaluate(g, x);
    const MetricSample b = evaluate(gbar, x);
    const Tensor3 Gb = christoffel(gbar, x);
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = b.at(i, j);
    const Eigen::MatrixXd Bi = B.inverse();
    // nabla-bar_k h_ij with h = g - gbar (nabla-bar gbar = 0)
    auto Dh = [&](int k, int i, int j) {
      double v = s.d(k, i, j) - b.d(k, i, j);
      for (int p = 0; p < n; ++p)
        v -= Gb(p, k, i) * (s.at(p, j) - b.at(p, j)) + Gb(p, k, j) * (s.at(i, p) - b.at(i, p));
      return v;
    };
    Eigen::VectorXd w(n);  // nabla-bar^j h_ij - d_i tr_gbar g
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) v += Bi(j, k) * Dh(k, i, j);
      double tr = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) tr += Bi(a, c) * Dh(i, a, c);
      w(i) = v - tr;
    }
    // Outward gbar-unit normal to |x| = r and the gbar area of the level set.
    Eigen::VectorXd drho(n);
    for (int i = 0; i < n; ++i) drho(i) = x[i] / r;
    const Eigen::VectorXd up = Bi * drho;
    const double norm = std::sqrt(drho.dot(up));
    const double area = std::sqrt(B.determinant()) * norm;
    return w.dot(up) / norm * area;
  };
  const auto I = integrate_sphere(n, r, density, tol);
  return {I.value / g.quotient_order, I.error / g.quotient_order};
}

BoundaryIntegral adm_integrand(const MetricField& g, double r, double tol) {
  const int n = g.dim;
  auto density = [&](const std::vector<double>& x) {
    const FirstOrderJets first_order;
    const MetricSample s = evaluate(g, x);
    double flux = 0.0;  // (d_j g_ij - d_i g_jj) x_i / r
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int j = 0; j < n; ++j) v += s.d(j, i, j) - s.d(i, j, j);
      flux += v * x[i] / r;
    }
    return flux;
  };
  const auto I = integrate_sphere(n, r, density, tol);
  return {I.value / g.quotient_order, I.error / g.quotient_order};
}

std::vector<double> RadiusSchedule::radii() const {
  if (!(r0 > 0.0) || !(factor > 1.0) || count < 1)
    throw Error(ErrorKind::Validation, "schedule needs r0 > 0, factor > 1, count >= 1");
  std::vector<double> r(count);
  for (int k = 0; k < count; ++k) r[k] = r0 * std::pow(factor, k);
  return r;
}

ExtrapolationFit extrapolate(const std::vector<double>& r, const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n == 0 || r.size() != n) throw Error(ErrorKind::InsufficientData, "extrapolate: empty or mismatched data");
  ExtrapolationFit fit;
  fit.limit = v.back();
  fit.residuals.assign(n, 0.0);
  if (n < 3) {
    fit.error = n == 2 ? std::abs(v[1] - v[0]) : 0.0;
    return fit;
  }
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  const double d1 = v[n - 3] - v[n - 2], d2 = v[n - 2] - v[n - 1];
  const double flat = 1e-13 * std::max(scale, 1e-300);
  if (std::abs(d1) <= flat && std::abs(d2) <= flat) {
    fit.error = std::max(std::abs(d1), std::abs(d2));
    return fit;
  }
  // q from the last triple: (r1^-q - r2^-q) / (r2^-q - r3^-q) = d1 / d2.
  const double ratio = d1 / d2;
  const double r1 = r[n - 3], r2 = r[n - 2], r3 = r[n - 1];
  auto model_ratio = [&](double q) {
    return (std::pow(r1, -q) - std::pow(r2, -q)) / (std::pow(r2, -q) - std::pow(r3, -q));
  };
  double q = 0.0;
  const double qlo = 1e-3, qhi = 40.0;
  if (ratio > model_ratio(qlo) && ratio < model_ratio(qhi)) {
    auto fq = [&](double x) { return model_ratio(x) - ratio; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t it = 200;
    const auto br = boost::math::tools::toms748_solve(fq, qlo, qhi, tol, it);
    q = 0.5 * (br.first + br.second);
  }
  if (q == 0.0) {
    fit.limit = v.back();
    fit.error = std::max(std::abs(d1), std::abs(d2));
    return fit;
  }
  auto pair_limit = [&](std::size_t i) {
    const double a = std::pow(r[i], q), b = std::pow(r[i + 1], q);
    return (v[i + 1] * b - v[i] * a) / (b - a);
  };
  fit.exponent = q;
  fit.limit = pair_limit(n - 2);
  fit.amplitude = (v[n - 1] - fit.limit) * std::pow(r[n - 1], q);
  const double prev = n >= 4 ? pair_limit(n - 4) : pair_limit(n - 3);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = std::abs(fit.limit + fit.amplitude * std::pow(r[i], -q) - v[i]);
  }
  fit.residual = std::max({fit.residuals[n - 1], fit.residuals[n - 2], fit.residuals[n - 3]});
  fit.error = std::abs(fit.limit - prev) + fit.residual;
  return fit;
}

namespace {

// floor: round-off level of the last integral
void check_growth(const std::vector<double>& v, double floor, const std::string& name) {
  const std::size_t n = v.size();
  if (n < 3) return;
  const double a = std::abs(v[n - 3]), b = std::abs(v[n - 2]), c = std::abs(v[n - 1]);
  if (c > floor && c > 1.5 * b && b > 1.5 * a)
    throw Error(ErrorKind::NoLimit, "mass: boundary integrals of '" + name + "' grow along the schedule (" +
                                        std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) + ")");
}

// Largest component of g - delta along a few directions on |x| = r.
double deviation(const MetricField& g, double r) {
  const int n = g.dim;
  double m = 0.0;
  for (int dir = 0; dir < n; ++dir) {
    std::vector<double> x(n, 0.0);
    x[dir] = r * std::sqrt(0.5);
    x[(dir + 1) % n] = r * std::sqrt(0.5);
    const MetricSample s = evaluate(g, x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = std::max(m, std::abs(s.at(i, j) - (i == j ? 1.0 : 0.0)));
  }
  return m;
}

double fitted_decay(const MetricField& g, const std::vector<double>& radii) {
  if (radii.size() < 2) return 0.0;
  const double ra = radii[radii.size() - 2], rb = radii.back();
  const double a = deviation(g, ra), b = deviation(g, rb);
  if (a == 0.0 || b == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(b / a) / std::log(rb / ra);
}

// Flux densities are bounded by N^2 |g - delta| / r, so the boundary integral
// is at most that times r^{N-1} Vol(S^{N-1}); round-off sits far below.
double noise_floor(const MetricField& g, double constant, double r) {
  const int N = g.dim;
  return 1e-10 * constant * N * N * deviation(g, r) * std::pow(r, N - 2) * sphere_volume_closed_form(N);
}

void finish(MassReport& rep, double floor) {
  rep.normalized.resize(rep.integrals.size());
  for (std::size_t i = 0; i < rep.integrals.size(); ++i) rep.normalized[i] = rep.constant * rep.integrals[i];
  check_growth(rep.normalized, floor, rep.family);
  rep.fit = extrapolate(rep.radii, rep.normalized);
  double quad = 0.0;
  for (double e : rep.integral_errors) quad = std::max(quad, e * rep.constant);
  rep.mass = rep.fit.limit;
  rep.mass_error = rep.fit.error + quad;
}

}  // namespace

MassReport mass(const MetricField& g, const RadiusSchedule& schedule, const MassOptions& opt) {
  MassReport rep;
  rep.family = g.name;
  rep.normalization = opt.normalization;
  rep.real_dim = g.dim;
  rep.quotient_order = g.quotient_order;
  rep.radii = schedule.radii();
  rep.link_volume = link_volume(g.dim, g.quotient_order);
  rep.constant = opt.normalization == Normalization::AC ? ac_constant(g.dim, rep.link_volume) : ale_constant(g.dim);
  rep.fitted_tau = fitted_decay(g, rep.radii);
  rep.decay_warning = rep.fitted_tau < 0.5 * g.dim - 1.0;
  if (rep.decay_warning && !opt.allow_slow_decay)
    throw Error(ErrorKind::Validation, "mass: fitted decay rate " + std::to_string(rep.fitted_tau) +
                                           " is below N/2 - 1 for '" + g.name + "'");
  rep.integrals.assign(rep.radii.size(), 0.0);
  rep.integral_errors.assign(rep.radii.size(), 0.0);
  parallel_for(rep.radii.size(), [&](std::size_t i) {
    const auto I = adm_integrand(g, rep.radii[i], opt.quadrature_tol);
    rep.integrals[i] = I.value;
    rep.integral_errors[i] = I.error;
  });
  finish(rep, noise_floor(g, rep.constant, rep.radii.back()));
  return rep;
}

MassReport kahler_mass(const RadialPotential& u, const RadiusSchedule& schedule) {
  const int n = u.n_complex, N = 2 * n;
  MassReport rep;
  rep.family = u.name;
  rep.normalization = Normalization::AC;
  rep.real_dim = N;
  rep.quotient_order = u.quotient_order;
  rep.radii = schedule.radii();
  rep.link_volume = link_volume(N, u.quotient_order);
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  rep.constant = 1.0 / ((2.0 * n - 1.0) * fact * rep.link_volume);
  rep.fitted_tau = fitted_decay(kahler_metric(u), rep.radii);
  rep.decay_warning = rep.fitted_tau < 0.5 * N - 1.0;
  rep.integrals.assign(rep.radii.size(), 0.0);
  rep.integral_errors.assign(rep.radii.size(), 0.0);
  parallel_for(rep.radii.size(),
               [&](std::size_t i) { rep.integrals[i] = ricci_potential_boundary_term(u, rep.radii[i]); });
  finish(rep, noise_floor(kahler_metric(u), rep.constant, rep.radii.back()));
  return rep;
}

double mass_formula_rhs(double pairing, double total_scalar, int n, double vol) {
  if (n < 1) throw Error(ErrorKind::UnsupportedDimension, "mass_formula_rhs: n_complex must be >= 1");
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  return -2.0 * std::numbers::pi * pairing / ((2.0 * n - 1.0) * fact * vol) +
         total_scalar / (2.0 * (2.0 * n - 1.0) * vol);
}

namespace {
void check_expansion_dim(int n) {
  if (n < 2) throw Error(ErrorKind::UnsupportedDimension, "expansion coefficient needs n_complex >= 2");
}
double literal_factor(int n) { return n == 2 ? 1.5 : (2.0 * n - 1.0) / (2.0 * (4.0 - 2.0 * n) * (n - 1.0)); }
}  // namespace

double expansion_coefficient(double m, int n) {
  check_expansion_dim(n);
  return literal_factor(n) * m;
}
double mass_from_coefficient(double c, int n) {
  check_expansion_dim(n);
  return c / literal_factor(n);
}
double expansion_coefficient_consistent(double m, int n) {
  check_expansion_dim(n);
  return 2.0 * literal_factor(n) * m;
}
double mass_from_coefficient_consistent(double c, int n) {
  check_expansion_dim(n);
  return c / (2.0 * literal_factor(n));
}

LeadingTerm leading_term_constant(const ConeFunction& f, int n, double r_inner, double tol) {
  if (n < 3) throw Error(ErrorKind::InsufficientData, "leading_term_constant: cone dimension must be >= 3");
  const double vol = sphere_volume_closed_form(n);
  auto shell = [&](double r) {
    // Far out the checked tail is negligible; f and r^{n-1} under- and overflow there.
    if (r <= 0.0 || r > 1e150) return 0.0;
    const auto I = integrate_sphere(
        n, 1.0, [&](const std::vector<double>& u) { return f(r, u); }, 1e-12);
    const double v = I.value * std::pow(r, n - 1);
    return std::isfinite(v) || r < 1e30 ? v : 0.0;
  };
  LeadingTerm out;
  // Tail exponent of the shell integral; slopes within 1e-3 of -1 count as divergent.
  const double ra = std::max(1e3, 10.0 * (r_inner + 1.0)), rb = 10.0 * ra;
  const double sa = std::abs(shell(ra)), sb = std::abs(shell(rb));
  if (sa == 0.0 && sb == 0.0) {
    out.tail_slope = -std::numeric_limits<double>::infinity();
  } else {
    out.tail_slope = std::log(std::max(sb, 1e-300) / std::max(sa, 1e-300)) / std::log(rb / ra) - (n - 1);
    if (out.tail_slope + (n - 1) > -1.0 - 1e-3)
      throw Error(ErrorKind::TailDivergence, "leading_term_constant: f decays like r^" +
                                                 std::to_string(out.tail_slope) + ", not integrable on the cone");
  }
  const double split = r_inner + 1.0;
  double e1 = 0.0, e2 = 0.0;
  const double inner = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(shell, r_inner, split, 12, tol, &e1);
  boost::math::quadrature::exp_sinh<double> es;
  const double outer = es.integrate(shell, split, std::numeric_limits<double>::infinity(), tol, &e2);
  out.integral = inner + outer;
  out.error = e1 * std::abs(inner) + e2 * std::abs(outer);
  out.A = out.integral / ((n - 2) * vol);
  return out;
}

double annulus_integral(int N, double r1, double r2, const std::function<double(const std::vector<double>&)>& F,
                        int radial_nodes, double tol) {
  double total = 0.0;
  for (double z : boost::math::legendre_p_zeros<double>(radial_nodes)) {
    const double dp = boost::math::legendre_p_prime<double>(radial_nodes, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    for (double s : {z, -z}) {
      if (s == -z && z == 0.0) continue;
      const double r = 0.5 * (r1 + r2) + 0.5 * (r2 - r1) * s;
      total += 0.5 * (r2 - r1) * w * integrate_sphere(N, r, F, tol).value;
    }
  }
  return total;
}

MetricFamily make_family(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw Error(ErrorKind::Validation, "family '" + name + "': unknown parameter '" + k + "'");
    }
  };
  auto as_dim = [&](const std::string& key, double fallback, int lo, int hi) {
    const double v = get(key, fallback);
    if (v != std::floor(v) || v < lo || v > hi)
      throw Error(ErrorKind::Validation, "family '" + name + "': " + key + " must be an integer in [" +
                                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
  };
  MetricFamily fam;
  fam.name = name;
  fam.params = params;
  if (name == "flat") {
    allow({"N"});
    fam.metric = euclidean(as_dim("N", 4, 2, kMaxDim));
    fam.scalar_flat = fam.ricci_flat = fam.crepant = true;
    fam.pairing = 0.0;
  } else if (name == "schwarzschild") {
    allow({"N", "m"});
    fam.metric = schwarzschild(as_dim("N", 3, 3, kMaxDim), get("m", 1.0));
    fam.scalar_flat = true;
  } else if (name == "burns") {
    allow({"c"});
    const double c = get("c", 1.0);
    fam.potential = burns_potential(c);
    fam.metric = kahler_metric(*fam.potential);
    fam.scalar_flat = true;
    // c_1 is minus the exceptional class; its area is pi c.
    fam.pairing = -std::numbers::pi * c;
  } else if (name == "eguchi-hanson") {
    allow({"a"});
    fam.potential = eguchi_hanson_potential(get("a", 1.0));
    fam.metric = kahler_metric(*fam.potential);
    fam.scalar_flat = fam.ricci_flat = fam.crepant = true;
    fam.pairing = 0.0;
  } else if (name == "potential") {
    allow({"n", "c"});
    fam.potential = power_potential(as_dim("n", 3, 3, kMaxDim / 2), get("c", 1.0));
    fam.metric = kahler_metric(*fam.potential);
  } else {
    throw Error(ErrorKind::Validation, "unknown family '" + name +
                                           "' (expected flat, schwarzschild, burns, eguchi-hanson, potential)");
  }
  fam.metric.name = name;
  return fam;
}

}  // namespace conekit
