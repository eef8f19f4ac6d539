#include "conekit/radial_modes.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "conekit/errors.hpp"
#include "finite_difference.hpp"

namespace conekit {

namespace {

constexpr double kLn10 = std::numbers::ln10;

// Integrals of s^a (log s)^m F(s) from 1 to r and from r to infinity, tabulated
// on a uniform grid in t = log s and completed by a power-law tail.
class PowerIntegral {
 public:
  // Without `from_infinity` only forward() is available and no tail is built.
  PowerIntegral(ScalarFn F, double a, int m, double f_exponent, double h, double t_end, double t_ref,
                double tail_tol, bool from_infinity)
      : F_(std::move(F)), a_(a), m_(m), e_(f_exponent), h_(h) {
    const std::size_t nseg = static_cast<std::size_t>(std::ceil(t_end / h_ - 1e-9));
    t_end_ = double(nseg) * h_;
    fwd_.assign(nseg + 1, 0.0);
    bwd_.assign(nseg + 1, 0.0);
    std::vector<double> seg(nseg);
    for (std::size_t i = 0; i < nseg; ++i) seg[i] = segment(double(i) * h_, double(i + 1) * h_);
    for (std::size_t i = 0; i < nseg; ++i) fwd_[i + 1] = fwd_[i] + seg[i];
    if (!from_infinity) return;
    tail_ = tail_at(t_end_, &tail_error_);
    bwd_[nseg] = tail_;
    for (std::size_t i = nseg; i-- > 0;) bwd_[i] = bwd_[i + 1] + seg[i];
    const double c = a_ + e_ + 1.0;
    const double C = std::abs(F_(std::exp(t_ref)) * std::exp(-e_ * t_ref));
    const double scale = C * std::exp(c * t_ref) * std::pow(std::max(1.0, t_ref), m_) / std::max(std::abs(c), 1e-3);
    if (tail_error_ > tail_tol * scale && tail_error_ > 1e-300)
      throw Error(ErrorKind::QuadratureNonconvergence,
                  "improper integral tail estimate " + std::to_string(tail_error_) + " exceeds tolerance (scale " +
                      std::to_string(scale) + ")");
  }

  double forward(double r) const {
    const double t = std::log(r);
    if (t >= t_end_) return fwd_.back() + segment(t_end_, t);
    const std::size_t i = std::min(fwd_.size() - 2, static_cast<std::size_t>(std::max(0.0, t / h_)));
    return fwd_[i] + partial(double(i) * h_, t);
  }

  double backward(double r) const {
    const double t = std::log(r);
    if (t >= t_end_) return tail_at(t, nullptr);
    const std::size_t i = std::min(bwd_.size() - 2, static_cast<std::size_t>(std::max(0.0, t / h_)));
    return bwd_[i] - partial(double(i) * h_, t);
  }

  double tail_error() const { return tail_error_; }

 private:
  double integrand(double t) const {
    const double s = std::exp(t);
    double v = std::exp((a_ + 1.0) * t) * F_(s);
    if (m_ == 1) v *= t;
    return v;
  }

  // Tabulated cells: adaptive Gauss-Kronrod.
  double segment(double t0, double t1) const {
    if (t1 == t0) return 0.0;
    auto g = [this](double t) { return integrand(t); };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, t0, t1, 3, 1e-14);
  }

  // Pieces of at most one cell at evaluation time: fixed 10-point Gauss.
  double partial(double t0, double t1) const {
    if (t1 == t0) return 0.0;
    auto g = [this](double t) { return integrand(t); };
    return boost::math::quadrature::gauss<double, 10>::integrate(g, t0, t1);
  }

  // Tail beyond t for F ~ C s^e. When F decays faster than the declared
  // exponent over the last half decade, that local exponent is used and the
  // error comes from the exponent one half decade earlier. Otherwise the
  // declared exponent is kept and the error comes from refitting C.
  double tail_at(double t, double* err) const {
    auto model = [&](double C, double e) {
      const double c = a_ + e + 1.0;
      if (!(c < 0.0))
        throw Error(ErrorKind::QuadratureNonconvergence,
                    "improper integral diverges: tail exponent " + std::to_string(c));
      const double Rc = std::exp(c * t);
      return m_ == 0 ? -C * Rc / c : C * Rc * (-t / c + 1.0 / (c * c));
    };
    const double dt = 0.5 * kLn10;
    const double F1 = F_(std::exp(t)), F2 = F_(std::exp(t - dt)), F3 = F_(std::exp(t - 2.0 * dt));
    if (F1 == 0.0 && F2 == 0.0) {
      if (err) *err = 0.0;
      return 0.0;
    }
    auto same_sign = [](double x, double y) { return x != 0.0 && y != 0.0 && (x > 0) == (y > 0); };
    const double e1 = same_sign(F1, F2) ? std::log(F1 / F2) / dt : e_;
    if (same_sign(F1, F2) && e1 < e_) {
      const double e2 = same_sign(F2, F3) ? std::log(F2 / F3) / dt : e_;
      const double v1 = model(F1 * std::exp(-e1 * t), e1);
      if (err) *err = std::abs(v1 - model(F1 * std::exp(-e2 * t), e2));
      return v1;
    }
    const double C1 = F1 * std::exp(-e_ * t), C2 = F2 * std::exp(-e_ * (t - dt));
    if (err) *err = std::abs(model(C1, e_) - model(C2, e_));
    return model(C1, e_);
  }

  ScalarFn F_;
  double a_;
  int m_;
  double e_;
  double h_;
  double t_end_ = 0.0;
  std::vector<double> fwd_, bwd_;
  double tail_ = 0.0;
  double tail_error_ = 0.0;
};

struct EulerState {
  EulerOperator op;
  ScalarFn F;
  double km = 0.0, kp = 0.0;
  bool dbl = false;
  bool plus_inf = false, minus_inf = false;
  std::unique_ptr<PowerIntegral> Ip, Im;  // distinct roots: s^{1-k+} F, s^{1-k-} F
  double Ap = 0.0, Am = 0.0;

  double J(const PowerIntegral& I, bool from_inf, double r) const {
    return from_inf ? -I.backward(r) : I.forward(r);
  }

  std::array<double, 2> particular(double r) const {
    if (!dbl) {
      const double jp = J(*Ip, plus_inf, r), jm = J(*Im, minus_inf, r);
      const double rp = std::pow(r, kp), rm = std::pow(r, km);
      const double inv = 1.0 / (km - kp);
      return {inv * (rp * jp - rm * jm), inv * (kp * rp * jp - km * rm * jm) / r};
    }
    // Im holds the log-weighted integral, Ip the plain one.
    const double j1 = J(*Im, plus_inf, r), j0 = J(*Ip, plus_inf, r);
    const double k0 = kp, lr = std::log(r), rk = std::pow(r, k0);
    return {rk * (j1 - lr * j0), rk * (k0 * j1 - (k0 * lr + 1.0) * j0) / r};
  }

  std::array<double, 2> eval(double r) const {
    auto y = particular(r);
    if (!dbl) {
      y[0] += Ap * std::pow(r, kp) + Am * std::pow(r, km);
      y[1] += Ap * kp * std::pow(r, kp - 1.0) + Am * km * std::pow(r, km - 1.0);
    } else {
      const double rk = std::pow(r, kp), lr = std::log(r);
      y[0] += Ap * rk + Am * rk * lr;
      y[1] += (Ap * kp + Am * (kp * lr + 1.0)) * rk / r;
    }
    return y;
  }
};

RadialFunction sample_solution(const std::shared_ptr<const EulerState>& st, const RadialGrid& grid,
                               double decay) {
  RadialFunction out;
  out.r = grid.r;
  out.decay_order = decay;
  out.value.resize(grid.r.size());
  out.d1.resize(grid.r.size());
  out.d2.resize(grid.r.size());
  for (std::size_t i = 0; i < grid.r.size(); ++i) {
    const double r = grid.r[i];
    const auto y = st->eval(r);
    out.value[i] = y[0];
    out.d1[i] = y[1];
    out.d2[i] = -st->op.p / r * y[1] + st->op.q / (r * r) * y[0] - st->F(r);
  }
  out.eval = [st](double r) { return st->eval(r); };
  return out;
}

void require_nonexceptional(double target, double km, double kp, double gap, const std::string& what) {
  for (double k : {km, kp})
    if (std::abs(target - k) < gap)
      throw Error(ErrorKind::ExceptionalRate, what + ": rate is exceptional (target exponent " +
                                                  std::to_string(target) + " hits indicial root " +
                                                  std::to_string(k) + ")");
}

ScalarFn zero_if_empty(const ScalarFn& f) {
  if (f) return f;
  return [](double) { return 0.0; };
}

}  // namespace

RadialGrid RadialGrid::geometric(double rmax, int ppd) {
  if (!(rmax > 1.0) || ppd < 4) throw Error(ErrorKind::Validation, "grid needs rmax > 1 and ppd >= 4");
  RadialGrid g;
  g.points_per_decade = ppd;
  const int count = static_cast<int>(std::llround(std::log10(rmax) * ppd));
  g.r.reserve(count + 1);
  for (int i = 0; i <= count; ++i) g.r.push_back(std::pow(10.0, double(i) / ppd));
  return g;
}

double RadialFunction::fitted_decay() const {
  if (r.size() < 3) return 0.0;
  const double lo = r.back() / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < lo || value[i] == 0.0) continue;
    const double x = std::log(r[i]), y = std::log(std::abs(value[i]));
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++cnt;
  }
  if (cnt < 2) return -std::numeric_limits<double>::infinity();
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

RadialFunction sample(const ScalarFn& f, const RadialGrid& grid, double decay_order) {
  RadialFunction out;
  out.r = grid.r;
  out.decay_order = decay_order;
  for (double r : grid.r) {
    out.value.push_back(f(r));
    out.d1.push_back(log_derivative(f, r)[0]);
    out.d2.push_back(fd::log_second_derivative(f, r, 0.02));
  }
  out.eval = [f](double r) { return std::array<double, 2>{f(r), log_derivative(f, r)[0]}; };
  return out;
}

std::string to_string(ModeKind k) {
  switch (k) {
    case ModeKind::Coclosed: return "coclosed";
    case ModeKind::ExactPair: return "pair";
    case ModeKind::Function: return "function";
  }
  return "?";
}

ModeKind parse_mode_kind(const std::string& s) {
  if (s == "coclosed") return ModeKind::Coclosed;
  if (s == "pair" || s == "exact_pair" || s == "exact-pair") return ModeKind::ExactPair;
  if (s == "function") return ModeKind::Function;
  throw Error(ErrorKind::Validation, "unknown mode kind '" + s + "' (expected coclosed, pair or function)");
}

std::pair<double, double> EulerOperator::roots() const {
  const double b = 1.0 - p;
  const double disc = b * b + 4.0 * q;
  if (disc < 0.0) throw Error(ErrorKind::Validation, "complex indicial roots are not supported");
  const double s = std::sqrt(disc);
  return {0.5 * (b - s), 0.5 * (b + s)};
}

std::array<double, 2> log_derivative(const ScalarFn& f, double r, double h) {
  return fd::log_first_derivative(f, r, h);
}

RadialFunction solve_euler(const EulerOperator& op, const ScalarFn& F_in, double target, const RadialGrid& grid,
                           const SolverOptions& opt, const std::optional<std::array<double, 2>>& data,
                           EulerSolveInfo* info) {
  const ScalarFn F = zero_if_empty(F_in);
  auto st = std::make_shared<EulerState>();
  st->op = op;
  st->F = F;
  std::tie(st->km, st->kp) = op.roots();
  st->dbl = std::abs(st->kp - st->km) < 1e-12;
  const double h = kLn10 / opt.points_per_decade;
  const double t_end = std::log(opt.rmax * opt.extension);
  const double t_ref = std::log(opt.rmax);
  const double fe = target - 2.0;
  if (!st->dbl) {
    st->plus_inf = st->kp > target;
    st->minus_inf = st->km > target;
    st->Ip = std::make_unique<PowerIntegral>(F, 1.0 - st->kp, 0, fe, h, t_end, t_ref, opt.tail_tol, st->plus_inf);
    st->Im = std::make_unique<PowerIntegral>(F, 1.0 - st->km, 0, fe, h, t_end, t_ref, opt.tail_tol, st->minus_inf);
  } else {
    st->kp = st->km = 0.5 * (1.0 - op.p);
    st->plus_inf = st->minus_inf = st->kp > target;
    st->Ip = std::make_unique<PowerIntegral>(F, 1.0 - st->kp, 0, fe, h, t_end, t_ref, opt.tail_tol, st->plus_inf);
    st->Im = std::make_unique<PowerIntegral>(F, 1.0 - st->kp, 1, fe, h, t_end, t_ref, opt.tail_tol, st->plus_inf);
  }
  if (data) {
    const auto y1 = st->particular(1.0);
    const double dy0 = (*data)[0] - y1[0], dy1 = (*data)[1] - y1[1];
    if (!st->dbl) {
      // [1 1; k+ k-] (A+, A-) = (dy0, dy1)
      st->Am = (st->kp * dy0 - dy1) / (st->kp - st->km);
      st->Ap = dy0 - st->Am;
    } else {
      st->Ap = dy0;
      st->Am = dy1 - st->kp * dy0;
    }
    // Growing coefficients at solver round-off mean the data are consistent
    // with the target rate; keep them out of the far field.
    const double scale = std::abs((*data)[0]) + std::abs((*data)[1]) + std::abs(y1[0]) + std::abs(y1[1]);
    const double snap = 1e-9 * scale;
    if (st->kp > target && std::abs(st->Ap) <= snap) st->Ap = 0.0;
    const double k_am = st->dbl ? st->kp : st->km;
    if (k_am > target && std::abs(st->Am) <= snap) st->Am = 0.0;
  }
  if (info) {
    info->k_minus = st->km;
    info->k_plus = st->kp;
    info->double_root = st->dbl;
    info->plus_from_infinity = st->plus_inf;
    info->minus_from_infinity = st->minus_inf;
    info->a_plus = st->Ap;
    info->a_minus = st->Am;
    info->tail_error = std::max(st->Ip->tail_error(), st->Im->tail_error());
  }
  double decay = target;
  if (data && st->Ap != 0.0) decay = std::max(decay, st->kp);
  if (data && st->Am != 0.0) decay = std::max(decay, st->km);
  return sample_solution(st, grid, decay);
}

ResidualReport euler_residual(const EulerOperator& op, const RadialFunction& y, const ScalarFn& F_in) {
  const ScalarFn F = zero_if_empty(F_in);
  ResidualReport rep;
  const std::size_t N = y.r.size();
  rep.pointwise.assign(N, 0.0);
  if (N < 9) return rep;
  const double h = std::log(y.r[1] / y.r[0]);
  for (std::size_t i = 4; i + 4 < N; ++i) {
    const double yt = fd::central8_first(y.value, i) / h;
    const double ytt = fd::central8_second(y.value, i) / (h * h);
    const double r = y.r[i];
    const double rhs = r * r * F(r);
    const double res = -ytt + (1.0 - op.p) * yt + op.q * y.value[i] - rhs;
    const double scale = std::abs(ytt) + std::abs((1.0 - op.p) * yt) + std::abs(op.q * y.value[i]) + std::abs(rhs);
    const double rel = scale > 0.0 ? std::abs(res) / scale : 0.0;
    rep.pointwise[i] = rel;
    rep.max_relative = std::max(rep.max_relative, rel);
    rep.max_absolute = std::max(rep.max_absolute, std::abs(res) / (r * r));
  }
  return rep;
}

EulerOperator coclosed_operator(int n, double eigenvalue) { return {double(n - 3), eigenvalue}; }
EulerOperator function_operator(int n, double eigenvalue) { return {double(n - 1), eigenvalue}; }

RadialFunction solve_coclosed_mode(const ModeProblem& p, EulerSolveInfo* info) {
  if (p.kind != ModeKind::Coclosed) throw Error(ErrorKind::Validation, "solve_coclosed_mode: kind must be coclosed");
  if (p.n < 4) throw Error(ErrorKind::UnsupportedDimension, "solve_coclosed_mode: n must be >= 4");
  if (p.eigenvalue < 0.0) throw Error(ErrorKind::Validation, "coclosed eigenvalue must be nonnegative");
  const EulerOperator op = coclosed_operator(p.n, p.eigenvalue);
  const auto [km, kp] = op.roots();
  const double target = p.rate + 3.0;
  const bool log_case = p.n == 4 && p.eigenvalue == 0.0;
  require_nonexceptional(target, km, kp, p.options.gap_tol, "solve_coclosed_mode");
  if (!log_case && !(p.rate > 1.0 - p.n))
    throw Error(ErrorKind::Validation, "solve_coclosed_mode: rate must exceed 1 - n = " + std::to_string(1 - p.n));
  const auto grid = RadialGrid::geometric(p.options.rmax, p.options.points_per_decade);
  return solve_euler(op, p.rhs, target, grid, p.options, p.data, info);
}

ExactPairSolution solve_exact_pair(const ModeProblem& p) {
  if (p.kind != ModeKind::ExactPair) throw Error(ErrorKind::Validation, "solve_exact_pair: kind must be pair");
  if (p.n < 4) throw Error(ErrorKind::UnsupportedDimension, "solve_exact_pair: n must be >= 4");
  if (p.eigenvalue < 0.0) throw Error(ErrorKind::Validation, "function eigenvalue must be nonnegative");
  if (!(p.rate > 1.0 - p.n))
    throw Error(ErrorKind::Validation, "solve_exact_pair: rate must exceed 1 - n = " + std::to_string(1 - p.n));
  const int n = p.n;
  const double lam = p.eigenvalue;
  const ScalarFn u = zero_if_empty(p.rhs);
  const ScalarFn v = zero_if_empty(p.rhs2);
  const auto grid = RadialGrid::geometric(p.options.rmax, p.options.points_per_decade);
  ExactPairSolution out;

  if (lam == 0.0) {
    // Constant mode: d_L kappa_0 = 0, so only the f-equation survives.
    const EulerOperator op{double(n - 1), double(n - 1)};
    const auto [km, kp] = op.roots();
    require_nonexceptional(p.rate + 2.0, km, kp, p.options.gap_tol, "solve_exact_pair");
    out.zero_mode = true;
    out.f = solve_euler(op, u, p.rate + 2.0, grid, p.options, p.data);
    out.E = out.f;
    out.g = sample([](double) { return 0.0; }, grid, -std::numeric_limits<double>::infinity());
    return out;
  }

  const auto [bm, bp] = indicial_roots(SetLabel::B, n, lam);
  require_nonexceptional(p.rate + 2.0, bm, bp, p.options.gap_tol, "solve_exact_pair (set B)");
  const auto [cm, cp] = indicial_roots(SetLabel::C, n, lam);
  require_nonexceptional(p.rate + 3.0, cm, cp, p.options.gap_tol, "solve_exact_pair (set C)");

  ScalarFn dv;
  if (p.rhs2_derivative) {
    dv = *p.rhs2_derivative;
  } else {
    // One log step for the whole grid: the candidate with the smallest worst estimate.
    double worst = std::numeric_limits<double>::infinity(), step = 0.02;
    for (double h = 0.08; h > 0.009; h *= 0.5) {
      double w = 0.0;
      for (double r : grid.r) {
        const auto d = log_derivative(v, r, h);
        const double scale = std::abs(d[0]) + std::abs(v(r)) / r;
        if (scale > 0.0) w = std::max(w, d[1] / scale);
      }
      if (w < worst) worst = w, step = h;
    }
    out.derivative_error = worst;
    if (worst > p.options.deriv_tol)
      throw Error(ErrorKind::DifferentiationAccuracy,
                  "v' accuracy estimate " + std::to_string(worst) + " exceeds tolerance");
    dv = [v, step](double r) { return log_derivative(v, r, step)[0]; };
  }
  const ScalarFn theta = [u, dv](double r) { return u(r) - dv(r); };
  const EulerOperator opE{double(n - 3), lam + n - 3};
  out.E = solve_euler(opE, theta, p.rate + 2.0, grid, p.options, p.data);
  const auto Eeval = out.E.eval;
  const ScalarFn varpi = [Eeval, v](double r) { return 2.0 * Eeval(r)[0] / r + v(r); };
  const EulerOperator opG{double(n - 1), lam};
  out.g = solve_euler(opG, varpi, p.rate + 3.0, grid, p.options, p.data2);

  const auto geval = out.g.eval;
  auto f_eval = [geval, Eeval, varpi, n, lam](double r) {
    const auto g = geval(r);
    const auto E = Eeval(r);
    const double g2 = -(n - 1.0) / r * g[1] + lam / (r * r) * g[0] - varpi(r);
    return std::array<double, 2>{g[1] + E[0], g2 + E[1]};
  };
  out.f.r = grid.r;
  out.f.decay_order = p.rate + 2.0;
  for (std::size_t i = 0; i < grid.r.size(); ++i) {
    const double r = grid.r[i];
    const auto fv = f_eval(r);
    out.f.value.push_back(fv[0]);
    out.f.d1.push_back(fv[1]);
    // f'' = g''' + E''; g''' from differentiating the g-equation.
    const double g0 = out.g.value[i], g1 = out.g.d1[i], g2 = out.g.d2[i];
    const double dvarpi = log_derivative(varpi, r)[0];
    const double g3 = -(n - 1.0) * (g2 / r - g1 / (r * r)) + lam * (g1 / (r * r) - 2.0 * g0 / (r * r * r)) - dvarpi;
    out.f.d2.push_back(g3 + out.E.d2[i]);
  }
  out.f.eval = f_eval;
  return out;
}

PairResidual exact_pair_residual(const ModeProblem& p, const ExactPairSolution& s) {
  PairResidual res;
  const ScalarFn u = zero_if_empty(p.rhs);
  const ScalarFn v = zero_if_empty(p.rhs2);
  const std::size_t N = s.f.r.size();
  res.pointwise.assign(N, 0.0);
  if (N < 9) return res;
  const double h = std::log(s.f.r[1] / s.f.r[0]);
  const double n = p.n, lam = p.eigenvalue;
  for (std::size_t i = 4; i + 4 < N; ++i) {
    const double r = s.f.r[i];
    const double ft = fd::central8_first(s.f.value, i) / h, ftt = fd::central8_second(s.f.value, i) / (h * h);
    const double gt = fd::central8_first(s.g.value, i) / h, gtt = fd::central8_second(s.g.value, i) / (h * h);
    const double f1 = ft / r, f2 = (ftt - ft) / (r * r);
    const double g1 = gt / r, g2 = (gtt - gt) / (r * r);
    const double f0 = s.f.value[i], g0 = s.g.value[i];
    const double t1[] = {-f2, -(n - 1) / r * f1, (n - 1 + lam) / (r * r) * f0, -2 * lam / (r * r * r) * g0, -u(r)};
    const double t2[] = {-g2, -(n - 3) / r * g1, lam / (r * r) * g0, -2.0 / r * f0, -v(r)};
    double r1 = 0, s1 = 0, r2 = 0, s2 = 0;
    for (double x : t1) r1 += x, s1 += std::abs(x);
    for (double x : t2) r2 += x, s2 += std::abs(x);
    const double e1 = s1 > 0 ? std::abs(r1) / s1 : 0.0;
    const double e2 = s2 > 0 && !s.zero_mode ? std::abs(r2) / s2 : 0.0;
    res.f_equation = std::max(res.f_equation, e1);
    res.g_equation = std::max(res.g_equation, e2);
    res.pointwise[i] = std::max(e1, e2);
  }
  return res;
}

RadialFunction solve_function_mode(const ModeProblem& p, EulerSolveInfo* info) {
  if (p.kind != ModeKind::Function) throw Error(ErrorKind::Validation, "solve_function_mode: kind must be function");
  if (p.n < 3) throw Error(ErrorKind::UnsupportedDimension, "solve_function_mode: n must be >= 3");
  if (p.eigenvalue < 0.0) throw Error(ErrorKind::Validation, "function eigenvalue must be nonnegative");
  const EulerOperator op = function_operator(p.n, p.eigenvalue);
  const auto [km, kp] = op.roots();
  require_nonexceptional(p.rate, km, kp, p.options.gap_tol, "solve_function_mode");
  const auto grid = RadialGrid::geometric(p.options.rmax, p.options.points_per_decade);
  return solve_euler(op, p.rhs, p.rate, grid, p.options, p.data, info);
}

WeightedNorm weighted_norm(const RadialFunction& T, int k, double rate) {
  if (k < 0) throw Error(ErrorKind::Validation, "weighted_norm: k must be >= 0");
  WeightedNorm w;
  w.k = k;
  w.rate = rate;
  const std::size_t N = T.r.size();
  if (N == 0) return w;
  std::vector<std::vector<double>> derivs{T.value};
  if (k >= 1) derivs.push_back(T.d1);
  if (k >= 2) derivs.push_back(T.d2);
  if (k >= 3) {
    const double h = N > 1 ? std::log(T.r[1] / T.r[0]) : 1.0;
    for (int i = 3; i <= k; ++i) derivs.push_back(fd::radial_derivative(T.value, T.r, h, i));
  }
  const double cut = T.r.back() / 10.0;
  double full = 0.0, trunc = 0.0;
  for (int i = 0; i <= k; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const double d = derivs[i][j];
      if (!std::isfinite(d)) continue;
      const double r = T.r[j];
      const double val = std::pow(r * r + 1.0, 0.5 * (-rate + i)) * std::abs(d);
      full = std::max(full, val);
      if (r <= cut) trunc = std::max(trunc, val);
    }
  }
  w.value = full;
  w.growth = trunc > 0.0 ? full / trunc : (full > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  w.divergent = w.growth > 1.5;
  return w;
}

double truncation_tail_bound(int n, int k, std::size_t truncation) {
  const double e = -1.0 + double(2 * n - k) / double(n - 1);
  if (!(e < -1.0))
    throw Error(ErrorKind::Validation, "tail series diverges for k = " + std::to_string(k) + " (need k > 2n)");
  const double N = std::max<double>(1.0, double(truncation));
  return std::pow(N, e + 1.0) / (-e - 1.0);
}

AssemblyRecord assemble_one_form(const std::vector<ModeTerm>& modes, const LinkSpectrum& spec, int k_reg) {
  AssemblyRecord rec;
  rec.n = spec.cone_dim();
  if (k_reg < 0) k_reg = 2 * rec.n + 3;
  rec.aggregate_order = -std::numeric_limits<double>::infinity();
  for (const auto& m : modes) {
    const bool coclosed = m.family == ModeFamily::Coclosed;
    const auto& list = coclosed ? spec.coclosed_modes : spec.function_modes;
    const int idx = coclosed ? m.mode_index - 1 : m.mode_index;
    if (idx < 0 || idx >= static_cast<int>(list.size()))
      throw Error(ErrorKind::DimensionMismatch,
                  "assemble_one_form: mode index " + std::to_string(m.mode_index) + " outside the spectrum");
    if (m.family == ModeFamily::ExactDKappa && m.mode_index == 0)
      throw Error(ErrorKind::DimensionMismatch, "assemble_one_form: d_L kappa_0 vanishes");
    if (std::abs(list[idx].eigenvalue - m.eigenvalue) > 1e-9 * std::max(1.0, list[idx].eigenvalue))
      throw Error(ErrorKind::DimensionMismatch, "assemble_one_form: eigenvalue does not match spectrum entry");
    rec.terms.push_back(m);
    rec.aggregate_order = std::max(rec.aggregate_order, m.order);
    const double growth = m.family == ModeFamily::ExactDKappa ? 0.5 * (rec.n + 3) : 0.5 * (rec.n + 1);
    rec.aggregate_norm += m.sup_weighted * std::pow(1.0 + m.eigenvalue, growth);
  }
  rec.truncation = spec.expanded_function_eigenvalues().size() + spec.expanded_coclosed_eigenvalues().size();
  rec.tail_exponent = -1.0 + double(2 * rec.n - k_reg) / double(rec.n - 1);
  rec.tail_bound = truncation_tail_bound(rec.n, k_reg, rec.truncation);
  return rec;
}

}  // namespace conekit
