#include "conekit/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "conekit/errors.hpp"
#include "conekit/sphere_quadrature.hpp"

namespace conekit {

namespace {

std::vector<Jet> seed(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<Jet> j(n);
  for (int i = 0; i < n; ++i) j[i] = Jet::variable(x[i], i, n);
  return j;
}

void check_point(const MetricField& g, const std::vector<double>& x) {
  if (g.dim < 1 || g.dim > kMaxDim)
    throw Error(ErrorKind::UnsupportedDimension, "metric dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (static_cast<int>(x.size()) != g.dim)
    throw Error(ErrorKind::DimensionMismatch, "point has " + std::to_string(x.size()) + " coordinates, metric '" +
                                                  g.name + "' expects " + std::to_string(g.dim));
}

// Pointwise differential data of one metric.
struct Geo {
  int n = 0;
  MetricSample s;
  std::vector<double> ginv;    // g^{ij}
  std::vector<double> dginv;   // [(m*n + i)*n + j] = d_m g^{ij}
  Tensor3 gamma;               // Gamma^k_ij
  std::vector<double> dgamma;  // [((m*n + k)*n + i)*n + j] = d_m Gamma^k_ij

  double gi(int i, int j) const { return ginv[i * n + j]; }
  double dgi(int m, int i, int j) const { return dginv[(m * n + i) * n + j]; }
  double G(int k, int i, int j) const { return gamma(k, i, j); }
  double dG(int m, int k, int i, int j) const { return dgamma[((m * n + k) * n + i) * n + j]; }
};

Geo make_geo(MetricSample s, const std::string& name) {
  Geo geo;
  const int n = s.n;
  geo.n = n;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = s.at(i, j);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  const double scale = g.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-14 * scale)
    throw Error(ErrorKind::SingularMetric, "metric '" + name + "' is singular or indefinite at the sample point");
  const Eigen::MatrixXd gi = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  geo.ginv.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) geo.ginv[i * n + j] = gi(i, j);
  geo.dginv.assign(n * n * n, 0.0);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) acc -= gi(i, a) * s.d(m, a, b) * gi(b, j);
        geo.dginv[(m * n + i) * n + j] = acc;
      }
  // Gamma_{l,ij} and its derivative.
  auto low = [&](int l, int i, int j) { return 0.5 * (s.d(i, j, l) + s.d(j, i, l) - s.d(l, i, j)); };
  auto dlow = [&](int m, int l, int i, int j) {
    return 0.5 * (s.d2(m, i, j, l) + s.d2(m, j, i, l) - s.d2(m, l, i, j));
  };
  geo.gamma.n = n;
  geo.gamma.data.assign(n * n * n, 0.0);
  geo.dgamma.assign(n * n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += gi(k, l) * low(l, i, j);
        geo.gamma(k, i, j) = acc;
        for (int m = 0; m < n; ++m) {
          double dacc = 0.0;
          for (int l = 0; l < n; ++l)
            dacc += geo.dginv[(m * n + k) * n + l] * low(l, i, j) + gi(k, l) * dlow(m, l, i, j);
          geo.dgamma[((m * n + k) * n + i) * n + j] = dacc;
        }
      }
  geo.s = std::move(s);
  return geo;
}

Geo make_geo(const MetricField& g, const std::vector<double>& x) { return make_geo(evaluate(g, x), g.name); }

std::vector<double> ricci_of(const Geo& geo) {
  const int n = geo.n;
  std::vector<double> R(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += geo.dG(k, k, i, j) - geo.dG(j, k, i, k);
        for (int l = 0; l < n; ++l) acc += geo.G(k, k, l) * geo.G(l, i, j) - geo.G(k, j, l) * geo.G(l, i, k);
      }
      R[i * n + j] = acc;
    }
  return R;
}

double trace_with(const Geo& geo, const std::vector<double>& T) {
  double acc = 0.0;
  for (int i = 0; i < geo.n; ++i)
    for (int j = 0; j < geo.n; ++j) acc += geo.gi(i, j) * T[i * geo.n + j];
  return acc;
}

// nabla-bar_i g_jl and d_m of it, for g sampled against reference data gb.
struct CovariantDerivative {
  int n;
  std::vector<double> v;   // [(i*n + j)*n + l]
  std::vector<double> dv;  // [((m*n + i)*n + j)*n + l]
  double at(int i, int j, int l) const { return v[(i * n + j) * n + l]; }
  double d(int m, int i, int j, int l) const { return dv[((m * n + i) * n + j) * n + l]; }
};

CovariantDerivative covariant_derivative(const MetricSample& s, const Geo& gb) {
  const int n = s.n;
  CovariantDerivative c{n, std::vector<double>(n * n * n), std::vector<double>(n * n * n * n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        double acc = s.d(i, j, l);
        for (int p = 0; p < n; ++p) acc -= gb.G(p, i, j) * s.at(p, l) + gb.G(p, i, l) * s.at(j, p);
        c.v[(i * n + j) * n + l] = acc;
        for (int m = 0; m < n; ++m) {
          double dacc = s.d2(m, i, j, l);
          for (int p = 0; p < n; ++p)
            dacc -= gb.dG(m, p, i, j) * s.at(p, l) + gb.G(p, i, j) * s.d(m, p, l) + gb.dG(m, p, i, l) * s.at(j, p) +
                    gb.G(p, i, l) * s.d(m, j, p);
          c.dv[((m * n + i) * n + j) * n + l] = dacc;
        }
      }
  return c;
}

struct ConnectionDifference {
  Tensor3 A;
  std::vector<double> dA;  // [((m*n + k)*n + i)*n + j]
};

ConnectionDifference connection_difference_full(const Geo& g, const Geo& gb) {
  const int n = g.n;
  const auto cd = covariant_derivative(g.s, gb);
  ConnectionDifference out;
  out.A.n = n;
  out.A.data.assign(n * n * n, 0.0);
  out.dA.assign(n * n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += 0.5 * g.gi(k, l) * (cd.at(i, j, l) + cd.at(j, i, l) - cd.at(l, i, j));
        out.A(k, i, j) = acc;
        for (int m = 0; m < n; ++m) {
          double dacc = 0.0;
          for (int l = 0; l < n; ++l)
            dacc += 0.5 * g.dgi(m, k, l) * (cd.at(i, j, l) + cd.at(j, i, l) - cd.at(l, i, j)) +
                    0.5 * g.gi(k, l) * (cd.d(m, i, j, l) + cd.d(m, j, i, l) - cd.d(m, l, i, j));
          out.dA[((m * n + k) * n + i) * n + j] = dacc;
        }
      }
  return out;
}

double scalar_from_sample(MetricSample s, const std::string& name) {
  const Geo geo = make_geo(std::move(s), name);
  return trace_with(geo, ricci_of(geo));
}

MetricSample difference(const MetricSample& a, const MetricSample& b) {
  MetricSample h = a;
  for (std::size_t i = 0; i < h.g.size(); ++i) h.g[i] -= b.g[i];
  for (std::size_t i = 0; i < h.dg.size(); ++i) h.dg[i] -= b.dg[i];
  for (std::size_t i = 0; i < h.d2g.size(); ++i) h.d2g[i] -= b.d2g[i];
  return h;
}

}  // namespace

MetricSample evaluate(const MetricField& g, const std::vector<double>& x) {
  check_point(g, x);
  const int n = g.dim;
  const auto xs = seed(x);
  std::vector<Jet> comp(n * n);
  g.components(xs.data(), comp.data());
  MetricSample s;
  s.n = n;
  s.g.resize(n * n);
  s.dg.resize(n * n * n);
  s.d2g.resize(n * n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet& c = comp[i * n + j];
      if (!std::isfinite(c.v))
        throw Error(ErrorKind::SingularMetric, "metric '" + g.name + "' is not finite at the sample point");
      s.g[i * n + j] = c.v;
      for (int k = 0; k < n; ++k) {
        s.dg[(k * n + i) * n + j] = c.d[k];
        for (int l = 0; l < n; ++l) s.d2g[((l * n + k) * n + i) * n + j] = c.h[l][k];
      }
    }
  return s;
}

double Tensor3::max_abs_diff(const Tensor3& o) const {
  double m = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) m = std::max(m, std::abs(data[i] - o.data[i]));
  return m;
}

Tensor3 christoffel(const MetricField& g, const std::vector<double>& x) { return make_geo(g, x).gamma; }

Tensor3 connection_difference(const MetricField& g, const MetricField& gbar, const std::vector<double>& x) {
  if (g.dim != gbar.dim) throw Error(ErrorKind::DimensionMismatch, "connection_difference: metric dimensions differ");
  return connection_difference_full(make_geo(g, x), make_geo(gbar, x)).A;
}

std::vector<double> ricci(const MetricField& g, const std::vector<double>& x) { return ricci_of(make_geo(g, x)); }

double scalar_curvature(const MetricField& g, const std::vector<double>& x) {
  const Geo geo = make_geo(g, x);
  return trace_with(geo, ricci_of(geo));
}

double scalar_curvature_relative(const MetricField& g, const MetricField& gbar, const std::vector<double>& x) {
  if (g.dim != gbar.dim)
    throw Error(ErrorKind::DimensionMismatch, "scalar_curvature_relative: metric dimensions differ");
  const Geo G = make_geo(g, x), B = make_geo(gbar, x);
  const int n = G.n;
  const auto cd = connection_difference_full(G, B);
  const auto& A = cd.A;
  auto dA = [&](int m, int k, int i, int j) { return cd.dA[((m * n + k) * n + i) * n + j]; };
  const auto Rb = ricci_of(B);
  double R = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double t = Rb[i * n + j];
      for (int k = 0; k < n; ++k) {
        // nabla-bar_k A^k_ij
        t += dA(k, k, i, j);
        for (int l = 0; l < n; ++l)
          t += B.G(k, k, l) * A(l, i, j) - B.G(l, k, i) * A(k, l, j) - B.G(l, k, j) * A(k, i, l);
        // - nabla-bar_i A^k_kj
        t -= dA(i, k, k, j);
        for (int l = 0; l < n; ++l) t += B.G(l, i, j) * A(k, k, l);
        for (int l = 0; l < n; ++l) t += A(l, i, j) * A(k, l, k) - A(l, k, j) * A(k, l, i);
      }
      R += G.gi(i, j) * t;
    }
  return R;
}

FiniteDifferenceResult scalar_curvature_fd(const MetricField& g, const std::vector<double>& x, double h,
                                           double tol) {
  check_point(g, x);
  const int n = g.dim;
  auto values = [&](const std::vector<double>& y) {
    const auto s = evaluate(g, y);
    return s.g;
  };
  auto sample_at = [&](double step) {
    MetricSample s;
    s.n = n;
    s.g = values(x);
    s.dg.assign(n * n * n, 0.0);
    s.d2g.assign(n * n * n * n, 0.0);
    std::vector<std::vector<double>> plus(n), minus(n);
    for (int k = 0; k < n; ++k) {
      auto y = x;
      y[k] += step;
      plus[k] = values(y);
      y[k] -= 2 * step;
      minus[k] = values(y);
      for (int c = 0; c < n * n; ++c) {
        s.dg[k * n * n + c] = (plus[k][c] - minus[k][c]) / (2 * step);
        s.d2g[(k * n + k) * n * n + c] = (plus[k][c] - 2 * s.g[c] + minus[k][c]) / (step * step);
      }
    }
    for (int k = 0; k < n; ++k)
      for (int l = k + 1; l < n; ++l) {
        std::vector<double> vals[4];
        const int sk[4] = {1, 1, -1, -1}, sl[4] = {1, -1, 1, -1};
        for (int q = 0; q < 4; ++q) {
          auto y = x;
          y[k] += sk[q] * step;
          y[l] += sl[q] * step;
          vals[q] = values(y);
        }
        for (int c = 0; c < n * n; ++c) {
          const double v = (vals[0][c] - vals[1][c] - vals[2][c] + vals[3][c]) / (4 * step * step);
          s.d2g[(k * n + l) * n * n + c] = v;
          s.d2g[(l * n + k) * n * n + c] = v;
        }
      }
    return scalar_from_sample(std::move(s), g.name);
  };
  const double coarse = sample_at(h), fine = sample_at(0.5 * h);
  FiniteDifferenceResult out;
  out.value = (4.0 * fine - coarse) / 3.0;
  out.error = std::abs(fine - coarse) / 3.0;
  out.step = h;
  if (!std::isfinite(out.value) || out.error > tol * std::max(1.0, std::abs(out.value)))
    throw Error(ErrorKind::StepSize, "scalar_curvature_fd: Richardson estimate " + std::to_string(out.error) +
                                         " at step " + std::to_string(h) + " (coarse " + std::to_string(coarse) +
                                         ", fine " + std::to_string(fine) + ")");
  return out;
}

DivergenceTerms divergence_terms(const MetricField& g, const MetricField& gbar, const std::vector<double>& x) {
  if (g.dim != gbar.dim) throw Error(ErrorKind::DimensionMismatch, "linearized_scalar: metric dimensions differ");
  const Geo B = make_geo(gbar, x);
  const int n = B.n;
  const MetricSample h = difference(evaluate(g, x), B.s);
  // N[a][i][j] = nabla-bar_a h_ij and dN[b][a][i][j] = d_b of it.
  std::vector<double> N(n * n * n), dN(n * n * n * n);
  auto Ni = [&](int a, int i, int j) { return N[(a * n + i) * n + j]; };
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = h.d(a, i, j);
        for (int p = 0; p < n; ++p) v -= B.G(p, a, i) * h.at(p, j) + B.G(p, a, j) * h.at(i, p);
        N[(a * n + i) * n + j] = v;
        for (int b = 0; b < n; ++b) {
          double dv = h.d2(b, a, i, j);
          for (int p = 0; p < n; ++p)
            dv -= B.dG(b, p, a, i) * h.at(p, j) + B.G(p, a, i) * h.d(b, p, j) + B.dG(b, p, a, j) * h.at(i, p) +
                  B.G(p, a, j) * h.d(b, i, p);
          dN[((b * n + a) * n + i) * n + j] = dv;
        }
      }
  auto NN = [&](int b, int a, int i, int j) {
    double v = dN[((b * n + a) * n + i) * n + j];
    for (int p = 0; p < n; ++p)
      v -= B.G(p, b, a) * Ni(p, i, j) + B.G(p, b, i) * Ni(a, p, j) + B.G(p, b, j) * Ni(a, i, p);
    return v;
  };
  DivergenceTerms t;
  const auto Rb = ricci_of(B);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double w = B.gi(j, b) * B.gi(i, a);
          if (w != 0.0) t.div_div += w * NN(b, a, i, j);
          const double u = B.gi(a, b) * B.gi(i, j);
          if (u != 0.0) t.lap_trace += u * NN(a, b, i, j);
          t.ric_pair += Rb[i * n + j] * B.gi(i, a) * B.gi(j, b) * h.at(a, b);
        }
  return t;
}

double linearized_scalar(const MetricField& g, const MetricField& gbar, const std::vector<double>& x) {
  const auto t = divergence_terms(g, gbar, x);
  return -t.ric_pair + t.div_div - t.lap_trace;
}

MetricField interpolate(const MetricField& gbar, const MetricField& g, double t) {
  if (g.dim != gbar.dim) throw Error(ErrorKind::DimensionMismatch, "interpolate: metric dimensions differ");
  MetricField out;
  out.dim = g.dim;
  out.name = gbar.name + "+t(" + g.name + ")";
  out.quotient_order = g.quotient_order;
  out.components = [gbar, g, t](const Jet* x, Jet* c) {
    const int n = g.dim;
    std::vector<Jet> a(n * n), b(n * n);
    gbar.components(x, a.data());
    g.components(x, b.data());
    for (int i = 0; i < n * n; ++i) c[i] = a[i] + t * (b[i] - a[i]);
  };
  return out;
}

MetricField rescaled(const MetricField& g, double lambda) {
  MetricField out = g;
  out.name = g.name + "@" + std::to_string(lambda);
  out.components = [g, lambda](const Jet* x, Jet* c) {
    std::vector<Jet> y(g.dim);
    for (int i = 0; i < g.dim; ++i) y[i] = lambda * x[i];
    g.components(y.data(), c);
  };
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_potential(const RadialPotential& u, std::size_t dim) {
  if (u.n_complex < 1 || 2 * u.n_complex > kMaxDim)
    throw Error(ErrorKind::UnsupportedDimension, "radial potential: n_complex out of range");
  if (dim != static_cast<std::size_t>(2 * u.n_complex))
    throw Error(ErrorKind::DimensionMismatch, "radial potential: point must have 2n real coordinates");
}

Jet squared_norm(const Jet* x, int N) {
  Jet t(0.0, N);
  for (int i = 0; i < N; ++i) t = t + x[i] * x[i];
  return t;
}

// H = 2 (u_t I + u_tt zbar z^T): real metric in (x1, y1, x2, y2, ...).
void kahler_components(const RadialPotential& u, const Jet* x, Jet* g) {
  const int n = u.n_complex, N = 2 * n;
  const Jet t = squared_norm(x, N);
  Jet ut, utt;
  u.derivatives(t, ut, utt);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet& xa = x[2 * a];
      const Jet& ya = x[2 * a + 1];
      const Jet& xb = x[2 * b];
      const Jet& yb = x[2 * b + 1];
      Jet re = 2.0 * utt * (xa * xb + ya * yb);
      if (a == b) re = re + 2.0 * ut;
      const Jet im = 2.0 * utt * (xa * yb - ya * xb);
      g[(2 * a) * N + 2 * b] = re;
      g[(2 * a + 1) * N + 2 * b + 1] = re;
      g[(2 * a) * N + 2 * b + 1] = im;
      g[(2 * a + 1) * N + 2 * b] = -im;
    }
}

// log det H as a jet; throws NonPositiveForm.
Jet log_volume_ratio(const RadialPotential& u, const Jet* x) {
  const int n = u.n_complex;
  const Jet t = squared_norm(x, 2 * n);
  Jet ut, utt;
  u.derivatives(t, ut, utt);
  const Jet tangential = 2.0 * ut;
  const Jet radial = 2.0 * (ut + t * utt);
  if (!(tangential.v > 0.0) || !(radial.v > 0.0))
    throw Error(ErrorKind::NonPositiveForm, "potential '" + u.name + "' gives a non-positive form at |z|^2 = " +
                                                std::to_string(t.v));
  return static_cast<double>(n - 1) * log(tangential) + log(radial);
}

}  // namespace

KahlerForm kahler_form_from_potential(const RadialPotential& u, const std::vector<double>& x) {
  check_potential(u, x.size());
  const int n = u.n_complex, N = 2 * n;
  const auto xs = seed(x);
  const Jet lv = log_volume_ratio(u, xs.data());
  std::vector<Jet> g(N * N);
  kahler_components(u, xs.data(), g.data());
  KahlerForm out;
  out.n_complex = n;
  out.H.resize(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.H[a * n + b] = {g[(2 * a) * N + 2 * b].v, g[(2 * a) * N + 2 * b + 1].v};
  out.real_metric.resize(N * N);
  for (int i = 0; i < N * N; ++i) out.real_metric[i] = g[i].v;
  out.volume_ratio = std::exp(lv.v);
  return out;
}

MetricField kahler_metric(const RadialPotential& u) {
  MetricField m;
  m.dim = 2 * u.n_complex;
  m.name = u.name;
  m.quotient_order = u.quotient_order;
  m.components = [u](const Jet* x, Jet* g) { kahler_components(u, x, g); };
  return m;
}

double ricci_potential_boundary_term(const RadialPotential& u, double r, double tol) {
  const int n = u.n_complex, N = 2 * n;
  const MetricField g = kahler_metric(u);
  auto flux = [&](const std::vector<double>& x) {
    const FirstOrderJets first_order;
    const auto xs = seed(x);
    const Jet F = log_volume_ratio(u, xs.data());
    const auto s = evaluate(g, x);
    Eigen::MatrixXd G(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) G(i, j) = s.at(i, j);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    Eigen::VectorXd dF(N), drho(N);
    for (int i = 0; i < N; ++i) {
      dF(i) = F.d[i];
      drho(i) = x[i] / r;
    }
    const double det = ldlt.vectorD().prod();
    return dF.dot(ldlt.solve(drho)) * std::sqrt(det);
  };
  const auto I = integrate_sphere(N, r, flux, tol);
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  return -0.5 * fact * I.value / u.quotient_order;
}

// ---------------------------------------------------------------------------

MetricField euclidean(int N) {
  MetricField m;
  m.dim = N;
  m.name = "euclidean";
  m.components = [N](const Jet* x, Jet* g) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g[i * N + j] = Jet(i == j ? 1.0 : 0.0, x[0].n);
  };
  return m;
}

MetricField cone_over_round_s2() {
  MetricField m;
  m.dim = 3;
  m.name = "cone-s2-polar";
  m.components = [](const Jet* x, Jet* g) {
    const int n = x[0].n;
    for (int i = 0; i < 9; ++i) g[i] = Jet(0.0, n);
    const Jet r2 = x[0] * x[0];
    const Jet s = sin(x[1]);
    g[0] = Jet(1.0, n);
    g[4] = r2;
    g[8] = r2 * s * s;
  };
  return m;
}

MetricField conformally_flat(int N, std::function<Jet(const Jet* x)> phi, std::string name) {
  MetricField m;
  m.dim = N;
  m.name = std::move(name);
  m.components = [N, phi](const Jet* x, Jet* g) {
    const Jet e = exp(2.0 * phi(x));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) g[i * N + j] = i == j ? e : Jet(0.0, x[0].n);
  };
  return m;
}

MetricField round_sphere_stereographic(int m) {
  return conformally_flat(
      m, [m](const Jet* y) { return std::log(2.0) - log(1.0 + squared_norm(y, m)); }, "round-sphere");
}

MetricField schwarzschild(int N, double mass) {
  MetricField g;
  g.dim = N;
  g.name = "schwarzschild";
  g.decay_claim = N - 2;
  g.components = [N, mass](const Jet* x, Jet* c) {
    const Jet r2 = squared_norm(x, N);
    const Jet a = 1.0 / (1.0 - 2.0 * mass * pow(r2, 0.5 * (2 - N))) - 1.0;
    const Jet s = a / r2;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Jet v = s * x[i] * x[j];
        if (i == j) v = v + 1.0;
        c[i * N + j] = v;
      }
  };
  return g;
}

MetricField perturbed_euclidean(int N, std::function<void(const Jet* x, Jet* h)> h, std::string name) {
  MetricField g;
  g.dim = N;
  g.name = std::move(name);
  g.components = [N, h](const Jet* x, Jet* c) {
    h(x, c);
    for (int i = 0; i < N; ++i) c[i * N + i] = c[i * N + i] + 1.0;
  };
  return g;
}

MetricField pure_gauge(int N, double eps) {
  MetricField g;
  g.dim = N;
  g.name = "pure-gauge";
  g.components = [N, eps](const Jet* x, Jet* c) {
    const Jet s = squared_norm(x, N);
    for (int i = 0; i < N * N; ++i) c[i] = Jet(i % (N + 1) == 0 ? 1.0 : 0.0, x[0].n);
    if (s.v >= 1.0) return;
    // b(s) = exp(-1/(1-s)), b'(s) = -b(s) / (1-s)^2; generator along e_1.
    const Jet q = 1.0 - s;
    const Jet bp = -1.0 * exp(-1.0 / q) / (q * q);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Jet v = 4.0 * eps * eps * bp * bp * x[i] * x[j];
        if (j == 0) v = v + 2.0 * eps * bp * x[i];
        if (i == 0) v = v + 2.0 * eps * bp * x[j];
        c[i * N + j] = c[i * N + j] + v;
      }
  };
  return g;
}

RadialPotential flat_potential(int n_complex) {
  RadialPotential u;
  u.n_complex = n_complex;
  u.name = "flat";
  u.derivatives = [](const Jet& t, Jet& ut, Jet& utt) {
    ut = Jet(0.5, t.n);
    utt = Jet(0.0, t.n);
  };
  return u;
}

RadialPotential burns_potential(double c) {
  RadialPotential u;
  u.n_complex = 2;
  u.name = "burns";
  u.derivatives = [c](const Jet& t, Jet& ut, Jet& utt) {
    ut = 0.5 + 0.5 * c / t;
    utt = -0.5 * c / (t * t);
  };
  return u;
}

RadialPotential power_potential(int n_complex, double c) {
  RadialPotential u;
  u.n_complex = n_complex;
  u.name = "power";
  const double n = n_complex;
  u.derivatives = [c, n](const Jet& t, Jet& ut, Jet& utt) {
    ut = 0.5 + c * (2.0 - n) * pow(t, 1.0 - n);
    utt = c * (2.0 - n) * (1.0 - n) * pow(t, -n);
  };
  return u;
}

RadialPotential eguchi_hanson_potential(double a) {
  RadialPotential u;
  u.n_complex = 2;
  u.name = "eguchi-hanson";
  u.quotient_order = 2;
  const double a4 = a * a * a * a;
  u.derivatives = [a4](const Jet& t, Jet& ut, Jet& utt) {
    const Jet w = sqrt(t * t + a4);
    ut = 0.5 + 0.5 * a4 / (t * (w + t));
    utt = -0.5 * a4 / (t * t * w);
  };
  return u;
}

}  // namespace conekit
