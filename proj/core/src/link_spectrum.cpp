#include "conekit/link_spectrum.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "conekit/errors.hpp"
#include "json.hpp"

namespace conekit {

namespace {

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<double> expand(const std::vector<Mode>& modes, std::size_t limit) {
  std::vector<double> out;
  for (const auto& m : modes) {
    if (m.eigenvalue <= 0.0) continue;
    for (std::int64_t c = 0; c < m.multiplicity; ++c) {
      if (limit && out.size() >= limit) return out;
      out.push_back(m.eigenvalue);
    }
  }
  return out;
}

// Count of weights of the a-dimensional SU(2) irrep killed by exp(2 pi i / p).
std::int64_t invariant_weights(int a, int p) {
  std::int64_t count = 0;
  for (int j = 0; j < a; ++j)
    if ((a - 1 - 2 * j) % p == 0) ++count;
  return count;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::ExceptionalRate: return "exceptional-rate";
    case ErrorKind::QuadratureNonconvergence: return "quadrature-nonconvergence";
    case ErrorKind::DifferentiationAccuracy: return "differentiation-accuracy";
    case ErrorKind::SingularMetric: return "singular-metric";
    case ErrorKind::NonPositiveForm: return "non-positive-form";
    case ErrorKind::StepSize: return "step-size";
    case ErrorKind::NotClosed: return "not-closed";
    case ErrorKind::NoLimit: return "no-limit";
    case ErrorKind::TailDivergence: return "tail-divergence";
    case ErrorKind::RankAmbiguity: return "rank-ambiguity";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::vector<double> LinkSpectrum::expanded_function_eigenvalues(std::size_t limit) const {
  return expand(function_modes, limit);
}

std::vector<double> LinkSpectrum::expanded_coclosed_eigenvalues(std::size_t limit) const {
  return expand(coclosed_modes, limit);
}

double sphere_volume(int m) {
  const double h = 0.5 * (m + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

std::int64_t sphere_function_multiplicity(int m, int k) {
  if (k == 0) return 1;
  return binomial(k + m, m) - binomial(k + m - 2, m);
}

std::int64_t sphere_coclosed_multiplicity(int m, int k) {
  if (k < 1) return 0;
  return static_cast<std::int64_t>(k + m - 1) * (2 * k + m - 1) * binomial(k + m - 3, m - 2) / (k + 1);
}

double sphere_coclosed_eigenvalue(int m, int k) { return double(k + 1) * double(k + m - 2); }

LinkSpectrum sphere_function_spectrum(int m, int i_max) {
  if (m < 1) throw Error(ErrorKind::UnsupportedDimension, "sphere dimension must be >= 1");
  if (i_max < 1) throw Error(ErrorKind::Validation, "i_max must be >= 1");
  LinkSpectrum s;
  s.dim_link = m;
  s.volume = sphere_volume(m);
  s.einstein_constant = m - 1;
  s.name = "S^" + std::to_string(m);
  for (int k = 0; k <= i_max; ++k)
    s.function_modes.push_back({double(k) * (k + m - 1), sphere_function_multiplicity(m, k)});
  return s;
}

LinkSpectrum sphere_spectrum(int m, int i_max) {
  if (m < 3)
    throw Error(ErrorKind::UnsupportedDimension,
                "sphere_spectrum: link dimension " + std::to_string(m) + " < 3 (cone dimension must be >= 4)");
  LinkSpectrum s = sphere_function_spectrum(m, i_max);
  for (int k = 1; k <= i_max; ++k)
    s.coclosed_modes.push_back({sphere_coclosed_eigenvalue(m, k), sphere_coclosed_multiplicity(m, k)});
  return s;
}

LinkSpectrum lens_spectrum(int p, int i_max) {
  if (p < 1) throw Error(ErrorKind::Validation, "lens_spectrum: p must be >= 1");
  LinkSpectrum s = sphere_spectrum(3, i_max);
  if (p == 1) return s;
  s.volume /= p;
  s.name = "L(" + std::to_string(p) + ",1)";
  std::vector<Mode> fn, co;
  for (int k = 0; k <= i_max; ++k) {
    const std::int64_t mult = (k + 1) * invariant_weights(k + 1, p);
    if (mult > 0) fn.push_back({double(k) * (k + 2), mult});
  }
  for (int k = 1; k <= i_max; ++k) {
    const std::int64_t mult = k * invariant_weights(k + 2, p) + (k + 2) * invariant_weights(k, p);
    if (mult > 0) co.push_back({sphere_coclosed_eigenvalue(3, k), mult});
  }
  s.function_modes = std::move(fn);
  s.coclosed_modes = std::move(co);
  return s;
}

void validate(const LinkSpectrum& s) {
  auto fail = [](const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::Validation, path + ": " + msg);
  };
  if (s.dim_link < 3) fail("dim_link", "must be an integer >= 3");
  if (!(s.volume > 0.0) || !std::isfinite(s.volume)) fail("volume", "must be a positive finite number");
  if (!std::isfinite(s.einstein_constant)) fail("einstein_constant", "must be finite");
  if (s.function_modes.empty()) fail("function_modes", "must contain the constant mode [0, 1]");
  for (std::size_t i = 0; i < s.function_modes.size(); ++i) {
    const auto& m = s.function_modes[i];
    const std::string at = "function_modes[" + std::to_string(i) + "]";
    if (!std::isfinite(m.eigenvalue) || m.eigenvalue < 0.0) fail(at + "[0]", "eigenvalue must be nonnegative");
    if (m.multiplicity < 1) fail(at + "[1]", "multiplicity must be a positive integer");
    if (i == 0 && (m.eigenvalue != 0.0 || m.multiplicity != 1)) fail(at, "first entry must be [0, 1]");
    if (i > 0 && m.eigenvalue <= 0.0) fail(at + "[0]", "eigenvalues after the first must be positive");
    if (i > 0 && m.eigenvalue < s.function_modes[i - 1].eigenvalue) fail(at + "[0]", "eigenvalues must be nondecreasing");
  }
  for (std::size_t j = 0; j < s.coclosed_modes.size(); ++j) {
    const auto& m = s.coclosed_modes[j];
    const std::string at = "coclosed_one_form_modes[" + std::to_string(j) + "]";
    if (!std::isfinite(m.eigenvalue) || m.eigenvalue < 0.0) fail(at + "[0]", "eigenvalue must be nonnegative");
    if (m.multiplicity < 1) fail(at + "[1]", "multiplicity must be a positive integer");
    if (j > 0 && m.eigenvalue < s.coclosed_modes[j - 1].eigenvalue) fail(at + "[0]", "eigenvalues must be nondecreasing");
  }
}

LinkSpectrum spectrum_from_json_text(const std::string& text) {
  using nlohmann::json;
  auto fail = [](const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::Validation, path + ": " + msg);
  };
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("$", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("$", "expected an object");
  static const char* known[] = {"dim_link", "volume", "einstein_constant", "function_modes",
                                "coclosed_one_form_modes", "name"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(it.key(), "unknown field");
  }
  LinkSpectrum s;
  if (!j.contains("dim_link") || !j["dim_link"].is_number_integer()) fail("dim_link", "missing or not an integer");
  s.dim_link = j["dim_link"].get<int>();
  if (!j.contains("volume") || !j["volume"].is_number()) fail("volume", "missing or not a number");
  s.volume = j["volume"].get<double>();
  if (!j.contains("einstein_constant") || !j["einstein_constant"].is_number())
    fail("einstein_constant", "missing or not a number");
  s.einstein_constant = j["einstein_constant"].get<double>();
  auto read_modes = [&](const char* key, std::vector<Mode>& out, bool required) {
    if (!j.contains(key)) {
      if (required) fail(key, "missing");
      return;
    }
    const json& arr = j[key];
    if (!arr.is_array()) fail(key, "expected an array of [lambda, multiplicity] pairs");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = std::string(key) + "[" + std::to_string(i) + "]";
      const json& e = arr[i];
      if (!e.is_array() || e.size() != 2) fail(at, "expected [lambda, multiplicity]");
      if (!e[0].is_number()) fail(at + "[0]", "eigenvalue must be a number");
      if (!e[1].is_number_integer()) fail(at + "[1]", "multiplicity must be an integer");
      out.push_back({e[0].get<double>(), e[1].get<std::int64_t>()});
    }
  };
  read_modes("function_modes", s.function_modes, true);
  read_modes("coclosed_one_form_modes", s.coclosed_modes, true);
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("name", "must be a string");
    s.name = j["name"].get<std::string>();
  }
  validate(s);
  return s;
}

std::string spectrum_to_json_text(const LinkSpectrum& s) {
  nlohmann::json j;
  j["dim_link"] = s.dim_link;
  j["volume"] = s.volume;
  j["einstein_constant"] = s.einstein_constant;
  auto modes = [](const std::vector<Mode>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : v) a.push_back({m.eigenvalue, m.multiplicity});
    return a;
  };
  j["function_modes"] = modes(s.function_modes);
  j["coclosed_one_form_modes"] = modes(s.coclosed_modes);
  if (!s.name.empty()) j["name"] = s.name;
  return j.dump(1);
}

double WeylFit::relative_deviation() const { return std::abs(exponent - expected) / expected; }

WeylFit weyl_check(const LinkSpectrum& spec, SpectrumFamily family) {
  const auto& modes = family == SpectrumFamily::Function ? spec.function_modes : spec.coclosed_modes;
  std::size_t distinct = 0;
  for (const auto& m : modes) distinct += m.eigenvalue > 0.0;
  if (distinct < 10)
    throw Error(ErrorKind::InsufficientData,
                "weyl_check: need at least 10 distinct positive eigenvalues, have " + std::to_string(distinct));
  const auto lam = family == SpectrumFamily::Function ? spec.expanded_function_eigenvalues()
                                                      : spec.expanded_coclosed_eigenvalues();
  const Eigen::Index n = static_cast<Eigen::Index>(lam.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    A(j, 0) = 1.0;
    A(j, 1) = std::log(double(j + 1));
    b(j) = std::log(lam[j]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  WeylFit fit;
  fit.exponent = coef(1);
  fit.expected = 2.0 / spec.dim_link;
  fit.residual = std::sqrt((A * coef - b).squaredNorm() / double(n));
  fit.samples = lam.size();
  return fit;
}

SpectralBounds sasaki_einstein_bounds(const LinkSpectrum& spec) {
  SpectralBounds b;
  b.applicable = spec.dim_link % 2 == 1;
  if (!b.applicable) return b;
  b.n_complex = (spec.dim_link + 1) / 2;
  for (const auto& m : spec.function_modes)
    if (m.eigenvalue > 0.0) { b.first_function = m.eigenvalue; break; }
  for (const auto& m : spec.coclosed_modes)
    if (m.eigenvalue > 0.0) { b.first_coclosed = m.eigenvalue; break; }
  b.function_bound = 2.0 * b.n_complex - 1.0;
  b.coclosed_bound = 4.0 * b.n_complex - 4.0;
  const double tol = 1e-12;
  b.function_ok = b.first_function >= b.function_bound - tol;
  b.coclosed_ok = spec.coclosed_modes.empty() || b.first_coclosed >= b.coclosed_bound - tol;
  return b;
}

}  // namespace conekit
