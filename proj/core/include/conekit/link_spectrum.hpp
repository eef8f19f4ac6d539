#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conekit {

struct Mode {
  double eigenvalue = 0.0;
  std::int64_t multiplicity = 0;
};

// Spectral data of a closed link (L, g_L). Eigenvalues are stored as distinct
// values with their multiplicities.
struct LinkSpectrum {
  int dim_link = 0;
  double volume = 0.0;
  double einstein_constant = 0.0;
  std::vector<Mode> function_modes;
  std::vector<Mode> coclosed_modes;
  std::string name;

  int cone_dim() const { return dim_link + 1; }
  int truncation_count() const { return static_cast<int>(function_modes.size()); }

  // Eigenvalues repeated according to multiplicity, positive ones only.
  std::vector<double> expanded_function_eigenvalues(std::size_t limit = 0) const;
  std::vector<double> expanded_coclosed_eigenvalues(std::size_t limit = 0) const;
};

double sphere_volume(int m);  // Vol(S^m), unit round metric

std::int64_t sphere_function_multiplicity(int m, int k);
std::int64_t sphere_coclosed_multiplicity(int m, int k);
double sphere_coclosed_eigenvalue(int m, int k);

LinkSpectrum sphere_spectrum(int m, int i_max);
// Function modes of S^m for any m >= 1, no coclosed data. Used for the
// function Laplacian on low-dimensional flat cones.
LinkSpectrum sphere_function_spectrum(int m, int i_max);
LinkSpectrum lens_spectrum(int p, int i_max);

// Throws Error(Validation) naming the first offending field.
void validate(const LinkSpectrum& spec);

LinkSpectrum spectrum_from_json_text(const std::string& text);
std::string spectrum_to_json_text(const LinkSpectrum& spec);

struct WeylFit {
  double exponent = 0.0;
  double expected = 0.0;
  double residual = 0.0;  // rms of log-residuals
  std::size_t samples = 0;
  double relative_deviation() const;
};

enum class SpectrumFamily { Function, Coclosed };

// Least-squares fit of log(lambda_j) against log(j), eigenvalues expanded by
// multiplicity. Requires at least 10 distinct retained eigenvalues.
WeylFit weyl_check(const LinkSpectrum& spec, SpectrumFamily family = SpectrumFamily::Function);

struct SpectralBounds {
  bool applicable = false;  // dim_link odd
  int n_complex = 0;
  double first_function = 0.0;
  double first_coclosed = 0.0;
  double function_bound = 0.0;  // 2n - 1
  double coclosed_bound = 0.0;  // 4n - 4
  bool function_ok = false;
  bool coclosed_ok = false;
};

SpectralBounds sasaki_einstein_bounds(const LinkSpectrum& spec);

}  // namespace conekit
