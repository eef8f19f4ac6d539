#pragma once

#include <functional>
#include <vector>

namespace conekit {

// Tensor-product rule on the unit sphere S^{N-1} in R^N, exact for
// polynomials of degree below about m: per polar angle Gauss-Legendre in
// cos theta (odd sine power) or a full-circle trapezoid (even sine power),
// trapezoid with 2m nodes in the azimuth.
struct SphereRule {
  int ambient_dim = 0;
  int m = 0;
  std::vector<std::vector<double>> nodes;  // unit vectors
  std::vector<double> weights;
  double total_weight() const;
};

SphereRule sphere_rule(int N, int m);

struct SphereIntegral {
  double value = 0.0;
  double error = 0.0;  // |I(m') - I(m)| for the last two levels
  int m = 0;           // polar nodes of the accepted rule
};

// Integration of f over the sphere of radius r (surface measure r^{N-1} dA)
// with m growing by half per level from m0 (0 picks the smallest rule exact on
// constants with at least 64 nodes). Throws QuadratureNonconvergence if the
// relative difference of successive levels stays above tol at m_max or the
// node budget.
using SphereIntegrand = std::function<double(const std::vector<double>& x)>;
SphereIntegral integrate_sphere(int N, double r, const SphereIntegrand& f, double tol = 1e-10, int m0 = 0,
                                int m_max = 64);

double sphere_volume_closed_form(int N);  // Vol(S^{N-1}) = 2 pi^{N/2} / Gamma(N/2)

}  // namespace conekit
