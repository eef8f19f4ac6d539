#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conekit/indicial.hpp"
#include "conekit/link_spectrum.hpp"

namespace conekit {

// ---------------------------------------------------------------------------
// Homogeneous harmonic 1-forms on a cone of complex dimension n over a link of
// real dimension 2n - 1.

enum class FormType { I, II, III };
std::string to_string(FormType t);

struct HomogeneousHarmonicForm {
  FormType form_type = FormType::I;
  int mode_index = 0;
  double eigenvalue = 0.0;
  std::int64_t multiplicity = 1;
  // Pointwise order, |form|_{g0} ~ r^order: c- - 1, b- and a- - 1 for types
  // I, II, III. For type II this coincides with the dr-coefficient exponent.
  double order = 0.0;
  double raw_exponent = 0.0;  // c-, b- or a- of the generating mode
  std::optional<double> coefficient_B;
  std::string description;
  bool flagged = false;  // order sits on a window endpoint
};

struct ClassificationReport {
  int n_complex = 0;
  std::vector<HomogeneousHarmonicForm> forms;  // inside the window
  double bound_I = 0.0, bound_II = 0.0, bound_III = 0.0;
  bool attained_I = false, attained_II = false, attained_III = false;
  bool bounds_hold = false;   // no form exceeds its type's bound
  double max_order = 0.0;     // over all produced forms, window ignored
};

ClassificationReport classify_harmonic_one_forms(const LinkSpectrum& spec, int n_complex, Window window = {},
                                                 double gap_tol = kDefaultGapTol);

// Brute-force count of homogeneous harmonic 1-forms on flat R^{2n} \ {0} per
// integer order in [lo, hi], from exact kernels of the Laplacian on P / r^{2m}.
std::map<int, std::int64_t> enumerate_flat_harmonic_one_forms(int n_complex, int lo, int hi);

// A 1-form on R^N given by its Cartesian components.
using CartesianOneForm = std::function<std::vector<double>(const std::vector<double>&)>;

struct HarmonicResidual {
  double laplacian = 0.0;  // max |Delta form| relative to |form| / |x|^2
  double dbar = 0.0;       // (0,1)-forms only
  double dbar_star = 0.0;
  std::size_t points = 0;
};

// Concrete flat-cone representative of a classified form, built from
// Re (x1 + i x2)^i for function modes and a rotation field for coclosed modes.
CartesianOneForm realize_flat(const HomogeneousHarmonicForm& form, int n_complex);

HarmonicResidual verify_harmonic(const CartesianOneForm& form, int N, std::size_t points = 32,
                                 unsigned seed = 1);

// (0,1)-form xi1 dzb1 + xi2 dzb2 on C^2 as a callable.
using Form01Fn = std::function<std::array<std::complex<double>, 2>(std::complex<double>, std::complex<double>)>;
HarmonicResidual verify_dbar(const Form01Fn& xi, std::size_t points = 32, unsigned seed = 1);

// ---------------------------------------------------------------------------
// Exact polynomial forms on C^2 \ {0}. Variables z1, z2, zb1, zb2.

struct ComplexRational {
  Rational re;
  Rational im;
};

struct PolyTerm {
  std::array<int, 4> exponents{};  // powers of z1, z2, zb1, zb2
  ComplexRational coefficient;
};

// poly * r^{-mu}
struct RTerm {
  std::vector<PolyTerm> poly;
  Rational mu;
};
using RExpr = std::vector<RTerm>;

std::complex<double> evaluate(const RExpr& f, std::complex<double> z1, std::complex<double> z2);
std::string to_string(const RExpr& f);

struct Form01 {
  std::array<std::vector<PolyTerm>, 2> components;  // P1, P2
  int r_power = 0;                                  // form = (P1 dzb1 + P2 dzb2) / r^{r_power}
  std::array<std::complex<double>, 2> evaluate(std::complex<double> z1, std::complex<double> z2) const;
  std::string to_string() const;
  Form01Fn callable() const;
};

struct ObstructionSpace {
  int k = 0;
  int growth_rate = 0;  // -2 - k
  int dim_harmonic = 0;
  int dim_dbar_image = 0;
  std::vector<Form01> basis;          // kernel of dbar and dbar*, reduced echelon order
  std::vector<Form01> image_basis;    // dbar of decaying harmonic functions
  std::vector<Form01> quotient_basis; // antiholomorphic monomial multiples of the contact form
  bool quotient_complements_image = false;
};

ObstructionSpace obstruction_dimensions(int k, int k_max = 6);

// Real (1,1)-form sum phi_{ab} dz_a ^ dzb_b, components as sums of P r^{-mu}.
struct Form11 {
  std::array<std::array<RExpr, 2>, 2> phi;
};

Form11 add(const Form11& a, const Form11& b);
Form11 ddc_of(const RExpr& f);                              // 2i d dbar f
Form11 two_re_del(const Form01& xi, ComplexRational C);    // 2 Re(C d xi)
bool is_closed(const Form11& w);

struct DdbarExpansion {
  RExpr potential;
  // coefficients[k] lists C_{k, j}, j = 0..k-1, against quotient_basis of that k.
  std::map<int, std::vector<std::complex<double>>> coefficients;
  std::complex<double> c_minus3;            // k = 1
  std::array<std::complex<double>, 2> c_minus4{};  // k = 2
  int residual_order = 0;                   // remainder is O(r^{residual_order})
  bool reconstruction_exact = false;
  std::string note;
};

DdbarExpansion ddbar_residual_expansion(const Form11& omega, int depth = 6);

}  // namespace conekit
