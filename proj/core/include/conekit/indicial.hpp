#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conekit/link_spectrum.hpp"

namespace conekit {

enum class SetLabel { A, B, C, D };
enum class Branch { Plus, Minus };

char label_char(SetLabel label);
SetLabel parse_set_label(const std::string& s);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return double(num) / double(den); }
};

// Best rational approximation with denominator <= max_den, accepted only
// when it reproduces x to within a few ulps.
std::optional<Rational> detect_rational(double x, std::int64_t max_den = 1000000);

// q0 + sign * sqrt(radicand) with rational q0 and radicand.
struct ExactOrder {
  bool exact = false;
  Rational q0;
  Rational radicand;
  int sign = 1;
  bool radicand_is_square = false;
  Rational root;  // sqrt(radicand) when it is a perfect square
  std::string to_string() const;
  double value() const;
};

struct ExceptionalEntry {
  double order = 0.0;  // root + shift
  double root = 0.0;   // raw indicial root
  double shift = 0.0;  // -1 for A and C, 0 for B and D
  int mode_index = 0;
  Branch branch = Branch::Plus;
  double source_eigenvalue = 0.0;
  bool log_case = false;
  ExactOrder exact;
};

struct ExceptionalSet {
  SetLabel label = SetLabel::D;
  int cone_dim = 0;
  std::vector<ExceptionalEntry> entries;

  std::vector<double> orders() const;
};

struct Window {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Indicial roots (minus, plus) of one mode; the radicand must be >= 0.
std::pair<double, double> indicial_roots(SetLabel label, int n, double eigenvalue);
// Sum root(+) + root(-) for the given set.
double branch_sum(SetLabel label, int n);

ExceptionalSet compute_A(const LinkSpectrum& spec, int n, Window window = {});
ExceptionalSet compute_B(const LinkSpectrum& spec, int n, Window window = {});
ExceptionalSet compute_C(const LinkSpectrum& spec, int n, Window window = {});
ExceptionalSet compute_D(const LinkSpectrum& spec, int n, Window window = {});
ExceptionalSet compute_set(SetLabel label, const LinkSpectrum& spec, int n, Window window = {});

struct ExceptionalHit {
  bool exceptional = false;
  double distance = std::numeric_limits<double>::infinity();
  std::optional<ExceptionalEntry> nearest;
};

constexpr double kDefaultGapTol = 1e-6;

ExceptionalHit is_exceptional(double rate, const ExceptionalSet& set, double gap_tol = kDefaultGapTol);

}  // namespace conekit
