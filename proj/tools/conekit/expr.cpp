#include "expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "conekit/errors.hpp"

namespace conekit::cli {

namespace {

using Fn = std::function<double(double)>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Fn parse() {
    Fn f = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return f;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Validation,
                "expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn f = term();
    while (true) {
      if (eat('+')) {
        Fn g = term();
        f = [f, g](double r) { return f(r) + g(r); };
      } else if (eat('-')) {
        Fn g = term();
        f = [f, g](double r) { return f(r) - g(r); };
      } else {
        return f;
      }
    }
  }
  Fn term() {
    Fn f = unary();
    while (true) {
      if (eat('*')) {
        Fn g = unary();
        f = [f, g](double r) { return f(r) * g(r); };
      } else if (eat('/')) {
        Fn g = unary();
        f = [f, g](double r) { return f(r) / g(r); };
      } else {
        return f;
      }
    }
  }
  Fn unary() {
    if (eat('-')) {
      Fn f = unary();
      return [f](double r) { return -f(r); };
    }
    if (eat('+')) return unary();
    return power();
  }
  Fn power() {
    Fn base = primary();
    if (eat('^')) {
      Fn ex = unary();
      return [base, ex](double r) { return std::pow(base(r), ex(r)); };
    }
    return base;
  }
  Fn primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      Fn f = expr();
      if (!eat(')')) fail("missing ')'");
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return [v](double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "r") return [](double r) { return r; };
      if (name == "pi") return [](double) { return std::numbers::pi; };
      if (name == "e") return [](double) { return std::numbers::e; };
      double (*fn)(double) = nullptr;
      if (name == "exp") fn = [](double x) { return std::exp(x); };
      if (name == "log") fn = [](double x) { return std::log(x); };
      if (name == "sqrt") fn = [](double x) { return std::sqrt(x); };
      if (name == "sin") fn = [](double x) { return std::sin(x); };
      if (name == "cos") fn = [](double x) { return std::cos(x); };
      if (name == "tan") fn = [](double x) { return std::tan(x); };
      if (name == "atan") fn = [](double x) { return std::atan(x); };
      if (name == "abs") fn = [](double x) { return std::abs(x); };
      if (!fn) fail("unknown identifier '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      Fn arg = expr();
      if (!eat(')')) fail("missing ')'");
      return [fn, arg](double r) { return fn(arg(r)); };
    }
    fail(std::string("unexpected '") + c + "'");
  }
};

}  // namespace

std::function<double(double)> parse_expression(const std::string& text) { return Parser(text).parse(); }

std::function<double(double)> load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read profile '" + path + "'");
  std::vector<double> r, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) {
      if (r.empty()) continue;  // header
      throw Error(ErrorKind::Validation, path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    if (!(a > 0.0) || (!r.empty() && a <= r.back()))
      throw Error(ErrorKind::Validation, path + ":" + std::to_string(lineno) + ": r must be positive and increasing");
    r.push_back(a);
    v.push_back(b);
  }
  if (r.size() < 2) throw Error(ErrorKind::Validation, path + ": need at least two rows");
  auto table = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>(std::move(r), std::move(v));
  return [table](double x) {
    const auto& [R, V] = *table;
    const std::size_t n = R.size();
    if (x <= R.front()) return V.front();
    if (x >= R.back()) {
      const double a = V[n - 2], b = V[n - 1];
      if (a == 0.0 || b == 0.0 || (a > 0) != (b > 0)) return x == R.back() ? b : 0.0;
      const double q = std::log(b / a) / std::log(R[n - 1] / R[n - 2]);
      return b * std::pow(x / R.back(), q);
    }
    const auto it = std::upper_bound(R.begin(), R.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - R.begin()) - 1;
    const double t = std::log(x / R[i]) / std::log(R[i + 1] / R[i]);
    return V[i] + t * (V[i + 1] - V[i]);
  };
}

std::function<double(double)> parse_profile(const std::string& text) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) return load_profile_csv(text);
  return parse_expression(text);
}

}  // namespace conekit::cli
