#include "threshold.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <fmt/format.h>

#include "popsim/errors.hpp"
#include "popsim/stats.hpp"

namespace popsim::cli {

namespace {

[[noreturn]] void bad(const std::string& text, const char* why) {
  throw UsageError(fmt::format("invalid threshold '{}': {}", text, why));
}

// Parses a non-negative decimal into num/den.
bool parse_decimal(std::string_view s, std::uint64_t& num, std::uint64_t& den) {
  if (s.empty()) return false;
  num = 0;
  den = 1;
  bool dot = false, digit = false;
  for (char c : s) {
    if (c == '.') {
      if (dot) return false;
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      if (num > 1'000'000'000'000ULL) return false;
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
      if (dot) den *= 10;
      digit = true;
    } else {
      return false;
    }
  }
  return digit;
}

bool parse_rational(std::string_view s, std::uint64_t& num, std::uint64_t& den) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s, num, den);
  std::uint64_t n1, d1, n2, d2;
  if (!parse_decimal(s.substr(0, slash), n1, d1) || !parse_decimal(s.substr(slash + 1), n2, d2)) {
    return false;
  }
  if (n2 == 0) return false;
  num = n1 * d2;
  den = d1 * n2;
  return true;
}

}  // namespace

ThresholdExpr ThresholdExpr::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) bad(text, "empty");

  ThresholdExpr expr;
  expr.text_ = s;

  std::string_view body = s;
  if (const auto star = body.find('*'); star != std::string_view::npos) {
    std::uint64_t cn, cd;
    if (!parse_decimal(body.substr(0, star), cn, cd) || cn == 0) bad(text, "bad coefficient");
    expr.coefficient_ = static_cast<double>(cn) / static_cast<double>(cd);
    body = body.substr(star + 1);
  }

  if (body == "log(n)" || body == "ln(n)") {
    expr.kind_ = Kind::Log;
  } else if (body == "n") {
    expr.kind_ = Kind::Power;
    expr.num_ = expr.den_ = 1;
  } else if (body.rfind("n^", 0) == 0) {
    expr.kind_ = Kind::Power;
    if (!parse_rational(body.substr(2), expr.num_, expr.den_)) bad(text, "bad exponent");
    const auto g = std::gcd(expr.num_, expr.den_);
    if (g > 0) {
      expr.num_ /= g;
      expr.den_ /= g;
    }
  } else {
    if (s.find('*') != std::string::npos) bad(text, "unsupported form");
    std::uint64_t cn, cd;
    if (!parse_decimal(body, cn, cd)) bad(text, "unsupported form");
    expr.kind_ = Kind::Constant;
    expr.coefficient_ = static_cast<double>(cn) / static_cast<double>(cd);
  }
  return expr;
}

double ThresholdExpr::value(std::uint64_t n) const {
  switch (kind_) {
    case Kind::Constant:
      return coefficient_;
    case Kind::Log:
      return coefficient_ * std::log(static_cast<double>(n));
    case Kind::Power:
      return coefficient_ *
             std::pow(static_cast<double>(n), static_cast<double>(num_) / static_cast<double>(den_));
  }
  return 0;
}

std::uint64_t ThresholdExpr::floor_at(std::uint64_t n) const {
  const bool integer_coefficient = coefficient_ == std::floor(coefficient_);
  if (kind_ == Kind::Power && coefficient_ == 1.0) return stats::floor_rational_power(n, num_, den_);
  if (kind_ == Kind::Power && integer_coefficient && den_ == 1) {
    return static_cast<std::uint64_t>(coefficient_) * stats::floor_rational_power(n, num_, 1);
  }
  return static_cast<std::uint64_t>(std::max(0.0, std::floor(value(n))));
}

std::uint64_t ThresholdExpr::ceil_at(std::uint64_t n) const {
  if (kind_ == Kind::Power && coefficient_ == 1.0) return stats::ceil_rational_power(n, num_, den_);
  const auto lo = floor_at(n);
  return static_cast<double>(lo) == value(n) ? lo : lo + 1;
}

}  // namespace popsim::cli
