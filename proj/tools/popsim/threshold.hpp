#pragma once

#include <cstdint>
#include <string>

#include "popsim/influence.hpp"

namespace popsim::cli {

/// Threshold as a function of n. Accepted forms (whitespace ignored):
///   n^a        a rational: 2/3, (2/3), 0.5, 1
///   c*n^a      positive decimal coefficient c
///   log(n)     natural logarithm (ln(n) is a synonym), optionally c*log(n)
///   c          constant
class ThresholdExpr {
 public:
  static ThresholdExpr parse(const std::string& text);

  const std::string& text() const { return text_; }

  /// Real value at n.
  double value(std::uint64_t n) const;
  /// floor and ceil of value(n); exact for n^(p/q) and for c*n^k with integer
  /// c and k, floating point otherwise.
  std::uint64_t floor_at(std::uint64_t n) const;
  std::uint64_t ceil_at(std::uint64_t n) const;

  SizeThreshold size_threshold(std::uint64_t n) const {
    return SizeThreshold{value(n), floor_at(n)};
  }

 private:
  enum class Kind { Constant, Power, Log };

  std::string text_;
  Kind kind_ = Kind::Constant;
  double coefficient_ = 1.0;
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

}  // namespace popsim::cli
