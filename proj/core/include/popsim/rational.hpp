#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace popsim {

/// Arbitrary-precision rational used by the exact solvers.
using Rational = boost::multiprecision::cpp_rational;

}  // namespace popsim
