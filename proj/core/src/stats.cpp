#include "popsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "popsim/errors.hpp"

namespace popsim::stats {

double p_leave(std::uint64_t i, std::uint64_t n) {
  if (n < 2 || i > n) throw UsageError(fmt::format("p_leave: need 0 <= i <= n, n >= 2 (i={}, n={})", i, n));
  const double num = static_cast<double>(i) * static_cast<double>(2 * n - i - 1);
  return i == 0 ? 0.0 : num / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double p_epidemic(std::uint64_t k, std::uint64_t n) {
  if (n < 2 || k < 1 || k > n) {
    throw UsageError(fmt::format("p_epidemic: need 1 <= k <= n, n >= 2 (k={}, n={})", k, n));
  }
  return 2.0 * static_cast<double>(k) * static_cast<double>(n - k) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

GeometricSumSpec::GeometricSumSpec(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  for (double p : p_) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw UsageError(fmt::format("geometric success probability {} outside (0, 1]", p));
    }
  }
}

GeometricSumSpec coupon_spec(std::uint64_t n, std::uint64_t f) {
  if (f < 1 || f > n) throw UsageError(fmt::format("coupon_spec: need 1 <= f <= n (f={}, n={})", f, n));
  const std::uint64_t f_star = 2 * ((f + 1) / 2);
  std::vector<double> p;
  for (std::uint64_t i = f_star; i <= n; i += 2) p.push_back(p_leave(i, n));
  return GeometricSumSpec(std::move(p));
}

GeometricSumSpec epidemic_spec(std::uint64_t n, std::uint64_t first, std::uint64_t last) {
  std::vector<double> p;
  for (std::uint64_t k = first; k <= last; ++k) p.push_back(p_epidemic(k, n));
  return GeometricSumSpec(std::move(p));
}

double expected_sum(const GeometricSumSpec& spec) {
  double total = 0.0;
  for (double p : spec.probabilities()) total += 1.0 / p;
  return total;
}

double variance_sum(const GeometricSumSpec& spec) {
  double total = 0.0;
  for (double p : spec.probabilities()) total += (1.0 - p) / (p * p);
  return total;
}

std::uint64_t sample_geometric(Rng& rng, double p) {
  if (p >= 1.0) return 1;
  const double u = rng.uniform_open01();
  return static_cast<std::uint64_t>(std::ceil(std::log(u) / std::log1p(-p)));
}

std::uint64_t simulate_geometric_sum(Rng& rng, const GeometricSumSpec& spec) {
  std::uint64_t total = 0;
  for (double p : spec.probabilities()) total += sample_geometric(rng, p);
  return total;
}

// ---------------------------------------------------------------------------

namespace {

using boost::multiprecision::cpp_int;

cpp_int power(cpp_int base, std::uint64_t exp) {
  cpp_int result = 1;
  while (exp > 0) {
    if (exp & 1U) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

}  // namespace

std::uint64_t floor_rational_power(std::uint64_t n, std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw UsageError("floor_rational_power: zero denominator");
  const cpp_int target = power(cpp_int(n), num);
  auto guess = static_cast<std::uint64_t>(
      std::floor(std::pow(static_cast<double>(n), static_cast<double>(num) / static_cast<double>(den))));
  // Correct the floating estimate against the exact integer comparison.
  while (guess > 0 && power(cpp_int(guess), den) > target) --guess;
  while (power(cpp_int(guess + 1), den) <= target) ++guess;
  return guess;
}

std::uint64_t ceil_rational_power(std::uint64_t n, std::uint64_t num, std::uint64_t den) {
  const std::uint64_t lo = floor_rational_power(n, num, den);
  return power(cpp_int(lo), den) == power(cpp_int(n), num) ? lo : lo + 1;
}

BlockParams block_params(std::uint64_t n) {
  if (n < 1) throw UsageError("block_params: n must be at least 1");
  BlockParams b;
  b.n = n;
  b.r = floor_rational_power(n, 1, 2);
  b.threshold = ceil_rational_power(n, 2, 3);
  b.kappa = b.threshold / b.r;
  return b;
}

GeometricSumSpec block_spec(const BlockParams& params) {
  std::vector<double> p;
  for (std::uint64_t i = 0; i < params.kappa; ++i) {
    for (std::uint64_t k = i * params.r + 1; k + 1 <= (i + 1) * params.r; ++k) {
      p.push_back(p_epidemic(k, params.n));
    }
  }
  return GeometricSumSpec(std::move(p));
}

double block_lower_sum(const BlockParams& params) {
  double total = 0.0;
  const double half_r = static_cast<double>(params.r) / 2.0;
  for (std::uint64_t i = 0; i < params.kappa; ++i) {
    total += std::floor(half_r / p_epidemic((i + 1) * params.r, params.n));
  }
  return total;
}

// ---------------------------------------------------------------------------

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw UsageError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

EstimateRecord summarize(std::span<const double> samples) {
  if (samples.empty()) throw UsageError("summarize: no samples");
  EstimateRecord r;
  r.count = samples.size();
  r.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(r.count);
  if (r.count > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - r.mean) * (x - r.mean);
    r.variance = ss / static_cast<double>(r.count - 1);
  }
  r.standard_error = std::sqrt(r.variance / static_cast<double>(r.count));

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  r.p1 = quantile_sorted(sorted, 0.01);
  r.p5 = quantile_sorted(sorted, 0.05);
  r.p25 = quantile_sorted(sorted, 0.25);
  r.p50 = quantile_sorted(sorted, 0.50);
  r.p75 = quantile_sorted(sorted, 0.75);
  r.p95 = quantile_sorted(sorted, 0.95);
  r.p99 = quantile_sorted(sorted, 0.99);
  return r;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw UsageError("ks_statistic: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                             static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t na, std::size_t nb) {
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const auto a = static_cast<double>(na);
  const auto b = static_cast<double>(nb);
  return c * std::sqrt((a + b) / (a * b));
}

double harmonic(std::uint64_t n) {
  double h = 0.0;
  for (std::uint64_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

}  // namespace popsim::stats
