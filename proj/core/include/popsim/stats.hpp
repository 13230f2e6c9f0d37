#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "popsim/rng.hpp"

namespace popsim::stats {

/// Probability that at least one of i agents still in the initial state
/// interacts in the next step: i(2n-i-1) / (n(n-1)).
double p_leave(std::uint64_t i, std::uint64_t n);

/// Probability that a set of k agents gains a member in the next step,
/// i.e. that the interaction crosses the set boundary: 2k(n-k) / (n(n-1)).
double p_epidemic(std::uint64_t k, std::uint64_t n);

/// Independent geometric variables (support 1, 2, ...) with the listed
/// success probabilities, each in (0, 1].
class GeometricSumSpec {
 public:
  GeometricSumSpec() = default;
  explicit GeometricSumSpec(std::vector<double> probabilities);

  const std::vector<double>& probabilities() const { return p_; }
  std::size_t terms() const { return p_.size(); }

 private:
  std::vector<double> p_;
};

/// Terms p_leave(i, n) for i in {f*, f*+2, ...} up to n (or n-1 when the
/// parities differ), where f* = 2 * ceil(f / 2). Empty when f* > n.
GeometricSumSpec coupon_spec(std::uint64_t n, std::uint64_t f);

/// Terms p_epidemic(k, n) for k = first..last.
GeometricSumSpec epidemic_spec(std::uint64_t n, std::uint64_t first, std::uint64_t last);

double expected_sum(const GeometricSumSpec& spec);
double variance_sum(const GeometricSumSpec& spec);
inline double expected_coupon_sum(const GeometricSumSpec& spec) { return expected_sum(spec); }
inline double variance_coupon_sum(const GeometricSumSpec& spec) { return variance_sum(spec); }

/// Geometric(p) by inverse transform, ceil(ln U / ln(1-p)) with U in (0,1);
/// returns 1 when p == 1.
std::uint64_t sample_geometric(Rng& rng, double p);
std::uint64_t simulate_geometric_sum(Rng& rng, const GeometricSumSpec& spec);

/// Block decomposition of the influencer-growth sum: r = floor(sqrt(n)),
/// kappa = floor(ceil(n^(2/3)) / r).
struct BlockParams {
  std::uint64_t n = 0;
  std::uint64_t r = 0;
  std::uint64_t kappa = 0;
  std::uint64_t threshold = 0;  // ceil(n^(2/3))
};

BlockParams block_params(std::uint64_t n);

/// Terms of the kappa blocks S'_i = S_{ir+1,(i+1)r-1}, i < kappa, dropping
/// the tail segment beyond kappa*r.
GeometricSumSpec block_spec(const BlockParams& params);

/// sum_{i<kappa} floor((r/2) * E[X_{(i+1)r}]) with E[X_k] = 1/p_epidemic(k, n).
double block_lower_sum(const BlockParams& params);

/// floor(n^(num/den)) and ceil(n^(num/den)), exact for all inputs.
std::uint64_t floor_rational_power(std::uint64_t n, std::uint64_t num, std::uint64_t den);
std::uint64_t ceil_rational_power(std::uint64_t n, std::uint64_t num, std::uint64_t den);

struct EstimateRecord {
  std::size_t count = 0;
  double mean = 0;
  double variance = 0;  // unbiased; 0 for a single sample
  double standard_error = 0;
  double p1 = 0, p5 = 0, p25 = 0, p50 = 0, p75 = 0, p95 = 0, p99 = 0;
};

/// Percentiles use linear interpolation between order statistics.
/// Throws UsageError on empty input.
EstimateRecord summarize(std::span<const double> samples);

/// q-quantile (q in [0,1]) with linear interpolation; `sorted` ascending.
double quantile_sorted(std::span<const double> sorted, double q);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic critical value sqrt(-ln(alpha/2)/2) * sqrt((na+nb)/(na*nb)).
double ks_critical_value(double alpha, std::size_t na, std::size_t nb);

/// n-th harmonic number.
double harmonic(std::uint64_t n);

}  // namespace popsim::stats
