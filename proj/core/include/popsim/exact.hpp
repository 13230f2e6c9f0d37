#pragma once

// Exhaustive analysis of tiny populations.
//
// Safety is defined over arbitrary infinite schedules, but outputs depend
// only on the current configuration, so "no agent changes its output along
// any schedule from C" is equivalent to "every configuration reachable from
// C has the same per-agent output vector as C". Reachability over a finite
// space decides that exactly.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "popsim/protocol.hpp"
#include "popsim/rational.hpp"

namespace popsim::exact {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// Reads POPSIM_BUDGET, falling back to kDefaultBudget. Throws UsageError if
/// the variable is set but not a positive integer.
std::uint64_t budget_from_environment();

/// All configurations reachable from all-s_init, stored as per-agent vectors.
class ConfigurationSpace {
 public:
  const Protocol& protocol() const { return protocol_; }
  std::size_t population() const { return n_; }
  std::size_t size() const { return configs_.size(); }
  /// Index 0 is the all-s_init configuration.
  const Configuration& config(std::size_t index) const { return configs_[index]; }
  std::optional<std::size_t> index_of(const Configuration& config) const;

  /// Interactions in the fixed order used for successor lists: initiator
  /// major, responder minor, skipping u == v.
  const std::vector<Interaction>& interactions() const { return interactions_; }
  /// successors(i)[k] is the index reached from config i by interactions()[k].
  const std::vector<std::uint32_t>& successors(std::size_t index) const { return succ_[index]; }

 private:
  friend ConfigurationSpace enumerate_reachable(const Protocol&, std::size_t, std::uint64_t);
  ConfigurationSpace(const Protocol& protocol, std::size_t n) : protocol_(protocol), n_(n) {}

  std::uint64_t encode(const Configuration& config) const;

  Protocol protocol_;
  std::size_t n_;
  std::vector<Configuration> configs_;
  std::vector<Interaction> interactions_;
  std::vector<std::vector<std::uint32_t>> succ_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;  // mixed-radix code -> index
};

/// Breadth-first closure from all-s_init. Throws ResourceError when
/// |Q|^n exceeds `budget`, and UsageError when n < 2.
ConfigurationSpace enumerate_reachable(const Protocol& protocol, std::size_t n,
                                       std::uint64_t budget = kDefaultBudget);

struct SafetyVerdict {
  enum class Reason { Safe, LeaderCount, OutputChange };

  bool safe = false;
  Reason reason = Reason::LeaderCount;
  std::size_t leader_count = 0;
  /// For Reason::OutputChange: interactions leading from the configuration to
  /// one where `changed_agent` outputs something different.
  std::vector<Interaction> witness_path;
  std::optional<AgentId> changed_agent;
};

/// Classifies every configuration of a space once; queries are then O(1)
/// except for witness construction, which is a BFS from the queried node.
class SafetyChecker {
 public:
  explicit SafetyChecker(const ConfigurationSpace& space);

  bool is_safe(std::size_t index) const;
  /// True when no configuration reachable from `index` changes any agent's
  /// output (clause (b) of safety alone).
  bool outputs_frozen(std::size_t index) const { return frozen_[index]; }
  SafetyVerdict verdict(std::size_t index) const;
  std::size_t safe_count() const;

 private:
  const ConfigurationSpace* space_;
  std::vector<bool> frozen_;
  std::vector<std::size_t> leaders_;
};

/// Verdict for a configuration of the space; throws UsageError if absent.
SafetyVerdict is_safe(const ConfigurationSpace& space, const Configuration& config);

struct HittingTime {
  std::optional<Rational> exact;  // set when the rational solve was used
  double value = 0;
  double residual = 0;  // max-norm residual of the floating solve, 0 if exact

  std::string exact_string() const;
};

using TargetPredicate = std::function<bool(std::size_t index, const Configuration& config)>;

struct HittingOptions {
  /// Largest number of transient configurations solved with rationals;
  /// bigger systems use double-precision LU.
  std::size_t exact_limit = 400;
};

/// Expected number of steps from all-s_init until the first configuration
/// satisfying `target`. Solves h(C) = 0 on targets and
/// h(C) = 1 + (1/(n(n-1))) * sum_e h(succ_e(C)) elsewhere. Throws
/// NonAbsorbingError if some reachable configuration cannot reach a target.
HittingTime expected_hitting_steps(const ConfigurationSpace& space, const TargetPredicate& target,
                                   const HittingOptions& options = {});

/// Expected steps to the safe set.
HittingTime expected_stabilization_steps(const ConfigurationSpace& space,
                                         const HittingOptions& options = {});

/// n(n-1) * sum_{k=2..n} 1/(k(k-1)), which telescopes to (n-1)^2.
double closed_form_pairwise(std::size_t n);

}  // namespace popsim::exact
