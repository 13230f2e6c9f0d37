#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "popsim/influence.hpp"
#include "popsim/protocols.hpp"
#include "table.hpp"

namespace popsim::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsage = 2, kBudget = 3, kInternal = 4 };

struct ExperimentConfig {
  std::string protocol = "pairwise-elimination";
  std::optional<std::string> protocol_file;
  std::vector<std::uint64_t> sizes;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> max_steps;
  std::string threshold = "n^2/3";
  unsigned jobs = 1;
  Format format = Format::Csv;
  std::optional<AgentId> agent;  // influencer: follow one agent instead of the max

  /// Throws UsageError on trials < 1, sizes < 2, or an empty size list.
  void validate() const;
};

/// Seed of trial `trial` at population size n. Depends only on
/// (seed_base, n, trial), so any row can be regenerated alone.
std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t n, std::uint64_t trial);

protocols::CatalogEntry resolve_protocol(const ExperimentConfig& config, std::size_t n);

/// One row per (n, trial): steps, parallel time and event steps.
Table run_table(const ExperimentConfig& config);

/// t_min per (n, trial) and its ratio to n ln n, then one summary row per n.
Table influencer_table(const ExperimentConfig& config);

/// leave-init steps until fewer than f(n) agents remain in the initial
/// state, then one summary row per n with the analytic geometric-sum curve.
Table coupon_table(const ExperimentConfig& config);

/// JSON report: reachable count, safe count, exact expected stabilization
/// steps. `list` adds every configuration with its safety verdict.
void exact_report(const ExperimentConfig& config, std::uint64_t budget, bool list, std::ostream& out);

enum class GraphFormat { EdgeList, Dot };

/// Writes graph H for the first t log entries followed by the backward sets
/// I_{v,t}(t), ..., I_{v,t}(0), one "I <layer> <size> <members...>" line each.
void export_graph(const InteractionLog& log, AgentId v, std::size_t t, GraphFormat format,
                  std::ostream& out);

/// Runs one trial and returns its schedule; optionally fills `series` with
/// the influencer size time series.
InteractionLog record_trial(const ExperimentConfig& config,
                            std::vector<InfluencerObserver::SeriesRow>* series = nullptr);

}  // namespace popsim::cli
