#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"
#include "popsim/errors.hpp"
#include "popsim/exact.hpp"
#include "popsim/stats.hpp"
#include "threshold.hpp"

namespace popsim::cli {

void ExperimentConfig::validate() const {
  if (trials < 1) throw UsageError("--trials must be at least 1");
  if (sizes.empty()) throw UsageError("at least one --n is required");
  for (auto n : sizes) {
    if (n < 2) throw UsageError(fmt::format("--n must be at least 2, got {}", n));
  }
  if (jobs < 1) throw UsageError("--jobs must be at least 1");
}

std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t n, std::uint64_t trial) {
  return trial_seed(trial_seed(seed_base, n), trial);
}

protocols::CatalogEntry resolve_protocol(const ExperimentConfig& config, std::size_t n) {
  if (config.protocol_file) {
    return protocols::from_protocol(protocols::load_protocol_file(*config.protocol_file));
  }
  return protocols::make(config.protocol, n);
}

namespace {

Cell opt(std::optional<std::uint64_t> v) { return v ? Cell{*v} : Cell{}; }

double n_ln_n(std::uint64_t n) {
  return static_cast<double>(n) * std::log(static_cast<double>(n));
}

/// Marks "stabilization" at the first configuration in the catalog's
/// closed-form safe set.
class StabilizationObserver final : public Observer {
 public:
  explicit StabilizationObserver(std::function<bool(const Configuration&)> safe)
      : safe_(std::move(safe)) {}

  void on_start(const Configuration& initial, EventLog& events) override {
    if (safe_(initial)) events.mark("stabilization", 0);
  }
  void on_step(const StepEvent& event, const Configuration& config, EventLog& events) override {
    if (!done_ && safe_(config)) {
      done_ = true;
      events.mark("stabilization", event.step);
    }
  }

 private:
  std::function<bool(const Configuration&)> safe_;
  bool done_ = false;
};

std::vector<Cell> summary_cells(const stats::EstimateRecord& e) {
  return {e.count, e.mean, std::sqrt(e.variance), e.standard_error, e.p1, e.p5, e.p50, e.p95, e.p99};
}

}  // namespace

// ---------------------------------------------------------------------------

Table run_table(const ExperimentConfig& config) {
  config.validate();
  const auto threshold = ThresholdExpr::parse(config.threshold);
  Table table{"popsim.run/1",
              {"trial", "seed", "n", "steps", "parallel_time", "truncated", "stop_step",
               "stabilization_step", "t_min_step", "init_below_f_step"},
              {}};

  for (const auto n : config.sizes) {
    const auto entry = resolve_protocol(config, n);
    const bool track_influence = n <= InfluencerTable::kMaxPopulation;
    const auto f_ceil = threshold.ceil_at(n);
    auto rows = run_indexed(config.trials, config.jobs, [&](std::size_t trial) {
      const auto seed = derive_seed(config.seed, n, trial);
      StateCountObserver init_count(entry.protocol.initial_state(), f_ceil, "init_below_f");
      std::optional<InfluencerObserver> influence;
      std::optional<StabilizationObserver> stabilization;
      TrialOptions options;
      options.max_steps = config.max_steps;
      options.stop = entry.stop;
      options.observers = {&init_count};
      if (entry.initial) options.initial = entry.initial(n);
      if (track_influence) {
        influence.emplace(n, threshold.size_threshold(n));
        options.observers.push_back(&*influence);
      }
      if (entry.is_stabilized) {
        stabilization.emplace(entry.is_stabilized);
        options.observers.push_back(&*stabilization);
      }
      const auto r = run_trial(entry.protocol, n, seed, options);
      return std::vector<Cell>{static_cast<std::uint64_t>(trial),
                               seed,
                               n,
                               r.steps_taken,
                               r.parallel_time(),
                               r.truncated,
                               opt(r.event(kStopEvent)),
                               opt(r.event("stabilization")),
                               opt(r.event("t_min")),
                               opt(r.event("init_below_f"))};
    });
    for (auto& row : rows) table.add(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------

Table influencer_table(const ExperimentConfig& config) {
  config.validate();
  const auto threshold = ThresholdExpr::parse(config.threshold);
  Table table{"popsim.influencer/1",
              {"record", "n", "trial", "seed", "t_min", "ratio", "truncated", "count", "mean",
               "stddev", "stderr", "p1", "p5", "p50", "p95", "p99", "threshold",
               "single_agent_mean", "block_sum_mean", "block_lower_sum"},
              {}};

  for (const auto n : config.sizes) {
    if (n > InfluencerTable::kMaxPopulation) {
      throw UsageError(fmt::format("influencer tracking supports n <= {}", InfluencerTable::kMaxPopulation));
    }
    if (config.agent && *config.agent >= n) {
      throw UsageError(fmt::format("--agent {} out of range for n = {}", *config.agent, n));
    }
    const auto entry = resolve_protocol(config, n);
    const auto size_threshold = threshold.size_threshold(n);
    struct Outcome {
      std::uint64_t seed;
      std::optional<std::uint64_t> t_min;
    };
    const auto outcomes = run_indexed(config.trials, config.jobs, [&](std::size_t trial) {
      const auto seed = derive_seed(config.seed, n, trial);
      return Outcome{seed, first_exceed_time(entry.protocol, n, seed, size_threshold,
                                             config.max_steps, config.agent)};
    });

    std::vector<double> ratios;
    for (std::size_t trial = 0; trial < outcomes.size(); ++trial) {
      const auto& o = outcomes[trial];
      std::vector<Cell> row(table.columns.size());
      row[0] = std::string("trial");
      row[1] = n;
      row[2] = static_cast<std::uint64_t>(trial);
      row[3] = o.seed;
      row[4] = opt(o.t_min);
      row[6] = !o.t_min.has_value();
      if (o.t_min) {
        const double ratio = static_cast<double>(*o.t_min) / n_ln_n(n);
        row[5] = ratio;
        ratios.push_back(ratio);
      }
      table.add(std::move(row));
    }

    std::vector<Cell> summary(table.columns.size());
    summary[0] = std::string("summary");
    summary[1] = n;
    if (!ratios.empty()) {
      auto cells = summary_cells(stats::summarize(ratios));
      std::copy(cells.begin(), cells.end(), summary.begin() + 7);
    }
    summary[16] = size_threshold.value;
    // A single agent's set exceeds floor(threshold) after sum_{k=1..floor} X_k steps.
    if (size_threshold.floor_value >= 1 && size_threshold.floor_value < n) {
      summary[17] = stats::expected_sum(stats::epidemic_spec(n, 1, size_threshold.floor_value));
    }
    const auto blocks = stats::block_params(n);
    summary[18] = stats::expected_sum(stats::block_spec(blocks));
    summary[19] = stats::block_lower_sum(blocks);
    table.add(std::move(summary));
  }
  return table;
}

// ---------------------------------------------------------------------------

Table coupon_table(const ExperimentConfig& config) {
  config.validate();
  const auto threshold = ThresholdExpr::parse(config.threshold);
  Table table{"popsim.coupon/1",
              {"record", "n", "trial", "seed", "steps", "parallel_time", "truncated", "count",
               "mean", "stddev", "stderr", "p1", "p5", "p50", "p95", "p99", "f", "analytic_mean",
               "analytic_variance", "harmonic_bound", "fraction_below_half_mean"},
              {}};

  for (const auto n : config.sizes) {
    const auto protocol = protocols::leave_init(n);
    const auto f = std::clamp<std::uint64_t>(threshold.ceil_at(n), 1, n);
    struct Outcome {
      std::uint64_t seed;
      TrialRecord record;
    };
    const auto outcomes = run_indexed(config.trials, config.jobs, [&](std::size_t trial) {
      const auto seed = derive_seed(config.seed, n, trial);
      StateCountObserver init_count(protocol.initial_state(), f, "init_below_f");
      TrialOptions options;
      options.max_steps = config.max_steps;
      options.observers = {&init_count};
      options.stop = [&init_count, f](std::uint64_t, const Configuration&) {
        return init_count.count() < f;
      };
      return Outcome{seed, run_trial(protocol, n, seed, options)};
    });

    const auto spec = stats::coupon_spec(n, f);
    const double analytic_mean = stats::expected_coupon_sum(spec);
    double harmonic_bound = 0;
    for (std::uint64_t i = 2 * ((f + 1) / 2); i <= n; i += 2) {
      harmonic_bound += static_cast<double>(n) / (2.0 * static_cast<double>(i));
    }

    std::vector<double> steps;
    std::size_t below_half = 0;
    for (std::size_t trial = 0; trial < outcomes.size(); ++trial) {
      const auto& o = outcomes[trial];
      std::vector<Cell> row(table.columns.size());
      row[0] = std::string("trial");
      row[1] = n;
      row[2] = static_cast<std::uint64_t>(trial);
      row[3] = o.seed;
      row[4] = o.record.steps_taken;
      row[5] = o.record.parallel_time();
      row[6] = o.record.truncated;
      table.add(std::move(row));
      steps.push_back(static_cast<double>(o.record.steps_taken));
      below_half += static_cast<double>(o.record.steps_taken) < analytic_mean / 2;
    }

    std::vector<Cell> summary(table.columns.size());
    summary[0] = std::string("summary");
    summary[1] = n;
    auto cells = summary_cells(stats::summarize(steps));
    std::copy(cells.begin(), cells.end(), summary.begin() + 7);
    summary[16] = f;
    summary[17] = analytic_mean;
    summary[18] = stats::variance_coupon_sum(spec);
    summary[19] = harmonic_bound;
    summary[20] = static_cast<double>(below_half) / static_cast<double>(steps.size());
    table.add(std::move(summary));
  }
  return table;
}

// ---------------------------------------------------------------------------

void exact_report(const ExperimentConfig& config, std::uint64_t budget, bool list,
                  std::ostream& out) {
  if (config.sizes.empty()) throw UsageError("at least one --n is required");
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "popsim.exact/1";
  doc["tool"] = tool_id();
  auto& reports = doc["reports"] = ordered_json::array();

  for (const auto n : config.sizes) {
    if (n < 2) throw UsageError(fmt::format("--n must be at least 2, got {}", n));
    const auto entry = resolve_protocol(config, n);
    const auto& protocol = entry.protocol;
    const auto space = exact::enumerate_reachable(protocol, n, budget);
    const exact::SafetyChecker checker(space);

    ordered_json report;
    report["protocol"] = protocol.name();
    report["n"] = n;
    report["reachable"] = space.size();
    report["safe"] = checker.safe_count();
    try {
      const auto h = exact::expected_stabilization_steps(space);
      report["expected_steps"] = {{"exact", h.exact ? ordered_json(h.exact_string()) : ordered_json(nullptr)},
                                  {"value", h.value},
                                  {"residual", h.residual}};
      report["expected_parallel_time"] = h.value / static_cast<double>(n);
    } catch (const NonAbsorbingError& err) {
      report["expected_steps"] = nullptr;
      report["note"] = err.what();
    }

    if (list) {
      auto& configs = report["configurations"] = ordered_json::array();
      for (std::size_t i = 0; i < space.size(); ++i) {
        const auto v = checker.verdict(i);
        ordered_json c;
        c["index"] = i;
        auto& states = c["states"] = ordered_json::array();
        std::string outputs;
        for (StateId s : space.config(i).states()) {
          states.push_back(protocol.state_name(s));
          outputs += to_char(protocol.output(s));
        }
        c["outputs"] = outputs;
        c["safe"] = v.safe;
        c["reason"] = v.reason == exact::SafetyVerdict::Reason::Safe          ? "safe"
                      : v.reason == exact::SafetyVerdict::Reason::LeaderCount ? "leader_count"
                                                                              : "output_change";
        if (v.changed_agent) {
          auto& path = c["witness"] = ordered_json::array();
          for (const auto& e : v.witness_path) path.push_back({e.initiator, e.responder});
          c["changed_agent"] = *v.changed_agent;
        }
        configs.push_back(std::move(c));
      }
    }
    reports.push_back(std::move(report));
  }
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

void export_graph(const InteractionLog& log, AgentId v, std::size_t t, GraphFormat format,
                  std::ostream& out) {
  if (t > log.length()) {
    throw UsageError(fmt::format("--step {} exceeds log length {}", t, log.length()));
  }
  if (v >= log.population()) {
    throw UsageError(fmt::format("--agent {} out of range for n = {}", v, log.population()));
  }
  const auto graph = build_graph_h(log, t);
  const auto layers = backward_sets(log, v, t);
  const char* comment = format == GraphFormat::Dot ? "//" : "#";

  if (format == GraphFormat::Dot) {
    graph.write_dot(out, LayeredGraph::Node{v, t});
  } else {
    fmt::print(out, "# graph H n={} t={}\n", log.population(), t);
    graph.write_edge_list(out);
  }
  fmt::print(out, "{} backward agent={} step={}\n", comment, v, t);
  for (std::size_t i = t + 1; i-- > 0;) {
    fmt::print(out, "{}I {} {}", format == GraphFormat::Dot ? "// " : "", i, layers[i].size());
    for (auto a : layers[i].members()) fmt::print(out, " {}", a);
    out << '\n';
  }
}

InteractionLog record_trial(const ExperimentConfig& config,
                            std::vector<InfluencerObserver::SeriesRow>* series) {
  config.validate();
  const auto n = config.sizes.front();
  const auto entry = resolve_protocol(config, n);
  const auto threshold = ThresholdExpr::parse(config.threshold);
  ScheduleRecorder recorder;
  std::optional<InfluencerObserver> influence;
  TrialOptions options;
  options.max_steps = config.max_steps;
  options.stop = entry.stop;
  options.observers = {&recorder};
  if (entry.initial) options.initial = entry.initial(n);
  if (series) {
    influence.emplace(n, threshold.size_threshold(n), "t_min", true);
    options.observers.push_back(&*influence);
  }
  run_trial(entry.protocol, n, derive_seed(config.seed, n, 0), options);
  if (series) *series = influence->series();
  return InteractionLog(n, recorder.schedule());
}

}  // namespace popsim::cli
