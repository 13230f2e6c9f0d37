#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popsim/protocol.hpp"
#include "popsim/rng.hpp"

namespace popsim {

/// Draws an ordered pair of distinct agents uniformly among the n(n-1)
/// possibilities: u uniform in [0,n), k uniform in [0,n-1), v = k < u ? k : k+1.
Interaction sample_interaction(Rng& rng, std::size_t n);

/// Default step budget 64 * n * ceil(ln n).
std::uint64_t default_step_budget(std::size_t n);

/// Named first-occurrence event steps for one trial.
class EventLog {
 public:
  /// Records `step` under `name` unless the event already happened.
  void mark(const std::string& name, std::uint64_t step);
  std::optional<std::uint64_t> get(const std::string& name) const;
  const std::map<std::string, std::uint64_t>& all() const { return steps_; }

 private:
  std::map<std::string, std::uint64_t> steps_;
};

/// Post-application notification delivered to observers.
struct StepEvent {
  std::uint64_t step;  // number of interactions applied so far (>= 1)
  Interaction interaction;
  Protocol::StatePair before;
  Protocol::StatePair after;
};

class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_start(const Configuration& initial, EventLog& events) {
    (void)initial;
    (void)events;
  }
  virtual void on_step(const StepEvent& event, const Configuration& config, EventLog& events) = 0;
};

using StopPredicate = std::function<bool(std::uint64_t step, const Configuration& config)>;

struct TrialOptions {
  std::optional<std::uint64_t> max_steps;  // default_step_budget(n) when unset
  StopPredicate stop;                      // never stops early when empty
  std::vector<Observer*> observers;        // borrowed; notified in order
  /// Starting configuration override. Executions start from all-s_init
  /// unless an experiment explicitly seeds something else (e.g. one
  /// infected agent for the epidemic).
  std::optional<Configuration> initial;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::uint64_t steps_taken = 0;
  bool truncated = false;  // budget reached without the stop predicate firing
  std::map<std::string, std::uint64_t> event_steps;
  std::uint64_t final_configuration_digest = 0;
  Configuration final_configuration;

  double parallel_time() const { return popsim::parallel_time(steps_taken, n); }
  std::optional<std::uint64_t> event(const std::string& name) const;
};

/// Name of the event recorded when the stop predicate fires.
inline constexpr const char* kStopEvent = "stop";

/// Executes one trial: from the initial configuration, repeatedly samples a
/// uniformly random interaction, applies it and notifies observers, until
/// the stop predicate holds (checked before the first step too) or the step
/// budget is exhausted.
TrialRecord run_trial(const Protocol& protocol, std::size_t n, std::uint64_t seed,
                      const TrialOptions& options = {});

/// Runs fn(0..count-1) on up to `jobs` threads and returns results in index
/// order. fn must be safe to call concurrently for distinct indices.
template <typename Fn>
auto run_indexed(std::size_t count, unsigned jobs, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))>;

/// Records every applied interaction.
class ScheduleRecorder final : public Observer {
 public:
  void on_step(const StepEvent& event, const Configuration&, EventLog&) override {
    schedule_.push_back(event.interaction);
  }
  const std::vector<Interaction>& schedule() const { return schedule_; }

 private:
  std::vector<Interaction> schedule_;
};

/// Tracks how many agents hold a given state and marks `event_name` the
/// first time the count drops strictly below `limit`.
class StateCountObserver final : public Observer {
 public:
  StateCountObserver(StateId state, std::uint64_t limit, std::string event_name);

  void on_start(const Configuration& initial, EventLog& events) override;
  void on_step(const StepEvent& event, const Configuration& config, EventLog& events) override;

  std::uint64_t count() const { return count_; }

 private:
  StateId state_;
  std::uint64_t limit_;
  std::string event_name_;
  std::uint64_t count_ = 0;
};

}  // namespace popsim

#include "popsim/detail/run_indexed.hpp"
