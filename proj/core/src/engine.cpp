#include "popsim/engine.hpp"

#include <cassert>
#include <cmath>
#include <fmt/format.h>

#include "popsim/errors.hpp"

namespace popsim {

Interaction sample_interaction(Rng& rng, std::size_t n) {
  if (n < 2) throw UsageError(fmt::format("sample_interaction: n = {} < 2", n));
  const auto u = static_cast<AgentId>(rng.uniform_below(n));
  const auto k = static_cast<AgentId>(rng.uniform_below(n - 1));
  return {u, k < u ? k : k + 1};
}

std::uint64_t default_step_budget(std::size_t n) {
  const double ln = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  const auto ceil_ln = static_cast<std::uint64_t>(std::ceil(ln));
  return 64 * static_cast<std::uint64_t>(n) * std::max<std::uint64_t>(ceil_ln, 1);
}

void EventLog::mark(const std::string& name, std::uint64_t step) { steps_.try_emplace(name, step); }

std::optional<std::uint64_t> EventLog::get(const std::string& name) const {
  if (auto it = steps_.find(name); it != steps_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::uint64_t> TrialRecord::event(const std::string& name) const {
  if (auto it = event_steps.find(name); it != event_steps.end()) return it->second;
  return std::nullopt;
}

TrialRecord run_trial(const Protocol& protocol, std::size_t n, std::uint64_t seed,
                      const TrialOptions& options) {
  if (n < 2) throw UsageError(fmt::format("run_trial: n = {} < 2", n));
  Configuration config =
      options.initial ? *options.initial : Configuration::initial(protocol, n);
  if (config.size() != n) {
    throw UsageError(fmt::format("initial configuration has {} agents, expected {}",
                                 config.size(), n));
  }
  for (StateId s : config.states()) {
    if (s.value >= protocol.num_states()) {
      throw UsageError(fmt::format("initial configuration holds invalid state {}", s.value));
    }
  }

  const std::uint64_t budget = options.max_steps.value_or(default_step_budget(n));
  Rng rng(seed);
  EventLog events;
  for (Observer* obs : options.observers) obs->on_start(config, events);

  TrialRecord record;
  record.seed = seed;
  record.n = n;

  std::uint64_t step = 0;
  bool stopped = options.stop && options.stop(0, config);
  while (!stopped && step < budget) {
    const Interaction e = sample_interaction(rng, n);
    const Protocol::StatePair before{config[e.initiator], config[e.responder]};
    const Protocol::StatePair after = protocol.transition(before.first, before.second);
    config.set(e.initiator, after.first);
    config.set(e.responder, after.second);
    assert(after.first.value < protocol.num_states() && after.second.value < protocol.num_states());
    ++step;

    const StepEvent event{step, e, before, after};
    for (Observer* obs : options.observers) obs->on_step(event, config, events);
    stopped = options.stop && options.stop(step, config);
  }
  if (stopped) events.mark(kStopEvent, step);

  record.steps_taken = step;
  record.truncated = options.stop && !stopped;
  record.event_steps = events.all();
  record.final_configuration_digest = config.digest();
  record.final_configuration = std::move(config);
  return record;
}

StateCountObserver::StateCountObserver(StateId state, std::uint64_t limit, std::string event_name)
    : state_(state), limit_(limit), event_name_(std::move(event_name)) {}

void StateCountObserver::on_start(const Configuration& initial, EventLog& events) {
  count_ = initial.count(state_);
  if (count_ < limit_) events.mark(event_name_, 0);
}

void StateCountObserver::on_step(const StepEvent& event, const Configuration&, EventLog& events) {
  count_ -= (event.before.first == state_) + (event.before.second == state_);
  count_ += (event.after.first == state_) + (event.after.second == state_);
  if (count_ < limit_) events.mark(event_name_, event.step);
}

}  // namespace popsim
