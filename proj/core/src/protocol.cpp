#include "popsim/protocol.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "popsim/errors.hpp"

namespace popsim {

char to_char(OutputSymbol symbol) { return symbol == OutputSymbol::Leader ? 'L' : 'F'; }

OutputSymbol output_from_char(char c) {
  switch (c) {
    case 'L':
      return OutputSymbol::Leader;
    case 'F':
      return OutputSymbol::Follower;
    default:
      throw UsageError(fmt::format("unknown output symbol '{}'", c));
  }
}

Protocol::Protocol(std::string name, std::vector<std::string> state_names, StateId initial,
                   std::vector<OutputSymbol> outputs)
    : name_(std::move(name)),
      state_names_(std::move(state_names)),
      initial_(initial),
      outputs_(std::move(outputs)) {
  if (state_names_.empty()) throw UsageError("protocol needs at least one state");
  if (outputs_.size() != state_names_.size()) {
    throw UsageError(fmt::format("protocol '{}': {} outputs for {} states", name_,
                                 outputs_.size(), state_names_.size()));
  }
  check_state(initial_);
  const auto q = num_states();
  table_.reserve(static_cast<std::size_t>(q) * q);
  for (std::uint32_t a = 0; a < q; ++a) {
    for (std::uint32_t b = 0; b < q; ++b) table_.emplace_back(StateId{a}, StateId{b});
  }
}

const std::string& Protocol::state_name(StateId s) const {
  check_state(s);
  return state_names_[s.value];
}

StateId Protocol::state_by_name(const std::string& name) const {
  auto it = std::find(state_names_.begin(), state_names_.end(), name);
  if (it == state_names_.end()) {
    throw UsageError(fmt::format("protocol '{}' has no state named '{}'", name_, name));
  }
  return StateId{static_cast<std::uint32_t>(it - state_names_.begin())};
}

void Protocol::set_rule(StateId initiator, StateId responder, StateId next_initiator,
                        StateId next_responder) {
  check_state(initiator);
  check_state(responder);
  check_state(next_initiator);
  check_state(next_responder);
  table_[static_cast<std::size_t>(initiator.value) * num_states() + responder.value] = {
      next_initiator, next_responder};
}

bool Protocol::is_identity(StateId initiator, StateId responder) const {
  return transition(initiator, responder) == StatePair{initiator, responder};
}

void Protocol::check_state(StateId s) const {
  if (s.value >= num_states()) {
    throw UsageError(
        fmt::format("state index {} out of range for protocol '{}' with {} states", s.value,
                    name_, num_states()));
  }
}

Configuration Configuration::initial(const Protocol& protocol, std::size_t n) {
  return Configuration(n, protocol.initial_state());
}

Configuration::Configuration(std::size_t n, StateId fill) : states_(n, fill) {
  if (n > 0) add_count(fill, static_cast<std::ptrdiff_t>(n));
}

Configuration::Configuration(std::vector<StateId> states) : states_(std::move(states)) {
  for (StateId s : states_) add_count(s, 1);
}

void Configuration::add_count(StateId s, std::ptrdiff_t delta) {
  if (s.value >= counts_.size()) counts_.resize(s.value + 1, 0);
  counts_[s.value] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(counts_[s.value]) + delta);
}

void Configuration::set(std::size_t agent, StateId s) {
  StateId& slot = states_.at(agent);
  if (slot == s) return;
  add_count(slot, -1);
  add_count(s, 1);
  slot = s;
}

std::size_t Configuration::count_output(const Protocol& protocol, OutputSymbol symbol) const {
  std::size_t total = 0;
  for (std::uint32_t q = 0; q < counts_.size(); ++q) {
    if (counts_[q] > 0 && protocol.output(StateId{q}) == symbol) total += counts_[q];
  }
  return total;
}

std::uint64_t Configuration::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (StateId s : states_) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= (s.value >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void validate_interaction(Interaction e, std::size_t n) {
  if (e.initiator >= n || e.responder >= n) {
    throw UsageError(fmt::format("interaction ({}, {}) out of range for n = {}", e.initiator,
                                 e.responder, n));
  }
  if (e.initiator == e.responder) {
    throw UsageError(fmt::format("interaction ({}, {}) pairs an agent with itself", e.initiator,
                                 e.responder));
  }
}

Protocol::StatePair apply_interaction_in_place(const Protocol& protocol, Configuration& config,
                                               Interaction e) {
  validate_interaction(e, config.size());
  const Protocol::StatePair before{config[e.initiator], config[e.responder]};
  const auto after = protocol.transition(before.first, before.second);
  config.set(e.initiator, after.first);
  config.set(e.responder, after.second);
  return before;
}

Configuration apply_interaction(const Protocol& protocol, const Configuration& config,
                                Interaction e) {
  Configuration next = config;
  apply_interaction_in_place(protocol, next, e);
  return next;
}

std::vector<OutputSymbol> output_vector(const Protocol& protocol, const Configuration& config) {
  std::vector<OutputSymbol> out;
  out.reserve(config.size());
  for (StateId s : config.states()) out.push_back(protocol.output(s));
  return out;
}

double parallel_time(std::uint64_t steps, std::uint64_t n) {
  if (n == 0) throw UsageError("parallel_time: n must be at least 1");
  return static_cast<double>(steps) / static_cast<double>(n);
}

}  // namespace popsim
