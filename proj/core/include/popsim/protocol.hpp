#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace popsim {

/// Index of an agent state, meaningful only relative to one Protocol.
struct StateId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const StateId&) const = default;
};

/// Leader election output alphabet.
enum class OutputSymbol : std::uint8_t { Leader, Follower };

char to_char(OutputSymbol symbol);
OutputSymbol output_from_char(char c);

/// A population protocol: finite state set, initial state, a total
/// transition function on ordered (initiator, responder) state pairs, and an
/// output map. Immutable once built; safe to share across threads.
class Protocol {
 public:
  using StatePair = std::pair<StateId, StateId>;

  /// Builds an identity-transition protocol. Rules are added with
  /// set_rule() before the value is shared.
  Protocol(std::string name, std::vector<std::string> state_names, StateId initial,
           std::vector<OutputSymbol> outputs);

  const std::string& name() const { return name_; }
  std::uint32_t num_states() const { return static_cast<std::uint32_t>(state_names_.size()); }
  StateId initial_state() const { return initial_; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::string& state_name(StateId s) const;
  /// Throws UsageError if `name` is not a declared state.
  StateId state_by_name(const std::string& name) const;

  StatePair transition(StateId initiator, StateId responder) const {
    return table_[static_cast<std::size_t>(initiator.value) * num_states() + responder.value];
  }
  OutputSymbol output(StateId s) const { return outputs_[s.value]; }

  void set_rule(StateId initiator, StateId responder, StateId next_initiator,
                StateId next_responder);
  /// True when the pair maps to itself.
  bool is_identity(StateId initiator, StateId responder) const;

 private:
  void check_state(StateId s) const;

  std::string name_;
  std::vector<std::string> state_names_;
  StateId initial_;
  std::vector<OutputSymbol> outputs_;
  std::vector<StatePair> table_;  // dense |Q| x |Q|, row = initiator
};

using AgentId = std::uint32_t;

/// Ordered interaction (initiator, responder) between distinct agents.
struct Interaction {
  AgentId initiator = 0;
  AgentId responder = 0;

  constexpr bool operator==(const Interaction&) const = default;
  constexpr bool involves(AgentId a) const { return initiator == a || responder == a; }
};

/// Agent-indexed state vector. Agent indices are harness handles only.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::size_t n, StateId fill);
  explicit Configuration(std::vector<StateId> states);

  /// The configuration in which every agent holds the protocol's initial state.
  static Configuration initial(const Protocol& protocol, std::size_t n);

  std::size_t size() const { return states_.size(); }
  StateId operator[](std::size_t agent) const { return states_[agent]; }
  void set(std::size_t agent, StateId s);
  const std::vector<StateId>& states() const { return states_; }

  /// O(1): per-state counts are maintained by set().
  std::size_t count(StateId s) const { return s.value < counts_.size() ? counts_[s.value] : 0; }
  /// O(|Q|).
  std::size_t count_output(const Protocol& protocol, OutputSymbol symbol) const;

  /// FNV-1a over the little-endian 32-bit state indices. Stable across
  /// platforms; used to fingerprint final configurations.
  std::uint64_t digest() const;

  bool operator==(const Configuration& other) const { return states_ == other.states_; }

 private:
  void add_count(StateId s, std::ptrdiff_t delta);

  std::vector<StateId> states_;
  std::vector<std::size_t> counts_;
};

/// Returns a copy of `config` after applying `e`.
Configuration apply_interaction(const Protocol& protocol, const Configuration& config,
                                Interaction e);

/// In-place variant: updates only the two participants and returns their
/// previous states.
Protocol::StatePair apply_interaction_in_place(const Protocol& protocol, Configuration& config,
                                               Interaction e);

/// Checks that `e` is a valid interaction for a population of size n.
void validate_interaction(Interaction e, std::size_t n);

std::vector<OutputSymbol> output_vector(const Protocol& protocol, const Configuration& config);

/// Steps divided by population size.
double parallel_time(std::uint64_t steps, std::uint64_t n);

}  // namespace popsim
