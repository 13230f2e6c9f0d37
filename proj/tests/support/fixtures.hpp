#pragma once

#include <cstdint>
#include <vector>

#include "popsim/influence.hpp"
#include "popsim/rng.hpp"
#include "popsim/engine.hpp"

namespace popsim::testing {

enum Agent : AgentId { A = 0, B, C, D, E };

/// Five-agent schedule whose backward sets from (A, 6) are
/// {A},{A},{A,D},{A,D},{A,D},{A,C,D},{A,C,D,E} for layers 6..0.
inline InteractionLog five_agent_log() {
  return InteractionLog(5, {{E, C}, {C, D}, {B, E}, {B, C}, {A, D}, {B, C}});
}

inline InteractionLog random_log(Rng& rng, std::size_t n, std::size_t length) {
  InteractionLog log(n);
  for (std::size_t j = 0; j < length; ++j) log.append(sample_interaction(rng, n));
  return log;
}

inline AgentSet set_of(std::size_t n, std::initializer_list<AgentId> members) {
  AgentSet s(n);
  for (auto a : members) s.insert(a);
  return s;
}

}  // namespace popsim::testing
