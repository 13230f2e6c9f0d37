#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "popsim/engine.hpp"
#include "popsim/protocol.hpp"

namespace popsim::protocols {

/// Two states {leader, follower}, everyone starts as leader, and
/// (leader, leader) -> (leader, follower). All other pairs are identity.
Protocol pairwise_elimination(std::size_t n);

/// Two states {init, done}, both output F. Any interaction moves both
/// participants to done.
Protocol leave_init(std::size_t n);

/// Two states {susceptible, infected}, both output F. If either participant
/// is infected both become infected. Infection spreads in both directions,
/// so from k infected the count grows with probability 2k(n-k)/(n(n-1)).
Protocol one_way_epidemic(std::size_t n);

/// Starting configuration for the epidemic experiment: agent 0 infected,
/// all others susceptible.
Configuration epidemic_seeded(const Protocol& epidemic, std::size_t n);

/// A protocol together with the harness-level knowledge the experiments
/// need about it.
struct CatalogEntry {
  Protocol protocol;
  /// Optional non-default starting configuration, built for a given n.
  std::function<Configuration(std::size_t n)> initial;
  /// Default stop condition for `run`, if the protocol has a natural one.
  StopPredicate stop;
  /// Exact membership test for safe configurations, where known in closed
  /// form. pairwise_elimination: exactly one leader.
  std::function<bool(const Configuration&)> is_stabilized;
};

/// Names accepted by make(): "pairwise-elimination", "leave-init",
/// "one-way-epidemic".
const std::vector<std::string>& catalog_names();

/// Throws UsageError for an unknown name.
CatalogEntry make(std::string_view name, std::size_t n);

/// Wraps a loaded protocol: all-s_init start, stop when exactly one agent
/// outputs L, no closed-form safety test.
CatalogEntry from_protocol(Protocol protocol);

/// Parses a JSON protocol definition:
///   { "name": "...", "states": ["a", ...], "initial": "a",
///     "outputs": {"a": "L", ...}, "rules": [["a","b","a2","b2"], ...] }
/// Unlisted ordered pairs default to identity. Throws ProtocolLoadError on
/// unknown states, non-total outputs, duplicate rules or malformed fields.
Protocol load_protocol(std::string_view document);
Protocol load_protocol_file(const std::string& path);

/// Inverse of load_protocol; only non-identity rules are listed.
std::string to_document(const Protocol& protocol);

}  // namespace popsim::protocols
