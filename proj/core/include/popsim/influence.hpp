#pragma once

// Influencer sets and the layered interaction graph.
//
// Indexing convention used throughout: entry j of an InteractionLog is the
// interaction applied at step j, i.e. it takes the population from step j
// to step j + 1. Forward sets satisfy
//   F(v, j+1) = F(v, j) ∪ F(u, j)   when log[j] pairs u and v,
// and the layered graph has cross edges between layers j and j + 1 for
// log[j]. A backward set I_{v,t}(i) is the set of agents u such that (v, t)
// is reachable from (u, i) in that graph.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popsim/engine.hpp"
#include "popsim/protocol.hpp"

namespace popsim {

/// Dense bitset over agents [0, n).
class AgentSet {
 public:
  AgentSet() = default;
  explicit AgentSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
  static AgentSet singleton(std::size_t n, AgentId a);

  std::size_t universe() const { return n_; }
  bool contains(AgentId a) const { return (words_[a >> 6] >> (a & 63)) & 1U; }
  void insert(AgentId a) { words_[a >> 6] |= std::uint64_t{1} << (a & 63); }
  std::size_t size() const;
  std::vector<AgentId> members() const;
  AgentSet& operator|=(const AgentSet& other);

  bool operator==(const AgentSet&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Append-only recorded schedule for a population of size n.
class InteractionLog {
 public:
  explicit InteractionLog(std::size_t n);
  InteractionLog(std::size_t n, std::vector<Interaction> entries);

  std::size_t population() const { return n_; }
  std::size_t length() const { return entries_.size(); }
  const std::vector<Interaction>& entries() const { return entries_; }
  const Interaction& operator[](std::size_t j) const { return entries_[j]; }

  void append(Interaction e);

  bool operator==(const InteractionLog&) const = default;

 private:
  std::size_t n_;
  std::vector<Interaction> entries_;
};

/// Text log format:
///   line 1: "popsim-log 1"
///   line 2: "n <population size>"
///   then one "<initiator> <responder>" line per interaction, in step order.
/// Lines are '\n'-terminated, fields separated by a single space, indices in
/// decimal. Blank lines and lines starting with '#' are ignored on read.
void write_log(std::ostream& out, const InteractionLog& log);
InteractionLog read_log(std::istream& in);

/// Forward influencer sets F(v, step) for every agent, one dense bitset row
/// per agent. Memory is n * ceil(n/64) words.
class InfluencerTable {
 public:
  /// Largest population the dense table accepts.
  static constexpr std::size_t kMaxPopulation = std::size_t{1} << 17;

  explicit InfluencerTable(std::size_t n);

  std::size_t population() const { return n_; }
  std::uint64_t step() const { return step_; }
  std::size_t size(AgentId v) const { return sizes_[v]; }
  bool contains(AgentId v, AgentId u) const;
  AgentSet set(AgentId v) const;

  /// Applies interaction `e` as the step-th schedule entry: both
  /// participants' sets become the union of the two.
  void forward_update(Interaction e);

 private:
  std::span<std::uint64_t> row(AgentId v);
  std::span<const std::uint64_t> row(AgentId v) const;

  std::size_t n_;
  std::size_t words_;
  std::uint64_t step_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint32_t> sizes_;
};

/// Replays the first t entries of `log` from F(v, 0) = {v}.
InfluencerTable replay_forward(const InteractionLog& log, std::size_t t);

/// Backward sets I_{v,t}(i) for i = 0..t, indexed by layer: result[i] is
/// I_{v,t}(i), result[t] = {v}, result[0] = F(v, t).
std::vector<AgentSet> backward_sets(const InteractionLog& log, AgentId v, std::size_t t);

/// Integer-valued strict threshold: a size s exceeds it when s > floor_value.
/// For integer sizes, s > x holds exactly when s > floor(x).
struct SizeThreshold {
  double value = 0;
  std::uint64_t floor_value = 0;

  bool exceeded_by(std::uint64_t size) const { return size > floor_value; }
};

/// Tracks F(v, t) during a trial and marks `event_name` at the first step
/// where some agent's influencer set is strictly larger than the threshold.
/// Only the two participants are checked each step; nobody else changed.
/// With a watched agent, only that agent's set counts toward the event.
class InfluencerObserver final : public Observer {
 public:
  struct SeriesRow {
    std::uint64_t step;
    std::size_t max_size;
    std::size_t initiator_size;
    std::size_t responder_size;
  };

  InfluencerObserver(std::size_t n, SizeThreshold threshold, std::string event_name = "t_min",
                     bool record_series = false, std::optional<AgentId> watched = std::nullopt);

  void on_step(const StepEvent& event, const Configuration& config, EventLog& events) override;

  const InfluencerTable& table() const { return table_; }
  std::size_t max_size() const { return max_size_; }
  bool reached() const { return reached_; }
  const std::vector<SeriesRow>& series() const { return series_; }

 private:
  InfluencerTable table_;
  SizeThreshold threshold_;
  std::string event_name_;
  bool record_series_;
  std::optional<AgentId> watched_;
  bool reached_ = false;
  std::size_t max_size_ = 1;
  std::vector<SeriesRow> series_;
};

/// CSV with header "step,max_size,initiator_size,responder_size".
void write_series_csv(std::ostream& out, std::span<const InfluencerObserver::SeriesRow> rows);

/// First step at which some agent's influencer set (or only `watched`'s)
/// exceeds the threshold in a fresh trial of `protocol`, or nullopt if the
/// step budget runs out.
std::optional<std::uint64_t> first_exceed_time(const Protocol& protocol, std::size_t n,
                                               std::uint64_t seed, SizeThreshold threshold,
                                               std::optional<std::uint64_t> max_steps = {},
                                               std::optional<AgentId> watched = {});

/// The layered digraph over nodes (agent, layer), layers 0..depth.
class LayeredGraph {
 public:
  struct Node {
    AgentId agent;
    std::size_t layer;
    bool operator==(const Node&) const = default;
  };
  struct Edge {
    Node from;
    Node to;
    bool operator==(const Edge&) const = default;
  };

  LayeredGraph(const InteractionLog& log, std::size_t depth);

  std::size_t population() const { return n_; }
  std::size_t depth() const { return depth_; }
  std::size_t node_count() const { return n_ * (depth_ + 1); }
  /// Vertical edges first within each layer, then the two cross edges.
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t out_degree(Node node) const;

  /// Agents u at layer `layer` from which `target` is reachable.
  AgentSet sources_reaching(Node target, std::size_t layer) const;
  bool reachable(Node from, Node to) const;

  /// One "u,i -> w,i+1" line per edge.
  void write_edge_list(std::ostream& out) const;
  /// Graphviz DOT; nodes that reach `highlight` are filled when given.
  void write_dot(std::ostream& out, std::optional<Node> highlight = {}) const;

 private:
  std::size_t n_;
  std::size_t depth_;
  std::vector<Interaction> layers_;  // layers_[i] links layer i to layer i+1
  std::vector<Edge> edges_;
};

LayeredGraph build_graph_h(const InteractionLog& log, std::size_t t);

}  // namespace popsim
