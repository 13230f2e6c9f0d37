#include "popsim/influence.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "popsim/errors.hpp"

namespace popsim {

AgentSet AgentSet::singleton(std::size_t n, AgentId a) {
  AgentSet s(n);
  s.insert(a);
  return s;
}

std::size_t AgentSet::size() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<AgentId> AgentSet::members() const {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    for (auto w = words_[i]; w != 0; w &= w - 1) {
      out.push_back(static_cast<AgentId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
    }
  }
  return out;
}

AgentSet& AgentSet::operator|=(const AgentSet& other) {
  if (other.n_ != n_) throw UsageError("AgentSet union over different populations");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

// ---------------------------------------------------------------------------

InteractionLog::InteractionLog(std::size_t n) : n_(n) {
  if (n < 2) throw UsageError(fmt::format("interaction log needs n >= 2, got {}", n));
}

InteractionLog::InteractionLog(std::size_t n, std::vector<Interaction> entries)
    : InteractionLog(n) {
  for (const auto& e : entries) validate_interaction(e, n_);
  entries_ = std::move(entries);
}

void InteractionLog::append(Interaction e) {
  validate_interaction(e, n_);
  entries_.push_back(e);
}

void write_log(std::ostream& out, const InteractionLog& log) {
  out << "popsim-log 1\n" << "n " << log.population() << '\n';
  for (const auto& e : log.entries()) out << e.initiator << ' ' << e.responder << '\n';
}

InteractionLog read_log(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_line() || line != "popsim-log 1") {
    throw UsageError("interaction log: missing 'popsim-log 1' header");
  }
  if (!next_line()) throw UsageError("interaction log: missing 'n <size>' line");
  std::size_t n = 0;
  {
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key >> n) || key != "n") {
      throw UsageError(fmt::format("interaction log line {}: expected 'n <size>'", line_no));
    }
  }
  InteractionLog log(n);
  while (next_line()) {
    std::istringstream fields(line);
    long long u = -1, v = -1;
    std::string extra;
    if (!(fields >> u >> v) || (fields >> extra) || u < 0 || v < 0) {
      throw UsageError(fmt::format("interaction log line {}: expected '<initiator> <responder>'",
                                   line_no));
    }
    try {
      log.append({static_cast<AgentId>(u), static_cast<AgentId>(v)});
    } catch (const UsageError& err) {
      throw UsageError(fmt::format("interaction log line {}: {}", line_no, err.what()));
    }
  }
  return log;
}

// ---------------------------------------------------------------------------

InfluencerTable::InfluencerTable(std::size_t n) : n_(n), words_((n + 63) / 64) {
  if (n < 1 || n > kMaxPopulation) {
    throw UsageError(fmt::format("influencer table supports 1 <= n <= {}, got {}",
                                 kMaxPopulation, n));
  }
  bits_.assign(n_ * words_, 0);
  sizes_.assign(n_, 1);
  for (std::size_t v = 0; v < n_; ++v) bits_[v * words_ + (v >> 6)] |= std::uint64_t{1} << (v & 63);
}

std::span<std::uint64_t> InfluencerTable::row(AgentId v) {
  return {bits_.data() + static_cast<std::size_t>(v) * words_, words_};
}

std::span<const std::uint64_t> InfluencerTable::row(AgentId v) const {
  return {bits_.data() + static_cast<std::size_t>(v) * words_, words_};
}

bool InfluencerTable::contains(AgentId v, AgentId u) const {
  return (row(v)[u >> 6] >> (u & 63)) & 1U;
}

AgentSet InfluencerTable::set(AgentId v) const {
  AgentSet s(n_);
  auto r = row(v);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (auto w = r[i]; w != 0; w &= w - 1) {
      s.insert(static_cast<AgentId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
    }
  }
  return s;
}

void InfluencerTable::forward_update(Interaction e) {
  validate_interaction(e, n_);
  auto a = row(e.initiator);
  auto b = row(e.responder);
  std::size_t count = 0;
  for (std::size_t i = 0; i < words_; ++i) {
    const auto merged = a[i] | b[i];
    a[i] = merged;
    b[i] = merged;
    count += static_cast<std::size_t>(std::popcount(merged));
  }
  sizes_[e.initiator] = static_cast<std::uint32_t>(count);
  sizes_[e.responder] = static_cast<std::uint32_t>(count);
  ++step_;
}

InfluencerTable replay_forward(const InteractionLog& log, std::size_t t) {
  if (t > log.length()) {
    throw UsageError(fmt::format("step {} exceeds log length {}", t, log.length()));
  }
  InfluencerTable table(log.population());
  for (std::size_t j = 0; j < t; ++j) table.forward_update(log[j]);
  return table;
}

std::vector<AgentSet> backward_sets(const InteractionLog& log, AgentId v, std::size_t t) {
  if (t > log.length()) {
    throw UsageError(fmt::format("step {} exceeds log length {}", t, log.length()));
  }
  if (v >= log.population()) {
    throw UsageError(fmt::format("agent {} out of range for n = {}", v, log.population()));
  }
  std::vector<AgentSet> layers(t + 1);
  layers[t] = AgentSet::singleton(log.population(), v);
  for (std::size_t i = t; i-- > 0;) {
    AgentSet current = layers[i + 1];
    const Interaction e = log[i];
    if (current.contains(e.initiator) || current.contains(e.responder)) {
      current.insert(e.initiator);
      current.insert(e.responder);
    }
    layers[i] = std::move(current);
  }
  return layers;
}

// ---------------------------------------------------------------------------

InfluencerObserver::InfluencerObserver(std::size_t n, SizeThreshold threshold,
                                       std::string event_name, bool record_series,
                                       std::optional<AgentId> watched)
    : table_(n),
      threshold_(threshold),
      event_name_(std::move(event_name)),
      record_series_(record_series),
      watched_(watched) {
  if (watched_ && *watched_ >= n) {
    throw UsageError(fmt::format("watched agent {} out of range for n = {}", *watched_, n));
  }
}

void InfluencerObserver::on_step(const StepEvent& event, const Configuration&, EventLog& events) {
  table_.forward_update(event.interaction);
  const std::size_t merged = table_.size(event.interaction.initiator);
  max_size_ = std::max(max_size_, merged);
  const bool counts = !watched_ || event.interaction.involves(*watched_);
  if (!reached_ && counts && threshold_.exceeded_by(merged)) {
    reached_ = true;
    events.mark(event_name_, event.step);
  }
  if (record_series_) series_.push_back({event.step, max_size_, merged, merged});
}

void write_series_csv(std::ostream& out, std::span<const InfluencerObserver::SeriesRow> rows) {
  out << "step,max_size,initiator_size,responder_size\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{}\n", r.step, r.max_size, r.initiator_size, r.responder_size);
  }
}

std::optional<std::uint64_t> first_exceed_time(const Protocol& protocol, std::size_t n,
                                               std::uint64_t seed, SizeThreshold threshold,
                                               std::optional<std::uint64_t> max_steps,
                                               std::optional<AgentId> watched) {
  InfluencerObserver observer(n, threshold, "t_min", false, watched);
  TrialOptions options;
  options.max_steps = max_steps;
  options.observers = {&observer};
  options.stop = [&observer](std::uint64_t, const Configuration&) { return observer.reached(); };
  const auto record = run_trial(protocol, n, seed, options);
  return record.event("t_min");
}

// ---------------------------------------------------------------------------

LayeredGraph::LayeredGraph(const InteractionLog& log, std::size_t depth)
    : n_(log.population()), depth_(depth) {
  if (depth > log.length()) {
    throw UsageError(fmt::format("depth {} exceeds log length {}", depth, log.length()));
  }
  layers_.assign(log.entries().begin(), log.entries().begin() + static_cast<std::ptrdiff_t>(depth));
  edges_.reserve(depth * (n_ + 2));
  for (std::size_t i = 0; i < depth; ++i) {
    for (AgentId u = 0; u < n_; ++u) edges_.push_back({{u, i}, {u, i + 1}});
    const auto e = layers_[i];
    edges_.push_back({{e.initiator, i}, {e.responder, i + 1}});
    edges_.push_back({{e.responder, i}, {e.initiator, i + 1}});
  }
}

std::size_t LayeredGraph::out_degree(Node node) const {
  if (node.layer >= depth_) return 0;
  return layers_[node.layer].involves(node.agent) ? 2 : 1;
}

AgentSet LayeredGraph::sources_reaching(Node target, std::size_t layer) const {
  if (target.layer > depth_ || layer > target.layer || target.agent >= n_) {
    throw UsageError("sources_reaching: node or layer out of range");
  }
  // Walk edges backwards one layer at a time.
  AgentSet current = AgentSet::singleton(n_, target.agent);
  for (std::size_t i = target.layer; i-- > layer;) {
    AgentSet prev(n_);
    const auto first = edges_.begin() + static_cast<std::ptrdiff_t>(i * (n_ + 2));
    for (auto edge = first; edge != first + static_cast<std::ptrdiff_t>(n_ + 2); ++edge) {
      if (current.contains(edge->to.agent)) prev.insert(edge->from.agent);
    }
    current = std::move(prev);
  }
  return current;
}

bool LayeredGraph::reachable(Node from, Node to) const {
  if (from.layer > to.layer) return false;
  return sources_reaching(to, from.layer).contains(from.agent);
}

void LayeredGraph::write_edge_list(std::ostream& out) const {
  for (const Edge& e : edges_) {
    fmt::print(out, "{},{} -> {},{}\n", e.from.agent, e.from.layer, e.to.agent, e.to.layer);
  }
}

void LayeredGraph::write_dot(std::ostream& out, std::optional<Node> highlight) const {
  std::vector<AgentSet> marked;
  if (highlight) {
    marked.reserve(highlight->layer + 1);
    for (std::size_t i = 0; i <= highlight->layer; ++i) marked.push_back(sources_reaching(*highlight, i));
  }
  out << "digraph H {\n  rankdir=TB;\n";
  for (std::size_t i = 0; i <= depth_; ++i) {
    out << "  { rank=same;";
    for (AgentId u = 0; u < n_; ++u) fmt::print(out, " \"{},{}\"", u, i);
    out << " }\n";
  }
  for (std::size_t i = 0; i <= depth_; ++i) {
    for (AgentId u = 0; u < n_; ++u) {
      const bool fill = i < marked.size() && marked[i].contains(u);
      fmt::print(out, "  \"{},{}\" [label=\"{}\"{}];\n", u, i, u,
                 fill ? ", style=filled, fillcolor=black, fontcolor=white" : "");
    }
  }
  for (const Edge& e : edges_) {
    fmt::print(out, "  \"{},{}\" -> \"{},{}\";\n", e.from.agent, e.from.layer, e.to.agent,
               e.to.layer);
  }
  out << "}\n";
}

LayeredGraph build_graph_h(const InteractionLog& log, std::size_t t) { return LayeredGraph(log, t); }

}  // namespace popsim
