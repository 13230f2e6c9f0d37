#include "popsim/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <fmt/format.h>

#include "popsim/errors.hpp"

namespace popsim::exact {

std::uint64_t budget_from_environment() {
  const char* raw = std::getenv("POPSIM_BUDGET");
  if (raw == nullptr || *raw == '\0') return kDefaultBudget;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (*end != '\0' || value == 0 || raw[0] == '-') {
    throw UsageError(fmt::format("POPSIM_BUDGET must be a positive integer, got '{}'", raw));
  }
  return value;
}

std::uint64_t ConfigurationSpace::encode(const Configuration& config) const {
  std::uint64_t code = 0;
  const std::uint64_t q = protocol_.num_states();
  for (std::size_t i = config.size(); i-- > 0;) code = code * q + config[i].value;
  return code;
}

std::optional<std::size_t> ConfigurationSpace::index_of(const Configuration& config) const {
  if (config.size() != n_) return std::nullopt;
  for (StateId s : config.states()) {
    if (s.value >= protocol_.num_states()) return std::nullopt;
  }
  if (auto it = lookup_.find(encode(config)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

ConfigurationSpace enumerate_reachable(const Protocol& protocol, std::size_t n,
                                       std::uint64_t budget) {
  if (n < 2) throw UsageError(fmt::format("enumerate_reachable: n = {} < 2", n));
  // |Q|^n with saturation.
  std::uint64_t vectors = 1;
  bool over = false;
  for (std::size_t i = 0; i < n && !over; ++i) {
    if (vectors > budget / protocol.num_states()) over = true;
    vectors *= protocol.num_states();
  }
  if (over || vectors > budget) {
    throw ResourceError(fmt::format(
        "state space |Q|^n = {}^{} exceeds the budget of {} configurations", protocol.num_states(),
        n, budget));
  }

  ConfigurationSpace space(protocol, n);
  for (AgentId u = 0; u < n; ++u) {
    for (AgentId v = 0; v < n; ++v) {
      if (u != v) space.interactions_.push_back({u, v});
    }
  }

  auto intern = [&space](Configuration config) -> std::uint32_t {
    const auto code = space.encode(config);
    auto [it, inserted] =
        space.lookup_.try_emplace(code, static_cast<std::uint32_t>(space.configs_.size()));
    if (inserted) space.configs_.push_back(std::move(config));
    return it->second;
  };

  intern(Configuration::initial(protocol, n));
  for (std::size_t i = 0; i < space.configs_.size(); ++i) {
    std::vector<std::uint32_t> succ;
    succ.reserve(space.interactions_.size());
    for (const Interaction e : space.interactions_) {
      succ.push_back(intern(apply_interaction(protocol, space.configs_[i], e)));
    }
    space.succ_.push_back(std::move(succ));
  }
  return space;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::uint32_t>> predecessors(const ConfigurationSpace& space) {
  std::vector<std::vector<std::uint32_t>> pred(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (auto j : space.successors(i)) {
      if (pred[j].empty() || pred[j].back() != i) pred[j].push_back(static_cast<std::uint32_t>(i));
    }
  }
  return pred;
}

}  // namespace

SafetyChecker::SafetyChecker(const ConfigurationSpace& space)
    : space_(&space), frozen_(space.size(), true), leaders_(space.size()) {
  const auto& protocol = space.protocol();
  std::vector<std::vector<OutputSymbol>> outputs;
  outputs.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    outputs.push_back(output_vector(protocol, space.config(i)));
    leaders_[i] = space.config(i).count_output(protocol, OutputSymbol::Leader);
  }

  // A configuration is unfrozen if it has an output-changing edge, or a
  // successor that is unfrozen. Propagate from the former along reversed edges.
  std::deque<std::uint32_t> queue;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (auto j : space.successors(i)) {
      if (outputs[j] != outputs[i]) {
        frozen_[i] = false;
        queue.push_back(static_cast<std::uint32_t>(i));
        break;
      }
    }
  }
  const auto pred = predecessors(space);
  while (!queue.empty()) {
    const auto j = queue.front();
    queue.pop_front();
    for (auto i : pred[j]) {
      if (frozen_[i]) {
        frozen_[i] = false;
        queue.push_back(i);
      }
    }
  }
}

bool SafetyChecker::is_safe(std::size_t index) const {
  return leaders_.at(index) == 1 && frozen_[index];
}

std::size_t SafetyChecker::safe_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < frozen_.size(); ++i) count += is_safe(i);
  return count;
}

SafetyVerdict SafetyChecker::verdict(std::size_t index) const {
  SafetyVerdict v;
  v.leader_count = leaders_.at(index);
  v.safe = is_safe(index);
  if (v.safe) {
    v.reason = SafetyVerdict::Reason::Safe;
    return v;
  }
  v.reason = v.leader_count != 1 ? SafetyVerdict::Reason::LeaderCount
                                  : SafetyVerdict::Reason::OutputChange;
  if (frozen_[index]) return v;

  // Shortest interaction path to a configuration with a different output
  // vector than the start.
  const auto& space = *space_;
  const auto start = output_vector(space.protocol(), space.config(index));
  std::vector<std::int64_t> parent(space.size(), -1);
  std::vector<std::uint32_t> via(space.size(), 0);
  std::vector<bool> seen(space.size(), false);
  std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(index)};
  seen[index] = true;
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    const auto& succ = space.successors(i);
    for (std::uint32_t k = 0; k < succ.size(); ++k) {
      const auto j = succ[k];
      if (seen[j]) continue;
      seen[j] = true;
      parent[j] = i;
      via[j] = k;
      const auto out = output_vector(space.protocol(), space.config(j));
      if (out != start) {
        for (auto node = static_cast<std::int64_t>(j); node != static_cast<std::int64_t>(index);
             node = parent[static_cast<std::size_t>(node)]) {
          v.witness_path.push_back(space.interactions()[via[static_cast<std::size_t>(node)]]);
        }
        std::reverse(v.witness_path.begin(), v.witness_path.end());
        for (std::size_t a = 0; a < out.size(); ++a) {
          if (out[a] != start[a]) {
            v.changed_agent = static_cast<AgentId>(a);
            break;
          }
        }
        return v;
      }
      queue.push_back(j);
    }
  }
  return v;
}

SafetyVerdict is_safe(const ConfigurationSpace& space, const Configuration& config) {
  const auto index = space.index_of(config);
  if (!index) throw UsageError("is_safe: configuration is not in the reachable space");
  return SafetyChecker(space).verdict(*index);
}

// ---------------------------------------------------------------------------

std::string HittingTime::exact_string() const {
  if (!exact) return fmt::format("{}", value);
  return exact->str();
}

namespace {

// Dense rational Gaussian elimination on [A | b]; returns x[0].
Rational solve_rational(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) throw NonAbsorbingError("hitting-time system is singular");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = 0; row < m; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const Rational factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < m; ++k) {
        if (a[col][k] != 0) a[row][k] -= factor * a[col][k];
      }
      b[row] -= factor * b[col];
    }
  }
  return b[0] / a[0][0];
}

// Dense LU with partial pivoting; returns the full solution.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < m; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (a[pivot][col] == 0.0) throw NonAbsorbingError("hitting-time system is singular");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = col + 1; row < m; ++row) {
      const double factor = a[row][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < m; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<double> x(m);
  for (std::size_t i = m; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < m; ++k) acc -= a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace

HittingTime expected_hitting_steps(const ConfigurationSpace& space, const TargetPredicate& target,
                                   const HittingOptions& options) {
  const std::size_t total = space.size();
  std::vector<bool> is_target(total);
  for (std::size_t i = 0; i < total; ++i) is_target[i] = target(i, space.config(i));
  if (is_target[0]) return HittingTime{Rational(0), 0.0, 0.0};

  // Every transient configuration must be able to reach a target.
  const auto pred = predecessors(space);
  std::vector<bool> reaches(total, false);
  std::deque<std::uint32_t> queue;
  for (std::size_t i = 0; i < total; ++i) {
    if (is_target[i]) {
      reaches[i] = true;
      queue.push_back(static_cast<std::uint32_t>(i));
    }
  }
  while (!queue.empty()) {
    const auto j = queue.front();
    queue.pop_front();
    for (auto i : pred[j]) {
      if (!reaches[i]) {
        reaches[i] = true;
        queue.push_back(i);
      }
    }
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (!reaches[i]) {
      throw NonAbsorbingError(fmt::format(
          "target unreachable from reachable configuration #{}; expected hitting time is infinite",
          i));
    }
  }

  // Unknowns are the transient configurations; index 0 maps to unknown 0.
  std::vector<std::int64_t> unknown(total, -1);
  std::size_t m = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (!is_target[i]) unknown[i] = static_cast<std::int64_t>(m++);
  }
  const auto pairs = static_cast<std::int64_t>(space.population() * (space.population() - 1));

  // Row for configuration i: pairs * h_i - sum_{non-target succ} h_succ = pairs.
  if (m <= options.exact_limit) {
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m));
    std::vector<Rational> b(m, Rational(pairs));
    for (std::size_t i = 0; i < total; ++i) {
      if (is_target[i]) continue;
      auto& row = a[static_cast<std::size_t>(unknown[i])];
      row[static_cast<std::size_t>(unknown[i])] += pairs;
      for (auto j : space.successors(i)) {
        if (!is_target[j]) row[static_cast<std::size_t>(unknown[j])] -= 1;
      }
    }
    Rational h0 = solve_rational(std::move(a), std::move(b));
    return HittingTime{h0, h0.convert_to<double>(), 0.0};
  }

  std::vector<double> x;
  if (m <= 3000) {
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, static_cast<double>(pairs));
    for (std::size_t i = 0; i < total; ++i) {
      if (is_target[i]) continue;
      auto& row = a[static_cast<std::size_t>(unknown[i])];
      row[static_cast<std::size_t>(unknown[i])] += static_cast<double>(pairs);
      for (auto j : space.successors(i)) {
        if (!is_target[j]) row[static_cast<std::size_t>(unknown[j])] -= 1.0;
      }
    }
    x = solve_dense(std::move(a), std::move(b));
  } else {
    // Gauss-Seidel on h_i = (pairs + sum_{succ != i} h_succ) / (pairs - self loops).
    x.assign(m, 0.0);
    for (int sweep = 0; sweep < 1'000'000; ++sweep) {
      double change = 0.0;
      for (std::size_t i = 0; i < total; ++i) {
        if (is_target[i]) continue;
        double acc = static_cast<double>(pairs);
        double diag = static_cast<double>(pairs);
        for (auto j : space.successors(i)) {
          if (is_target[j]) continue;
          if (j == i) {
            diag -= 1.0;
          } else {
            acc += x[static_cast<std::size_t>(unknown[j])];
          }
        }
        auto& xi = x[static_cast<std::size_t>(unknown[i])];
        const double next = acc / diag;
        change = std::max(change, std::abs(next - xi) / std::max(1.0, std::abs(next)));
        xi = next;
      }
      if (change < 1e-13) break;
    }
  }

  double residual = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (is_target[i]) continue;
    double r = static_cast<double>(pairs) * x[static_cast<std::size_t>(unknown[i])] -
               static_cast<double>(pairs);
    for (auto j : space.successors(i)) {
      if (!is_target[j]) r -= x[static_cast<std::size_t>(unknown[j])];
    }
    residual = std::max(residual, std::abs(r) / static_cast<double>(pairs));
  }
  return HittingTime{std::nullopt, x[0], residual};
}

HittingTime expected_stabilization_steps(const ConfigurationSpace& space,
                                         const HittingOptions& options) {
  const SafetyChecker checker(space);
  return expected_hitting_steps(
      space, [&checker](std::size_t index, const Configuration&) { return checker.is_safe(index); },
      options);
}

double closed_form_pairwise(std::size_t n) {
  if (n < 2) throw UsageError("closed_form_pairwise: n must be at least 2");
  double sum = 0.0;
  for (std::size_t k = 2; k <= n; ++k) sum += 1.0 / (static_cast<double>(k) * static_cast<double>(k - 1));
  return static_cast<double>(n) * static_cast<double>(n - 1) * sum;
}

}  // namespace popsim::exact
