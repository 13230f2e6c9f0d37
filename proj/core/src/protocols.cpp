#include "popsim/protocols.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <fmt/format.h>

#include "json.hpp"
#include "popsim/errors.hpp"

namespace popsim::protocols {

namespace {

constexpr StateId kFirst{0};
constexpr StateId kSecond{1};

void require_population(std::size_t n, const char* who) {
  if (n < 1) throw UsageError(fmt::format("{}: n must be at least 1", who));
}

}  // namespace

Protocol pairwise_elimination(std::size_t n) {
  require_population(n, "pairwise_elimination");
  Protocol p("pairwise-elimination", {"leader", "follower"}, kFirst,
             {OutputSymbol::Leader, OutputSymbol::Follower});
  p.set_rule(kFirst, kFirst, kFirst, kSecond);
  return p;
}

Protocol leave_init(std::size_t n) {
  require_population(n, "leave_init");
  Protocol p("leave-init", {"init", "done"}, kFirst,
             {OutputSymbol::Follower, OutputSymbol::Follower});
  for (StateId a : {kFirst, kSecond}) {
    for (StateId b : {kFirst, kSecond}) p.set_rule(a, b, kSecond, kSecond);
  }
  return p;
}

Protocol one_way_epidemic(std::size_t n) {
  require_population(n, "one_way_epidemic");
  Protocol p("one-way-epidemic", {"susceptible", "infected"}, kFirst,
             {OutputSymbol::Follower, OutputSymbol::Follower});
  p.set_rule(kFirst, kSecond, kSecond, kSecond);
  p.set_rule(kSecond, kFirst, kSecond, kSecond);
  return p;
}

Configuration epidemic_seeded(const Protocol& epidemic, std::size_t n) {
  Configuration c = Configuration::initial(epidemic, n);
  if (n > 0) c.set(0, epidemic.state_by_name("infected"));
  return c;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"pairwise-elimination", "leave-init",
                                              "one-way-epidemic"};
  return names;
}

CatalogEntry make(std::string_view name, std::size_t n) {
  if (name == "pairwise-elimination") {
    Protocol p = pairwise_elimination(n);
    auto one_leader = [p](const Configuration& c) {
      return c.count_output(p, OutputSymbol::Leader) == 1;
    };
    return {p, {}, [one_leader](std::uint64_t, const Configuration& c) { return one_leader(c); },
            one_leader};
  }
  if (name == "leave-init") {
    Protocol p = leave_init(n);
    const StateId init = p.initial_state();
    return {p, {}, [init](std::uint64_t, const Configuration& c) { return c.count(init) == 0; },
            {}};
  }
  if (name == "one-way-epidemic") {
    Protocol p = one_way_epidemic(n);
    const StateId infected = p.state_by_name("infected");
    return {p, [p](std::size_t size) { return epidemic_seeded(p, size); },
            [infected](std::uint64_t, const Configuration& c) {
              return c.count(infected) == c.size();
            },
            {}};
  }
  throw UsageError(fmt::format("unknown protocol '{}'", name));
}

CatalogEntry from_protocol(Protocol protocol) {
  Protocol p = protocol;
  return {std::move(protocol),
          {},
          [p](std::uint64_t, const Configuration& c) {
            return c.count_output(p, OutputSymbol::Leader) == 1;
          },
          {}};
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ProtocolLoadError(fmt::format("protocol: missing field '{}'", key));
  return *it;
}

std::string as_string(const json& value, const std::string& what) {
  if (!value.is_string()) throw ProtocolLoadError(fmt::format("protocol: {} must be a string", what));
  return value.get<std::string>();
}

StateId lookup(const std::vector<std::string>& states, const std::string& name,
               const std::string& where) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == name) return StateId{static_cast<std::uint32_t>(i)};
  }
  throw ProtocolLoadError(fmt::format("protocol: {} references unknown state '{}'", where, name));
}

}  // namespace

Protocol load_protocol(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& err) {
    throw ProtocolLoadError(fmt::format("protocol: invalid JSON: {}", err.what()));
  }
  if (!doc.is_object()) throw ProtocolLoadError("protocol: document must be a JSON object");

  const std::string name = as_string(field(doc, "name"), "'name'");

  const json& states_json = field(doc, "states");
  if (!states_json.is_array() || states_json.empty()) {
    throw ProtocolLoadError("protocol: 'states' must be a non-empty list");
  }
  std::vector<std::string> states;
  std::set<std::string> seen;
  for (const auto& s : states_json) {
    auto state = as_string(s, "state name");
    if (!seen.insert(state).second) {
      throw ProtocolLoadError(fmt::format("protocol: duplicate state '{}'", state));
    }
    states.push_back(std::move(state));
  }

  const StateId initial = lookup(states, as_string(field(doc, "initial"), "'initial'"), "'initial'");

  const json& outputs_json = field(doc, "outputs");
  if (!outputs_json.is_object()) throw ProtocolLoadError("protocol: 'outputs' must be an object");
  for (const auto& [key, _] : outputs_json.items()) lookup(states, key, "'outputs'");
  std::vector<OutputSymbol> outputs;
  for (const auto& state : states) {
    auto it = outputs_json.find(state);
    if (it == outputs_json.end()) {
      throw ProtocolLoadError(
          fmt::format("protocol: outputs not total: no output for state '{}'", state));
    }
    const auto symbol = as_string(*it, fmt::format("output of '{}'", state));
    if (symbol != "L" && symbol != "F") {
      throw ProtocolLoadError(
          fmt::format("protocol: output of '{}' must be \"L\" or \"F\", got \"{}\"", state, symbol));
    }
    outputs.push_back(output_from_char(symbol.front()));
  }

  Protocol protocol(name, states, initial, std::move(outputs));

  if (auto it = doc.find("rules"); it != doc.end()) {
    if (!it->is_array()) throw ProtocolLoadError("protocol: 'rules' must be a list");
    std::set<std::pair<std::uint32_t, std::uint32_t>> defined;
    std::size_t index = 0;
    for (const auto& rule : *it) {
      const std::string where = fmt::format("rule {}", index++);
      if (!rule.is_array() || rule.size() != 4) {
        throw ProtocolLoadError(fmt::format("protocol: {} must be [a, b, a', b']", where));
      }
      std::array<StateId, 4> ids;
      for (std::size_t k = 0; k < 4; ++k) ids[k] = lookup(states, as_string(rule[k], where), where);
      if (!defined.emplace(ids[0].value, ids[1].value).second) {
        throw ProtocolLoadError(fmt::format("protocol: duplicate rule for ordered pair ({}, {})",
                                            states[ids[0].value], states[ids[1].value]));
      }
      protocol.set_rule(ids[0], ids[1], ids[2], ids[3]);
    }
  }
  return protocol;
}

Protocol load_protocol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProtocolLoadError(fmt::format("protocol: cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_protocol(buffer.str());
}

std::string to_document(const Protocol& protocol) {
  json doc;
  doc["name"] = protocol.name();
  doc["states"] = protocol.state_names();
  doc["initial"] = protocol.state_name(protocol.initial_state());
  json outputs = json::object();
  for (std::uint32_t s = 0; s < protocol.num_states(); ++s) {
    outputs[protocol.state_names()[s]] = std::string(1, to_char(protocol.output(StateId{s})));
  }
  doc["outputs"] = outputs;
  json rules = json::array();
  for (std::uint32_t a = 0; a < protocol.num_states(); ++a) {
    for (std::uint32_t b = 0; b < protocol.num_states(); ++b) {
      if (protocol.is_identity(StateId{a}, StateId{b})) continue;
      const auto [na, nb] = protocol.transition(StateId{a}, StateId{b});
      rules.push_back({protocol.state_names()[a], protocol.state_names()[b],
                       protocol.state_name(na), protocol.state_name(nb)});
    }
  }
  doc["rules"] = rules;
  return doc.dump(2);
}

}  // namespace popsim::protocols
