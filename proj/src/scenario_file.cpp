#include "clf/scenario_file.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace clf {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ParseError(path + ": unknown field \"" + key + "\"");
  }
}

double require_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ParseError(path + "." + key + ": expected a number");
  return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& path, const char* key,
                       double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ParseError(path + "." + key + ": expected a number");
  return obj[key].get<double>();
}

cplx parse_complex(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(path + ": expected [re, im]");
  return cplx(v[0].get<double>(), v[1].get<double>());
}

std::pair<int, int> parse_label_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer())
    throw ParseError(path + ": expected a pair of agent ids");
  return {v[0].get<int>(), v[1].get<int>()};
}

}  // namespace

int ScenarioFile::label_to_index(int label) const {
  for (size_t i = 0; i < agent_labels.size(); ++i)
    if (agent_labels[i] == label) return static_cast<int>(i);
  throw ParseError("unknown agent id " + std::to_string(label));
}

Topology ScenarioFile::topology() const { return Topology(n(), edges, roots); }

std::vector<cplx> ScenarioFile::initial_state(std::uint64_t seed_override) const {
  if (initial.explicit_values) return initial.values;
  std::mt19937_64 rng(derive_seed(seed_override, 7));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> z0(n());
  for (cplx& z : z0) {
    const double re = initial.center.real() + initial.half_width * u(rng);
    const double im = initial.center.imag() + initial.half_width * u(rng);
    z = cplx(re, im);
  }
  return z0;
}

ScenarioFile parse_scenario_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(origin + ": top level must be an object");
  check_keys(root, "$",
             {"comments", "seed", "agents", "edges", "roots", "cascade", "bounds",
              "saturation", "integration", "ga", "initial_positions", "failures",
              "convergence_tol", "failure_time"});

  ScenarioFile s;
  if (root.contains("comments")) {
    if (!root["comments"].is_string())
      throw ParseError("$.comments: expected a string");
    s.comments = root["comments"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
      throw ParseError("$.seed: expected an integer");
    s.seed = root["seed"].get<std::uint64_t>();
  }

  if (!root.contains("agents") || !root["agents"].is_array())
    throw ParseError("$.agents: required array of agents");
  std::map<int, int> index_of;
  int idx = 0;
  for (const json& a : root["agents"]) {
    const std::string path = "$.agents[" + std::to_string(idx) + "]";
    if (!a.is_object()) throw ParseError(path + ": expected an object");
    check_keys(a, path, {"id", "position"});
    if (!a.contains("id") || !a["id"].is_number_integer())
      throw ParseError(path + ".id: expected an integer id");
    const int label = a["id"].get<int>();
    if (index_of.count(label))
      throw ParseError(path + ".id: duplicate agent id " + std::to_string(label));
    if (!a.contains("position"))
      throw ParseError(path + ".position: required [re, im]");
    index_of[label] = idx;
    s.agent_labels.push_back(label);
    s.basis.xi.push_back(parse_complex(a["position"], path + ".position"));
    ++idx;
  }
  if (s.n() < 3) throw ParseError("$.agents: need at least 3 agents");

  auto to_index = [&](int label, const std::string& path) {
    const auto it = index_of.find(label);
    if (it == index_of.end())
      throw ParseError(path + ": unknown agent id " + std::to_string(label));
    return it->second;
  };

  if (!root.contains("edges") || !root["edges"].is_array())
    throw ParseError("$.edges: required array of id pairs");
  int ei = 0;
  for (const json& e : root["edges"]) {
    const std::string path = "$.edges[" + std::to_string(ei++) + "]";
    const auto [a, b] = parse_label_pair(e, path);
    s.edges.push_back({to_index(a, path), to_index(b, path)});
  }

  if (!root.contains("roots"))
    throw ParseError("$.roots: required pair of agent ids");
  {
    const auto [a, b] = parse_label_pair(root["roots"], "$.roots");
    s.roots = {to_index(a, "$.roots"), to_index(b, "$.roots")};
  }

  if (root.contains("cascade")) {
    const json& c = root["cascade"];
    if (!c.is_object()) throw ParseError("$.cascade: expected an object");
    check_keys(c, "$.cascade", {"clusters", "meta_edges", "meta_roots"});
    if (!c.contains("clusters") || !c["clusters"].is_array())
      throw ParseError("$.cascade.clusters: required array");
    CascadeSpec spec;
    int ci = 0;
    for (const json& cl : c["clusters"]) {
      const std::string path = "$.cascade.clusters[" + std::to_string(ci++) + "]";
      if (!cl.is_object()) throw ParseError(path + ": expected an object");
      check_keys(cl, path, {"members", "roots"});
      if (!cl.contains("members") || !cl["members"].is_array())
        throw ParseError(path + ".members: required array of agent ids");
      ClusterSpec cs;
      for (const json& m : cl["members"]) {
        if (!m.is_number_integer())
          throw ParseError(path + ".members: ids must be integers");
        cs.members.push_back(to_index(m.get<int>(), path + ".members"));
      }
      if (!cl.contains("roots"))
        throw ParseError(path + ".roots: required pair of agent ids");
      const auto [a, b] = parse_label_pair(cl["roots"], path + ".roots");
      cs.roots = {to_index(a, path + ".roots"), to_index(b, path + ".roots")};
      spec.clusters.push_back(std::move(cs));
    }
    if (!c.contains("meta_edges") || !c["meta_edges"].is_array())
      throw ParseError("$.cascade.meta_edges: required array of id pairs");
    int mi = 0;
    for (const json& e : c["meta_edges"]) {
      const std::string path = "$.cascade.meta_edges[" + std::to_string(mi++) + "]";
      const auto [a, b] = parse_label_pair(e, path);
      spec.meta_edges.push_back({to_index(a, path), to_index(b, path)});
    }
    if (!c.contains("meta_roots"))
      throw ParseError("$.cascade.meta_roots: required pair of agent ids");
    const auto [a, b] = parse_label_pair(c["meta_roots"], "$.cascade.meta_roots");
    spec.meta_roots = {to_index(a, "$.cascade.meta_roots"),
                       to_index(b, "$.cascade.meta_roots")};
    s.cascade = std::move(spec);
  }

  if (root.contains("bounds")) {
    const json& b = root["bounds"];
    if (!b.is_object()) throw ParseError("$.bounds: expected an object");
    check_keys(b, "$.bounds", {"lambda_min_bar", "lambda_max_bar"});
    s.bounds.lambda_min_bar = require_number(b, "$.bounds", "lambda_min_bar");
    s.bounds.lambda_max_bar = require_number(b, "$.bounds", "lambda_max_bar");
  }
  try {
    s.bounds.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("$.bounds: ") + e.what());
  }

  if (root.contains("saturation")) {
    const json& b = root["saturation"];
    if (!b.is_object()) throw ParseError("$.saturation: expected an object");
    check_keys(b, "$.saturation", {"v_min", "v_max"});
    s.v_min = require_number(b, "$.saturation", "v_min");
    s.v_max = require_number(b, "$.saturation", "v_max");
  }
  if (!(s.v_min < s.v_max))
    throw ParseError("$.saturation: v_min must be below v_max");

  if (root.contains("integration")) {
    const json& b = root["integration"];
    if (!b.is_object()) throw ParseError("$.integration: expected an object");
    check_keys(b, "$.integration", {"dt", "t_end", "integrator"});
    s.dt = optional_number(b, "$.integration", "dt", s.dt);
    s.t_end = optional_number(b, "$.integration", "t_end", s.t_end);
    if (b.contains("integrator")) {
      if (!b["integrator"].is_string())
        throw ParseError("$.integration.integrator: expected \"euler\" or \"rk4\"");
      const std::string name = b["integrator"].get<std::string>();
      if (name == "euler") s.integrator = Integrator::euler;
      else if (name == "rk4") s.integrator = Integrator::rk4;
      else
        throw ParseError("$.integration.integrator: unknown integrator \"" + name +
                         "\"");
    }
  }
  if (!(s.dt > 0.0) || !(s.t_end >= s.dt))
    throw ParseError("$.integration: need dt > 0 and t_end >= dt");

  s.ga.seed = s.seed;
  if (root.contains("ga")) {
    const json& b = root["ga"];
    if (!b.is_object()) throw ParseError("$.ga: expected an object");
    check_keys(b, "$.ga",
               {"population_size", "generations", "crossover_rate", "mutation_rate",
                "mutation_sigma", "tournament_size", "elitism_count", "seed",
                "stability_penalty_weight", "real_diagonal", "target_fitness"});
    s.ga.population_size = static_cast<int>(
        optional_number(b, "$.ga", "population_size", s.ga.population_size));
    s.ga.generations =
        static_cast<int>(optional_number(b, "$.ga", "generations", s.ga.generations));
    s.ga.crossover_rate =
        optional_number(b, "$.ga", "crossover_rate", s.ga.crossover_rate);
    s.ga.mutation_rate =
        optional_number(b, "$.ga", "mutation_rate", s.ga.mutation_rate);
    s.ga.mutation_sigma =
        optional_number(b, "$.ga", "mutation_sigma", s.ga.mutation_sigma);
    s.ga.tournament_size = static_cast<int>(
        optional_number(b, "$.ga", "tournament_size", s.ga.tournament_size));
    s.ga.elitism_count = static_cast<int>(
        optional_number(b, "$.ga", "elitism_count", s.ga.elitism_count));
    if (b.contains("seed")) {
      if (!b["seed"].is_number_integer() && !b["seed"].is_number_unsigned())
        throw ParseError("$.ga.seed: expected an integer");
      s.ga.seed = b["seed"].get<std::uint64_t>();
    }
    s.ga.stability_penalty_weight = optional_number(
        b, "$.ga", "stability_penalty_weight", s.ga.stability_penalty_weight);
    if (b.contains("real_diagonal")) {
      if (!b["real_diagonal"].is_boolean())
        throw ParseError("$.ga.real_diagonal: expected a boolean");
      s.ga.real_diagonal = b["real_diagonal"].get<bool>();
    }
    s.ga.target_fitness =
        optional_number(b, "$.ga", "target_fitness", s.ga.target_fitness);
  }
  try {
    s.ga.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("$.ga: ") + e.what());
  }

  if (root.contains("initial_positions")) {
    const json& b = root["initial_positions"];
    if (!b.is_object()) throw ParseError("$.initial_positions: expected an object");
    check_keys(b, "$.initial_positions", {"mode", "values", "center", "half_width"});
    if (!b.contains("mode") || !b["mode"].is_string())
      throw ParseError("$.initial_positions.mode: expected \"explicit\" or \"random_box\"");
    const std::string mode = b["mode"].get<std::string>();
    if (mode == "explicit") {
      s.initial.explicit_values = true;
      if (!b.contains("values") || !b["values"].is_array())
        throw ParseError("$.initial_positions.values: required array of [re, im]");
      int vi = 0;
      for (const json& v : b["values"])
        s.initial.values.push_back(parse_complex(
            v, "$.initial_positions.values[" + std::to_string(vi++) + "]"));
      if (static_cast<int>(s.initial.values.size()) != s.n())
        throw ParseError("$.initial_positions.values: need one entry per agent");
    } else if (mode == "random_box") {
      if (b.contains("center"))
        s.initial.center = parse_complex(b["center"], "$.initial_positions.center");
      s.initial.half_width =
          optional_number(b, "$.initial_positions", "half_width", s.initial.half_width);
      if (!(s.initial.half_width > 0.0))
        throw ParseError("$.initial_positions.half_width: must be positive");
    } else {
      throw ParseError("$.initial_positions.mode: unknown mode \"" + mode + "\"");
    }
  }

  if (root.contains("failures")) {
    if (!root["failures"].is_array())
      throw ParseError("$.failures: expected an array");
    int fi = 0;
    for (const json& f : root["failures"]) {
      const std::string path = "$.failures[" + std::to_string(fi++) + "]";
      if (!f.is_object()) throw ParseError(path + ": expected an object");
      if (!f.contains("kind") || !f["kind"].is_string())
        throw ParseError(path + ".kind: expected \"link\" or \"actuator\"");
      const std::string kind = f["kind"].get<std::string>();
      FailureEvent ev;
      ev.time = require_number(f, path, "time");
      if (kind == "link") {
        check_keys(f, path, {"kind", "agents", "time"});
        if (!f.contains("agents"))
          throw ParseError(path + ".agents: required pair of agent ids");
        const auto [a, b] = parse_label_pair(f["agents"], path + ".agents");
        ev.kind = FailureEvent::Kind::link;
        ev.a = to_index(a, path + ".agents");
        ev.b = to_index(b, path + ".agents");
      } else if (kind == "actuator") {
        check_keys(f, path, {"kind", "agent", "time"});
        if (!f.contains("agent") || !f["agent"].is_number_integer())
          throw ParseError(path + ".agent: required agent id");
        ev.kind = FailureEvent::Kind::actuator;
        ev.a = to_index(f["agent"].get<int>(), path + ".agent");
      } else {
        throw ParseError(path + ".kind: unknown failure kind \"" + kind + "\"");
      }
      s.failures.push_back(ev);
    }
  }

  s.convergence_tol =
      optional_number(root, "$", "convergence_tol", s.convergence_tol);
  if (!(s.convergence_tol > 0.0))
    throw ParseError("$.convergence_tol: must be positive");
  if (root.contains("failure_time")) {
    s.failure_time = require_number(root, "$", "failure_time");
    if (*s.failure_time < 0.0 || *s.failure_time > s.t_end)
      throw ParseError("$.failure_time: must lie in [0, t_end]");
  }

  // structural cross-checks that do not need design work
  try {
    s.topology();
  } catch (const DomainError& e) {
    throw ParseError(std::string("$.edges/$.roots: ") + e.what());
  }
  try {
    s.basis.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("$.agents: ") + e.what());
  }
  for (const FailureEvent& ev : s.failures) {
    if (ev.time > s.t_end)
      throw ParseError("$.failures: event time exceeds t_end");
  }
  return s;
}

ScenarioFile parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace clf
