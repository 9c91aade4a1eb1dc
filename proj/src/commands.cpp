#include "clf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace clf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int log_level() {
  static int level = [] {
    const char* env = std::getenv("CASCADE_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[clf] " << msg << "\n";
}

json complex_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

json spectrum_json(const Spectrum& s) {
  json eig = json::array();
  for (const cplx& z : s.eigenvalues) eig.push_back(complex_json(z));
  return json{{"eigenvalues", eig}, {"tol_zero", s.tol_zero}, {"zero_count", s.zero_count}};
}

json condition_json(const ConditionReport& r) {
  return json{{"expected_rank", r.expected_rank},
              {"rank", r.rank},
              {"residual_ones", r.residual_ones},
              {"residual_xi", r.residual_xi},
              {"two_rooted", r.two_rooted},
              {"verdict", r.pass ? "pass" : "fail"}};
}

json design_report_json(const DesignReport& r) {
  return json{{"band_membership", r.band_membership},
              {"best_fitness", r.best_fitness},
              {"generations", r.generations},
              {"lambda_a", complex_json(r.lambda_a)},
              {"lambda_max", complex_json(r.lambda_max)},
              {"seed", r.seed}};
}

json diagonal_json(const StabilizerDiagonal& d) {
  json out = json::array();
  for (const cplx& z : d.d) out.push_back(complex_json(z));
  return out;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty())
    throw ParseError(what + ": expected a matrix as nested arrays");
  const int n = static_cast<int>(rows.size());
  ComplexMatrix m(n, static_cast<int>(rows[0].size()));
  for (int i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != m.cols())
      throw ParseError(what + ": ragged matrix rows");
    for (int j = 0; j < m.cols(); ++j) {
      const json& e = row[j];
      if (!e.is_array() || e.size() != 2)
        throw ParseError(what + ": entries must be [re, im]");
      m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_series_csv(const fs::path& path, const Trajectory& traj,
                      const std::vector<std::vector<cplx>>& series,
                      const char* prefix) {
  std::string out = "t";
  const int n = series.empty() ? 0 : static_cast<int>(series[0].size());
  for (int i = 1; i <= n; ++i) {
    out += ",re_" + std::string(prefix) + std::to_string(i);
    out += ",im_" + std::string(prefix) + std::to_string(i);
  }
  out += "\n";
  for (size_t k = 0; k < series.size(); ++k) {
    out += format_double(traj.times[k]);
    for (const cplx& z : series[k]) {
      out += ",";
      out += format_double(z.real());
      out += ",";
      out += format_double(z.imag());
    }
    out += "\n";
  }
  write_file(path, out);
}

void write_error_csv(const fs::path& path, const Trajectory& traj) {
  std::string out = "t,error\n";
  for (size_t k = 0; k < traj.formation_errors.size(); ++k) {
    out += format_double(traj.times[k]);
    out += ",";
    out += format_double(traj.formation_errors[k]);
    out += "\n";
  }
  write_file(path, out);
}

json events_json(const ScenarioFile& s, const Trajectory& traj) {
  json events = json::array();
  for (const auto& ae : traj.events_applied) {
    json e;
    if (ae.event.kind == FailureEvent::Kind::link) {
      e["kind"] = "link";
      e["agents"] = json::array(
          {s.agent_labels[ae.event.a], s.agent_labels[ae.event.b]});
    } else {
      e["kind"] = "actuator";
      e["agent"] = s.agent_labels[ae.event.a];
    }
    e["time"] = ae.event.time;
    e["applied_at"] = ae.applied_at;
    events.push_back(std::move(e));
  }
  return events;
}

json summary_json(const ScenarioFile& s, const Trajectory& traj, double tol) {
  double max_u = 0.0;
  for (const auto& u : traj.controls)
    for (const cplx& z : u) max_u = std::max(max_u, std::abs(z));
  double max_z = 0.0;
  for (const auto& z : traj.states)
    for (const cplx& x : z) max_z = std::max(max_z, std::abs(x));
  const std::optional<double> tconv = convergence_time(traj, tol);
  json out{{"schema_version", 1},
           {"n", s.n()},
           {"seed", s.seed},
           {"integrator", s.integrator == Integrator::rk4 ? "rk4" : "euler"},
           {"dt", s.dt},
           {"t_end", s.t_end},
           {"tolerance", tol},
           {"converged", tconv.has_value()},
           {"diverged", traj.diverged},
           {"final_error",
            traj.formation_errors.empty() ? 0.0 : traj.formation_errors.back()},
           {"max_control_magnitude", max_u},
           {"max_state_magnitude", max_z},
           {"events", events_json(s, traj)}};
  out["convergence_time"] = tconv ? json(*tconv) : json(nullptr);
  out["divergence_time"] = traj.diverged ? json(traj.divergence_time) : json(nullptr);
  return out;
}

struct ConventionalDesign {
  Topology topo;
  ComplexLaplacian laplacian;
  StabilizerDiagonal diagonal;
  ComplexMatrix dl;
  Spectrum spectrum;
  ConditionReport condition;
  DesignReport report;
};

ConventionalDesign design_conventional(const ScenarioFile& s) {
  ConventionalDesign d{s.topology(), {}, {}, {}, {}, {}, {}};
  const EdgeWeights w = synthesize_weights(d.topo, s.basis, s.seed);
  d.laplacian = build_laplacian(d.topo, w, s.basis);
  d.condition = verify_formation_conditions(d.laplacian);
  auto [diag, report] = design_stabilizer(d.laplacian, s.bounds, s.ga);
  d.diagonal = std::move(diag);
  d.report = std::move(report);
  d.dl = d.laplacian.matrix.scale_rows(d.diagonal.d);
  d.spectrum = eigenvalues(d.dl);
  return d;
}

CascadeNetwork design_cascade_network(const ScenarioFile& s) {
  if (!s.cascade)
    throw DomainError("scenario has no cascade block; cascade mode unavailable");
  CascadeNetwork net =
      build_cascade(s.topology(), s.basis, *s.cascade, s.bounds, s.ga);
  assemble(net);
  return net;
}

json metrics_json(const CascadeMetrics& m) {
  return json{{"formula_lambda_a", complex_json(m.formula_lambda_a)},
              {"formula_lambda_max", complex_json(m.formula_lambda_max)},
              {"gap_a", m.gap_a},
              {"gap_max", m.gap_max},
              {"lambda_a", complex_json(m.lambda_a)},
              {"lambda_max", complex_json(m.lambda_max)}};
}

json cascade_design_json(const ScenarioFile& s, const CascadeNetwork& net,
                         const CascadeMetrics& metrics) {
  json clusters = json::array();
  for (const Cluster& cl : net.clusters) {
    json members = json::array();
    for (int v : cl.spec.members) members.push_back(s.agent_labels[v]);
    clusters.push_back(
        json{{"members", members},
             {"roots", json::array({s.agent_labels[cl.spec.roots.first],
                                    s.agent_labels[cl.spec.roots.second]})},
             {"reused_from", cl.design.reused_from},
             {"diagonal", diagonal_json(cl.design.diagonal)},
             {"design_report", design_report_json(cl.design.report)},
             {"spectrum", spectrum_json(cl.design.spectrum)}});
  }
  json meta_roots = json::array();
  for (int v : net.meta.root_ids) meta_roots.push_back(s.agent_labels[v]);
  const auto [r1, rx] = kernel_residuals(net.assembled, s.basis.xi);
  return json{{"schema_version", 1},
              {"mode", "cascade"},
              {"n", s.n()},
              {"seed", s.seed},
              {"clusters", clusters},
              {"meta",
               json{{"members", meta_roots},
                    {"diagonal", diagonal_json(net.meta.design.diagonal)},
                    {"design_report", design_report_json(net.meta.design.report)},
                    {"spectrum", spectrum_json(net.meta.design.spectrum)}}},
              {"metrics", metrics_json(metrics)},
              {"assembled_checks",
               json{{"expected_rank", s.n() - 2},
                    {"rank", numerical_rank(net.assembled)},
                    {"residual_ones", r1},
                    {"residual_xi", rx}}},
              {"system_matrix", matrix_json(net.assembled)}};
}

FailureEvent parse_failure_spec(const ScenarioFile& s, const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3)
    throw DomainError("failure spec must be KIND:ARGS:TIME, got \"" + spec + "\"");
  FailureEvent ev;
  try {
    ev.time = std::stod(parts[2]);
  } catch (...) {
    throw DomainError("failure spec has a bad time: \"" + parts[2] + "\"");
  }
  if (parts[0] == "link") {
    const auto dash = parts[1].find('-');
    if (dash == std::string::npos)
      throw DomainError("link failure args must be I-J, got \"" + parts[1] + "\"");
    ev.kind = FailureEvent::Kind::link;
    ev.a = s.label_to_index(std::stoi(parts[1].substr(0, dash)));
    ev.b = s.label_to_index(std::stoi(parts[1].substr(dash + 1)));
  } else if (parts[0] == "actuator") {
    ev.kind = FailureEvent::Kind::actuator;
    ev.a = s.label_to_index(std::stoi(parts[1]));
  } else {
    throw DomainError("unknown failure kind \"" + parts[0] + "\"");
  }
  return ev;
}

ScenarioFile load_scenario(const std::string& path, const CommandOptions& opts) {
  ScenarioFile s = parse_scenario(path);
  if (opts.seed) {
    s.seed = *opts.seed;
    s.ga.seed = *opts.seed;
  }
  if (opts.tol) s.convergence_tol = *opts.tol;
  for (const std::string& spec : opts.failures)
    s.failures.push_back(parse_failure_spec(s, spec));
  return s;
}

Scenario make_sim_scenario(const ScenarioFile& s, const ComplexMatrix& system,
                           std::vector<cplx> z0) {
  Scenario sim;
  sim.system = system;
  sim.basis = s.basis;
  sim.z0 = std::move(z0);
  sim.dt = s.dt;
  sim.t_end = s.t_end;
  sim.v_min = s.v_min;
  sim.v_max = s.v_max;
  sim.integrator = s.integrator;
  sim.failures = s.failures;
  sim.convergence_tol = s.convergence_tol;
  sim.seed = s.seed;
  sim.topology = s.topology();
  return sim;
}

void write_trajectory_files(const fs::path& dir, const ScenarioFile& s,
                            const Trajectory& traj, double tol) {
  fs::create_directories(dir);
  write_series_csv(dir / "states.csv", traj, traj.states, "z");
  write_series_csv(dir / "controls.csv", traj, traj.controls, "u");
  write_error_csv(dir / "error.csv", traj);
  write_json(dir / "summary.json", summary_json(s, traj, tol));
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << json{{"error", "parse"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  } catch (const TopologyError& e) {
    std::cerr << json{{"error", "topology"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  } catch (const StructureError& e) {
    std::cerr << json{{"error", "structure"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  } catch (const SpectralStructureError& e) {
    std::cerr << json{{"error", "spectral_structure"}, {"message", e.what()}}.dump()
              << "\n";
    return kExitValidation;
  } catch (const DesignError& e) {
    std::cerr << json{{"error", "design"}, {"message", e.what()}}.dump() << "\n";
    return kExitDesign;
  } catch (const AssemblyError& e) {
    std::cerr << json{{"error", "assembly"}, {"message", e.what()}}.dump() << "\n";
    return kExitDesign;
  } catch (const NumericalError& e) {
    std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump() << "\n";
    return kExitDesign;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return kExitValidation;
  }
}

std::optional<double> median_time(std::vector<std::optional<double>> times) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> v;
  for (const auto& t : times) v.push_back(t ? *t : inf);
  std::sort(v.begin(), v.end());
  const double med = v[(v.size() - 1) / 2];
  if (!std::isfinite(med)) return std::nullopt;
  return med;
}

}  // namespace

int cmd_design(const std::string& scenario_path, const std::string& out_dir,
               const std::string& mode, const CommandOptions& opts) {
  return guarded([&]() -> int {
    const ScenarioFile s = load_scenario(scenario_path, opts);
    fs::create_directories(out_dir);
    if (mode == "conventional") {
      log_info("designing conventional stabilizer for n=" + std::to_string(s.n()));
      const ConventionalDesign d = design_conventional(s);
      const auto [la, lmax] = connectivity_metrics(d.spectrum);
      json out{{"schema_version", 1},
               {"mode", "conventional"},
               {"n", s.n()},
               {"seed", s.seed},
               {"condition_report", condition_json(d.condition)},
               {"design_report", design_report_json(d.report)},
               {"diagonal", diagonal_json(d.diagonal)},
               {"spectrum", spectrum_json(d.spectrum)},
               {"lambda_a", complex_json(la)},
               {"lambda_max", complex_json(lmax)},
               {"system_matrix", matrix_json(d.dl)}};
      write_json(fs::path(out_dir) / "design.json", out);
      write_file(fs::path(out_dir) / "l_matrix.txt", matrix_to_text(d.laplacian.matrix));
      write_file(fs::path(out_dir) / "dl_matrix.txt", matrix_to_text(d.dl));
      return d.condition.pass ? kExitOk : kExitDesign;
    }
    if (mode == "cascade") {
      log_info("designing cascade for n=" + std::to_string(s.n()));
      const CascadeNetwork net = design_cascade_network(s);
      const CascadeMetrics metrics = cascade_metrics(net);
      write_json(fs::path(out_dir) / "design.json",
                 cascade_design_json(s, net, metrics));
      write_file(fs::path(out_dir) / "assembled_matrix.txt",
                 matrix_to_text(net.assembled));
      return kExitOk;
    }
    throw DomainError("unknown design mode \"" + mode +
                      "\"; expected conventional or cascade");
  });
}

int cmd_simulate(const std::string& scenario_path, const std::string& design_path,
                 const std::string& out_dir, const CommandOptions& opts) {
  return guarded([&]() -> int {
    const ScenarioFile s = load_scenario(scenario_path, opts);
    std::ifstream in(design_path, std::ios::binary);
    if (!in) throw ParseError("cannot open design file: " + design_path);
    json dj;
    try {
      dj = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError(design_path + ": " + e.what());
    }
    if (!dj.contains("system_matrix"))
      throw ParseError(design_path + ": missing system_matrix");
    const ComplexMatrix system =
        matrix_from_json(dj["system_matrix"], design_path + ":system_matrix");
    if (system.rows() != s.n())
      throw ParseError("design dimension " + std::to_string(system.rows()) +
                       " does not match scenario agent count " +
                       std::to_string(s.n()));
    const Scenario sim = make_sim_scenario(s, system, s.initial_state(s.seed));
    const Trajectory traj = run(sim);
    write_trajectory_files(out_dir, s, traj, s.convergence_tol);
    if (traj.diverged) return kExitSimulation;
    if (!convergence_time(traj, s.convergence_tol)) return kExitSimulation;
    return kExitOk;
  });
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir,
                const CommandOptions& opts) {
  return guarded([&]() -> int {
    const ScenarioFile s = load_scenario(scenario_path, opts);
    fs::create_directories(out_dir);

    log_info("compare: conventional design");
    const ConventionalDesign conv = design_conventional(s);
    const auto [conv_la, conv_lmax] = connectivity_metrics(conv.spectrum);
    log_info("compare: cascade design");
    const CascadeNetwork net = design_cascade_network(s);
    const CascadeMetrics metrics = cascade_metrics(net);

    const int seeds = std::max(1, opts.compare_seeds);
    std::vector<std::optional<double>> conv_times, casc_times;
    json seed_list = json::array();
    for (int k = 0; k < seeds; ++k) {
      const std::uint64_t z0_seed = derive_seed(s.seed, 1000 + k);
      seed_list.push_back(z0_seed);
      const std::vector<cplx> z0 = s.initial_state(z0_seed);
      const Trajectory tc = run(make_sim_scenario(s, conv.dl, z0));
      conv_times.push_back(convergence_time(tc, s.convergence_tol));
      const Trajectory tk = run(make_sim_scenario(s, net.assembled, z0));
      casc_times.push_back(convergence_time(tk, s.convergence_tol));
    }

    auto times_json = [](const std::vector<std::optional<double>>& ts) {
      json out = json::array();
      for (const auto& t : ts) out.push_back(t ? json(*t) : json(nullptr));
      return out;
    };
    const std::optional<double> conv_med = median_time(conv_times);
    const std::optional<double> casc_med = median_time(casc_times);

    json out{{"schema_version", 1},
             {"tolerance", s.convergence_tol},
             {"seeds", seed_list},
             {"conventional",
              json{{"lambda_a", complex_json(conv_la)},
                   {"lambda_max", complex_json(conv_lmax)},
                   {"condition_report", condition_json(conv.condition)},
                   {"convergence_times", times_json(conv_times)},
                   {"median_convergence_time",
                    conv_med ? json(*conv_med) : json(nullptr)}}},
             {"cascade",
              json{{"metrics", metrics_json(metrics)},
                   {"convergence_times", times_json(casc_times)},
                   {"median_convergence_time",
                    casc_med ? json(*casc_med) : json(nullptr)}}}};
    if (conv_med && casc_med && *casc_med > 0.0)
      out["speedup_ratio"] = *conv_med / *casc_med;
    else
      out["speedup_ratio"] = nullptr;
    write_json(fs::path(out_dir) / "compare.json", out);

    write_json(fs::path(out_dir) / "conventional_design.json",
               json{{"schema_version", 1},
                    {"mode", "conventional"},
                    {"n", s.n()},
                    {"seed", s.seed},
                    {"condition_report", condition_json(conv.condition)},
                    {"design_report", design_report_json(conv.report)},
                    {"diagonal", diagonal_json(conv.diagonal)},
                    {"spectrum", spectrum_json(conv.spectrum)},
                    {"lambda_a", complex_json(conv_la)},
                    {"lambda_max", complex_json(conv_lmax)},
                    {"system_matrix", matrix_json(conv.dl)}});
    write_json(fs::path(out_dir) / "cascade_design.json",
               cascade_design_json(s, net, metrics));
    return kExitOk;
  });
}

int cmd_robustness(const std::string& scenario_path, const std::string& out_dir,
                   const CommandOptions& opts) {
  return guarded([&]() -> int {
    const ScenarioFile s = load_scenario(scenario_path, opts);
    fs::create_directories(out_dir);
    const CascadeNetwork net = design_cascade_network(s);
    const double t_fail = s.failure_time ? *s.failure_time : s.t_end / 4.0;

    // canonical failure picks, all deterministic
    const Cluster& c0 = net.clusters[0];
    std::pair<int, int> cluster_edge{-1, -1};
    for (const auto& [a, b] : c0.local_topology.edges()) {
      if (!c0.local_topology.is_root(a) || !c0.local_topology.is_root(b)) {
        cluster_edge = {c0.spec.members[a], c0.spec.members[b]};
        break;
      }
    }
    if (cluster_edge.first < 0)
      throw StructureError("cluster 0 has no follower edge for the link case");
    const auto& meta_edge_local = net.meta.topology.edges().front();
    const std::pair<int, int> meta_edge{net.meta.root_ids[meta_edge_local.first],
                                        net.meta.root_ids[meta_edge_local.second]};
    int cluster_agent = -1;
    for (size_t k = 0; k < c0.spec.members.size(); ++k) {
      if (!c0.local_topology.is_root(static_cast<int>(k))) {
        cluster_agent = c0.spec.members[k];
        break;
      }
    }
    int meta_agent = net.meta.root_ids[0];
    for (int r : net.meta.root_ids) {
      if (r != s.cascade->meta_roots.first && r != s.cascade->meta_roots.second) {
        meta_agent = r;
        break;
      }
    }

    struct Case {
      std::string name;
      FailureEvent event;
    };
    std::vector<Case> cases{
        {"cluster_link",
         {FailureEvent::Kind::link, cluster_edge.first, cluster_edge.second, t_fail}},
        {"meta_link",
         {FailureEvent::Kind::link, meta_edge.first, meta_edge.second, t_fail}},
        {"cluster_actuator", {FailureEvent::Kind::actuator, cluster_agent, -1, t_fail}},
        {"meta_actuator", {FailureEvent::Kind::actuator, meta_agent, -1, t_fail}}};

    const std::vector<cplx> z0 = s.initial_state(s.seed);
    const double envelope =
        std::max({1.0, inf_norm(z0), inf_norm(s.basis.xi)});

    json cases_json;
    bool all_ok = true;
    for (const Case& cs : cases) {
      ScenarioFile sf = s;
      sf.failures.push_back(cs.event);
      const Trajectory traj = run(make_sim_scenario(sf, net.assembled, z0));
      write_trajectory_files(fs::path(out_dir) / cs.name, sf, traj,
                             s.convergence_tol);

      // clusters touching a failure endpoint are the affected ones
      std::vector<int> affected;
      for (size_t ci = 0; ci < net.clusters.size(); ++ci) {
        const auto& members = net.clusters[ci].spec.members;
        const bool hit =
            std::find(members.begin(), members.end(), cs.event.a) != members.end() ||
            (cs.event.kind == FailureEvent::Kind::link &&
             std::find(members.begin(), members.end(), cs.event.b) != members.end());
        if (hit) affected.push_back(static_cast<int>(ci));
      }

      const std::vector<cplx>& zf = traj.states.back();
      json cluster_errors = json::array();
      double unaffected_max_error = 0.0;
      for (size_t ci = 0; ci < net.clusters.size(); ++ci) {
        std::vector<cplx> zc;
        for (int v : net.clusters[ci].spec.members) zc.push_back(zf[v]);
        const double err = formation_error(zc, net.clusters[ci].local_basis);
        cluster_errors.push_back(err);
        const bool is_affected =
            std::find(affected.begin(), affected.end(), static_cast<int>(ci)) !=
            affected.end();
        if (!is_affected) unaffected_max_error = std::max(unaffected_max_error, err);
      }

      double max_state = 0.0;
      for (const auto& z : traj.states)
        for (const cplx& x : z) max_state = std::max(max_state, std::abs(x));
      const bool bounded = !traj.diverged && max_state <= 10.0 * envelope;
      const bool unaffected_ok = unaffected_max_error < 1e-2;
      all_ok = all_ok && bounded && unaffected_ok;

      json ev;
      if (cs.event.kind == FailureEvent::Kind::link)
        ev = json{{"kind", "link"},
                  {"agents", json::array({s.agent_labels[cs.event.a],
                                          s.agent_labels[cs.event.b]})},
                  {"time", t_fail}};
      else
        ev = json{{"kind", "actuator"},
                  {"agent", s.agent_labels[cs.event.a]},
                  {"time", t_fail}};
      cases_json[cs.name] = json{{"event", ev},
                                 {"affected_clusters", affected},
                                 {"cluster_errors", cluster_errors},
                                 {"unaffected_max_error", unaffected_max_error},
                                 {"unaffected_converged", unaffected_ok},
                                 {"max_state_magnitude", max_state},
                                 {"bounded", bounded},
                                 {"diverged", traj.diverged}};
    }

    // the same link failure against the conventional weight matrix must break
    // the kernel/rank conditions
    const Topology topo = s.topology();
    const EdgeWeights w = synthesize_weights(topo, s.basis, s.seed);
    const ComplexLaplacian conv_l = build_laplacian(topo, w, s.basis);
    LiveSystem broken{conv_l.matrix, {}};
    broken = apply_failure(
        broken, topo,
        {FailureEvent::Kind::link, cluster_edge.first, cluster_edge.second, 0.0});
    const auto [r1, rx] = kernel_residuals(broken.a, s.basis.xi);
    const int rank = numerical_rank(broken.a);
    const double rtol = 1e-9 * broken.a.frobenius_norm();
    const bool violated = rank != s.n() - 2 || rx > rtol;

    json out{{"schema_version", 1},
             {"failure_time", t_fail},
             {"envelope", envelope},
             {"cases", cases_json},
             {"conventional_link_check",
              json{{"edge", json::array({s.agent_labels[cluster_edge.first],
                                         s.agent_labels[cluster_edge.second]})},
                   {"rank", rank},
                   {"expected_rank", s.n() - 2},
                   {"residual_xi", rx},
                   {"residual_ones", r1},
                   {"residual_tol", rtol},
                   {"formation_conditions_violated", violated}}}};
    write_json(fs::path(out_dir) / "robustness.json", out);
    return all_ok && violated ? kExitOk : kExitSimulation;
  });
}

}  // namespace clf
