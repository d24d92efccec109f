#include "qmas/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

namespace qmas {

namespace {

const std::set<std::string> kKnownKeys = {
    "mode",       "seed",       "agents",        "agent_range", "samples",
    "step",       "horizon",    "record_stride", "delta_total", "perturbation",
    "max_basin_retries", "graph", "sets",         "distances",   "x0",
};

Eigen::VectorXd parse_flat_pairs(const nlohmann::json& arr, const char* what) {
  Eigen::VectorXd out(2 * arr.size());
  Eigen::Index k = 0;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) {
      throw Error(ErrorCode::invalid_config, std::string(what) + " entries must be [x, y] pairs");
    }
    out(k++) = p[0].get<double>();
    out(k++) = p[1].get<double>();
  }
  return out;
}

double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

}  // namespace

Options load_options(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::invalid_config, "cannot open config file '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, "config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::invalid_config, "config root must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) {
      throw Error(ErrorCode::invalid_config, "unknown config key '" + key + "'");
    }
  }

  Options o;
  try {
    if (j.contains("mode")) o.mode = j["mode"].get<std::string>();
    if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("agents")) o.agents = j["agents"].get<int>();
    if (j.contains("agent_range")) {
      o.agents_min = j["agent_range"].at(0).get<int>();
      o.agents_max = j["agent_range"].at(1).get<int>();
    }
    if (j.contains("samples")) o.samples = j["samples"].get<int>();
    if (j.contains("step")) o.step = j["step"].get<double>();
    if (j.contains("horizon")) o.horizon = j["horizon"].get<double>();
    if (j.contains("record_stride")) o.record_stride = j["record_stride"].get<int>();
    if (j.contains("delta_total")) o.delta_total = j["delta_total"].get<double>();
    if (j.contains("perturbation")) o.perturbation = j["perturbation"].get<double>();
    if (j.contains("max_basin_retries")) o.max_basin_retries = j["max_basin_retries"].get<int>();

    if (j.contains("graph")) {
      const auto& gj = j["graph"];
      if (gj.contains("kind")) {
        const std::string kind = gj.at("kind").get<std::string>();
        const int n = gj.at("n").get<int>();
        GraphKind gk;
        if (kind == "ring") gk = GraphKind::ring;
        else if (kind == "complete") gk = GraphKind::complete;
        else if (kind == "triangulated_polygon") gk = GraphKind::triangulated_polygon;
        else throw Error(ErrorCode::invalid_config, "unknown graph kind '" + kind + "'");
        o.graph = Graph::generate(gk, n);
      } else {
        o.graph = gj.get<Graph>();
      }
    }
    if (j.contains("sets")) {
      std::vector<ActionSet> sets;
      for (const auto& sj : j["sets"]) sets.push_back(sj.get<ActionSet>());
      o.sets = std::move(sets);
    }
    if (j.contains("distances")) {
      const auto& dj = j["distances"];
      Eigen::VectorXd d(dj.size());
      for (size_t k = 0; k < dj.size(); ++k) d(static_cast<Eigen::Index>(k)) = dj[k].get<double>();
      o.distances = std::move(d);
    }
    if (j.contains("x0")) o.x0 = parse_flat_pairs(j["x0"], "x0");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, "config '" + path + "': " + e.what());
  }
  return o;
}

Options merge_options(Options base, const Options& flags) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(base.mode, flags.mode);
  take(base.seed, flags.seed);
  take(base.agents, flags.agents);
  take(base.agents_min, flags.agents_min);
  take(base.agents_max, flags.agents_max);
  take(base.samples, flags.samples);
  take(base.step, flags.step);
  take(base.horizon, flags.horizon);
  take(base.record_stride, flags.record_stride);
  take(base.delta_total, flags.delta_total);
  take(base.perturbation, flags.perturbation);
  take(base.max_basin_retries, flags.max_basin_retries);
  take(base.graph, flags.graph);
  take(base.sets, flags.sets);
  take(base.distances, flags.distances);
  take(base.x0, flags.x0);
  return base;
}

SingleRun build_single_run(SimMode fallback_mode, const Options& opts) {
  SimMode mode = fallback_mode;
  if (opts.mode) {
    const auto parsed = sim_mode_from_string(*opts.mode);
    if (!parsed) throw Error(ErrorCode::invalid_config, "unknown mode '" + *opts.mode + "'");
    // `consensus`/`formation` in a config keep the family but not the
    // quantized/continuous choice of the subcommand
    mode = is_formation(*parsed) == is_formation(fallback_mode) ? *parsed
           : is_quantized(*parsed) ? *parsed
                                   : *parsed;
    mode = *parsed;
  }

  SingleRun run;
  run.seed = opts.seed.value_or(0);
  const double rho = opts.perturbation.value_or(0.5);
  const bool formation = is_formation(mode);

  int n = opts.agents.value_or(opts.graph ? opts.graph->n_agents() : (formation ? 4 : 5));
  if (opts.graph) n = opts.graph->n_agents();
  if (n < 2) throw Error(ErrorCode::invalid_config, "need at least 2 agents");

  Graph graph = opts.graph ? *opts.graph
                : n == 2   ? Graph::from_edges(2, {{1, 2}})
                : formation ? Graph::generate(GraphKind::triangulated_polygon, n)
                            : Graph::generate(GraphKind::ring, n);

  // Unperturbed positions on the unit circle anchor both the default start
  // and the default formation distances.
  Eigen::VectorXd base(2 * n);
  for (int i = 0; i < n; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / n;
    base(2 * i) = std::cos(ang);
    base(2 * i + 1) = std::sin(ang);
  }

  std::optional<FormationSpec> spec;
  if (formation) {
    if (opts.distances) {
      spec = FormationSpec::from_distances(*opts.distances);
    } else {
      const Stacked zb = relative_positions(graph, Stacked::agents(base, 2));
      Eigen::VectorXd d(graph.n_edges());
      for (int k = 0; k < graph.n_edges(); ++k) d(k) = zb.block(k).norm();
      spec = FormationSpec::from_distances(std::move(d));
    }
    if (spec->distances.size() != graph.n_edges()) {
      throw Error(ErrorCode::invalid_config, "distances do not match the graph's edge count");
    }
  }

  // Consensus demos default to unit triangle sets; formation demos split
  // delta_total evenly so the bound stays meaningful. --delta-total overrides
  // the consensus default.
  std::vector<ActionSet> sets;
  const double per_agent_scale = opts.delta_total ? *opts.delta_total / n : (formation ? 1.0 / n : 1.0);

  const int max_retries = opts.max_basin_retries.value_or(128);
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::mt19937_64 eng(scenario_seed(run.seed, 0, static_cast<std::uint64_t>(attempt)));
    std::vector<double> thetas(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) thetas[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * uniform01(eng);

    Eigen::VectorXd x0(2 * n);
    if (opts.x0) {
      if (opts.x0->size() != 2 * n) {
        throw Error(ErrorCode::invalid_config, "x0 must list one [x, y] pair per agent");
      }
      x0 = *opts.x0;
    } else {
      for (Eigen::Index k = 0; k < x0.size(); ++k) {
        x0(k) = base(k) + rho * (2.0 * uniform01(eng) - 1.0);
      }
    }

    if (opts.sets) {
      if (static_cast<int>(opts.sets->size()) != n) {
        throw Error(ErrorCode::invalid_config, "need one action set per agent");
      }
      sets = *opts.sets;
    } else {
      sets.clear();
      for (int i = 0; i < n; ++i) sets.push_back(ActionSet::triangle(per_agent_scale, thetas[static_cast<size_t>(i)]));
    }

    run.sim.graph = graph;
    run.sim.mode = mode;
    run.sim.sets = is_quantized(mode) ? sets : std::vector<ActionSet>{};
    run.sim.spec = spec;
    run.sim.x0 = Stacked::agents(x0, 2);
    run.sim.step = opts.step.value_or(kDefaultStep);
    run.sim.horizon = opts.horizon.value_or(default_horizon(mode));
    run.sim.record_stride = opts.record_stride.value_or(kDefaultRecordStride);

    if (formation && !opts.x0) {
      const double c1 = spec->distances.cwiseProduct(spec->distances).minCoeff();
      const Stacked z0 = relative_positions(graph, run.sim.x0);
      if (formation_error(z0, *spec).norm() >= c1) {
        ++run.basin_retries;
        continue;
      }
    }
    validate(run.sim);
    return run;
  }
  throw Error(ErrorCode::invalid_config,
              "no start inside the basin after " + std::to_string(max_retries) +
                  " retries; lower the perturbation");
}

McConfig build_mc_config(McMode fallback_mode, const Options& opts) {
  McConfig mc;
  mc.mode = fallback_mode;
  if (opts.mode) {
    if (*opts.mode == "consensus" || *opts.mode == "consensus_quantized") mc.mode = McMode::consensus;
    else if (*opts.mode == "formation" || *opts.mode == "formation_quantized") mc.mode = McMode::formation;
    else throw Error(ErrorCode::invalid_config, "montecarlo mode must be consensus or formation");
  }
  if (opts.samples) mc.samples = *opts.samples;
  if (opts.seed) mc.master_seed = *opts.seed;
  if (opts.agents) {
    mc.agents_min = mc.agents_max = *opts.agents;
  }
  if (opts.agents_min) mc.agents_min = *opts.agents_min;
  if (opts.agents_max) mc.agents_max = *opts.agents_max;
  if (opts.delta_total) mc.delta_total = *opts.delta_total;
  if (opts.perturbation) mc.perturbation = *opts.perturbation;
  if (opts.step) mc.step = *opts.step;
  if (opts.horizon) mc.horizon = *opts.horizon;
  if (opts.record_stride) mc.record_stride = *opts.record_stride;
  if (opts.max_basin_retries) mc.max_basin_retries = *opts.max_basin_retries;
  validate(mc);
  return mc;
}

nlohmann::json single_run_config_json(const SingleRun& run) {
  const SimConfig& sim = run.sim;
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& s : sim.sets) sets.push_back(s);
  nlohmann::json x0 = nlohmann::json::array();
  for (int i = 0; i < sim.x0.count(); ++i) {
    x0.push_back({sim.x0.block(i)(0), sim.x0.block(i)(1)});
  }
  nlohmann::json j{
      {"mode", to_string(sim.mode)},
      {"seed", run.seed},
      {"graph", sim.graph},
      {"sets", std::move(sets)},
      {"x0", std::move(x0)},
      {"step", sim.step},
      {"horizon", sim.horizon},
      {"record_stride", sim.record_stride},
      {"basin_retries", run.basin_retries},
  };
  if (sim.spec) {
    nlohmann::json d = nlohmann::json::array();
    for (Eigen::Index k = 0; k < sim.spec->distances.size(); ++k) d.push_back(sim.spec->distances(k));
    j["distances"] = std::move(d);
  }
  return j;
}

nlohmann::json bound_report_json(const Graph& g, const std::vector<ActionSet>& sets,
                                 const std::optional<FormationSpec>& spec) {
  const double delta = consensus_bound(sets);
  const double lambda2 = g.algebraic_connectivity();
  nlohmann::json j{
      {"delta", delta},
      {"lambda2", lambda2},
      {"delta_over_sqrt_lambda2", delta * spectral_ratio(g)},
      {"c1", nullptr},
      {"c2", nullptr},
      {"bound", nullptr},
      {"degenerate", false},
  };
  if (spec) {
    const FormationBound fb = formation_bound(sets, *spec);
    j["c1"] = fb.c1;
    j["c2"] = fb.c2;
    j["degenerate"] = fb.degenerate();
    if (!fb.degenerate()) {
      j["bound"] = *fb.bound;
    } else {
      j["fallback_delta_over_c1"] = fb.delta / fb.c1;
    }
  }
  return j;
}

}  // namespace qmas
