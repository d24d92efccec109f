#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qmas/montecarlo.hpp"
#include "qmas/sim.hpp"

namespace qmas {

/// Union of everything a config file or command-line flag can set. Flags win
/// over file values, file values win over defaults.
struct Options {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<int> agents;
  std::optional<int> agents_min, agents_max;
  std::optional<int> samples;
  std::optional<double> step, horizon;
  std::optional<int> record_stride;
  std::optional<double> delta_total;
  std::optional<double> perturbation;
  std::optional<int> max_basin_retries;

  std::optional<Graph> graph;
  std::optional<std::vector<ActionSet>> sets;
  std::optional<Eigen::VectorXd> distances;
  std::optional<Eigen::VectorXd> x0;  // agent-major, dimension 2
};

/// Parses the documented JSON config schema; unknown keys are rejected.
Options load_options(const std::string& path);
/// Overlays non-empty fields of `flags` onto `base`.
Options merge_options(Options base, const Options& flags);

/// A single run resolved from options: deterministic scenario construction
/// mirrors the Monte Carlo drawing (seeded rotations and perturbations), with
/// explicit graph / sets / x0 / distances taking precedence when provided.
struct SingleRun {
  SimConfig sim;
  std::uint64_t seed = 0;
  int basin_retries = 0;
};

SingleRun build_single_run(SimMode fallback_mode, const Options& opts);
McConfig build_mc_config(McMode fallback_mode, const Options& opts);

/// Fully resolved configuration echo for emitted JSON summaries.
nlohmann::json single_run_config_json(const SingleRun& run);

/// Bound report for the CLI `bound` subcommand: delta, the formation
/// constants when distances are known, and the spectral variant.
nlohmann::json bound_report_json(const Graph& g, const std::vector<ActionSet>& sets,
                                 const std::optional<FormationSpec>& spec);

}  // namespace qmas
