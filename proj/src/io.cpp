#include "qmas/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

namespace qmas {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (int i = 1; i <= traj.n_agents; ++i) {
    for (int c = 1; c <= traj.dim; ++c) os << ",x_" << i << "_" << c;
  }
  for (int i = 1; i <= traj.n_agents; ++i) {
    for (int c = 1; c <= traj.dim; ++c) os << ",u_" << i << "_" << c;
  }
  os << ",z_norm,e_norm,lyapunov\n";

  const bool has_e = !traj.e_norms.empty();
  for (size_t r = 0; r < traj.times.size(); ++r) {
    os << format_double(traj.times[r]);
    for (Eigen::Index k = 0; k < traj.states[r].size(); ++k) os << "," << format_double(traj.states[r](k));
    for (Eigen::Index k = 0; k < traj.controls[r].size(); ++k) os << "," << format_double(traj.controls[r](k));
    os << "," << format_double(traj.z_norms[r]);
    os << "," << (has_e ? format_double(traj.e_norms[r]) : "nan");
    os << "," << format_double(traj.lyapunov[r]) << "\n";
  }
}

void write_envelope_csv(std::ostream& os, const McSummary& summary) {
  os << "t,lower95,upper95,min,max,mean\n";
  for (size_t g = 0; g < summary.times.size(); ++g) {
    os << format_double(summary.times[g]) << "," << format_double(summary.lower95[g]) << ","
       << format_double(summary.upper95[g]) << "," << format_double(summary.minimum[g]) << ","
       << format_double(summary.maximum[g]) << "," << format_double(summary.mean[g]) << "\n";
  }
}

nlohmann::json mc_config_json(const McConfig& cfg) {
  const SimMode sim_mode =
      cfg.mode == McMode::consensus ? SimMode::consensus_quantized : SimMode::formation_quantized;
  return nlohmann::json{
      {"samples", cfg.samples},
      {"seed", cfg.master_seed},
      {"mode", to_string(cfg.mode)},
      {"agent_range", {cfg.agents_min, cfg.agents_max}},
      {"delta_total", cfg.delta_total},
      {"perturbation", cfg.perturbation},
      {"step", cfg.step},
      {"horizon", cfg.horizon > 0.0 ? cfg.horizon : default_horizon(sim_mode)},
      {"record_stride", cfg.record_stride},
      {"max_basin_retries", cfg.max_basin_retries},
  };
}

nlohmann::json mc_summary_json(const McConfig& cfg, const McSummary& summary) {
  double steady_max = 0.0;
  double steady_sum = 0.0;
  for (double v : summary.steady_errors) {
    steady_max = std::max(steady_max, v);
    steady_sum += v;
  }
  std::vector<double> sorted = summary.steady_errors;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const size_t p975 = std::max<size_t>(1, static_cast<size_t>(std::ceil(0.975 * static_cast<double>(n))));

  nlohmann::json j{
      {"config", mc_config_json(cfg)},
      {"bound", summary.bound_degenerate && !(summary.bound == summary.bound)
                    ? nlohmann::json(nullptr)
                    : nlohmann::json(summary.bound)},
      {"bound_uniform", summary.bound_uniform},
      {"bound_degenerate", summary.bound_degenerate},
      {"fraction_within_bound", summary.fraction_within_bound},
      {"steady_error_max", steady_max},
      {"steady_error_mean", steady_sum / static_cast<double>(n)},
      {"steady_error_p975", sorted[p975 - 1]},
      {"stationary_count", summary.stationary_count},
      {"total_basin_retries", summary.total_basin_retries},
      {"slack_violations", summary.slack_violations},
  };
  return j;
}

}  // namespace qmas
