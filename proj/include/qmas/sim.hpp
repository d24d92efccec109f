#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "qmas/control.hpp"

namespace qmas {

enum class SimMode {
  consensus_quantized,
  consensus_continuous,
  formation_quantized,
  formation_continuous,
};

bool is_quantized(SimMode mode);
bool is_formation(SimMode mode);
const char* to_string(SimMode mode);
std::optional<SimMode> sim_mode_from_string(const std::string& name);

/// Defaults validated against batch behavior: the quantized consensus tail
/// needs a long window because agents with small action sets crawl, while
/// formation runs settle quickly from inside the basin.
double default_horizon(SimMode mode);
inline constexpr double kDefaultStep = 1e-3;
inline constexpr int kDefaultRecordStride = 100;

struct SimConfig {
  Graph graph;
  std::vector<ActionSet> sets;  // required for quantized modes
  SimMode mode = SimMode::consensus_quantized;
  std::optional<FormationSpec> spec;  // required for formation modes
  Stacked x0;
  double step = kDefaultStep;
  double horizon = 0.0;  // 0 -> default_horizon(mode)
  int record_stride = kDefaultRecordStride;
};

/// Time-sampled record of one run. All recorded lists share the same length;
/// times increase strictly. For quantized modes the run latches as soon as
/// every agent selects the zero action: the state can never change again
/// under the forward-Euler update, so integration stops there.
struct Trajectory {
  SimMode mode = SimMode::consensus_quantized;
  int n_agents = 0;
  int dim = 0;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;    // agent-major stacks
  std::vector<Eigen::VectorXd> controls;  // agent-major stacks
  std::vector<double> z_norms;
  std::vector<double> e_norms;  // formation modes only, else empty
  std::vector<double> lyapunov;  // V(z) = z'z/2 or J(e) = <e,e>/4 per mode

  bool terminated_stationary = false;
  /// Mean tracked error norm (|z| or |e|) over the final tenth of the
  /// recorded samples; the latched value when the run ended stationary.
  double steady_state_error = 0.0;

  /// Quantized consensus: count of steps where the Lyapunov increase exceeded
  /// the Euler slack (h^2/2) |B^T|^2 sum_i |u_i|^2. Zero on a correct run.
  long slack_violations = 0;
  /// Continuous modes: largest per-step Lyapunov increase observed while the
  /// tracked error norm was still above 1e-9.
  double max_lyapunov_increase = 0.0;
};

/// One forward-Euler step from state x: returns (x + h u, u) with u the
/// mode's control law evaluated at x.
std::pair<Stacked, Stacked> step_once(const SimConfig& cfg, const Stacked& x);

/// Integrates until the horizon, the stationarity latch (quantized modes), or
/// a NumericalDivergence error carrying the offending step index. Pure
/// function of the config: identical configs give bit-identical trajectories.
Trajectory run(const SimConfig& cfg);

void validate(const SimConfig& cfg);

}  // namespace qmas
