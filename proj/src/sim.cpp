#include "qmas/sim.hpp"

#include <cmath>
#include <string>

namespace qmas {

bool is_quantized(SimMode mode) {
  return mode == SimMode::consensus_quantized || mode == SimMode::formation_quantized;
}

bool is_formation(SimMode mode) {
  return mode == SimMode::formation_quantized || mode == SimMode::formation_continuous;
}

const char* to_string(SimMode mode) {
  switch (mode) {
    case SimMode::consensus_quantized: return "consensus_quantized";
    case SimMode::consensus_continuous: return "consensus_continuous";
    case SimMode::formation_quantized: return "formation_quantized";
    case SimMode::formation_continuous: return "formation_continuous";
  }
  return "?";
}

std::optional<SimMode> sim_mode_from_string(const std::string& name) {
  if (name == "consensus_quantized" || name == "consensus") return SimMode::consensus_quantized;
  if (name == "consensus_continuous") return SimMode::consensus_continuous;
  if (name == "formation_quantized" || name == "formation") return SimMode::formation_quantized;
  if (name == "formation_continuous") return SimMode::formation_continuous;
  return std::nullopt;
}

double default_horizon(SimMode mode) { return is_formation(mode) ? 50.0 : 600.0; }

void validate(const SimConfig& cfg) {
  const int n = cfg.graph.n_agents();
  if (cfg.x0.layout != Layout::agent_major || cfg.x0.dim < 1 ||
      cfg.x0.data.size() != static_cast<Eigen::Index>(n) * cfg.x0.dim) {
    throw Error(ErrorCode::invalid_config, "x0 must be an agent-major stack of length N*m");
  }
  if (!(cfg.step > 0.0)) {
    throw Error(ErrorCode::invalid_config, "step must be positive");
  }
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(cfg.mode);
  if (!(cfg.step < horizon)) {
    throw Error(ErrorCode::invalid_config, "step must be smaller than the horizon");
  }
  if (cfg.record_stride < 1) {
    throw Error(ErrorCode::invalid_config, "record_stride must be at least 1");
  }
  if (is_quantized(cfg.mode)) {
    if (static_cast<int>(cfg.sets.size()) != n) {
      throw Error(ErrorCode::invalid_config,
                  "quantized modes need one action set per agent (" + std::to_string(cfg.sets.size()) +
                      " sets for " + std::to_string(n) + " agents)");
    }
    for (const auto& s : cfg.sets) {
      if (s.dim() != cfg.x0.dim) {
        throw Error(ErrorCode::invalid_config, "action set dimension does not match the state dimension");
      }
    }
  }
  if (is_formation(cfg.mode)) {
    if (!cfg.spec) {
      throw Error(ErrorCode::invalid_config, "formation modes need a FormationSpec");
    }
    if (cfg.spec->distances.size() != cfg.graph.n_edges()) {
      throw Error(ErrorCode::invalid_config,
                  "formation spec has " + std::to_string(cfg.spec->distances.size()) +
                      " distances for " + std::to_string(cfg.graph.n_edges()) + " edges");
    }
  }
}

namespace {

struct Workspace {
  int n, m, medges;
  Eigen::VectorXd z, e, field, u, d2;

  explicit Workspace(const SimConfig& cfg)
      : n(cfg.graph.n_agents()),
        m(cfg.x0.dim),
        medges(cfg.graph.n_edges()),
        z(static_cast<Eigen::Index>(cfg.graph.n_edges()) * cfg.x0.dim),
        e(cfg.graph.n_edges()),
        field(static_cast<Eigen::Index>(cfg.graph.n_agents()) * cfg.x0.dim),
        u(static_cast<Eigen::Index>(cfg.graph.n_agents()) * cfg.x0.dim) {
    if (cfg.spec) d2 = cfg.spec->distances.cwiseProduct(cfg.spec->distances);
  }

  // fills z, e (formation), field and u for the state x; returns sum_i |u_i|^2
  double controls_at(const SimConfig& cfg, const Eigen::VectorXd& x) {
    detail::relative_positions_into(cfg.graph, x, m, z);
    if (is_formation(cfg.mode)) {
      detail::formation_error_into(z, m, d2, e);
      detail::formation_field_into(cfg.graph, z, m, e, field);
    } else {
      detail::consensus_field_from_z_into(cfg.graph, z, m, field);
    }
    if (is_quantized(cfg.mode)) {
      for (int i = 0; i < n; ++i) {
        u.segment(static_cast<Eigen::Index>(i) * m, m) =
            cfg.sets[static_cast<size_t>(i)].nearest_select(field.segment(static_cast<Eigen::Index>(i) * m, m));
      }
    } else {
      u = field;
    }
    return u.squaredNorm();
  }
};

}  // namespace

std::pair<Stacked, Stacked> step_once(const SimConfig& cfg, const Stacked& x) {
  validate(cfg);
  if (x.layout != Layout::agent_major || x.data.size() != cfg.x0.data.size() || x.dim != cfg.x0.dim) {
    throw Error(ErrorCode::dimension_mismatch, "state does not match the configured stack shape");
  }
  if (!x.data.allFinite()) {
    throw Error(ErrorCode::numerical_divergence, "state contains NaN or Inf");
  }
  Workspace w(cfg);
  w.controls_at(cfg, x.data);
  Stacked u = Stacked::agents(w.u, x.dim);
  Stacked x_next = Stacked::agents(x.data + cfg.step * w.u, x.dim);
  return {std::move(x_next), std::move(u)};
}

Trajectory run(const SimConfig& cfg) {
  validate(cfg);
  const double h = cfg.step;
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(cfg.mode);
  const long n_steps = std::llround(horizon / h);
  const int stride = cfg.record_stride;
  const bool formation = is_formation(cfg.mode);
  const bool quantized = is_quantized(cfg.mode);
  const double lambda_max = cfg.graph.max_laplacian_eigenvalue();

  Workspace w(cfg);
  Eigen::VectorXd x = cfg.x0.data;

  Trajectory traj;
  traj.mode = cfg.mode;
  traj.n_agents = w.n;
  traj.dim = w.m;
  traj.times.reserve(static_cast<size_t>(n_steps / stride) + 2);

  double prev_lyap = 0.0;
  double prev_tracked = 0.0;
  double prev_uss = 0.0;

  for (long s = 0;; ++s) {
    if (!x.allFinite()) {
      throw Error(ErrorCode::numerical_divergence,
                  "state diverged at step " + std::to_string(s) + " (t = " +
                      std::to_string(static_cast<double>(s) * h) + ")");
    }
    const double uss = w.controls_at(cfg, x);

    const double z_norm = w.z.norm();
    const double e_norm = formation ? w.e.norm() : 0.0;
    const double lyap = formation ? 0.25 * w.e.squaredNorm() : 0.5 * w.z.squaredNorm();
    const double tracked = formation ? e_norm : z_norm;

    if (s > 0) {
      if (quantized && !formation) {
        // forward-Euler expansion of V(z): the linear term is nonpositive
        // whenever u is a nearest-neighbor selection, so any increase is
        // bounded by the second-order term
        const double slack = 0.5 * h * h * lambda_max * prev_uss;
        if (lyap - prev_lyap > slack) ++traj.slack_violations;
      } else if (!quantized && prev_tracked >= 1e-9) {
        traj.max_lyapunov_increase = std::max(traj.max_lyapunov_increase, lyap - prev_lyap);
      }
    }

    const bool stationary = quantized && w.u.isZero(0.0);
    const bool at_horizon = s == n_steps;
    if (s % stride == 0 || stationary || at_horizon) {
      if (traj.times.empty() || traj.times.back() < static_cast<double>(s) * h) {
        traj.times.push_back(static_cast<double>(s) * h);
        traj.states.push_back(x);
        traj.controls.push_back(w.u);
        traj.z_norms.push_back(z_norm);
        if (formation) traj.e_norms.push_back(e_norm);
        traj.lyapunov.push_back(lyap);
      }
    }
    if (stationary) {
      traj.terminated_stationary = true;
      break;
    }
    if (at_horizon) break;

    x += h * w.u;
    prev_lyap = lyap;
    prev_tracked = tracked;
    prev_uss = uss;
  }

  const auto& tracked_series = formation ? traj.e_norms : traj.z_norms;
  if (traj.terminated_stationary) {
    traj.steady_state_error = tracked_series.back();
  } else {
    const size_t count = tracked_series.size();
    const size_t tail = std::max<size_t>(1, static_cast<size_t>(std::ceil(0.1 * static_cast<double>(count))));
    double sum = 0.0;
    for (size_t i = count - tail; i < count; ++i) sum += tracked_series[i];
    traj.steady_state_error = sum / static_cast<double>(tail);
  }
  return traj;
}

}  // namespace qmas
