#include "qmas/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace qmas {

const char* to_string(McMode mode) { return mode == McMode::consensus ? "consensus" : "formation"; }

void validate(const McConfig& cfg) {
  if (cfg.samples < 1) {
    throw Error(ErrorCode::invalid_config, "samples must be at least 1");
  }
  if (cfg.agents_min < 2 || cfg.agents_max > 32 || cfg.agents_min > cfg.agents_max) {
    throw Error(ErrorCode::invalid_config, "agent range must lie within [2, 32]");
  }
  if (!(cfg.delta_total > 0.0)) {
    throw Error(ErrorCode::invalid_config, "delta_total must be positive");
  }
  if (cfg.perturbation < 0.0) {
    throw Error(ErrorCode::invalid_config, "perturbation must be nonnegative");
  }
  if (!(cfg.step > 0.0) || cfg.record_stride < 1) {
    throw Error(ErrorCode::invalid_config, "step must be positive and record_stride at least 1");
  }
  if (cfg.max_basin_retries < 0) {
    throw Error(ErrorCode::invalid_config, "max_basin_retries must be nonnegative");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// uniform in [0, 1), with the full 53-bit mantissa
double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// strictly inside (0, 1), safe to feed into log
double uniform01_open(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

Graph scenario_graph(McMode mode, int n) {
  if (n == 2) return Graph::from_edges(2, {{1, 2}});
  return Graph::generate(mode == McMode::consensus ? GraphKind::ring : GraphKind::triangulated_polygon, n);
}

}  // namespace

std::uint64_t scenario_seed(std::uint64_t master_seed, std::uint64_t index, std::uint64_t attempt) {
  std::uint64_t state = master_seed;
  std::uint64_t h = splitmix64(state);
  state ^= 0x9E3779B97F4A7C15ull * (index + 1);
  h ^= splitmix64(state);
  state ^= 0xD1B54A32D192ED03ull * (attempt + 1);
  h ^= splitmix64(state);
  return h;
}

SimConfig sample_scenario(const McConfig& cfg, int index) {
  int retries = 0;
  return sample_scenario(cfg, index, retries);
}

SimConfig sample_scenario(const McConfig& cfg, int index, int& retries_out) {
  validate(cfg);
  if (index < 0 || index >= cfg.samples) {
    throw Error(ErrorCode::invalid_argument, "sample index out of range");
  }

  for (int attempt = 0; attempt <= cfg.max_basin_retries; ++attempt) {
    std::mt19937_64 eng(scenario_seed(cfg.master_seed, static_cast<std::uint64_t>(index),
                                      static_cast<std::uint64_t>(attempt)));

    const int span = cfg.agents_max - cfg.agents_min + 1;
    const int n = cfg.agents_min + static_cast<int>(uniform01(eng) * span);

    // uniform on the simplex: normalized exponentials, scaled to delta_total
    Eigen::VectorXd weights(n);
    for (int i = 0; i < n; ++i) weights(i) = -std::log(uniform01_open(eng));
    const Eigen::VectorXd deltas = cfg.delta_total * weights / weights.sum();

    std::vector<double> thetas(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) thetas[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * uniform01(eng);

    Eigen::VectorXd x0(2 * n);
    Eigen::VectorXd base(2 * n);
    for (int i = 0; i < n; ++i) {
      const double ang = 2.0 * std::numbers::pi * i / n;
      base(2 * i) = std::cos(ang);
      base(2 * i + 1) = std::sin(ang);
      x0(2 * i) = base(2 * i) + cfg.perturbation * (2.0 * uniform01(eng) - 1.0);
      x0(2 * i + 1) = base(2 * i + 1) + cfg.perturbation * (2.0 * uniform01(eng) - 1.0);
    }

    SimConfig sim;
    sim.graph = scenario_graph(cfg.mode, n);
    sim.mode = cfg.mode == McMode::consensus ? SimMode::consensus_quantized : SimMode::formation_quantized;
    sim.sets.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      sim.sets.push_back(ActionSet::triangle(deltas(i), thetas[static_cast<size_t>(i)]));
    }
    sim.x0 = Stacked::agents(std::move(x0), 2);
    sim.step = cfg.step;
    sim.horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(sim.mode);
    sim.record_stride = cfg.record_stride;

    if (cfg.mode == McMode::formation) {
      // desired lengths are the chords of the unperturbed regular polygon
      const Stacked base_stack = Stacked::agents(base, 2);
      const Stacked z_base = relative_positions(sim.graph, base_stack);
      Eigen::VectorXd d(sim.graph.n_edges());
      for (int k = 0; k < sim.graph.n_edges(); ++k) {
        d(k) = z_base.block(k).norm();
      }
      sim.spec = FormationSpec::from_distances(std::move(d));

      const double c1 = sim.spec->distances.cwiseProduct(sim.spec->distances).minCoeff();
      const Stacked z0 = relative_positions(sim.graph, sim.x0);
      const double e0 = formation_error(z0, *sim.spec).norm();
      if (e0 >= c1) {
        ++retries_out;
        continue;
      }
    }
    return sim;
  }
  throw Error(ErrorCode::invalid_config,
              "sample " + std::to_string(index) + " found no start inside the basin after " +
                  std::to_string(cfg.max_basin_retries) + " retries; lower the perturbation");
}

namespace {

struct SampleOutcome {
  std::vector<double> series;  // tracked error norm on the shared grid
  double steady = 0.0;
  double bound = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  bool stationary = false;
  long slack_violations = 0;
  int retries = 0;
};

struct SampleFailure {
  int index;
  std::uint64_t seed;
  std::string message;
};

SampleOutcome run_sample(const McConfig& cfg, int index, size_t grid_size) {
  SampleOutcome out;
  SimConfig sim = sample_scenario(cfg, index, out.retries);

  if (cfg.mode == McMode::consensus) {
    out.bound = consensus_bound(sim.sets);
  } else {
    const FormationBound fb = formation_bound(sim.sets, *sim.spec);
    if (fb.degenerate()) {
      out.degenerate = true;
    } else {
      out.bound = *fb.bound;
    }
  }

  const Trajectory traj = run(sim);
  out.steady = traj.steady_state_error;
  out.stationary = traj.terminated_stationary;
  out.slack_violations = traj.slack_violations;

  // recorded entries sit on the grid except for a possible off-stride final
  // point (latch or horizon end); hold the final value out to the horizon
  const auto& tracked = cfg.mode == McMode::consensus ? traj.z_norms : traj.e_norms;
  out.series.assign(grid_size, tracked.back());
  size_t slot = 0;
  for (size_t r = 0; r < tracked.size() && slot < grid_size; ++r) {
    const long step_index = std::llround(traj.times[r] / sim.step);
    if (step_index % sim.record_stride == 0) out.series[slot++] = tracked[r];
  }
  return out;
}

}  // namespace

McSummary run_batch(const McConfig& cfg, int threads) {
  validate(cfg);
  const double horizon = cfg.horizon > 0.0
                             ? cfg.horizon
                             : default_horizon(cfg.mode == McMode::consensus ? SimMode::consensus_quantized
                                                                             : SimMode::formation_quantized);
  const long n_steps = std::llround(horizon / cfg.step);
  const size_t grid_size = static_cast<size_t>(n_steps / cfg.record_stride) + 1;

  int worker_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::clamp(worker_count, 1, cfg.samples);

  std::vector<SampleOutcome> outcomes(static_cast<size_t>(cfg.samples));
  std::vector<SampleFailure> failures;
  std::mutex failure_mutex;
  std::atomic<int> next{0};

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.samples) return;
      try {
        outcomes[static_cast<size_t>(i)] = run_sample(cfg, i, grid_size);
      } catch (const Error& err) {
        std::lock_guard lock(failure_mutex);
        failures.push_back({i, scenario_seed(cfg.master_seed, static_cast<std::uint64_t>(i), 0), err.what()});
      }
    }
  };

  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(worker_count));
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!failures.empty()) {
    auto worst = std::min_element(failures.begin(), failures.end(),
                                  [](const auto& a, const auto& b) { return a.index < b.index; });
    throw Error(ErrorCode::numerical_divergence,
                "sample " + std::to_string(worst->index) + " (seed " + std::to_string(worst->seed) +
                    ") failed: " + worst->message);
  }

  McSummary summary;
  summary.times.resize(grid_size);
  for (size_t g = 0; g < grid_size; ++g) {
    summary.times[g] = static_cast<double>(g) * cfg.record_stride * cfg.step;
  }
  summary.lower95.resize(grid_size);
  summary.upper95.resize(grid_size);
  summary.minimum.resize(grid_size);
  summary.maximum.resize(grid_size);
  summary.mean.resize(grid_size);

  const int s = cfg.samples;
  const int lo_rank = std::max(1, static_cast<int>(std::ceil(0.025 * s)));
  const int hi_rank = std::max(1, static_cast<int>(std::ceil(0.975 * s)));
  std::vector<double> column(static_cast<size_t>(s));
  for (size_t g = 0; g < grid_size; ++g) {
    double sum = 0.0;
    for (int i = 0; i < s; ++i) {
      column[static_cast<size_t>(i)] = outcomes[static_cast<size_t>(i)].series[g];
      sum += column[static_cast<size_t>(i)];
    }
    std::sort(column.begin(), column.end());
    summary.minimum[g] = column.front();
    summary.maximum[g] = column.back();
    summary.lower95[g] = column[static_cast<size_t>(lo_rank - 1)];
    summary.upper95[g] = column[static_cast<size_t>(hi_rank - 1)];
    summary.mean[g] = sum / s;
  }

  summary.steady_errors.resize(static_cast<size_t>(s));
  summary.sample_bounds.resize(static_cast<size_t>(s));
  int within = 0;
  double bound_max = -std::numeric_limits<double>::infinity();
  double bound_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < s; ++i) {
    const auto& o = outcomes[static_cast<size_t>(i)];
    summary.steady_errors[static_cast<size_t>(i)] = o.steady;
    summary.sample_bounds[static_cast<size_t>(i)] = o.bound;
    summary.total_basin_retries += o.retries;
    summary.slack_violations += o.slack_violations;
    if (o.stationary) ++summary.stationary_count;
    if (o.degenerate) {
      summary.bound_degenerate = true;
    } else {
      bound_max = std::max(bound_max, o.bound);
      bound_min = std::min(bound_min, o.bound);
      if (o.steady <= o.bound) ++within;
    }
  }
  summary.fraction_within_bound = static_cast<double>(within) / s;
  if (cfg.mode == McMode::consensus) {
    summary.bound = cfg.delta_total;  // every sample's action scales sum to this
    summary.bound_uniform = true;
  } else if (bound_max >= bound_min) {
    summary.bound = bound_max;
    summary.bound_uniform = (bound_max - bound_min) <= 1e-9;
  } else {
    summary.bound = std::numeric_limits<double>::quiet_NaN();  // all degenerate
    summary.bound_uniform = false;
  }
  return summary;
}

}  // namespace qmas
