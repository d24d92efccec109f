#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmas/sim.hpp"

namespace qmas {

enum class McMode { consensus, formation };

const char* to_string(McMode mode);

/// Batch protocol: randomized agent count, ring (consensus) or fan-triangulated
/// polygon (formation) topology, equidistant circle starts with a uniform
/// per-coordinate perturbation, per-agent triangle action sets whose scales
/// are drawn uniformly on the simplex and sum to delta_total.
struct McConfig {
  int samples = 1000;
  std::uint64_t master_seed = 0;
  McMode mode = McMode::consensus;
  int agents_min = 3;
  int agents_max = 7;
  double delta_total = 1.0;
  double perturbation = 0.5;
  double step = kDefaultStep;
  double horizon = 0.0;  // 0 -> default for the mode
  int record_stride = kDefaultRecordStride;
  /// Formation samples must start inside |e(0)| < c1; draws outside are
  /// resampled with a fresh attempt-salted seed, at most this many times.
  int max_basin_retries = 128;
};

struct McSummary {
  std::vector<double> times;
  // pointwise over samples, nearest-rank percentiles for the 95% band
  std::vector<double> lower95, upper95, minimum, maximum, mean;

  double bound = 0.0;          // shared practical-stability radius (max over samples)
  bool bound_uniform = true;   // all per-sample bounds equal (to 1e-9)
  bool bound_degenerate = false;  // some sample had c2 = 0 (no formation bound)
  double fraction_within_bound = 0.0;  // steady error <= own bound; degenerate counts as outside

  std::vector<double> steady_errors;  // per sample
  std::vector<double> sample_bounds;  // per sample; NaN where degenerate

  long total_basin_retries = 0;
  long slack_violations = 0;
  int stationary_count = 0;
};

/// Deterministic scenario for one sample index: identical (config, index)
/// always yields the identical SimConfig, independent of threading.
SimConfig sample_scenario(const McConfig& cfg, int index);
SimConfig sample_scenario(const McConfig& cfg, int index, int& retries_out);

std::uint64_t scenario_seed(std::uint64_t master_seed, std::uint64_t index, std::uint64_t attempt);

/// Runs all samples (threads <= 0 picks the hardware count), then reduces in
/// sample order so the result is bit-identical for any degree of parallelism.
/// Samples that latch early are extended on the recording grid by holding
/// their final value. A NumericalDivergence in any sample fails the batch,
/// carrying the lowest failing index and its seed.
McSummary run_batch(const McConfig& cfg, int threads = 0);

void validate(const McConfig& cfg);

}  // namespace qmas
