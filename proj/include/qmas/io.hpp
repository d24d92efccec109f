#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qmas/montecarlo.hpp"
#include "qmas/sim.hpp"

namespace qmas {

/// Shortest round-trip decimal form; locale-independent and deterministic.
std::string format_double(double value);

/// Header: t,x_1_1..x_N_m,u_1_1..u_N_m,z_norm,e_norm,lyapunov; one row per
/// recorded sample. Consensus runs have no error vector, so e_norm is nan.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Header: t,lower95,upper95,min,max,mean.
void write_envelope_csv(std::ostream& os, const McSummary& summary);

nlohmann::json mc_config_json(const McConfig& cfg);
nlohmann::json mc_summary_json(const McConfig& cfg, const McSummary& summary);

}  // namespace qmas
