#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qmas/actions.hpp"
#include "qmas/error.hpp"
#include "qmas/graph.hpp"

namespace qmas {

enum class Layout { agent_major, edge_major };

/// Agent- or edge-stacked vector in R^{N*m} / R^{M*m}. Agent-major stacks
/// store agent 1's m components first. The layout tag travels with the data
/// so producers and consumers cannot be crossed silently.
struct Stacked {
  Eigen::VectorXd data;
  Layout layout = Layout::agent_major;
  int dim = 0;

  static Stacked agents(Eigen::VectorXd values, int dim);
  static Stacked edges(Eigen::VectorXd values, int dim);

  int count() const { return dim > 0 ? static_cast<int>(data.size()) / dim : 0; }
  auto block(int i) { return data.segment(static_cast<Eigen::Index>(i) * dim, dim); }
  auto block(int i) const { return data.segment(static_cast<Eigen::Index>(i) * dim, dim); }
};

/// Desired edge lengths, aligned with the graph's edge order.
struct FormationSpec {
  Eigen::VectorXd distances;

  static FormationSpec from_distances(Eigen::VectorXd d);
};

/// z_k = x_i - x_j for edge k = (i, j); the stacked form of (B^T (x) I_m) x,
/// computed edge by edge.
Stacked relative_positions(const Graph& g, const Stacked& x);

/// u = -(L (x) I_m) x, accumulated over edges.
Stacked consensus_field(const Graph& g, const Stacked& x);

/// e_k = |z_k|^2 - d_k^2.
Eigen::VectorXd formation_error(const Stacked& z, const FormationSpec& spec);

/// u = -(B (x) I_m) D_z e with D_z applied edgewise: agent i receives
/// -sum_k b_{i,k} z_k e_k.
Stacked formation_field(const Graph& g, const Stacked& z, const Eigen::VectorXd& e);

/// Applies each agent's nearest_select to its slice of the field.
Stacked quantize_field(const Stacked& field, const std::vector<ActionSet>& sets);

/// Practical-stability radius for consensus: the sum of the per-agent
/// Voronoi-zero bounds.
double consensus_bound(const std::vector<ActionSet>& sets);

/// Constants of the formation error bound. The bound delta / c2 only exists
/// when the desired lengths are not all equal; otherwise c2 vanishes and the
/// record is degenerate.
struct FormationBound {
  double delta = 0.0;  // sum of per-agent Voronoi-zero bounds
  double c1 = 0.0;     // min_k d_k^2
  double c2 = 0.0;     // sqrt(sum_k (d_k^2 - c1))
  std::optional<double> bound;

  bool degenerate() const { return !bound.has_value(); }
  /// The bound value, or a DegenerateBound error carrying delta / c1 as a
  /// diagnostic fallback scale.
  double require() const;
};

FormationBound formation_bound(const std::vector<ActionSet>& sets, const FormationSpec& spec);

/// 1 / sqrt(lambda_2): for any z in the image of (B^T (x) I_m),
/// |z| <= spectral_ratio(g) * |(B (x) I_m) z|.
double spectral_ratio(const Graph& g);

namespace detail {

// Allocation-free kernels shared with the integrator. Sizes are trusted.
void relative_positions_into(const Graph& g, const Eigen::VectorXd& x, int dim, Eigen::VectorXd& z);
void consensus_field_from_z_into(const Graph& g, const Eigen::VectorXd& z, int dim, Eigen::VectorXd& field);
void formation_error_into(const Eigen::VectorXd& z, int dim, const Eigen::VectorXd& d_squared, Eigen::VectorXd& e);
void formation_field_into(const Graph& g, const Eigen::VectorXd& z, int dim, const Eigen::VectorXd& e, Eigen::VectorXd& field);

}  // namespace detail

}  // namespace qmas
