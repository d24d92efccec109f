#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qmas/error.hpp"

namespace qmas {

enum class GraphKind { ring, complete, triangulated_polygon };

/// Oriented undirected communication graph. Edges are stored as 1-based
/// (i, j) pairs where i carries the positive sign in the incidence matrix.
/// Construction validates connectivity, so every Graph instance is connected.
/// Immutable after construction and safe to share across threads.
class Graph {
 public:
  static Graph from_edges(int n_agents, std::vector<std::pair<int, int>> edges);
  static Graph generate(GraphKind kind, int n_agents);

  int n_agents() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// N x M incidence matrix with entries in {-1, 0, +1}.
  const Eigen::MatrixXi& incidence() const { return incidence_; }

  /// L = B * B^T, computed in integer arithmetic.
  Eigen::MatrixXi laplacian() const;

  /// Smallest nonzero Laplacian eigenvalue (lambda_2 > 0 by connectivity).
  double algebraic_connectivity() const { return lambda2_; }

  /// Largest Laplacian eigenvalue; equals the squared spectral norm of B^T.
  double max_laplacian_eigenvalue() const { return lambda_max_; }

 private:
  Graph() = default;

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  Eigen::MatrixXi incidence_;
  double lambda2_ = 0.0;
  double lambda_max_ = 0.0;
};

// JSON form: {"n": N, "edges": [[i, j], ...]} with 1-based endpoints.
void to_json(nlohmann::json& j, const Graph& g);
void from_json(const nlohmann::json& j, Graph& g);

}  // namespace qmas
