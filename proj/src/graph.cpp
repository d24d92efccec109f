#include "qmas/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

namespace qmas {

namespace {

void check_connected(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i - 1].push_back(j - 1);
    adj[j - 1].push_back(i - 1);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::disconnected,
                "graph with " + std::to_string(n) + " agents is not connected");
  }
}

}  // namespace

Graph Graph::from_edges(int n_agents, std::vector<std::pair<int, int>> edges) {
  if (n_agents < 2) {
    throw Error(ErrorCode::invalid_argument, "need at least 2 agents");
  }
  if (edges.empty()) {
    throw Error(ErrorCode::disconnected, "graph without edges is not connected");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : edges) {
    if (i < 1 || i > n_agents || j < 1 || j > n_agents) {
      throw Error(ErrorCode::invalid_argument,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) +
                      ") has endpoint outside 1.." + std::to_string(n_agents));
    }
    if (i == j) {
      throw Error(ErrorCode::self_loop, "edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    // duplicates are rejected regardless of orientation
    auto key = std::minmax(i, j);
    if (!seen.insert({key.first, key.second}).second) {
      throw Error(ErrorCode::duplicate_edge,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) + ") repeats an earlier edge");
    }
  }
  check_connected(n_agents, edges);

  Graph g;
  g.n_ = n_agents;
  g.edges_ = std::move(edges);
  const int m = g.n_edges();
  g.incidence_ = Eigen::MatrixXi::Zero(n_agents, m);
  for (int k = 0; k < m; ++k) {
    g.incidence_(g.edges_[k].first - 1, k) = 1;
    g.incidence_(g.edges_[k].second - 1, k) = -1;
  }

  Eigen::MatrixXd lap = (g.incidence_ * g.incidence_.transpose()).cast<double>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
  // eigenvalues come out ascending; index 0 is the structural zero
  g.lambda2_ = es.eigenvalues()(1);
  g.lambda_max_ = es.eigenvalues()(n_agents - 1);
  return g;
}

Graph Graph::generate(GraphKind kind, int n_agents) {
  if (n_agents < 3) {
    throw Error(ErrorCode::too_few_agents,
                "generators need at least 3 agents, got " + std::to_string(n_agents));
  }
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case GraphKind::ring:
      for (int i = 1; i <= n_agents; ++i) {
        edges.emplace_back(i, i % n_agents + 1);
      }
      break;
    case GraphKind::complete:
      for (int i = 1; i <= n_agents; ++i) {
        for (int j = i + 1; j <= n_agents; ++j) {
          edges.emplace_back(i, j);
        }
      }
      break;
    case GraphKind::triangulated_polygon:
      // cycle plus a fan of chords from vertex 1: 2N-3 edges, minimally rigid
      for (int i = 1; i <= n_agents; ++i) {
        edges.emplace_back(i, i % n_agents + 1);
      }
      for (int j = 3; j <= n_agents - 1; ++j) {
        edges.emplace_back(1, j);
      }
      break;
  }
  return from_edges(n_agents, std::move(edges));
}

Eigen::MatrixXi Graph::laplacian() const { return incidence_ * incidence_.transpose(); }

void to_json(nlohmann::json& j, const Graph& g) {
  j = nlohmann::json{{"n", g.n_agents()}, {"edges", nlohmann::json::array()}};
  for (const auto& [a, b] : g.edges()) {
    j["edges"].push_back({a, b});
  }
}

void from_json(const nlohmann::json& j, Graph& g) {
  int n = j.at("n").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) {
      throw Error(ErrorCode::invalid_config, "graph edge must be a pair [i, j]");
    }
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  g = Graph::from_edges(n, std::move(edges));
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_edge: return "DuplicateEdge";
    case ErrorCode::self_loop: return "SelfLoop";
    case ErrorCode::disconnected: return "Disconnected";
    case ErrorCode::too_few_agents: return "TooFewAgents";
    case ErrorCode::invalid_scale: return "InvalidScale";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::unbounded_cell: return "UnboundedCell";
    case ErrorCode::agent_set_mismatch: return "AgentSetMismatch";
    case ErrorCode::numerical_divergence: return "NumericalDivergence";
    case ErrorCode::degenerate_bound: return "DegenerateBound";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::invalid_config: return "InvalidConfig";
  }
  return "UnknownError";
}

}  // namespace qmas
