#include "qmas/control.hpp"

#include <cmath>
#include <string>

namespace qmas {

namespace {

void require_stack(const Stacked& s, Layout layout, int count, const char* what) {
  if (s.layout != layout) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + ": unexpected stack layout");
  }
  if (s.dim < 1 || s.data.size() != static_cast<Eigen::Index>(count) * s.dim) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": stack has length " + std::to_string(s.data.size()) +
                    ", expected " + std::to_string(count) + " blocks of dimension " +
                    std::to_string(s.dim));
  }
}

}  // namespace

Stacked Stacked::agents(Eigen::VectorXd values, int dim) {
  if (dim < 1 || values.size() % dim != 0) {
    throw Error(ErrorCode::dimension_mismatch,
                "stack length " + std::to_string(values.size()) +
                    " is not a multiple of dimension " + std::to_string(dim));
  }
  return Stacked{std::move(values), Layout::agent_major, dim};
}

Stacked Stacked::edges(Eigen::VectorXd values, int dim) {
  Stacked s = agents(std::move(values), dim);
  s.layout = Layout::edge_major;
  return s;
}

FormationSpec FormationSpec::from_distances(Eigen::VectorXd d) {
  if (d.size() == 0) {
    throw Error(ErrorCode::invalid_argument, "formation needs at least one desired distance");
  }
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (!(d(k) > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "desired distance " + std::to_string(k + 1) + " must be positive");
    }
  }
  return FormationSpec{std::move(d)};
}

namespace detail {

void relative_positions_into(const Graph& g, const Eigen::VectorXd& x, int dim, Eigen::VectorXd& z) {
  const auto& edges = g.edges();
  for (size_t k = 0; k < edges.size(); ++k) {
    const Eigen::Index i = static_cast<Eigen::Index>(edges[k].first - 1) * dim;
    const Eigen::Index j = static_cast<Eigen::Index>(edges[k].second - 1) * dim;
    z.segment(static_cast<Eigen::Index>(k) * dim, dim) = x.segment(i, dim) - x.segment(j, dim);
  }
}

void consensus_field_from_z_into(const Graph& g, const Eigen::VectorXd& z, int dim, Eigen::VectorXd& field) {
  field.setZero();
  const auto& edges = g.edges();
  for (size_t k = 0; k < edges.size(); ++k) {
    const auto zk = z.segment(static_cast<Eigen::Index>(k) * dim, dim);
    field.segment(static_cast<Eigen::Index>(edges[k].first - 1) * dim, dim) -= zk;
    field.segment(static_cast<Eigen::Index>(edges[k].second - 1) * dim, dim) += zk;
  }
}

void formation_error_into(const Eigen::VectorXd& z, int dim, const Eigen::VectorXd& d_squared, Eigen::VectorXd& e) {
  for (Eigen::Index k = 0; k < d_squared.size(); ++k) {
    e(k) = z.segment(k * dim, dim).squaredNorm() - d_squared(k);
  }
}

void formation_field_into(const Graph& g, const Eigen::VectorXd& z, int dim, const Eigen::VectorXd& e, Eigen::VectorXd& field) {
  field.setZero();
  const auto& edges = g.edges();
  for (size_t k = 0; k < edges.size(); ++k) {
    const auto zk = z.segment(static_cast<Eigen::Index>(k) * dim, dim);
    const double ek = e(static_cast<Eigen::Index>(k));
    field.segment(static_cast<Eigen::Index>(edges[k].first - 1) * dim, dim) -= ek * zk;
    field.segment(static_cast<Eigen::Index>(edges[k].second - 1) * dim, dim) += ek * zk;
  }
}

}  // namespace detail

Stacked relative_positions(const Graph& g, const Stacked& x) {
  require_stack(x, Layout::agent_major, g.n_agents(), "relative_positions");
  Eigen::VectorXd z(static_cast<Eigen::Index>(g.n_edges()) * x.dim);
  detail::relative_positions_into(g, x.data, x.dim, z);
  return Stacked::edges(std::move(z), x.dim);
}

Stacked consensus_field(const Graph& g, const Stacked& x) {
  require_stack(x, Layout::agent_major, g.n_agents(), "consensus_field");
  Eigen::VectorXd z(static_cast<Eigen::Index>(g.n_edges()) * x.dim);
  detail::relative_positions_into(g, x.data, x.dim, z);
  Eigen::VectorXd field(x.data.size());
  detail::consensus_field_from_z_into(g, z, x.dim, field);
  return Stacked::agents(std::move(field), x.dim);
}

Eigen::VectorXd formation_error(const Stacked& z, const FormationSpec& spec) {
  require_stack(z, Layout::edge_major, static_cast<int>(spec.distances.size()), "formation_error");
  Eigen::VectorXd e(spec.distances.size());
  detail::formation_error_into(z.data, z.dim, spec.distances.cwiseProduct(spec.distances), e);
  return e;
}

Stacked formation_field(const Graph& g, const Stacked& z, const Eigen::VectorXd& e) {
  require_stack(z, Layout::edge_major, g.n_edges(), "formation_field");
  if (e.size() != g.n_edges()) {
    throw Error(ErrorCode::dimension_mismatch,
                "error vector has length " + std::to_string(e.size()) + ", graph has " +
                    std::to_string(g.n_edges()) + " edges");
  }
  Eigen::VectorXd field(static_cast<Eigen::Index>(g.n_agents()) * z.dim);
  detail::formation_field_into(g, z.data, z.dim, e, field);
  return Stacked::agents(std::move(field), z.dim);
}

Stacked quantize_field(const Stacked& field, const std::vector<ActionSet>& sets) {
  if (field.layout != Layout::agent_major || field.dim < 1) {
    throw Error(ErrorCode::dimension_mismatch, "quantize_field expects an agent-major stack");
  }
  if (static_cast<int>(sets.size()) != field.count()) {
    throw Error(ErrorCode::agent_set_mismatch,
                std::to_string(sets.size()) + " action sets for " +
                    std::to_string(field.count()) + " agents");
  }
  for (const auto& s : sets) {
    if (s.dim() != field.dim) {
      throw Error(ErrorCode::agent_set_mismatch,
                  "action set dimension " + std::to_string(s.dim()) +
                      " does not match field dimension " + std::to_string(field.dim));
    }
  }
  Stacked u = Stacked::agents(Eigen::VectorXd(field.data.size()), field.dim);
  for (int i = 0; i < field.count(); ++i) {
    u.block(i) = sets[static_cast<size_t>(i)].nearest_select(field.block(i));
  }
  return u;
}

double consensus_bound(const std::vector<ActionSet>& sets) {
  if (sets.empty()) {
    throw Error(ErrorCode::invalid_argument, "need at least one action set");
  }
  double total = 0.0;
  for (const auto& s : sets) total += s.delta();
  return total;
}

double FormationBound::require() const {
  if (!bound) {
    throw Error(ErrorCode::degenerate_bound,
                "all desired distances are equal, c2 = 0; delta/c1 = " +
                    std::to_string(delta / c1) + " is the only available scale");
  }
  return *bound;
}

FormationBound formation_bound(const std::vector<ActionSet>& sets, const FormationSpec& spec) {
  FormationBound fb;
  fb.delta = consensus_bound(sets);
  const Eigen::VectorXd d2 = spec.distances.cwiseProduct(spec.distances);
  fb.c1 = d2.minCoeff();
  fb.c2 = std::sqrt((d2.array() - fb.c1).sum());
  if (fb.c2 > 0.0) fb.bound = fb.delta / fb.c2;
  return fb;
}

double spectral_ratio(const Graph& g) { return 1.0 / std::sqrt(g.algebraic_connectivity()); }

}  // namespace qmas
