#include "qmas/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

namespace qmas {

namespace {

int common_dimension(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) {
    throw Error(ErrorCode::invalid_argument, "empty point list");
  }
  const int m = static_cast<int>(points.front().size());
  for (const auto& p : points) {
    if (p.size() != m) {
      throw Error(ErrorCode::dimension_mismatch,
                  "points mix dimensions " + std::to_string(m) + " and " +
                      std::to_string(p.size()));
    }
  }
  if (m < 1) {
    throw Error(ErrorCode::invalid_argument, "zero-dimensional points");
  }
  return m;
}

std::vector<Eigen::VectorXd> nonzero_points(const std::vector<Eigen::VectorXd>& points) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& p : points) {
    if (!p.isZero(0.0)) out.push_back(p);
  }
  return out;
}

/// Largest r such that B_r(0) fits inside conv(pts); <= 0 when the origin is
/// on the boundary or outside, -inf when no supporting hyperplane exists at
/// all (degenerate input). pts must be nonempty and share dimension m.
double hull_inradius_at_origin(const std::vector<Eigen::VectorXd>& pts, int m) {
  const int p = static_cast<int>(pts.size());
  if (p < m + 1) return -std::numeric_limits<double>::infinity();

  double scale = 0.0;
  for (const auto& v : pts) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  const double side_tol = 1e-12 * std::max(scale, 1.0);

  double inradius = std::numeric_limits<double>::infinity();
  bool found = false;

  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;

  Eigen::MatrixXd diffs(std::max(m - 1, 1), m);
  while (true) {
    // hyperplane through the m chosen points, when they are affinely independent
    Eigen::VectorXd normal;
    bool have_normal = false;
    if (m == 1) {
      normal = Eigen::VectorXd::Ones(1);
      have_normal = true;
    } else {
      for (int r = 1; r < m; ++r) diffs.row(r - 1) = (pts[idx[r]] - pts[idx[0]]).transpose();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs.topRows(m - 1), Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (sv(0) > 0.0 && sv(m - 2) > 1e-12 * sv(0)) {
        normal = svd.matrixV().col(m - 1);
        have_normal = true;
      }
    }

    if (have_normal) {
      const double b = normal.dot(pts[idx[0]]);
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& v : pts) {
        const double s = normal.dot(v);
        hi = std::max(hi, s);
        lo = std::min(lo, s);
      }
      if (hi <= b + side_tol) {  // supporting, all points on the <= side
        inradius = std::min(inradius, b);
        found = true;
      }
      if (lo >= b - side_tol) {  // supporting after flipping the normal
        inradius = std::min(inradius, -b);
        found = true;
      }
    }

    // next m-combination
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == p - m + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int r = pos + 1; r < m; ++r) idx[r] = idx[r - 1] + 1;
  }

  return found ? inradius : -std::numeric_limits<double>::infinity();
}

double voronoi_zero_bound_2d(const std::vector<Eigen::VectorXd>& actions) {
  double scale2 = 0.0;
  for (const auto& u : actions) scale2 = std::max(scale2, u.squaredNorm());
  const double feas_tol = 1e-9 * std::max(scale2, 1.0);

  double best2 = 0.0;
  bool any_vertex = false;
  const int p = static_cast<int>(actions.size());
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const auto& a = actions[i];
      const auto& b = actions[j];
      const double det = a(0) * b(1) - a(1) * b(0);
      if (std::abs(det) <= 1e-14 * a.norm() * b.norm()) continue;
      const double ra = 0.5 * a.squaredNorm();
      const double rb = 0.5 * b.squaredNorm();
      Eigen::Vector2d x((ra * b(1) - rb * a(1)) / det, (a(0) * rb - b(0) * ra) / det);
      bool feasible = true;
      for (const auto& u : actions) {
        if (u.dot(x) > 0.5 * u.squaredNorm() + feas_tol) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        any_vertex = true;
        best2 = std::max(best2, x.squaredNorm());
      }
    }
  }
  if (!any_vertex) {
    throw Error(ErrorCode::unbounded_cell, "no bounded cell vertex found");
  }
  return std::sqrt(best2);
}

}  // namespace

bool satisfies_a1(const std::vector<Eigen::VectorXd>& points) {
  const int m = common_dimension(points);
  const auto pts = nonzero_points(points);
  if (pts.empty()) return false;
  return hull_inradius_at_origin(pts, m) >= kInteriorRadius;
}

double voronoi_zero_bound(const std::vector<Eigen::VectorXd>& points) {
  const int m = common_dimension(points);
  if (!satisfies_a1(points)) {
    throw Error(ErrorCode::unbounded_cell,
                "the origin is not interior to the hull of the nonzero actions");
  }
  const auto actions = nonzero_points(points);
  if (m == 2) return voronoi_zero_bound_2d(actions);

  // Exact vertex enumeration is only implemented for the plane; other
  // dimensions use the grid oracle at a resolution tied to the set scale.
  double max_norm = 0.0;
  for (const auto& u : actions) max_norm = std::max(max_norm, u.norm());
  return bound_oracle(points, max_norm / 512.0);
}

double bound_oracle(const std::vector<Eigen::VectorXd>& points, double resolution) {
  const int m = common_dimension(points);
  if (resolution <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "resolution must be positive");
  }
  const auto actions = nonzero_points(points);
  if (actions.empty()) {
    throw Error(ErrorCode::invalid_argument, "need at least one nonzero action");
  }
  double max_norm = 0.0;
  for (const auto& u : actions) max_norm = std::max(max_norm, u.norm());
  const double half = 2.0 * max_norm;
  const long per_axis = static_cast<long>(std::floor(2.0 * half / resolution)) + 1;

  Eigen::VectorXd x(m);
  std::vector<long> c(m, 0);
  double best2 = 0.0;
  while (true) {
    for (int d = 0; d < m; ++d) x(d) = -half + static_cast<double>(c[d]) * resolution;
    const double n2 = x.squaredNorm();
    if (n2 > best2) {
      bool zero_is_nearest = true;
      for (const auto& u : actions) {
        if ((x - u).squaredNorm() < n2) {
          zero_is_nearest = false;
          break;
        }
      }
      if (zero_is_nearest) best2 = n2;
    }
    int d = 0;
    while (d < m && ++c[d] == per_axis) c[d++] = 0;
    if (d == m) break;
  }
  return std::sqrt(best2);
}

ActionSet ActionSet::from_points(std::vector<Eigen::VectorXd> points) {
  const int m = common_dimension(points);
  if (!points.front().isZero(0.0)) {
    throw Error(ErrorCode::invalid_argument, "the first action must be the zero vector");
  }
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw Error(ErrorCode::invalid_argument, "actions must be distinct");
      }
    }
  }
  ActionSet a;
  a.delta_ = voronoi_zero_bound(points);  // also enforces (A1)
  a.points_.resize(m, static_cast<int>(points.size()));
  for (size_t i = 0; i < points.size(); ++i) a.points_.col(static_cast<int>(i)) = points[i];
  return a;
}

ActionSet ActionSet::triangle(double scale, double theta) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::invalid_scale, "triangle scale must be positive, got " + std::to_string(scale));
  }
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  std::vector<Eigen::VectorXd> pts;
  pts.push_back(Eigen::Vector2d::Zero());
  for (int k = 0; k < 3; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / 3.0;
    Eigen::Vector2d v(std::sin(phi), std::cos(phi));
    pts.push_back(scale * (rot * v));
  }
  ActionSet a = from_points(std::move(pts));
  a.meta_ = TriangleMeta{scale, theta};
  return a;
}

std::vector<int> ActionSet::nearest_indices(const Eigen::Ref<const Eigen::VectorXd>& eta) const {
  if (eta.size() != points_.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "query has dimension " + std::to_string(eta.size()) + ", set has " +
                    std::to_string(points_.rows()));
  }
  double best = std::numeric_limits<double>::infinity();
  for (int c = 0; c < points_.cols(); ++c) {
    best = std::min(best, (points_.col(c) - eta).squaredNorm());
  }
  std::vector<int> out;
  for (int c = 0; c < points_.cols(); ++c) {
    if ((points_.col(c) - eta).squaredNorm() == best) out.push_back(c);
  }
  return out;
}

std::vector<Eigen::VectorXd> ActionSet::nearest(const Eigen::Ref<const Eigen::VectorXd>& eta) const {
  std::vector<Eigen::VectorXd> out;
  for (int c : nearest_indices(eta)) out.push_back(points_.col(c));
  return out;
}

int ActionSet::nearest_index(const Eigen::Ref<const Eigen::VectorXd>& eta) const {
  // strict comparison keeps the lowest index on ties
  int best_idx = 0;
  double best = (points_.col(0) - eta).squaredNorm();
  for (int c = 1; c < points_.cols(); ++c) {
    const double d2 = (points_.col(c) - eta).squaredNorm();
    if (d2 < best) {
      best = d2;
      best_idx = c;
    }
  }
  return best_idx;
}

Eigen::VectorXd ActionSet::nearest_select(const Eigen::Ref<const Eigen::VectorXd>& eta) const {
  return points_.col(nearest_index(eta));
}

void to_json(nlohmann::json& j, const ActionSet& a) {
  j = nlohmann::json::object();
  auto pts = nlohmann::json::array();
  for (int c = 0; c < a.size(); ++c) {
    auto p = nlohmann::json::array();
    for (int r = 0; r < a.dim(); ++r) p.push_back(a.points()(r, c));
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  j["delta"] = a.delta();
  if (a.triangle_meta()) {
    j["scale"] = a.triangle_meta()->scale;
    j["theta"] = a.triangle_meta()->theta;
  }
}

void from_json(const nlohmann::json& j, ActionSet& a) {
  if (j.contains("scale")) {
    a = ActionSet::triangle(j.at("scale").get<double>(), j.value("theta", 0.0));
    return;
  }
  std::vector<Eigen::VectorXd> pts;
  for (const auto& p : j.at("points")) {
    Eigen::VectorXd v(p.size());
    for (size_t r = 0; r < p.size(); ++r) v(static_cast<int>(r)) = p[r].get<double>();
    pts.push_back(std::move(v));
  }
  a = ActionSet::from_points(std::move(pts));
}

}  // namespace qmas
