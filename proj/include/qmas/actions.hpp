#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qmas/error.hpp"

namespace qmas {

/// Inner-ball radius used to decide whether the origin lies strictly inside
/// a convex hull: "interior" means a ball of this radius fits.
inline constexpr double kInteriorRadius = 1e-9;

/// True iff the origin is in the interior of the convex hull of the nonzero
/// points (a ball of radius kInteriorRadius around 0 fits inside the hull).
///
/// Works in any dimension m by enumerating candidate supporting hyperplanes
/// through m-subsets of the points: every facet of a full-dimensional hull
/// spans such a subset, and the depth of the origin behind the shallowest
/// supporting hyperplane is exactly the inradius at 0. Cost is O(C(p, m) * p),
/// fine for the small action sets this library deals in.
bool satisfies_a1(const std::vector<Eigen::VectorXd>& points);

/// Smallest delta with V(0) contained in the closed ball B_delta, where V(0)
/// is the Voronoi cell of the zero action: {x : <u, x> <= |u|^2 / 2 for every
/// nonzero action u}. Exact half-plane vertex enumeration for m = 2; higher
/// dimensions fall back to the grid oracle. Throws UnboundedCell when the
/// origin is not interior to the hull of the nonzero actions (the cell is
/// then unbounded and no finite delta exists).
double voronoi_zero_bound(const std::vector<Eigen::VectorXd>& points);

/// Brute-force check of the same bound: scans a grid of the given spacing
/// over a box of twice the largest action norm and returns the largest
/// grid-point norm whose nearest action is 0. Independent of the vertex
/// enumeration above; agrees with it to within one grid diagonal when the
/// cell lies inside the scanned box.
double bound_oracle(const std::vector<Eigen::VectorXd>& points, double resolution);

/// One agent's finite action set: the zero action plus p nonzero actions,
/// with the Voronoi-zero bound delta cached at construction. The origin must
/// be interior to the hull of the nonzero actions, so delta is always finite.
/// Immutable; all operations are reentrant.
class ActionSet {
 public:
  struct TriangleMeta {
    double scale = 0.0;
    double theta = 0.0;
  };

  /// points[0] must be exactly the zero vector, all points distinct.
  static ActionSet from_points(std::vector<Eigen::VectorXd> points);

  /// Planar set {0} plus the three vertices of an equilateral triangle of
  /// circumradius `scale`, rotated by `theta`. Its Voronoi-zero bound equals
  /// the scale.
  static ActionSet triangle(double scale, double theta);

  int dim() const { return static_cast<int>(points_.rows()); }
  int size() const { return static_cast<int>(points_.cols()); }

  /// dim x size matrix, one action per column; column 0 is the zero action.
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd point(int index) const { return points_.col(index); }

  double delta() const { return delta_; }
  const std::optional<TriangleMeta>& triangle_meta() const { return meta_; }

  /// Full argmin set of |v - eta| over the actions, as indices into points().
  /// Ties compare the computed squared distances exactly, so mirror-symmetric
  /// inputs yield genuine multi-element sets.
  std::vector<int> nearest_indices(const Eigen::Ref<const Eigen::VectorXd>& eta) const;
  std::vector<Eigen::VectorXd> nearest(const Eigen::Ref<const Eigen::VectorXd>& eta) const;

  /// Deterministic selection: the argmin with the lowest index in points().
  int nearest_index(const Eigen::Ref<const Eigen::VectorXd>& eta) const;
  Eigen::VectorXd nearest_select(const Eigen::Ref<const Eigen::VectorXd>& eta) const;

 private:
  ActionSet() = default;

  Eigen::MatrixXd points_;  // column-major, column 0 = 0
  double delta_ = 0.0;
  std::optional<TriangleMeta> meta_;
};

// JSON form: {"points": [[...], ...], "delta": d} plus {"scale", "theta"}
// when the set was built as a triangle.
void to_json(nlohmann::json& j, const ActionSet& a);
void from_json(const nlohmann::json& j, ActionSet& a);

}  // namespace qmas
