#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "visharp/rng.hpp"
#include "visharp/types.hpp"

namespace visharp {

// Closed convex feasible sets. Immutable after construction; every operation
// below is a pure function of its inputs.
class ConvexSet {
 public:
  enum class Kind { Box, Ball, Simplex, Polyhedron };

  // Coordinatewise bounds, lower <= upper. lower == upper in some (or all)
  // coordinates is allowed and is how degenerate faces/singletons are written.
  static ConvexSet box(Vec lower, Vec upper);
  static ConvexSet ball(Vec center, double radius);
  // Standard unit simplex {z >= 0, sum z = 1} in R^n.
  static ConvexSet simplex(int n);
  // {x : Ax <= b}. Verified nonempty at construction via a projection probe.
  static ConvexSet polyhedron(Mat A, Vec b);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }

  // Axis-aligned box enclosing the set (estimated for polyhedra).
  std::pair<Vec, Vec> bounding_box() const;

 private:
  ConvexSet() = default;

  Kind kind_ = Kind::Box;
  int dim_ = 0;
  Vec lower_, upper_;   // Box
  Vec center_;          // Ball
  double radius_ = 0.0; // Ball
  Mat A_;               // Polyhedron
  Vec b_;               // Polyhedron
  Vec hull_lo_, hull_hi_;  // Polyhedron sampling window
};

// Homogeneous inequality system {v : rows * v <= 0}. `generators`, when
// nonempty, lists unit vectors spanning the cone (extreme rays; for cones
// with lineality the list includes both signs of each line direction).
struct PolyhedralCone {
  Mat rows;  // k x n; k == 0 means the whole space
  int dim = 0;
  std::vector<Vec> generators;

  static PolyhedralCone whole_space(int n) { return {Mat(0, n), n, {}}; }

  // Membership with a relative tolerance, so that v in K <=> lambda v in K.
  bool contains(const Vec& v, double tol = kConeMemberTol) const;
};

// Extreme structure of {v : rows * v <= 0}: unit extreme rays of the pointed
// part plus an orthonormal basis of the lineality space.
struct ConeGenerators {
  std::vector<Vec> rays;
  std::vector<Vec> lines;
  bool is_zero() const { return rays.empty() && lines.empty(); }
};

// Enumerates rays by nullspaces of row subsets; throws when the subset count
// exceeds `max_subsets` (desk-scale guard). Rows that are signed coordinate
// vectors take a closed-form path valid in any dimension.
ConeGenerators cone_generators(const Mat& rows, long max_subsets = 200000);

// H-representation of the polar cone {w : <w, v> <= 0 for all v in K}.
PolyhedralCone polar_cone(const PolyhedralCone& K);

Vec project(const ConvexSet& S, const Vec& x);
double distance(const ConvexSet& S, const Vec& x);
bool contains(const ConvexSet& S, const Vec& x, double tol);

// Cone of feasible directions at x (x must lie in S). Active rows/bounds are
// collected with the relative activity tolerance; interior points yield the
// whole space (k = 0).
PolyhedralCone tangent_cone(const ConvexSet& S, const Vec& x);

// Polar of the tangent cone. Generators are the normalized active constraint
// normals (single ray x - c for a ball boundary point).
PolyhedralCone normal_cone(const ConvexSet& S, const Vec& x);

Vec project_cone(const PolyhedralCone& K, const Vec& u);

// Stacked inequality system; membership in the result iff in both inputs.
PolyhedralCone intersect_cones(const PolyhedralCone& a, const PolyhedralCone& b);

// Draws from the set's bounding box and projects onto the set.
Vec sample_point(const ConvexSet& S, Rng& rng);

// Generators of the recession cone {v : Av <= 0}; empty means bounded.
bool polyhedron_is_bounded(const ConvexSet& S);

}  // namespace visharp
