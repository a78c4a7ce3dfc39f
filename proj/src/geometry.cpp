#include "visharp/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace visharp {

namespace {

// Dykstra's alternating projections onto halfspaces {z : a_i z <= b_i}.
// Returns the final iterate; *achieved_change reports the last full-cycle
// displacement so callers can detect non-convergence.
Vec dykstra_halfspaces(const Mat& A, const Vec& b, const Vec& x,
                       double* achieved_change = nullptr) {
  const Eigen::Index m = A.rows();
  Vec z = x;
  Mat corrections = Mat::Zero(m, A.cols());
  double change = 0.0;
  for (int cycle = 0; cycle < kDykstraCycleCap; ++cycle) {
    const Vec z_before = z;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double nrm2 = A.row(i).squaredNorm();
      if (nrm2 == 0.0) continue;  // 0 <= b_i rows carry no constraint
      const Vec w = z + corrections.row(i).transpose();
      const double viol = A.row(i).dot(w) - b[i];
      Vec znew = w;
      if (viol > 0.0) znew -= (viol / nrm2) * A.row(i).transpose();
      corrections.row(i) = (w - znew).transpose();
      z = znew;
    }
    change = (z - z_before).norm();
    if (change < kDykstraStopTol) break;
  }
  if (achieved_change != nullptr) *achieved_change = change;
  return z;
}

double polyhedron_infeasibility(const Mat& A, const Vec& b, const Vec& z) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double nrm = A.row(i).norm();
    const double viol = A.row(i).dot(z) - b[i];
    if (nrm == 0.0) {
      if (b[i] < 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, viol / nrm);
  }
  return worst;
}

// Exact sorting-based projection onto {z >= 0, sum z = 1}.
Vec project_simplex(const Vec& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> u(x.data(), x.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (int j = 0; j < n; ++j) {
    running += u[j];
    const double candidate = (running - 1.0) / (j + 1);
    if (u[j] - candidate > 0.0) {
      rho = j + 1;
      tau = candidate;
    }
  }
  (void)rho;
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = std::max(x[i] - tau, 0.0);
  return out;
}

bool is_signed_coordinate_row(const Vec& r, int* coord, double* sign) {
  int nz = -1;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r[i] != 0.0) {
      if (nz >= 0) return false;
      nz = static_cast<int>(i);
    }
  }
  if (nz < 0) return false;
  *coord = nz;
  *sign = r[nz] > 0.0 ? 1.0 : -1.0;
  return true;
}

long binomial_capped(long n, long k, long cap) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

void dedup_push(std::vector<Vec>& list, const Vec& v) {
  for (const Vec& w : list)
    if ((w - v).norm() < 1e-9) return;
  list.push_back(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexSet construction

ConvexSet ConvexSet::box(Vec lower, Vec upper) {
  require(lower.size() == upper.size(), "box: bound dimensions differ");
  require(lower.size() > 0, "box: empty dimension");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    require(lower[i] <= upper[i], "box: lower > upper in coordinate " + std::to_string(i));
  ConvexSet s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<int>(lower.size());
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  require(center.size() > 0, "ball: empty dimension");
  require(radius > 0.0, "ball: radius must be positive");
  ConvexSet s;
  s.kind_ = Kind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::simplex(int n) {
  require(n >= 1, "simplex: dimension must be >= 1");
  ConvexSet s;
  s.kind_ = Kind::Simplex;
  s.dim_ = n;
  return s;
}

ConvexSet ConvexSet::polyhedron(Mat A, Vec b) {
  require(A.rows() == b.size(), "polyhedron: A rows and b size differ");
  require(A.cols() > 0, "polyhedron: empty dimension");
  ConvexSet s;
  s.kind_ = Kind::Polyhedron;
  s.dim_ = static_cast<int>(A.cols());
  s.A_ = std::move(A);
  s.b_ = std::move(b);

  // Nonemptiness probe: project the origin; if the infeasibility of the
  // limit point stalls above threshold the system is declared empty.
  const Vec z0 = dykstra_halfspaces(s.A_, s.b_, Vec::Zero(s.dim_));
  require(polyhedron_infeasibility(s.A_, s.b_, z0) <= 1e-6,
          "polyhedron: feasibility probe failed, system appears empty");

  // Sampling window: box hull of projected random points around the probe.
  Rng rng(Rng::derive(0x9d5c0feell, 7));
  const double r0 = std::max(1.0, 4.0 * z0.lpNorm<Eigen::Infinity>());
  Vec lo = z0, hi = z0;
  for (int k = 0; k < 128; ++k) {
    Vec probe(s.dim_);
    for (int i = 0; i < s.dim_; ++i) probe[i] = z0[i] + rng.uniform(-r0, r0);
    const Vec p = dykstra_halfspaces(s.A_, s.b_, probe);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec pad = 0.1 * (hi - lo) + Vec::Constant(s.dim_, 1e-6);
  s.hull_lo_ = lo - pad;
  s.hull_hi_ = hi + pad;
  return s;
}

std::pair<Vec, Vec> ConvexSet::bounding_box() const {
  switch (kind_) {
    case Kind::Box:
      return {lower_, upper_};
    case Kind::Ball:
      return {center_ - Vec::Constant(dim_, radius_),
              center_ + Vec::Constant(dim_, radius_)};
    case Kind::Simplex:
      return {Vec::Zero(dim_), Vec::Ones(dim_)};
    case Kind::Polyhedron:
      return {hull_lo_, hull_hi_};
  }
  throw Error("bounding_box: unreachable");
}

// ---------------------------------------------------------------------------
// Projection / distance / membership

Vec project(const ConvexSet& S, const Vec& x) {
  require_dim(x, S.dim(), "project");
  switch (S.kind()) {
    case ConvexSet::Kind::Box:
      return x.cwiseMax(S.lower()).cwiseMin(S.upper());
    case ConvexSet::Kind::Ball: {
      const Vec d = x - S.center();
      const double nrm = d.norm();
      if (nrm <= S.radius()) return x;
      return S.center() + (S.radius() / nrm) * d;
    }
    case ConvexSet::Kind::Simplex:
      return project_simplex(x);
    case ConvexSet::Kind::Polyhedron: {
      double change = 0.0;
      const Vec z = dykstra_halfspaces(S.A(), S.b(), x, &change);
      if (change >= kDykstraStopTol) {
        throw Error("project: polyhedron projection did not converge within cap"
                    " (achieved infeasibility " +
                    std::to_string(polyhedron_infeasibility(S.A(), S.b(), z)) + ")");
      }
      return z;
    }
  }
  throw Error("project: unreachable");
}

double distance(const ConvexSet& S, const Vec& x) {
  return (x - project(S, x)).norm();
}

bool contains(const ConvexSet& S, const Vec& x, double tol) {
  require_dim(x, S.dim(), "contains");
  require(tol >= 0.0, "contains: tol must be >= 0");
  switch (S.kind()) {
    case ConvexSet::Kind::Box:
      return (x.array() >= S.lower().array() - tol).all() &&
             (x.array() <= S.upper().array() + tol).all();
    case ConvexSet::Kind::Ball:
      return (x - S.center()).norm() <= S.radius() + tol;
    case ConvexSet::Kind::Simplex:
      return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
    case ConvexSet::Kind::Polyhedron:
      return ((S.A() * x - S.b()).array() <= tol).all();
  }
  throw Error("contains: unreachable");
}

// ---------------------------------------------------------------------------
// Cones

bool PolyhedralCone::contains(const Vec& v, double tol) const {
  require_dim(v, dim, "cone contains");
  if (rows.rows() == 0) return true;
  return ((rows * v).array() <= tol * v.norm()).all();
}

PolyhedralCone tangent_cone(const ConvexSet& S, const Vec& x) {
  require(contains(S, x, kMembershipTol), "tangent_cone: point not in set");
  const int n = S.dim();
  std::vector<Vec> active;
  switch (S.kind()) {
    case ConvexSet::Kind::Box: {
      for (int i = 0; i < n; ++i) {
        if (std::abs(x[i] - S.lower()[i]) <= kActivityTol * (1.0 + std::abs(S.lower()[i])))
          active.push_back(-Vec::Unit(n, i));
        if (std::abs(x[i] - S.upper()[i]) <= kActivityTol * (1.0 + std::abs(S.upper()[i])))
          active.push_back(Vec::Unit(n, i));
      }
      break;
    }
    case ConvexSet::Kind::Ball: {
      const double r = (x - S.center()).norm();
      if (std::abs(r - S.radius()) <= kActivityTol * (1.0 + S.radius()))
        active.push_back(x - S.center());
      break;  // interior: whole space
    }
    case ConvexSet::Kind::Simplex: {
      for (int i = 0; i < n; ++i)
        if (std::abs(x[i]) <= kActivityTol) active.push_back(-Vec::Unit(n, i));
      active.push_back(Vec::Ones(n));   // the sum constraint is always active,
      active.push_back(-Vec::Ones(n));  // in both directions
      break;
    }
    case ConvexSet::Kind::Polyhedron: {
      for (Eigen::Index i = 0; i < S.A().rows(); ++i) {
        const double gap = S.A().row(i).dot(x) - S.b()[i];
        if (std::abs(gap) <= kActivityTol * (1.0 + std::abs(S.b()[i])))
          active.push_back(S.A().row(i).transpose());
      }
      break;
    }
  }
  PolyhedralCone K;
  K.dim = n;
  K.rows = Mat(static_cast<Eigen::Index>(active.size()), n);
  for (std::size_t i = 0; i < active.size(); ++i) K.rows.row(i) = active[i].transpose();
  return K;
}

ConeGenerators cone_generators(const Mat& rows, long max_subsets) {
  const int n = static_cast<int>(rows.cols());
  ConeGenerators out;
  if (rows.rows() == 0) {
    for (int i = 0; i < n; ++i) out.lines.push_back(Vec::Unit(n, i));
    return out;
  }

  // Fast path: every row is a signed coordinate vector (boxes produce these
  // in any dimension).
  {
    std::vector<int> state(n, 0);  // bit 1: v_i <= 0 present, bit 2: v_i >= 0
    bool coordinate_like = true;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      int coord = 0;
      double sign = 0.0;
      Vec row = rows.row(r).transpose();
      if (!is_signed_coordinate_row(row, &coord, &sign)) {
        coordinate_like = false;
        break;
      }
      state[coord] |= sign > 0.0 ? 1 : 2;
    }
    if (coordinate_like) {
      for (int i = 0; i < n; ++i) {
        switch (state[i]) {
          case 0: out.lines.push_back(Vec::Unit(n, i)); break;
          case 1: out.rays.push_back(-Vec::Unit(n, i)); break;
          case 2: out.rays.push_back(Vec::Unit(n, i)); break;
          default: break;  // pinned to zero
        }
      }
      return out;
    }
  }

  // General path. Split off the lineality space L = null(rows), then
  // enumerate extreme rays of the pointed cone in L-perp coordinates.
  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  const double rank_tol = std::max(rows.rows(), rows.cols()) * 1e-13 * std::max(smax, 1.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > rank_tol) ++rank;

  const Mat V = svd.matrixV();
  for (int i = rank; i < n; ++i) out.lines.push_back(V.col(i));
  if (rank == 0) return out;

  const Mat Q = V.leftCols(rank);       // n x r basis of L-perp
  const Mat D = rows * Q;               // pointed cone {y : D y <= 0} in R^r
  const int r = rank;
  const Eigen::Index k = D.rows();
  const double feas_tol = 1e-10 * std::max(1.0, smax);

  std::vector<Vec> rays_r;
  if (r == 1) {
    for (double s : {1.0, -1.0}) {
      if (((D * (s * Vec::Ones(1))).array() <= feas_tol).all())
        dedup_push(rays_r, s * Vec::Ones(1));
    }
  } else {
    require(binomial_capped(static_cast<long>(k), r - 1, max_subsets) <= max_subsets,
            "cone_generators: subset enumeration exceeds cap");
    std::vector<int> idx(r - 1);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      Mat B(r - 1, r);
      for (int j = 0; j < r - 1; ++j) B.row(j) = D.row(idx[j]);
      Eigen::JacobiSVD<Mat> bsvd(B, Eigen::ComputeFullV);
      int brank = 0;
      const double bmax = bsvd.singularValues().size() > 0 ? bsvd.singularValues()[0] : 0.0;
      const double btol = r * 1e-12 * std::max(bmax, 1.0);
      for (Eigen::Index i = 0; i < bsvd.singularValues().size(); ++i)
        if (bsvd.singularValues()[i] > btol) ++brank;
      if (brank == r - 1) {
        const Vec y = bsvd.matrixV().col(r - 1);
        for (double s : {1.0, -1.0}) {
          if (((D * (s * y)).array() <= feas_tol).all()) dedup_push(rays_r, s * y);
        }
      }
      // next combination
      int pos = r - 2;
      while (pos >= 0 && idx[pos] == static_cast<int>(k) - (r - 1 - pos)) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < r - 1; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  for (const Vec& y : rays_r) {
    Vec g = Q * y;
    out.rays.push_back(g / g.norm());
  }
  return out;
}

PolyhedralCone polar_cone(const PolyhedralCone& K) {
  const ConeGenerators gen = cone_generators(K.rows);
  PolyhedralCone P;
  P.dim = K.dim;
  const Eigen::Index k =
      static_cast<Eigen::Index>(gen.rays.size() + 2 * gen.lines.size());
  P.rows = Mat(k, K.dim);
  Eigen::Index r = 0;
  for (const Vec& g : gen.rays) P.rows.row(r++) = g.transpose();
  for (const Vec& l : gen.lines) {
    P.rows.row(r++) = l.transpose();
    P.rows.row(r++) = -l.transpose();
  }
  return P;
}

PolyhedralCone normal_cone(const ConvexSet& S, const Vec& x) {
  const PolyhedralCone T = tangent_cone(S, x);
  PolyhedralCone N = polar_cone(T);
  N.generators.clear();
  for (Eigen::Index i = 0; i < T.rows.rows(); ++i) {
    const double nrm = T.rows.row(i).norm();
    if (nrm > 0.0) dedup_push(N.generators, T.rows.row(i).transpose() / nrm);
  }
  return N;
}

Vec project_cone(const PolyhedralCone& K, const Vec& u) {
  require_dim(u, K.dim, "project_cone");
  if (K.rows.rows() == 0) return u;
  double change = 0.0;
  const Vec v = dykstra_halfspaces(K.rows, Vec::Zero(K.rows.rows()), u, &change);
  if (change >= kDykstraStopTol)
    throw Error("project_cone: inner iteration cap exceeded");
  return v;
}

PolyhedralCone intersect_cones(const PolyhedralCone& a, const PolyhedralCone& b) {
  require(a.dim == b.dim, "intersect_cones: dimension mismatch");
  PolyhedralCone K;
  K.dim = a.dim;
  K.rows = Mat(a.rows.rows() + b.rows.rows(), a.dim);
  if (a.rows.rows() > 0) K.rows.topRows(a.rows.rows()) = a.rows;
  if (b.rows.rows() > 0) K.rows.bottomRows(b.rows.rows()) = b.rows;
  return K;
}

Vec sample_point(const ConvexSet& S, Rng& rng) {
  const auto [lo, hi] = S.bounding_box();
  Vec x(S.dim());
  for (int i = 0; i < S.dim(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return project(S, x);
}

bool polyhedron_is_bounded(const ConvexSet& S) {
  require(S.kind() == ConvexSet::Kind::Polyhedron, "polyhedron_is_bounded: wrong kind");
  const ConeGenerators gen = cone_generators(S.A());
  return gen.is_zero();
}

}  // namespace visharp
