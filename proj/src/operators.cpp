#include "visharp/operators.hpp"

#include <cmath>

namespace visharp {

namespace {

double spectral_norm(const Mat& M) {
  const int n = static_cast<int>(M.cols());
  if (M.size() == 0) return 0.0;
  if ((M.array() == 0.0).all()) return 0.0;
  const Mat G = M.transpose() * M;
  Rng rng(Rng::derive(0x5ec7a1, 1));
  Vec v = rng.unit_vec(n);
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vec w = G * v;
    const double nrm = w.norm();
    if (nrm == 0.0) {
      // started in the nullspace; restart from a fresh direction
      v = rng.unit_vec(n);
      continue;
    }
    v = w / nrm;
    const double next = v.dot(G * v);
    if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next)))
      return std::sqrt(next);
    lambda = next;
  }
  throw Error("estimate_lipschitz: power iteration did not converge, last estimate " +
              std::to_string(std::sqrt(std::max(lambda, 0.0))));
}

// Pair sampler shared by the probes. Per sample index it yields three pair
// shapes: plain uniform pairs, pairs aligned with the hyperplane normal to
// F(x) (tight for the strong pseudomonotonicity ratio), and collinear pairs
// (tight for the pseudomonotone-plus equality case).
struct PairStream {
  const VectorMap& F;
  const ConvexSet& S;
  Rng rng;
  Vec lo, hi;

  PairStream(const VectorMap& f, const ConvexSet& s, std::uint64_t seed)
      : F(f), S(s), rng(seed) {
    auto bb = S.bounding_box();
    lo = bb.first;
    hi = bb.second;
  }

  std::pair<Vec, Vec> next(int shape) {
    const Vec x = sample_point(S, rng);
    switch (shape % 3) {
      case 1: {  // step inside the hyperplane orthogonal to F(x)
        const Vec fx = F(x);
        Vec d = rng.normal_vec(S.dim());
        const double fn2 = fx.squaredNorm();
        if (fn2 > 0.0) d -= (d.dot(fx) / fn2) * fx;
        if (d.norm() < 1e-12) d = rng.normal_vec(S.dim());
        if (fx.dot(d) < 0.0) d = -d;  // keep the qualifying side after roundoff
        const double t = rng.uniform(1e-4, 0.5) * (hi - lo).norm();
        return {x, project(S, x + t * d / d.norm())};
      }
      case 2: {  // collinear pair
        const double lam = rng.uniform(0.1, 2.0);
        return {x, project(S, lam * x)};
      }
      default:
        return {x, sample_point(S, rng)};
    }
  }
};

}  // namespace

VectorMap VectorMap::affine(Mat M, Vec q) {
  require(M.rows() == M.cols(), "affine map: matrix must be square");
  require(M.rows() == q.size(), "affine map: offset dimension mismatch");
  VectorMap F;
  F.kind_ = Kind::Affine;
  F.dim_ = static_cast<int>(q.size());
  F.M_ = std::move(M);
  F.q_ = std::move(q);
  F.name_ = "affine";
  return F;
}

VectorMap VectorMap::black_box(std::string name, int dim,
                               std::function<Vec(const Vec&)> fn) {
  require(dim > 0, "black_box map: dimension must be positive");
  require(static_cast<bool>(fn), "black_box map: empty callable");
  VectorMap F;
  F.kind_ = Kind::BlackBox;
  F.dim_ = dim;
  F.name_ = std::move(name);
  F.fn_ = std::move(fn);
  return F;
}

VectorMap VectorMap::with_constants(std::optional<double> mu,
                                    std::optional<double> L) const {
  if (mu) require(*mu >= 0.0, "declared mu must be >= 0");
  if (L) {
    require(*L > 0.0, "declared L must be > 0");
    if (kind_ == Kind::Affine)
      require(*L >= spectral_norm(M_) - 1e-8,
              "declared L undercuts the spectral norm of M");
  }
  VectorMap F = *this;
  F.mu_ = mu;
  F.L_ = L;
  return F;
}

Vec VectorMap::operator()(const Vec& x) const {
  require_dim(x, dim_, "evaluate");
  if (kind_ == Kind::Affine) return M_ * x + q_;
  Vec y = fn_(x);
  require(y.size() == dim_, "black_box map returned wrong dimension");
  return y;
}

double estimate_lipschitz(const VectorMap& F) {
  require(F.kind() == VectorMap::Kind::Affine,
          "estimate_lipschitz: affine maps only; use the sampled variant");
  return spectral_norm(F.matrix());
}

LipschitzEstimate estimate_lipschitz_sampled(const VectorMap& F, const ConvexSet& domain,
                                             int samples, std::uint64_t seed) {
  require(samples >= 1, "estimate_lipschitz_sampled: samples must be >= 1");
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec x = sample_point(domain, rng);
    const Vec y = sample_point(domain, rng);
    const double d = (x - y).norm();
    if (d < 1e-12) continue;
    best = std::max(best, (F(x) - F(y)).norm() / d);
  }
  return {best, true};
}

MonotonicityReport probe_monotone(const VectorMap& F, const ConvexSet& S,
                                  int samples, std::uint64_t seed) {
  require(samples >= 1, "probe_monotone: samples must be >= 1");
  PairStream pairs(F, S, seed);
  MonotonicityReport rep;
  rep.samples = samples;
  rep.min_inner = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const auto [x, y] = pairs.next(i);
    const double v = (F(x) - F(y)).dot(x - y);
    if (v < rep.min_inner) {
      rep.min_inner = v;
      if (v < -1e-10) rep.witness = {x, y};
    }
  }
  if (!std::isfinite(rep.min_inner)) rep.min_inner = 0.0;
  return rep;
}

ModulusEstimate probe_strong_pseudomonotone(const VectorMap& F, const ConvexSet& S,
                                            int samples, std::uint64_t seed) {
  require(samples >= 1, "probe_strong_pseudomonotone: samples must be >= 1");
  PairStream pairs(F, S, seed);
  ModulusEstimate est;
  est.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const auto [x, y] = pairs.next(i);
    const Vec d = y - x;
    const double dn2 = d.squaredNorm();
    if (dn2 < 1e-18) continue;
    if (F(x).dot(d) < 0.0) continue;
    const double ratio = F(y).dot(d) / dn2;
    ++est.qualifying_pairs;
    if (ratio < est.value) {
      est.value = ratio;
      est.witness_x = x;
      est.witness_y = y;
    }
  }
  require(est.qualifying_pairs > 0,
          "probe_strong_pseudomonotone: no qualifying pair sampled");
  return est;
}

ModulusEstimate probe_inverse_strong_monotone(const VectorMap& F, const ConvexSet& S,
                                              int samples, std::uint64_t seed) {
  require(samples >= 1, "probe_inverse_strong_monotone: samples must be >= 1");
  PairStream pairs(F, S, seed);
  ModulusEstimate est;
  est.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const auto [x, y] = pairs.next(i);
    const Vec df = F(x) - F(y);
    const double fn2 = df.squaredNorm();
    if (fn2 < 1e-18) continue;
    const double ratio = df.dot(x - y) / fn2;
    ++est.qualifying_pairs;
    if (ratio < est.value) {
      est.value = ratio;
      est.witness_x = x;
      est.witness_y = y;
    }
  }
  require(est.qualifying_pairs > 0,
          "probe_inverse_strong_monotone: no qualifying pair sampled (F constant?)");
  return est;
}

PseudomonotonePlusReport probe_pseudomonotone_plus(const VectorMap& F, const ConvexSet& S,
                                                   int samples, std::uint64_t seed) {
  require(samples >= 1, "probe_pseudomonotone_plus: samples must be >= 1");
  PairStream pairs(F, S, seed);
  PseudomonotonePlusReport rep;
  for (int i = 0; i < samples; ++i) {
    const auto [x, y] = pairs.next(i);
    const Vec d = y - x;
    if (F(x).dot(d) < 0.0) continue;
    const double fyd = F(y).dot(d);
    if (fyd < -1e-10 && !rep.pseudo_witness) {
      rep.pseudomonotone_on_sample = false;
      rep.pseudo_witness = {x, y};
    }
    if (std::abs(fyd) <= 1e-9) {
      ++rep.equality_pairs;
      const double dev = (F(x) - F(y)).norm();
      if (dev > rep.max_map_deviation) {
        rep.max_map_deviation = dev;
        rep.deviation_witness = {x, y};
      }
    }
  }
  return rep;
}

}  // namespace visharp
