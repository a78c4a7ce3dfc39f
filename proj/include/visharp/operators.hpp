#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "visharp/geometry.hpp"

namespace visharp {

// The mapping F of the problem: affine (F(x) = Mx + q) or an opaque callable
// registered under a name. Declared constants travel with the map.
class VectorMap {
 public:
  enum class Kind { Affine, BlackBox };

  static VectorMap affine(Mat M, Vec q);
  static VectorMap black_box(std::string name, int dim,
                             std::function<Vec(const Vec&)> fn);

  // Returns a copy with declared constants attached. For affine maps a
  // declared L must not undercut the spectral norm of M (within 1e-8).
  VectorMap with_constants(std::optional<double> mu, std::optional<double> L) const;

  Vec operator()(const Vec& x) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Mat& matrix() const { return M_; }
  const Vec& offset() const { return q_; }
  const std::string& name() const { return name_; }
  std::optional<double> declared_mu() const { return mu_; }
  std::optional<double> declared_L() const { return L_; }

 private:
  VectorMap() = default;

  Kind kind_ = Kind::Affine;
  int dim_ = 0;
  Mat M_;
  Vec q_;
  std::string name_;
  std::function<Vec(const Vec&)> fn_;
  std::optional<double> mu_;
  std::optional<double> L_;
};

inline Vec evaluate(const VectorMap& F, const Vec& x) { return F(x); }

// Spectral norm of M by power iteration on M^T M (relative tolerance 1e-10,
// cap 10000). Affine maps only.
double estimate_lipschitz(const VectorMap& F);

struct LipschitzEstimate {
  double value = 0.0;
  bool lower_bound_only = false;  // sampled estimates never certify an upper bound
};

// Max of ||F(x)-F(y)|| / ||x-y|| over sampled pairs from `domain`.
LipschitzEstimate estimate_lipschitz_sampled(const VectorMap& F, const ConvexSet& domain,
                                             int samples, std::uint64_t seed);

struct MonotonicityReport {
  double min_inner = 0.0;  // min over pairs of <F(x)-F(y), x-y>
  int samples = 0;
  std::optional<std::pair<Vec, Vec>> witness;  // present when min < -1e-10
  bool monotone_on_sample() const { return min_inner >= -1e-10; }
};

MonotonicityReport probe_monotone(const VectorMap& F, const ConvexSet& S,
                                  int samples, std::uint64_t seed);

struct ModulusEstimate {
  double value = 0.0;  // upper bound on any valid modulus; negative = fails
  int qualifying_pairs = 0;
  Vec witness_x, witness_y;
};

// Min of <F(y), y-x> / ||y-x||^2 over sampled pairs with <F(x), y-x> >= 0.
// Throws when no qualifying pair was sampled.
ModulusEstimate probe_strong_pseudomonotone(const VectorMap& F, const ConvexSet& S,
                                            int samples, std::uint64_t seed);

// Min of <F(x)-F(y), x-y> / ||F(x)-F(y)||^2 over pairs with F(x) != F(y).
ModulusEstimate probe_inverse_strong_monotone(const VectorMap& F, const ConvexSet& S,
                                              int samples, std::uint64_t seed);

struct PseudomonotonePlusReport {
  bool pseudomonotone_on_sample = true;
  std::optional<std::pair<Vec, Vec>> pseudo_witness;
  int equality_pairs = 0;      // pairs with <F(x),y-x> >= 0 and <F(y),y-x> ~ 0
  double max_map_deviation = 0.0;  // max ||F(x)-F(y)|| over those pairs
  std::optional<std::pair<Vec, Vec>> deviation_witness;
  bool plus_on_sample(double tol = 1e-8) const { return max_map_deviation <= tol; }
};

PseudomonotonePlusReport probe_pseudomonotone_plus(const VectorMap& F, const ConvexSet& S,
                                                   int samples, std::uint64_t seed);

}  // namespace visharp
