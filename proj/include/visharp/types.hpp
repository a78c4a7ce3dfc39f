#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace visharp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Library-wide defaults. Membership is always decided numerically.
inline constexpr double kMembershipTol = 1e-8;
inline constexpr double kActivityTol = 1e-9;
inline constexpr double kConeMemberTol = 1e-9;
inline constexpr int kDykstraCycleCap = 10000;
inline constexpr double kDykstraStopTol = 1e-12;
inline constexpr std::uint64_t kDefaultSeed = 42;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

inline void require_dim(const Vec& x, Eigen::Index n, const char* where) {
  if (x.size() != n)
    throw Error(std::string(where) + ": dimension mismatch (got " +
                std::to_string(x.size()) + ", expected " + std::to_string(n) + ")");
}

}  // namespace visharp
