#pragma once

#include <vector>

#include "legmpc/state.hpp"

namespace legmpc {

using MatA = Eigen::Matrix<double, kStateDim, kStateDim>;
using MatB = Eigen::Matrix<double, kStateDim, kInputDim>;

struct RobotParams {
  double mass = 130.0;
  Mat3 inertia = Eigen::Vector3d(4.0, 11.0, 12.0).asDiagonal();  // body frame
  double mu = 0.7;
  double u_min = 0.0;
  double u_max = 2.5 * 130.0 * kGravity / 2.0;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  double weight() const { return mass * kGravity; }
};

struct ContinuousModel {
  MatA a = MatA::Zero();
  MatB b = MatB::Zero();
};

/// Linearized centroidal dynamics at the reference orientation. Moment arms
/// are foot positions relative to `com`; the inertia is rotated to world.
ContinuousModel continuous_matrices(const EulerZYX& angles_ref, const Vec3& com,
                                    const FootPositions& feet, const RobotParams& params);

/// exp(M) by scaling and squaring with a degree-6 Pade approximant.
MatX expm(const MatX& m);

struct Discretized {
  MatX a;
  MatX b;
};

/// Exact zero-order-hold discretization through the augmented exponential
/// exp([[A, B], [0, 0]] dt).
Discretized discretize_zoh(const MatX& a, const MatX& b, double dt);

struct DiscreteLtv {
  std::vector<MatX> a;  // A_d[k]
  std::vector<MatX> b;  // B_d[k]
  double period = 0.0;

  int horizon() const { return static_cast<int>(a.size()); }
};

/// X = a_bar * x0 + b_bar * u stacks x[1..n].
struct CondensedHorizon {
  MatX a_bar;
  MatX b_bar;
  VecX x0;
  VecX free_response;  // a_bar * x0
  VecX x_ref;          // stacked references for x[1..n], filled by the caller

  int horizon() const { return static_cast<int>(a_bar.rows() / a_bar.cols()); }
};

CondensedHorizon condense(const DiscreteLtv& ltv, const VecX& x0);

}  // namespace legmpc
