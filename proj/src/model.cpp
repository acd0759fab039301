#include "legmpc/model.hpp"

#include <cmath>

namespace legmpc {

void RobotParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
    throw std::invalid_argument("inertia must be symmetric");
  }
  if (Eigen::LLT<Mat3>(inertia).info() != Eigen::Success) {
    throw std::invalid_argument("inertia must be positive definite");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("friction coefficient must be positive");
  if (!(u_min >= 0.0 && u_min <= u_max)) throw std::invalid_argument("need 0 <= u_min <= u_max");
}

ContinuousModel continuous_matrices(const EulerZYX& angles_ref, const Vec3& com,
                                    const FootPositions& feet, const RobotParams& params) {
  const Mat3 t_inv = euler_rate_map_inverse(angles_ref);
  const Mat3 rot = rotation_from_euler(angles_ref);
  const Mat3 inertia_world_inv = (rot * params.inertia * rot.transpose()).inverse();

  ContinuousModel m;
  m.a.block<3, 3>(sx::kAngles, sx::kOmega) = t_inv;
  m.a.block<3, 3>(sx::kPosition, sx::kVelocity).setIdentity();
  m.a.block<3, 3>(sx::kVelocity, sx::kGravity).setIdentity();
  for (int i = 0; i < kNumLegs; ++i) {
    m.b.block<3, 3>(sx::kOmega, 3 * i) = inertia_world_inv * skew(feet[i] - com);
    m.b.block<3, 3>(sx::kVelocity, 3 * i) = Mat3::Identity() / params.mass;
  }
  return m;
}

MatX expm(const MatX& m) {
  // Pade(6, 6) coefficients c_j = (12 - j)! 6! / (12! j! (6 - j)!).
  static constexpr double c[] = {1.0,
                                 1.0 / 2.0,
                                 5.0 / 44.0,
                                 1.0 / 66.0,
                                 1.0 / 792.0,
                                 1.0 / 15840.0,
                                 1.0 / 665280.0};
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const MatX x = m / std::ldexp(1.0, squarings);

  const auto dim = m.rows();
  const MatX id = MatX::Identity(dim, dim);
  const MatX x2 = x * x;
  const MatX x4 = x2 * x2;
  const MatX x6 = x4 * x2;
  const MatX even = c[0] * id + c[2] * x2 + c[4] * x4 + c[6] * x6;
  const MatX odd = x * (c[1] * id + c[3] * x2 + c[5] * x4);
  MatX e = (even - odd).partialPivLu().solve(even + odd);
  for (int s = 0; s < squarings; ++s) e = e * e;
  return e;
}

Discretized discretize_zoh(const MatX& a, const MatX& b, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discretization step must be positive");
  if (a.rows() != a.cols() || b.rows() != a.rows()) {
    throw std::invalid_argument("inconsistent system dimensions");
  }
  const auto nx = a.rows(), nu = b.cols();
  MatX aug = MatX::Zero(nx + nu, nx + nu);
  aug.topLeftCorner(nx, nx) = a * dt;
  aug.topRightCorner(nx, nu) = b * dt;
  const MatX e = expm(aug);
  return {e.topLeftCorner(nx, nx), e.topRightCorner(nx, nu)};
}

CondensedHorizon condense(const DiscreteLtv& ltv, const VecX& x0) {
  const int n = ltv.horizon();
  if (n < 1) throw std::invalid_argument("horizon must have at least one step");
  const auto nx = ltv.a.front().rows(), nu = ltv.b.front().cols();

  CondensedHorizon h;
  h.a_bar.resize(n * nx, nx);
  h.b_bar = MatX::Zero(n * nx, n * nu);
  h.a_bar.topRows(nx) = ltv.a[0];
  h.b_bar.topLeftCorner(nx, nu) = ltv.b[0];
  for (int k = 1; k < n; ++k) {
    h.a_bar.middleRows(k * nx, nx) = ltv.a[k] * h.a_bar.middleRows((k - 1) * nx, nx);
    h.b_bar.block(k * nx, 0, nx, k * nu) =
        ltv.a[k] * h.b_bar.block((k - 1) * nx, 0, nx, k * nu);
    h.b_bar.block(k * nx, k * nu, nx, nu) = ltv.b[k];
  }
  h.x0 = x0;
  h.free_response = h.a_bar * x0;
  return h;
}

}  // namespace legmpc
