#include "legmpc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>

#include <spdlog/spdlog.h>

namespace legmpc {

MpcWeights MpcWeights::uniform(int horizon, double l, double k) {
  if (horizon < 1 || l < 0.0 || !(k > 0.0)) throw std::invalid_argument("invalid MPC weights");
  return {VecX::Constant(kStateDim * horizon, l), VecX::Constant(kInputDim * horizon, k)};
}

QpProblem build_qp(const CondensedHorizon& horizon, const MpcWeights& weights,
                   const std::vector<LegFlags>& stance, const RobotParams& params) {
  const int n = horizon.horizon();
  const int nx = kStateDim * n, nu = kInputDim * n;
  if (weights.state.size() != nx || weights.input.size() != nu ||
      static_cast<int>(stance.size()) != n || horizon.b_bar.cols() != nu ||
      horizon.x_ref.size() != nx) {
    throw std::invalid_argument("MPC problem dimensions inconsistent");
  }
  if ((weights.input.array() <= 0.0).any() || (weights.state.array() < 0.0).any()) {
    throw std::invalid_argument("MPC weights must be non-negative with K > 0");
  }

  VecX l = weights.state;
  for (int k = 0; k < n; ++k) {
    const LegFlags& s = stance[static_cast<std::size_t>(k)];
    if (std::none_of(s.begin(), s.end(), [](bool b) { return b; }) &&
        !l.segment<kStateDim>(kStateDim * k).isZero(0.0)) {
      spdlog::warn("MPC step {} has no stance legs; its state weight is dropped", k);
      l.segment<kStateDim>(kStateDim * k).setZero();
    }
  }

  QpProblem qp;
  const MatX lb = l.asDiagonal() * horizon.b_bar;
  qp.H = 2.0 * horizon.b_bar.transpose() * lb;
  qp.H.diagonal() += 2.0 * weights.input;
  qp.H = 0.5 * (qp.H + qp.H.transpose());
  qp.f = 2.0 * lb.transpose() * (horizon.free_response - horizon.x_ref);

  int n_stance = 0;
  for (const LegFlags& s : stance) n_stance += static_cast<int>(std::count(s.begin(), s.end(), true));
  const int n_swing = kNumLegs * n - n_stance;
  qp.A_in = MatX::Zero(6 * n_stance, nu);
  qp.b_in = VecX::Zero(6 * n_stance);
  qp.A_eq = MatX::Zero(3 * n_swing, nu);
  qp.b_eq = VecX::Zero(3 * n_swing);

  int in_row = 0, eq_row = 0;
  const double mu = params.mu;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < kNumLegs; ++i) {
      const int c = kInputDim * k + 3 * i;
      if (!stance[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]) {
        for (int a = 0; a < 3; ++a) qp.A_eq(eq_row++, c + a) = 1.0;
        continue;
      }
      for (int axis = 0; axis < 2; ++axis) {
        for (double sign : {-1.0, 1.0}) {  // mu u_z + sign * u_axis >= 0
          qp.A_in(in_row, c + 2) = mu;
          qp.A_in(in_row, c + axis) = sign;
          ++in_row;
        }
      }
      qp.A_in(in_row, c + 2) = 1.0;
      qp.b_in[in_row++] = params.u_min;
      qp.A_in(in_row, c + 2) = -1.0;
      qp.b_in[in_row++] = -params.u_max;
    }
  }
  return qp;
}

GrfPlan solve_mpc(const QpProblem& qp, const CondensedHorizon& horizon, const MpcWeights& weights,
                  const std::vector<LegFlags>& stance, const QpOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const QpSolution sol = solve_qp_presolved(qp, options);
  const auto stop = std::chrono::steady_clock::now();

  GrfPlan plan;
  plan.status = sol.status;
  plan.iterations = sol.iterations;
  plan.solve_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  plan.stance = stance;
  if (!sol.ok()) {
    throw MpcFailure(std::string("MPC QP failed: ") + to_string(sol.status) + " (horizon " +
                         std::to_string(horizon.horizon()) + ", " + std::to_string(qp.dim()) +
                         " variables, " + std::to_string(qp.num_in()) + " inequalities, " +
                         std::to_string(qp.num_eq()) + " equalities)",
                     sol.status);
  }
  plan.u = sol.x;
  for (int i = 0; i < kNumLegs; ++i) plan.first[i] = plan.force(0, i);
  const VecX err = horizon.free_response + horizon.b_bar * plan.u - horizon.x_ref;
  plan.objective = err.dot(weights.state.asDiagonal() * err) +
                   plan.u.dot(weights.input.asDiagonal() * plan.u);
  return plan;
}

Wrench wrench_from_forces(const std::array<Vec3, kNumLegs>& forces, const FootPositions& feet,
                          const Vec3& com) {
  Wrench w = Wrench::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    w.head<3>() += (feet[i] - com).cross(forces[i]);
    w.tail<3>() += forces[i];
  }
  return w;
}

Wrench wrench_from_plan(const GrfPlan& plan, const FootPositions& feet, const Vec3& com) {
  return wrench_from_forces(plan.first, feet, com);
}

double constraint_violation(const GrfPlan& plan, const RobotParams& params) {
  double worst = 0.0;
  for (int k = 0; k < plan.horizon(); ++k) {
    for (int i = 0; i < kNumLegs; ++i) {
      const Vec3 f = plan.force(k, i);
      if (!plan.stance.at(static_cast<std::size_t>(k))[static_cast<std::size_t>(i)]) {
        worst = std::max(worst, f.cwiseAbs().maxCoeff());
        continue;
      }
      const double cone = params.mu * f.z();
      worst = std::max({worst, std::abs(f.x()) - cone, std::abs(f.y()) - cone,
                        params.u_min - f.z(), f.z() - params.u_max});
    }
  }
  return worst;
}

SolveLog::SolveLog(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string());
  out_ << "# legmpc solve log v1\nt,status,iterations,objective";
  for (int i = 0; i < kNumLegs; ++i) {
    for (char a : {'x', 'y', 'z'}) out_ << ",F_" << leg_name(i) << '_' << a;
  }
  out_ << '\n' << std::setprecision(9);
}

void SolveLog::append(const GrfPlan& plan) {
  out_ << plan.stamp << ',' << to_string(plan.status) << ',' << plan.iterations << ','
       << plan.objective;
  for (const Vec3& f : plan.first) out_ << ',' << f.x() << ',' << f.y() << ',' << f.z();
  out_ << '\n';
}

}  // namespace legmpc
