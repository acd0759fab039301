#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <vector>

#include "legmpc/model.hpp"
#include "legmpc/qpsolver.hpp"

namespace legmpc {

/// Diagonals of L (15n) and K (12n).
struct MpcWeights {
  VecX state;
  VecX input;

  static MpcWeights uniform(int horizon, double l, double k);
  int horizon() const { return static_cast<int>(state.size() / kStateDim); }
};

struct MpcConfig {
  int horizon = 20;
  double state_weight = 1.0;
  double input_weight = 1e-9;
  QpOptions qp;
};

/// H = 2(B'LB + K), f = 2B'L(A x0 - X_ref); friction pyramid and force
/// bounds for stance legs, equality rows zeroing every swing-leg component.
/// Steps without stance legs get their state weight zeroed (with a warning).
QpProblem build_qp(const CondensedHorizon& horizon, const MpcWeights& weights,
                   const std::vector<LegFlags>& stance, const RobotParams& params);

struct GrfPlan {
  QpStatus status = QpStatus::Infeasible;
  VecX u;  // 12n stacked forces
  std::array<Vec3, kNumLegs> first{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::vector<LegFlags> stance;
  double objective = 0.0;  // ||X - X_ref||_L^2 + ||u||_K^2
  int iterations = 0;
  double solve_ms = 0.0;
  double stamp = 0.0;  // simulation time of the state the plan was computed from

  Vec3 force(int step, int leg) const { return u.segment<3>(kInputDim * step + 3 * leg); }
  int horizon() const { return static_cast<int>(u.size() / kInputDim); }
};

class MpcFailure : public std::runtime_error {
 public:
  MpcFailure(const std::string& what, QpStatus status) : std::runtime_error(what), status(status) {}
  QpStatus status;
};

/// Solves the QP (with fixed-variable presolve). Throws MpcFailure when the
/// solver does not reach an optimum.
GrfPlan solve_mpc(const QpProblem& qp, const CondensedHorizon& horizon, const MpcWeights& weights,
                  const std::vector<LegFlags>& stance, const QpOptions& options = {});

/// Sum over legs of [(p_i - com) x F_i; F_i].
Wrench wrench_from_forces(const std::array<Vec3, kNumLegs>& forces, const FootPositions& feet,
                          const Vec3& com);
Wrench wrench_from_plan(const GrfPlan& plan, const FootPositions& feet, const Vec3& com);

/// Largest violation of the pyramid, bound and swing-zero constraints over all steps.
double constraint_violation(const GrfPlan& plan, const RobotParams& params);

/// Latest completed plan; readers never observe a partially written one.
class PlanBuffer {
 public:
  void publish(std::shared_ptr<const GrfPlan> plan) {
    std::lock_guard lock(mutex_);
    plan_ = std::move(plan);
  }
  std::shared_ptr<const GrfPlan> latest() const {
    std::lock_guard lock(mutex_);
    return plan_;
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const GrfPlan> plan_;
};

/// CSV record per solve: time, status, iterations, objective, first-step forces.
/// Wall-clock solve times are left out so the file is reproducible.
class SolveLog {
 public:
  explicit SolveLog(const std::filesystem::path& path);
  void append(const GrfPlan& plan);

 private:
  std::ofstream out_;
};

}  // namespace legmpc
