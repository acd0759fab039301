#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include "legmpc/qpsolver.hpp"
#include "legmpc/terrain.hpp"
#include "legmpc/types.hpp"

namespace oracle {

using legmpc::MatX;
using legmpc::VecX;

/// exp(M) by a truncated Taylor series on M / 2^s followed by s squarings.
inline MatX taylor_expm(const MatX& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.1) ++s;
  const MatX x = m / std::ldexp(1.0, s);
  MatX term = MatX::Identity(m.rows(), m.cols());
  MatX sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// B_d from a composite Simpson rule on the integral of exp(A tau) B.
inline MatX simpson_input_matrix(const MatX& a, const MatX& b, double dt, int intervals = 200) {
  MatX acc = MatX::Zero(b.rows(), b.cols());
  const double h = dt / intervals;
  for (int i = 0; i <= intervals; ++i) {
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * taylor_expm(a * (i * h)) * b;
  }
  return acc * h / 3.0;
}

/// Minimizer of a strictly convex QP by solving the KKT system of every
/// subset of inequality rows and keeping the best primal-feasible candidate.
inline std::optional<VecX> enumerate_active_sets(const legmpc::QpProblem& qp, double feas_tol = 1e-9) {
  const int d = qp.dim(), p = qp.num_eq(), m = qp.num_in();
  std::optional<VecX> best;
  double best_obj = 0.0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) rows.push_back(i);
    }
    const int k = p + static_cast<int>(rows.size());
    if (k > d) continue;
    MatX kkt = MatX::Zero(d + k, d + k);
    VecX rhs = VecX::Zero(d + k);
    kkt.topLeftCorner(d, d) = qp.H;
    rhs.head(d) = -qp.f;
    MatX a(k, d);
    VecX b(k);
    if (p > 0) {
      a.topRows(p) = qp.A_eq;
      b.head(p) = qp.b_eq;
    }
    for (std::size_t j = 0; j < rows.size(); ++j) {
      a.row(p + static_cast<int>(j)) = qp.A_in.row(rows[j]);
      b[p + static_cast<int>(j)] = qp.b_in[rows[j]];
    }
    kkt.topRightCorner(d, k) = -a.transpose();
    kkt.bottomLeftCorner(k, d) = a;
    rhs.tail(k) = b;
    Eigen::FullPivLU<MatX> lu(kkt);
    if (!lu.isInvertible()) continue;
    const VecX x = lu.solve(rhs).head(d);
    if (m > 0 && ((qp.A_in * x - qp.b_in).array() < -feas_tol).any()) continue;
    if (p > 0 && (qp.A_eq * x - qp.b_eq).cwiseAbs().maxCoeff() > feas_tol) continue;
    const double obj = qp.objective(x);
    if (!best || obj < best_obj) {
      best = x;
      best_obj = obj;
    }
  }
  return best;
}

/// Random strictly convex QP with a known feasible point.
inline legmpc::QpProblem random_qp(std::mt19937_64& rng, int d, int n_eq, int n_in) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto randn = [&](int r, int c) {
    MatX m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  legmpc::QpProblem qp;
  const MatX m = randn(d, d);
  qp.H = m.transpose() * m + 0.1 * MatX::Identity(d, d);
  qp.f = randn(d, 1);
  const VecX x_feas = randn(d, 1);
  qp.A_eq = randn(n_eq, d);
  qp.b_eq = qp.A_eq * x_feas;
  qp.A_in = randn(n_in, d);
  qp.b_in = qp.A_in * x_feas;
  for (int i = 0; i < n_in; ++i) qp.b_in[i] -= u(rng);
  qp.normalize();
  return qp;
}

/// Distance from p to the nearest cell boundary where the height jumps by at
/// least `threshold` or one side is unknown (brute force over the whole map).
inline double edge_distance(const legmpc::HeightMap& map, const legmpc::Vec2& p, double threshold) {
  using legmpc::Vec2;
  const double res = map.resolution();
  double best = std::numeric_limits<double>::infinity();
  const auto seg = [&](Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (p - a - t * d).norm());
  };
  const auto hard = [&](int r0, int c0, int r1, int c1) {
    const bool k0 = map.known({r0, c0}), k1 = map.known({r1, c1});
    if (!k0 || !k1) return k0 != k1;
    return std::abs(map.at({r0, c0}) - map.at({r1, c1})) >= threshold;
  };
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const Vec2 lo = map.origin() + Vec2(c * res, r * res);
      if (c + 1 < map.width() && hard(r, c, r, c + 1)) seg(lo + Vec2(res, 0), lo + Vec2(res, res));
      if (r + 1 < map.height() && hard(r, c, r + 1, c)) seg(lo + Vec2(0, res), lo + Vec2(res, res));
    }
  }
  return best;
}

}  // namespace oracle
