#include "legmpc/qpsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

namespace legmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Nonzeros of one constraint row.
struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;
  double max_abs = 0.0;

  double dot(const VecX& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x[index[k]];
    return s;
  }
};

std::vector<SparseRow> sparse_rows(const MatX& a) {
  std::vector<SparseRow> rows(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    SparseRow& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        r.index.push_back(static_cast<int>(j));
        r.value.push_back(a(i, j));
        r.max_abs = std::max(r.max_abs, std::abs(a(i, j)));
      }
    }
  }
  return rows;
}

// Smallest eigenvalue estimate of an SPD matrix from power iteration on its inverse.
double min_eigenvalue_estimate(const Eigen::LLT<MatX>& llt, Eigen::Index dim) {
  VecX v = VecX::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  double lambda_inv = 0.0;
  for (int it = 0; it < 50; ++it) {
    const VecX w = llt.solve(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return 0.0;
    v = w / norm;
    if (std::abs(next - lambda_inv) <= 1e-6 * std::abs(next)) {
      lambda_inv = next;
      break;
    }
    lambda_inv = next;
  }
  return lambda_inv > 0.0 ? 1.0 / lambda_inv : 0.0;
}

class GoldfarbIdnani {
 public:
  GoldfarbIdnani(const QpProblem& qp, const QpOptions& opt)
      : qp_(qp),
        opt_(opt),
        n_(qp.dim()),
        p_(qp.num_eq()),
        m_(qp.num_in()),
        eq_(sparse_rows(qp.A_eq)),
        in_(sparse_rows(qp.A_in)) {}

  QpSolution run();

 private:
  bool factorize(QpSolution& sol);
  void reset_basis();
  const SparseRow& row(int active) const {
    return active < 0 ? eq_[static_cast<std::size_t>(-active - 1)]
                      : in_[static_cast<std::size_t>(active)];
  }
  void compute_d(const SparseRow& np);
  void update_z();
  void update_r();
  bool add_constraint();
  void delete_constraint(int l);
  bool rebuild_active_set(int count);
  double threshold(int i) const;
  QpSolution finish(QpSolution sol, QpStatus status);

  const QpProblem& qp_;
  QpOptions opt_;
  int n_, p_, m_;
  std::vector<SparseRow> eq_, in_;

  Eigen::LLT<MatX> llt_;
  MatX J_, R_;
  VecX d_, z_, r_, u_, x_;
  std::vector<int> A_;  // active constraints: -i-1 for equality i, index for inequalities
  int iq_ = 0;
  double r_norm_ = 1.0;
  int iterations_ = 0;
};

bool GoldfarbIdnani::factorize(QpSolution& sol) {
  llt_.compute(qp_.H);
  bool regularize = llt_.info() != Eigen::Success;
  if (!regularize && n_ > 0) regularize = min_eigenvalue_estimate(llt_, n_) < opt_.min_eigenvalue;
  if (regularize) {
    sol.regularization = opt_.min_eigenvalue;
    llt_.compute(qp_.H + opt_.min_eigenvalue * MatX::Identity(n_, n_));
    if (llt_.info() != Eigen::Success) return false;
  }
  return true;
}

void GoldfarbIdnani::reset_basis() {
  J_ = llt_.matrixU().solve(MatX::Identity(n_, n_));
  R_.setZero(n_, n_);
  iq_ = 0;
  r_norm_ = 1.0;
}

void GoldfarbIdnani::compute_d(const SparseRow& np) {
  d_.setZero(n_);
  for (std::size_t k = 0; k < np.index.size(); ++k) d_ += np.value[k] * J_.row(np.index[k]).transpose();
}

void GoldfarbIdnani::update_z() {
  z_ = J_.rightCols(n_ - iq_) * d_.tail(n_ - iq_);
}

void GoldfarbIdnani::update_r() {
  for (int i = iq_ - 1; i >= 0; --i) {
    double sum = d_[i];
    for (int j = i + 1; j < iq_; ++j) sum -= R_(i, j) * r_[j];
    r_[i] = sum / R_(i, i);
  }
}

bool GoldfarbIdnani::add_constraint() {
  for (int j = n_ - 1; j >= iq_ + 1; --j) {
    double cc = d_[j - 1], ss = d_[j];
    const double h = std::hypot(cc, ss);
    if (std::abs(h) < kEps) continue;
    d_[j] = 0.0;
    cc /= h;
    ss /= h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d_[j - 1] = -h;
    } else {
      d_[j - 1] = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = 0; k < n_; ++k) {
      const double t1 = J_(k, j - 1), t2 = J_(k, j);
      J_(k, j - 1) = t1 * cc + t2 * ss;
      J_(k, j) = xny * (t1 + J_(k, j - 1)) - t2;
    }
  }
  ++iq_;
  R_.col(iq_ - 1).head(iq_) = d_.head(iq_);
  if (std::abs(d_[iq_ - 1]) <= kEps * r_norm_) return false;
  r_norm_ = std::max(r_norm_, std::abs(d_[iq_ - 1]));
  return true;
}

void GoldfarbIdnani::delete_constraint(int l) {
  int qq = -1;
  for (int i = p_; i < iq_; ++i) {
    if (A_[static_cast<std::size_t>(i)] == l) {
      qq = i;
      break;
    }
  }
  if (qq < 0) return;
  for (int i = qq; i < iq_ - 1; ++i) {
    A_[static_cast<std::size_t>(i)] = A_[static_cast<std::size_t>(i) + 1];
    u_[i] = u_[i + 1];
    R_.col(i) = R_.col(i + 1);
  }
  A_[static_cast<std::size_t>(iq_) - 1] = A_[static_cast<std::size_t>(iq_)];
  u_[iq_ - 1] = u_[iq_];
  A_[static_cast<std::size_t>(iq_)] = 0;
  u_[iq_] = 0.0;
  R_.col(iq_ - 1).head(iq_).setZero();
  --iq_;
  if (iq_ == 0) return;

  for (int j = qq; j < iq_; ++j) {
    double cc = R_(j, j), ss = R_(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (std::abs(h) < kEps) continue;
    cc /= h;
    ss /= h;
    R_(j + 1, j) = 0.0;
    if (cc < 0.0) {
      R_(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      R_(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < iq_; ++k) {
      const double t1 = R_(j, k), t2 = R_(j + 1, k);
      R_(j, k) = t1 * cc + t2 * ss;
      R_(j + 1, k) = xny * (t1 + R_(j, k)) - t2;
    }
    for (int k = 0; k < n_; ++k) {
      const double t1 = J_(k, j), t2 = J_(k, j + 1);
      J_(k, j) = t1 * cc + t2 * ss;
      J_(k, j + 1) = xny * (J_(k, j) + t1) - t2;
    }
  }
}

// Refactors the basis for the first `count` entries of A_.
bool GoldfarbIdnani::rebuild_active_set(int count) {
  const std::vector<int> active(A_.begin(), A_.begin() + count);
  reset_basis();
  for (int a : active) {
    compute_d(row(a));
    if (!add_constraint()) return false;
  }
  return true;
}

double GoldfarbIdnani::threshold(int i) const {
  const double b = std::abs(qp_.b_in[i]);
  const double ax = in_[static_cast<std::size_t>(i)].max_abs * x_.lpNorm<Eigen::Infinity>();
  return 1e-3 * opt_.tol * std::max({1.0, b, ax});
}

QpSolution GoldfarbIdnani::finish(QpSolution sol, QpStatus status) {
  sol.status = status;
  sol.x = x_;
  sol.iterations = iterations_;
  sol.objective = qp_.objective(x_);
  sol.lambda_eq = u_.head(p_);
  sol.mu_in = VecX::Zero(m_);
  sol.active_set.clear();
  for (int i = p_; i < iq_; ++i) {
    const int c = A_[static_cast<std::size_t>(i)];
    sol.active_set.push_back(c);
    sol.mu_in[c] = u_[i];
  }
  std::sort(sol.active_set.begin(), sol.active_set.end());
  return sol;
}

QpSolution GoldfarbIdnani::run() {
  QpSolution sol;
  if (!factorize(sol)) throw std::invalid_argument("QP Hessian is not positive semidefinite");
  const int total = n_ + p_ + m_;
  const int limit = 10 * total;
  u_.setZero(total + 1);
  r_.setZero(total + 1);
  A_.assign(static_cast<std::size_t>(total) + 1, 0);
  x_ = -llt_.solve(qp_.f);
  reset_basis();

  for (int i = 0; i < p_; ++i) {
    const SparseRow& np = eq_[static_cast<std::size_t>(i)];
    compute_d(np);
    update_z();
    update_r();
    double t2 = 0.0;
    if (z_.squaredNorm() > kEps) t2 = (qp_.b_eq[i] - np.dot(x_)) / np.dot(z_);
    x_ += t2 * z_;
    u_[iq_] = t2;
    u_.head(iq_) -= t2 * r_.head(iq_);
    A_[static_cast<std::size_t>(i)] = -i - 1;
    if (!add_constraint()) return finish(sol, QpStatus::DegenerateEqualities);
  }

  std::vector<int> iai(static_cast<std::size_t>(m_));
  std::vector<bool> excluded(static_cast<std::size_t>(m_), false);
  for (int i = 0; i < m_; ++i) iai[static_cast<std::size_t>(i)] = i;
  VecX s(m_);

  while (true) {
    for (int i = p_; i < iq_; ++i) iai[static_cast<std::size_t>(A_[static_cast<std::size_t>(i)])] = -1;
    for (int i = 0; i < m_; ++i) s[i] = in_[static_cast<std::size_t>(i)].dot(x_) - qp_.b_in[i];
    const VecX x_old = x_;
    const VecX u_old = u_;
    const std::vector<int> a_old = A_;
    const int iq_old = iq_;
    std::fill(excluded.begin(), excluded.end(), false);

    bool restart = false;
    while (!restart) {
      // Most violated constraint not yet active.
      int ip = -1;
      double worst = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (excluded[static_cast<std::size_t>(i)] || iai[static_cast<std::size_t>(i)] == -1) continue;
        if (s[i] < -threshold(i) && s[i] < worst) {
          worst = s[i];
          ip = i;
        }
      }
      if (ip < 0) return finish(sol, QpStatus::Optimal);

      const SparseRow& np = in_[static_cast<std::size_t>(ip)];
      u_[iq_] = 0.0;
      A_[static_cast<std::size_t>(iq_)] = ip;

      while (true) {
        if (++iterations_ > limit) return finish(sol, QpStatus::IterationLimit);
        compute_d(np);
        update_z();
        update_r();

        // Largest dual step keeping the active multipliers non-negative.
        int l = -1;
        double t1 = kInf;
        for (int k = p_; k < iq_; ++k) {
          if (r_[k] > 0.0 && u_[k] / r_[k] < t1) {
            t1 = u_[k] / r_[k];
            l = A_[static_cast<std::size_t>(k)];
          }
        }
        // Full primal step onto the violated constraint.
        const double t2 = z_.squaredNorm() > kEps ? -s[ip] / np.dot(z_) : kInf;
        const double t = std::min(t1, t2);
        if (t >= kInf) return finish(sol, QpStatus::Infeasible);

        if (t2 >= kInf) {
          u_.head(iq_) -= t * r_.head(iq_);
          u_[iq_] += t;
          iai[static_cast<std::size_t>(l)] = l;
          delete_constraint(l);
          continue;
        }

        x_ += t * z_;
        u_.head(iq_) -= t * r_.head(iq_);
        u_[iq_] += t;

        if (t2 <= t1) {
          if (add_constraint()) {
            iai[static_cast<std::size_t>(ip)] = -1;
            restart = true;
            break;
          }
          // Numerically dependent: drop it and return to the last consistent point.
          excluded[static_cast<std::size_t>(ip)] = true;
          x_ = x_old;
          u_ = u_old;
          A_ = a_old;
          for (int i = 0; i < m_; ++i) iai[static_cast<std::size_t>(i)] = i;
          for (int i = p_; i < iq_old; ++i) iai[static_cast<std::size_t>(A_[static_cast<std::size_t>(i)])] = -1;
          if (!rebuild_active_set(iq_old)) return finish(sol, QpStatus::DegenerateEqualities);
          for (int i = 0; i < m_; ++i) s[i] = in_[static_cast<std::size_t>(i)].dot(x_) - qp_.b_in[i];
          break;
        }

        iai[static_cast<std::size_t>(l)] = l;
        delete_constraint(l);
        s[ip] = np.dot(x_) - qp_.b_in[ip];
      }
    }
  }
}

}  // namespace

void QpProblem::normalize() {
  const auto d = H.rows();
  if (H.cols() != d || f.size() != d) throw std::invalid_argument("QP: H and f dimensions differ");
  if (A_eq.size() == 0) A_eq.resize(0, d);
  if (A_in.size() == 0) A_in.resize(0, d);
  if (b_eq.size() == 0) b_eq.resize(A_eq.rows());
  if (b_in.size() == 0) b_in.resize(A_in.rows());
  if (A_eq.cols() != d || A_in.cols() != d || b_eq.size() != A_eq.rows() ||
      b_in.size() != A_in.rows()) {
    throw std::invalid_argument("QP: constraint dimensions inconsistent");
  }
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("QP: H is not symmetric");
  }
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal:
      return "optimal";
    case QpStatus::Infeasible:
      return "infeasible";
    case QpStatus::DegenerateEqualities:
      return "degenerate_equalities";
    case QpStatus::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

QpSolution solve_qp(const QpProblem& problem, const QpOptions& options) {
  QpProblem qp = problem;
  qp.normalize();
  return GoldfarbIdnani(qp, options).run();
}

QpSolution solve_qp_presolved(const QpProblem& problem, const QpOptions& options) {
  QpProblem qp = problem;
  qp.normalize();
  const int d = qp.dim();

  std::vector<int> fixed_by(static_cast<std::size_t>(d), -1);
  VecX fixed_value = VecX::Zero(d);
  std::vector<int> kept_eq, singleton_eq;
  for (int i = 0; i < qp.num_eq(); ++i) {
    int col = -1, nnz = 0;
    for (int j = 0; j < d; ++j) {
      if (qp.A_eq(i, j) != 0.0) {
        col = j;
        ++nnz;
      }
    }
    if (nnz != 1) {
      kept_eq.push_back(i);
      continue;
    }
    const double v = qp.b_eq[i] / qp.A_eq(i, col);
    if (fixed_by[static_cast<std::size_t>(col)] >= 0) {
      if (std::abs(v - fixed_value[col]) > options.tol * std::max(1.0, std::abs(v))) {
        QpSolution bad;
        bad.status = QpStatus::DegenerateEqualities;
        return bad;
      }
      singleton_eq.push_back(i);  // duplicate, multiplier stays 0
      continue;
    }
    fixed_by[static_cast<std::size_t>(col)] = i;
    fixed_value[col] = v;
    singleton_eq.push_back(i);
  }
  if (singleton_eq.empty()) return solve_qp(qp, options);

  std::vector<int> free_vars, fixed_vars;
  for (int j = 0; j < d; ++j) {
    (fixed_by[static_cast<std::size_t>(j)] >= 0 ? fixed_vars : free_vars).push_back(j);
  }
  const VecX xf = fixed_value(fixed_vars);

  QpProblem red;
  red.H = qp.H(free_vars, free_vars);
  red.f = VecX(qp.f(free_vars)) + qp.H(free_vars, fixed_vars) * xf;
  red.A_eq = qp.A_eq(kept_eq, free_vars);
  red.b_eq = VecX(qp.b_eq(kept_eq)) - qp.A_eq(kept_eq, fixed_vars) * xf;

  std::vector<int> kept_in;
  const VecX b_in_shift = qp.b_in - qp.A_in(Eigen::all, fixed_vars) * xf;
  for (int i = 0; i < qp.num_in(); ++i) {
    bool empty = true;
    for (int j : free_vars) {
      if (qp.A_in(i, j) != 0.0) {
        empty = false;
        break;
      }
    }
    if (!empty) {
      kept_in.push_back(i);
    } else if (b_in_shift[i] > options.tol * std::max(1.0, std::abs(qp.b_in[i]))) {
      QpSolution bad;
      bad.status = QpStatus::Infeasible;
      bad.x = fixed_value;
      return bad;
    }
  }
  red.A_in = qp.A_in(kept_in, free_vars);
  red.b_in = b_in_shift(kept_in);

  QpSolution rs;
  if (free_vars.empty()) {
    rs.status = QpStatus::Optimal;
    rs.x.resize(0);
    rs.lambda_eq.resize(0);
    rs.mu_in.resize(0);
  } else {
    rs = solve_qp(red, options);
  }

  QpSolution sol;
  sol.status = rs.status;
  sol.iterations = rs.iterations;
  sol.regularization = rs.regularization;
  sol.x = fixed_value;
  if (rs.x.size() == static_cast<Eigen::Index>(free_vars.size())) sol.x(free_vars) = rs.x;
  sol.mu_in = VecX::Zero(qp.num_in());
  sol.lambda_eq = VecX::Zero(qp.num_eq());
  if (rs.mu_in.size() == static_cast<Eigen::Index>(kept_in.size())) sol.mu_in(kept_in) = rs.mu_in;
  if (rs.lambda_eq.size() == static_cast<Eigen::Index>(kept_eq.size())) {
    sol.lambda_eq(kept_eq) = rs.lambda_eq;
  }
  for (int a : rs.active_set) sol.active_set.push_back(kept_in[static_cast<std::size_t>(a)]);

  // Multipliers of the eliminated rows from stationarity in the fixed coordinates.
  const VecX g = qp.H * sol.x + qp.f - qp.A_in.transpose() * sol.mu_in -
                 qp.A_eq.transpose() * sol.lambda_eq;
  for (int j : fixed_vars) {
    const int i = fixed_by[static_cast<std::size_t>(j)];
    sol.lambda_eq[i] = g[j] / qp.A_eq(i, j);
  }
  sol.objective = qp.objective(sol.x);
  return sol;
}

double KktResiduals::max() const {
  return std::max({stationarity, primal_eq, primal_in, dual, complementarity});
}

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& s) {
  QpProblem qp = problem;
  qp.normalize();
  KktResiduals k;
  const VecX grad = qp.H * s.x + qp.f - qp.A_eq.transpose() * s.lambda_eq -
                    qp.A_in.transpose() * s.mu_in;
  k.stationarity = grad.size() ? grad.lpNorm<Eigen::Infinity>() : 0.0;
  if (qp.num_eq() > 0) k.primal_eq = (qp.A_eq * s.x - qp.b_eq).lpNorm<Eigen::Infinity>();
  if (qp.num_in() > 0) {
    const VecX slack = qp.A_in * s.x - qp.b_in;
    k.primal_in = std::max(0.0, -slack.minCoeff());
    k.dual = std::max(0.0, -s.mu_in.minCoeff());
    k.complementarity = s.mu_in.cwiseProduct(slack).cwiseAbs().maxCoeff();
  }
  return k;
}

void write_problem(std::ostream& os, const QpProblem& p) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, " ", "\n");
  os << "H " << p.H.rows() << ' ' << p.H.cols() << '\n' << p.H.format(fmt) << '\n';
  os << "f " << p.f.size() << '\n' << p.f.transpose().format(fmt) << '\n';
  os << "A_eq " << p.A_eq.rows() << ' ' << p.A_eq.cols() << '\n' << p.A_eq.format(fmt) << '\n';
  os << "b_eq " << p.b_eq.size() << '\n' << p.b_eq.transpose().format(fmt) << '\n';
  os << "A_in " << p.A_in.rows() << ' ' << p.A_in.cols() << '\n' << p.A_in.format(fmt) << '\n';
  os << "b_in " << p.b_in.size() << '\n' << p.b_in.transpose().format(fmt) << '\n';
}

}  // namespace legmpc
