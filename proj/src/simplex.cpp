#include "pooling/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace pooling {

namespace {

class RevisedSimplex {
 public:
  RevisedSimplex(const PackingLp& lp, const SimplexOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.rows), ncols_(static_cast<int>(lp.columns.size())) {
    const double scale = std::max(1.0, lp.c.size() > 0 ? lp.c.cwiseAbs().maxCoeff() : 0.0);
    opt_tol_ = 1e-9 * scale;
    basis_.resize(m_);
    is_basic_.assign(ncols_ + m_, false);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = ncols_ + i;
      is_basic_[ncols_ + i] = true;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xb_ = lp.b;
    y_ = Eigen::VectorXd::Zero(m_);
  }

  SimplexResult run();

 private:
  double cost(int var) const { return var < ncols_ ? lp_.c[var] : 0.0; }

  double reduced_cost(int var) const {
    if (var >= ncols_) return -y_[var - ncols_];
    double d = lp_.c[var];
    for (const auto& [row, a] : lp_.columns[var]) d -= y_[row] * a;
    return d;
  }

  Eigen::VectorXd column_image(int var) const {
    if (var >= ncols_) return binv_.col(var - ncols_);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m_);
    for (const auto& [row, a] : lp_.columns[var]) u += a * binv_.col(row);
    return u;
  }

  void refactor();
  SimplexResult snapshot(int iterations) const;

  const PackingLp& lp_;
  SimplexOptions opts_;
  int m_;
  int ncols_;
  double opt_tol_ = 1e-9;
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd y_;
};

void RevisedSimplex::refactor() {
  Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    const int var = basis_[i];
    if (var >= ncols_) {
      basis_matrix(var - ncols_, i) = 1.0;
    } else {
      for (const auto& [row, a] : lp_.columns[var]) basis_matrix(row, i) = a;
    }
  }
  binv_ = basis_matrix.partialPivLu().inverse();
  xb_ = binv_ * lp_.b;
  for (int i = 0; i < m_; ++i) {
    if (xb_[i] < 0.0 && xb_[i] > -1e-9) xb_[i] = 0.0;
  }
  Eigen::VectorXd cb(m_);
  for (int i = 0; i < m_; ++i) cb[i] = cost(basis_[i]);
  y_ = binv_.transpose() * cb;
}

SimplexResult RevisedSimplex::snapshot(int iterations) const {
  SimplexResult out;
  out.x = Eigen::VectorXd::Zero(ncols_);
  out.objective = 0.0;
  for (int i = 0; i < m_; ++i) {
    if (basis_[i] < ncols_) {
      out.x[basis_[i]] = std::max(0.0, xb_[i]);
      out.objective += lp_.c[basis_[i]] * out.x[basis_[i]];
    }
  }
  out.y = y_.cwiseMax(0.0);
  out.iterations = iterations;
  return out;
}

SimplexResult RevisedSimplex::run() {
  const int cap = opts_.max_iterations > 0 ? opts_.max_iterations : 20 * (m_ + ncols_) + 1000;
  const int nvars = ncols_ + m_;
  int degenerate_streak = 0;
  for (int iter = 0;; ++iter) {
    if (iter > 0 && iter % opts_.refactor_every == 0) refactor();

    const bool bland = degenerate_streak >= opts_.degenerate_streak_for_bland;
    int entering = -1;
    double best = opt_tol_;
    for (int var = 0; var < nvars; ++var) {
      if (is_basic_[var]) continue;
      const double d = reduced_cost(var);
      if (d > best) {
        entering = var;
        best = d;
        if (bland) break;
      }
    }
    if (entering < 0) {
      refactor();
      return snapshot(iter);
    }
    if (iter >= cap) throw SimplexIterationLimit(snapshot(iter));

    const Eigen::VectorXd u = column_image(entering);
    int leave = -1;
    double ratio = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (u[i] <= 1e-11) continue;
      const double r = std::max(0.0, xb_[i]) / u[i];
      if (leave < 0 || r < ratio - 1e-12) {
        leave = i;
        ratio = r;
      } else if (r <= ratio + 1e-12 && basis_[i] < basis_[leave]) {
        leave = i;
        ratio = std::min(ratio, r);
      }
    }
    if (leave < 0) throw std::runtime_error("linear program is unbounded");

    degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;

    xb_ -= ratio * u;
    xb_[leave] = ratio;
    is_basic_[basis_[leave]] = false;
    is_basic_[entering] = true;
    basis_[leave] = entering;

    const double pivot = u[leave];
    const Eigen::RowVectorXd pivot_row = binv_.row(leave) / pivot;
    Eigen::VectorXd w = u;
    w[leave] = 0.0;
    binv_.noalias() -= w * pivot_row;
    binv_.row(leave) = pivot_row;
    y_ += best * pivot_row.transpose();
  }
}

}  // namespace

SimplexResult solve_packing_lp(const PackingLp& lp, const SimplexOptions& opts) {
  if (lp.b.size() != lp.rows) throw std::invalid_argument("b must have one entry per row");
  if (lp.c.size() != static_cast<Eigen::Index>(lp.columns.size())) {
    throw std::invalid_argument("c must have one entry per column");
  }
  if ((lp.b.array() < 0.0).any()) throw std::invalid_argument("b must be non-negative");
  for (const auto& col : lp.columns) {
    for (const auto& [row, a] : col) {
      if (row < 0 || row >= lp.rows) throw std::invalid_argument("column row out of range");
    }
  }
  RevisedSimplex solver(lp, opts);
  return solver.run();
}

}  // namespace pooling
