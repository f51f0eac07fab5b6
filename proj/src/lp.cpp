#include "ez/lp.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace ez {

namespace {

constexpr double kEps = 1e-11;

// Tableau rows 0..m-1 are constraints, last column is the rhs. basis[i] is the
// variable basic in row i. Maximizes obj (size = ncols-1) in place.
LpStatus run_simplex(Eigen::MatrixXd& tab, std::vector<int>& basis, const Eigen::VectorXd& obj, int usable) {
  const int m = static_cast<int>(tab.rows());
  const int nc = static_cast<int>(tab.cols()) - 1;
  for (int iter = 0; iter < 10000; ++iter) {
    // Reduced costs: obj_j - obj_B . column_j
    int enter = -1;
    for (int j = 0; j < usable; ++j) {
      double rc = obj(j);
      for (int i = 0; i < m; ++i) rc -= obj(basis[i]) * tab(i, j);
      if (rc > kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return LpStatus::Optimal;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      if (tab(i, enter) > kEps) {
        const double ratio = tab(i, nc) / tab(i, enter);
        if (ratio < best - kEps || (ratio < best + kEps && leave >= 0 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    if (leave < 0) return LpStatus::Unbounded;
    tab.row(leave) /= tab(leave, enter);
    for (int i = 0; i < m; ++i)
      if (i != leave && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave);
    basis[leave] = enter;
  }
  throw std::runtime_error("simplex iteration limit");
}

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m, n + m + 1);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
    tab.row(i).head(n) = sgn * A.row(i);
    tab(i, n + i) = 1.0;
    tab(i, n + m) = sgn * b(i);
    basis[i] = n + i;
  }
  // Phase 1: maximize -sum(artificials).
  Eigen::VectorXd obj1 = Eigen::VectorXd::Zero(n + m);
  obj1.tail(m).setConstant(-1.0);
  run_simplex(tab, basis, obj1, n + m);
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n) infeas += tab(i, n + m);
  LpResult res;
  if (infeas > 1e-9) return res;
  // Drive remaining zero-level artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (int j = 0; j < n; ++j)
      if (std::abs(tab(i, j)) > kEps) {
        tab.row(i) /= tab(i, j);
        for (int k = 0; k < m; ++k)
          if (k != i) tab.row(k) -= tab(k, j) * tab.row(i);
        basis[i] = j;
        break;
      }
  }
  Eigen::VectorXd obj2 = Eigen::VectorXd::Zero(n + m);
  obj2.head(n) = c;
  const LpStatus st = run_simplex(tab, basis, obj2, n);
  res.status = st;
  res.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x(basis[i]) = tab(i, n + m);
  res.value = c.dot(res.x);
  return res;
}

Separation max_min_separation(const Eigen::VectorXd& target, const Eigen::MatrixXd& points) {
  // Variables: q (g), t+, t-, slack s_k (K).
  const int g = static_cast<int>(target.size()), K = static_cast<int>(points.rows());
  const int n = g + 2 + K;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K + 1, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(K + 1), c = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < K; ++k) {
    A.row(k).head(g) = (target - points.row(k).transpose()).transpose();
    A(k, g) = -1.0;
    A(k, g + 1) = 1.0;
    A(k, g + 2 + k) = -1.0;
  }
  A.row(K).head(g).setOnes();
  b(K) = 1.0;
  c(g) = 1.0;
  c(g + 1) = -1.0;
  const LpResult r = solve_lp(A, b, c);
  if (r.status != LpStatus::Optimal) throw std::runtime_error("separation LP did not reach an optimum");
  return {r.value, r.x.head(g)};
}

}  // namespace ez
