#pragma once
// Small dense two-phase simplex (Bland's rule). Problem sizes here are tiny.

#include <Eigen/Dense>

namespace ez {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
};

// maximize c.x subject to A x = b, x >= 0.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

// Max-min separation: maximize t over q in the simplex with q.(target - v_k) >= t
// for every row v_k of `points`. Returns (t, q).
struct Separation {
  double t = 0.0;
  Eigen::VectorXd q;
};
Separation max_min_separation(const Eigen::VectorXd& target, const Eigen::MatrixXd& points);

}  // namespace ez
