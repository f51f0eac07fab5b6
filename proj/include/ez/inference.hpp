#pragma once

#include "ez/game.hpp"

#include <limits>
#include <vector>

namespace ez {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Extended nonnegative real; +inf when the model rules out an observed consequence.
struct KlValue {
  double value = 0.0;
  bool finite() const { return value < kInf; }
  operator double() const { return value; }
};

KlValue kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& truth,
                      const Eigen::Ref<const Eigen::VectorXd>& model);

// K(F; ai, aj, G) = D(F*(ai,aj,G) || F(ai,aj)) for every profile, as an n x n matrix.
Eigen::MatrixXd divergence_table(const Kernel& truth, const Kernel& model, int n_actions);

// Weighted objective: own * K(F; a_gg, a_gg) + other * K(F; a_g,-g, a_-g,g). A
// zero weight on an infinite term contributes nothing.
double weighted_objective(double own, double k_own, double other, double k_other);

KlValue weighted_kl(const Model& model, const StageGame& game, int situation, Group group,
                    const Zeitgeist& z);

struct BestFit {
  std::vector<int> members;
  bool all_infinite = false;
};

BestFit best_fit_set(const Eigen::Ref<const Eigen::VectorXd>& objectives, double tie_tol = kTieTol);
BestFit best_fit_set(const Theory& theory, const StageGame& game, int situation, Group group,
                     const Zeitgeist& z, double tie_tol = kTieTol);

}  // namespace ez
