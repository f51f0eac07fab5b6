#include "ez/inference.hpp"

#include <cmath>

namespace ez {

KlValue kl_divergence(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q) {
  if (p.size() != q.size()) throw ValidationError("kl_divergence: pmfs over different consequence sets");
  double d = 0.0;
  for (Eigen::Index y = 0; y < p.size(); ++y) {
    if (p(y) <= 0.0) continue;
    if (q(y) <= 0.0) return {kInf};
    d += p(y) * std::log(p(y) / q(y));
  }
  // Rounding can push an exact match a hair below zero.
  return {d < 0.0 ? 0.0 : d};
}

Eigen::MatrixXd divergence_table(const Kernel& truth, const Kernel& model, int n) {
  Eigen::MatrixXd k(n, n);
  for (int ai = 0; ai < n; ++ai)
    for (int aj = 0; aj < n; ++aj) {
      const auto r = kernel_row(ai, aj, n);
      k(ai, aj) = kl_divergence(truth.row(r).transpose(), model.row(r).transpose());
    }
  return k;
}

double weighted_objective(double own, double k_own, double other, double k_other) {
  double v = 0.0;
  if (own > 0.0) v += own * k_own;
  if (other > 0.0) v += other * k_other;
  return v;
}

KlValue weighted_kl(const Model& model, const StageGame& game, int s, Group g, const Zeitgeist& z) {
  const int n = game.n_actions();
  const MatchWeights w = match_weights(z.shares, z.lambda, g);
  const Profile& pr = z.profile.at(s);
  const Kernel& truth = game.situations.at(s).kernel;
  const int a_own = pr.at(g, g);
  const int a_out = pr.at(g, other(g)), a_opp = pr.at(other(g), g);
  const auto r1 = kernel_row(a_own, a_own, n), r2 = kernel_row(a_out, a_opp, n);
  const double k1 = kl_divergence(truth.row(r1).transpose(), model.kernel.row(r1).transpose());
  const double k2 = kl_divergence(truth.row(r2).transpose(), model.kernel.row(r2).transpose());
  return {weighted_objective(w.own, k1, w.other, k2)};
}

BestFit best_fit_set(const Eigen::Ref<const Eigen::VectorXd>& obj, double tie_tol) {
  BestFit out;
  const double lo = obj.size() ? obj.minCoeff() : kInf;
  if (!(lo < kInf)) {
    out.all_infinite = true;
    for (Eigen::Index i = 0; i < obj.size(); ++i) out.members.push_back(static_cast<int>(i));
    return out;
  }
  for (Eigen::Index i = 0; i < obj.size(); ++i)
    if (obj(i) <= lo + tie_tol) out.members.push_back(static_cast<int>(i));
  return out;
}

BestFit best_fit_set(const Theory& t, const StageGame& game, int s, Group g, const Zeitgeist& z,
                     double tie_tol) {
  Eigen::VectorXd obj(t.models.size());
  for (size_t m = 0; m < t.models.size(); ++m) obj(m) = weighted_kl(t.models[m], game, s, g, z);
  return best_fit_set(obj, tie_tol);
}

}  // namespace ez
