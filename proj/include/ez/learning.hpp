#pragma once
// Finite-agent learning: Bayesian agents over extended models, noisy signals
// of opponent play, and asymptotically myopic best responses.

#include "ez/game.hpp"
#include "ez/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ez {

struct LearningConfig {
  int n_agents = 1000;  // per group
  Shares shares;
  double lambda = 0.0;
  double tau = 0.0;  // signal precision
  int horizon = 1000;
  // eps_t = eps0 * decay^t; any action within eps_t of the best is admissible
  // and the lowest index wins.
  double eps0 = 0.5;
  double eps_decay = 0.995;
  BeliefWeights prior_a, prior_b;  // over extended models; empty means uniform
  std::uint64_t seed = 1;
  int situation_block = 0;  // > 0: redraw situation and reset beliefs every block
  int situation = 0;        // used when situation_block == 0
  int threads = 1;

  double epsilon(int t) const;
};

void validate_config(const LearningConfig& c, int n_models_a, int n_models_b);

struct PeriodRecord {
  int situation = 0;
  std::array<Eigen::VectorXd, 4> play;  // empirical distribution per cell (AA, AB, BA, BB)
  Eigen::VectorXd belief_a, belief_b;   // mean belief over extended models
  double payoff_a = 0.0, payoff_b = 0.0;
};

struct Trajectory {
  std::vector<PeriodRecord> periods;
  // Base model index of each extended model, and the base labels.
  std::vector<int> base_a, base_b;
  std::vector<std::string> labels_a, labels_b;
  std::array<std::vector<int>, 4> conj;  // [2*g + vs][e]: conjectured play of a vs-opponent
  int n_actions = 0;

  // Mean belief collapsed onto base models.
  Eigen::VectorXd base_belief(int period, Group g) const;
  // Mean conjectured distribution over the strategy of a `vs` opponent.
  Eigen::VectorXd conjecture(int period, Group g, Group vs) const;
};

struct Observation {
  Group opp_group = Group::A;
  int own = 0;
  int consequence = 0;
  int signal = 0;
};

// Posterior over extended models; throws ValidationError on zero total likelihood.
BeliefWeights bayes_update(const BeliefWeights& prior, const ExtendedTheory& theory, const StageGame& game,
                           const Observation& obs, double tau);

// Positive likelihood of every consequence the truth can produce, for every
// extended model and own strategy. Throws ValidationError otherwise.
void check_regularity(const StageGame& game, const ExtendedTheory& ta, const ExtendedTheory& tb);

Trajectory simulate(const LearningConfig& config, const StageGame& game, const ExtendedTheory& ta,
                    const ExtendedTheory& tb);

struct ConvergenceTarget {
  Profile profile;
  std::optional<BeliefWeights> belief_a, belief_b;  // over base models
};

ConvergenceTarget target_of(const EzRecord& rec, int situation);

struct ConvergenceReport {
  bool pass = true;
  Profile modal;
  std::array<bool, 4> cell_agrees{true, true, true, true};
  double tv_a = 0.0, tv_b = 0.0;
  std::string message;
};

// Modal play and mean base-model belief over the final `window` periods.
ConvergenceReport convergence_check(const Trajectory& traj, const ConvergenceTarget& target, int window,
                                    double tol);

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Steady state over the final window as an EZ-SU candidate: modal play and
// mean beliefs with masses below `floor` dropped. runs[s] is a run in situation s.
EzsuCandidate steady_state_candidate(const std::vector<Trajectory>& runs, const LearningConfig& config, int window,
                                     double floor = 1e-6);

// Collapses each situation's extended beliefs onto base models (runs[s] supplies
// the model index map), giving a zeitgeist to check with verify_ez.
Zeitgeist restricted_zeitgeist(const EzsuCandidate& c, const std::vector<Trajectory>& runs);

}  // namespace ez
