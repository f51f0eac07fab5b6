#pragma once
// Subjective utilities, best responses, EZ verification/enumeration and EZ-SU checks.
//
// The enumerator works on payoff and divergence tables rather than on pmfs, so
// games whose consequences are continuous (the investment game) can supply
// closed-form divergences.

#include "ez/game.hpp"
#include "ez/inference.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ez {

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Objective side: per-situation payoff matrices u_G(ai, aj).
struct GameTables {
  std::vector<std::string> actions;
  std::vector<std::string> situation_ids;
  Eigen::VectorXd q;
  std::vector<Eigen::MatrixXd> payoff;

  int n_actions() const { return static_cast<int>(actions.size()); }
  int n_situations() const { return static_cast<int>(payoff.size()); }
};

// Subjective side: per-model payoff matrices and per-(model, situation)
// divergence matrices K(F; ai, aj, G).
struct TheoryTables {
  std::string name;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> utility;
  std::vector<std::vector<Eigen::MatrixXd>> divergence;  // [model][situation]

  int n_models() const { return static_cast<int>(utility.size()); }
};

GameTables reduce(const StageGame& game);
TheoryTables reduce(const StageGame& game, const Theory& theory);

// Utility of ai against aj under a mixture over the theory's models.
double subjective_utility(const TheoryTables& t, const BeliefWeights& belief, int ai, int aj);
double subjective_utility(const Theory& t, const StageGame& game, const BeliefWeights& belief, int ai, int aj);

std::vector<int> best_response_set(const TheoryTables& t, const BeliefWeights& belief, int a_opp,
                                   double tie_tol = kTieTol);
std::vector<int> best_response_set(const Theory& t, const StageGame& game, const BeliefWeights& belief,
                                   int a_opp, double tie_tol = kTieTol);

// Objective best responses in a payoff matrix (row = own strategy).
std::vector<int> objective_best_responses(const Eigen::MatrixXd& payoff, int a_opp, double tie_tol = kTieTol);

struct Verdict {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

Verdict verify_ez(const Zeitgeist& z, const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                  double tie_tol = kTieTol);
Verdict verify_ez(const Zeitgeist& z, const StageGame& game, const Theory& ta, const Theory& tb,
                  double tie_tol = kTieTol);

enum class BeliefKind { Degenerate, UniformArgmin };

struct EzRecord {
  Zeitgeist zeitgeist;
  double fitness_a = 0.0;
  double fitness_b = 0.0;
  // conditional(g, g') = sum_G q(G) u_G(a_gg', a_g'g)
  Eigen::Matrix2d conditional = Eigen::Matrix2d::Zero();
  std::vector<std::vector<int>> argmin_a, argmin_b;  // per situation
  std::vector<BeliefKind> kind_a, kind_b;            // per situation
  bool nonsingleton_argmin = false;
  bool degenerate_all_infinite = false;

  double fitness(Group g) const { return g == Group::A ? fitness_a : fitness_b; }
  double conditional_fitness(Group g, Group vs) const { return conditional(gi(g), gi(vs)); }
};

struct EnumerateOptions {
  bool include_uniform_argmin_belief = false;
  double tie_tol = kTieTol;
  double budget = 1e8;
  int threads = 1;
};

std::vector<EzRecord> enumerate_ez(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                   const Shares& shares, double lambda, const EnumerateOptions& opt = {});
std::vector<EzRecord> enumerate_ez(const StageGame& game, const Theory& ta, const Theory& tb,
                                   const Shares& shares, double lambda, const EnumerateOptions& opt = {});

// Fills fitness and conditional fitness of a record from its zeitgeist.
void compute_fitness(EzRecord& rec, const GameTables& game);
double fitness(const EzRecord& rec, Group g);
double conditional_fitness(const EzRecord& rec, Group g, Group vs);

// Belief label for reporting, e.g. "F_H" or "F_H+F_L" for a mixture.
std::string belief_label(const TheoryTables& t, const BeliefWeights& w);

// ---- EZ-SU over extended theories ----

struct EzsuCandidate {
  std::vector<Profile> profile;                 // per situation
  std::vector<BeliefWeights> belief_a, belief_b;  // over extended models, per situation
  Shares shares;
  double lambda = 0.0;
};

// Objective of extended model e for group g in situation s, with divergence
// taken at the conjectured opponent strategy.
double ezsu_objective(const ExtendedModel& e, const StageGame& game, int s, Group g, const Profile& pr,
                      const MatchWeights& w);

Verdict verify_ezsu(const EzsuCandidate& c, const StageGame& game, const ExtendedTheory& ta,
                    const ExtendedTheory& tb, double tie_tol = kTieTol);

}  // namespace ez
