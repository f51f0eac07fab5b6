#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ez/examples.hpp"
#include "ez/learning.hpp"

#include <random>

using namespace ez;

namespace {

struct Ex3 {
  StageGame game = examples::example3_game();
  Theory correct = correct_theory(game);
  Theory mis = examples::example3_theory(game);
};

LearningConfig small_config(double lambda, double tau, int N = 300, int T = 1500) {
  LearningConfig c;
  c.n_agents = N;
  c.shares = {0.999, 0.001};
  c.lambda = lambda;
  c.tau = tau;
  c.horizon = T;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("bayes update: uninformative signal and likelihood ratios") {
  Ex3 e;
  const auto t = fixed_conjecture_extension(e.mis, 0, 1);
  const BeliefWeights prior = BeliefWeights::Constant(2, 0.5);
  // a2 against a1 conjectured for A-opponents: F_H gives good w.p. .2, F_L w.p. .4.
  const Observation bad{Group::A, 1, 1, 0};
  const auto post = bayes_update(prior, t, e.game, bad, 0.0);
  CHECK(post(0) == doctest::Approx(0.8 / 1.4));
  const Observation good{Group::A, 1, 0, 2};
  const auto p2 = bayes_update(prior, t, e.game, good, 0.0);
  CHECK(p2(1) / p2(0) == doctest::Approx(2.0));
  // A degenerate prior stays put.
  const auto p3 = bayes_update(BeliefWeights::Unit(2, 1), t, e.game, good, 0.0);
  CHECK(p3(1) == 1.0);
  CHECK_THROWS_AS(bayes_update(BeliefWeights::Constant(3, 1.0 / 3), t, e.game, good, 0.0), ValidationError);
}

TEST_CASE("bayes update: precise signals identify the conjecture") {
  Ex3 e;
  const auto t = unrestricted_extension(e.mis, 3);
  const BeliefWeights prior = BeliefWeights::Constant(t.models.size(), 1.0 / t.models.size());
  BeliefWeights b = prior;
  for (int k = 0; k < 20; ++k) b = bayes_update(b, t, e.game, {Group::B, 0, 0, 2}, 0.99);
  double mass = 0;
  for (size_t i = 0; i < t.models.size(); ++i)
    if (t.models[i].conj_b == 2) mass += b(i);
  CHECK(mass > 0.999);
}

TEST_CASE("posterior consistency against the KL minimizer") {
  Ex3 e;
  const auto t = fixed_conjecture_extension(e.mis, 0, 1);
  std::mt19937_64 rng(5);
  std::bernoulli_distribution good(0.4);  // a2 vs a2 objectively
  BeliefWeights b = BeliefWeights::Constant(2, 0.5);
  for (int k = 0; k < 2000; ++k) b = bayes_update(b, t, e.game, {Group::B, 1, good(rng) ? 0 : 1, 0}, 0.0);
  CHECK(b(1) > 0.95);  // F_L is closer at (a2, a2)
}

TEST_CASE("config validation and regularity") {
  Ex3 e;
  const auto t = fixed_conjecture_extension(e.correct, 0, 0);
  LearningConfig c = small_config(0.3, 0.0);
  c.tau = 1.0;
  CHECK_THROWS_AS(validate_config(c, 1, 1), ValidationError);
  c = small_config(0.3, 0.0);
  c.n_agents = 0;
  CHECK_THROWS_AS(validate_config(c, 1, 1), ValidationError);
  c = small_config(0.3, 0.0);
  c.prior_a = BeliefWeights::Constant(2, 0.5);
  CHECK_THROWS_AS(validate_config(c, 1, 1), ValidationError);
  Theory dogmatic{"d", {{"zero", Kernel::Zero(9, 2)}}};
  for (int r = 0; r < 9; ++r) dogmatic.models[0].kernel(r, 0) = 1.0;
  CHECK_THROWS_AS(check_regularity(e.game, t, fixed_conjecture_extension(dogmatic, 0, 0)), ValidationError);
}

TEST_CASE("simulation is reproducible across thread counts") {
  Ex3 e;
  const auto ta = fixed_conjecture_extension(e.correct, 0, 1), tb = fixed_conjecture_extension(e.mis, 0, 1);
  LearningConfig c = small_config(0.3, 0.0, 200, 200);
  const auto r1 = simulate(c, e.game, ta, tb);
  c.threads = 4;
  const auto r2 = simulate(c, e.game, ta, tb);
  REQUIRE(r1.periods.size() == r2.periods.size());
  for (size_t t = 0; t < r1.periods.size(); ++t) {
    CHECK(r1.periods[t].payoff_a == r2.periods[t].payoff_a);
    CHECK(r1.periods[t].belief_b == r2.periods[t].belief_b);
  }
  c.seed = 12;
  const auto r3 = simulate(c, e.game, ta, tb);
  bool differs = false;
  for (size_t t = 0; t < r1.periods.size(); ++t) differs |= r1.periods[t].belief_b != r3.periods[t].belief_b;
  CHECK(differs);
}

TEST_CASE("convergence check on a trivial trajectory") {
  Trajectory traj;
  traj.n_actions = 2;
  traj.base_a = {0};
  traj.base_b = {0};
  traj.labels_a = traj.labels_b = {"M"};
  PeriodRecord rec;
  for (auto& p : rec.play) p = Eigen::Vector2d(1, 0);
  rec.play[3] = Eigen::Vector2d(0, 1);
  rec.belief_a = rec.belief_b = Eigen::VectorXd::Ones(1);
  traj.periods.assign(10, rec);
  ConvergenceTarget tgt;
  tgt.profile.a = {0, 0, 0, 1};
  tgt.belief_b = Eigen::VectorXd::Ones(1);
  CHECK(convergence_check(traj, tgt, 5, 0.05).pass);
  tgt.profile.a = {0, 1, 0, 1};
  const auto rep = convergence_check(traj, tgt, 5, 0.05);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.cell_agrees[1]);
  CHECK(rep.message.find("AB") != std::string::npos);
  CHECK_THROWS_AS(convergence_check(traj, tgt, 11, 0.05), ValidationError);
  CHECK(total_variation(Eigen::Vector2d(1, 0), Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("correct theories learn the Nash equilibrium") {
  Ex3 e;
  const auto t = fixed_conjecture_extension(e.correct, 0, 0);
  const auto traj = simulate(small_config(0.3, 0.0, 200, 600), e.game, t, t);
  ConvergenceTarget tgt;
  tgt.profile.a = {0, 0, 0, 0};
  CHECK(convergence_check(traj, tgt, 100, 0.05).pass);
}

TEST_CASE("misspecified learners reach the analytic EZ") {
  Ex3 e;
  const auto gt = reduce(e.game);
  const auto ta = reduce(e.game, e.correct), tb = reduce(e.game, e.mis);
  const auto ez = enumerate_ez(gt, ta, tb, {0.999, 0.001}, 0.3);
  REQUIRE(ez.size() == 1);
  const auto& pr = ez[0].zeitgeist.profile[0];
  const auto xa = fixed_conjecture_extension(e.correct, pr.at(Group::A, Group::A), pr.at(Group::B, Group::A));
  const auto xb = fixed_conjecture_extension(e.mis, pr.at(Group::A, Group::B), pr.at(Group::B, Group::B));
  const auto traj = simulate(small_config(0.3, 0.0, 200, 3000), e.game, xa, xb);
  const auto rep = convergence_check(traj, target_of(ez[0], 0), 300, 0.05);
  INFO(rep.message);
  CHECK(rep.pass);
}

TEST_CASE("with precise signals conjectures match realized play") {
  Ex3 e;
  const auto ta = unrestricted_extension(e.correct, 3), tb = unrestricted_extension(e.mis, 3);
  // Enough B agents that A observes them regularly.
  LearningConfig c = small_config(0.3, 0.99, 200, 3000);
  c.shares = {0.95, 0.05};
  const auto traj = simulate(c, e.game, ta, tb);
  const int last = c.horizon - 1;
  const auto& play = traj.periods[last].play;
  for (Group g : {Group::A, Group::B})
    for (Group vs : {Group::A, Group::B}) {
      Eigen::Index realized;
      const double share = play[2 * gi(vs) + gi(g)].maxCoeff(&realized);
      CHECK(share > 0.95);
      CHECK(traj.conjecture(last, g, vs)(realized) > 0.95);
    }
  // Restricted to base models, the steady state is an EZ.
  const auto cand = steady_state_candidate({traj}, c, 100, 0.02);
  const auto v = verify_ez(restricted_zeitgeist(cand, {traj}), e.game, e.correct, e.mis);
  INFO((v.ok() ? std::string() : v.violations.front()));
  CHECK(v.ok());
}

TEST_CASE("two-situation game: steady state is an EZ-SU") {
  const StageGame g = examples::example1_game();
  const Theory c = correct_theory(g), ill = examples::example1_illusion(g);
  const Shares sh{0.999, 0.001};
  const auto ez = enumerate_ez(g, c, ill, sh, 0.0);
  REQUIRE(!ez.empty());
  // Conjectures are fixed at the EZ's play, so each situation is checked as its own game.
  for (int s = 0; s < 2; ++s) {
    StageGame gs = g;
    gs.situations = {g.situations[s]};
    gs.q = Eigen::VectorXd::Ones(1);
    const Profile& p = ez[0].zeitgeist.profile[s];
    const auto ta = fixed_conjecture_extension(c, p.at(Group::A, Group::A), p.at(Group::B, Group::A));
    const auto tb = fixed_conjecture_extension(ill, p.at(Group::A, Group::B), p.at(Group::B, Group::B));
    LearningConfig cfg = small_config(0.0, 0.0, 200, 2000);
    cfg.shares = sh;
    const auto traj = simulate(cfg, gs, ta, tb);
    const auto cand = steady_state_candidate({traj}, cfg, 200);
    CHECK(cand.profile[0] == p);
    const auto v = verify_ezsu(cand, gs, ta, tb);
    INFO((v.ok() ? std::string() : v.violations.front()));
    CHECK(v.ok());
  }
}
