// One PASS/FAIL line per acceptance criterion.

#include "ez/centipede.hpp"
#include "ez/examples.hpp"
#include "ez/learning.hpp"
#include "ez/lqn.hpp"
#include "ez/stability.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace ez;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      why << what;
      ok = false;
    }
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

void kl_constants(Check& c) {
  auto kl = [](double p, double q) { return kl_divergence(Eigen::Vector2d(p, 1 - p), Eigen::Vector2d(q, 1 - q)).value; };
  c.expect(near(kl(0.4, 0.1), 0.3112, 1e-3), "KL(.4||.1)");
  c.expect(near(kl(0.4, 0.8), 0.3819, 1e-3), "KL(.4||.8)");
  c.expect(near(kl(0.2, 0.4), 0.0915, 1e-3), "KL(.2||.4)");
}

void example3_thresholds(Check& c) {
  const StageGame g = examples::example3_game();
  const GameTables gt = reduce(g);
  const TheoryTables a = reduce(g, correct_theory(g)), b = reduce(g, examples::example3_theory(g));
  const double lh = examples::example3_lambda_h();
  c.expect(near(lh, 0.5637, 1e-3), "lambda_h = " + format_number(lh));
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(i / 1000.0);
  const auto rows = assortativity_sweep(gt, a, b, grid);
  std::vector<int> fh(grid.size(), 0);
  for (const auto& r : rows) {
    const size_t i = static_cast<size_t>(std::lround(r.lambda * 1000));
    if (r.belief_label == "F_H") ++fh[i];
  }
  bool exact = true;
  for (size_t i = 0; i < grid.size(); ++i) exact &= (fh[i] == 1) == (grid[i] < lh);
  c.expect(exact, "F_H EZs exist exactly for lambda < lambda_h");
  // Fitness crossing of the F_H branch: resident 0.25 against 0.2 + 0.2 lambda.
  const auto fit = [&](double l) {
    for (const auto& r : enumerate_ez(gt, a, b, {1, 0}, l))
      if (belief_label(b, r.zeitgeist.belief_b[0]) == "F_H") return r.fitness_b - r.fitness_a;
    return std::nan("");
  };
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 60; ++it) {
    const double m = (lo + hi) / 2;
    (fit(m) < 0 ? lo : hi) = m;
  }
  c.expect(near((lo + hi) / 2, 0.25, 1e-9), "lambda_l = " + format_number((lo + hi) / 2));
  c.expect(classify_stability(gt, a, b, 0.1).kind == StabilityKind::Stable, "Stable at 0.1");
  c.expect(classify_stability(gt, a, b, 0.4).kind == StabilityKind::Fragile, "Fragile at 0.4");
  c.expect(classify_stability(gt, a, b, 1.0).kind == StabilityKind::Stable, "Stable at 1.0");
}

void interior_share(Check& c) {
  const StageGame g = examples::example3_game();
  const GameTables gt = reduce(g);
  const TheoryTables a = reduce(g, correct_theory(g)), b = reduce(g, examples::example3_theory(g));
  const auto res = stable_share(gt, a, b, 0.5, select_by_belief_b(b, "F_H"));
  c.expect(res.p_b.has_value(), "no regime change found");
  if (res.p_b) c.expect(near(*res.p_b, 0.128, 1e-3), "threshold " + format_number(*res.p_b));
  auto has_fh = [&](double pb) {
    for (const auto& r : enumerate_ez(gt, a, b, {1 - pb, pb}, 0.5))
      if (belief_label(b, r.zeitgeist.belief_b[0]) == "F_H") return true;
    return false;
  };
  c.expect(has_fh(0.127) && !has_fh(0.129), "F_H EZ existence around 0.128");
}

void theorem1(Check& c) {
  const StageGame g = examples::example1_game();
  const Theorem1Report rep = theorem1_part1(g);
  c.expect(!rep.hull_condition_holds, "hull condition should fail");
  c.expect(rep.separating_q.has_value(), "no separator");
  const Eigen::MatrixXd vb = all_v_b(reduce(g));
  double worst = -kInf;
  for (int k = 0; k < vb.rows(); ++k)
    if (vb.row(k).allFinite()) worst = std::max(worst, vb.row(k).sum());
  c.expect(worst <= 0.65 + 1e-12, "max v^b sum " + format_number(worst));
  c.expect(near(rep.v_ne.sum(), 0.70, 1e-12), "v_NE sum " + format_number(rep.v_ne.sum()));
  const Theory correct = correct_theory(g);
  c.expect(classify_stability(g, correct, construct_illusion_theory(g), 0.0).kind == StabilityKind::Fragile,
           "illusion theory does not make the correct theory fragile");
  int fragile = 0;
  for (const auto& b : all_correspondences(3))
    fragile += classify_stability(g, correct, correspondence_theory(g, b), 0.0).kind == StabilityKind::Fragile;
  c.expect(fragile == 0, std::to_string(fragile) + " singleton theories achieve Fragile");
}

void investment(Check& c) {
  const examples::InvestmentParams p;
  const auto g = examples::investment_game(p);
  const auto rep = detect_stability_reversal(g, examples::investment_correct(p), examples::investment_misspecified(p));
  c.expect(rep.reversal, "no reversal");
  c.expect(rep.resident_a.size() == 1 && rep.resident_b.size() == 1, "EZ not unique");
  if (rep.resident_a.size() == 1)
    c.expect(rep.resident_a[0].zeitgeist.profile[0].a == std::array<int, 4>{0, 0, 1, 1}, "behavior at p=(1,0)");
  if (rep.resident_b.size() == 1)
    c.expect(rep.resident_b[0].zeitgeist.profile[0].a == std::array<int, 4>{0, 0, 0, 1}, "behavior at p=(0,1)");
}

void lqn_uniform(Check& c) {
  const lqn::Params<double> p;
  const double h = 1e-6;
  const double d =
      (lqn::solve_ez_uniform(p, p.kappa_true + h).fitness_b - lqn::solve_ez_uniform(p, p.kappa_true).fitness_b) / h;
  c.expect(d > 0, "derivative at kappa_true is " + format_number(d));
  bool crossed = false;
  for (int i = 31; i <= 100; ++i) {
    try {
      const auto ez = lqn::solve_ez_uniform(p, i / 100.0);
      crossed |= ez.fitness_b < ez.fitness_a;
    } catch (const lqn::LqnError&) {
    }
  }
  c.expect(crossed, "mutant fitness never falls below resident");
  for (double k : {0.1, 0.5, 0.8}) {
    const auto ez = lqn::solve_ez_uniform(p, k);
    c.expect(near(ez.alpha_ab, lqn::ell(ez.alpha_ba, p), 1e-9), "resident best response");
    c.expect(near(ez.alpha_ba, lqn::alpha_br(ez.alpha_ab, k, ez.r_b, p).value, 1e-9), "mutant best response");
    c.expect(near(ez.r_b, lqn::r_inf(ez.alpha_ba, ez.alpha_ab, k, p), 1e-9), "mutant inference");
  }
}

void lqn_assortative(Check& c) {
  const lqn::Params<double> p;
  double prev = kInf;
  bool dec = true, above = true;
  for (int i = 0; i < 50; ++i) {
    const auto ez = lqn::solve_ez_assortative(p, p.kappa_true, i / 49.0);
    dec &= ez.fitness_b < prev;
    above &= ez.alpha_bb > lqn::alpha_team(p) && ez.alpha_aa > lqn::alpha_team(p);
    prev = ez.fitness_b;
  }
  c.expect(dec, "fitness not strictly decreasing");
  c.expect(above, "slope at or below the team slope");
  bool weak = true;
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j <= 10; ++j) {
      const auto ez = lqn::solve_ez_assortative(p, i / 10.0, j / 10.0);
      weak &= ez.fitness_a >= ez.fitness_b;
    }
  c.expect(weak, "lower kappa not weakly fitter");
}

void lqn_no_learning(Check& c) {
  const lqn::Params<double> p;
  const double h = 1e-6;
  c.expect(lqn::no_learning_alpha(p, p.kappa_true + h).alpha_ba < lqn::no_learning_alpha(p, p.kappa_true).alpha_ba,
           "alpha_BA not decreasing");
  const double rational = lqn::objective_payoff(lqn::alpha_rational(p), lqn::alpha_rational(p), p);
  c.expect(lqn::no_learning_alpha(p, 0.6).fitness_vs_rational < rational, "kappa_h mutant at lambda=0");
  c.expect(lqn::no_learning_alpha(p, 0.1).fitness_assortative < rational, "kappa_l mutant at lambda=1");
}

void lqn_fragility(Check& c) {
  const lqn::Params<double> p;
  c.expect(lqn::fragility_direction(p, 0) > 0, "lambda=0 sign");
  c.expect(lqn::fragility_direction(p, 1) < 0, "lambda=1 sign");
}

void centipede_checks(Check& c) {
  for (int K = 4; K <= 20; K += 2) {
    const double x = static_cast<double>(
        oracle::golden_section_min([&](long double v) { return oracle::analogy_loss(K, v); }, 1e-12L, 1 - 1e-12L));
    c.expect(near(centipede::analogy_conjecture(K), x, 1e-9), "conjecture at K=" + std::to_string(K));
  }
  c.expect(centipede::stable_share_centipede({6, 1, 1}) == 0.75, "stable share");
  bool diff = true;
  for (const centipede::Spec s : {centipede::Spec{6, 1, 1}, centipede::Spec{8, 2, 0.5}})
    for (int i = 0; i <= 100; ++i) {
      const double pr = i / 100.0;
      const auto f = centipede::centipede_fitness(s, pr);
      diff &= near(f.rational - f.analogy, 0.5 * s.l - pr * s.g * (s.K - 2) / 2, 1e-12);
    }
  c.expect(diff, "fitness difference formula");
  bool dom = true;
  for (int i = 0; i <= 100; ++i) {
    const auto f = centipede::dollar_fitness(6, i / 100.0);
    dom &= f.rational > f.analogy;
  }
  c.expect(dom, "dollar game dominance");
}

void learning(Check& c) {
  const StageGame g = examples::example3_game();
  const Theory correct = correct_theory(g), mis = examples::example3_theory(g);
  const Shares sh{0.999, 0.001};
  const auto ez = enumerate_ez(g, correct, mis, sh, 0.3);
  c.expect(ez.size() == 1, "analytic EZ not unique");
  if (ez.size() != 1) return;
  const Profile& pr = ez[0].zeitgeist.profile[0];
  LearningConfig cfg;
  cfg.n_agents = 2000;
  cfg.horizon = 5000;
  cfg.shares = sh;
  cfg.lambda = 0.3;
  cfg.tau = 0.0;
  cfg.seed = 20240101;
  cfg.threads = 4;
  const auto traj =
      simulate(cfg, g, fixed_conjecture_extension(correct, pr.at(Group::A, Group::A), pr.at(Group::B, Group::A)),
               fixed_conjecture_extension(mis, pr.at(Group::A, Group::B), pr.at(Group::B, Group::B)));
  ConvergenceTarget tgt = target_of(ez[0], 0);
  const auto rep = convergence_check(traj, tgt, 500, 0.05);
  c.expect(rep.pass, "tau=0: " + rep.message);

  // Precise signals, unrestricted conjectures. B must be common enough for A to observe it.
  cfg.tau = 0.99;
  cfg.shares = {0.95, 0.05};
  cfg.n_agents = 500;
  cfg.horizon = 3000;
  const auto ua = unrestricted_extension(correct, 3), ub = unrestricted_extension(mis, 3);
  const auto t2 = simulate(cfg, g, ua, ub);
  const int last = cfg.horizon - 1;
  for (Group gr : {Group::A, Group::B})
    for (Group vs : {Group::A, Group::B}) {
      Eigen::Index realized;
      const double share = t2.periods[last].play[2 * gi(vs) + gi(gr)].maxCoeff(&realized);
      c.expect(share > 0.95, "tau=0.99: play in a cell has not settled");
      c.expect(t2.conjecture(last, gr, vs)(realized) > 0.95, "tau=0.99: conjecture differs from realized play");
    }
  const auto cand = steady_state_candidate({t2}, cfg, 200, 0.02);
  const auto v = verify_ez(restricted_zeitgeist(cand, {t2}), g, correct, mis);
  c.expect(v.ok(), "tau=0.99 restricted steady state: " + (v.ok() ? std::string() : v.violations.front()));
}

Theory random_singleton(std::mt19937_64& rng, const StageGame& g, const std::string& name) {
  return make_theory(Theory{name, {{name, oracle::random_kernel(rng, g.n_actions(), g.n_consequences())}}},
                     g.n_actions(), g.n_consequences());
}

void properties(Check& c) {
  std::mt19937_64 rng(12);
  int gibbs = 0;
  for (int i = 0; i < 1000; ++i) {
    const int k = 2 + i % 5;
    const auto p = oracle::random_pmf(rng, k, true), q = oracle::random_pmf(rng, k);
    const double d = kl_divergence(Eigen::Map<const Eigen::VectorXd>(p.data(), k),
                                   Eigen::Map<const Eigen::VectorXd>(q.data(), k));
    gibbs += d >= -1e-15 && near(kl_divergence(Eigen::Map<const Eigen::VectorXd>(p.data(), k),
                                               Eigen::Map<const Eigen::VectorXd>(p.data(), k)), 0.0, 1e-15);
  }
  c.expect(gibbs == 1000, "Gibbs inequality");

  int reversals = 0, interp_fail = 0, agree_fail = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const StageGame g = oracle::random_game(rng, 2 + trial % 2, 2 + trial % 2);
    const Theory ta = random_singleton(rng, g, "A"), tb = random_singleton(rng, g, "B");
    const GameTables gt = reduce(g);
    const TheoryTables a = reduce(g, ta), b = reduce(g, tb);
    reversals += detect_stability_reversal(gt, a, b).reversal;
    if (classify_stability(gt, a, b, 0.0).kind == StabilityKind::Stable &&
        classify_stability(gt, a, b, 1.0).kind == StabilityKind::Stable)
      for (int i = 1; i <= 9; ++i) interp_fail += classify_stability(gt, a, b, i / 10.0).kind != StabilityKind::Stable;
    const double pb = (trial % 4) / 4.0, lambda = (trial % 5) / 4.0;
    const auto ez = enumerate_ez(gt, a, b, {1 - pb, pb}, lambda);
    for (const auto& r : ez) agree_fail += !verify_ez(r.zeitgeist, gt, a, b).ok();
    std::set<oracle::EzKey> mine;
    for (const auto& r : ez) {
      const Profile& p = r.zeitgeist.profile[0];
      mine.insert({0, p.a[0], p.a[1], p.a[2], p.a[3], 0, 0});
    }
    if (!ez.empty()) agree_fail += mine != oracle::brute_force_ez(g, ta, tb, 1 - pb, pb, lambda);
  }
  c.expect(reversals == 0, std::to_string(reversals) + " singleton reversals");
  c.expect(interp_fail == 0, std::to_string(interp_fail) + " interpolation failures");
  c.expect(agree_fail == 0, std::to_string(agree_fail) + " solver/verifier disagreements");

  int dominance_fail = 0, with_ez = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3, ny = 2 + trial % 2;
    StageGame g = oracle::random_game(rng, n, ny);
    for (int ai = 0; ai < n; ++ai)
      for (int aj = 1; aj < n; ++aj) g.situations[0].kernel.row(ai * n + aj) = g.situations[0].kernel.row(ai * n);
    Theory tb{"B", {}};
    for (int k = 0; k < 1 + trial % 3; ++k) {
      Eigen::MatrixXd own = oracle::random_kernel(rng, n, ny);
      for (int ai = 0; ai < n; ++ai)
        for (int aj = 1; aj < n; ++aj) own.row(ai * n + aj) = own.row(ai * n);
      tb.models.push_back({"M" + std::to_string(k), own});
    }
    const auto ez = enumerate_ez(g, correct_theory(g), tb, {1.0, 0.0}, 0.0);
    with_ez += !ez.empty();
    for (const auto& r : ez) dominance_fail += r.fitness_a < r.fitness_b - 1e-12;
  }
  c.expect(with_ez > 50, "only " + std::to_string(with_ez) + " decision problems have a pure EZ");
  c.expect(dominance_fail == 0, std::to_string(dominance_fail) + " decision problems where the mutant wins");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"KL constants", kl_constants},
      {"three-action thresholds", example3_thresholds},
      {"interior share threshold", interior_share},
      {"two-situation hull test", theorem1},
      {"investment reversal", investment},
      {"LQN uniform matching", lqn_uniform},
      {"LQN assortative matching", lqn_assortative},
      {"LQN dogmatic mutants", lqn_no_learning},
      {"LQN fragility direction", lqn_fragility},
      {"centipede and dollar", centipede_checks},
      {"learning foundation", learning},
      {"property suites", properties},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                c.ok ? "" : " | ", c.why.str().c_str());
    std::fflush(stdout);
    failed += !c.ok;
  }
  return failed ? 1 : 0;
}
