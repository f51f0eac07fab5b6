#include "ez/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace ez {

GameTables reduce(const StageGame& game) {
  GameTables t;
  t.actions = game.strategies;
  t.q = game.q;
  for (const Situation& s : game.situations) {
    t.situation_ids.push_back(s.id);
    t.payoff.push_back(expected_utility(s.kernel, game.utility, game.n_actions()));
  }
  return t;
}

TheoryTables reduce(const StageGame& game, const Theory& theory) {
  TheoryTables t;
  t.name = theory.name;
  const int n = game.n_actions();
  for (const Model& m : theory.models) {
    t.labels.push_back(m.label);
    t.utility.push_back(expected_utility(m.kernel, game.utility, n));
    std::vector<Eigen::MatrixXd> div;
    for (const Situation& s : game.situations) div.push_back(divergence_table(s.kernel, m.kernel, n));
    t.divergence.push_back(std::move(div));
  }
  return t;
}

double subjective_utility(const TheoryTables& t, const BeliefWeights& belief, int ai, int aj) {
  double u = 0.0;
  for (int m = 0; m < t.n_models(); ++m)
    if (belief(m) != 0.0) u += belief(m) * t.utility[m](ai, aj);
  return u;
}

double subjective_utility(const Theory& t, const StageGame& game, const BeliefWeights& belief, int ai, int aj) {
  double u = 0.0;
  const auto r = kernel_row(ai, aj, game.n_actions());
  for (size_t m = 0; m < t.models.size(); ++m)
    if (belief(m) != 0.0) u += belief(m) * t.models[m].kernel.row(r).dot(game.utility.transpose());
  return u;
}

namespace {

std::vector<int> argmax_set(const Eigen::VectorXd& v, double tol) {
  const double hi = v.maxCoeff();
  std::vector<int> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) >= hi - tol) out.push_back(static_cast<int>(i));
  return out;
}

bool contains(const std::vector<int>& s, int x) { return std::find(s.begin(), s.end(), x) != s.end(); }

std::string name_of(const std::vector<std::string>& labels, int i) {
  return i >= 0 && i < static_cast<int>(labels.size()) ? labels[i] : std::to_string(i);
}

const char* group_name(Group g) { return g == Group::A ? "A" : "B"; }

}  // namespace

std::vector<int> best_response_set(const TheoryTables& t, const BeliefWeights& belief, int a_opp, double tol) {
  const int n = static_cast<int>(t.utility.front().rows());
  Eigen::VectorXd u(n);
  for (int a = 0; a < n; ++a) u(a) = subjective_utility(t, belief, a, a_opp);
  return argmax_set(u, tol);
}

std::vector<int> best_response_set(const Theory& t, const StageGame& game, const BeliefWeights& belief,
                                   int a_opp, double tol) {
  Eigen::VectorXd u(game.n_actions());
  for (int a = 0; a < game.n_actions(); ++a) u(a) = subjective_utility(t, game, belief, a, a_opp);
  return argmax_set(u, tol);
}

std::vector<int> objective_best_responses(const Eigen::MatrixXd& payoff, int a_opp, double tol) {
  return argmax_set(payoff.col(a_opp), tol);
}

namespace {

// Weighted KL objective of every model for group g at one situation's profile.
Eigen::VectorXd objectives(const TheoryTables& t, int s, const Profile& pr, Group g, const MatchWeights& w) {
  Eigen::VectorXd obj(t.n_models());
  const int a_own = pr.at(g, g), a_out = pr.at(g, other(g)), a_opp = pr.at(other(g), g);
  for (int m = 0; m < t.n_models(); ++m) {
    const Eigen::MatrixXd& d = t.divergence[m][s];
    obj(m) = weighted_objective(w.own, d(a_own, a_own), w.other, d(a_out, a_opp));
  }
  return obj;
}

}  // namespace

Verdict verify_ez(const Zeitgeist& z, const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                  double tol) {
  Verdict v;
  const int n = game.n_actions();
  const int ns = game.n_situations();
  if (static_cast<int>(z.profile.size()) != ns || static_cast<int>(z.belief_a.size()) != ns ||
      static_cast<int>(z.belief_b.size()) != ns) {
    v.violations.push_back("zeitgeist does not cover every situation");
    return v;
  }
  for (int s = 0; s < ns; ++s) {
    const Profile& pr = z.profile[s];
    for (int a : pr.a)
      if (a < 0 || a >= n) {
        v.violations.push_back("profile entry outside the strategy set in " + game.situation_ids[s]);
        return v;
      }
    for (Group g : {Group::A, Group::B}) {
      const TheoryTables& t = g == Group::A ? ta : tb;
      const BeliefWeights& mu = z.belief(g, s);
      const ValidationReport br = validate_belief(mu, t.n_models());
      if (!br.ok()) {
        for (const auto& m : br.violations) v.violations.push_back(std::string("belief ") + group_name(g) + ": " + m);
        continue;
      }
      for (Group vs : {Group::A, Group::B}) {
        const int a = pr.at(g, vs), opp = pr.at(vs, g);
        if (!contains(best_response_set(t, mu, opp, tol), a)) {
          std::ostringstream os;
          os << "situation " << game.situation_ids[s] << ": a_" << group_name(g) << group_name(vs) << "="
             << game.actions[a] << " is not a subjective best response to " << game.actions[opp];
          v.violations.push_back(os.str());
        }
      }
      const MatchWeights w = match_weights(z.shares, z.lambda, g);
      const BestFit fit = best_fit_set(objectives(t, s, pr, g, w), tol);
      for (int m = 0; m < t.n_models(); ++m)
        if (mu(m) > 0.0 && !contains(fit.members, m)) {
          std::ostringstream os;
          os << "situation " << game.situation_ids[s] << ": group " << group_name(g) << " belief on "
             << name_of(t.labels, m) << " is not KL-minimal";
          v.violations.push_back(os.str());
        }
    }
  }
  return v;
}

Verdict verify_ez(const Zeitgeist& z, const StageGame& game, const Theory& ta, const Theory& tb, double tol) {
  return verify_ez(z, reduce(game), reduce(game, ta), reduce(game, tb), tol);
}

void compute_fitness(EzRecord& rec, const GameTables& game) {
  const Zeitgeist& z = rec.zeitgeist;
  rec.conditional.setZero();
  for (int s = 0; s < game.n_situations(); ++s)
    for (Group g : {Group::A, Group::B})
      for (Group vs : {Group::A, Group::B})
        rec.conditional(gi(g), gi(vs)) +=
            game.q(s) * game.payoff[s](z.profile[s].at(g, vs), z.profile[s].at(vs, g));
  for (Group g : {Group::A, Group::B}) {
    const MatchWeights w = match_weights(z.shares, z.lambda, g);
    const double f = w.own * rec.conditional(gi(g), gi(g)) + w.other * rec.conditional(gi(g), gi(other(g)));
    (g == Group::A ? rec.fitness_a : rec.fitness_b) = f;
  }
}

double fitness(const EzRecord& rec, Group g) { return rec.fitness(g); }
double conditional_fitness(const EzRecord& rec, Group g, Group vs) { return rec.conditional_fitness(g, vs); }

std::string belief_label(const TheoryTables& t, const BeliefWeights& w) {
  std::string out;
  for (int m = 0; m < w.size(); ++m)
    if (w(m) > 0.0) {
      if (!out.empty()) out += "+";
      out += name_of(t.labels, m);
    }
  return out;
}

namespace {

struct GroupOption {
  BeliefWeights belief;
  BeliefKind kind;
};

struct SituationSolution {
  Profile profile;
  GroupOption a, b;
  std::vector<int> argmin_a, argmin_b;
  bool all_inf = false;
};

// Self-consistent beliefs for group g at a fixed profile: candidate beliefs
// from the argmin set that make both of g's cells best responses.
std::vector<GroupOption> consistent_beliefs(const TheoryTables& t, int s, const Profile& pr, Group g,
                                            const MatchWeights& w, const EnumerateOptions& opt, BestFit& fit) {
  fit = best_fit_set(objectives(t, s, pr, g, w), opt.tie_tol);
  std::vector<GroupOption> cands;
  for (int m : fit.members) {
    BeliefWeights b = BeliefWeights::Zero(t.n_models());
    b(m) = 1.0;
    cands.push_back({b, BeliefKind::Degenerate});
  }
  if (opt.include_uniform_argmin_belief && fit.members.size() > 1) {
    BeliefWeights b = BeliefWeights::Zero(t.n_models());
    for (int m : fit.members) b(m) = 1.0 / static_cast<double>(fit.members.size());
    cands.push_back({b, BeliefKind::UniformArgmin});
  }
  std::vector<GroupOption> out;
  for (auto& c : cands) {
    bool ok = true;
    for (Group vs : {Group::A, Group::B})
      if (!contains(best_response_set(t, c.belief, pr.at(vs, g), opt.tie_tol), pr.at(g, vs))) ok = false;
    if (ok) out.push_back(std::move(c));
  }
  return out;
}

std::vector<SituationSolution> solve_situation(const GameTables& game, const TheoryTables& ta,
                                               const TheoryTables& tb, int s, const MatchWeights& wa,
                                               const MatchWeights& wb, const EnumerateOptions& opt) {
  const int n = game.n_actions();
  const long total = static_cast<long>(n) * n * n * n;
  auto run = [&](long lo, long hi) {
    std::vector<SituationSolution> out;
    for (long idx = lo; idx < hi; ++idx) {
      Profile pr;
      long r = idx;
      for (int c = 3; c >= 0; --c) {
        pr.a[c] = static_cast<int>(r % n);
        r /= n;
      }
      BestFit fa, fb;
      const auto oa = consistent_beliefs(ta, s, pr, Group::A, wa, opt, fa);
      if (oa.empty()) continue;
      const auto ob = consistent_beliefs(tb, s, pr, Group::B, wb, opt, fb);
      for (const auto& x : oa)
        for (const auto& y : ob)
          out.push_back({pr, x, y, fa.members, fb.members, fa.all_infinite || fb.all_infinite});
    }
    return out;
  };
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(total)));
  if (threads == 1) return run(0, total);
  std::vector<std::vector<SituationSolution>> parts(threads);
  std::vector<std::thread> pool;
  for (int k = 0; k < threads; ++k) {
    const long lo = total * k / threads, hi = total * (k + 1) / threads;
    pool.emplace_back([&, k, lo, hi] { parts[k] = run(lo, hi); });
  }
  for (auto& th : pool) th.join();
  std::vector<SituationSolution> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

std::vector<EzRecord> enumerate_ez(const GameTables& game, const TheoryTables& ta, const TheoryTables& tb,
                                   const Shares& shares, double lambda, const EnumerateOptions& opt) {
  validate_shares(shares, lambda);
  const int ns = game.n_situations();
  const double work = std::pow(static_cast<double>(game.n_actions()), 4.0 * ns) * ta.n_models() * tb.n_models();
  if (work > opt.budget) {
    std::ostringstream os;
    os << "enumeration needs " << work << " candidates, above the budget of " << opt.budget;
    throw ResourceError(os.str());
  }
  const MatchWeights wa = match_weights(shares, lambda, Group::A);
  const MatchWeights wb = match_weights(shares, lambda, Group::B);

  std::vector<std::vector<SituationSolution>> per(ns);
  for (int s = 0; s < ns; ++s) {
    per[s] = solve_situation(game, ta, tb, s, wa, wb, opt);
    if (per[s].empty()) return {};
  }

  std::vector<EzRecord> out;
  std::vector<size_t> pick(ns, 0);
  while (true) {
    EzRecord rec;
    rec.zeitgeist.shares = shares;
    rec.zeitgeist.lambda = lambda;
    for (int s = 0; s < ns; ++s) {
      const SituationSolution& sol = per[s][pick[s]];
      rec.zeitgeist.profile.push_back(sol.profile);
      rec.zeitgeist.belief_a.push_back(sol.a.belief);
      rec.zeitgeist.belief_b.push_back(sol.b.belief);
      rec.argmin_a.push_back(sol.argmin_a);
      rec.argmin_b.push_back(sol.argmin_b);
      rec.kind_a.push_back(sol.a.kind);
      rec.kind_b.push_back(sol.b.kind);
      rec.nonsingleton_argmin |= sol.argmin_a.size() > 1 || sol.argmin_b.size() > 1;
      rec.degenerate_all_infinite |= sol.all_inf;
    }
    compute_fitness(rec, game);
    out.push_back(std::move(rec));
    // Odometer over situations, last situation fastest.
    int s = ns - 1;
    while (s >= 0 && ++pick[s] == per[s].size()) pick[s--] = 0;
    if (s < 0) break;
  }
  return out;
}

std::vector<EzRecord> enumerate_ez(const StageGame& game, const Theory& ta, const Theory& tb,
                                   const Shares& shares, double lambda, const EnumerateOptions& opt) {
  return enumerate_ez(reduce(game), reduce(game, ta), reduce(game, tb), shares, lambda, opt);
}

// ---- EZ-SU ----

double ezsu_objective(const ExtendedModel& e, const StageGame& game, int s, Group g, const Profile& pr,
                      const MatchWeights& w) {
  const int n = game.n_actions();
  const Kernel& truth = game.situations.at(s).kernel;
  auto conj = [&](Group h) { return h == Group::A ? e.conj_a : e.conj_b; };
  const int a_own = pr.at(g, g), a_out = pr.at(g, other(g));
  auto term = [&](double weight, int a_i, int a_truth_opp, int a_conj_opp) {
    if (weight <= 0.0) return 0.0;
    const double k = kl_divergence(truth.row(kernel_row(a_i, a_truth_opp, n)).transpose(),
                                   e.model.kernel.row(kernel_row(a_i, a_conj_opp, n)).transpose());
    return weight * k;
  };
  return term(w.own, a_own, a_own, conj(g)) + term(w.other, a_out, pr.at(other(g), g), conj(other(g)));
}

Verdict verify_ezsu(const EzsuCandidate& c, const StageGame& game, const ExtendedTheory& ta,
                    const ExtendedTheory& tb, double tol) {
  Verdict v;
  const int n = game.n_actions();
  for (int s = 0; s < game.n_situations(); ++s) {
    const Profile& pr = c.profile.at(s);
    for (Group g : {Group::A, Group::B}) {
      const ExtendedTheory& t = g == Group::A ? ta : tb;
      const BeliefWeights& mu = g == Group::A ? c.belief_a.at(s) : c.belief_b.at(s);
      const ValidationReport br = validate_belief(mu, static_cast<int>(t.models.size()));
      if (!br.ok()) {
        for (const auto& m : br.violations) v.violations.push_back(std::string("belief ") + group_name(g) + ": " + m);
        continue;
      }
      for (Group vs : {Group::A, Group::B}) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        for (size_t e = 0; e < t.models.size(); ++e) {
          if (mu(e) == 0.0) continue;
          const ExtendedModel& em = t.models[e];
          const int conj = vs == Group::A ? em.conj_a : em.conj_b;
          for (int a = 0; a < n; ++a)
            u(a) += mu(e) * em.model.kernel.row(kernel_row(a, conj, n)).dot(game.utility.transpose());
        }
        if (!contains(argmax_set(u, tol), pr.at(g, vs))) {
          std::ostringstream os;
          os << "situation " << game.situations[s].id << ": a_" << group_name(g) << group_name(vs) << "="
             << game.strategies[pr.at(g, vs)] << " is not a best response to the conjectured play";
          v.violations.push_back(os.str());
        }
      }
      const MatchWeights w = match_weights(c.shares, c.lambda, g);
      Eigen::VectorXd obj(t.models.size());
      for (size_t e = 0; e < t.models.size(); ++e) obj(e) = ezsu_objective(t.models[e], game, s, g, pr, w);
      const BestFit fit = best_fit_set(obj, tol);
      for (size_t e = 0; e < t.models.size(); ++e)
        if (mu(e) > 0.0 && !contains(fit.members, static_cast<int>(e))) {
          std::ostringstream os;
          os << "situation " << game.situations[s].id << ": group " << group_name(g) << " extended model "
             << t.models[e].model.label << " (" << game.strategies[t.models[e].conj_a] << ","
             << game.strategies[t.models[e].conj_b] << ") is not KL-minimal";
          v.violations.push_back(os.str());
        }
    }
  }
  return v;
}

}  // namespace ez
