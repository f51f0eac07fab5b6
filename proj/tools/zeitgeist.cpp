#include "ez/centipede.hpp"
#include "ez/emit.hpp"
#include "ez/examples.hpp"
#include "ez/io.hpp"
#include "ez/learning.hpp"
#include "ez/lqn.hpp"
#include "ez/stability.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace {

struct Global {
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 1;
  int threads = 1;
  double budget = 1e8;
};

void output(const ez::Table& t, const Global& g) {
  const ez::Format f = ez::parse_format(g.format);
  if (g.out.empty()) {
    std::cout << (f == ez::Format::Csv ? ez::to_csv(t) : ez::to_json(t).dump(2) + "\n");
  } else {
    ez::emit(t, f, g.out);
  }
}

ez::EnumerateOptions enum_opts(const Global& g) {
  ez::EnumerateOptions e;
  e.budget = g.budget;
  e.threads = g.threads;
  return e;
}

struct GameInputs {
  std::string game, theory_a, theory_b;
};

void add_game_inputs(CLI::App* app, GameInputs& in) {
  app->add_option("--game", in.game, "game JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--theory-a,--theoryA", in.theory_a, "theory JSON for group A (default: correct theory)")
      ->check(CLI::ExistingFile);
  app->add_option("--theory-b,--theoryB", in.theory_b, "theory JSON for group B")->required()->check(CLI::ExistingFile);
}

struct Loaded {
  ez::StageGame game;
  ez::Theory ta, tb;
};

Loaded load(const GameInputs& in) {
  Loaded l;
  l.game = ez::game_from_json(ez::read_json_file(in.game));
  l.ta = in.theory_a.empty() ? ez::correct_theory(l.game) : ez::theory_from_json(ez::read_json_file(in.theory_a), l.game);
  l.tb = ez::theory_from_json(ez::read_json_file(in.theory_b), l.game);
  return l;
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0) || hi < lo)
    throw ez::ValidationError("grid must look like lo:hi:step");
  std::vector<double> out;
  const long n = std::lround((hi - lo) / step);
  for (long i = 0; i <= n; ++i) out.push_back(std::min(hi, lo + i * step));
  return out;
}

ez::Theory base_theory(const ez::ExtendedTheory& t) {
  ez::Theory out{t.name, {}};
  for (const auto& m : t.models) {
    bool seen = false;
    for (const auto& b : out.models) seen |= b.label == m.model.label;
    if (!seen) out.models.push_back(m.model);
  }
  return out;
}

ez::LearningConfig learning_config(const ez::json& j, const Global& g) {
  ez::LearningConfig c;
  c.n_agents = j.value("n_agents", c.n_agents);
  if (j.contains("shares")) {
    const auto s = j.at("shares").get<std::vector<double>>();
    if (s.size() != 2) throw ez::ValidationError("shares must have two entries");
    c.shares = ez::Shares{s[0], s[1]};
  }
  c.lambda = j.value("lambda", c.lambda);
  c.tau = j.value("tau", c.tau);
  c.horizon = j.value("horizon", c.horizon);
  c.eps0 = j.value("eps0", c.eps0);
  c.eps_decay = j.value("eps_decay", c.eps_decay);
  c.situation_block = j.value("situation_block", c.situation_block);
  c.situation = j.value("situation", c.situation);
  c.seed = j.value("seed", g.seed);
  c.threads = g.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium zeitgeists and evolutionary stability of theories"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--out", g.out, "output file (directory for `example`)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--budget", g.budget, "enumeration budget");

  auto* list = app.add_subcommand("list", "list built-in examples");

  auto* example = app.add_subcommand("example", "run a built-in example");
  std::string example_name;
  example->add_option("name", example_name, "example name")->required();

  auto* solve = app.add_subcommand("solve", "enumerate pure EZs");
  GameInputs solve_in;
  double p_b = 0.0, lambda = 0.0;
  add_game_inputs(solve, solve_in);
  solve->add_option("--p-b,--pB", p_b, "share of group B")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--lambda", lambda, "assortativity")->check(CLI::Range(0.0, 1.0));

  auto* stab = app.add_subcommand("stability", "classify stability of theory A against theory B");
  GameInputs stab_in;
  std::vector<double> stab_lambdas{0.0};
  std::string lambda_grid;
  add_game_inputs(stab, stab_in);
  stab->add_option("--lambda", stab_lambdas, "assortativity values")->check(CLI::Range(0.0, 1.0));
  stab->add_option("--lambda-grid", lambda_grid, "lo:hi:step; emits the per-EZ fitness sweep instead");

  auto* lqn_cmd = app.add_subcommand("lqn", "LQN Cournot fitness curves over mutant kappa");
  ez::lqn::Params<double> lp;
  std::string lqn_mode = "uniform", kappa_grid = "0:1:0.01";
  lqn_cmd->add_option("--mode", lqn_mode, "uniform (lambda=0), assortative (lambda=1) or nolearn")
      ->check(CLI::IsMember({"uniform", "assortative", "nolearn"}));
  lqn_cmd->add_option("--kappa-true", lp.kappa_true);
  lqn_cmd->add_option("--r-true", lp.r_true);
  lqn_cmd->add_option("--sw2,--sigma-w2", lp.sigma_w2);
  lqn_cmd->add_option("--se2,--sigma-e2", lp.sigma_e2);
  lqn_cmd->add_option("--kappa-grid", kappa_grid, "lo:hi:step");

  auto* cent = app.add_subcommand("centipede", "centipede fitness curve and maximal continuation check");
  ez::centipede::Spec cs;
  std::string p_grid = "0:1:0.01";
  cent->add_option("-K,--K", cs.K);
  cent->add_option("-g,--g", cs.g);
  cent->add_option("-l,--l", cs.l);
  cent->add_option("--p-grid", p_grid, "grid over the rational theory's share, lo:hi:step");

  auto* dollar = app.add_subcommand("dollar", "dollar game fitness curve and maximal continuation check");
  int dollar_k = 6;
  dollar->add_option("-K,--K", dollar_k);
  dollar->add_option("--p-grid", p_grid, "grid over the rational theory's share, lo:hi:step");

  auto* learn = app.add_subcommand("learn", "finite-agent learning simulation");
  std::string learn_game, learn_a, learn_b, learn_cfg;
  int learn_every = 1;
  learn->add_option("--game", learn_game)->required()->check(CLI::ExistingFile);
  learn->add_option("--theory-a", learn_a, "extended theory JSON for group A")->required()->check(CLI::ExistingFile);
  learn->add_option("--theory-b", learn_b, "extended theory JSON for group B")->required()->check(CLI::ExistingFile);
  learn->add_option("--config", learn_cfg)->required()->check(CLI::ExistingFile);
  learn->add_option("--every", learn_every, "record every n-th period")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& d : ez::examples::registry()) std::cout << d.name << "\t" << d.description << "\n";
      return 0;
    }
    if (*example) {
      const auto& d = ez::examples::find_example(example_name);
      if (d.game) {
        if (const auto game = d.game()) {
          const auto rep = ez::validate_game(*game);
          if (!rep.ok()) throw ez::ValidationError("example game invalid: " + rep.violations.front());
        }
      }
      ez::examples::ExampleOptions o;
      o.out_dir = g.out.empty() ? "out/" + d.name : g.out;
      o.format = ez::parse_format(g.format);
      o.seed = g.seed;
      o.threads = g.threads;
      o.budget = g.budget;
      const auto res = d.run(o);
      std::cout << (res.pass ? "PASS " : "FAIL ") << d.name;
      for (const auto& f : res.failures) std::cout << " | " << f;
      std::cout << "\n";
      return res.pass ? 0 : 1;
    }
    if (*solve) {
      const Loaded l = load(solve_in);
      const auto gt = ez::reduce(l.game);
      const auto ta = ez::reduce(l.game, l.ta), tb = ez::reduce(l.game, l.tb);
      const auto ez = ez::enumerate_ez(gt, ta, tb, ez::Shares{1.0 - p_b, p_b}, lambda, enum_opts(g));
      output(ez::ez_table(ez, gt, ta, tb), g);
      return 0;
    }
    if (*stab) {
      const Loaded l = load(stab_in);
      if (!lambda_grid.empty()) {
        const auto grid = parse_grid(lambda_grid);
        const auto gt = ez::reduce(l.game);
        output(ez::sweep_table(ez::assortativity_sweep(gt, ez::reduce(l.game, l.ta), ez::reduce(l.game, l.tb), grid,
                                                       enum_opts(g))),
               g);
        return 0;
      }
      ez::Table t;
      t.columns = {"lambda", "verdict", "n_ez"};
      for (double lam : stab_lambdas) {
        const auto v = ez::classify_stability(l.game, l.ta, l.tb, lam, enum_opts(g));
        t.add({lam, std::string(ez::to_string(v.kind)), static_cast<long long>(v.witnesses.size())});
      }
      output(t, g);
      return 0;
    }
    if (*lqn_cmd) {
      ez::lqn::validate(lp);
      ez::Table t;
      t.columns = {"kappa", "alpha_aa", "alpha_ab", "alpha_ba", "alpha_bb", "r_b", "fitness_a", "fitness_b"};
      // Dogmatic mutants: fitness_b is against rational residents, the extra column under assortative matching.
      if (lqn_mode == "nolearn") t.columns.push_back("fitness_b_assortative");
      const double ar = ez::lqn::alpha_rational(lp), fr = ez::lqn::objective_payoff(ar, ar, lp);
      for (double k : parse_grid(kappa_grid)) {
        try {
          if (lqn_mode == "nolearn") {
            const auto nl = ez::lqn::no_learning_alpha(lp, k);
            t.add({k, ar, ez::lqn::ell(nl.alpha_ba, lp), nl.alpha_ba, nl.alpha_bb, lp.r_true, fr,
                   nl.fitness_vs_rational, nl.fitness_assortative});
            continue;
          }
          const auto ez = lqn_mode == "uniform" ? ez::lqn::solve_ez_uniform(lp, k)
                                                : ez::lqn::solve_ez_assortative(lp, lp.kappa_true, k);
          t.add({k, ez.alpha_aa, ez.alpha_ab, ez.alpha_ba, ez.alpha_bb, ez.r_b, ez.fitness_a, ez.fitness_b});
        } catch (const ez::lqn::LqnError& e) {
          std::cerr << "kappa=" << k << ": " << e.what() << "\n";
        }
      }
      if (lqn_mode == "uniform")
        if (const auto iv = ez::lqn::unique_root_interval(lp))
          std::cerr << "unique-root interval for kappa: [" << iv->first << ", " << iv->second << "]\n";
      output(t, g);
      return 0;
    }
    if (*cent || *dollar) {
      ez::Table t;
      t.columns = {"p_rational", "fitness_rational", "fitness_analogy", "maximal_ezsu"};
      for (double p : parse_grid(p_grid)) {
        if (p < 0 || p > 1) throw ez::ValidationError("p-grid must lie in [0,1]");
        const ez::Shares sh{p, 1.0 - p};
        const auto f = *cent ? ez::centipede::centipede_fitness(cs, p) : ez::centipede::dollar_fitness(dollar_k, p);
        const auto v = *cent ? ez::centipede::verify_maximal_ezsu(cs, sh, 0.0)
                             : ez::centipede::verify_maximal_ezsu_dollar(dollar_k, sh, 0.0);
        t.add({p, f.rational, f.analogy, v.ok});
      }
      output(t, g);
      if (*cent && ez::centipede::continuation_condition(cs))
        std::cerr << "stable share of the analogy theory: " << ez::centipede::stable_share_centipede(cs) << "\n";
      return 0;
    }
    if (*learn) {
      const auto game = ez::game_from_json(ez::read_json_file(learn_game));
      const auto ta = ez::extended_theory_from_json(ez::read_json_file(learn_a), game);
      const auto tb = ez::extended_theory_from_json(ez::read_json_file(learn_b), game);
      const auto cfg = learning_config(ez::read_json_file(learn_cfg), g);
      const auto traj = ez::simulate(cfg, game, ta, tb);
      std::optional<ez::ConvergenceTarget> target;
      if (cfg.situation_block == 0) {
        const auto ez = ez::enumerate_ez(game, base_theory(ta), base_theory(tb), cfg.shares, cfg.lambda, enum_opts(g));
        if (!ez.empty()) target = ez::target_of(ez.front(), cfg.situation);
      }
      output(ez::trajectory_table(traj, game.strategies, target ? &*target : nullptr, learn_every), g);
      std::cerr << "epsilon schedule: " << cfg.eps0 << " * " << cfg.eps_decay << "^t, lowest-index tie-break\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
