#include "ez/examples.hpp"

#include "ez/centipede.hpp"
#include "ez/inference.hpp"
#include "ez/lqn.hpp"
#include "ez/stability.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

namespace ez::examples {

namespace {

StageGame binary_game(const std::vector<std::pair<std::string, Eigen::MatrixXd>>& situations, Eigen::VectorXd q) {
  StageGame g;
  g.strategies = {"a1", "a2", "a3"};
  g.consequences = {"g", "b"};
  g.utility = Eigen::Vector2d(1.0, 0.0);
  for (const auto& [id, pg] : situations) g.situations.push_back({id, binary_kernel(pg)});
  g.q = std::move(q);
  return make_game(std::move(g));
}

Eigen::MatrixXd own_only(const Eigen::Vector3d& pg) { return pg.replicate(1, 3); }

}  // namespace

StageGame example1_game() {
  Eigen::Matrix3d ga, gb;
  ga << 0.1, 0.1, 0.1,  //
      0.1, 0.3, 0.1,    //
      0.11, 0.1, 0.2;
  gb << 0.11, 0.5, 0.12,  //
      0.5, 0.12, 0.14,    //
      0.4, 0.55, 0.4;
  return binary_game({{"G_A", ga}, {"G_B", gb}}, Eigen::Vector2d(0.5, 0.5));
}

Theory example1_illusion(const StageGame& game) {
  Theory t{"illusion", {}};
  t.models.push_back({"F_A", binary_kernel(own_only({0.1, 0.3, 0.2}))});
  t.models.push_back({"F_B", binary_kernel(own_only({0.5, 0.14, 0.4}))});
  return make_theory(std::move(t), game.n_actions(), game.n_consequences());
}

StageGame example3_game() {
  Eigen::Matrix3d pg;
  pg << 0.25, 0.5, 0.7,  //
      0.2, 0.4, 0.4,     //
      0.15, 0.2, 0.2;
  return binary_game({{"G", pg}}, Eigen::VectorXd::Ones(1));
}

Theory example3_theory(const StageGame& game) {
  auto model = [](double b, double c) {
    Eigen::Matrix3d pg;
    pg << 0.1, 0.1, 0.1,  //
        c, b, b,          //
        0.15, 0.2, 0.2;
    return binary_kernel(pg);
  };
  Theory t{"misspecified", {{"F_H", model(0.8, 0.2)}, {"F_L", model(0.1, 0.4)}}};
  return make_theory(std::move(t), game.n_actions(), game.n_consequences());
}

namespace {

double bern_kl(double p, double q) { return kl_divergence(Eigen::Vector2d(p, 1 - p), Eigen::Vector2d(q, 1 - q)); }

}  // namespace

double example3_lambda_h() {
  const double k24 = bern_kl(0.2, 0.4), k48 = bern_kl(0.4, 0.8), k41 = bern_kl(0.4, 0.1);
  return k24 / (k24 + k48 - k41);
}

bool investment_conditions_hold(const InvestmentParams& p) {
  return 5 * p.b < p.c && p.c < 6 * p.b && p.c < 4 * p.b + p.m / 3 && p.c < 5 * p.b + p.m / 4;
}

GameTables investment_game(const InvestmentParams& p) {
  GameTables g;
  g.actions = {"1", "2"};
  g.situation_ids = {"G"};
  g.q = Eigen::VectorXd::Ones(1);
  Eigen::Matrix2d u;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) u(i, j) = (i + 1) * p.b * (i + j + 2) - (i == 1 ? p.c : 0.0);
  g.payoff = {u};
  return g;
}

TheoryTables investment_correct(const InvestmentParams& p) {
  TheoryTables t;
  t.name = "correct";
  t.labels = {"b=" + format_number(p.b)};
  t.utility = investment_game(p).payoff;
  t.divergence = {{Eigen::MatrixXd::Zero(2, 2)}};
  return t;
}

TheoryTables investment_misspecified(const InvestmentParams& p) {
  TheoryTables t;
  t.name = "misspecified";
  for (int sum : {2, 3, 4}) {
    const double b = p.b + p.m / sum;
    Eigen::Matrix2d u, k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const int s = i + j + 2;
        u(i, j) = (i + 1) * (b * s - p.m) - (i == 1 ? p.c : 0.0);
        const double gap = (b - p.b) * s - p.m;
        k(i, j) = gap * gap / 2;
      }
    t.labels.push_back("b=" + format_number(b));
    t.utility.push_back(u);
    t.divergence.push_back({k});
  }
  return t;
}

void ExampleOutcome::expect(bool ok, const std::string& what) {
  if (!ok) {
    pass = false;
    failures.push_back(what);
  }
}

namespace {

std::string out_path(const ExampleOptions& o, const std::string& stem) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / (stem + (o.format == Format::Csv ? ".csv" : ".json"))).string();
}

void write(ExampleOutcome& out, const ExampleOptions& o, const std::string& stem, const Table& t) {
  const std::string path = out_path(o, stem);
  emit(t, o.format, path);
  out.files.push_back(path);
}

EnumerateOptions enum_opts(const ExampleOptions& o) {
  EnumerateOptions e;
  e.budget = o.budget;
  e.threads = o.threads;
  return e;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

ExampleOutcome run_example1(const ExampleOptions& o) {
  ExampleOutcome out;
  const StageGame game = example1_game();
  const Theory ta = correct_theory(game), tb = example1_illusion(game);
  const GameTables gt = reduce(game);
  const TheoryTables a = reduce(game, ta), b = reduce(game, tb);
  const auto ez = enumerate_ez(gt, a, b, Shares{1.0, 0.0}, 0.0, enum_opts(o));
  write(out, o, "ez", ez_table(ez, gt, a, b));
  out.expect(!ez.empty(), "at least one EZ at p=(1,0), lambda=0");
  bool resident_035 = false;
  for (const auto& r : ez) {
    out.expect(near(r.fitness_b, 0.4, 1e-12), "mutant fitness 0.4 in every EZ");
    resident_035 |= near(r.fitness_a, 0.35, 1e-12);
  }
  out.expect(resident_035, "an EZ with resident fitness 0.35");
  out.expect(classify_records(ez).kind == StabilityKind::Fragile, "correct theory fragile against illusion theory");
  return out;
}

ExampleOutcome run_illusion(const ExampleOptions& o) {
  ExampleOutcome out;
  const StageGame game = example1_game();
  const Theorem1Report rep = theorem1_part1(game);
  Table t;
  t.columns = {"situation", "v_ne", "v_bar", "q"};
  for (int s = 0; s < game.n_situations(); ++s)
    t.add({game.situations[s].id, rep.v_ne(s), rep.v_bar(s),
           rep.separating_q ? Value((*rep.separating_q)(s)) : Value(std::string())});
  write(out, o, "theorem1", t);
  out.expect(!rep.hull_condition_holds, "hull condition fails");
  out.expect(rep.separating_q.has_value(), "separating q found");
  const Eigen::Vector2d half(0.5, 0.5);
  out.expect(half.dot(rep.v_bar) > half.dot(rep.v_ne), "q=(1/2,1/2) separates: Stackelberg sum above Nash sum");
  const Theory ill = construct_illusion_theory(game);
  const auto v = classify_stability(game, correct_theory(game), ill, 0.0, enum_opts(o));
  write(out, o, "ez", ez_table(v.witnesses, reduce(game), reduce(game, correct_theory(game)), reduce(game, ill)));
  out.expect(v.kind == StabilityKind::Fragile, "correct theory fragile against constructed illusion theory");
  return out;
}

ExampleOutcome run_example3(const ExampleOptions& o) {
  ExampleOutcome out;
  const StageGame game = example3_game();
  const GameTables gt = reduce(game);
  const TheoryTables a = reduce(game, correct_theory(game)), b = reduce(game, example3_theory(game));
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  const auto rows = assortativity_sweep(gt, a, b, grid, enum_opts(o));
  write(out, o, "sweep", sweep_table(rows));
  const double lh = example3_lambda_h();
  out.expect(near(lh, 0.5637, 1e-3), "lambda_h near 0.5637");
  for (double l : grid) {
    bool fh = false;
    for (const auto& r : rows)
      if (r.lambda == l && r.belief_label == "F_H") fh = true;
    if (fh != (l < lh)) {
      out.expect(false, "F_H EZ exists iff lambda < lambda_h (lambda=" + format_number(l) + ")");
      break;
    }
  }
  // F_H branch fitness is affine in lambda, so two points locate the crossing.
  auto fh_gap = [&](double l) {
    for (const auto& r : rows)
      if (r.lambda == l && r.belief_label == "F_H") return r.fitness_b - r.fitness_a;
    return std::nan("");
  };
  const double g0 = fh_gap(0.0), g1 = fh_gap(0.5);
  const double ll = -g0 * 0.5 / (g1 - g0);
  out.expect(near(ll, 0.25, 1e-9), "fitness crossing at lambda_l = 0.25");
  const double want[3][2] = {{0.1, 0}, {0.4, 1}, {1.0, 0}};
  for (const auto& w : want) {
    const auto v = classify_stability(gt, a, b, w[0], enum_opts(o));
    const StabilityKind k = w[1] == 0 ? StabilityKind::Stable : StabilityKind::Fragile;
    out.expect(v.kind == k, std::string("classification at lambda=") + format_number(w[0]) + " is " + to_string(k));
  }
  return out;
}

ExampleOutcome run_investment(const ExampleOptions& o) {
  ExampleOutcome out;
  const InvestmentParams p;
  out.expect(investment_conditions_hold(p), "parameter conditions hold");
  const GameTables g = investment_game(p);
  const TheoryTables a = investment_correct(p), b = investment_misspecified(p);
  const ReversalReport rep = detect_stability_reversal(g, a, b, enum_opts(o));
  out.expect(rep.reversal, "stability reversal detected");
  Table t;
  t.columns = {"resident", "a_AA", "a_AB", "a_BA", "a_BB", "belief_B", "fitness_A", "fitness_B"};
  auto add = [&](const char* who, const std::vector<EzRecord>& ez) {
    for (const auto& r : ez) {
      const Profile& pr = r.zeitgeist.profile[0];
      t.add({std::string(who), g.actions[pr.a[0]], g.actions[pr.a[1]], g.actions[pr.a[2]], g.actions[pr.a[3]],
             belief_label(b, r.zeitgeist.belief_b[0]), r.fitness_a, r.fitness_b});
    }
  };
  add("A", rep.resident_a);
  add("B", rep.resident_b);
  write(out, o, "reversal", t);
  auto behaviors = [](const std::vector<EzRecord>& ez) {
    std::vector<std::array<int, 4>> v;
    for (const auto& r : ez)
      if (std::find(v.begin(), v.end(), r.zeitgeist.profile[0].a) == v.end()) v.push_back(r.zeitgeist.profile[0].a);
    return v;
  };
  const auto ba = behaviors(rep.resident_a), bb = behaviors(rep.resident_b);
  out.expect(ba.size() == 1 && ba[0] == std::array<int, 4>{0, 0, 1, 1}, "unique behavior (1,1,2,2) at p=(1,0)");
  out.expect(bb.size() == 1 && bb[0] == std::array<int, 4>{0, 0, 0, 1}, "unique behavior (1,1,1,2) at p=(0,1)");
  return out;
}

ExampleOutcome run_lqn_fig2(const ExampleOptions& o) {
  ExampleOutcome out;
  const lqn::Params<double> p;
  Table t;
  t.columns = {"kappa", "fitness_A", "fitness_B", "alpha_BA", "alpha_AB", "r_B"};
  bool crossed = false;
  for (int i = 0; i <= 100; ++i) {
    const double k = i / 100.0;
    try {
      const auto ez = lqn::solve_ez_uniform(p, k);
      t.add({k, ez.fitness_a, ez.fitness_b, ez.alpha_ba, ez.alpha_ab, ez.r_b});
      if (k > p.kappa_true && ez.fitness_b < ez.fitness_a - kStrictMargin) crossed = true;
    } catch (const lqn::LqnError&) {
    }
  }
  write(out, o, "fig2", t);
  const double h = 1e-6;
  const double d = (lqn::solve_ez_uniform(p, p.kappa_true + h).fitness_b - lqn::solve_ez_uniform(p, p.kappa_true).fitness_b) / h;
  out.expect(d > 0, "mutant fitness increasing in kappa at the true kappa");
  out.expect(crossed, "mutant fitness falls below resident fitness for large kappa");
  return out;
}

ExampleOutcome run_lqn_fig3(const ExampleOptions& o) {
  ExampleOutcome out;
  const lqn::Params<double> p;
  Table t;
  t.columns = {"kappa", "fitness", "alpha", "alpha_team"};
  double prev = 0.0;
  bool decreasing = true;
  for (int i = 0; i < 50; ++i) {
    const double k = i / 49.0;
    const auto ez = lqn::solve_ez_assortative(p, p.kappa_true, k);
    t.add({k, ez.fitness_b, ez.alpha_bb, lqn::alpha_team(p)});
    if (i > 0 && !(ez.fitness_b < prev)) decreasing = false;
    prev = ez.fitness_b;
  }
  write(out, o, "fig3", t);
  out.expect(decreasing, "fitness strictly decreasing in kappa");
  return out;
}

ExampleOutcome run_centipede(const ExampleOptions& o) {
  ExampleOutcome out;
  const centipede::Spec s{6, 1.0, 1.0};
  Table t;
  t.columns = {"p_rational", "fitness_rational", "fitness_analogy"};
  for (int i = 0; i <= 100; ++i) {
    const auto f = centipede::centipede_fitness(s, i / 100.0);
    t.add({i / 100.0, f.rational, f.analogy});
  }
  write(out, o, "fitness", t);
  out.expect(centipede::stable_share_centipede(s) == 0.75, "stable share 0.75");
  for (double pr : {0.0, 0.5, 0.99}) {
    const auto v = centipede::verify_maximal_ezsu(s, Shares{pr, 1.0 - pr}, 0.0);
    out.expect(v.ok, "maximal continuation is an EZ-SU at p_rational=" + format_number(pr) + ": " + v.violation);
  }
  return out;
}

ExampleOutcome run_dollar(const ExampleOptions& o) {
  ExampleOutcome out;
  const int K = 6;
  Table t;
  t.columns = {"p_rational", "fitness_rational", "fitness_analogy"};
  bool dominates = true;
  for (int i = 0; i <= 100; ++i) {
    const auto f = centipede::dollar_fitness(K, i / 100.0);
    t.add({i / 100.0, f.rational, f.analogy});
    dominates &= f.rational > f.analogy;
  }
  write(out, o, "fitness", t);
  out.expect(dominates, "rational fitness strictly above analogy fitness");
  for (double pr : {0.0, 0.5, 0.99}) {
    const auto v = centipede::verify_maximal_ezsu_dollar(K, Shares{pr, 1.0 - pr}, 0.0);
    out.expect(v.ok, "maximal continuation is an EZ-SU at p_rational=" + format_number(pr) + ": " + v.violation);
  }
  return out;
}

std::vector<ExampleDescriptor> build_registry() {
  auto none = [] { return std::optional<StageGame>(); };
  return {
      {"example1", "Two-situation game, correct theory vs illusion-of-control models",
       [] { return std::optional<StageGame>(example1_game()); }, run_example1},
      {"investment", "Investment game stability reversal", none, run_investment},
      {"example3", "Three-action game, assortativity sweep",
       [] { return std::optional<StageGame>(example3_game()); }, run_example3},
      {"lqn-fig2", "LQN Cournot, uniform matching, mutant kappa sweep", none, run_lqn_fig2},
      {"lqn-fig3", "LQN Cournot, assortative matching, kappa sweep", none, run_lqn_fig3},
      {"centipede", "Centipede game K=6, g=l=1",
       [] {
         return std::optional<StageGame>(
             centipede::finite_game(centipede::terminal_payoffs(centipede::Spec{6, 1.0, 1.0})));
       },
       run_centipede},
      {"dollar", "Dollar game K=6",
       [] { return std::optional<StageGame>(centipede::finite_game(centipede::dollar_tree(6))); }, run_dollar},
      {"illusion-theorem1", "Hull test and constructed illusion-of-control theory on the two-situation game",
       [] { return std::optional<StageGame>(example1_game()); }, run_illusion},
  };
}

}  // namespace

const std::vector<ExampleDescriptor>& registry() {
  static const std::vector<ExampleDescriptor> r = build_registry();
  return r;
}

const ExampleDescriptor& find_example(const std::string& name) {
  for (const auto& d : registry())
    if (d.name == name) return d;
  std::string known;
  for (const auto& d : registry()) known += " " + d.name;
  throw ValidationError("unknown example '" + name + "'; known:" + known);
}

}  // namespace ez::examples
