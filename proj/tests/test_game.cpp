#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ez/examples.hpp"
#include "ez/game.hpp"
#include "ez/io.hpp"

using namespace ez;

TEST_CASE("match weights") {
  auto w = match_weights({1.0, 0.0}, 0.0, Group::A);
  CHECK(w.own == 1.0);
  CHECK(w.other == 0.0);
  w = match_weights({1.0, 0.0}, 0.0, Group::B);
  CHECK(w.own == 0.0);
  CHECK(w.other == 1.0);
  w = match_weights({1 - 0.128, 0.128}, 0.5, Group::B);
  CHECK(w.own == doctest::Approx(0.564).epsilon(1e-12));
  CHECK(w.own + w.other == doctest::Approx(1.0));
  CHECK_THROWS_AS(match_weights({0.5, 0.6}, 0.0, Group::A), ValidationError);
  CHECK_THROWS_AS(match_weights({0.5, 0.5}, 1.5, Group::A), ValidationError);
}

TEST_CASE("example games validate") {
  CHECK(validate_game(examples::example1_game()).ok());
  CHECK(validate_game(examples::example3_game()).ok());
  const auto g = examples::example1_game();
  CHECK(g.q(0) == 0.5);
  CHECK(g.n_situations() == 2);
}

TEST_CASE("pmf summing to 0.9 is reported") {
  StageGame g = examples::example3_game();
  g.situations[0].kernel(4, 0) -= 0.1;
  const auto rep = validate_game(g);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.violations.front().find("0.9") != std::string::npos);
  CHECK_THROWS_AS(make_game(g), ValidationError);
}

TEST_CASE("missing kernel entries and bad q are reported") {
  StageGame g = examples::example1_game();
  g.situations[1].kernel.conservativeResize(8, 2);
  g.q = Eigen::Vector2d(0.5, 0.6);
  const auto rep = validate_game(g);
  CHECK(rep.violations.size() >= 2);
}

TEST_CASE("tiny rounding is renormalized") {
  StageGame g = examples::example3_game();
  g.situations[0].kernel(0, 0) += 1e-13;
  const StageGame h = make_game(g);
  CHECK(h.situations[0].kernel.row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expected utility and correct theory") {
  const auto g = examples::example1_game();
  const Eigen::MatrixXd u = expected_utility(g.situations[0].kernel, g.utility, 3);
  CHECK(u(1, 1) == doctest::Approx(0.3));
  CHECK(u(2, 0) == doctest::Approx(0.11));
  const Theory c = correct_theory(g);
  REQUIRE(c.models.size() == 2);
  CHECK(c.models[1].kernel.isApprox(g.situations[1].kernel));
}

TEST_CASE("extensions") {
  const auto g = examples::example3_game();
  const Theory t = examples::example3_theory(g);
  CHECK(unrestricted_extension(t, 3).models.size() == 18);
  const auto f = fixed_conjecture_extension(t, 0, 1);
  CHECK(f.models.size() == 2);
  CHECK(f.models[1].conj_b == 1);
}

TEST_CASE("json round trip") {
  const auto g = examples::example1_game();
  const auto j = game_to_json(g);
  const StageGame h = game_from_json(j);
  CHECK(h.strategies == g.strategies);
  CHECK(h.q.isApprox(g.q));
  for (int s = 0; s < 2; ++s) CHECK(h.situations[s].kernel.isApprox(g.situations[s].kernel));
  CHECK(game_to_json(h) == j);
  const Theory t = examples::example1_illusion(g);
  const Theory u = theory_from_json(theory_to_json(t, g), g);
  REQUIRE(u.models.size() == 2);
  CHECK(u.models[0].label == "F_A");
  CHECK(u.models[1].kernel.isApprox(t.models[1].kernel));
}

TEST_CASE("extended theory json expands conjectures") {
  const auto g = examples::example3_game();
  json j = theory_to_json(examples::example3_theory(g), g);
  j["conjectures"] = "all";
  CHECK(extended_theory_from_json(j, g).models.size() == 18);
}
