#pragma once
// Built-in worked examples: game and theory builders plus a registry of
// runnable computations with recorded expectations.

#include "ez/emit.hpp"
#include "ez/game.hpp"
#include "ez/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ez::examples {

// Two situations G_A, G_B with consequences good/bad; q = (1/2, 1/2).
StageGame example1_game();
// Own-strategy-only models F_A and F_B.
Theory example1_illusion(const StageGame& game);

// One situation; theory {F_H, F_L} differing only in the a2 row.
StageGame example3_game();
Theory example3_theory(const StageGame& game);
// Threshold from the KL constants: (1-l) KL(.2||.4) = l (KL(.4||.8) - KL(.4||.1)).
double example3_lambda_h();

struct InvestmentParams {
  double b = 1.0;  // true productivity b*
  double c = 5.5;
  double m = 6.0;
};
bool investment_conditions_hold(const InvestmentParams& p);
// Gaussian productivity with unit variance; actions are investment levels 1 and 2.
GameTables investment_game(const InvestmentParams& p);
TheoryTables investment_correct(const InvestmentParams& p);
// Models at b = b* + m/(a_i + a_-i) for the three investment sums.
TheoryTables investment_misspecified(const InvestmentParams& p);

struct ExampleOptions {
  std::string out_dir = ".";
  Format format = Format::Csv;
  std::uint64_t seed = 1;
  int threads = 1;
  double budget = 1e8;
};

struct ExampleOutcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> files;
  void expect(bool ok, const std::string& what);
};

struct ExampleDescriptor {
  std::string name;
  std::string description;
  std::function<std::optional<StageGame>()> game;  // empty for continuous games
  std::function<ExampleOutcome(const ExampleOptions&)> run;
};

const std::vector<ExampleDescriptor>& registry();
const ExampleDescriptor& find_example(const std::string& name);

}  // namespace ez::examples
