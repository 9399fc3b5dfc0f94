#include "stagedtrees/datasets.hpp"

#include <array>

#include "stagedtrees/query.hpp"

namespace stagedtrees {

Dataset titanic() {
  EventTree tree({{"Class", {"1st", "2nd", "3rd", "Crew"}},
                  {"Sex", {"Male", "Female"}},
                  {"Age", {"Child", "Adult"}},
                  {"Survived", {"No", "Yes"}}});
  // Class varies fastest, then Sex, Age, Survived.
  constexpr std::array<double, 32> table = {0,  0,  35, 0,   0,  0,  17, 0,  118, 154, 387,
                                            670, 4,  13, 89, 3,  5,  11, 13, 0,   1,   13,
                                            14, 0,  57, 14, 75, 192, 140, 80, 76,  20};
  std::vector<double> counts(32);
  for (std::size_t sv = 0; sv < 2; ++sv) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t c = 0; c < 4; ++c) {
          counts[((c * 2 + s) * 2 + a) * 2 + sv] = table[((sv * 2 + a) * 2 + s) * 4 + c];
        }
      }
    }
  }
  return Dataset(std::move(tree), std::move(counts));
}

StagedTree asym_model() {
  std::vector<Variable> vars;
  for (int i = 1; i <= 4; ++i) vars.push_back({"X" + std::to_string(i), {"0", "1"}});
  EventTree tree(std::move(vars));

  auto stratum = [](std::vector<std::vector<double>> florets) {
    Stratum s;
    for (std::size_t v = 0; v < florets.size(); ++v) {
      const StageId id = std::to_string(v + 1);
      s.vertex_stage.push_back(id);
      s.stages[id].probs = florets[v];
    }
    return s;
  };
  // Vertices of each stratum follow the prefix (X1, X2, ...) in binary order.
  std::vector<Stratum> strata;
  strata.push_back(stratum({{0.7, 0.3}}));
  strata.push_back(stratum({{0.7, 0.3}, {0.3, 0.7}}));
  strata.push_back(stratum({{0.9, 0.1}, {0.9, 0.1}, {0.7, 0.3}, {0.2, 0.8}}));
  std::vector<std::vector<double>> x4;
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) {
      for (int x3 = 0; x3 < 2; ++x3) {
        if (x2 == 1 && x3 == 1) {
          x4.push_back(x1 == 1 ? std::vector<double>{0.2, 0.8} : std::vector<double>{0.999, 0.001});
        } else {
          x4.push_back(x1 == 1 ? std::vector<double>{0.4, 0.6} : std::vector<double>{0.7, 0.3});
        }
      }
    }
  }
  strata.push_back(stratum(std::move(x4)));
  return StagedTree(std::move(tree), std::move(strata), 0.0, kDefaultUnobserved, true);
}

Dataset asym(std::size_t n, std::uint64_t seed) {
  const auto model = asym_model();
  const auto records = sample_from(model, n, seed);
  return Dataset::from_records(model.tree(), records);
}

}  // namespace stagedtrees
