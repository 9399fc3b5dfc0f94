#pragma once

#include <cstdint>

#include "stagedtrees/dataset.hpp"
#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

/// The 2201 passengers and crew of the Titanic, over
/// Class {1st, 2nd, 3rd, Crew}, Sex {Male, Female}, Age {Child, Adult},
/// Survived {No, Yes}.
Dataset titanic();

/// A fitted model over four binary variables X1..X4 (levels "0", "1") whose
/// Bayes classifier for X1 is right 84.85% of the time while the majority
/// class covers 70%.
StagedTree asym_model();

/// n records sampled from asym_model().
Dataset asym(std::size_t n = 1000, std::uint64_t seed = 20210601);

}  // namespace stagedtrees
