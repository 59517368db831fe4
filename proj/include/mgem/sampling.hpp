#pragma once

#include <optional>
#include <random>

#include "mgem/subproblems.hpp"

namespace mgem {

/// Random feasible points of each local constraint set, for Monte-Carlo
/// domination checks. All draws come from the caller's engine, so a fixed
/// seed reproduces them.
using Rng = std::mt19937_64;

Vector sample_dg(const Generator& g, int slots, Rng& rng);
Vector sample_class1(const Class1Load& d, int slots, Rng& rng);
Vector sample_class2(const Class2Load& e, int slots, Rng& rng);
Vector sample_storage(const StorageUnit& u, int slots, Rng& rng);
/// A random point of the P~_R box used by the renewable subproblem.
Vector sample_p_tilde(const Scenario& s, Rng& rng);

/// A schedule meeting every constraint, coupling ones included, by
/// rejection over independent local draws. Empty after max_tries failures.
std::optional<Schedule> sample_schedule(const Scenario& s, Rng& rng, int max_tries = 10'000);

/// Uniform multipliers: mu in [0, scale], lambda and nu in [-scale, scale]
/// shifted by `center`.
Multipliers sample_multipliers(int slots, double center, double scale, Rng& rng);

}  // namespace mgem
