#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccbo/core.hpp"
#include "ccbo/rng.hpp"

namespace ccbo::baselines {

// Uniform random sampling after the shared initial design.
Trace random_search(const Problem& problem, int budget, std::uint64_t seed,
                    const MatrixXd& shared_initial, const std::string& optimizer_id = "Rand");

// Levels per dimension of the full-factorial grid sized against a 25*d
// budget. The default sizing is ceil((25*d)^(1/d)), which always yields at
// least as many grid points as the budget; `log_reading = true` selects the
// alternative ceil(log_d(25*d)) sizing instead (fewer points than the budget
// for d = 2).
int grid_levels(int d, bool log_reading = false);

// Full-factorial sweep over `levels` equally spaced values per dimension,
// endpoints included, in lexicographic order (last coordinate fastest).
Trace grid_search(const Problem& problem, int levels, std::uint64_t seed,
                  const std::string& optimizer_id = "Grid");

// Debug/diagnostic record of one pattern-search polling round.
struct PatternRound {
    double mesh = 0.0;
    bool improved = false;
};

// Generalized pattern search: opportunistic +/- coordinate polls from the
// incumbent with mesh doubling on success and halving on a failed full poll.
// Crashed evaluations never improve the incumbent; all polls are projected
// onto the unit cube. If every initial point crashed, uniform random restarts
// are evaluated (consuming budget) until one succeeds.
Trace pattern_search(const Problem& problem, int budget, std::uint64_t seed,
                     const MatrixXd& shared_initial, const std::string& optimizer_id = "PS",
                     std::vector<PatternRound>* rounds = nullptr);

}  // namespace ccbo::baselines
