#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ccbo/core.hpp"
#include "ccbo/rng.hpp"

namespace ccbo::landscape {

// One random 1-D slice through the reference optimum: the line
// theta_hat(r) = theta_star + (r + r0) * A covers the full box chord for
// r in [0, 1], with both endpoints on the box boundary.
struct SubspaceSample {
    VectorXd A;         // raw-space direction scaled to the chord length
    double r0 = 0.0;    // offset so that theta_hat(-r0) == theta_star
    std::vector<double> r_grid;                 // equidistant in [0, 1]
    std::vector<std::optional<double>> values;  // objective, or nullopt if crashed
    int i_star = 0;     // grid index nearest to theta_star
};

struct LandscapeReport {
    double p_crash = 0.0;   // fraction of crashed evaluations
    double s_opt = 0.0;     // fraction of successful points with a clear path to i_star
    double t_sim = 0.0;     // mean wall-clock seconds per evaluation
    int n_total = 0;
    int n_crashed = 0;
    int n_success = 0;
    int n_clear = 0;        // numerator of s_opt
    std::vector<SubspaceSample> subspaces;
};

// Draws a uniformly random direction and scales it to the chord of the box
// through theta_star; returns (A, r0). theta_star must be strictly inside
// the box.
std::pair<VectorXd, double> make_subspace(const Domain& domain, const VectorXd& theta_star,
                                          Rng& rng);

// True when no crashed sample and no strict discrete local maximum lies
// strictly between index i and index i_star.
bool path_clear(const std::vector<std::optional<double>>& values, int i, int i_star);

// Evaluates n_subspaces random slices of n_points each and aggregates the
// crash fraction, the relative-optimum-size score, and the mean evaluation
// time. Deterministic per seed except for the wall-clock timing.
LandscapeReport analyze(const Problem& problem, const VectorXd& theta_star, int n_subspaces,
                        int n_points, std::uint64_t seed);

}  // namespace ccbo::landscape
