#pragma once

#include <vector>

#include "ccbo/core.hpp"
#include "ccbo/gpr.hpp"

namespace ccbo::vdp {

// Dataset for the main surrogate: every evaluated input in trace order, with
// observed objectives for successful evaluations and pessimistic virtual
// values for crashed ones.
struct AugmentedDataset {
    MatrixXd X;                    // normalized inputs, one row per evaluation
    VectorXd y;                    // raw-unit objective (observed or virtual)
    std::vector<bool> is_virtual;  // per-row origin flag
    VectorXd pessimism_sigma;      // sigma actually applied; 0 for observed rows

    [[nodiscard]] int n() const { return static_cast<int>(X.rows()); }
    [[nodiscard]] int n_virtual() const;
};

struct VirtualValue {
    double value = 0.0;
    double sigma_used = 0.0;  // pessimism term after capping so the bounds are satisfiable
};

// Pessimistic imputation for one crashed point given the inner-model posterior
// (mu, sigma) and the range [j_min, j_max] of successful objectives:
//   J = min( max(mu, j_min) + gamma * sigma_used, j_max )
// where sigma_used caps sigma at the largest value keeping
// j_min + gamma * sigma_used <= j_max, so that bound holds exactly.
VirtualValue virtual_value(double mu, double sigma, double j_min, double j_max, double gamma);

inline constexpr double kDefaultGamma = 3.0;

// Recomputes virtual values from scratch: fits a fresh model on the successful
// evaluations only, then imputes every crashed evaluation pessimistically.
// Throws NoFeasibleData when the trace has no successful evaluation.
AugmentedDataset add_virtual_data(const Trace& history, const Domain& domain,
                                  const gp::GpConfig& config, double gamma, Rng& rng,
                                  const gp::FitSettings& settings = {});

}  // namespace ccbo::vdp
