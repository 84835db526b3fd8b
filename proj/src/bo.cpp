#include "ccbo/bo.hpp"

#include <cmath>
#include <iostream>

namespace ccbo::bo {

namespace {

VectorXd random_unit_point(int d, Rng& rng) {
    VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform();
    return x;
}

double min_distance_to_rows(const MatrixXd& X, const VectorXd& x) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < X.rows(); ++i)
        best = std::min(best, (X.row(i).transpose() - x).norm());
    return best;
}

// Nudges a proposal that coincides with an already-evaluated point; exact
// re-queries of a deterministic objective carry no information.
VectorXd dedupe(const MatrixXd& X, VectorXd x, Rng& rng) {
    constexpr double kTooClose = 1e-9;
    constexpr double kNudge = 1e-3;
    for (int attempt = 0; attempt < 16 && min_distance_to_rows(X, x) < kTooClose; ++attempt) {
        VectorXd dir(x.size());
        for (int j = 0; j < x.size(); ++j) dir[j] = rng.gaussian();
        const double norm = dir.norm();
        if (!(norm > 0.0)) continue;
        VectorXd cand = x + (kNudge / norm) * dir;
        for (int j = 0; j < cand.size(); ++j) cand[j] = std::clamp(cand[j], 0.0, 1.0);
        x = cand;
    }
    return x;
}

}  // namespace

gp::GpConfig BoConfig::gp_config() const { return {kernel, mean, prior}; }

MatrixXd initial_design(int dim, Rng& rng) {
    if (dim < 1) throw DomainError("initial_design: dimension must be positive");
    MatrixXd pts(dim + 1, dim);
    for (int i = 0; i < pts.rows(); ++i)
        for (int j = 0; j < dim; ++j) pts(i, j) = rng.uniform();
    return pts;
}

MatrixXd initial_design(int dim, std::uint64_t seed) {
    Rng rng(seed);
    return initial_design(dim, rng);
}

VectorXd bo_step(const Trace& history, const Domain& domain, const BoConfig& config, Rng& rng) {
    if (history.evaluations.empty()) throw DomainError("bo_step: history must not be empty");
    const int d = domain.dim();

    try {
        MatrixXd X;
        VectorXd y;
        if (config.crash_mode == CrashMode::V) {
            vdp::AugmentedDataset aug = vdp::add_virtual_data(
                history, domain, config.gp_config(), config.gamma, rng, config.fit);
            X = std::move(aug.X);
            y = std::move(aug.y);
        } else {
            const int n = static_cast<int>(history.evaluations.size());
            X.resize(n, d);
            y.resize(n);
            for (int i = 0; i < n; ++i) {
                const Evaluation& ev = history.evaluations[static_cast<std::size_t>(i)];
                X.row(i) = normalize(domain, ev.theta);
                if (!ev.crashed)
                    y[i] = *ev.objective;
                else if (ev.fallback_objective)
                    y[i] = *ev.fallback_objective;
                else
                    throw DomainError(
                        "bo_step: fallback-mode surrogate requires a fallback objective for "
                        "crashed evaluations");
            }
        }

        const gp::GpModel model = gp::fit(X, y, config.gp_config(), rng, config.fit);
        const VectorXd x =
            acq::maximize_acquisition(model, config.acquisition, d, rng, config.maximize);
        return dedupe(X, x, rng);
    } catch (const NoFeasibleData&) {
        return random_unit_point(d, rng);
    } catch (const NumericalError& e) {
        std::cerr << "[ccbo] surrogate fit failed (" << e.what()
                  << "); proposing a uniform random point instead\n";
        return random_unit_point(d, rng);
    }
}

Trace run(const Problem& problem, const BoConfig& config, int budget, std::uint64_t seed,
          const MatrixXd& shared_initial, const std::string& optimizer_id) {
    const int d = problem.domain.dim();
    if (budget < 1) throw DomainError("run: budget must be positive");

    Rng rng(seed);
    MatrixXd init = shared_initial;
    if (init.rows() == 0)
        init = initial_design(d, rng);
    else if (init.cols() != d)
        throw DomainError("run: shared initial design has wrong dimension");

    Trace trace;
    trace.problem_id = problem.id;
    trace.optimizer_id = optimizer_id;
    trace.seed = seed;

    BudgetCounter counter(budget);
    for (int i = 0; i < init.rows() && !counter.exhausted(); ++i) {
        const VectorXd theta = denormalize(problem.domain, init.row(i).transpose());
        trace.evaluations.push_back(evaluate(problem, theta, counter));
    }
    while (!counter.exhausted()) {
        const VectorXd x = bo_step(trace, problem.domain, config, rng);
        trace.evaluations.push_back(evaluate(problem, denormalize(problem.domain, x), counter));
    }
    return trace;
}

}  // namespace ccbo::bo
