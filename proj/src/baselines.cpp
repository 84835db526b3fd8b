#include "ccbo/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace ccbo::baselines {

namespace {

VectorXd random_unit_point(int d, Rng& rng) {
    VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform();
    return x;
}

MatrixXd initial_or_default(const MatrixXd& shared_initial, int d, Rng& rng) {
    if (shared_initial.rows() > 0) {
        if (shared_initial.cols() != d)
            throw DomainError("shared initial design has wrong dimension");
        return shared_initial;
    }
    MatrixXd pts(d + 1, d);
    for (int i = 0; i < pts.rows(); ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform();
    return pts;
}

Trace make_trace(const Problem& problem, const std::string& optimizer_id, std::uint64_t seed) {
    Trace trace;
    trace.problem_id = problem.id;
    trace.optimizer_id = optimizer_id;
    trace.seed = seed;
    return trace;
}

}  // namespace

Trace random_search(const Problem& problem, int budget, std::uint64_t seed,
                    const MatrixXd& shared_initial, const std::string& optimizer_id) {
    const int d = problem.domain.dim();
    if (budget < 1) throw DomainError("random_search: budget must be positive");

    Rng rng(seed);
    const MatrixXd init = initial_or_default(shared_initial, d, rng);

    Trace trace = make_trace(problem, optimizer_id, seed);
    BudgetCounter counter(budget);
    for (int i = 0; i < init.rows() && !counter.exhausted(); ++i) {
        const VectorXd theta = denormalize(problem.domain, init.row(i).transpose());
        trace.evaluations.push_back(evaluate(problem, theta, counter));
    }
    while (!counter.exhausted()) {
        const VectorXd theta = denormalize(problem.domain, random_unit_point(d, rng));
        trace.evaluations.push_back(evaluate(problem, theta, counter));
    }
    return trace;
}

int grid_levels(int d, bool log_reading) {
    if (d < 2) throw DomainError("grid_levels: requires d >= 2");
    const long long target = 25LL * d;
    if (log_reading) {
        // smallest L with d^L >= 25*d, i.e. ceil(log_d(25*d))
        long long p = 1;
        int levels = 0;
        while (p < target) {
            p *= d;
            ++levels;
        }
        return std::max(levels, 2);
    }
    // smallest L with L^d >= 25*d, i.e. ceil((25*d)^(1/d))
    for (int levels = 2;; ++levels) {
        long long p = 1;
        for (int i = 0; i < d && p < target; ++i) p *= levels;
        if (p >= target) return levels;
    }
}

Trace grid_search(const Problem& problem, int levels, std::uint64_t seed,
                  const std::string& optimizer_id) {
    const int d = problem.domain.dim();
    if (levels < 2) throw DomainError("grid_search: requires at least 2 levels per dimension");

    long long total = 1;
    for (int i = 0; i < d; ++i) {
        total *= levels;
        if (total > 10'000'000) throw DomainError("grid_search: grid too large");
    }

    Trace trace = make_trace(problem, optimizer_id, seed);
    BudgetCounter counter(static_cast<int>(total));

    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    VectorXd unit(d);
    for (long long k = 0; k < total; ++k) {
        for (int j = 0; j < d; ++j)
            unit[j] = static_cast<double>(idx[static_cast<std::size_t>(j)]) / (levels - 1);
        trace.evaluations.push_back(
            evaluate(problem, denormalize(problem.domain, unit), counter));
        // lexicographic order: last coordinate varies fastest
        for (int j = d - 1; j >= 0; --j) {
            if (++idx[static_cast<std::size_t>(j)] < levels) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }
    return trace;
}

Trace pattern_search(const Problem& problem, int budget, std::uint64_t seed,
                     const MatrixXd& shared_initial, const std::string& optimizer_id,
                     std::vector<PatternRound>* rounds) {
    const int d = problem.domain.dim();
    if (budget < 1) throw DomainError("pattern_search: budget must be positive");

    Rng rng(seed);
    const MatrixXd init = initial_or_default(shared_initial, d, rng);

    Trace trace = make_trace(problem, optimizer_id, seed);
    BudgetCounter counter(budget);

    VectorXd center;
    double f_center = std::numeric_limits<double>::infinity();
    auto consider = [&](const Evaluation& ev) {
        if (!ev.crashed && *ev.objective < f_center) {
            f_center = *ev.objective;
            center = normalize(problem.domain, ev.theta);
            return true;
        }
        return false;
    };

    for (int i = 0; i < init.rows() && !counter.exhausted(); ++i) {
        const VectorXd theta = denormalize(problem.domain, init.row(i).transpose());
        trace.evaluations.push_back(evaluate(problem, theta, counter));
        consider(trace.evaluations.back());
    }
    // Random restarts when no initial point succeeded.
    while (center.size() == 0 && !counter.exhausted()) {
        const VectorXd theta = denormalize(problem.domain, random_unit_point(d, rng));
        trace.evaluations.push_back(evaluate(problem, theta, counter));
        consider(trace.evaluations.back());
    }
    if (center.size() == 0) return trace;  // budget spent without a feasible point

    double mesh = 0.25;
    while (!counter.exhausted()) {
        if (mesh < 1e-15) mesh = 0.25;  // mesh collapsed to rounding noise; re-widen
        const double mesh_at_start = mesh;
        bool improved = false;
        for (int i = 0; i < d && !counter.exhausted() && !improved; ++i) {
            for (double sign : {+1.0, -1.0}) {
                if (counter.exhausted()) break;
                VectorXd cand = center;
                cand[i] = std::clamp(center[i] + sign * mesh, 0.0, 1.0);
                if (cand[i] == center[i]) continue;  // projection collapsed onto the incumbent
                const VectorXd theta = denormalize(problem.domain, cand);
                trace.evaluations.push_back(evaluate(problem, theta, counter));
                if (consider(trace.evaluations.back())) {
                    improved = true;
                    break;
                }
            }
        }
        if (improved)
            mesh *= 2.0;
        else
            mesh *= 0.5;
        if (rounds) rounds->push_back({mesh_at_start, improved});
    }
    return trace;
}

}  // namespace ccbo::baselines
