#include "ccbo/core.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace ccbo {

Domain::Domain(VectorXd lo, VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() < 1)
        throw DomainError("domain bounds must be nonempty and of equal dimension");
    for (int i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw DomainError("domain requires lower[i] < upper[i] in every coordinate");
}

bool Domain::contains(const VectorXd& theta, double tol) const {
    if (theta.size() != lower.size()) return false;
    for (int i = 0; i < theta.size(); ++i)
        if (theta[i] < lower[i] - tol || theta[i] > upper[i] + tol) return false;
    return true;
}

VectorXd normalize(const Domain& domain, const VectorXd& theta) {
    if (theta.size() != domain.lower.size())
        throw DomainError("normalize: dimension mismatch");
    if (!domain.contains(theta))
        throw DomainError("normalize: point outside the box");
    return (theta - domain.lower).cwiseQuotient(domain.upper - domain.lower);
}

VectorXd denormalize(const Domain& domain, const VectorXd& unit) {
    if (unit.size() != domain.lower.size())
        throw DomainError("denormalize: dimension mismatch");
    return domain.lower + unit.cwiseProduct(domain.upper - domain.lower);
}

void BudgetCounter::consume() {
    if (exhausted()) throw BudgetExhausted("evaluation budget exhausted");
    ++used_;
}

Evaluation evaluate(const Problem& problem, const VectorXd& theta, BudgetCounter& budget) {
    budget.consume();
    if (!problem.domain.contains(theta, 1e-12))
        throw DomainError("evaluate: point outside the box for problem " + problem.id);

    Evaluation ev;
    ev.theta = theta;
    const auto start = std::chrono::steady_clock::now();
    try {
        EvalResult r = problem.evaluator(theta);
        ev.objective = r.objective;
        ev.crashed = r.crashed;
        ev.fallback_objective = r.fallback_objective;
        if (!ev.crashed && (!ev.objective || !std::isfinite(*ev.objective))) {
            // A successful evaluation must carry a finite value; anything else
            // is recorded as a crash so downstream code sees a consistent record.
            ev.crashed = true;
            ev.objective.reset();
        }
        if (ev.crashed) ev.objective.reset();
    } catch (const std::exception&) {
        ev.crashed = true;
        ev.objective.reset();
    }
    const auto stop = std::chrono::steady_clock::now();
    ev.wall_time = std::chrono::duration<double>(stop - start).count();
    return ev;
}

std::optional<Incumbent> incumbent(const Trace& trace) {
    std::optional<Incumbent> best;
    for (std::size_t i = 0; i < trace.evaluations.size(); ++i) {
        const Evaluation& ev = trace.evaluations[i];
        if (ev.crashed || !ev.objective) continue;
        if (!best || *ev.objective < best->objective)
            best = Incumbent{i, ev.theta, *ev.objective};
    }
    return best;
}

std::vector<double> best_so_far(const Trace& trace) {
    std::vector<double> out;
    out.reserve(trace.evaluations.size());
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const Evaluation& ev : trace.evaluations) {
        if (!ev.crashed && ev.objective && (!(best == best) || *ev.objective < best))
            best = *ev.objective;
        out.push_back(best);
    }
    return out;
}

}  // namespace ccbo
