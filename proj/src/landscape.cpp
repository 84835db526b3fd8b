#include "ccbo/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccbo::landscape {

std::pair<VectorXd, double> make_subspace(const Domain& domain, const VectorXd& theta_star,
                                          Rng& rng) {
    const int d = domain.dim();
    if (theta_star.size() != d) throw DomainError("make_subspace: dimension mismatch");
    for (int i = 0; i < d; ++i)
        if (!(theta_star[i] > domain.lower[i] && theta_star[i] < domain.upper[i]))
            throw DomainError(
                "make_subspace: reference optimum must lie strictly inside the box");

    VectorXd u(d);
    double norm = 0.0;
    do {
        for (int i = 0; i < d; ++i) u[i] = rng.gaussian();
        norm = u.norm();
    } while (!(norm > 1e-12));
    u /= norm;

    // Chord of the box along u through theta_star: intersect the per-axis
    // parameter intervals.
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
        if (u[i] == 0.0) continue;
        const double a = (domain.lower[i] - theta_star[i]) / u[i];
        const double b = (domain.upper[i] - theta_star[i]) / u[i];
        t_min = std::max(t_min, std::min(a, b));
        t_max = std::min(t_max, std::max(a, b));
    }
    if (!(t_max > t_min) || !std::isfinite(t_min) || !std::isfinite(t_max))
        throw NumericalError("make_subspace: degenerate chord");

    const VectorXd A = (t_max - t_min) * u;
    const double r0 = t_min / (t_max - t_min);
    return {A, r0};
}

bool path_clear(const std::vector<std::optional<double>>& values, int i, int i_star) {
    const int n = static_cast<int>(values.size());
    const int lo = std::min(i, i_star);
    const int hi = std::max(i, i_star);
    for (int j = lo + 1; j < hi; ++j) {
        if (!values[static_cast<std::size_t>(j)]) return false;  // crash barrier on the path
        if (j - 1 < 0 || j + 1 >= n) continue;
        const auto& left = values[static_cast<std::size_t>(j - 1)];
        const auto& right = values[static_cast<std::size_t>(j + 1)];
        if (left && right && *values[static_cast<std::size_t>(j)] > *left &&
            *values[static_cast<std::size_t>(j)] > *right)
            return false;  // strict discrete local maximum on the path
    }
    return true;
}

LandscapeReport analyze(const Problem& problem, const VectorXd& theta_star, int n_subspaces,
                        int n_points, std::uint64_t seed) {
    if (n_subspaces < 1 || n_points < 2) throw DomainError("analyze: degenerate sampling plan");
    Rng rng(seed);

    LandscapeReport report;
    report.subspaces.reserve(static_cast<std::size_t>(n_subspaces));
    BudgetCounter counter(n_subspaces * n_points);
    double wall_total = 0.0;

    for (int s = 0; s < n_subspaces; ++s) {
        SubspaceSample sub;
        std::tie(sub.A, sub.r0) = make_subspace(problem.domain, theta_star, rng);
        sub.r_grid.resize(static_cast<std::size_t>(n_points));
        sub.values.resize(static_cast<std::size_t>(n_points));
        const double r_star = -sub.r0;
        sub.i_star = static_cast<int>(std::lround(r_star * (n_points - 1)));
        sub.i_star = std::clamp(sub.i_star, 0, n_points - 1);

        for (int j = 0; j < n_points; ++j) {
            const double r = static_cast<double>(j) / (n_points - 1);
            sub.r_grid[static_cast<std::size_t>(j)] = r;
            VectorXd theta = theta_star + (r + sub.r0) * sub.A;
            for (int k = 0; k < theta.size(); ++k)
                theta[k] = std::clamp(theta[k], problem.domain.lower[k], problem.domain.upper[k]);
            const Evaluation ev = evaluate(problem, theta, counter);
            wall_total += ev.wall_time;
            if (ev.crashed) {
                ++report.n_crashed;
            } else {
                sub.values[static_cast<std::size_t>(j)] = *ev.objective;
                ++report.n_success;
            }
            ++report.n_total;
        }
        report.subspaces.push_back(std::move(sub));
    }

    for (const SubspaceSample& sub : report.subspaces)
        for (int j = 0; j < n_points; ++j)
            if (sub.values[static_cast<std::size_t>(j)] && path_clear(sub.values, j, sub.i_star))
                ++report.n_clear;

    report.p_crash = static_cast<double>(report.n_crashed) / report.n_total;
    report.s_opt =
        report.n_success > 0 ? static_cast<double>(report.n_clear) / report.n_success : 0.0;
    report.t_sim = wall_total / report.n_total;
    return report;
}

}  // namespace ccbo::landscape
