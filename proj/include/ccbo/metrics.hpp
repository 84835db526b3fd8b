#pragma once
// Benchmark statistics: linear-interpolation quantiles, tie-aware ranking,
// scaled regret, and the one-sided Wilcoxon rank-sum test.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace ccbo::metrics {

// Linear interpolation between order statistics: with n sorted values and
// h = (n-1)q, returns v[floor(h)] + (h - floor(h)) * (v[floor(h)+1] - v[floor(h)]).
// q = 0.5 is the median. Throws std::invalid_argument on empty input.
double quantile(std::vector<double> values, double q);

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

// Ascending ranks starting at 1; tied values receive the mean of the rank
// span they cover (values 1,1,2 -> ranks 1.5, 1.5, 3).
std::vector<double> rank_with_ties(const std::vector<double>& values);

// Per-cell values[problem][optimizer][seed] -> per-optimizer average rank:
// rank within each (problem, seed) cell, average over seeds, then over
// problems. Missing cells raise std::invalid_argument listing them.
// Optimizer order of the result follows `optimizers`.
std::vector<double> average_rank(
    const std::vector<std::string>& problems, const std::vector<std::string>& optimizers,
    const std::map<std::string, std::map<std::string, std::vector<double>>>& values);

// Denominator of the scaled regret: median over seeds of
// (random-search best-so-far at evaluation k) - known_best. Throws
// NumericalError (via std::runtime_error) if the median regret is zero.
double scaled_regret_denominator(const std::vector<double>& rand_best_at_k, double known_best);

inline double scaled_regret(double best_so_far, double known_best, double denominator) {
    return (best_so_far - known_best) / denominator;
}

// One-sided Wilcoxon rank-sum p-value for H1: "a is stochastically smaller
// than b". Exact enumeration when |a| + |b| <= 16 and there are no ties;
// otherwise a normal approximation with tie and continuity corrections.
// All values identical across both samples yields p = 0.5.
double wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b);

// The two branches, exposed for cross-validation. The exact branch requires
// tie-free inputs.
double wilcoxon_exact(const std::vector<double>& a, const std::vector<double>& b);
double wilcoxon_normal_approx(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ccbo::metrics
