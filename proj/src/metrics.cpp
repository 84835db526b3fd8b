#include "ccbo/metrics.hpp"

#include "ccbo/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ccbo::metrics {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<double> rank_with_ties(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j share the mean of ranks i+1..j+1
        const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

std::vector<double> average_rank(
    const std::vector<std::string>& problems, const std::vector<std::string>& optimizers,
    const std::map<std::string, std::map<std::string, std::vector<double>>>& values) {
    const std::size_t m = optimizers.size();
    std::vector<double> per_problem_sum(m, 0.0);

    std::string missing;
    std::size_t seeds = 0;
    for (const auto& p : problems) {
        auto pit = values.find(p);
        for (const auto& o : optimizers) {
            if (pit == values.end() || pit->second.find(o) == pit->second.end()) {
                missing += " (" + p + ", " + o + ")";
            } else if (seeds == 0) {
                seeds = pit->second.at(o).size();
            } else if (pit->second.at(o).size() != seeds) {
                missing += " (" + p + ", " + o + ": seed count mismatch)";
            }
        }
    }
    if (!missing.empty())
        throw std::invalid_argument("average_rank: missing cells:" + missing);
    if (seeds == 0) throw std::invalid_argument("average_rank: no seeds");

    for (const auto& p : problems) {
        std::vector<double> seed_sum(m, 0.0);
        for (std::size_t s = 0; s < seeds; ++s) {
            std::vector<double> cell(m);
            for (std::size_t oi = 0; oi < m; ++oi) cell[oi] = values.at(p).at(optimizers[oi])[s];
            const std::vector<double> ranks = rank_with_ties(cell);
            for (std::size_t oi = 0; oi < m; ++oi) seed_sum[oi] += ranks[oi];
        }
        for (std::size_t oi = 0; oi < m; ++oi)
            per_problem_sum[oi] += seed_sum[oi] / static_cast<double>(seeds);
    }
    for (double& v : per_problem_sum) v /= static_cast<double>(problems.size());
    return per_problem_sum;
}

double scaled_regret_denominator(const std::vector<double>& rand_best_at_k, double known_best) {
    std::vector<double> regrets;
    regrets.reserve(rand_best_at_k.size());
    for (double b : rand_best_at_k) regrets.push_back(b - known_best);
    const double denom = median(std::move(regrets));
    if (!(denom > 0.0))
        throw NumericalError("scaled regret: degenerate problem, median random-search regret is not positive");
    return denom;
}

namespace {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double rank_sum_of_a(const std::vector<double>& a, const std::vector<double>& b,
                     std::vector<double>* combined_out) {
    std::vector<double> combined;
    combined.reserve(a.size() + b.size());
    combined.insert(combined.end(), a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    const std::vector<double> ranks = rank_with_ties(combined);
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w += ranks[i];
    if (combined_out) *combined_out = std::move(combined);
    return w;
}

bool has_ties(const std::vector<double>& combined) {
    std::set<double> uniq(combined.begin(), combined.end());
    return uniq.size() != combined.size();
}

}  // namespace

double wilcoxon_exact(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> combined;
    const double w_obs = rank_sum_of_a(a, b, &combined);
    if (has_ties(combined))
        throw std::invalid_argument("wilcoxon_exact: ties present, exact enumeration undefined");
    const int n = static_cast<int>(a.size());
    const int N = static_cast<int>(combined.size());
    const int w = static_cast<int>(std::llround(w_obs));

    // count[k][s]: number of k-subsets of ranks {1..r} with rank sum s,
    // built incrementally over r = 1..N.
    const int max_sum = N * (N + 1) / 2;
    std::vector<std::vector<double>> count(static_cast<std::size_t>(n) + 1,
                                           std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    count[0][0] = 1.0;
    for (int r = 1; r <= N; ++r)
        for (int k = std::min(r, n); k >= 1; --k)
            for (int s = max_sum; s >= r; --s)
                count[k][s] += count[k - 1][s - r];

    double favorable = 0.0;
    for (int s = 0; s <= std::min(w, max_sum); ++s) favorable += count[n][s];
    double total = 0.0;
    for (int s = 0; s <= max_sum; ++s) total += count[n][s];
    return favorable / total;
}

double wilcoxon_normal_approx(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> combined;
    const double w = rank_sum_of_a(a, b, &combined);
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    const double N = n + m;

    // tie correction: sum over tie groups of (t^3 - t)
    std::vector<double> sorted = combined;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }

    const double mean = n * (N + 1.0) / 2.0;
    const double var = n * m / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (var <= 0.0) return 0.5;  // every value identical: no evidence either way
    const double z = (w - mean + 0.5) / std::sqrt(var);
    return norm_cdf(z);
}

double wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 3 || b.size() < 3)
        throw std::invalid_argument("wilcoxon_one_sided: need at least 3 values per sample");
    std::vector<double> combined;
    rank_sum_of_a(a, b, &combined);
    const bool tied = has_ties(combined);
    if (!tied && combined.size() <= 16) return wilcoxon_exact(a, b);
    return wilcoxon_normal_approx(a, b);
}

}  // namespace ccbo::metrics
