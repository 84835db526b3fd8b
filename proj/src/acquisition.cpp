#include "ccbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ccbo::acq {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

// Asymptotic series for the left tail: Phi(z) ~ phi(z)/(-z) * S(z).
double tail_series(double z) {
    const double z2 = z * z;
    return 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
}

int halton_prime(int i) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (i < 0 || i >= static_cast<int>(std::size(primes)))
        throw DomainError("halton basis exhausted: dimension too large");
    return primes[i];
}

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

MatrixXd halton_grid(int count, int dim) {
    MatrixXd pts(count, dim);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < dim; ++j)
            pts(i, j) = radical_inverse(static_cast<std::uint64_t>(i) + 1, halton_prime(j));
    return pts;
}

}  // namespace

double norm_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double log_norm_cdf(double z) {
    if (z > -30.0) return std::log(norm_cdf(z));
    return -0.5 * z * z - kLogSqrt2Pi - std::log(-z) + std::log(tail_series(z));
}

double pdf_over_cdf(double z) {
    if (z > -30.0) {
        const double c = norm_cdf(z);
        if (c <= 0.0) return -z;  // paranoid fallback, unreachable for z > -30
        return norm_pdf(z) / c;
    }
    return -z / tail_series(z);
}

double ei(double mu, double sigma, double j_best) {
    if (!(sigma > 0.0)) return std::max(j_best - mu, 0.0);
    const double z = (j_best - mu) / sigma;
    const double value = (j_best - mu) * norm_cdf(z) + sigma * norm_pdf(z);
    return std::max(value, 0.0);
}

double ucb(double mu, double sigma, double beta) { return mu - beta * sigma; }

double mes(double mu, double sigma, const std::vector<double>& min_samples) {
    if (!(sigma > 0.0) || min_samples.empty()) return 0.0;
    double acc = 0.0;
    for (double y_star : min_samples) {
        const double g = (mu - y_star) / sigma;
        acc += 0.5 * g * pdf_over_cdf(g) - log_norm_cdf(g);
    }
    return std::max(acc / static_cast<double>(min_samples.size()), 0.0);
}

namespace {

// Pr(min over the candidate set <= y) under independent Gaussian marginals.
double min_value_cdf(const VectorXd& mu, const VectorXd& sigma, double sigma_floor, double y) {
    double log_all_above = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
        if (sigma[i] <= sigma_floor) {
            if (mu[i] <= y) return 1.0;  // a deterministic value at or below y
            continue;
        }
        log_all_above += log_norm_cdf((mu[i] - y) / sigma[i]);
        if (log_all_above == -std::numeric_limits<double>::infinity()) return 1.0;
    }
    return -std::expm1(log_all_above);
}

double min_value_quantile(const VectorXd& mu, const VectorXd& sigma, double sigma_floor,
                          double lo, double hi, double q) {
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (min_value_cdf(mu, sigma, sigma_floor, mid) < q)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> sample_min_values(const gp::GpModel& model, int count, Rng& rng) {
    if (model.n() < 1) throw NumericalError("sample_min_values: model has no data");
    const int d = model.input_dim();

    MatrixXd cand(1000 + model.n(), d);
    cand.topRows(1000) = halton_grid(1000, d);
    cand.bottomRows(model.n()) = model.X;

    VectorXd mu, sigma;
    gp::predict_many(model, cand, &mu, &sigma);
    const double best_mu = mu.minCoeff();
    const double scale_unit = std::max(std::abs(model.scale), 1e-12);
    const double sigma_floor = 1e-12 * scale_unit;

    auto fallback = [&] {
        std::vector<double> out(static_cast<std::size_t>(count));
        const double best_obs = model.best_training_target_raw();
        for (int k = 0; k < count; ++k)
            out[static_cast<std::size_t>(k)] = best_obs - (k + 1) * 0.01 * scale_unit;
        return out;
    };

    if (sigma.maxCoeff() <= sigma_floor) return fallback();

    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < mu.size(); ++i) lo = std::min(lo, mu[i] - 8.0 * sigma[i]);
    const double hi = best_mu + 8.0 * sigma.maxCoeff();

    const double y25 = min_value_quantile(mu, sigma, sigma_floor, lo, hi, 0.25);
    const double y50 = min_value_quantile(mu, sigma, sigma_floor, lo, hi, 0.50);
    const double y75 = min_value_quantile(mu, sigma, sigma_floor, lo, hi, 0.75);

    // Gumbel (minimum form) by percentile matching.
    const double b = (y75 - y25) / (std::log(std::log(4.0)) - std::log(std::log(4.0 / 3.0)));
    if (!(b > 0.0) || !std::isfinite(b)) return fallback();
    const double a = y50 - b * std::log(std::log(2.0));

    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double u = std::clamp(rng.uniform(), 1e-12, 1.0 - 1e-12);
        const double y = a + b * std::log(-std::log1p(-u));
        out[static_cast<std::size_t>(k)] = std::min(y, best_mu);
    }
    return out;
}

namespace {

VectorXd clamp_unit(VectorXd x) {
    for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
    return x;
}

}  // namespace

VectorXd maximize_acquisition(const gp::GpModel& model, const AcquisitionSpec& spec, int dim,
                              Rng& rng, const MaximizeSettings& settings) {
    std::vector<double> min_samples;
    double j_best = 0.0;
    if (spec.kind == Kind::MES)
        min_samples = sample_min_values(model, spec.mes_samples, rng);
    else if (spec.kind == Kind::EI)
        j_best = model.best_training_target_raw();

    auto utility_scalar = [&](const VectorXd& x) {
        const gp::Prediction p = gp::predict(model, x);
        switch (spec.kind) {
            case Kind::EI: return ei(p.mu, p.sigma, j_best);
            case Kind::UCB: return -ucb(p.mu, p.sigma, spec.beta);
            case Kind::MES: return mes(p.mu, p.sigma, min_samples);
        }
        return 0.0;
    };

    const int m = settings.candidates_per_dim * dim;
    MatrixXd cand(m, dim);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < dim; ++j) cand(i, j) = rng.uniform();

    VectorXd mu, sigma;
    gp::predict_many(model, cand, &mu, &sigma);
    VectorXd util(m);
    for (int i = 0; i < m; ++i) {
        switch (spec.kind) {
            case Kind::EI: util[i] = ei(mu[i], sigma[i], j_best); break;
            case Kind::UCB: util[i] = -ucb(mu[i], sigma[i], spec.beta); break;
            case Kind::MES: util[i] = mes(mu[i], sigma[i], min_samples); break;
        }
    }

    const double u_max = util.maxCoeff();
    const double u_min = util.minCoeff();
    if (!(u_max - u_min > 1e-15 * std::max(1.0, std::abs(u_max)))) {
        // Fully flat utility: nothing to exploit, explore uniformly at random.
        VectorXd x(dim);
        for (int j = 0; j < dim; ++j) x[j] = rng.uniform();
        return x;
    }

    const int n_top = std::min(settings.refine_top, m);
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + n_top, order.end(),
                      [&](int a, int b) { return util[a] > util[b]; });

    VectorXd best_x = cand.row(order[0]);
    double best_u = utility_scalar(best_x);

    for (int t = 0; t < n_top; ++t) {
        VectorXd x = cand.row(order[t]);
        double u = utility_scalar(x);
        double step0 = 0.1;
        for (int iter = 0; iter < settings.max_refine_iters; ++iter) {
            VectorXd g(dim);
            for (int j = 0; j < dim; ++j) {
                VectorXd xp = x, xm = x;
                xp[j] = std::min(1.0, x[j] + settings.fd_step);
                xm[j] = std::max(0.0, x[j] - settings.fd_step);
                const double denom = xp[j] - xm[j];
                g[j] = denom > 0.0 ? (utility_scalar(xp) - utility_scalar(xm)) / denom : 0.0;
            }
            const double g2 = g.squaredNorm();
            if (!(g2 > 0.0)) break;

            double step = step0;
            bool accepted = false;
            for (int trial = 0; trial < 20; ++trial) {
                const VectorXd x2 = clamp_unit(x + step * g);
                const double u2 = utility_scalar(x2);
                if (u2 > u + 1e-4 * step * g2) {
                    const double move = (x2 - x).lpNorm<Eigen::Infinity>();
                    x = x2;
                    u = u2;
                    accepted = true;
                    if (move < 1e-10) iter = settings.max_refine_iters;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            step0 = std::min(2.0 * step, 0.5);
        }
        if (u > best_u) {
            best_u = u;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace ccbo::acq
