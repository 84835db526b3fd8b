#include "ccbo/gpr.hpp"

#include "ccbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ccbo::gp {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
const double kSqrt5 = std::sqrt(5.0);

// Stable log of the logistic function.
double log_logistic(double z) {
    if (z > 0.0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Squared scaled distance sum_i ((a_i - b_i) / l_i)^2.
double scaled_sqdist(const KernelSpec& spec, const VectorXd& a, const VectorXd& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const double d = (a[i] - b[i]) / spec.length_scales[i];
        s += d * d;
    }
    return s;
}

// Allocation-free variants for the hot loops: same arithmetic, same order,
// but indexing matrix rows in place instead of materializing them.
double scaled_sqdist_rows(const KernelSpec& spec, const MatrixXd& X, int i, int j) {
    double s = 0.0;
    for (int c = 0; c < X.cols(); ++c) {
        const double d = (X(i, c) - X(j, c)) / spec.length_scales[c];
        s += d * d;
    }
    return s;
}

double scaled_sqdist_row_vec(const KernelSpec& spec, const MatrixXd& X, int i, const VectorXd& x) {
    double s = 0.0;
    for (int c = 0; c < X.cols(); ++c) {
        const double d = (X(i, c) - x[c]) / spec.length_scales[c];
        s += d * d;
    }
    return s;
}

double kernel_from_sqdist(const KernelSpec& spec, double d2) {
    if (spec.kind == KernelKind::SquaredExponential)
        return spec.signal_variance * std::exp(-0.5 * d2);
    const double r = std::sqrt(std::max(d2, 0.0));
    return spec.signal_variance * (1.0 + kSqrt5 * r + 5.0 / 3.0 * d2) * std::exp(-kSqrt5 * r);
}

// Symmetric kernel matrix of the training inputs, without jitter.
MatrixXd kernel_matrix(const KernelSpec& spec, const MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        K(i, i) = spec.signal_variance;
        for (int j = 0; j < i; ++j) {
            const double v = kernel_from_sqdist(spec, scaled_sqdist_rows(spec, X, i, j));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

// Basis matrix of the mean function: rows are [1], or [1, x, x^2].
MatrixXd mean_basis(MeanKind kind, const MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    if (kind == MeanKind::Constant) return MatrixXd::Ones(n, 1);
    MatrixXd H(n, 2 * d + 1);
    H.col(0).setOnes();
    H.block(0, 1, n, d) = X;
    H.block(0, 1 + d, n, d) = X.array().square().matrix();
    return H;
}

Eigen::LLT<MatrixXd> factorize(const MatrixXd& K_f, double jitter_var) {
    MatrixXd K = K_f;
    K.diagonal().array() += jitter_var;
    return Eigen::LLT<MatrixXd>(K);
}

struct DrawBox {
    VectorXd hyper;
    double value = -std::numeric_limits<double>::infinity();
};

}  // namespace

double kernel_eval(const KernelSpec& spec, const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size() || a.size() != spec.length_scales.size())
        throw DomainError("kernel_eval: dimension mismatch");
    if (!(spec.length_scales.array() > 0.0).all() || !(spec.signal_variance > 0.0))
        throw DomainError("kernel_eval: length scales and signal variance must be positive");
    return kernel_from_sqdist(spec, scaled_sqdist(spec, a, b));
}

double mean_eval(const MeanSpec& spec, const VectorXd& x) {
    if (spec.kind == MeanKind::Constant) return spec.coefficients[0];
    const int d = static_cast<int>(x.size());
    if (spec.coefficients.size() != 2 * d + 1)
        throw DomainError("mean_eval: quadratic mean needs 2d+1 coefficients");
    double v = spec.coefficients[0];
    for (int i = 0; i < d; ++i)
        v += spec.coefficients[1 + i] * x[i] + spec.coefficients[1 + d + i] * x[i] * x[i];
    return v;
}

int mean_coefficient_count(MeanKind kind, int d) {
    return kind == MeanKind::Constant ? 1 : 2 * d + 1;
}

HyperpriorSpec HyperpriorSpec::smooth_box() {
    HyperpriorSpec s;
    s.kind = PriorKind::SmoothBox;
    s.log_lo = std::log(0.01);
    s.log_hi = std::log(10.0);
    s.edge_width = 0.1;
    return s;
}

HyperpriorSpec HyperpriorSpec::gamma_prior() {
    HyperpriorSpec s;
    s.kind = PriorKind::Gamma;
    s.gamma_shape = 2.0;
    s.gamma_scale = 0.5;
    return s;
}

HyperpriorSpec HyperpriorSpec::make(PriorKind kind) {
    return kind == PriorKind::SmoothBox ? smooth_box() : gamma_prior();
}

double HyperpriorSpec::log_density(double t) const {
    if (kind == PriorKind::SmoothBox)
        return log_logistic((t - log_lo) / edge_width) + log_logistic((log_hi - t) / edge_width);
    // Gamma density on the length scale l = e^t (normalization constant dropped).
    return (gamma_shape - 1.0) * t - std::exp(t) / gamma_scale;
}

double HyperpriorSpec::dlog_density(double t) const {
    if (kind == PriorKind::SmoothBox)
        return (logistic(-(t - log_lo) / edge_width) - logistic(-(log_hi - t) / edge_width)) /
               edge_width;
    return (gamma_shape - 1.0) - std::exp(t) / gamma_scale;
}

double HyperpriorSpec::sample_log_ls(Rng& rng) const {
    if (kind == PriorKind::SmoothBox) return rng.uniform(log_lo, log_hi);
    // Erlang sampling; the shape is used as a positive integer.
    const long k = std::max(1L, std::lround(gamma_shape));
    double acc = 0.0;
    for (long i = 0; i < k; ++i) {
        double u;
        do {
            u = rng.uniform();
        } while (u <= 0.0);
        acc -= std::log(u);
    }
    return std::log(acc * gamma_scale);
}

Standardization robust_standardization(const VectorXd& y) {
    Standardization s;
    if (y.size() == 0) return s;
    std::vector<double> v(y.data(), y.data() + y.size());
    s.shift = metrics::median(v);
    const double iqr = metrics::quantile(v, 0.75) - metrics::quantile(v, 0.25);
    s.scale = iqr / 1.349;
    if (!(s.scale > 1e-12)) {
        const double mean = y.mean();
        s.scale = std::sqrt((y.array() - mean).square().sum() /
                            std::max<double>(1.0, static_cast<double>(y.size() - 1)));
    }
    if (!(s.scale > 1e-12)) s.scale = 1.0;
    return s;
}

double GpModel::best_training_target_raw() const {
    if (n() == 0) throw NumericalError("best_training_target_raw: empty model");
    return y_std.minCoeff() * scale + shift;
}

VectorXd pack_hyper(const KernelSpec& kernel, const MeanSpec& mean) {
    const int d = static_cast<int>(kernel.length_scales.size());
    VectorXd h(d + 1 + mean.coefficients.size());
    for (int i = 0; i < d; ++i) h[i] = std::log(kernel.length_scales[i]);
    h[d] = std::log(kernel.signal_variance);
    h.tail(mean.coefficients.size()) = mean.coefficients;
    return h;
}

void unpack_hyper(const VectorXd& h, int d, KernelKind kkind, MeanKind mkind, KernelSpec* kernel,
                  MeanSpec* mean) {
    kernel->kind = kkind;
    kernel->length_scales = h.head(d).array().exp().matrix();
    kernel->signal_variance = std::exp(h[d]);
    mean->kind = mkind;
    mean->coefficients = h.tail(h.size() - d - 1);
}

LogPosterior log_posterior(const KernelSpec& kernel, const MeanSpec& mean,
                           const HyperpriorSpec& prior, const MatrixXd& X, const VectorXd& y,
                           bool want_grad) {
    const int n = static_cast<int>(X.rows());
    const int d = static_cast<int>(X.cols());
    if (n < 1) throw DomainError("log_posterior: needs at least one data point");
    if (y.size() != n) throw DomainError("log_posterior: X/y size mismatch");

    const MatrixXd K_f = kernel_matrix(kernel, X);
    const double jitter_var = kJitterSd * kJitterSd;
    Eigen::LLT<MatrixXd> llt = factorize(K_f, jitter_var);
    if (llt.info() != Eigen::Success)
        throw NumericalError("log_posterior: covariance factorization failed");

    const MatrixXd H = mean_basis(mean.kind, X);
    const VectorXd r = y - H * mean.coefficients;
    const VectorXd alpha = llt.solve(r);

    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(llt.matrixLLT()(i, i));

    LogPosterior out;
    out.value = -0.5 * r.dot(alpha) - log_det - 0.5 * n * kLog2Pi;
    for (int i = 0; i < d; ++i) out.value += prior.log_density(std::log(kernel.length_scales[i]));

    if (!want_grad) return out;

    const int p = static_cast<int>(mean.coefficients.size());
    out.grad = VectorXd::Zero(d + 1 + p);

    // A = alpha*alpha^T - K^{-1}; each kernel-hyperparameter gradient is
    // 0.5 * sum(A .* dK). K^{-1} = L^{-T} L^{-1} via one triangular solve and
    // a symmetric rank update, which is cheaper than a dense two-sided solve.
    MatrixXd Linv = MatrixXd::Identity(n, n);
    llt.matrixL().solveInPlace(Linv);
    MatrixXd A = MatrixXd::Zero(n, n);
    A.selfadjointView<Eigen::Lower>().rankUpdate(Linv.transpose(), -1.0);
    A.triangularView<Eigen::StrictlyUpper>() = A.transpose().triangularView<Eigen::StrictlyUpper>();
    A.noalias() += alpha * alpha.transpose();

    // Per-pair elementwise factor of dK/dlog l_i, shared across dimensions.
    MatrixXd P;
    if (kernel.kind == KernelKind::SquaredExponential) {
        P = K_f;
    } else {
        // For Matern 5/2: dk/dlog l_i = (5/3) sigma_f^2 (1 + sqrt5 r) e^{-sqrt5 r} * dist_i,
        // with dist_i = (dx_i / l_i)^2.
        P.resize(n, n);
        for (int i = 0; i < n; ++i) {
            P(i, i) = 5.0 / 3.0 * kernel.signal_variance;
            for (int j = 0; j < i; ++j) {
                const double r2 = scaled_sqdist_rows(kernel, X, i, j);
                const double rr = std::sqrt(std::max(r2, 0.0));
                const double v = 5.0 / 3.0 * kernel.signal_variance * (1.0 + kSqrt5 * rr) *
                                 std::exp(-kSqrt5 * rr);
                P(i, j) = v;
                P(j, i) = v;
            }
        }
    }

    for (int dim = 0; dim < d; ++dim) {
        const double ls2 = kernel.length_scales[dim] * kernel.length_scales[dim];
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double dx = X(i, dim) - X(j, dim);
                acc += A(i, j) * P(i, j) * (dx * dx / ls2);
            }
        out.grad[dim] = 0.5 * acc + prior.dlog_density(std::log(kernel.length_scales[dim]));
    }
    out.grad[d] = 0.5 * (A.cwiseProduct(K_f)).sum();
    out.grad.tail(p) = H.transpose() * alpha;
    return out;
}

GpModel assemble_model(KernelSpec kernel, MeanSpec mean, MatrixXd X, VectorXd y_std, double shift,
                       double scale) {
    GpModel m;
    m.kernel = std::move(kernel);
    m.mean = std::move(mean);
    m.X = std::move(X);
    m.y_std = std::move(y_std);
    m.shift = shift;
    m.scale = scale;

    const int n = m.n();
    if (n == 0) {
        m.jitter_var_used = kJitterSd * kJitterSd;
        return m;
    }
    const MatrixXd K_f = kernel_matrix(m.kernel, m.X);
    double jitter_sd = kJitterSd;
    m.chol = factorize(K_f, jitter_sd * jitter_sd);
    if (m.chol.info() != Eigen::Success) {
        jitter_sd *= 10.0;  // single retry with a larger floor
        m.chol = factorize(K_f, jitter_sd * jitter_sd);
        if (m.chol.info() != Eigen::Success)
            throw NumericalError("assemble_model: covariance factorization failed despite jitter");
    }
    m.jitter_var_used = jitter_sd * jitter_sd;
    const MatrixXd H = mean_basis(m.mean.kind, m.X);
    m.alpha = m.chol.solve(m.y_std - H * m.mean.coefficients);
    return m;
}

namespace {

// Keeps the search inside a numerically safe region.
void clamp_hyper(VectorXd& h, int d) {
    for (int i = 0; i < d; ++i) h[i] = std::clamp(h[i], std::log(1e-4), std::log(1e4));
    h[d] = std::clamp(h[d], -20.0, 20.0);
    for (int i = d + 1; i < h.size(); ++i) h[i] = std::clamp(h[i], -1e6, 1e6);
}

double posterior_value(const VectorXd& h, int d, const GpConfig& config,
                       const HyperpriorSpec& prior, const MatrixXd& X, const VectorXd& y) {
    KernelSpec k;
    MeanSpec m;
    unpack_hyper(h, d, config.kernel, config.mean, &k, &m);
    try {
        return log_posterior(k, m, prior, X, y, false).value;
    } catch (const NumericalError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

// Gradient-ascent refinement with Armijo backtracking. Returns the refined
// hyperparameters and their posterior value.
DrawBox refine(VectorXd h, double value, int d, const GpConfig& config,
               const HyperpriorSpec& prior, const MatrixXd& X, const VectorXd& y,
               const FitSettings& settings) {
    double step0 = 1.0;
    for (int iter = 0; iter < settings.max_refine_iters; ++iter) {
        KernelSpec k;
        MeanSpec m;
        unpack_hyper(h, d, config.kernel, config.mean, &k, &m);
        VectorXd g;
        try {
            g = log_posterior(k, m, prior, X, y, true).grad;
        } catch (const NumericalError&) {
            break;
        }
        if (g.lpNorm<Eigen::Infinity>() < settings.grad_tol) break;

        double t = step0;
        bool accepted = false;
        const double g2 = g.squaredNorm();
        for (int trial = 0; trial < 24; ++trial) {
            VectorXd h2 = h + t * g;
            clamp_hyper(h2, d);
            const double v2 = posterior_value(h2, d, config, prior, X, y);
            if (v2 > value + 1e-4 * t * g2) {
                const double move = (h2 - h).lpNorm<Eigen::Infinity>();
                h = std::move(h2);
                value = v2;
                accepted = true;
                if (move < settings.step_tol) iter = settings.max_refine_iters;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        step0 = std::min(2.0 * t, 4.0);
    }
    return DrawBox{std::move(h), value};
}

}  // namespace

GpModel fit(const MatrixXd& X, const VectorXd& y_raw, const GpConfig& config, Rng& rng,
            const FitSettings& settings) {
    const int d = static_cast<int>(X.cols());
    const int n = static_cast<int>(X.rows());
    const HyperpriorSpec prior = HyperpriorSpec::make(config.prior);

    if (n == 0) {
        // Prior-only model: representative length scales, unit signal variance.
        KernelSpec k;
        k.kind = config.kernel;
        const double ls = config.prior == PriorKind::SmoothBox
                              ? std::exp(0.5 * (prior.log_lo + prior.log_hi))
                              : std::max(0.05, (prior.gamma_shape - 1.0) * prior.gamma_scale);
        k.length_scales = VectorXd::Constant(std::max(d, 1), ls);
        k.signal_variance = 1.0;
        MeanSpec m;
        m.kind = config.mean;
        m.coefficients = VectorXd::Zero(mean_coefficient_count(config.mean, std::max(d, 1)));
        return assemble_model(std::move(k), std::move(m), MatrixXd(0, std::max(d, 1)),
                              VectorXd(0), 0.0, 1.0);
    }

    const Standardization st = robust_standardization(y_raw);
    const VectorXd y = ((y_raw.array() - st.shift) / st.scale).matrix();
    const int p = mean_coefficient_count(config.mean, d);

    std::vector<DrawBox> draws;
    draws.reserve(settings.random_draws);
    for (int k = 0; k < settings.random_draws; ++k) {
        VectorXd h(d + 1 + p);
        for (int i = 0; i < d; ++i) h[i] = prior.sample_log_ls(rng);
        h[d] = rng.uniform(std::log(0.25), std::log(4.0));
        h[d + 1] = rng.uniform(-0.5, 0.5);       // constant coefficient
        for (int i = d + 2; i < h.size(); ++i) h[i] = rng.uniform(-1.0, 1.0);
        DrawBox box;
        box.value = posterior_value(h, d, config, prior, X, y);
        box.hyper = std::move(h);
        draws.push_back(std::move(box));
    }

    const int n_refine = std::min<int>(settings.refine_top, static_cast<int>(draws.size()));
    std::partial_sort(draws.begin(), draws.begin() + n_refine, draws.end(),
                      [](const DrawBox& a, const DrawBox& b) { return a.value > b.value; });

    DrawBox best;
    for (int i = 0; i < n_refine; ++i) {
        if (!std::isfinite(draws[i].value)) continue;
        DrawBox refined =
            refine(draws[i].hyper, draws[i].value, d, config, prior, X, y, settings);
        if (refined.value > best.value) best = std::move(refined);
    }
    if (!std::isfinite(best.value)) {
        // Every draw failed to factorize; fall back to a benign default.
        best.hyper = VectorXd::Zero(d + 1 + p);
        for (int i = 0; i < d; ++i) best.hyper[i] = std::log(0.3);
    }

    KernelSpec kernel;
    MeanSpec mean;
    unpack_hyper(best.hyper, d, config.kernel, config.mean, &kernel, &mean);
    return assemble_model(std::move(kernel), std::move(mean), X, y, st.shift, st.scale);
}

Prediction predict(const GpModel& model, const VectorXd& x) {
    if (x.size() != model.input_dim() && model.n() > 0)
        throw DomainError("predict: dimension mismatch");

    if (model.n() == 0) {
        Prediction p;
        p.mu = model.shift + model.scale * mean_eval(model.mean, x);
        p.sigma = model.scale *
                  std::sqrt(model.kernel.signal_variance + model.jitter_var_used);
        return p;
    }

    const int n = model.n();
    VectorXd k(n);
    for (int i = 0; i < n; ++i)
        k[i] = kernel_from_sqdist(model.kernel, scaled_sqdist_row_vec(model.kernel, model.X, i, x));

    const double mu_std = mean_eval(model.mean, x) + k.dot(model.alpha);
    const VectorXd v = model.chol.matrixL().solve(k);
    const double var = std::max(0.0, model.kernel.signal_variance - v.squaredNorm());

    Prediction p;
    p.mu = model.shift + model.scale * mu_std;
    p.sigma = model.scale * std::sqrt(var);
    return p;
}

void predict_many(const GpModel& model, const MatrixXd& Xq, VectorXd* mu, VectorXd* sigma) {
    const int m = static_cast<int>(Xq.rows());
    mu->resize(m);
    sigma->resize(m);
    if (model.n() == 0) {
        for (int j = 0; j < m; ++j) {
            const Prediction p = predict(model, Xq.row(j));
            (*mu)[j] = p.mu;
            (*sigma)[j] = p.sigma;
        }
        return;
    }

    const VectorXd inv_ls = model.kernel.length_scales.cwiseInverse();
    const MatrixXd Xs = model.X * inv_ls.asDiagonal();
    const MatrixXd Qs = Xq * inv_ls.asDiagonal();
    const VectorXd xn = Xs.rowwise().squaredNorm();
    const VectorXd qn = Qs.rowwise().squaredNorm();
    MatrixXd D = (-2.0 * (Xs * Qs.transpose())).colwise() + xn;  // n x m
    D.rowwise() += qn.transpose();
    D = D.cwiseMax(0.0);

    MatrixXd K;  // cross-covariance, n x m
    const double sf2 = model.kernel.signal_variance;
    if (model.kernel.kind == KernelKind::SquaredExponential) {
        K = sf2 * (-0.5 * D).array().exp();
    } else {
        const MatrixXd R = D.cwiseSqrt();
        K = sf2 * ((1.0 + kSqrt5 * R.array() + 5.0 / 3.0 * D.array()) *
                   (-kSqrt5 * R.array()).exp());
    }

    VectorXd mu_std = K.transpose() * model.alpha;
    for (int j = 0; j < m; ++j) mu_std[j] += mean_eval(model.mean, Xq.row(j));

    const MatrixXd V = model.chol.matrixL().solve(K);
    const VectorXd var =
        (sf2 - V.colwise().squaredNorm().transpose().array()).max(0.0).matrix();

    *mu = (mu_std.array() * model.scale + model.shift).matrix();
    *sigma = (var.array().sqrt() * model.scale).matrix();
}

}  // namespace ccbo::gp
