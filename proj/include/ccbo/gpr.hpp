#pragma once
// Gaussian-process regression surrogate: ARD kernels, constant/quadratic
// prior means, hyperprior-regularized MAP hyperparameter fitting, and
// posterior prediction.

#include "ccbo/core.hpp"
#include "ccbo/rng.hpp"

#include <Eigen/Cholesky>

namespace ccbo::gp {

enum class KernelKind { SquaredExponential, Matern52 };
enum class MeanKind { Constant, Quadratic };
enum class PriorKind { SmoothBox, Gamma };

// Diagonal regularization noise (standard deviation); fixed, never optimized:
// every objective handled here is deterministic, so this acts purely as a
// numerical floor.
inline constexpr double kJitterSd = 4.5400e-05;

struct KernelSpec {
    KernelKind kind = KernelKind::SquaredExponential;
    VectorXd length_scales;  // one per input dimension (ARD), all > 0
    double signal_variance = 1.0;
};

// Covariance between two points. k(x, x) == signal_variance for both kinds.
double kernel_eval(const KernelSpec& spec, const VectorXd& a, const VectorXd& b);

struct MeanSpec {
    MeanKind kind = MeanKind::Constant;
    // Constant: [c]. Quadratic (axis-aligned): [c, a_1..a_d, b_1..b_d]
    // evaluating to c + sum_i a_i x_i + sum_i b_i x_i^2.
    VectorXd coefficients = VectorXd::Zero(1);
};

double mean_eval(const MeanSpec& spec, const VectorXd& x);

// Number of coefficients a mean of the given kind takes in dimension d.
int mean_coefficient_count(MeanKind kind, int d);

// Regularizer on kernel length scales, expressed per dimension.
struct HyperpriorSpec {
    PriorKind kind = PriorKind::SmoothBox;
    // SmoothBox: flat on [log_lo, log_hi] in log-length-scale with logistic
    // edge smoothing of the given width.
    double log_lo = 0.0;
    double log_hi = 0.0;
    double edge_width = 0.1;
    // Gamma(shape, scale) density on the length scale itself.
    double gamma_shape = 2.0;
    double gamma_scale = 0.5;

    static HyperpriorSpec smooth_box();
    static HyperpriorSpec gamma_prior();
    static HyperpriorSpec make(PriorKind kind);

    // Log density (up to a constant) and its derivative w.r.t. log length
    // scale, evaluated at one dimension's log length scale.
    double log_density(double log_ls) const;
    double dlog_density(double log_ls) const;
    // Random draw of a log length scale from the prior.
    double sample_log_ls(Rng& rng) const;
};

struct GpConfig {
    KernelKind kernel = KernelKind::SquaredExponential;
    MeanKind mean = MeanKind::Constant;
    PriorKind prior = PriorKind::SmoothBox;
};

// Budget of the MAP search: random hyperprior draws scored by posterior
// value, the best `refine_top` of which are polished by gradient ascent
// with backtracking line search.
struct FitSettings {
    int random_draws = 50;
    int refine_top = 50;  // >= random_draws means "refine every draw"
    int max_refine_iters = 100;
    double grad_tol = 1e-5;
    double step_tol = 1e-10;

    static FitSettings reference() { return FitSettings{}; }
    // Cheaper preset used by the benchmark harness; see README. Refining only
    // the best draws with a looser ascent tolerance costs a little posterior
    // quality and buys roughly an order of magnitude in wall time.
    static FitSettings fast() {
        FitSettings s;
        s.random_draws = 24;
        s.refine_top = 2;
        s.max_refine_iters = 20;
        s.grad_tol = 1e-3;
        return s;
    }
};

// Robust output standardization: shift = median, scale from the
// interquartile range (falling back to the standard deviation, then 1).
struct Standardization {
    double shift = 0.0;
    double scale = 1.0;
};
Standardization robust_standardization(const VectorXd& y);

struct GpModel {
    KernelSpec kernel;
    MeanSpec mean;
    double jitter_sd = kJitterSd;
    MatrixXd X;      // n x d training inputs (normalized to the unit cube)
    VectorXd y_std;  // standardized training targets
    double shift = 0.0;
    double scale = 1.0;
    // Cached factorization of K + jitter^2 I and the weight vector
    // alpha = (K + jitter^2 I)^{-1} (y_std - m(X)).
    Eigen::LLT<MatrixXd> chol;
    VectorXd alpha;
    double jitter_var_used = 0.0;  // actual diagonal term after any retry

    int n() const { return static_cast<int>(X.rows()); }
    int input_dim() const { return static_cast<int>(X.cols()); }
    VectorXd training_targets_raw() const { return (y_std.array() * scale + shift).matrix(); }
    double best_training_target_raw() const;
};

struct Prediction {
    double mu = 0.0;
    double sigma = 0.0;
};

struct LogPosterior {
    double value = 0.0;
    VectorXd grad;  // w.r.t. [log l_1..d, log sigma_f^2, mean coefficients]
};

// Hyperparameter vector layout used by the optimizer and the gradient:
// [log l_1, ..., log l_d, log sigma_f^2, mean coefficients...].
VectorXd pack_hyper(const KernelSpec& kernel, const MeanSpec& mean);
void unpack_hyper(const VectorXd& h, int d, KernelKind kkind, MeanKind mkind,
                  KernelSpec* kernel, MeanSpec* mean);

// Log marginal likelihood of (X, y) under the kernel + jitter and mean,
// plus the hyperprior log density of the length scales. Gradient computed
// analytically when requested.
LogPosterior log_posterior(const KernelSpec& kernel, const MeanSpec& mean,
                           const HyperpriorSpec& prior, const MatrixXd& X,
                           const VectorXd& y, bool want_grad = true);

// Builds a model (factorization + weights) from explicit hyperparameters.
// Factorization failure is retried once with 10x jitter, then raises
// NumericalError. `y_std` must already be standardized with (shift, scale).
GpModel assemble_model(KernelSpec kernel, MeanSpec mean, MatrixXd X, VectorXd y_std,
                       double shift, double scale);

// MAP fit on raw-unit targets. n = 0 yields a prior-only model.
GpModel fit(const MatrixXd& X, const VectorXd& y_raw, const GpConfig& config, Rng& rng,
            const FitSettings& settings = FitSettings());

// Posterior at a single point, in raw output units. With training data the
// variance is the latent posterior variance (no jitter added back); with no
// data it is the prior variance signal_variance + jitter^2.
Prediction predict(const GpModel& model, const VectorXd& x);

// Batched posterior over the rows of Xq (m x d); identical quantities to
// predict(), vectorized for acquisition screening.
void predict_many(const GpModel& model, const MatrixXd& Xq, VectorXd* mu, VectorXd* sigma);

}  // namespace ccbo::gp
