#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ccbo/gpr.hpp"
#include "ccbo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

using namespace ccbo;
using namespace ccbo::gp;

namespace {

VectorXd vec1(double a) {
    VectorXd v(1);
    v << a;
    return v;
}

KernelSpec se_kernel(VectorXd ls, double sf2 = 1.0) {
    KernelSpec k;
    k.kind = KernelKind::SquaredExponential;
    k.length_scales = std::move(ls);
    k.signal_variance = sf2;
    return k;
}

KernelSpec ma_kernel(VectorXd ls, double sf2 = 1.0) {
    KernelSpec k;
    k.kind = KernelKind::Matern52;
    k.length_scales = std::move(ls);
    k.signal_variance = sf2;
    return k;
}

MeanSpec const_mean(double c) {
    MeanSpec m;
    m.kind = MeanKind::Constant;
    m.coefficients = vec1(c);
    return m;
}

MatrixXd random_inputs(int n, int d, Rng& rng) {
    MatrixXd X(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.uniform();
    return X;
}

// Jittered-lattice inputs: pairwise separation keeps the Gram matrix well
// conditioned, so explicit-inverse and finite-difference oracles retain the
// accuracy the comparisons below demand. Clustered points push the condition
// number to ~1e9 (the jitter floor), where both oracles lose most digits.
MatrixXd separated_inputs(int n, int d, Rng& rng, int* per_axis_out) {
    const int per_axis = std::max(
        2, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 1.0 / d))));
    long long cells = 1;
    for (int j = 0; j < d; ++j) cells *= per_axis;
    std::vector<long long> ids(static_cast<std::size_t>(cells));
    for (long long c = 0; c < cells; ++c) ids[static_cast<std::size_t>(c)] = c;
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng.below(static_cast<std::uint64_t>(i))]);
    MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        long long c = ids[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) {
            X(i, j) = (static_cast<double>(c % per_axis) + 0.2 + 0.6 * rng.uniform()) / per_axis;
            c /= per_axis;
        }
    }
    if (per_axis_out != nullptr) *per_axis_out = per_axis;
    return X;
}

// Length scales between half a lattice cell and one and a half cells: wide
// enough for meaningful correlation, short enough for benign conditioning.
KernelSpec lattice_kernel(int d, int per_axis, Rng& rng, KernelKind kind) {
    KernelSpec k;
    k.kind = kind;
    k.length_scales.resize(d);
    for (int j = 0; j < d; ++j) k.length_scales[j] = rng.uniform(0.5, 1.5) / per_axis;
    k.signal_variance = rng.uniform(0.3, 2.5);
    return k;
}

KernelSpec random_kernel(int d, Rng& rng, KernelKind kind) {
    KernelSpec k;
    k.kind = kind;
    k.length_scales.resize(d);
    for (int j = 0; j < d; ++j) k.length_scales[j] = std::exp(rng.uniform(std::log(0.1), 0.0));
    k.signal_variance = rng.uniform(0.3, 2.5);
    return k;
}

}  // namespace

TEST_CASE("kernel at zero distance equals the signal variance") {
    Rng rng(3);
    for (KernelKind kind : {KernelKind::SquaredExponential, KernelKind::Matern52}) {
        const KernelSpec k = random_kernel(3, rng, kind);
        const VectorXd x = random_inputs(1, 3, rng).row(0).transpose();
        CHECK(kernel_eval(k, x, x) == doctest::Approx(k.signal_variance).epsilon(1e-14));
    }
}

TEST_CASE("squared-exponential kernel matches its closed form at unit distance") {
    const KernelSpec k = se_kernel(vec1(1.0));
    const double v = kernel_eval(k, vec1(0.0), vec1(1.0));
    CHECK(v == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(v == doctest::Approx(0.60653).epsilon(1e-4));
}

TEST_CASE("Matern kernel matches its closed form at unit distance") {
    const KernelSpec k = ma_kernel(vec1(1.0));
    const double v = kernel_eval(k, vec1(0.0), vec1(1.0));
    const double s5 = std::sqrt(5.0);
    CHECK(v == doctest::Approx((1.0 + s5 + 5.0 / 3.0) * std::exp(-s5)).epsilon(1e-14));
    CHECK(v == doctest::Approx(0.52399).epsilon(1e-4));
}

TEST_CASE("kernel is symmetric and separates per-dimension length scales") {
    Rng rng(5);
    for (KernelKind kind : {KernelKind::SquaredExponential, KernelKind::Matern52}) {
        KernelSpec k = random_kernel(2, rng, kind);
        k.length_scales << 0.2, 5.0;
        const VectorXd a = random_inputs(1, 2, rng).row(0).transpose();
        const VectorXd b = random_inputs(1, 2, rng).row(0).transpose();
        CHECK(kernel_eval(k, a, b) == doctest::Approx(kernel_eval(k, b, a)).epsilon(1e-15));
        // A displacement along the short-length-scale axis decays correlation
        // much faster than the same displacement along the long one.
        VectorXd d1 = a, d2 = a;
        d1[0] += 0.3;
        d2[1] += 0.3;
        CHECK(kernel_eval(k, a, d1) < kernel_eval(k, a, d2));
    }
}

TEST_CASE("kernel rejects non-positive length scales and dimension mismatches") {
    KernelSpec k = se_kernel(vec1(0.0));
    CHECK_THROWS_AS(kernel_eval(k, vec1(0.0), vec1(1.0)), DomainError);
    k = se_kernel(vec1(1.0));
    CHECK_THROWS_AS(kernel_eval(k, vec1(0.0), VectorXd::Zero(2)), DomainError);
}

TEST_CASE("mean functions evaluate constants and axis-aligned quadratics") {
    CHECK(mean_eval(const_mean(0.3), VectorXd::Zero(4)) == 0.3);

    MeanSpec q;
    q.kind = MeanKind::Quadratic;
    q.coefficients = VectorXd::Zero(5);  // c, a1, a2, b1, b2
    q.coefficients << 0.0, 0.0, 0.0, 1.0, 1.0;
    VectorXd x(2);
    x << 0.5, 0.5;
    CHECK(mean_eval(q, x) == doctest::Approx(0.5).epsilon(1e-15));

    q.coefficients.setZero();
    CHECK(mean_eval(q, x) == 0.0);

    CHECK(mean_coefficient_count(MeanKind::Constant, 5) == 1);
    CHECK(mean_coefficient_count(MeanKind::Quadratic, 3) == 7);
}

TEST_CASE("robust standardization centers on the median and scales by the IQR") {
    VectorXd y(5);
    y << 1, 2, 3, 4, 100;  // the outlier must not dominate the scale
    const Standardization s = robust_standardization(y);
    CHECK(s.shift == doctest::Approx(3.0));
    CHECK(s.scale == doctest::Approx(2.0 / 1.349).epsilon(1e-12));
}

TEST_CASE("standardization falls back to the standard deviation when the IQR vanishes") {
    VectorXd y(8);
    y << 0, 0, 0, 0, 0, 0, 0, 10;
    const Standardization s = robust_standardization(y);
    CHECK(s.shift == doctest::Approx(0.0));
    CHECK(s.scale == doctest::Approx(std::sqrt(87.5 / 7.0)).epsilon(1e-12));
}

TEST_CASE("standardization of constant data uses unit scale") {
    VectorXd y = VectorXd::Constant(6, 4.25);
    const Standardization s = robust_standardization(y);
    CHECK(s.shift == doctest::Approx(4.25));
    CHECK(s.scale == 1.0);
}

TEST_CASE("smooth-box hyperprior is flat inside its box and falls off outside") {
    const HyperpriorSpec p = HyperpriorSpec::smooth_box();
    const double center = 0.5 * (p.log_lo + p.log_hi);
    CHECK(p.log_density(center) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(std::abs(p.dlog_density(center)) < 1e-6);
    CHECK(p.log_density(p.log_hi + 2.0) < p.log_density(center) - 10.0);
    CHECK(p.log_density(p.log_lo - 2.0) < p.log_density(center) - 10.0);
}

TEST_CASE("gamma hyperprior peaks at its mode and its derivative matches") {
    const HyperpriorSpec p = HyperpriorSpec::gamma_prior();
    const double mode = std::log((p.gamma_shape - 1.0) * p.gamma_scale);
    CHECK(std::abs(p.dlog_density(mode)) < 1e-10);
    CHECK(p.log_density(mode) > p.log_density(mode + 1.0));
    CHECK(p.log_density(mode) > p.log_density(mode - 1.0));
    // density formula: (shape-1) * t - exp(t)/scale up to a constant
    const double t = -0.3;
    const double expect = (p.gamma_shape - 1.0) * t - std::exp(t) / p.gamma_scale;
    CHECK(p.log_density(t) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("hyperprior derivative agrees with finite differences") {
    Rng rng(9);
    for (PriorKind kind : {PriorKind::SmoothBox, PriorKind::Gamma}) {
        const HyperpriorSpec p = HyperpriorSpec::make(kind);
        for (int i = 0; i < 20; ++i) {
            const double t = rng.uniform(-5.0, 3.0);
            const double h = 1e-6;
            const double fd = (p.log_density(t + h) - p.log_density(t - h)) / (2.0 * h);
            CHECK(p.dlog_density(t) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("hyperprior samples stay in a plausible range") {
    Rng rng(11);
    const HyperpriorSpec box = HyperpriorSpec::smooth_box();
    const HyperpriorSpec gam = HyperpriorSpec::gamma_prior();
    for (int i = 0; i < 500; ++i) {
        const double tb = box.sample_log_ls(rng);
        CHECK(std::isfinite(tb));
        CHECK(tb >= box.log_lo - 2.0);
        CHECK(tb <= box.log_hi + 2.0);
        const double tg = gam.sample_log_ls(rng);
        CHECK(std::isfinite(tg));
        CHECK(std::exp(tg) > 0.0);
        CHECK(std::exp(tg) < 50.0);  // Gamma(2, 0.5): P[ls > 50] astronomically small
    }
}

TEST_CASE("hyperparameter packing round trips") {
    Rng rng(13);
    const int d = 3;
    KernelSpec k = random_kernel(d, rng, KernelKind::Matern52);
    MeanSpec m;
    m.kind = MeanKind::Quadratic;
    m.coefficients = VectorXd::LinSpaced(2 * d + 1, -1.0, 1.0);

    const VectorXd h = pack_hyper(k, m);
    REQUIRE(h.size() == d + 1 + 2 * d + 1);
    KernelSpec k2;
    MeanSpec m2;
    unpack_hyper(h, d, k.kind, m.kind, &k2, &m2);
    CHECK((k2.length_scales - k.length_scales).norm() < 1e-14);
    CHECK(k2.signal_variance == doctest::Approx(k.signal_variance).epsilon(1e-14));
    CHECK((m2.coefficients - m.coefficients).norm() < 1e-14);
    CHECK(k2.kind == k.kind);
    CHECK(m2.kind == m.kind);
}

TEST_CASE("log posterior of a single exactly-explained point is the scalar Gaussian") {
    const double c = 0.7;
    const KernelSpec k = se_kernel(vec1(0.3));
    const MeanSpec m = const_mean(c);
    const HyperpriorSpec prior = HyperpriorSpec::smooth_box();
    MatrixXd X(1, 1);
    X << 0.4;
    VectorXd y(1);
    y << c;  // residual is exactly zero

    const LogPosterior lp = log_posterior(k, m, prior, X, y, false);
    const double var = k.signal_variance + kJitterSd * kJitterSd;
    const double expect =
        -0.5 * std::log(2.0 * std::numbers::pi * var) + prior.log_density(std::log(0.3));
    CHECK(lp.value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("log posterior value matches an explicit-inverse evaluation") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(3));
        const int n = 3 + static_cast<int>(rng.below(5));
        // Short length scales keep the covariance comfortably conditioned so
        // the two evaluation routes agree to near machine precision.
        KernelSpec k = random_kernel(
            d, rng, trial % 2 == 0 ? KernelKind::SquaredExponential : KernelKind::Matern52);
        for (int j = 0; j < d; ++j) k.length_scales[j] = rng.uniform(0.1, 0.4);
        const MeanSpec m = const_mean(rng.uniform(-1.0, 1.0));
        const HyperpriorSpec prior =
            HyperpriorSpec::make(trial % 2 == 0 ? PriorKind::SmoothBox : PriorKind::Gamma);
        const MatrixXd X = random_inputs(n, d, rng);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = std::sin(2.0 * X.row(i).sum()) + 0.05 * rng.gaussian();

        MatrixXd K(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                K(i, j) = kernel_eval(k, X.row(i).transpose(), X.row(j).transpose());
        K.diagonal().array() += kJitterSd * kJitterSd;
        VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = y[i] - mean_eval(m, X.row(i).transpose());

        double expect = -0.5 * r.dot(K.inverse() * r) - 0.5 * std::log(K.determinant()) -
                        0.5 * n * std::log(2.0 * std::numbers::pi);
        for (int j = 0; j < d; ++j) expect += prior.log_density(std::log(k.length_scales[j]));

        const LogPosterior lp = log_posterior(k, m, prior, X, y, false);
        CHECK(lp.value == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("log posterior gradient matches central finite differences") {
    Rng rng(19);
    for (int trial = 0; trial < 8; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(3));
        const int n = 3 + static_cast<int>(rng.below(6));
        const KernelKind kk =
            trial % 2 == 0 ? KernelKind::SquaredExponential : KernelKind::Matern52;
        const MeanKind mk = trial % 3 == 0 ? MeanKind::Quadratic : MeanKind::Constant;
        const PriorKind pk = trial % 2 == 0 ? PriorKind::SmoothBox : PriorKind::Gamma;

        int per_axis = 0;
        const MatrixXd X = separated_inputs(n, d, rng, &per_axis);
        const KernelSpec k = lattice_kernel(d, per_axis, rng, kk);
        MeanSpec m;
        m.kind = mk;
        m.coefficients = VectorXd::Zero(mean_coefficient_count(mk, d));
        for (int i = 0; i < m.coefficients.size(); ++i) m.coefficients[i] = rng.uniform(-1.0, 1.0);
        const HyperpriorSpec prior = HyperpriorSpec::make(pk);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = std::sin(3.0 * X(i, 0)) + 0.1 * rng.gaussian();

        const LogPosterior lp = log_posterior(k, m, prior, X, y, true);
        const VectorXd h0 = pack_hyper(k, m);
        REQUIRE(lp.grad.size() == h0.size());

        for (int j = 0; j < h0.size(); ++j) {
            const double step = 1e-5 * std::max(1.0, std::abs(h0[j]));
            VectorXd hp = h0, hm = h0;
            hp[j] += step;
            hm[j] -= step;
            KernelSpec kp, km;
            MeanSpec mp, mm;
            unpack_hyper(hp, d, kk, mk, &kp, &mp);
            unpack_hyper(hm, d, kk, mk, &km, &mm);
            const double fp = log_posterior(kp, mp, prior, X, y, false).value;
            const double fm = log_posterior(km, mm, prior, X, y, false).value;
            const double fd = (fp - fm) / (2.0 * step);
            const double denom = std::max({1.0, std::abs(fd), std::abs(lp.grad[j])});
            CHECK(std::abs(lp.grad[j] - fd) / denom < 1e-4);
        }
    }
}

TEST_CASE("assembled models expose the jitter actually used") {
    Rng rng(23);
    const MatrixXd X = random_inputs(8, 2, rng);
    VectorXd y(8);
    for (int i = 0; i < 8; ++i) y[i] = rng.gaussian();
    const KernelSpec k = random_kernel(2, rng, KernelKind::SquaredExponential);
    const GpModel model = assemble_model(k, const_mean(0.0), X, y, 0.0, 1.0);
    CHECK(model.jitter_var_used == doctest::Approx(kJitterSd * kJitterSd).epsilon(1e-15));
    CHECK(model.n() == 8);
    CHECK(model.input_dim() == 2);
}

TEST_CASE("prediction reproduces the explicit-inverse posterior") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(3));
        const int n = 2 + static_cast<int>(rng.below(10));
        const KernelKind kk =
            trial % 2 == 0 ? KernelKind::SquaredExponential : KernelKind::Matern52;
        int per_axis = 0;
        const MatrixXd X = separated_inputs(n, d, rng, &per_axis);
        const KernelSpec k = lattice_kernel(d, per_axis, rng, kk);
        const MeanSpec m = const_mean(rng.uniform(-0.5, 0.5));
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = std::sin(2.0 * X.row(i).sum()) + 0.05 * rng.gaussian();

        const GpModel model = assemble_model(k, m, X, y, 0.0, 1.0);

        MatrixXd K(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                K(i, j) = kernel_eval(k, X.row(i).transpose(), X.row(j).transpose());
        K.diagonal().array() += model.jitter_var_used;
        const MatrixXd Kinv = K.inverse();
        VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = y[i] - mean_eval(m, X.row(i).transpose());

        for (int q = 0; q < 5; ++q) {
            const VectorXd x = random_inputs(1, d, rng).row(0).transpose();
            VectorXd ks(n);
            for (int i = 0; i < n; ++i) ks[i] = kernel_eval(k, X.row(i).transpose(), x);
            const double mu_o = mean_eval(m, x) + ks.dot(Kinv * r);
            const double var_o = k.signal_variance - ks.dot(Kinv * ks);
            const double sigma_o = std::sqrt(std::max(0.0, var_o));

            const Prediction p = predict(model, x);
            CHECK(std::abs(p.mu - mu_o) <= 1e-8 * std::max(1.0, std::abs(mu_o)));
            CHECK(std::abs(p.sigma - sigma_o) <= 1e-8 * std::max(1.0, sigma_o));
        }
    }
}

TEST_CASE("posterior variance never exceeds the prior variance") {
    Rng rng(31);
    int pairs = 0;
    while (pairs < 1000) {
        const int d = 1 + static_cast<int>(rng.below(3));
        const int n = 1 + static_cast<int>(rng.below(15));
        const KernelKind kk =
            pairs % 2 == 0 ? KernelKind::SquaredExponential : KernelKind::Matern52;
        const KernelSpec k = random_kernel(d, rng, kk);
        const MatrixXd X = random_inputs(n, d, rng);
        VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.gaussian();
        const GpModel model = assemble_model(k, const_mean(0.0), X, y, 0.0, 1.0);
        const double prior_sigma = std::sqrt(k.signal_variance + model.jitter_var_used);
        for (int q = 0; q < 20; ++q, ++pairs) {
            const Prediction p = predict(model, random_inputs(1, d, rng).row(0).transpose());
            CHECK(p.sigma <= prior_sigma * (1.0 + 1e-9));
            CHECK(p.sigma >= 0.0);
        }
    }
}

TEST_CASE("adding a training point never increases posterior variance") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + static_cast<int>(rng.below(3));
        const int n = 2 + static_cast<int>(rng.below(8));
        const KernelSpec k = random_kernel(d, rng, KernelKind::SquaredExponential);
        const MatrixXd X = random_inputs(n + 1, d, rng);
        VectorXd y(n + 1);
        for (int i = 0; i <= n; ++i) y[i] = rng.gaussian();

        const GpModel small =
            assemble_model(k, const_mean(0.0), X.topRows(n), y.head(n), 0.0, 1.0);
        const GpModel big = assemble_model(k, const_mean(0.0), X, y, 0.0, 1.0);
        for (int q = 0; q < 10; ++q) {
            const VectorXd x = random_inputs(1, d, rng).row(0).transpose();
            CHECK(predict(big, x).sigma <= predict(small, x).sigma + 1e-9);
        }
    }
}

TEST_CASE("prediction is invariant to permutation of the training set") {
    Rng rng(41);
    const int n = 9, d = 2;
    const KernelSpec k = random_kernel(d, rng, KernelKind::Matern52);
    const MatrixXd X = random_inputs(n, d, rng);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.gaussian();

    MatrixXd Xp(n, d);
    VectorXd yp(n);
    for (int i = 0; i < n; ++i) {  // reverse order
        Xp.row(i) = X.row(n - 1 - i);
        yp[i] = y[n - 1 - i];
    }
    const GpModel a = assemble_model(k, const_mean(0.1), X, y, 0.0, 1.0);
    const GpModel b = assemble_model(k, const_mean(0.1), Xp, yp, 0.0, 1.0);
    for (int q = 0; q < 25; ++q) {
        const VectorXd x = random_inputs(1, d, rng).row(0).transpose();
        const Prediction pa = predict(a, x);
        const Prediction pb = predict(b, x);
        CHECK(std::abs(pa.mu - pb.mu) <= 1e-10 * std::max(1.0, std::abs(pa.mu)));
        CHECK(std::abs(pa.sigma - pb.sigma) <= 1e-10 * std::max(1.0, pa.sigma));
    }
}

TEST_CASE("batched prediction matches pointwise prediction") {
    Rng rng(43);
    const int n = 7, d = 3, m = 40;
    const KernelSpec k = random_kernel(d, rng, KernelKind::SquaredExponential);
    const MatrixXd X = random_inputs(n, d, rng);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.gaussian();
    const GpModel model = assemble_model(k, const_mean(0.0), X, y, 1.5, 2.0);

    const MatrixXd Q = random_inputs(m, d, rng);
    VectorXd mu, sigma;
    predict_many(model, Q, &mu, &sigma);
    REQUIRE(mu.size() == m);
    REQUIRE(sigma.size() == m);
    for (int i = 0; i < m; ++i) {
        const Prediction p = predict(model, Q.row(i).transpose());
        CHECK(mu[i] == doctest::Approx(p.mu).epsilon(1e-12));
        CHECK(sigma[i] == doctest::Approx(p.sigma).epsilon(1e-12));
    }
}

TEST_CASE("fit with no data yields the prior-only model") {
    Rng rng(47);
    const GpConfig config;
    const GpModel model = fit(MatrixXd(0, 2), VectorXd(0), config, rng);
    CHECK(model.n() == 0);
    CHECK(model.kernel.signal_variance == doctest::Approx(1.0));
    for (int j = 0; j < 2; ++j)
        CHECK(model.kernel.length_scales[j] == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));

    const Prediction p = predict(model, VectorXd::Constant(2, 0.5));
    CHECK(p.mu == doctest::Approx(0.0));
    CHECK(p.sigma == doctest::Approx(std::sqrt(1.0 + kJitterSd * kJitterSd)).epsilon(1e-12));
}

TEST_CASE("fit is deterministic for a fixed rng seed") {
    Rng rng_data(53);
    const MatrixXd X = random_inputs(10, 2, rng_data);
    VectorXd y(10);
    for (int i = 0; i < 10; ++i) y[i] = std::sin(4.0 * X(i, 0)) + X(i, 1);

    const GpConfig config;
    Rng r1(99), r2(99);
    const GpModel m1 = fit(X, y, config, r1, FitSettings::fast());
    const GpModel m2 = fit(X, y, config, r2, FitSettings::fast());
    CHECK((pack_hyper(m1.kernel, m1.mean) - pack_hyper(m2.kernel, m2.mean)).norm() == 0.0);
    const VectorXd x = VectorXd::Constant(2, 0.3);
    CHECK(predict(m1, x).mu == predict(m2, x).mu);
    CHECK(predict(m1, x).sigma == predict(m2, x).sigma);
}

TEST_CASE("fit on constant outputs predicts that constant everywhere") {
    Rng rng(59);
    const MatrixXd X = random_inputs(5, 2, rng);
    const VectorXd y = VectorXd::Constant(5, 7.25);
    const GpModel model = fit(X, y, GpConfig{}, rng, FitSettings::fast());
    CHECK(model.shift == doctest::Approx(7.25));
    CHECK(model.scale == 1.0);
    for (int q = 0; q < 10; ++q) {
        const Prediction p = predict(model, random_inputs(1, 2, rng).row(0).transpose());
        CHECK(p.mu == doctest::Approx(7.25).epsilon(1e-3));
    }
}

TEST_CASE("fit interpolates a smooth function at its training points") {
    Rng rng(61);
    const int n = 20;
    MatrixXd X(n, 1);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = (i + 0.5) / n;
        y[i] = std::sin(3.0 * X(i, 0)) + 0.5 * X(i, 0) * X(i, 0);
    }
    for (const GpConfig config :
         {GpConfig{KernelKind::SquaredExponential, MeanKind::Constant, PriorKind::SmoothBox},
          GpConfig{KernelKind::Matern52, MeanKind::Constant, PriorKind::SmoothBox}}) {
        Rng fit_rng(67);
        const GpModel model = fit(X, y, config, fit_rng, FitSettings::reference());
        for (int i = 0; i < n; ++i) {
            const Prediction p = predict(model, X.row(i).transpose());
            CHECK(std::abs(p.mu - y[i]) < 3e-2);
            CHECK(p.sigma <= kJitterSd * model.scale * 1.01);
        }
    }
}

TEST_CASE("fitted length scales respect the quadratic mean option") {
    Rng rng(71);
    const int n = 12, d = 2;
    MatrixXd X = random_inputs(n, d, rng);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double s = X(i, 0) - 0.4;
        y[i] = 3.0 * s * s + 0.2 * X(i, 1);
    }
    GpConfig config;
    config.mean = MeanKind::Quadratic;
    const GpModel model = fit(X, y, config, rng, FitSettings::fast());
    CHECK(model.mean.kind == MeanKind::Quadratic);
    CHECK(model.mean.coefficients.size() == 2 * d + 1);
    // The surrogate must still reproduce its training data.
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(predict(model, X.row(i).transpose()).mu - y[i]) < 5e-2);
}

TEST_CASE("raw-unit helpers destandardize training targets") {
    Rng rng(73);
    const MatrixXd X = random_inputs(6, 1, rng);
    VectorXd y(6);
    y << 5.0, 3.0, 8.0, 1.0, 9.0, 4.0;
    const GpModel model = fit(X, y, GpConfig{}, rng, FitSettings::fast());
    const VectorXd raw = model.training_targets_raw();
    REQUIRE(raw.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(raw[i] == doctest::Approx(y[i]).epsilon(1e-12));
    CHECK(model.best_training_target_raw() == doctest::Approx(1.0).epsilon(1e-12));
}
