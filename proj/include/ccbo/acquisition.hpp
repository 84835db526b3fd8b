#pragma once
// Acquisition functions for minimization (EI, lower-confidence bound, and
// max-value entropy search) and their maximization over the unit cube.

#include "ccbo/core.hpp"
#include "ccbo/gpr.hpp"
#include "ccbo/rng.hpp"

namespace ccbo::acq {

enum class Kind { EI, UCB, MES };

struct AcquisitionSpec {
    Kind kind = Kind::MES;
    double beta = 3.0;    // UCB only
    int mes_samples = 10;  // MES only

    static AcquisitionSpec ei() { return {Kind::EI, 3.0, 10}; }
    static AcquisitionSpec ucb(double beta = 3.0) { return {Kind::UCB, beta, 10}; }
    static AcquisitionSpec mes(int samples = 10) { return {Kind::MES, 3.0, samples}; }
};

// Standard normal pdf / cdf and numerically safe tail quantities.
double norm_pdf(double z);
double norm_cdf(double z);
// log(Phi(z)), accurate deep into the left tail.
double log_norm_cdf(double z);
// phi(z) / Phi(z), accurate deep into the left tail (inverse Mills ratio).
double pdf_over_cdf(double z);

// Expected improvement below j_best for a Gaussian belief N(mu, sigma^2).
// sigma == 0 degenerates to max(j_best - mu, 0).
double ei(double mu, double sigma, double j_best);

// Lower confidence bound mu - beta * sigma (a bound to be minimized; its
// negation serves as the acquisition utility).
double ucb(double mu, double sigma, double beta);

// Approximate samples of the objective's minimum value under the model,
// via a Gumbel fit to Pr(min <= y) over a quasi-random candidate grid
// augmented with the training inputs. Samples never exceed the best
// posterior mean found on that grid. Degenerate posteriors (all sigma ~ 0)
// fall back to the best observed value minus small offsets.
std::vector<double> sample_min_values(const gp::GpModel& model, int count, Rng& rng);

// Max-value entropy-search utility at a point with posterior (mu, sigma),
// against the given min-value samples; zero when sigma vanishes.
double mes(double mu, double sigma, const std::vector<double>& min_samples);

struct MaximizeSettings {
    int candidates_per_dim = 1000;
    int refine_top = 5;
    int max_refine_iters = 30;
    double fd_step = 1e-5;
};

// Picks the next query point in [0,1]^d: scores a random candidate cloud,
// refines the best few by projected finite-difference gradient ascent, and
// returns the overall utility argmax. A perfectly flat utility yields a
// uniform random point. Deterministic given the rng state.
VectorXd maximize_acquisition(const gp::GpModel& model, const AcquisitionSpec& spec, int dim,
                              Rng& rng, const MaximizeSettings& settings = MaximizeSettings());

}  // namespace ccbo::acq
