#pragma once

#include <cstdint>
#include <string>

#include "ccbo/acquisition.hpp"
#include "ccbo/core.hpp"
#include "ccbo/gpr.hpp"
#include "ccbo/vdp.hpp"

namespace ccbo::bo {

// How crashed evaluations enter the surrogate dataset:
//   F — use the problem-supplied fallback objective as ordinary data;
//   V — impute adaptive virtual values from the successful evaluations.
enum class CrashMode { F, V };

struct BoConfig {
    acq::AcquisitionSpec acquisition = acq::AcquisitionSpec::mes();
    gp::KernelKind kernel = gp::KernelKind::SquaredExponential;
    gp::MeanKind mean = gp::MeanKind::Constant;
    gp::PriorKind prior = gp::PriorKind::SmoothBox;
    CrashMode crash_mode = CrashMode::V;
    double gamma = vdp::kDefaultGamma;
    gp::FitSettings fit = gp::FitSettings::fast();
    acq::MaximizeSettings maximize = {};

    [[nodiscard]] gp::GpConfig gp_config() const;
};

// dim+1 uniform points in the unit cube, one per row; deterministic per rng
// state. All non-grid optimizers of a benchmark repetition share these.
MatrixXd initial_design(int dim, Rng& rng);
MatrixXd initial_design(int dim, std::uint64_t seed);

// Proposes the next normalized query point from the evaluation history.
// Falls back to a uniform random point when the surrogate cannot be built
// (no feasible data in mode V, or a numerical failure, which is logged).
VectorXd bo_step(const Trace& history, const Domain& domain, const BoConfig& config, Rng& rng);

// Full optimization run: evaluates the shared initial design (truncated to
// the budget if necessary), then alternates bo_step / evaluate until the
// budget is exhausted. With `shared_initial` empty, a fresh initial design is
// drawn from the run's own rng.
Trace run(const Problem& problem, const BoConfig& config, int budget, std::uint64_t seed,
          const MatrixXd& shared_initial, const std::string& optimizer_id = "bo");

}  // namespace ccbo::bo
