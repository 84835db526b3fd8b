#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccbo/bo.hpp"
#include "ccbo/core.hpp"

namespace ccbo::harness {

// A benchmark optimizer: either one of the non-surrogate baselines or a
// surrogate-based configuration named by the
// {MES,UCB,EI}-{SE,MA}[Q|G]-{F,V} nomenclature (kernel, optional
// quadratic-mean / gamma-prior flag, crash-handling mode).
struct OptimizerSpec {
    enum class Family { Rand, Grid, PS, BO };
    std::string name;
    Family family = Family::Rand;
    bo::BoConfig bo;  // meaningful only when family == BO
};

// Parses "Rand", "Grid", "PS", or a nomenclature string such as "MES-SE-V"
// or "MES-SEQ-V"; throws DomainError with a diagnostic otherwise.
OptimizerSpec parse_optimizer(const std::string& name);

// Names accepted by parse_optimizer that the CLI advertises.
std::vector<std::string> builtin_optimizer_names();

struct ExperimentConfig {
    std::vector<std::string> problems;
    std::vector<std::string> optimizers;
    int budget_multiplier = 25;
    int seeds = 50;
    std::string output_dir = "results";
    int parallelism = 0;  // 0: use CCBO_PARALLELISM or the hardware count
    std::uint64_t master_seed = 12345;
};

// The default campaign: the full desk-scale benchmark.
ExperimentConfig desk_config();

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& config);

struct RunResult {
    std::string problem;
    std::string optimizer;
    int seed_index = 0;
    std::uint64_t seed = 0;   // derived rng seed of the run
    std::string trace_file;   // file name relative to the results directory
    bool ok = false;
    std::string error;
};

struct ExperimentResult {
    std::string results_dir;
    std::vector<RunResult> runs;
    int failures = 0;
};

// Runs the full (problem x seed x optimizer) campaign: one shared initial
// design per (problem, seed); one JSON-lines trace file per run; an
// atomically written master index; a cached landscape analysis per problem.
// Individual run failures are recorded in the index, not propagated.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& registry_path = "");

// Canonical trace file name of a run.
std::string trace_filename(const std::string& problem, const std::string& optimizer,
                           int seed_index);

// One evaluation per line: {"k":..,"theta":[..],"objective":..|null,
// "crashed":..,"fallback":..|null,"wall_time":..}. Run identity travels in
// the canonical file name.
void write_trace_jsonl(const std::string& path, const Trace& trace);
Trace read_trace_jsonl(const std::string& path);

// Trace comparison ignoring the only nondeterministic field.
bool traces_equal_modulo_wall_time(const std::string& path_a, const std::string& path_b,
                                   std::string* diff = nullptr);

// Reads a results directory produced by run_experiment and writes the
// benchmark report next to it: final scaled-regret table with significance
// marks, per-evaluation summary and curve CSVs, one SVG chart per problem,
// and the landscape table. Deterministic: regenerating from the same
// directory reproduces every output byte for byte.
void report(const std::string& results_dir);

// Worker count: explicit value, else CCBO_PARALLELISM, else hardware.
int resolve_parallelism(int requested);

}  // namespace ccbo::harness
