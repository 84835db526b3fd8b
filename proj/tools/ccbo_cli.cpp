// Command-line front end: experiment runner, report generation, landscape
// analysis, and catalog listings.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ccbo/baselines.hpp"
#include "ccbo/harness.hpp"
#include "ccbo/landscape.hpp"
#include "ccbo/testbed.hpp"

namespace fs = std::filesystem;
using namespace ccbo;

namespace {

std::string default_registry() {
    for (const char* candidate : {"data/registry.json", "../data/registry.json"})
        if (fs::exists(candidate)) return candidate;
    return "";
}

VectorXd parse_vector(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    return Eigen::Map<const VectorXd>(vals.data(), static_cast<int>(vals.size()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crash-constrained Bayesian optimization benchmark suite"};
    app.require_subcommand(1);

    std::string registry = default_registry();
    app.add_option("--registry", registry,
                   "Problem registry JSON supplying known-best records")
        ->capture_default_str();

    // --- run ---------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run an experiment campaign");
    std::string config_path;
    bool desk = false;
    std::string output_override;
    int seeds_override = 0;
    int parallelism_override = 0;
    run_cmd->add_option("--config", config_path, "Experiment configuration JSON");
    run_cmd->add_flag("--desk", desk, "Use the built-in desk benchmark configuration");
    run_cmd->add_option("--output", output_override, "Override the output directory");
    run_cmd->add_option("--seeds", seeds_override, "Override the number of seeds");
    run_cmd->add_option("--parallelism", parallelism_override,
                        "Worker count (default: CCBO_PARALLELISM or hardware)");

    // --- report ------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "Generate tables, curves, and charts");
    std::string results_dir;
    report_cmd->add_option("--results", results_dir, "Results directory of a finished run")
        ->required();

    // --- landscape ---------------------------------------------------------
    auto* land_cmd = app.add_subcommand("landscape", "Analyze a problem's landscape");
    std::string land_problem;
    std::uint64_t land_seed = 0;
    int land_subspaces = 10;
    int land_points = 51;
    std::string land_theta;
    land_cmd->add_option("--problem", land_problem, "Problem id")->required();
    land_cmd->add_option("--seed", land_seed, "Random seed")->capture_default_str();
    land_cmd->add_option("--subspaces", land_subspaces, "Number of random 1-D subspaces")
        ->capture_default_str();
    land_cmd->add_option("--points", land_points, "Points per subspace")->capture_default_str();
    land_cmd->add_option("--theta", land_theta,
                         "Reference optimum as comma-separated raw coordinates "
                         "(default: the registry's known best)");

    // --- listings ----------------------------------------------------------
    auto* listp_cmd = app.add_subcommand("list-problems", "List available problems");
    auto* listo_cmd = app.add_subcommand("list-optimizers", "List available optimizers");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            if (desk == !config_path.empty())
                throw DomainError("run: provide exactly one of --config or --desk");
            harness::ExperimentConfig cfg =
                desk ? harness::desk_config() : harness::load_config(config_path);
            if (!output_override.empty()) cfg.output_dir = output_override;
            if (seeds_override > 0) cfg.seeds = seeds_override;
            if (parallelism_override > 0) cfg.parallelism = parallelism_override;

            const harness::ExperimentResult result = harness::run_experiment(cfg, registry);
            std::printf("completed %zu runs (%d failed) in %s\n", result.runs.size(),
                        result.failures, result.results_dir.c_str());
            for (const auto& rr : result.runs)
                if (!rr.ok)
                    std::fprintf(stderr, "FAILED %s / %s / seed %d: %s\n", rr.problem.c_str(),
                                 rr.optimizer.c_str(), rr.seed_index, rr.error.c_str());
            if (result.failures == 0)
                std::printf("next: %s report --results %s\n", argv[0],
                            result.results_dir.c_str());
            return result.failures == 0 ? 0 : 1;
        }

        if (report_cmd->parsed()) {
            harness::report(results_dir);
            std::printf("report written to %s\n", results_dir.c_str());
            for (const char* f : {"table_regret.txt", "table_regret.csv", "summary.csv",
                                  "curves.csv", "landscape.txt"})
                if (fs::exists(fs::path(results_dir) / f))
                    std::printf("  %s\n", (fs::path(results_dir) / f).string().c_str());
            return 0;
        }

        if (land_cmd->parsed()) {
            std::vector<Problem> problems{testbed::problem_by_id(land_problem)};
            if (!registry.empty()) testbed::apply_registry(registry, problems);
            Problem& problem = problems.front();

            VectorXd theta_star;
            if (!land_theta.empty()) {
                theta_star = parse_vector(land_theta);
            } else if (problem.known_best) {
                theta_star = problem.known_best->theta;
            } else {
                std::fprintf(stderr,
                             "no known-best record for %s; pass --theta or provide a registry\n",
                             land_problem.c_str());
                return 1;
            }
            // Keep the reference point strictly inside the box.
            for (int i = 0; i < theta_star.size(); ++i) {
                const double span = problem.domain.upper[i] - problem.domain.lower[i];
                theta_star[i] = std::clamp(theta_star[i], problem.domain.lower[i] + 1e-6 * span,
                                           problem.domain.upper[i] - 1e-6 * span);
            }

            const landscape::LandscapeReport rep =
                landscape::analyze(problem, theta_star, land_subspaces, land_points, land_seed);
            std::printf("problem              s_opt   p_crash   t_sim[s]\n");
            std::printf("%-20s %5.2f   %7.2f   %8.2e\n", land_problem.c_str(), rep.s_opt,
                        rep.p_crash, rep.t_sim);
            std::printf("(%d samples: %d successful, %d crashed, %d with a clear path)\n",
                        rep.n_total, rep.n_success, rep.n_crashed, rep.n_clear);
            return 0;
        }

        if (listp_cmd->parsed()) {
            std::vector<Problem> problems;
            for (const std::string& id : testbed::builtin_problem_ids())
                problems.push_back(testbed::problem_by_id(id));
            if (!registry.empty()) testbed::apply_registry(registry, problems);
            std::printf("%-22s %3s  %-28s %s\n", "id", "dim", "box", "known_best");
            for (const Problem& p : problems) {
                std::ostringstream box;
                for (int i = 0; i < p.domain.dim(); ++i) {
                    if (i) box << " x ";
                    box << "[" << p.domain.lower[i] << "," << p.domain.upper[i] << "]";
                }
                std::printf("%-22s %3d  %-28s %s\n", p.id.c_str(), p.domain.dim(),
                            box.str().c_str(),
                            p.known_best ? std::to_string(p.known_best->objective).c_str()
                                         : "-");
            }
            std::printf("\n(sphere-crash-d<k>, rosenbrock-crash-d<k>, noisy-bowl-d<k> accept "
                        "other dimensions too)\n");
            return 0;
        }

        if (listo_cmd->parsed()) {
            std::printf("baselines: Rand, Grid, PS\n");
            std::printf("surrogate optimizers: {MES,UCB,EI}-{SE,MA}[Q|G]-{F,V}\n");
            std::printf("  acquisition - kernel (Q: quadratic mean, G: gamma hyperprior) - "
                        "crash mode (F: fallback values, V: virtual data points)\n");
            std::printf("examples:\n");
            for (const std::string& name : harness::builtin_optimizer_names())
                std::printf("  %s\n", name.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
