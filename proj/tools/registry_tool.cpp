// One-time reference campaign that produces the problem registry: for every
// built-in problem, spend ~1e5 evaluations (half uniform random search, half
// restarted pattern search) and record the best evaluation ever seen. The
// result is written as data/registry.json and echoed as a C++ table snippet
// for the built-in fallback records.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccbo/baselines.hpp"
#include "ccbo/rng.hpp"
#include "ccbo/testbed.hpp"

using namespace ccbo;

namespace {

struct CampaignBest {
    VectorXd theta;
    double objective = 0.0;
    bool found = false;

    void absorb(const Trace& trace) {
        for (const Evaluation& ev : trace.evaluations) {
            if (!ev.objective) continue;
            if (!found || *ev.objective < objective) {
                found = true;
                objective = *ev.objective;
                theta = ev.theta;
            }
        }
    }
};

MatrixXd uniform_design(int rows, int dim, Rng& rng) {
    MatrixXd design(rows, dim);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < dim; ++c) design(r, c) = rng.uniform();
    return design;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reference campaign: compute known-best records for the problem registry"};
    std::string output = "data/registry.json";
    int random_evals = 50000;
    int ps_restarts = 50;
    int ps_budget = 1000;
    std::uint64_t master_seed = 424242;
    app.add_option("--output", output, "Registry file to write")->capture_default_str();
    app.add_option("--random-evals", random_evals, "Random-search evaluations per problem")
        ->capture_default_str();
    app.add_option("--ps-restarts", ps_restarts, "Independent pattern-search runs per problem")
        ->capture_default_str();
    app.add_option("--ps-budget", ps_budget, "Evaluations per pattern-search run")
        ->capture_default_str();
    app.add_option("--seed", master_seed, "Campaign master seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    std::vector<Problem> problems;
    for (const std::string& id : testbed::builtin_problem_ids()) {
        Problem problem = testbed::problem_by_id(id);
        problem.known_best.reset();  // recompute from scratch
        const int d = problem.domain.dim();

        CampaignBest best;
        {
            const std::uint64_t seed = SeedMixer(master_seed).mix(id).mix("random").seed();
            best.absorb(baselines::random_search(problem, random_evals, seed, MatrixXd(0, d)));
        }
        for (int rep = 0; rep < ps_restarts; ++rep) {
            SeedMixer mixer = SeedMixer(master_seed).mix(id).mix("pattern").mix(
                static_cast<std::uint64_t>(rep));
            Rng rng(mixer.mix("design").seed());
            const MatrixXd initial = uniform_design(d + 1, d, rng);
            best.absorb(baselines::pattern_search(problem, ps_budget, mixer.seed(), initial));
        }

        if (!best.found) {
            std::fprintf(stderr, "%s: campaign found no successful evaluation\n", id.c_str());
            return 1;
        }
        problem.known_best = KnownBest{best.theta, best.objective};
        problems.push_back(problem);

        std::printf("%-22s best %.17g at [", id.c_str(), best.objective);
        for (int i = 0; i < best.theta.size(); ++i)
            std::printf("%s%.17g", i ? ", " : "", best.theta[i]);
        std::printf("]\n");
        std::fflush(stdout);
    }

    testbed::write_registry(output, problems);
    std::printf("\nregistry written to %s\n", output.c_str());

    std::printf("\n// built-in known-best table (%d problems):\n", static_cast<int>(problems.size()));
    for (const Problem& p : problems) {
        std::printf("        {\"%s\", {make_vector({", p.id.c_str());
        for (int i = 0; i < p.known_best->theta.size(); ++i)
            std::printf("%s%.17g", i ? ", " : "", p.known_best->theta[i]);
        std::printf("}), %.17g}},\n", p.known_best->objective);
    }
    return 0;
}
