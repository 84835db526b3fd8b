#include "ccbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ccbo/baselines.hpp"
#include "ccbo/landscape.hpp"
#include "ccbo/metrics.hpp"
#include "ccbo/testbed.hpp"

namespace ccbo::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Shortest round-trip decimal form, deterministic across runs.
std::string fmt(double x) { return json(x).dump(); }

std::string fmt_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Optimizer nomenclature
// ---------------------------------------------------------------------------

OptimizerSpec parse_optimizer(const std::string& name) {
    OptimizerSpec spec;
    spec.name = name;
    if (name == "Rand") {
        spec.family = OptimizerSpec::Family::Rand;
        return spec;
    }
    if (name == "Grid") {
        spec.family = OptimizerSpec::Family::Grid;
        return spec;
    }
    if (name == "PS") {
        spec.family = OptimizerSpec::Family::PS;
        return spec;
    }

    const auto fail = [&]() -> OptimizerSpec {
        throw DomainError("unknown optimizer '" + name +
                          "': expected Rand, Grid, PS, or {MES,UCB,EI}-{SE,MA}[Q|G]-{F,V}");
    };

    std::vector<std::string> tokens;
    std::stringstream ss(name);
    std::string tok;
    while (std::getline(ss, tok, '-')) tokens.push_back(tok);
    if (tokens.size() != 3) return fail();

    spec.family = OptimizerSpec::Family::BO;
    if (tokens[0] == "MES")
        spec.bo.acquisition = acq::AcquisitionSpec::mes();
    else if (tokens[0] == "UCB")
        spec.bo.acquisition = acq::AcquisitionSpec::ucb();
    else if (tokens[0] == "EI")
        spec.bo.acquisition = acq::AcquisitionSpec::ei();
    else
        return fail();

    std::string middle = tokens[1];
    if (middle.rfind("SE", 0) == 0) {
        spec.bo.kernel = gp::KernelKind::SquaredExponential;
        middle = middle.substr(2);
    } else if (middle.rfind("MA", 0) == 0) {
        spec.bo.kernel = gp::KernelKind::Matern52;
        middle = middle.substr(2);
    } else {
        return fail();
    }
    spec.bo.mean = gp::MeanKind::Constant;
    spec.bo.prior = gp::PriorKind::SmoothBox;
    if (middle == "Q")
        spec.bo.mean = gp::MeanKind::Quadratic;
    else if (middle == "G")
        spec.bo.prior = gp::PriorKind::Gamma;
    else if (!middle.empty())
        return fail();

    if (tokens[2] == "F")
        spec.bo.crash_mode = bo::CrashMode::F;
    else if (tokens[2] == "V")
        spec.bo.crash_mode = bo::CrashMode::V;
    else
        return fail();
    return spec;
}

std::vector<std::string> builtin_optimizer_names() {
    return {"Rand",     "Grid",     "PS",        "MES-SE-F",  "MES-SE-V",
            "MES-SEQ-V", "MES-SEG-V", "MES-MA-F", "MES-MA-V",  "EI-SE-F",
            "EI-SE-V",  "UCB-SE-F", "UCB-SE-V"};
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

ExperimentConfig desk_config() {
    ExperimentConfig cfg;
    cfg.problems = {"sphere-crash-d2", "noisy-bowl-d3", "cartpole-d2", "cartpole-d4"};
    cfg.optimizers = {"Rand",     "Grid",     "PS",      "MES-SE-F",
                      "MES-SE-V", "MES-MA-V", "EI-SE-V", "UCB-SE-F"};
    cfg.budget_multiplier = 25;
    cfg.seeds = 20;
    cfg.output_dir = "results-desk";
    cfg.master_seed = 12345;
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("load_config: cannot open " + path);
    json doc;
    in >> doc;

    ExperimentConfig cfg;
    if (!doc.contains("problems") || !doc.contains("optimizers"))
        throw DomainError("load_config: 'problems' and 'optimizers' are required");
    cfg.problems = doc.at("problems").get<std::vector<std::string>>();
    cfg.optimizers = doc.at("optimizers").get<std::vector<std::string>>();
    cfg.budget_multiplier = doc.value("budget_multiplier", cfg.budget_multiplier);
    cfg.seeds = doc.value("seeds", cfg.seeds);
    cfg.output_dir = doc.value("output_dir", cfg.output_dir);
    cfg.parallelism = doc.value("parallelism", cfg.parallelism);
    cfg.master_seed = doc.value("master_seed", cfg.master_seed);
    return cfg;
}

namespace {

ordered_json config_to_json(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["problems"] = cfg.problems;
    doc["optimizers"] = cfg.optimizers;
    doc["budget_multiplier"] = cfg.budget_multiplier;
    doc["seeds"] = cfg.seeds;
    doc["output_dir"] = cfg.output_dir;
    doc["parallelism"] = cfg.parallelism;
    doc["master_seed"] = cfg.master_seed;
    return doc;
}

}  // namespace

void save_config(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw DomainError("save_config: cannot open " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

int resolve_parallelism(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CCBO_PARALLELISM")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// ---------------------------------------------------------------------------
// Trace persistence
// ---------------------------------------------------------------------------

std::string trace_filename(const std::string& problem, const std::string& optimizer,
                           int seed_index) {
    return problem + "__" + optimizer + "__s" + std::to_string(seed_index) + ".jsonl";
}

void write_trace_jsonl(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw DomainError("write_trace_jsonl: cannot open " + path);
    for (std::size_t k = 0; k < trace.evaluations.size(); ++k) {
        const Evaluation& ev = trace.evaluations[k];
        ordered_json line;
        line["k"] = k;
        line["theta"] = std::vector<double>(ev.theta.data(), ev.theta.data() + ev.theta.size());
        if (ev.objective)
            line["objective"] = *ev.objective;
        else
            line["objective"] = nullptr;
        line["crashed"] = ev.crashed;
        if (ev.fallback_objective)
            line["fallback"] = *ev.fallback_objective;
        else
            line["fallback"] = nullptr;
        line["wall_time"] = ev.wall_time;
        out << line.dump() << "\n";
    }
}

Trace read_trace_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("read_trace_jsonl: cannot open " + path);

    Trace trace;
    // Recover run identity from the canonical file name.
    const std::string stem = fs::path(path).stem().string();
    const std::size_t a = stem.find("__");
    const std::size_t b = a == std::string::npos ? std::string::npos : stem.find("__", a + 2);
    if (b != std::string::npos) {
        trace.problem_id = stem.substr(0, a);
        trace.optimizer_id = stem.substr(a + 2, b - a - 2);
    }

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        Evaluation ev;
        const auto theta = j.at("theta").get<std::vector<double>>();
        ev.theta = Eigen::Map<const VectorXd>(theta.data(), static_cast<int>(theta.size()));
        if (!j.at("objective").is_null()) ev.objective = j.at("objective").get<double>();
        ev.crashed = j.at("crashed").get<bool>();
        if (!j.at("fallback").is_null()) ev.fallback_objective = j.at("fallback").get<double>();
        ev.wall_time = j.at("wall_time").get<double>();
        trace.evaluations.push_back(std::move(ev));
    }
    return trace;
}

bool traces_equal_modulo_wall_time(const std::string& path_a, const std::string& path_b,
                                   std::string* diff) {
    std::ifstream a(path_a), b(path_b);
    if (!a || !b) {
        if (diff) *diff = "cannot open one of the files";
        return false;
    }
    std::string la, lb;
    int lineno = 0;
    for (;;) {
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool gb = static_cast<bool>(std::getline(b, lb));
        if (!ga && !gb) return true;
        ++lineno;
        if (ga != gb) {
            if (diff) *diff = "line count differs at line " + std::to_string(lineno);
            return false;
        }
        json ja = json::parse(la);
        json jb = json::parse(lb);
        ja.erase("wall_time");
        jb.erase("wall_time");
        if (ja != jb) {
            if (diff)
                *diff = "line " + std::to_string(lineno) + ": " + ja.dump() + " vs " + jb.dump();
            return false;
        }
    }
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

namespace {

struct Task {
    int problem_index;
    int optimizer_index;
    int seed_index;
};

VectorXd nudge_inside(const Domain& domain, VectorXd theta) {
    for (int i = 0; i < theta.size(); ++i) {
        const double span = domain.upper[i] - domain.lower[i];
        const double eps = 1e-6 * span;
        theta[i] = std::clamp(theta[i], domain.lower[i] + eps, domain.upper[i] - eps);
    }
    return theta;
}

void atomic_write(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DomainError("cannot open " + tmp.string());
        out << contents;
    }
    fs::rename(tmp, path);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& registry_path) {
    if (config.problems.empty() || config.optimizers.empty())
        throw DomainError("run_experiment: problems and optimizers must be non-empty");
    if (config.seeds < 1 || config.budget_multiplier < 1)
        throw DomainError("run_experiment: seeds and budget_multiplier must be positive");

    // Fail on any unknown name before running anything.
    std::vector<OptimizerSpec> optimizers;
    for (const std::string& name : config.optimizers)
        optimizers.push_back(parse_optimizer(name));
    std::vector<Problem> problems;
    for (const std::string& id : config.problems) problems.push_back(testbed::problem_by_id(id));
    if (!registry_path.empty()) testbed::apply_registry(registry_path, problems);

    fs::create_directories(config.output_dir);

    std::vector<Task> tasks;
    for (int p = 0; p < static_cast<int>(problems.size()); ++p)
        for (int s = 0; s < config.seeds; ++s)
            for (int o = 0; o < static_cast<int>(optimizers.size()); ++o)
                tasks.push_back({p, o, s});

    ExperimentResult result;
    result.results_dir = config.output_dir;
    result.runs.resize(tasks.size());

    auto run_task = [&](std::size_t t) {
        const Task& task = tasks[t];
        const Problem& problem = problems[static_cast<std::size_t>(task.problem_index)];
        const OptimizerSpec& opt = optimizers[static_cast<std::size_t>(task.optimizer_index)];
        const int d = problem.domain.dim();
        const int budget = config.budget_multiplier * d;

        RunResult& rr = result.runs[t];
        rr.problem = problem.id;
        rr.optimizer = opt.name;
        rr.seed_index = task.seed_index;
        rr.seed = SeedMixer(config.master_seed)
                      .mix(problem.id)
                      .mix(static_cast<std::uint64_t>(task.seed_index))
                      .mix(opt.name)
                      .seed();
        rr.trace_file = trace_filename(problem.id, opt.name, task.seed_index);

        try {
            Trace trace;
            if (opt.family == OptimizerSpec::Family::Grid) {
                trace = baselines::grid_search(problem, baselines::grid_levels(d), rr.seed);
            } else {
                const std::uint64_t design_seed = SeedMixer(config.master_seed)
                                                      .mix(problem.id)
                                                      .mix(static_cast<std::uint64_t>(task.seed_index))
                                                      .mix("design")
                                                      .seed();
                const MatrixXd shared = bo::initial_design(d, design_seed);
                switch (opt.family) {
                    case OptimizerSpec::Family::Rand:
                        trace = baselines::random_search(problem, budget, rr.seed, shared);
                        break;
                    case OptimizerSpec::Family::PS:
                        trace = baselines::pattern_search(problem, budget, rr.seed, shared);
                        break;
                    default:
                        trace = bo::run(problem, opt.bo, budget, rr.seed, shared, opt.name);
                        break;
                }
            }
            write_trace_jsonl((fs::path(config.output_dir) / rr.trace_file).string(), trace);
            rr.ok = true;
        } catch (const std::exception& e) {
            rr.ok = false;
            rr.error = e.what();
        }
    };

    const int workers = std::min<int>(resolve_parallelism(config.parallelism),
                                      static_cast<int>(tasks.size()));
    if (workers <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= tasks.size()) return;
                    run_task(t);
                }
            });
        for (std::thread& th : pool) th.join();
    }
    for (const RunResult& rr : result.runs)
        if (!rr.ok) ++result.failures;

    // Reference optimum per problem: registry record, else the best
    // successful evaluation this experiment produced (scanned in task order
    // for determinism).
    std::vector<std::optional<KnownBest>> theta_stars(problems.size());
    for (std::size_t p = 0; p < problems.size(); ++p) theta_stars[p] = problems[p].known_best;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (!result.runs[t].ok) continue;
        const std::size_t p = static_cast<std::size_t>(tasks[t].problem_index);
        if (problems[p].known_best) continue;  // registry value wins
        const Trace trace =
            read_trace_jsonl((fs::path(config.output_dir) / result.runs[t].trace_file).string());
        const auto inc = incumbent(trace);
        if (!inc) continue;
        if (!theta_stars[p] || inc->objective < theta_stars[p]->objective)
            theta_stars[p] = KnownBest{inc->theta, inc->objective};
    }

    // Landscape analysis, cached next to the traces so that report generation
    // never re-runs (and re-times) the simulators.
    ordered_json landscape_doc;
    landscape_doc["format"] = "ccbo-landscape-v1";
    landscape_doc["problems"] = ordered_json::array();
    for (std::size_t p = 0; p < problems.size(); ++p) {
        ordered_json entry;
        entry["id"] = problems[p].id;
        if (!theta_stars[p]) {
            entry["error"] = "no successful evaluation available as reference optimum";
        } else {
            const VectorXd theta_star = nudge_inside(problems[p].domain, theta_stars[p]->theta);
            const std::uint64_t lseed =
                SeedMixer(config.master_seed).mix(problems[p].id).mix("landscape").seed();
            const landscape::LandscapeReport rep =
                landscape::analyze(problems[p], theta_star, 10, 51, lseed);
            entry["s_opt"] = rep.s_opt;
            entry["p_crash"] = rep.p_crash;
            entry["t_sim"] = rep.t_sim;
            entry["n_total"] = rep.n_total;
            entry["theta_star"] =
                std::vector<double>(theta_star.data(), theta_star.data() + theta_star.size());
        }
        landscape_doc["problems"].push_back(std::move(entry));
    }
    atomic_write(fs::path(config.output_dir) / "landscape.json", landscape_doc.dump(2) + "\n");

    // Master index, written last and atomically: its presence marks a
    // complete experiment.
    ordered_json index;
    index["format"] = "ccbo-results-v1";
    index["config"] = config_to_json(config);
    index["problems"] = ordered_json::array();
    for (std::size_t p = 0; p < problems.size(); ++p) {
        ordered_json entry;
        entry["id"] = problems[p].id;
        entry["dim"] = problems[p].domain.dim();
        entry["budget"] = config.budget_multiplier * problems[p].domain.dim();
        entry["grid_levels"] = baselines::grid_levels(problems[p].domain.dim());
        if (problems[p].known_best)
            entry["known_best"] = problems[p].known_best->objective;
        else
            entry["known_best"] = nullptr;
        index["problems"].push_back(std::move(entry));
    }
    index["runs"] = ordered_json::array();
    for (const RunResult& rr : result.runs) {
        ordered_json entry;
        entry["problem"] = rr.problem;
        entry["optimizer"] = rr.optimizer;
        entry["seed_index"] = rr.seed_index;
        entry["seed"] = rr.seed;
        entry["file"] = rr.trace_file;
        entry["ok"] = rr.ok;
        entry["error"] = rr.error;
        index["runs"].push_back(std::move(entry));
    }
    atomic_write(fs::path(config.output_dir) / "index.json", index.dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

namespace {

struct RunData {
    int seed_index = 0;
    std::vector<double> best;  // best-so-far after each evaluation (NaN before
                               // the first success)
};

struct ProblemData {
    std::string id;
    int dim = 0;
    int budget = 0;
    std::optional<double> known_best;
    // optimizer -> seed_index -> best-so-far series
    std::map<std::string, std::map<int, std::vector<double>>> runs;
    double kb = 0.0;     // effective reference optimum
    double denom = 1.0;  // scaled-regret denominator
    std::vector<int> block_seeds;  // seeds where every optimizer succeeded
};

double best_at(const std::vector<double>& best, int k) {
    if (best.empty()) return std::numeric_limits<double>::quiet_NaN();
    const int i = std::min<int>(k, static_cast<int>(best.size())) - 1;
    return best[static_cast<std::size_t>(std::max(i, 0))];
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

void write_svg_curves(const fs::path& path, const ProblemData& pd,
                      const std::vector<std::string>& optimizers,
                      const std::map<std::string, std::vector<double>>& median_curves) {
    const double W = 760, H = 480, L = 70, R = 600, T = 24, B = 430;

    double vmax = 1.0;
    for (const auto& [name, curve] : median_curves)
        for (double v : curve)
            if (std::isfinite(v)) vmax = std::max(vmax, v);
    const double log_lo = -3.0;  // clip below 1e-3
    const double log_hi = std::ceil(std::log10(vmax));

    const double x_max = static_cast<double>(pd.budget) / pd.dim;
    auto xpix = [&](double k_over_d) { return L + (R - L) * k_over_d / x_max; };
    auto ypix = [&](double v) {
        const double lv = std::clamp(std::log10(std::max(v, 1e-300)), log_lo, log_hi);
        return B - (B - T) * (lv - log_lo) / (log_hi - log_lo);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << (L + (R - L) / 2) << "\" y=\"16\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << pd.id
        << ": median scaled regret</text>\n";

    // Axes and gridlines.
    for (int e = static_cast<int>(log_lo); e <= static_cast<int>(log_hi); ++e) {
        const double y = ypix(std::pow(10.0, e));
        svg << "<line x1=\"" << L << "\" y1=\"" << fmt_fixed(y, 1) << "\" x2=\"" << R
            << "\" y2=\"" << fmt_fixed(y, 1) << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << (L - 8) << "\" y=\"" << fmt_fixed(y + 4, 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
            << "</text>\n";
    }
    const int x_step = x_max > 10 ? 5 : 1;
    for (int k = 0; k <= static_cast<int>(x_max); k += x_step) {
        const double x = xpix(k);
        svg << "<line x1=\"" << fmt_fixed(x, 1) << "\" y1=\"" << T << "\" x2=\""
            << fmt_fixed(x, 1) << "\" y2=\"" << B << "\" stroke=\"#eeeeee\"/>\n";
        svg << "<text x=\"" << fmt_fixed(x, 1) << "\" y=\"" << (B + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << k
            << "</text>\n";
    }
    svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (R - L) << "\" height=\""
        << (B - T) << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (L + (R - L) / 2) << "\" y=\"" << (B + 36)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">evaluations "
           "per dimension k/d</text>\n";

    int color = 0;
    for (const std::string& name : optimizers) {
        const auto it = median_curves.find(name);
        if (it == median_curves.end()) continue;
        const char* c = kPalette[color % (sizeof kPalette / sizeof *kPalette)];
        std::ostringstream pts;
        for (std::size_t k = 0; k < it->second.size(); ++k) {
            const double v = it->second[k];
            if (!std::isfinite(v)) continue;
            const double kd = static_cast<double>(k + 1) / pd.dim;
            pts << fmt_fixed(xpix(kd), 1) << "," << fmt_fixed(ypix(v), 1) << " ";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\""
            << pts.str() << "\"/>\n";
        const double ly = T + 16 + 18 * color;
        svg << "<line x1=\"" << (R + 10) << "\" y1=\"" << fmt_fixed(ly - 4, 1) << "\" x2=\""
            << (R + 34) << "\" y2=\"" << fmt_fixed(ly - 4, 1) << "\" stroke=\"" << c
            << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << (R + 40) << "\" y=\"" << fmt_fixed(ly, 1)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
        ++color;
    }
    svg << "</svg>\n";
    atomic_write(path, svg.str());
}

}  // namespace

void report(const std::string& results_dir) {
    const fs::path dir(results_dir);
    std::ifstream index_in(dir / "index.json");
    if (!index_in) throw DomainError("report: no index.json in " + results_dir);
    json index;
    index_in >> index;

    const auto problems_cfg = index.at("config").at("problems").get<std::vector<std::string>>();
    const auto optimizers = index.at("config").at("optimizers").get<std::vector<std::string>>();
    const int seeds = index.at("config").at("seeds").get<int>();
    if (index.at("runs").empty()) throw DomainError("report: results directory has no runs");

    std::map<std::string, ProblemData> data;
    for (const auto& p : index.at("problems")) {
        ProblemData pd;
        pd.id = p.at("id").get<std::string>();
        pd.dim = p.at("dim").get<int>();
        pd.budget = p.at("budget").get<int>();
        if (!p.at("known_best").is_null()) pd.known_best = p.at("known_best").get<double>();
        data[pd.id] = std::move(pd);
    }

    for (const auto& r : index.at("runs")) {
        if (!r.at("ok").get<bool>()) continue;
        const std::string problem = r.at("problem").get<std::string>();
        const Trace trace = read_trace_jsonl((dir / r.at("file").get<std::string>()).string());
        data.at(problem).runs[r.at("optimizer").get<std::string>()]
            [r.at("seed_index").get<int>()] = best_so_far(trace);
    }

    // Effective reference optimum and scaled-regret denominator per problem.
    for (const std::string& pid : problems_cfg) {
        ProblemData& pd = data.at(pid);
        if (pd.known_best) {
            pd.kb = *pd.known_best;
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [opt, per_seed] : pd.runs)
                for (const auto& [s, series] : per_seed)
                    for (double v : series)
                        if (std::isfinite(v)) best = std::min(best, v);
            if (!std::isfinite(best))
                throw DomainError("report: no successful evaluation on " + pid);
            pd.kb = best;
        }

        const auto rand_it = pd.runs.find("Rand");
        if (rand_it == pd.runs.end())
            throw DomainError("report: scaled regret requires Rand runs on " + pid);
        std::vector<double> rand_final;
        for (const auto& [s, series] : rand_it->second)
            rand_final.push_back(best_at(series, pd.budget));
        pd.denom = metrics::scaled_regret_denominator(rand_final, pd.kb);

        for (int s = 0; s < seeds; ++s) {
            bool complete = true;
            for (const std::string& opt : optimizers) {
                const auto it = pd.runs.find(opt);
                if (it == pd.runs.end() || it->second.count(s) == 0) {
                    complete = false;
                    break;
                }
            }
            if (complete) pd.block_seeds.push_back(s);
        }
    }

    // --- summary.csv ---------------------------------------------------
    {
        std::ostringstream csv;
        csv << "problem,optimizer,seed,k,best_so_far,scaled_regret\n";
        for (const std::string& pid : problems_cfg) {
            const ProblemData& pd = data.at(pid);
            for (const std::string& opt : optimizers) {
                const auto it = pd.runs.find(opt);
                if (it == pd.runs.end()) continue;
                for (const auto& [s, series] : it->second) {
                    for (std::size_t k = 0; k < series.size(); ++k) {
                        const double b = series[k];
                        csv << pid << "," << opt << "," << s << "," << (k + 1) << ",";
                        if (std::isfinite(b))
                            csv << fmt(b) << ","
                                << fmt(metrics::scaled_regret(b, pd.kb, pd.denom));
                        else
                            csv << ",";
                        csv << "\n";
                    }
                }
            }
        }
        atomic_write(dir / "summary.csv", csv.str());
    }

    // --- final scaled-regret table with significance marks ---------------
    {
        // samples[pid][opt] = final scaled regret over block seeds
        std::map<std::string, std::map<std::string, std::vector<double>>> samples;
        std::map<std::string, std::string> best_opt;
        for (const std::string& pid : problems_cfg) {
            const ProblemData& pd = data.at(pid);
            double best_median = std::numeric_limits<double>::infinity();
            for (const std::string& opt : optimizers) {
                std::vector<double> v;
                for (int s : pd.block_seeds) {
                    const auto& series = pd.runs.at(opt).at(s);
                    const double b = best_at(series, static_cast<int>(series.size()));
                    v.push_back(std::isfinite(b)
                                    ? metrics::scaled_regret(b, pd.kb, pd.denom)
                                    : std::numeric_limits<double>::infinity());
                }
                samples[pid][opt] = v;
                if (!v.empty()) {
                    const double med = metrics::median(v);
                    if (med < best_median) {
                        best_median = med;
                        best_opt[pid] = opt;
                    }
                }
            }
        }

        std::ostringstream csv;
        csv << "problem,optimizer,median_scaled_regret,mark\n";
        std::ostringstream txt;
        txt << "Final median scaled regret (each optimizer at its full evaluation count)\n";
        txt << "'*' = best per problem; '~' = not significantly worse than the best\n";
        txt << "(one-sided rank-sum test at the 5% level)\n\n";
        txt << "optimizer      ";
        for (const std::string& pid : problems_cfg) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %18s", pid.c_str());
            txt << buf;
        }
        txt << "\n";

        for (const std::string& opt : optimizers) {
            char name[32];
            std::snprintf(name, sizeof name, "%-15s", opt.c_str());
            txt << name;
            for (const std::string& pid : problems_cfg) {
                const std::vector<double>& v = samples.at(pid).at(opt);
                std::string cell = "-";
                std::string mark;
                if (!v.empty()) {
                    const double med = metrics::median(v);
                    if (opt == best_opt.at(pid)) {
                        mark = "*";
                    } else {
                        // The rank-sum test needs at least 3 seeds per side;
                        // with fewer, skip the significance marker instead of
                        // refusing to produce the table.
                        const std::vector<double>& best_v = samples.at(pid).at(best_opt.at(pid));
                        if (best_v.size() >= 3 && v.size() >= 3) {
                            const double p = metrics::wilcoxon_one_sided(best_v, v);
                            if (p >= 0.05) mark = "~";
                        }
                    }
                    cell = fmt_fixed(med, 3) + mark;
                }
                char buf[32];
                std::snprintf(buf, sizeof buf, " %18s", cell.c_str());
                txt << buf;
                csv << pid << "," << opt << ","
                    << (v.empty() ? "" : fmt(metrics::median(v))) << "," << mark << "\n";
            }
            txt << "\n";
        }
        atomic_write(dir / "table_regret.csv", csv.str());
        atomic_write(dir / "table_regret.txt", txt.str());
    }

    // --- curves.csv + SVG charts ----------------------------------------
    {
        std::ostringstream csv;
        csv << "problem,optimizer,k,k_over_d,avg_rank,median_scaled_regret,q80_scaled_regret\n";
        for (const std::string& pid : problems_cfg) {
            const ProblemData& pd = data.at(pid);
            std::map<std::string, std::vector<double>> median_curves;

            // ranks per (seed, k) across optimizers
            std::map<std::string, std::vector<double>> rank_sum;
            for (const std::string& opt : optimizers)
                rank_sum[opt] = std::vector<double>(static_cast<std::size_t>(pd.budget), 0.0);
            for (int s : pd.block_seeds) {
                for (int k = 1; k <= pd.budget; ++k) {
                    std::vector<double> vals;
                    vals.reserve(optimizers.size());
                    for (const std::string& opt : optimizers) {
                        const double b = best_at(pd.runs.at(opt).at(s), k);
                        vals.push_back(std::isfinite(b) ? b
                                                        : std::numeric_limits<double>::infinity());
                    }
                    const std::vector<double> ranks = metrics::rank_with_ties(vals);
                    for (std::size_t o = 0; o < optimizers.size(); ++o)
                        rank_sum[optimizers[o]][static_cast<std::size_t>(k - 1)] += ranks[o];
                }
            }

            for (const std::string& opt : optimizers) {
                std::vector<double>& med_curve = median_curves[opt];
                med_curve.resize(static_cast<std::size_t>(pd.budget));
                for (int k = 1; k <= pd.budget; ++k) {
                    std::vector<double> scaled;
                    for (int s : pd.block_seeds) {
                        const double b = best_at(pd.runs.at(opt).at(s), k);
                        if (std::isfinite(b))
                            scaled.push_back(metrics::scaled_regret(b, pd.kb, pd.denom));
                        else
                            scaled.push_back(std::numeric_limits<double>::infinity());
                    }
                    double med = std::numeric_limits<double>::quiet_NaN();
                    double q80 = std::numeric_limits<double>::quiet_NaN();
                    if (!scaled.empty()) {
                        med = metrics::median(scaled);
                        q80 = metrics::quantile(scaled, 0.8);
                    }
                    med_curve[static_cast<std::size_t>(k - 1)] = med;
                    const double n_seeds = static_cast<double>(pd.block_seeds.size());
                    const double avg_rank =
                        n_seeds > 0 ? rank_sum[opt][static_cast<std::size_t>(k - 1)] / n_seeds
                                    : std::numeric_limits<double>::quiet_NaN();
                    csv << pid << "," << opt << "," << k << ","
                        << fmt(static_cast<double>(k) / pd.dim) << ",";
                    if (std::isfinite(avg_rank)) csv << fmt(avg_rank);
                    csv << ",";
                    if (std::isfinite(med)) csv << fmt(med);
                    csv << ",";
                    if (std::isfinite(q80)) csv << fmt(q80);
                    csv << "\n";
                }
            }
            write_svg_curves(dir / ("curves_" + pid + ".svg"), pd, optimizers, median_curves);
        }
        atomic_write(dir / "curves.csv", csv.str());
    }

    // --- landscape table --------------------------------------------------
    {
        std::ifstream lin(dir / "landscape.json");
        if (lin) {
            json ldoc;
            lin >> ldoc;
            std::ostringstream csv;
            csv << "problem,s_opt,p_crash,t_sim_seconds\n";
            std::ostringstream txt;
            txt << "Landscape analysis (10 random subspaces x 51 points per problem)\n\n";
            txt << "problem              s_opt   p_crash   t_sim[s]\n";
            for (const auto& entry : ldoc.at("problems")) {
                const std::string pid = entry.at("id").get<std::string>();
                if (entry.contains("error")) {
                    csv << pid << ",,,\n";
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "%-20s %s\n", pid.c_str(),
                                  entry.at("error").get<std::string>().c_str());
                    txt << buf;
                    continue;
                }
                const double s_opt = entry.at("s_opt").get<double>();
                const double p_crash = entry.at("p_crash").get<double>();
                const double t_sim = entry.at("t_sim").get<double>();
                csv << pid << "," << fmt(s_opt) << "," << fmt(p_crash) << "," << fmt(t_sim)
                    << "\n";
                char buf[128];
                std::snprintf(buf, sizeof buf, "%-20s %5.2f   %7.2f   %8.2e\n", pid.c_str(),
                              s_opt, p_crash, t_sim);
                txt << buf;
            }
            atomic_write(dir / "landscape.csv", csv.str());
            atomic_write(dir / "landscape.txt", txt.str());
        }
    }
}

}  // namespace ccbo::harness
