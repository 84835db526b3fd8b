#include "ccbo/testbed.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "json.hpp"

namespace ccbo::testbed {

namespace {

using nlohmann::json;

// Cart-position gains held fixed in d2 mode: a stabilizing pair computed once
// from a linear-quadratic regulator of the upright linearization.
constexpr double kFixedCartGain = -3.16227766;
constexpr double kFixedCartVelGain = -4.46247054;

struct State {
    double x, xd, phi, phid;
};

State deriv(const CartPoleParams& p, const State& s, double F) {
    const double sinp = std::sin(s.phi);
    const double cosp = std::cos(s.phi);
    const double M = p.cart_mass + p.pole_mass;
    const double temp =
        (F + p.pole_mass * p.pole_half_length * s.phid * s.phid * sinp) / M;
    const double phidd = (p.gravity * sinp - cosp * temp) /
                         (p.pole_half_length * (4.0 / 3.0 - p.pole_mass * cosp * cosp / M));
    const double xdd = temp - p.pole_mass * p.pole_half_length * phidd * cosp / M;
    return {s.xd, xdd, s.phid, phidd};
}

struct EpisodeItae {
    double x = 0.0;
    double phi = 0.0;
    bool crashed = false;
};

EpisodeItae episode(const CartPoleParams& p, const Eigen::Vector4d& k, double xref,
                    bool detect_crash) {
    State s{0.0, 0.0, p.initial_tilt, 0.0};
    const double dt = p.dt;
    const int n = static_cast<int>(std::lround(p.horizon / dt));

    EpisodeItae out;
    double prev_ex = xref;
    double prev_eph = p.initial_tilt;
    for (int i = 0; i < n; ++i) {
        const double F =
            -(k[0] * (s.x - xref) + k[1] * s.xd + k[2] * s.phi + k[3] * s.phid);
        const State k1 = deriv(p, s, F);
        const State s2{s.x + 0.5 * dt * k1.x, s.xd + 0.5 * dt * k1.xd,
                       s.phi + 0.5 * dt * k1.phi, s.phid + 0.5 * dt * k1.phid};
        const State k2 = deriv(p, s2, F);
        const State s3{s.x + 0.5 * dt * k2.x, s.xd + 0.5 * dt * k2.xd,
                       s.phi + 0.5 * dt * k2.phi, s.phid + 0.5 * dt * k2.phid};
        const State k3 = deriv(p, s3, F);
        const State s4{s.x + dt * k3.x, s.xd + dt * k3.xd, s.phi + dt * k3.phi,
                       s.phid + dt * k3.phid};
        const State k4 = deriv(p, s4, F);
        s = State{s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                  s.xd + dt / 6.0 * (k1.xd + 2.0 * k2.xd + 2.0 * k3.xd + k4.xd),
                  s.phi + dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
                  s.phid + dt / 6.0 * (k1.phid + 2.0 * k2.phid + 2.0 * k3.phid + k4.phid)};

        const double t = (i + 1) * dt;
        const double ex = std::abs(xref - s.x);
        const double eph = std::abs(s.phi);
        out.x += 0.5 * dt * ((t - dt) * prev_ex + t * ex);
        out.phi += 0.5 * dt * ((t - dt) * prev_eph + t * eph);
        prev_ex = ex;
        prev_eph = eph;

        if (!std::isfinite(s.x) || !std::isfinite(s.xd) || !std::isfinite(s.phi) ||
            !std::isfinite(s.phid)) {
            out.crashed = true;
            break;
        }
        if (detect_crash && std::abs(s.phi) > M_PI / 2.0) {
            out.crashed = true;
            break;
        }
    }
    return out;
}

}  // namespace

double itae(const std::vector<double>& error, double dt) {
    if (!(dt > 0.0)) throw DomainError("itae: dt must be positive");
    if (error.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 1; i < error.size(); ++i) {
        const double t = static_cast<double>(i) * dt;
        acc += 0.5 * dt * ((t - dt) * std::abs(error[i - 1]) + t * std::abs(error[i]));
    }
    return acc;
}

CartPoleOutcome cartpole_objective(const CartPoleParams& params, const Eigen::Vector4d& gains,
                                   bool detect_crash) {
    double itae_x = 0.0;
    double itae_phi = 0.0;
    for (double xref : params.reference_steps) {
        const EpisodeItae ep = episode(params, gains, xref, detect_crash);
        if (ep.crashed) return {std::numeric_limits<double>::quiet_NaN(), true};
        itae_x += ep.x;
        itae_phi += ep.phi;
    }
    return {0.45 * itae_phi + 0.05 * itae_x, false};
}

double cartpole_open_loop_objective(const CartPoleParams& params) {
    const CartPoleOutcome out =
        cartpole_objective(params, Eigen::Vector4d::Zero(), /*detect_crash=*/false);
    if (out.crashed || !std::isfinite(out.objective))
        throw NumericalError("cartpole_open_loop_objective: open-loop simulation diverged");
    return out.objective;
}

Problem cartpole_problem(const CartPoleParams& params, CartPoleMode mode) {
    const double fallback = cartpole_open_loop_objective(params);

    Problem problem;
    if (mode == CartPoleMode::d2) {
        problem.id = "cartpole-d2";
        problem.domain = Domain{(VectorXd(2) << -95.0, -29.0).finished(),
                                (VectorXd(2) << -15.0, 1.0).finished()};
        problem.evaluator = [params, fallback](const VectorXd& theta) {
            Eigen::Vector4d gains(kFixedCartGain, kFixedCartVelGain, theta[0], theta[1]);
            const CartPoleOutcome out = cartpole_objective(params, gains);
            if (out.crashed) return EvalResult{std::nullopt, true, fallback};
            return EvalResult{out.objective, false, std::nullopt};
        };
    } else {
        problem.id = "cartpole-d4";
        problem.domain = Domain{(VectorXd(4) << -12.0, -14.0, -80.0, -26.0).finished(),
                                (VectorXd(4) << 0.0, 0.0, -15.0, -2.0).finished()};
        problem.evaluator = [params, fallback](const VectorXd& theta) {
            Eigen::Vector4d gains(theta[0], theta[1], theta[2], theta[3]);
            const CartPoleOutcome out = cartpole_objective(params, gains);
            if (out.crashed) return EvalResult{std::nullopt, true, fallback};
            return EvalResult{out.objective, false, std::nullopt};
        };
    }
    problem.known_best = builtin_known_best(problem.id);
    return problem;
}

namespace {

double sphere_center(int i) { return i % 2 == 0 ? -0.3 : 0.2; }
double bowl_center(int i) {
    static const double cycle[3] = {0.2, -0.4, 0.1};
    return cycle[i % 3];
}

}  // namespace

Problem synthetic_problem(const SyntheticSpec& spec) {
    const int d = spec.dimension;
    Problem problem;

    switch (spec.base) {
        case SyntheticBase::SphereCrash: {
            if (d < 2) throw DomainError("SphereCrash requires d >= 2");
            problem.id = "sphere-crash-d" + std::to_string(d);
            problem.domain = Domain{VectorXd::Constant(d, -1.0), VectorXd::Constant(d, 1.0)};
            const double fallback = 2.0 * d + 2.0;  // above any feasible value of this family
            problem.evaluator = [d, fallback](const VectorXd& theta) {
                const double s = theta[0] + theta[1];
                if (s > 0.8) return EvalResult{std::nullopt, true, fallback};
                double j = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double e = theta[i] - sphere_center(i);
                    j += e * e;
                }
                const double gap = 0.8 - s;
                if (gap > 0.0 && gap <= 0.15) j += 2.0;  // ledge along the crash border
                return EvalResult{j, false, std::nullopt};
            };
            break;
        }
        case SyntheticBase::RosenbrockCrash: {
            if (d < 2) throw DomainError("RosenbrockCrash requires d >= 2");
            problem.id = "rosenbrock-crash-d" + std::to_string(d);
            problem.domain = Domain{VectorXd::Constant(d, -2.0), VectorXd::Constant(d, 2.0)};
            const double fallback = 3700.0 * (d - 1);
            VectorXd center = VectorXd::Zero(d);
            center[0] = -0.5;
            center[1] = 0.25;
            problem.evaluator = [d, fallback, center](const VectorXd& theta) {
                if ((theta - center).norm() <= 0.6)
                    return EvalResult{std::nullopt, true, fallback};
                double j = 0.0;
                for (int i = 0; i + 1 < d; ++i) {
                    const double a = theta[i + 1] - theta[i] * theta[i];
                    const double b = 1.0 - theta[i];
                    j += 100.0 * a * a + b * b;
                }
                return EvalResult{j, false, std::nullopt};
            };
            break;
        }
        case SyntheticBase::NoisyBowl: {
            if (d < 1) throw DomainError("NoisyBowl requires d >= 1");
            problem.id = "noisy-bowl-d" + std::to_string(d);
            problem.domain = Domain{VectorXd::Constant(d, -1.0), VectorXd::Constant(d, 1.0)};
            const double fallback = 2.0 * d + 1.0;
            const double amp = spec.noise_amplitude;
            const double freq = spec.noise_frequency;
            problem.evaluator = [d, fallback, amp, freq](const VectorXd& theta) {
                if (theta[0] < -0.75) return EvalResult{std::nullopt, true, fallback};
                double j = 0.0;
                double sum = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double e = theta[i] - bowl_center(i);
                    j += e * e;
                    sum += theta[i];
                }
                j += amp * std::sin(freq * sum);
                return EvalResult{j, false, std::nullopt};
            };
            break;
        }
    }
    problem.known_best = builtin_known_best(problem.id);
    return problem;
}

std::vector<std::string> builtin_problem_ids() {
    return {"sphere-crash-d2",     "sphere-crash-d3",     "rosenbrock-crash-d2",
            "rosenbrock-crash-d3", "noisy-bowl-d2",       "noisy-bowl-d3",
            "cartpole-d2",         "cartpole-d4"};
}

namespace {

bool parse_suffix_dim(const std::string& id, const std::string& prefix, int* dim) {
    if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return false;
    const std::string rest = id.substr(prefix.size());
    if (rest.empty()) return false;
    for (char c : rest)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    *dim = std::stoi(rest);
    return true;
}

}  // namespace

Problem problem_by_id(const std::string& id) {
    if (id == "cartpole-d2") return cartpole_problem(CartPoleParams{}, CartPoleMode::d2);
    if (id == "cartpole-d4") return cartpole_problem(CartPoleParams{}, CartPoleMode::d4);

    int d = 0;
    if (parse_suffix_dim(id, "sphere-crash-d", &d))
        return synthetic_problem({SyntheticBase::SphereCrash, d});
    if (parse_suffix_dim(id, "rosenbrock-crash-d", &d))
        return synthetic_problem({SyntheticBase::RosenbrockCrash, d});
    if (parse_suffix_dim(id, "noisy-bowl-d", &d))
        return synthetic_problem({SyntheticBase::NoisyBowl, d});
    throw DomainError("unknown problem id: " + id);
}

namespace {

VectorXd make_vector(std::initializer_list<double> values) {
    VectorXd v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace

std::optional<KnownBest> builtin_known_best(const std::string& id) {
    // Best evaluation recorded during the one-time 1e5-evaluation reference
    // campaign (random search + pattern search); regenerate with the
    // `ccbo-registry` tool.
    static const std::map<std::string, KnownBest> table = {
        {"sphere-crash-d2", {make_vector({-0.29999999999999982, 0.19999999999999996}), 3.0814879110195774e-32}},
        {"sphere-crash-d3", {make_vector({-0.2999999999999996, 0.19999999999999973, -0.30000000000000071}), 7.488015623777573e-31}},
        {"rosenbrock-crash-d2", {make_vector({0.97243154377429342, 0.94535969996380897}), 0.000766958122580486}},
        {"rosenbrock-crash-d3", {make_vector({1.0119747831434989, 1.0241389118548705, 1.0489166081519992}), 0.0007266083299433231}},
        {"noisy-bowl-d2", {make_vector({0.26535781776117884, -0.33464177986087718}), -0.24139205260067273}},
        {"noisy-bowl-d3", {make_vector({0.20738337587966926, -0.38981977085719999, 0.11414609234710116}), -0.24964173498548786}},
        {"cartpole-d2", {make_vector({-37.594284386365473, -9.700026622605062}), 0.1666063496284626}},
        {"cartpole-d4", {make_vector({-12, -11.217371050329849, -60.582613546951052, -15.349853515625}), 0.13887478948369542}},
    };
    const auto it = table.find(id);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

namespace {

json construction_info(const std::string& id) {
    json info;
    if (id.rfind("cartpole-", 0) == 0) {
        const CartPoleParams p;
        info["family"] = "cartpole";
        info["cart_mass"] = p.cart_mass;
        info["pole_mass"] = p.pole_mass;
        info["pole_half_length"] = p.pole_half_length;
        info["gravity"] = p.gravity;
        info["horizon"] = p.horizon;
        info["dt"] = p.dt;
        info["reference_steps"] = {p.reference_steps[0], p.reference_steps[1]};
        info["initial_tilt"] = p.initial_tilt;
        info["crash_condition"] = "|phi| > pi/2";
        info["fallback"] = "open-loop objective";
        if (id == "cartpole-d2") {
            info["fixed_cart_gains"] = {kFixedCartGain, kFixedCartVelGain};
            info["optimized_gains"] = {"k_phi", "k_phid"};
        } else {
            info["optimized_gains"] = {"k_x", "k_xd", "k_phi", "k_phid"};
        }
    } else if (id.rfind("sphere-crash-", 0) == 0) {
        info["family"] = "sphere-crash";
        info["crash_condition"] = "theta_0 + theta_1 > 0.8";
        info["ledge"] = "+2.0 where 0 < 0.8 - (theta_0 + theta_1) <= 0.15";
        info["center"] = "alternating (-0.3, 0.2, ...)";
    } else if (id.rfind("rosenbrock-crash-", 0) == 0) {
        info["family"] = "rosenbrock-crash";
        info["crash_condition"] = "||theta - (-0.5, 0.25, 0, ...)|| <= 0.6";
    } else if (id.rfind("noisy-bowl-", 0) == 0) {
        info["family"] = "noisy-bowl";
        info["crash_condition"] = "theta_0 < -0.75";
        info["noise"] = "0.25 * sin(23 * sum(theta))";
        info["center"] = "cycling (0.2, -0.4, 0.1, ...)";
    }
    return info;
}

}  // namespace

void write_registry(const std::string& path, const std::vector<Problem>& problems) {
    json doc;
    doc["format"] = "ccbo-registry-v1";
    doc["problems"] = json::array();
    for (const Problem& p : problems) {
        json entry;
        entry["id"] = p.id;
        entry["lower"] = std::vector<double>(p.domain.lower.data(),
                                             p.domain.lower.data() + p.domain.lower.size());
        entry["upper"] = std::vector<double>(p.domain.upper.data(),
                                             p.domain.upper.data() + p.domain.upper.size());
        if (p.known_best) {
            entry["known_best"]["theta"] = std::vector<double>(
                p.known_best->theta.data(), p.known_best->theta.data() + p.known_best->theta.size());
            entry["known_best"]["objective"] = p.known_best->objective;
        } else {
            entry["known_best"] = nullptr;
        }
        entry["construction"] = construction_info(p.id);
        doc["problems"].push_back(std::move(entry));
    }
    std::ofstream out(path);
    if (!out) throw DomainError("write_registry: cannot open " + path);
    out << doc.dump(2) << "\n";
}

int apply_registry(const std::string& path, std::vector<Problem>& problems) {
    std::ifstream in(path);
    if (!in) throw DomainError("apply_registry: cannot open " + path);
    json doc;
    in >> doc;
    if (doc.value("format", "") != "ccbo-registry-v1")
        throw DomainError("apply_registry: unrecognized registry format in " + path);

    std::map<std::string, json> by_id;
    for (const auto& entry : doc.at("problems")) by_id[entry.at("id")] = entry;

    int applied = 0;
    for (Problem& p : problems) {
        const auto it = by_id.find(p.id);
        if (it == by_id.end()) continue;
        const json& entry = it->second;

        const auto lower = entry.at("lower").get<std::vector<double>>();
        const auto upper = entry.at("upper").get<std::vector<double>>();
        if (static_cast<int>(lower.size()) != p.domain.dim())
            throw DomainError("apply_registry: box dimension mismatch for " + p.id);
        for (int i = 0; i < p.domain.dim(); ++i)
            if (std::abs(lower[static_cast<std::size_t>(i)] - p.domain.lower[i]) > 1e-9 ||
                std::abs(upper[static_cast<std::size_t>(i)] - p.domain.upper[i]) > 1e-9)
                throw DomainError("apply_registry: box mismatch for " + p.id);

        if (entry.at("known_best").is_null()) continue;
        KnownBest kb;
        const auto theta = entry.at("known_best").at("theta").get<std::vector<double>>();
        kb.theta = Eigen::Map<const VectorXd>(theta.data(), static_cast<int>(theta.size()));
        kb.objective = entry.at("known_best").at("objective").get<double>();
        p.known_best = kb;
        ++applied;
    }
    return applied;
}

}  // namespace ccbo::testbed
