#pragma once

#include <array>
#include <string>
#include <vector>

#include "ccbo/core.hpp"

namespace ccbo::testbed {

// Physical and numerical parameters of the cart-pole plant. The pole starts
// with a small tilt so that an uncontrolled or badly controlled system
// actually falls; with a perfectly upright start the open-loop plant would
// sit on an unstable equilibrium forever.
struct CartPoleParams {
    double cart_mass = 1.0;         // kg
    double pole_mass = 0.1;         // kg
    double pole_half_length = 0.5;  // m
    double gravity = 9.81;          // m/s^2
    double horizon = 10.0;          // s, per reference step
    double dt = 1e-3;               // s
    std::array<double, 2> reference_steps{0.5, 1.0};  // m
    double initial_tilt = 0.05;     // rad
};

// Trapezoidal approximation of the time-weighted absolute error integral
// over samples e(0), e(dt), ..., e(N*dt).
double itae(const std::vector<double>& error, double dt);

struct CartPoleOutcome {
    double objective = 0.0;
    bool crashed = false;
};

// Closed-loop cost of full state feedback u = -(k_x e_x + k_xd e_xd +
// k_phi e_phi + k_phid e_phid) over both reference steps. The force is held
// constant across the four integrator stages of each step (zero-order hold).
// A crash is |phi| > pi/2 (or a non-finite state) at any step of either
// episode; `detect_crash = false` runs the full horizon regardless, which is
// how the open-loop fallback constant is defined.
CartPoleOutcome cartpole_objective(const CartPoleParams& params,
                                   const Eigen::Vector4d& gains, bool detect_crash = true);

// Cost of the uncontrolled plant (all gains zero, crash detection off); used
// as the fallback objective of every crashed cart-pole evaluation.
double cartpole_open_loop_objective(const CartPoleParams& params);

enum class CartPoleMode { d2, d4 };

// d2: optimize the two pole gains (k_phi, k_phid) with the cart-position
// gains held at fixed stabilizing values; d4: optimize all four gains.
Problem cartpole_problem(const CartPoleParams& params = {}, CartPoleMode mode = CartPoleMode::d2);

enum class SyntheticBase { SphereCrash, RosenbrockCrash, NoisyBowl };

struct SyntheticSpec {
    SyntheticBase base = SyntheticBase::SphereCrash;
    int dimension = 2;
    double noise_amplitude = 0.25;  // NoisyBowl only
    double noise_frequency = 23.0;  // NoisyBowl only
};

Problem synthetic_problem(const SyntheticSpec& spec);

// Identifiers of every problem this library can construct by name.
std::vector<std::string> builtin_problem_ids();

// Constructs a problem from its identifier (for example "cartpole-d2" or
// "sphere-crash-d3"), attaching the built-in known-best record if one exists.
Problem problem_by_id(const std::string& id);

// Best evaluation recorded during the one-time reference campaign, if this
// problem has one on file.
std::optional<KnownBest> builtin_known_best(const std::string& id);

// Problem registry file: JSON document listing id, box, construction
// parameters, and known-best record per problem.
void write_registry(const std::string& path, const std::vector<Problem>& problems);

// Overwrites known_best of matching problems with the registry's records
// after validating that the boxes agree. Returns the number of records
// applied. Unknown ids in the file are ignored.
int apply_registry(const std::string& path, std::vector<Problem>& problems);

}  // namespace ccbo::testbed
