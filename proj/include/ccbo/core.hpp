#pragma once
// Problem abstraction, box domains, evaluation records, and budget
// accounting shared by every optimizer in the library.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccbo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoFeasibleData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis-aligned box of admissible parameters.
struct Domain {
    VectorXd lower;
    VectorXd upper;

    Domain() = default;
    Domain(VectorXd lo, VectorXd hi);

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(const VectorXd& theta, double tol = 0.0) const;
};

// Maps a point of the box to the unit cube and back. All optimizers operate
// internally on [0,1]^d; raw coordinates appear only in problem evaluation
// and persisted traces.
VectorXd normalize(const Domain& domain, const VectorXd& theta);
VectorXd denormalize(const Domain& domain, const VectorXd& unit);

// One query of the objective. `crashed == false` implies a finite objective;
// `crashed == true` implies no objective, while `fallback_objective` may carry
// the problem's native substitute value (used by fallback-mode optimizers).
struct Evaluation {
    VectorXd theta;  // raw (unnormalized) coordinates
    std::optional<double> objective;
    bool crashed = false;
    std::optional<double> fallback_objective;
    double wall_time = 0.0;  // seconds
};

struct Trace {
    std::string problem_id;
    std::string optimizer_id;
    std::uint64_t seed = 0;
    std::vector<Evaluation> evaluations;
};

// Result of a raw evaluator call, before budget/wall-time bookkeeping.
struct EvalResult {
    std::optional<double> objective;
    bool crashed = false;
    std::optional<double> fallback_objective;
};

struct KnownBest {
    VectorXd theta;
    double objective = 0.0;
};

struct Problem {
    std::string id;
    Domain domain;
    std::function<EvalResult(const VectorXd&)> evaluator;  // deterministic, thread-safe
    std::optional<KnownBest> known_best;
};

class BudgetCounter {
public:
    explicit BudgetCounter(int budget) : budget_(budget) {}
    int budget() const { return budget_; }
    int used() const { return used_; }
    int remaining() const { return budget_ - used_; }
    bool exhausted() const { return used_ >= budget_; }
    void consume();  // throws BudgetExhausted when nothing remains

private:
    int budget_;
    int used_ = 0;
};

// Queries the problem at a raw point, consuming exactly one budget unit
// whether or not the run crashes. An evaluator exception is recorded as a
// crashed evaluation rather than propagated.
Evaluation evaluate(const Problem& problem, const VectorXd& theta, BudgetCounter& budget);

// Best successful evaluation of a trace (index + record); empty when every
// evaluation crashed.
struct Incumbent {
    std::size_t index;
    VectorXd theta;
    double objective;
};
std::optional<Incumbent> incumbent(const Trace& trace);

// Best-so-far objective after each evaluation (NaN until the first success).
std::vector<double> best_so_far(const Trace& trace);

}  // namespace ccbo
