#ifndef BECLAB_ERRORS_HPP
#define BECLAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace beclab {

// Exit codes used by the CLI; library errors map onto these.
enum class ExitCode : int {
    ok = 0,
    config_error = 1,
    non_convergence = 2,
    property_violation = 3,
    budget_refusal = 4,
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a minimizer exhausts maxIterations; carries the last iterate.
struct ConvergenceError : std::runtime_error {
    double lastEnergy;
    double lastResidual;
    long iterations;
    std::vector<double> lastIterate;
    ConvergenceError(const std::string& msg, double energy, double residual, long iters,
                     std::vector<double> iterate = {})
        : std::runtime_error(msg), lastEnergy(energy), lastResidual(residual), iterations(iters),
          lastIterate(std::move(iterate)) {}
};

// Tensor-grid problem larger than the configured point budget.
struct BudgetError : std::runtime_error {
    std::size_t requested;
    std::size_t budget;
    BudgetError(const std::string& msg, std::size_t req, std::size_t bud)
        : std::runtime_error(msg), requested(req), budget(bud) {}
};

struct CacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationError : std::runtime_error {
    long trajectory;
    long step;
    SimulationError(const std::string& msg, long traj, long s)
        : std::runtime_error(msg), trajectory(traj), step(s) {}
};

} // namespace beclab

#endif
