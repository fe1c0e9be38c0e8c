#ifndef BECLAB_GP_HPP
#define BECLAB_GP_HPP

#include <optional>
#include <string>

#include "beclab/grid.hpp"
#include "beclab/potentials.hpp"

namespace beclab {

struct FlowParams {
    double timeStep = 0.0;  // 0 = choose from the stability bound, then keep fixed
    long maxIterations = 500000;
    double energyTolerance = 1e-12;
    double residualTolerance = 1e-7;
};

struct EnergyBreakdown {
    double kinetic = 0.0;
    double trap = 0.0;
    double interaction = 0.0;
};

// Minimizer of the one-particle energy functional together with its
// bookkeeping: energy = kinetic + trap + interaction, mu = energy + interaction.
struct NlsSolution {
    GridFunction phi;
    double energy = 0.0;
    EnergyBreakdown components{};
    double chemicalPotential = 0.0;
    double residualNorm = 0.0;
    long iterations = 0;
    bool boundaryMassHigh = false;   // phi exceeded 1e-6 at the box edge
    double maxEnergyIncrease = 0.0;  // largest per-step energy increase seen (monotonicity check)
};

// Ground state of  integral(|grad phi|^2 + V phi^2 + g phi^4)  by normalized
// imaginary-time gradient flow with a fixed explicit step.
NlsSolution minimize_nls(const TrapPotential& V, double g, const Grid& grid,
                         const FlowParams& params, const GridFunction* initialGuess = nullptr);

// Ground state of the nonlocal functional
//   integral(|grad phi|^2 + V phi^2) + double-integral(phi^2 v0(r-r') phi^2),
// pair term written without the 1/2, as the energy functional is stated.
NlsSolution minimize_hartree(const TrapPotential& V, const PairPotential& v0, const Grid& grid,
                             const FlowParams& params, const GridFunction* initialGuess = nullptr);

// L2 norm of  -Lap phi + lambdaTrap V phi + 2 g phi^3 - mu phi  over interior points.
double nls_residual(const GridFunction& phi, double mu, const TrapPotential& V, double g,
                    double lambdaTrap = 1.0);

enum class PerturbedTerm { trap, interaction };

// Minimizes the functional with lambda V (trap) or lambda g (interaction).
NlsSolution perturbed_nls_energy(PerturbedTerm which, double lambda, const TrapPotential& V,
                                 double g, const Grid& grid, const FlowParams& params,
                                 const GridFunction* initialGuess = nullptr);

struct HellmannFeynmanResult {
    double lhs = 0.0;  // centered finite difference of E(lambda)
    double rhs = 0.0;  // component integral at lambda
    double gap = 0.0;
};

HellmannFeynmanResult hellmann_feynman_check(PerturbedTerm which, double lambda, double delta,
                                             const TrapPotential& V, double g, const Grid& grid,
                                             const FlowParams& params);

// Value of the energy functional at a trial state (variational upper-bound checks).
double nls_energy_of(const GridFunction& phi, const TrapPotential& V, double g,
                     double lambdaTrap = 1.0);

} // namespace beclab

#endif
