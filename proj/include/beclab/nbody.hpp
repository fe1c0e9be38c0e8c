#ifndef BECLAB_NBODY_HPP
#define BECLAB_NBODY_HPP

#include <vector>

#include "beclab/gp.hpp"
#include "beclab/grid.hpp"
#include "beclab/potentials.hpp"

namespace beclab {

inline constexpr std::size_t kDefaultPointBudget = 10'000'000;

struct NBodyComponents {
    double kinetic1 = 0.0;      // integral |grad_1 Psi|^2
    double trap1 = 0.0;         // integral V(r1) Psi^2
    double interaction1 = 0.0;  // 1/2 sum_{j>=2} integral v_N(r1-rj) Psi^2
};

// Bosonic ground state of the N-body Hamiltonian on the tensor grid (d = 1).
struct NBodyState {
    GridFunction psi;  // normalized, symmetric, positive
    double energy = 0.0;
    NBodyComponents componentsPerParticle{};
    double kineticFull = 0.0;  // integral |grad Psi|^2 over all coordinates
    int N = 0;
    double beta = 0.0;
    double lambdaTrap = 1.0;
    double lambdaInteraction = 1.0;
    double residualNorm = 0.0;
    long iterations = 0;
    double maxEnergyIncrease = 0.0;
    double maxAsymmetry = 0.0;  // sup-norm deviation under transpositions at the solution
    std::vector<double> trapTable;  // V on the per-particle axis
    std::vector<double> pairTable;  // v_N on the (2n-1)-point difference axis
};

// Exact projection onto the symmetric (bosonic) sector: average over all
// coordinate transpositions, built recursively so N=4 costs 9 passes.
void symmetrize(GridFunction& f);

// Sup-norm asymmetry under adjacent transpositions (cheap symmetry audit).
double symmetry_defect(const GridFunction& f);

NBodyState minimize_nbody(const TrapPotential& V, const PairPotential& v0, int N, double beta,
                          const Grid& grid, const FlowParams& params,
                          std::size_t pointBudget = kDefaultPointBudget,
                          const GridFunction* initialGuess = nullptr, double lambdaTrap = 1.0,
                          double lambdaInteraction = 1.0);

// Same minimization warm-started through a dyadic grid chain ending at `grid`
// (n must be reachable as 2^k (n0 - 1) + 1 from a small n0).
NBodyState minimize_nbody_multilevel(const TrapPotential& V, const PairPotential& v0, int N,
                                     double beta, const Grid& grid, const FlowParams& params,
                                     std::size_t pointBudget = kDefaultPointBudget);

// Integrates out coordinates k+1..N; returns the mass-normalized density on grid^k.
GridFunction marginal_density(const NBodyState& state, int k);
GridFunction marginal_density(const GridFunction& rhoN, int k);

NBodyComponents nbody_energy_components(const NBodyState& state);

NBodyState perturbed_nbody_energy(PerturbedTerm which, double lambda, const TrapPotential& V,
                                  const PairPotential& v0, int N, double beta, const Grid& grid,
                                  const FlowParams& params,
                                  std::size_t pointBudget = kDefaultPointBudget,
                                  const GridFunction* initialGuess = nullptr);

// First-coordinate block of the Nelson drift of rho_N = Psi^2 (d = 1: one array).
std::vector<double> nbody_drift_component(const NBodyState& state, double floor = 0.0);

// Drift along a single axis of an arbitrary density (shared with drift_from_density).
std::vector<double> drift_component_from_density(const GridFunction& rho, int axis, double floor);

// Density rho_N = Psi^2 as a GridFunction.
GridFunction nbody_density(const NBodyState& state);

// Dyadic prolongation n -> 2n-1 per axis by multilinear interpolation.
GridFunction prolong_dyadic(const GridFunction& coarse);

} // namespace beclab

#endif
