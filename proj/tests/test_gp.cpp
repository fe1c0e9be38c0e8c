#include <doctest.h>

#include <cmath>

#include "beclab/fd.hpp"
#include "beclab/gp.hpp"
#include "oracles.hpp"

using namespace beclab;

namespace {
const TrapPotential kHarmonic = TrapPotential::harmonic();

// frozen by the shooting/bisection oracle (mesh 16000, L = 8): E and mu of
// the 1D equation -phi'' + x^2 phi + 2 g phi^3 = mu phi at g = 5
constexpr double kOracleEnergyG5 = 2.6321234;
constexpr double kOracleMuG5 = 4.0229209;
} // namespace

TEST_CASE("oscillator ground state: E = 1, mu = 1, Gaussian profile") {
    Grid grid(1, 8.0, 513);
    FlowParams p;
    NlsSolution sol = minimize_nls(kHarmonic, 0.0, grid, p);
    CHECK(std::abs(sol.energy - 1.0) < 1e-6);
    CHECK(std::abs(sol.chemicalPotential - 1.0) < 1e-5);
    CHECK(sol.maxEnergyIncrease <= 1e-12);
    CHECK_FALSE(sol.boundaryMassHigh);

    const double norm = std::pow(M_PI, -0.25);
    for (int i = 0; i < grid.pointsPerAxis; i += 16) {
        const double x = grid.coord(i);
        CHECK(sol.phi[static_cast<std::size_t>(i)] ==
              doctest::Approx(norm * std::exp(-0.5 * x * x)).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("d = 3 separable oscillator: E = 3") {
    Grid grid(3, 6.0, 33);
    FlowParams p;
    p.residualTolerance = 1e-5;
    NlsSolution sol = minimize_nls(TrapPotential::harmonic(), 0.0, grid, p);
    CHECK(std::abs(sol.energy - 3.0) < 5e-3);
}

TEST_CASE("interacting ground state matches the shooting oracle at g = 5") {
    Grid grid(1, 8.0, 513);
    FlowParams p;
    NlsSolution sol = minimize_nls(kHarmonic, 5.0, grid, p);
    CHECK(std::abs(sol.energy - kOracleEnergyG5) < 1e-5);
    CHECK(std::abs(sol.chemicalPotential - kOracleMuG5) < 1e-4);
    CHECK(sol.maxEnergyIncrease <= 1e-12);

    // bookkeeping identities
    CHECK(std::abs(sol.energy - (sol.components.kinetic + sol.components.trap +
                                 sol.components.interaction)) <= 1e-10);
    CHECK(std::abs(sol.chemicalPotential - (sol.energy + sol.components.interaction)) <= 1e-10);
    bool positive = true;
    for (double v : sol.phi.values()) positive = positive && v > 0.0;
    CHECK(positive);

    // the oracle itself reproduces it at test time (guards the frozen value)
    auto oracle = oracles::shooting_gp_energy(5.0, 8.0, 8000);
    CHECK(std::abs(oracle.energy - kOracleEnergyG5) < 1e-6);
}

TEST_CASE("grid-refinement convergence of the ground energy") {
    FlowParams p;
    auto solve = [&](int n) {
        Grid grid(1, 8.0, n);
        return minimize_nls(kHarmonic, 2.0, grid, p).energy;
    };
    const double e129 = solve(129), e257 = solve(257), e513 = solve(513);
    const double d1 = std::abs(e129 - e257), d2 = std::abs(e257 - e513);
    CHECK(d1 / d2 >= 3.5);  // at least second order
}

TEST_CASE("hartree with v0 = 0 coincides with the local solver") {
    Grid grid(1, 8.0, 129);
    FlowParams p;
    NlsSolution a = minimize_hartree(kHarmonic, PairPotential::zero(), grid, p);
    NlsSolution b = minimize_nls(kHarmonic, 0.0, grid, p);
    CHECK(a.energy == b.energy);
    CHECK(a.chemicalPotential == b.chemicalPotential);
}

TEST_CASE("hartree with a narrow bump approaches the local functional") {
    Grid grid(1, 8.0, 257);
    const double h = grid.spacing();
    const double R0 = 2.0 * h;
    const double g = 1.0;
    // 1D bump integral: amp * R0 * 16/15
    PairPotential v0 = PairPotential::bump(g / (R0 * 16.0 / 15.0), R0);
    FlowParams p;
    NlsSolution hart = minimize_hartree(kHarmonic, v0, grid, p);
    NlsSolution loc = minimize_nls(kHarmonic, g, grid, p);
    CHECK(std::abs(hart.energy - loc.energy) < 0.02 * loc.energy);
}

TEST_CASE("hartree first-order perturbation for a wide weak pair potential") {
    Grid grid(1, 8.0, 257);
    PairPotential v0 = PairPotential::bump(0.02, 4.0);
    FlowParams p;
    NlsSolution hart = minimize_hartree(kHarmonic, v0, grid, p);

    // E ~ 1 + double-integral rho0 v0 rho0 with rho0 the oscillator density
    const int n = grid.pointsPerAxis;
    std::vector<double> rho0(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = grid.coord(i);
        rho0[static_cast<std::size_t>(i)] = std::exp(-x * x) / std::sqrt(M_PI);
    }
    const double h = grid.spacing();
    double correction = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            correction += wi * wj * rho0[static_cast<std::size_t>(i)] *
                          v0(std::abs(grid.coord(i) - grid.coord(j))) *
                          rho0[static_cast<std::size_t>(j)];
        }
    correction *= h * h;
    CHECK(std::abs(hart.energy - (1.0 + correction)) < 0.1 * correction);
}

TEST_CASE("nls residual on the exact oscillator eigenfunction") {
    Grid grid(1, 8.0, 257);
    GridFunction phi(grid, 1);
    for (int i = 0; i < grid.pointsPerAxis; ++i) {
        const double x = grid.coord(i);
        phi[static_cast<std::size_t>(i)] = std::exp(-0.5 * x * x);
    }
    normalize_l2(phi);
    const double h = grid.spacing();
    CHECK(nls_residual(phi, 1.0, kHarmonic, 0.0) < 10.0 * h * h);

    // a random normalized state is far from stationary
    GridFunction junk(grid, 1);
    for (int i = 0; i < grid.pointsPerAxis; ++i) {
        const double x = grid.coord(i);
        junk[static_cast<std::size_t>(i)] = std::exp(-0.2 * x * x) * (1.0 + 0.5 * std::sin(3.0 * x));
    }
    normalize_l2(junk);
    CHECK(nls_residual(junk, 1.0, kHarmonic, 0.0) > 0.1);

    // solver contract: converged runs meet the residual tolerance
    FlowParams p;
    NlsSolution sol = minimize_nls(kHarmonic, 3.0, grid, p);
    CHECK(nls_residual(sol.phi, sol.chemicalPotential, kHarmonic, 3.0) <=
          10.0 * p.residualTolerance);
}

TEST_CASE("perturbed energies") {
    Grid grid(1, 8.0, 257);
    FlowParams p;

    NlsSolution base = minimize_nls(kHarmonic, 2.0, grid, p);
    NlsSolution lam1 = perturbed_nls_energy(PerturbedTerm::trap, 1.0, kHarmonic, 2.0, grid, p);
    CHECK(std::abs(lam1.energy - base.energy) < 1e-10);

    // lambda x^2 oscillator: E = sqrt(lambda)
    NlsSolution lam4 = perturbed_nls_energy(PerturbedTerm::trap, 4.0, kHarmonic, 0.0, grid, p);
    CHECK(std::abs(lam4.energy - 2.0) < 1e-5);

    NlsSolution off = perturbed_nls_energy(PerturbedTerm::interaction, 0.0, kHarmonic, 5.0, grid, p);
    CHECK(std::abs(off.energy - 1.0) < 1e-5);

    CHECK_THROWS_AS((void)perturbed_nls_energy(PerturbedTerm::trap, 0.0, kHarmonic, 1.0, grid, p),
                    DomainError);
}

TEST_CASE("concavity of lambda-energy maps on [0.5, 1.5]") {
    Grid grid(1, 8.0, 129);
    FlowParams p;
    for (PerturbedTerm term : {PerturbedTerm::trap, PerturbedTerm::interaction}) {
        const double l1 = 0.5, l2 = 1.0, l3 = 1.5;
        const double E1 = perturbed_nls_energy(term, l1, kHarmonic, 1.5, grid, p).energy;
        const double E2 = perturbed_nls_energy(term, l2, kHarmonic, 1.5, grid, p).energy;
        const double E3 = perturbed_nls_energy(term, l3, kHarmonic, 1.5, grid, p).energy;
        CHECK(E2 >= 0.5 * (E1 + E3) - 1e-8);
    }
}

TEST_CASE("Hellmann-Feynman checks at the one-particle level") {
    Grid grid(1, 8.0, 257);
    FlowParams p;

    // oscillator: dE/dlambda of sqrt(lambda) at 1 is 1/2 = integral x^2 rho
    HellmannFeynmanResult trap = hellmann_feynman_check(PerturbedTerm::trap, 1.0, 1e-2,
                                                        kHarmonic, 0.0, grid, p);
    CHECK(std::abs(trap.lhs - 0.5) < 1e-4);
    CHECK(std::abs(trap.rhs - 0.5) < 1e-4);
    CHECK(trap.gap < 1e-4);

    HellmannFeynmanResult zero = hellmann_feynman_check(PerturbedTerm::interaction, 1.0, 1e-2,
                                                        kHarmonic, 0.0, grid, p);
    CHECK(std::abs(zero.lhs) < 1e-9);
    CHECK(std::abs(zero.rhs) < 1e-12);

    HellmannFeynmanResult inter = hellmann_feynman_check(PerturbedTerm::interaction, 1.0, 1e-2,
                                                         kHarmonic, 5.0, grid, p);
    CHECK(inter.gap < 1e-3);
}

TEST_CASE("variational upper bound on a spot check") {
    Grid grid(1, 8.0, 129);
    FlowParams p;
    NlsSolution sol = minimize_nls(kHarmonic, 1.0, grid, p);
    for (double a : {0.3, 0.5, 0.8, 1.4}) {
        GridFunction trial(grid, 1);
        for (int i = 0; i < grid.pointsPerAxis; ++i) {
            const double x = grid.coord(i);
            trial[static_cast<std::size_t>(i)] = std::exp(-a * x * x);
        }
        normalize_l2(trial);
        CHECK(nls_energy_of(trial, kHarmonic, 1.0) >= sol.energy - 1e-10);
    }
}

TEST_CASE("solver error paths") {
    Grid grid(1, 8.0, 129);
    FlowParams p;
    CHECK_THROWS_AS((void)minimize_nls(kHarmonic, -1.0, grid, p), DomainError);
    FlowParams tight;
    tight.maxIterations = 3;
    tight.residualTolerance = 1e-14;
    CHECK_THROWS_AS((void)minimize_nls(kHarmonic, 2.0, grid, tight), ConvergenceError);
}
