#include <doctest.h>

#include <cmath>
#include <limits>

#include "beclab/metrics.hpp"
#include "beclab/nbody.hpp"
#include "beclab/pipeline.hpp"
#include "oracles.hpp"

using namespace beclab;

namespace {
const TrapPotential kHarmonic = TrapPotential::harmonic();

FlowParams tight_params() {
    FlowParams p;
    p.energyTolerance = 1e-13;
    p.residualTolerance = 1e-7;
    return p;
}

std::vector<double> oracle_total_potential(const Grid& grid, int N,
                                           const ScaledPairPotential* vN) {
    const int n = grid.pointsPerAxis;
    std::vector<double> W(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = grid.coord(i), y = grid.coord(j);
            double w = x * x + y * y;
            if (vN) w += (*vN)(std::abs(x - y));
            W[static_cast<std::size_t>(j) * n + i] = w;
        }
    (void)N;
    return W;
}

} // namespace

TEST_CASE("symmetrize is an exact bosonic projection") {
    Grid g(1, 3.0, 9);
    GridFunction f(g, 3);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.37 * static_cast<double>(i));
    symmetrize(f);
    CHECK(symmetry_defect(f) < 1e-14);
    GridFunction twice = f;
    symmetrize(twice);
    double diff = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(twice[i] - f[i]));
    CHECK(diff < 1e-14);
}

TEST_CASE("non-interacting two-body state factorizes") {
    Grid grid(1, 6.0, 49);
    FlowParams p = tight_params();
    NlsSolution one = minimize_nls(kHarmonic, 0.0, grid, p);
    NBodyState st = minimize_nbody(kHarmonic, PairPotential::zero(), 2, 0.0, grid, p);

    CHECK(std::abs(st.energy - 2.0) < 1e-3);            // discretization level
    CHECK(std::abs(st.energy / 2 - one.energy) < 1e-8); // same discrete operator
    CHECK(st.maxAsymmetry <= 1e-10);
    CHECK(st.maxEnergyIncrease <= 1e-12);

    // || Psi - phi x phi ||_2 <= 1e-6
    GridFunction prod(grid, 2);
    const int n = grid.pointsPerAxis;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            prod[static_cast<std::size_t>(j) * n + i] =
                one.phi[static_cast<std::size_t>(i)] * one.phi[static_cast<std::size_t>(j)];
    normalize_l2(prod);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < prod.size(); ++i) {
        const double d = prod[i] - st.psi[i];
        dist2 += d * d;
    }
    CHECK(std::sqrt(dist2 * grid.spacing() * grid.spacing()) <= 1e-6);

    // oscillator virial split: kinetic1 = trap1 = 1/2, no interaction
    CHECK(std::abs(st.componentsPerParticle.kinetic1 - 0.5) < 1e-3);
    CHECK(std::abs(st.componentsPerParticle.trap1 - 0.5) < 1e-3);
    CHECK(st.componentsPerParticle.interaction1 == 0.0);
    const double sum = st.componentsPerParticle.kinetic1 + st.componentsPerParticle.trap1 +
                       st.componentsPerParticle.interaction1;
    CHECK(std::abs(st.energy / 2 - sum) <= 1e-10);
}

TEST_CASE("non-interacting three-body state: E/3 = E1") {
    Grid grid(1, 6.0, 49);
    FlowParams p = tight_params();
    NlsSolution one = minimize_nls(kHarmonic, 0.0, grid, p);
    NBodyState st = minimize_nbody(kHarmonic, PairPotential::zero(), 3, 0.0, grid, p);
    CHECK(std::abs(st.energy / 3 - one.energy) < 1e-8);
    CHECK(st.maxAsymmetry <= 1e-10);
}

TEST_CASE("interacting two-body energy matches the inverse-power-iteration oracle") {
    Grid grid(1, 6.0, 65);
    // bump with 1D coupling g = 2: amplitude = 2/(R0 * 16/15)
    PairPotential v0 = PairPotential::bump(2.0 / (16.0 / 15.0), 1.0);
    FlowParams p = tight_params();
    NBodyState st = minimize_nbody(kHarmonic, v0, 2, 0.0, grid, p);

    ScaledPairPotential vN = scale_pair_potential(v0, 2, 0.0, 1);
    auto W = oracle_total_potential(grid, 2, &vN);
    oracles::TwoBodyEigOracle oracle(grid.pointsPerAxis, grid.spacing(), std::move(W));
    const double Eoracle = oracle.ground_energy();
    CHECK(std::abs(st.energy - Eoracle) < 1e-6);

    // one-particle marginal against the oracle eigenvector marginal
    auto vec = oracle.ground_vector();
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();
    std::vector<double> mOracle(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        for (int i = 0; i < n; ++i)
            mOracle[static_cast<std::size_t>(i)] +=
                wj * vec[static_cast<std::size_t>(j) * n + i] * vec[static_cast<std::size_t>(j) * n + i];
    }
    double mass = 0.0;
    for (int i = 0; i < n; ++i) mass += ((i == 0 || i == n - 1) ? 0.5 : 1.0) * mOracle[static_cast<std::size_t>(i)] * h;
    for (double& v : mOracle) v /= mass;

    GridFunction marg = marginal_density(st, 1);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(marg[static_cast<std::size_t>(i)] - mOracle[static_cast<std::size_t>(i)]) < 1e-8);
}

TEST_CASE("marginals of a product state factorize and Fubini holds") {
    Grid grid(1, 5.0, 33);
    FlowParams p = tight_params();
    NlsSolution one = minimize_nls(kHarmonic, 0.0, grid, p);
    NBodyState st = minimize_nbody(kHarmonic, PairPotential::zero(), 3, 0.0, grid, p);

    GridFunction m1 = marginal_density(st, 1);
    const int n = grid.pointsPerAxis;
    for (int i = 0; i < n; ++i) {
        const double phi2 = one.phi[static_cast<std::size_t>(i)] * one.phi[static_cast<std::size_t>(i)];
        CHECK(m1[static_cast<std::size_t>(i)] == doctest::Approx(phi2).epsilon(1e-6).scale(1.0));
    }

    GridFunction rho3 = nbody_density(st);
    GridFunction m2 = marginal_density(rho3, 2);
    GridFunction m1viaM2 = marginal_density(m2, 1);
    GridFunction m1direct = marginal_density(rho3, 1);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(m1viaM2[static_cast<std::size_t>(i)] - m1direct[static_cast<std::size_t>(i)]) < 1e-12);

    CHECK_THROWS_AS((void)marginal_density(st, 0), DomainError);
    CHECK_THROWS_AS((void)marginal_density(st, 3), DomainError);
}

TEST_CASE("perturbed N-body energies") {
    Grid grid(1, 6.0, 49);
    FlowParams p = tight_params();
    PairPotential v0 = PairPotential::bump(1.0, 1.0);

    NBodyState base = minimize_nbody(kHarmonic, v0, 2, 0.0, grid, p);
    NBodyState lam1 = perturbed_nbody_energy(PerturbedTerm::interaction, 1.0, kHarmonic, v0, 2,
                                             0.0, grid, p);
    CHECK(std::abs(base.energy - lam1.energy) < 1e-9);

    // two sqrt(lambda)-scaled oscillators: E = 2 sqrt(4) = 4
    NBodyState lam4 = perturbed_nbody_energy(PerturbedTerm::trap, 4.0, kHarmonic,
                                             PairPotential::zero(), 2, 0.0, grid, p);
    CHECK(std::abs(lam4.energy - 4.0) < 5e-3);

    CHECK_THROWS_AS((void)perturbed_nbody_energy(PerturbedTerm::trap, 0.0, kHarmonic, v0, 2, 0.0,
                                                 grid, p),
                    DomainError);
}

TEST_CASE("N-body Hellmann-Feynman: dE/dlambda matches the component integral") {
    Grid grid(1, 6.0, 49);
    FlowParams p = tight_params();
    PairPotential v0 = PairPotential::bump(0.9375, 1.0);
    const double delta = 1e-2;

    // interaction term: dE_N/dlambda = N * interaction1 at lambda = 1
    NBodyState plus = perturbed_nbody_energy(PerturbedTerm::interaction, 1.0 + delta, kHarmonic,
                                             v0, 2, 0.0, grid, p);
    NBodyState minus = perturbed_nbody_energy(PerturbedTerm::interaction, 1.0 - delta, kHarmonic,
                                              v0, 2, 0.0, grid, p);
    NBodyState mid = minimize_nbody(kHarmonic, v0, 2, 0.0, grid, p);
    const double lhs = (plus.energy - minus.energy) / (2.0 * delta) / 2.0;
    const double rhs = mid.componentsPerParticle.interaction1;
    CHECK(std::abs(lhs - rhs) < 1e-3);

    // trap term
    NBodyState tplus = perturbed_nbody_energy(PerturbedTerm::trap, 1.0 + delta, kHarmonic, v0, 2,
                                              0.0, grid, p);
    NBodyState tminus = perturbed_nbody_energy(PerturbedTerm::trap, 1.0 - delta, kHarmonic, v0, 2,
                                               0.0, grid, p);
    const double tlhs = (tplus.energy - tminus.energy) / (2.0 * delta) / 2.0;
    const double trhs = mid.componentsPerParticle.trap1;
    CHECK(std::abs(tlhs - trhs) < 1e-3);
}

TEST_CASE("drift component of a product state depends on r1 only") {
    Grid grid(1, 6.0, 49);
    FlowParams p = tight_params();
    NBodyState st = minimize_nbody(kHarmonic, PairPotential::zero(), 2, 0.0, grid, p);
    std::vector<double> b1 = nbody_drift_component(st);
    const int n = grid.pointsPerAxis;
    // in the bulk: b1 = -x1 for all x2
    for (int j = n / 3; j < 2 * n / 3; ++j)
        for (int i = n / 3; i < 2 * n / 3; ++i) {
            const double x = grid.coord(i);
            CHECK(b1[static_cast<std::size_t>(j) * n + i] ==
                  doctest::Approx(-x).epsilon(5e-3).scale(1.0));
        }
}

TEST_CASE("drift respects the particle-swap symmetry") {
    Grid grid(1, 6.0, 33);
    FlowParams p = tight_params();
    PairPotential v0 = PairPotential::bump(0.9375, 1.0);
    NBodyState st = minimize_nbody(kHarmonic, v0, 2, 0.5, grid, p);
    GridFunction rho = nbody_density(st);
    const double floor = default_drift_floor(rho);
    std::vector<double> b1 = drift_component_from_density(rho, 0, floor);
    std::vector<double> b2 = drift_component_from_density(rho, 1, floor);
    const int n = grid.pointsPerAxis;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(b1[static_cast<std::size_t>(j) * n + i] -
                           b2[static_cast<std::size_t>(i) * n + j]) < 1e-10);
}

TEST_CASE("interacting drift matches the oracle state gradient") {
    Grid grid(1, 6.0, 65);
    PairPotential v0 = PairPotential::bump(2.0 / (16.0 / 15.0), 1.0);
    FlowParams p = tight_params();
    NBodyState st = minimize_nbody(kHarmonic, v0, 2, 0.0, grid, p);
    std::vector<double> b1 = nbody_drift_component(st);

    ScaledPairPotential vN = scale_pair_potential(v0, 2, 0.0, 1);
    auto W = oracle_total_potential(grid, 2, &vN);
    oracles::TwoBodyEigOracle oracle(grid.pointsPerAxis, grid.spacing(), std::move(W));
    auto vec = oracle.ground_vector();

    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();
    // oracle drift: central difference of log(vec^2)/2 along axis 0, bulk only
    double maxErr = 0.0;
    for (int j = n / 3; j < 2 * n / 3; ++j)
        for (int i = n / 3; i < 2 * n / 3; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            const double num = std::log(vec[k + 1] * vec[k + 1]) - std::log(vec[k - 1] * vec[k - 1]);
            maxErr = std::max(maxErr, std::abs(0.25 * num / h - b1[k]));
        }
    CHECK(maxErr < 1e-6);  // same grid, solver tolerances only
}

TEST_CASE("energy trend toward the one-particle limit") {
    // R0 = 2 keeps the scaled supports resolved on the h = 0.5 mesh
    Grid grid(1, 6.0, 25);
    PairPotential v0 = PairPotential::bump(15.0 / 32.0, 2.0);
    const double g = pair_coupling(v0, 1);
    FlowParams p;
    p.energyTolerance = 1e-12;
    p.residualTolerance = 1e-6;
    NlsSolution nls = minimize_nls(kHarmonic, g, grid, p);
    for (double beta : {0.0, 0.25, 0.5}) {
        double prevGap = std::numeric_limits<double>::infinity();
        for (int N : {2, 3, 4}) {
            NBodyState st = minimize_nbody_multilevel(kHarmonic, v0, N, beta, grid, p);
            const double gap = std::abs(st.energy / N - nls.energy);
            CHECK(gap <= prevGap + 1e-10);
            prevGap = gap;
        }
    }
}

TEST_CASE("budget refusal carries the required size") {
    Grid grid(1, 6.0, 101);
    FlowParams p;
    try {
        (void)minimize_nbody(kHarmonic, PairPotential::zero(), 4, 0.0, grid, p, 10'000'000);
        CHECK(false);
    } catch (const BudgetError& e) {
        CHECK(e.budget == 10'000'000);
    }
}

TEST_CASE("variational bound against the product trial state") {
    Grid grid(1, 6.0, 33);
    PairPotential v0 = PairPotential::bump(0.9375, 1.0);
    const double g = pair_coupling(v0, 1);
    FlowParams p = tight_params();
    NBodyState st = minimize_nbody(kHarmonic, v0, 2, 0.5, grid, p);
    NlsSolution nls = minimize_nls(kHarmonic, g, grid, p);
    GridFunction trial(grid, 2);
    const int n = grid.pointsPerAxis;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            trial[static_cast<std::size_t>(j) * n + i] =
                nls.phi[static_cast<std::size_t>(i)] * nls.phi[static_cast<std::size_t>(j)];
    normalize_l2(trial);
    NBodyState trialState = finalize_nbody_state(trial, kHarmonic, v0, 2, 0.5);
    CHECK(st.energy <= trialState.energy + 1e-10);
}
