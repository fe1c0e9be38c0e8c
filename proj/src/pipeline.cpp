#include "beclab/pipeline.hpp"

#include <cmath>

#include "beclab/fd.hpp"
#include "beclab/sde.hpp"

namespace beclab {

NlsSolution finalize_nls_solution(const GridFunction& phi, const TrapPotential& V, double g) {
    const Grid& grid = phi.grid();
    const int axes = grid.dimension;
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();

    NlsSolution s;
    s.phi = phi;
    s.phi.markNormalized(true);

    std::vector<double> f(phi.values().begin(), phi.values().end());
    s.components.kinetic = kinetic_energy(f, axes, n, h);

    GridFunction rho = phi;
    for (double& v : rho.values()) v *= v;
    GridFunction Vf(grid, 1);
    {
        std::vector<int> idx(axes, 0);
        for (std::size_t i = 0; i < Vf.size(); ++i) {
            double r2 = 0.0;
            for (int a = 0; a < axes; ++a) {
                const double x = grid.coord(idx[a]);
                r2 += x * x;
            }
            Vf[i] = V(std::sqrt(r2));
            for (int a = 0; a < axes; ++a) {
                if (++idx[a] < n) break;
                idx[a] = 0;
            }
        }
    }
    s.components.trap = grid_inner(Vf, rho);
    GridFunction rho2 = rho;
    for (double& v : rho2.values()) v *= v;
    s.components.interaction = g * grid_integrate(rho2);
    s.energy = s.components.kinetic + s.components.trap + s.components.interaction;
    s.chemicalPotential = s.energy + s.components.interaction;
    s.residualNorm = nls_residual(phi, s.chemicalPotential, V, g);
    return s;
}

NBodyState finalize_nbody_state(const GridFunction& psi, const TrapPotential& V,
                                const PairPotential& v0, int N, double beta) {
    const Grid& grid = psi.grid();
    const int axes = N;
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();

    NBodyState st;
    st.psi = psi;
    st.psi.markNormalized(true);
    st.N = N;
    st.beta = beta;

    st.trapTable.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) st.trapTable[static_cast<std::size_t>(i)] = V(std::abs(grid.coord(i)));
    if (!v0.isZero()) {
        ScaledPairPotential vN = scale_pair_potential(v0, N, beta, grid.dimension);
        st.pairTable.resize(static_cast<std::size_t>(2 * n - 1));
        for (int k = -(n - 1); k <= n - 1; ++k)
            st.pairTable[static_cast<std::size_t>(k + n - 1)] = vN(std::abs(k) * h);
    }

    st.componentsPerParticle = nbody_energy_components(st);
    std::vector<double> f(psi.values().begin(), psi.values().end());
    st.kineticFull = kinetic_energy(f, axes, n, h);
    st.energy = N * (st.componentsPerParticle.kinetic1 + st.componentsPerParticle.trap1 +
                     st.componentsPerParticle.interaction1);
    st.maxAsymmetry = symmetry_defect(psi);

    // stationarity residual ||H psi - E psi|| recomputed from the stored bits
    std::vector<double> G(psi.size(), 0.0);
    add_neg_laplacian(psi.data(), G.data(), axes, n, h);
    {
        std::vector<int> idx(axes, 0);
        double hPow = 1.0;
        for (int a = 0; a < axes; ++a) hPow *= h;
        double r2 = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            double W = 0.0;
            for (int a = 0; a < axes; ++a) W += st.trapTable[static_cast<std::size_t>(idx[a])];
            if (!st.pairTable.empty())
                for (int a = 0; a < axes; ++a)
                    for (int b = a + 1; b < axes; ++b)
                        W += st.pairTable[static_cast<std::size_t>(idx[a] - idx[b] + n - 1)];
            double w = hPow;
            for (int a = 0; a < axes; ++a) w *= axis_weight(idx[a], n);
            const double v = G[i] + W * psi[i] - st.energy * psi[i];
            r2 += w * v * v;
            for (int a = 0; a < axes; ++a) {
                if (++idx[a] < n) break;
                idx[a] = 0;
            }
        }
        st.residualNorm = std::sqrt(std::max(r2, 0.0));
    }
    return st;
}

NlsSolution nls_ground_state(const RunConfig& cfg, const Grid& grid, double g,
                             const GroundStateCache& cache) {
    CacheKey key;
    key.d = grid.dimension;
    key.N = 1;
    key.n = grid.pointsPerAxis;
    key.L = grid.extent;
    key.beta = 0.0;
    key.potentialHash = potential_hash(cfg.trapDescriptor(), "g=" + format_g17(g),
                                       cfg.solverDescriptor());
    TrapPotential V = cfg.makeTrap();
    if (cache.enabled()) {
        try {
            if (auto hit = cache.load(key)) return finalize_nls_solution(*hit, V, g);
        } catch (const CacheError&) {
            // corrupt entry was dropped; fall through to recompute
        }
    }
    NlsSolution sol = minimize_nls(V, g, grid, cfg.flowParams());
    cache.store(key, sol.phi);
    return finalize_nls_solution(sol.phi, V, g);
}

NBodyState nbody_ground_state(const RunConfig& cfg, const Grid& grid, int N, double beta,
                              const GroundStateCache& cache) {
    CacheKey key;
    key.d = grid.dimension;
    key.N = N;
    key.n = grid.pointsPerAxis;
    key.L = grid.extent;
    key.beta = beta;
    key.potentialHash =
        potential_hash(cfg.trapDescriptor(), cfg.pairDescriptor(), cfg.solverDescriptor());
    TrapPotential V = cfg.makeTrap();
    PairPotential v0 = cfg.makePair();
    if (cache.enabled()) {
        try {
            if (auto hit = cache.load(key)) return finalize_nbody_state(*hit, V, v0, N, beta);
        } catch (const CacheError&) {
        }
    }
    FlowParams p = cfg.flowParams();
    NBodyState st = minimize_nbody_multilevel(V, v0, N, beta, grid, p, cfg.pointBudget);
    cache.store(key, st.psi);
    return finalize_nbody_state(st.psi, V, v0, N, beta);
}

ChaosCell compute_chaos_cell(const RunConfig& cfg, int N, double beta,
                             const GroundStateCache& cache) {
    Grid grid(1, cfg.L, cfg.n);
    TrapPotential V = cfg.makeTrap();
    PairPotential v0 = cfg.makePair();
    const double g = v0.isZero() ? 0.0 : pair_coupling(v0, 1);

    NlsSolution nls = nls_ground_state(cfg, grid, g, cache);
    NBodyState state = nbody_ground_state(cfg, grid, N, beta, cache);

    ChaosCell cell;
    ChaosReport& r = cell.report;
    r.N = N;
    r.beta = beta;
    r.t = cfg.t;
    r.driftMismatch = drift_mismatch(state, nls);
    r.normalizedEntropy = one_particle_entropy(cfg.t, r.driftMismatch);
    for (int k = 1; k < N; ++k) {
        KMarginalResult km = k_marginal_entropy(state, nls, k, cfg.t, r.driftMismatch);
        r.kMarginalEntropy.push_back(km.kl);
        r.kMarginalTV.push_back(km.tv);
    }
    GridFunction rhoN = nbody_density(state);
    FisherResult fisher = fisher_information(rhoN, N);
    r.fisherNormalized = fisher.normalized;
    cell.fisherPaperReading = state.kineticFull / N;

    EntropyIdentityResult id = entropy_identity_check(state, nls, g);
    r.identityGap = id.gapGrad1;
    cell.identityGrad1Selected = id.grad1Selected;

    // synchronous coupling of the N-body diffusion with its limit
    std::vector<double> b1 = nbody_drift_component(state);
    SymmetricNBodyDrift bN(grid, std::move(b1), N);
    GridFunction rho1 = nls.phi;
    for (double& v : rho1.values()) v *= v;
    std::vector<double> u = drift_component_from_density(rho1, 0, default_drift_floor(rho1));
    PerParticleDrift uDrift(grid, std::move(u), N);

    SdeParams sp;
    sp.timeStep = cfg.dt;
    sp.horizon = cfg.t;
    sp.trajectories = cfg.M;
    sp.seed = cfg.seed;
    sp.recordedFrames = cfg.frames;
    std::vector<double> init = sample_density(rhoN, cfg.M, cfg.seed);
    CoupledResult coupled = simulate_coupled(bN, uDrift, grid, init, sp);
    r.kacMetric = kac_chaos_metric(coupled);
    cell.kacBound = kac_bound(cfg.t, r.driftMismatch);
    return cell;
}

} // namespace beclab
