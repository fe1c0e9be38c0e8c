#include "beclab/nbody.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "beclab/fd.hpp"

namespace beclab {

namespace {

// out = f with tensor axes a and b exchanged (d = 1 coordinates).
void swap_axes(const std::vector<double>& f, std::vector<double>& out, int a, int b, int axes,
               int n) {
    if (a == b) {
        out = f;
        return;
    }
    std::size_t strideA = 1, strideB = 1;
    for (int k = 0; k < a; ++k) strideA *= static_cast<std::size_t>(n);
    for (int k = 0; k < b; ++k) strideB *= static_cast<std::size_t>(n);
    const std::size_t total = f.size();
    std::vector<int> idx(axes, 0);
    for (std::size_t i = 0; i < total; ++i) {
        const std::ptrdiff_t shift =
            static_cast<std::ptrdiff_t>(idx[b] - idx[a]) * static_cast<std::ptrdiff_t>(strideA) +
            static_cast<std::ptrdiff_t>(idx[a] - idx[b]) * static_cast<std::ptrdiff_t>(strideB);
        out[i] = f[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + shift)];
        for (int k = 0; k < axes; ++k) {
            if (++idx[k] < n) break;
            idx[k] = 0;
        }
    }
}

// averages f over permutations of axes k..axes-1 (recursive exact projection)
void symmetrize_tail(std::vector<double>& f, int k, int axes, int n, std::vector<double>& scratch,
                     std::vector<double>& accum) {
    if (k >= axes - 1) return;
    symmetrize_tail(f, k + 1, axes, n, scratch, accum);
    accum = f;
    for (int j = k + 1; j < axes; ++j) {
        swap_axes(f, scratch, k, j, axes, n);
        for (std::size_t i = 0; i < f.size(); ++i) accum[i] += scratch[i];
    }
    const double inv = 1.0 / (axes - k);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = accum[i] * inv;
}

std::vector<double> trap_axis_table(const TrapPotential& V, const Grid& g) {
    std::vector<double> t(static_cast<std::size_t>(g.pointsPerAxis));
    for (int i = 0; i < g.pointsPerAxis; ++i) t[i] = V(std::abs(g.coord(i)));
    return t;
}

std::vector<double> pair_difference_table(const ScaledPairPotential& vN, const Grid& g) {
    const int n = g.pointsPerAxis;
    const double h = g.spacing();
    std::vector<double> t(static_cast<std::size_t>(2 * n - 1));
    for (int k = -(n - 1); k <= n - 1; ++k)
        t[static_cast<std::size_t>(k + n - 1)] = vN(std::abs(k) * h);
    return t;
}

// Total potential W(r1..rN) = lambdaT sum V(ri) + lambdaI sum_{i<j} v_N(ri-rj).
std::vector<double> total_potential(const std::vector<double>& Vtab,
                                    const std::vector<double>& vtab, int axes, int n,
                                    double lambdaT, double lambdaI, std::size_t total) {
    std::vector<double> W(total);
    std::vector<int> idx(axes, 0);
    for (std::size_t i = 0; i < total; ++i) {
        double w = 0.0;
        for (int a = 0; a < axes; ++a) w += Vtab[idx[a]];
        w *= lambdaT;
        if (!vtab.empty()) {
            double inter = 0.0;
            for (int a = 0; a < axes; ++a)
                for (int b = a + 1; b < axes; ++b)
                    inter += vtab[static_cast<std::size_t>(idx[a] - idx[b] + n - 1)];
            w += lambdaI * inter;
        }
        W[i] = w;
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return W;
}

double weighted_sum_fn(std::size_t total, int axes, int n, double h,
                       const std::function<double(std::size_t)>& term) {
    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;
    std::vector<int> idx(axes, 0);
    double sum = 0.0;
    std::size_t i = 0;
    while (i < total) {
        double wRow = 1.0;
        for (int a = 1; a < axes; ++a) wRow *= axis_weight(idx[a], n);
        for (int i0 = 0; i0 < n; ++i0, ++i) sum += wRow * axis_weight(i0, n) * term(i);
        for (int a = 1; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
        if (axes == 1) break;
    }
    return sum * hPow;
}

GridFunction product_initial_state(const TrapPotential& V, const PairPotential& v0,
                                   const Grid& grid, int N, double lambdaT) {
    // warm start: product of the one-particle minimizer with the mean-field
    // coupling g/2 that the pair sum induces on product states
    FlowParams p;
    p.energyTolerance = 1e-13;
    p.residualTolerance = 1e-6;
    const double g = v0.isZero() ? 0.0 : pair_coupling(v0, grid.dimension);
    NlsSolution one = (lambdaT == 1.0)
                          ? minimize_nls(V, 0.5 * g, grid, p)
                          : perturbed_nls_energy(PerturbedTerm::trap, lambdaT, V, 0.5 * g, grid, p);
    GridFunction psi(grid, N);
    const int n = grid.pointsPerAxis;
    const int axes = N;
    std::vector<int> idx(axes, 0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double v = 1.0;
        for (int a = 0; a < axes; ++a) v *= one.phi[static_cast<std::size_t>(idx[a])];
        psi[i] = v;
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    normalize_l2(psi);
    return psi;
}

} // namespace

void symmetrize(GridFunction& f) {
    const int axes = f.axisCount();
    if (axes < 2) return;
    const int n = f.grid().pointsPerAxis;
    std::vector<double> work(f.values().begin(), f.values().end());
    std::vector<double> scratch(work.size()), accum(work.size());
    symmetrize_tail(work, 0, axes, n, scratch, accum);
    std::copy(work.begin(), work.end(), f.values().begin());
}

double symmetry_defect(const GridFunction& f) {
    const int axes = f.axisCount();
    if (axes < 2) return 0.0;
    const int n = f.grid().pointsPerAxis;
    std::vector<double> in(f.values().begin(), f.values().end());
    std::vector<double> sw(in.size());
    double defect = 0.0;
    for (int a = 0; a + 1 < axes; ++a) {
        swap_axes(in, sw, a, a + 1, axes, n);
        for (std::size_t i = 0; i < in.size(); ++i)
            defect = std::max(defect, std::abs(in[i] - sw[i]));
    }
    return defect;
}

GridFunction prolong_dyadic(const GridFunction& coarse) {
    const Grid& gc = coarse.grid();
    const int axes = coarse.axisCount();
    const int nc = gc.pointsPerAxis;
    const int nf = 2 * nc - 1;
    Grid gf(gc.dimension, gc.extent, nf);
    GridFunction fine(gf, coarse.particleCount());
    std::vector<int> idx(axes, 0);
    std::vector<std::size_t> strideC(axes);
    std::size_t s = 1;
    for (int a = 0; a < axes; ++a) {
        strideC[a] = s;
        s *= static_cast<std::size_t>(nc);
    }
    for (std::size_t i = 0; i < fine.size(); ++i) {
        // corners of the coarse cell containing this fine point
        double acc = 0.0;
        int oddAxes[8];
        int nOdd = 0;
        std::size_t base = 0;
        for (int a = 0; a < axes; ++a) {
            base += strideC[a] * static_cast<std::size_t>(idx[a] / 2);
            if (idx[a] % 2 == 1) oddAxes[nOdd++] = a;
        }
        const int corners = 1 << nOdd;
        for (int c = 0; c < corners; ++c) {
            std::size_t j = base;
            for (int b = 0; b < nOdd; ++b)
                if (c & (1 << b)) j += strideC[oddAxes[b]];
            acc += coarse[j];
        }
        fine[i] = acc / corners;
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < nf) break;
            idx[a] = 0;
        }
    }
    return fine;
}

NBodyState minimize_nbody(const TrapPotential& V, const PairPotential& v0, int N, double beta,
                          const Grid& grid, const FlowParams& params, std::size_t pointBudget,
                          const GridFunction* initialGuess, double lambdaTrap,
                          double lambdaInteraction) {
    if (grid.dimension != 1) throw DomainError("minimize_nbody: d = 1 only");
    if (N < 2 || N > 4) throw DomainError("minimize_nbody: N in [2,4]");
    const std::size_t total = tensor_size_checked(grid, N, pointBudget);
    const int axes = N;
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();

    auto Vtab = trap_axis_table(V, grid);
    std::vector<double> vtab;
    if (!v0.isZero() && lambdaInteraction != 0.0) {
        ScaledPairPotential vN = scale_pair_potential(v0, N, beta, grid.dimension);
        vtab = pair_difference_table(vN, grid);
    }
    auto W = total_potential(Vtab, vtab, axes, n, lambdaTrap, lambdaInteraction, total);

    GridFunction psi = initialGuess ? *initialGuess
                                    : product_initial_state(V, v0, grid, N, lambdaTrap);
    if (!(psi.grid() == grid) || psi.particleCount() != N)
        throw GridMismatchError("minimize_nbody: initial guess mismatch");
    symmetrize(psi);
    normalize_l2(psi);

    double Wmax = 0.0;
    for (double w : W) Wmax = std::max(Wmax, w);
    double tau = params.timeStep;
    if (tau <= 0.0) tau = 0.95 / (laplacian_max_eigenvalue(axes, h) + Wmax);

    std::vector<double> G(total);
    double energy = 0.0, prevEnergy = 0.0, residual = std::numeric_limits<double>::infinity();
    double maxIncrease = 0.0;
    long iter = 0;
    bool haveEnergy = false;

    while (iter < params.maxIterations) {
        ++iter;
        std::fill(G.begin(), G.end(), 0.0);
        add_neg_laplacian(psi.data(), G.data(), axes, n, h);
        for (std::size_t i = 0; i < total; ++i) G[i] += W[i] * psi[i];

        energy = weighted_sum_fn(total, axes, n, h,
                                 [&](std::size_t i) { return psi[i] * G[i]; });
        if (haveEnergy && energy > prevEnergy)
            maxIncrease = std::max(maxIncrease, energy - prevEnergy);
        const double dE =
            haveEnergy ? std::abs(energy - prevEnergy) : std::numeric_limits<double>::infinity();
        prevEnergy = energy;
        haveEnergy = true;

        if (dE < params.energyTolerance) {
            double r2 = weighted_sum_fn(total, axes, n, h, [&](std::size_t i) {
                const double v = G[i] - energy * psi[i];
                return v * v;
            });
            residual = std::sqrt(std::max(r2, 0.0));
            if (residual < params.residualTolerance) break;
        }

        for (std::size_t i = 0; i < total; ++i) psi[i] -= tau * G[i];
        symmetrize(psi);
        normalize_l2(psi);
        if (iter % 100 == 0 && symmetry_defect(psi) > 1e-8)
            throw std::logic_error("minimize_nbody: symmetry lost during the flow");
    }

    if (!(residual < params.residualTolerance))
        throw ConvergenceError("minimize_nbody: no convergence within maxIterations", energy,
                               residual, iter,
                               std::vector<double>(psi.values().begin(), psi.values().end()));

    // positive ground state: fix the global sign
    double massSign = 0.0;
    for (std::size_t i = 0; i < total; ++i) massSign += psi[i];
    if (massSign < 0.0)
        for (double& v : psi.values()) v = -v;

    NBodyState st;
    st.energy = energy;
    st.N = N;
    st.beta = beta;
    st.lambdaTrap = lambdaTrap;
    st.lambdaInteraction = lambdaInteraction;
    st.residualNorm = residual;
    st.iterations = iter;
    st.maxEnergyIncrease = maxIncrease;
    st.maxAsymmetry = symmetry_defect(psi);
    st.trapTable = std::move(Vtab);
    st.pairTable = std::move(vtab);
    st.psi = std::move(psi);
    st.componentsPerParticle = nbody_energy_components(st);
    st.kineticFull = kinetic_energy(
        std::vector<double>(st.psi.values().begin(), st.psi.values().end()), axes, n, h);
    return st;
}

NBodyState minimize_nbody_multilevel(const TrapPotential& V, const PairPotential& v0, int N,
                                     double beta, const Grid& grid, const FlowParams& params,
                                     std::size_t pointBudget) {
    // refuse over-budget targets before spending time on coarse levels
    (void)tensor_size_checked(grid, N, pointBudget);
    // build the dyadic chain below the target: ... -> (n+1)/2 -> n
    std::vector<int> chain{grid.pointsPerAxis};
    while (chain.back() > 33 && (chain.back() - 1) % 2 == 0) {
        int next = (chain.back() - 1) / 2 + 1;
        if (next < 9) break;
        chain.push_back(next);
    }
    std::reverse(chain.begin(), chain.end());

    GridFunction guess;
    const GridFunction* guessPtr = nullptr;
    NBodyState st;
    for (std::size_t level = 0; level < chain.size(); ++level) {
        Grid g(grid.dimension, grid.extent, chain[level]);
        FlowParams p = params;
        if (level + 1 < chain.size()) {
            p.energyTolerance = std::max(params.energyTolerance, 1e-11);
            p.residualTolerance = std::max(params.residualTolerance, 1e-5);
        }
        st = minimize_nbody(V, v0, N, beta, g, p, pointBudget, guessPtr);
        if (level + 1 < chain.size()) {
            guess = prolong_dyadic(st.psi);
            guessPtr = &guess;
        }
    }
    return st;
}

GridFunction nbody_density(const NBodyState& state) {
    GridFunction rho = state.psi;
    for (double& v : rho.values()) v *= v;
    rho.markNormalized(false);
    return rho;
}

GridFunction marginal_density(const GridFunction& rhoN, int k) {
    const int axes = rhoN.axisCount();
    if (k < 1 || k >= axes) throw DomainError("marginal_density: 1 <= k < N required");
    const int n = rhoN.grid().pointsPerAxis;
    const double h = rhoN.grid().spacing();
    std::size_t headSize = 1;
    for (int a = 0; a < k; ++a) headSize *= static_cast<std::size_t>(n);

    GridFunction out(rhoN.grid(), k, 0.0);
    double hTail = 1.0;
    for (int a = k; a < axes; ++a) hTail *= h;

    std::vector<int> idx(axes, 0);
    for (std::size_t i = 0; i < rhoN.size(); ++i) {
        double w = 1.0;
        for (int a = k; a < axes; ++a) w *= axis_weight(idx[a], n);
        out[i % headSize] += w * rhoN[i];
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    for (double& v : out.values()) v *= hTail;
    normalize_mass(out);
    return out;
}

GridFunction marginal_density(const NBodyState& state, int k) {
    return marginal_density(nbody_density(state), k);
}

NBodyComponents nbody_energy_components(const NBodyState& state) {
    const GridFunction& psi = state.psi;
    const int axes = psi.axisCount();
    const int n = psi.grid().pointsPerAxis;
    const double h = psi.grid().spacing();
    const std::size_t total = psi.size();

    std::vector<double> f(psi.values().begin(), psi.values().end());
    NBodyComponents c;
    c.kinetic1 = kinetic_energy_axis(f, 0, axes, n, h);

    const auto& Vtab = state.trapTable;
    const auto& vtab = state.pairTable;
    std::vector<int> idx(axes, 0);
    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;
    double trap = 0.0, inter = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        double w = 1.0;
        for (int a = 0; a < axes; ++a) w *= axis_weight(idx[a], n);
        const double rho = psi[i] * psi[i] * w;
        trap += state.lambdaTrap * Vtab[idx[0]] * rho;
        if (!vtab.empty()) {
            double s = 0.0;
            for (int b = 1; b < axes; ++b)
                s += vtab[static_cast<std::size_t>(idx[0] - idx[b] + n - 1)];
            inter += 0.5 * state.lambdaInteraction * s * rho;
        }
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    c.trap1 = trap * hPow;
    c.interaction1 = inter * hPow;
    return c;
}

NBodyState perturbed_nbody_energy(PerturbedTerm which, double lambda, const TrapPotential& V,
                                  const PairPotential& v0, int N, double beta, const Grid& grid,
                                  const FlowParams& params, std::size_t pointBudget,
                                  const GridFunction* initialGuess) {
    if (which == PerturbedTerm::trap) {
        if (!(lambda > 0.0)) throw DomainError("perturbed_nbody_energy: lambda > 0 for trap");
        return minimize_nbody(V, v0, N, beta, grid, params, pointBudget, initialGuess, lambda,
                              1.0);
    }
    if (!(lambda >= 0.0))
        throw DomainError("perturbed_nbody_energy: lambda >= 0 for interaction");
    return minimize_nbody(V, v0, N, beta, grid, params, pointBudget, initialGuess, 1.0, lambda);
}

std::vector<double> drift_component_from_density(const GridFunction& rho, int axis,
                                                 double floor) {
    if (!(floor > 0.0)) throw DomainError("drift_component_from_density: floor must be positive");
    const int axes = rho.axisCount();
    const int n = rho.grid().pointsPerAxis;
    const double h = rho.grid().spacing();
    const std::size_t total = rho.size();
    std::vector<double> logRho(total);
    for (std::size_t i = 0; i < total; ++i) logRho[i] = std::log(std::max(rho[i], floor));

    std::vector<double> b(total);
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    const double half = PhysicalConvention::driftFromLogDensity;
    for (std::size_t base = 0; base < total; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t p0 = base + off;
            b[p0] = half * (logRho[p0 + stride] - logRho[p0]) / h;
            const std::size_t pl = p0 + stride * static_cast<std::size_t>(n - 1);
            b[pl] = half * (logRho[pl] - logRho[pl - stride]) / h;
            for (int i = 1; i < n - 1; ++i) {
                const std::size_t p = p0 + stride * static_cast<std::size_t>(i);
                b[p] = half * (logRho[p + stride] - logRho[p - stride]) / (2.0 * h);
            }
        }
    }
    return b;
}

std::vector<double> nbody_drift_component(const NBodyState& state, double floor) {
    GridFunction rho = nbody_density(state);
    if (floor <= 0.0) floor = default_drift_floor(rho);
    return drift_component_from_density(rho, 0, floor);
}

} // namespace beclab
