#include "beclab/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "beclab/fd.hpp"

namespace beclab {

namespace {

// Per-particle grid points in d dims; radial distance per flat index.
std::vector<double> radial_table(const Grid& g) {
    const int d = g.dimension;
    const int n = g.pointsPerAxis;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
    std::vector<double> r(total);
    std::vector<int> idx(d, 0);
    for (std::size_t i = 0; i < total; ++i) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
            const double x = g.coord(idx[a]);
            s += x * x;
        }
        r[i] = std::sqrt(s);
        for (int a = 0; a < d; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return r;
}

std::vector<double> trap_table(const TrapPotential& V, const Grid& g, double lambda) {
    auto r = radial_table(g);
    std::vector<double> W(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) W[i] = lambda * V(r[i]);
    return W;
}

double weighted_sum(const std::vector<double>& vals, int axes, int n, double h,
                    const std::function<double(std::size_t)>& term) {
    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;
    std::vector<int> idx(axes, 0);
    double sum = 0.0;
    std::size_t i = 0;
    const std::size_t total = vals.size();
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

// Gaussian of trap-matched width (exact oscillator ground state for V = c r^2).
GridFunction trap_matched_gaussian(const TrapPotential& V, const Grid& g) {
    double cEff = 1.0;
    switch (V.kind()) {
        case TrapPotential::Kind::harmonic: cEff = V.parameters()[0]; break;
        case TrapPotential::Kind::quartic: cEff = std::cbrt(V.parameters()[0]); break;
        case TrapPotential::Kind::tabulated: {
            const double r0 = 0.5 * g.extent;
            cEff = std::max(V(r0) / (r0 * r0), 1e-2);
            break;
        }
    }
    const double alpha = 0.5 * std::sqrt(cEff);
    auto r = radial_table(g);
    GridFunction phi(g, 1);
    for (std::size_t i = 0; i < r.size(); ++i) phi[i] = std::exp(-alpha * r[i] * r[i]);
    normalize_l2(phi);
    return phi;
}

// Direct-quadrature convolution (v0 * phi^2) restricted to the support cube.
void convolve_pair(const PairPotential& v0, const Grid& g, const std::vector<double>& rho,
                   std::vector<double>& out) {
    const int d = g.dimension;
    const int n = g.pointsPerAxis;
    const double h = g.spacing();
    const int m = std::min(n - 1, static_cast<int>(std::ceil(v0.supportRadius() / h)));
    double hPow = 1.0;
    for (int a = 0; a < d; ++a) hPow *= h;

    // difference table on the offset cube
    const int w = 2 * m + 1;
    std::size_t tabSize = 1;
    for (int a = 0; a < d; ++a) tabSize *= static_cast<std::size_t>(w);
    std::vector<double> vtab(tabSize);
    std::vector<int> off(d, -m);
    for (std::size_t t = 0; t < tabSize; ++t) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += static_cast<double>(off[a]) * off[a];
        vtab[t] = v0(h * std::sqrt(s));
        for (int a = 0; a < d; ++a) {
            if (++off[a] <= m) break;
            off[a] = -m;
        }
    }

    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t total = rho.size();
    std::vector<int> idx(d, 0);
    std::vector<int> joff(d, -m);
    for (std::size_t i = 0; i < total; ++i) {
        double acc = 0.0;
        std::fill(joff.begin(), joff.end(), -m);
        for (std::size_t t = 0; t < tabSize; ++t) {
            bool inside = true;
            std::size_t j = 0;
            std::size_t stride = 1;
            double wj = 1.0;
            for (int a = 0; a < d; ++a) {
                const int ja = idx[a] + joff[a];
                if (ja < 0 || ja >= n) {
                    inside = false;
                    break;
                }
                wj *= axis_weight(ja, n);
                j += stride * static_cast<std::size_t>(ja);
                stride *= static_cast<std::size_t>(n);
            }
            if (inside && vtab[t] != 0.0) acc += wj * vtab[t] * rho[j];
            for (int a = 0; a < d; ++a) {
                if (++joff[a] <= m) break;
                joff[a] = -m;
            }
        }
        out[i] = acc * hPow;
        for (int a = 0; a < d; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
}

struct FlowResult {
    GridFunction phi;
    double energy;
    EnergyBreakdown comp;
    double residual;
    long iterations;
    double maxIncrease;
};

// Normalized explicit gradient flow for
//   E[phi] = <phi,-Lap phi> + sum W phi^2 + quartic * integral phi^4 (+ Hartree term),
// stopping when both |dE| < epsE and the stationarity residual < epsR.
FlowResult run_flow(const Grid& grid, const std::vector<double>& W, double quartic,
                    const PairPotential* hartree, const FlowParams& params,
                    const GridFunction* init, const TrapPotential& VforInit) {
    const int axes = grid.dimension;
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();

    GridFunction phi = init ? *init : trap_matched_gaussian(VforInit, grid);
    if (!(phi.grid() == grid) || phi.particleCount() != 1)
        throw GridMismatchError("minimize: initial guess grid mismatch");
    normalize_l2(phi);

    const std::size_t total = phi.size();
    std::vector<double> G(total), conv;
    if (hartree) conv.assign(total, 0.0);
    std::vector<double> rho(total);

    double Wmax = 0.0;
    for (double w : W) Wmax = std::max(Wmax, w);
    double rhoMax = 0.0;
    for (std::size_t i = 0; i < total; ++i) rhoMax = std::max(rhoMax, phi[i] * phi[i]);

    double tau = params.timeStep;
    if (tau <= 0.0) {
        double curvature = laplacian_max_eigenvalue(axes, h) + Wmax + 6.0 * quartic * rhoMax;
        if (hartree) curvature += 6.0 * pair_coupling(*hartree, grid.dimension) * rhoMax;
        tau = 0.8 / curvature;
    }

    double energy = 0.0, prevEnergy = 0.0;
    EnergyBreakdown comp{};
    double residual = std::numeric_limits<double>::infinity();
    double maxIncrease = 0.0;
    long iter = 0;
    bool haveEnergy = false;

    while (iter < params.maxIterations) {
        ++iter;
        for (std::size_t i = 0; i < total; ++i) rho[i] = phi[i] * phi[i];
        std::fill(G.begin(), G.end(), 0.0);
        add_neg_laplacian(phi.data(), G.data(), axes, n, h);

        double kin = weighted_sum(rho, axes, n, h, [&](std::size_t i) { return phi[i] * G[i]; });
        double trap = weighted_sum(rho, axes, n, h, [&](std::size_t i) { return W[i] * rho[i]; });
        double inter = 0.0;
        if (hartree) {
            convolve_pair(*hartree, grid, rho, conv);
            inter = weighted_sum(rho, axes, n, h, [&](std::size_t i) { return conv[i] * rho[i]; });
            for (std::size_t i = 0; i < total; ++i)
                G[i] += (W[i] + 2.0 * conv[i]) * phi[i];
        } else {
            inter = quartic * weighted_sum(rho, axes, n, h,
                                           [&](std::size_t i) { return rho[i] * rho[i]; });
            for (std::size_t i = 0; i < total; ++i)
                G[i] += (W[i] + 2.0 * quartic * rho[i]) * phi[i];
        }
        energy = kin + trap + inter;
        comp = {kin, trap, inter};

        if (haveEnergy && energy > prevEnergy) maxIncrease = std::max(maxIncrease, energy - prevEnergy);
        const double dE = haveEnergy ? std::abs(energy - prevEnergy) : std::numeric_limits<double>::infinity();
        prevEnergy = energy;
        haveEnergy = true;

        bool converged = false;
        if (dE < params.energyTolerance) {
            // stationarity residual ||G - mu phi|| over the interior
            const double mu = energy + inter;
            double r2 = weighted_sum(rho, axes, n, h, [&](std::size_t i) {
                const double v = G[i] - mu * phi[i];
                return v * v;
            });
            residual = std::sqrt(std::max(r2, 0.0));
            converged = residual < params.residualTolerance;
        }
        if (converged) break;

        for (std::size_t i = 0; i < total; ++i) phi[i] -= tau * G[i];
        normalize_l2(phi);
    }

    if (!(residual < params.residualTolerance)) {
        throw ConvergenceError("minimize: no convergence within maxIterations", energy, residual,
                               iter, std::vector<double>(phi.values().begin(), phi.values().end()));
    }
    phi.markNormalized(true);
    return {std::move(phi), energy, comp, residual, iter, maxIncrease};
}

bool boundary_mass_high(const GridFunction& phi) {
    const int axes = phi.axisCount();
    const int n = phi.grid().pointsPerAxis;
    const std::size_t total = phi.size();
    std::vector<int> idx(axes, 0);
    for (std::size_t i = 0; i < total; ++i) {
        for (int a = 0; a < axes; ++a) {
            if (idx[a] == 0 || idx[a] == n - 1) {
                if (std::abs(phi[i]) > 1e-6) return true;
                break;
            }
        }
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return false;
}

NlsSolution pack_solution(FlowResult&& r) {
    NlsSolution s;
    s.energy = r.energy;
    s.components = r.comp;
    s.chemicalPotential = r.energy + r.comp.interaction;
    s.residualNorm = r.residual;
    s.iterations = r.iterations;
    s.maxEnergyIncrease = r.maxIncrease;
    s.boundaryMassHigh = boundary_mass_high(r.phi);
    s.phi = std::move(r.phi);
    return s;
}

} // namespace

NlsSolution minimize_nls(const TrapPotential& V, double g, const Grid& grid,
                         const FlowParams& params, const GridFunction* initialGuess) {
    if (!(g >= 0.0)) throw DomainError("minimize_nls: g >= 0 required");
    auto W = trap_table(V, grid, 1.0);
    return pack_solution(run_flow(grid, W, g, nullptr, params, initialGuess, V));
}

NlsSolution minimize_hartree(const TrapPotential& V, const PairPotential& v0, const Grid& grid,
                             const FlowParams& params, const GridFunction* initialGuess) {
    if (v0.isZero()) return minimize_nls(V, 0.0, grid, params, initialGuess);
    auto W = trap_table(V, grid, 1.0);
    return pack_solution(run_flow(grid, W, 0.0, &v0, params, initialGuess, V));
}

double nls_residual(const GridFunction& phi, double mu, const TrapPotential& V, double g,
                    double lambdaTrap) {
    const Grid& grid = phi.grid();
    if (phi.particleCount() != 1) throw GridMismatchError("nls_residual: one-particle field");
    const int axes = grid.dimension;
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();
    auto W = trap_table(V, grid, lambdaTrap);

    std::vector<double> G(phi.size(), 0.0);
    add_neg_laplacian(phi.data(), G.data(), axes, n, h);

    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;
    std::vector<int> idx(axes, 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        bool interior = true;
        for (int a = 0; a < axes; ++a)
            if (idx[a] < 2 || idx[a] > n - 3) {
                interior = false;
                break;
            }
        if (interior) {
            const double v = G[i] + (W[i] + 2.0 * g * phi[i] * phi[i]) * phi[i] - mu * phi[i];
            sum += v * v;
        }
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return std::sqrt(sum * hPow);
}

NlsSolution perturbed_nls_energy(PerturbedTerm which, double lambda, const TrapPotential& V,
                                 double g, const Grid& grid, const FlowParams& params,
                                 const GridFunction* initialGuess) {
    if (which == PerturbedTerm::trap) {
        if (!(lambda > 0.0)) throw DomainError("perturbed trap energy: lambda > 0 required");
        auto W = trap_table(V, grid, lambda);
        return pack_solution(run_flow(grid, W, g, nullptr, params, initialGuess, V));
    }
    if (!(lambda >= 0.0)) throw DomainError("perturbed interaction energy: lambda >= 0 required");
    return minimize_nls(V, lambda * g, grid, params, initialGuess);
}

HellmannFeynmanResult hellmann_feynman_check(PerturbedTerm which, double lambda, double delta,
                                             const TrapPotential& V, double g, const Grid& grid,
                                             const FlowParams& params) {
    if (!(delta > 0.0)) throw DomainError("hellmann_feynman_check: delta > 0");
    NlsSolution plus = perturbed_nls_energy(which, lambda + delta, V, g, grid, params);
    NlsSolution minus = perturbed_nls_energy(which, lambda - delta, V, g, grid, params);
    NlsSolution mid = perturbed_nls_energy(which, lambda, V, g, grid, params);

    HellmannFeynmanResult r;
    r.lhs = (plus.energy - minus.energy) / (2.0 * delta);
    if (which == PerturbedTerm::trap) {
        // d/dlambda of lambda * integral V phi^2 at the minimizer
        GridFunction rho = mid.phi;
        for (double& v : rho.values()) v *= v;
        auto W = trap_table(V, grid, 1.0);
        GridFunction Vf(grid, 1, std::vector<double>(W.begin(), W.end()));
        r.rhs = grid_inner(Vf, rho);
    } else {
        GridFunction rho2 = mid.phi;
        for (double& v : rho2.values()) v = v * v * v * v;
        r.rhs = g * grid_integrate(rho2);
    }
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

double nls_energy_of(const GridFunction& phi, const TrapPotential& V, double g,
                     double lambdaTrap) {
    const Grid& grid = phi.grid();
    const int axes = grid.dimension;
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();
    auto Wv = trap_table(V, grid, lambdaTrap);

    std::vector<double> f(phi.values().begin(), phi.values().end());
    const double kin = kinetic_energy(f, axes, n, h);
    GridFunction rho = phi;
    for (double& v : rho.values()) v *= v;
    GridFunction Wf(grid, 1, std::move(Wv));
    const double trap = grid_inner(Wf, rho);
    GridFunction rho2 = rho;
    for (double& v : rho2.values()) v *= v;
    const double inter = g * grid_integrate(rho2);
    return kin + trap + inter;
}

} // namespace beclab
