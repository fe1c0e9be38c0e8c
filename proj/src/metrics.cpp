#include "beclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "beclab/fd.hpp"

namespace beclab {

namespace {

constexpr double kMassFloor = 1e-30;

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

} // namespace

void DiscreteDistPair::validate() const {
    if (P.size() != Q.size() || P.empty())
        throw DomainError("DiscreteDistPair: size mismatch or empty");
    double sp = 0.0, sq = 0.0;
    for (double v : P) {
        if (!(v >= 0.0)) throw DomainError("DiscreteDistPair: negative entry in P");
        sp += v;
    }
    for (double v : Q) {
        if (!(v >= 0.0)) throw DomainError("DiscreteDistPair: negative entry in Q");
        sq += v;
    }
    if (std::abs(sp - 1.0) > 1e-12 || std::abs(sq - 1.0) > 1e-12)
        throw DomainError("DiscreteDistPair: entries must sum to 1 within 1e-12");
}

Divergence kl_discrete(std::span<const double> P, std::span<const double> Q) {
    if (P.size() != Q.size()) throw DomainError("kl_discrete: size mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (P[i] < kMassFloor) continue;
        if (Q[i] <= 0.0)
            return {std::numeric_limits<double>::infinity(), false};
        kl += P[i] * std::log(P[i] / Q[i]);
    }
    return {kl, true};
}

double tv_discrete(std::span<const double> P, std::span<const double> Q) {
    if (P.size() != Q.size()) throw DomainError("tv_discrete: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) s += std::abs(P[i] - Q[i]);
    return 0.5 * s;
}

double tv_density(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid()) || a.particleCount() != b.particleCount())
        throw GridMismatchError("tv_density: incompatible grids");
    const int axes = a.axisCount();
    const int n = a.grid().pointsPerAxis;
    const double h = a.grid().spacing();
    return 0.5 * weighted_sum_fn(a.size(), axes, n, h,
                                 [&](std::size_t i) { return std::abs(a[i] - b[i]); });
}

PinskerResult pinsker_check(std::span<const double> P, std::span<const double> Q) {
    PinskerResult r;
    r.tv = tv_discrete(P, Q);
    Divergence d = kl_discrete(P, Q);
    r.kl = d.value;
    r.bound = d.absolutelyContinuous ? std::sqrt(2.0 * d.value)
                                     : std::numeric_limits<double>::infinity();
    r.strongerBound = d.absolutelyContinuous ? std::sqrt(0.5 * d.value)
                                             : std::numeric_limits<double>::infinity();
    r.violated = r.tv > r.bound + 1e-12;
    r.strongerViolated = r.tv > r.strongerBound + 1e-12;
    return r;
}

ChainRuleResult chain_rule_gap(std::span<const double> P, int nx, int ny,
                               std::span<const double> Q1, std::span<const double> Q2) {
    if (P.size() != static_cast<std::size_t>(nx) * ny ||
        Q1.size() != static_cast<std::size_t>(nx) || Q2.size() != static_cast<std::size_t>(ny))
        throw DomainError("chain_rule_gap: size mismatch");
    std::vector<double> P1(static_cast<std::size_t>(nx), 0.0);
    std::vector<double> P2(static_cast<std::size_t>(ny), 0.0);
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            const double p = P[static_cast<std::size_t>(x) * ny + y];
            P1[static_cast<std::size_t>(x)] += p;
            P2[static_cast<std::size_t>(y)] += p;
        }

    ChainRuleResult r;
    double joint = 0.0;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
            const double p = P[static_cast<std::size_t>(x) * ny + y];
            if (p < kMassFloor) continue;
            const double q = Q1[static_cast<std::size_t>(x)] * Q2[static_cast<std::size_t>(y)];
            if (q <= 0.0) {
                r.absolutelyContinuous = false;
                r.gap = std::numeric_limits<double>::infinity();
                return r;
            }
            joint += p * std::log(p / q);
        }
    const Divergence h1 = kl_discrete(P1, Q1);
    const Divergence h2 = kl_discrete(P2, Q2);
    r.gap = joint - h1.value - h2.value;
    return r;
}

double drift_mismatch(const NBodyState& state, const NlsSolution& nls) {
    const GridFunction& psi = state.psi;
    if (!(psi.grid() == nls.phi.grid()))
        throw GridMismatchError("drift_mismatch: per-particle grids differ");
    const int axes = psi.axisCount();
    const int n = psi.grid().pointsPerAxis;
    const double h = psi.grid().spacing();

    GridFunction rhoN = nbody_density(state);
    const double floorN = default_drift_floor(rhoN);
    std::vector<double> b1 = drift_component_from_density(rhoN, 0, floorN);

    GridFunction rho1 = nls.phi;
    for (double& v : rho1.values()) v *= v;
    std::vector<double> u = drift_component_from_density(rho1, 0, default_drift_floor(rho1));

    return weighted_sum_fn(psi.size(), axes, n, h, [&](std::size_t i) {
        const double d = b1[i] - u[i % static_cast<std::size_t>(n)];
        return d * d * rhoN[i];
    });
}

EntropyIdentityResult entropy_identity_check(const NBodyState& state, const NlsSolution& nls,
                                             double g) {
    const GridFunction& psi = state.psi;
    if (!(psi.grid() == nls.phi.grid()))
        throw GridMismatchError("entropy_identity_check: grids differ");
    const int axes = psi.axisCount();
    const int n = psi.grid().pointsPerAxis;
    const double h = psi.grid().spacing();

    EntropyIdentityResult r;
    r.mismatch = drift_mismatch(state, nls);

    // integral V(r1) |Psi|^2 and 2 g integral phi^2(r1) |Psi|^2
    const auto& Vtab = state.trapTable;
    std::vector<double> phi2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p = nls.phi[static_cast<std::size_t>(i)];
        phi2[static_cast<std::size_t>(i)] = p * p;
    }
    const double trapTerm = weighted_sum_fn(psi.size(), axes, n, h, [&](std::size_t i) {
        return Vtab[i % static_cast<std::size_t>(n)] * psi[i] * psi[i];
    });
    const double phiTerm = weighted_sum_fn(psi.size(), axes, n, h, [&](std::size_t i) {
        return phi2[i % static_cast<std::size_t>(n)] * psi[i] * psi[i];
    });

    const double kin1 = state.componentsPerParticle.kinetic1;
    const double common = trapTerm + 2.0 * g * phiTerm - nls.chemicalPotential;
    r.rhsGrad1 = kin1 + common;
    r.rhsFullGrad = 0.5 * state.kineticFull + common;
    r.gapGrad1 = std::abs(r.rhsGrad1 - r.mismatch);
    r.gapFullGrad = std::abs(r.rhsFullGrad - r.mismatch);
    r.grad1Selected = r.gapGrad1 <= r.gapFullGrad;
    return r;
}

namespace {

// discrete measure (trapezoid weights baked in, renormalized) of a grid density
std::vector<double> density_to_measure(const GridFunction& rho) {
    const int axes = rho.axisCount();
    const int n = rho.grid().pointsPerAxis;
    const double h = rho.grid().spacing();
    std::vector<double> p(rho.size());
    std::vector<int> idx(axes, 0);
    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;
    double mass = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        double w = hPow;
        for (int a = 0; a < axes; ++a) w *= axis_weight(idx[a], n);
        p[i] = w * std::max(rho[i], 0.0);
        mass += p[i];
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    if (!(mass > 0.0)) throw DomainError("density_to_measure: zero mass");
    for (double& v : p) v /= mass;
    return p;
}

// k-fold product of a one-particle density as a measure on grid^k
std::vector<double> product_measure(const GridFunction& rho1, int k) {
    const int n = rho1.grid().pointsPerAxis;
    auto p1 = density_to_measure(rho1);
    std::size_t total = 1;
    for (int a = 0; a < k; ++a) total *= static_cast<std::size_t>(n);
    std::vector<double> q(total);
    std::vector<int> idx(k, 0);
    for (std::size_t i = 0; i < total; ++i) {
        double v = 1.0;
        for (int a = 0; a < k; ++a) v *= p1[static_cast<std::size_t>(idx[a])];
        q[i] = v;
        for (int a = 0; a < k; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return q;
}

} // namespace

KMarginalResult k_marginal_entropy(const NBodyState& state, const NlsSolution& nls, int k,
                                   double t, double mismatch) {
    if (k < 1 || k >= state.N) throw DomainError("k_marginal_entropy: 1 <= k < N");
    GridFunction rhoK = marginal_density(state, k);
    GridFunction rho1 = nls.phi;
    for (double& v : rho1.values()) v *= v;

    auto p = density_to_measure(rhoK);
    auto q = product_measure(rho1, k);

    KMarginalResult r;
    r.kl = kl_discrete(p, q).value;
    r.tv = tv_discrete(p, q);
    r.pathBound = k * one_particle_entropy(t, mismatch);
    return r;
}

ChainBoundResult k_marginal_chain_bound(const NBodyState& state, const NlsSolution& nls) {
    GridFunction rhoN = nbody_density(state);
    GridFunction rho1nls = nls.phi;
    for (double& v : rho1nls.values()) v *= v;

    auto pN = density_to_measure(rhoN);
    auto qN = product_measure(rho1nls, state.N);
    const double klFull = kl_discrete(pN, qN).value;

    GridFunction rho1 = marginal_density(state, 1);
    auto p1 = density_to_measure(rho1);
    auto q1 = density_to_measure(rho1nls);
    const double kl1 = kl_discrete(p1, q1).value;

    ChainBoundResult r;
    r.lhs = kl1;
    r.rhs = klFull / state.N;
    r.holds = r.lhs <= r.rhs + 1e-10;
    return r;
}

FisherResult fisher_information(const GridFunction& rho, int particleCount) {
    const int axes = rho.axisCount();
    const int n = rho.grid().pointsPerAxis;
    const double h = rho.grid().spacing();
    for (double v : rho.values())
        if (!(v >= 0.0)) throw DomainError("fisher_information: density must be nonnegative");
    const double floor = std::max(kMassFloor * std::max(rho.maxAbs(), 1.0), 1e-300);

    std::vector<double> grad(rho.size());
    std::vector<double> sum(rho.size(), 0.0);
    for (int a = 0; a < axes; ++a) {
        derivative_axis(rho.data(), grad.data(), a, axes, n, h);
        for (std::size_t i = 0; i < rho.size(); ++i) sum[i] += grad[i] * grad[i];
    }
    const double In = weighted_sum_fn(rho.size(), axes, n, h, [&](std::size_t i) {
        return sum[i] / std::max(rho[i], floor);
    });
    FisherResult r;
    r.In = In;
    r.normalized = In / std::max(particleCount, 1);
    return r;
}

GridFunction marginal_tail(const GridFunction& rho, int l) {
    const int axes = rho.axisCount();
    if (l < 1 || l >= axes) throw DomainError("marginal_tail: 1 <= l < axes");
    const int n = rho.grid().pointsPerAxis;
    const double h = rho.grid().spacing();
    std::size_t headSize = 1;
    for (int a = 0; a < l; ++a) headSize *= static_cast<std::size_t>(n);

    GridFunction out(rho.grid(), axes - l, 0.0);
    double hHead = 1.0;
    for (int a = 0; a < l; ++a) hHead *= h;
    std::vector<int> idx(axes, 0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        double w = 1.0;
        for (int a = 0; a < l; ++a) w *= axis_weight(idx[a], n);
        out[i / headSize] += w * rho[i];
        for (int a = 0; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    for (double& v : out.values()) v *= hHead;
    normalize_mass(out);
    return out;
}

double fisher_superadditivity_gap(const GridFunction& G, int l) {
    const int axes = G.axisCount();
    if (l < 1 || l >= axes) throw DomainError("fisher_superadditivity_gap: 1 <= l < n");
    GridFunction head = marginal_density(G, l);
    GridFunction tail = marginal_tail(G, l);
    const double In = fisher_information(G, 1).In;
    const double Il = fisher_information(head, 1).In;
    const double Inl = fisher_information(tail, 1).In;
    return In - Il - Inl;
}

double fisher_convexity_check(const GridFunction& G1, const GridFunction& G2, double alpha) {
    if (!(alpha >= 0.0) || !(alpha <= 1.0))
        throw DomainError("fisher_convexity_check: alpha in [0,1]");
    if (!(G1.grid() == G2.grid()) || G1.particleCount() != G2.particleCount())
        throw GridMismatchError("fisher_convexity_check: grids differ");
    GridFunction mix = G1;
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = alpha * G1[i] + (1.0 - alpha) * G2[i];
    const double lhs =
        alpha * fisher_information(G1, 1).In + (1.0 - alpha) * fisher_information(G2, 1).In;
    return lhs - fisher_information(mix, 1).In;
}

} // namespace beclab
