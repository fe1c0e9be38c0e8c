#ifndef BECLAB_METRICS_HPP
#define BECLAB_METRICS_HPP

#include <span>
#include <vector>

#include "beclab/gp.hpp"
#include "beclab/grid.hpp"
#include "beclab/nbody.hpp"
#include "beclab/sde.hpp"

namespace beclab {

// Probability vectors over a finite set; entries >= 0 summing to 1 within 1e-12.
struct DiscreteDistPair {
    std::vector<double> P;
    std::vector<double> Q;
    void validate() const;
};

struct Divergence {
    double value = 0.0;
    bool absolutelyContinuous = true;  // false => value is the +inf sentinel
};

// KL = sum P ln(P/Q); entries with P < 1e-30 contribute 0 (0 ln 0 convention).
Divergence kl_discrete(std::span<const double> P, std::span<const double> Q);

// TV = 1/2 sum |P - Q| (equals the sup_A definition for discrete measures).
double tv_discrete(std::span<const double> P, std::span<const double> Q);

// TV between grid densities by trapezoid quadrature.
double tv_density(const GridFunction& a, const GridFunction& b);

struct PinskerResult {
    double tv = 0.0;
    double kl = 0.0;
    double bound = 0.0;          // sqrt(2 KL), the constant asserted here
    double strongerBound = 0.0;  // sqrt(KL/2), measured and reported only
    bool violated = false;
    bool strongerViolated = false;
};

PinskerResult pinsker_check(std::span<const double> P, std::span<const double> Q);

// H(P|Q1xQ2) - H(P1|Q1) - H(P2|Q2) for P on a product alphabet (row-major,
// nx rows, ny columns); nonnegative whenever P << Q1xQ2.
struct ChainRuleResult {
    double gap = 0.0;
    bool absolutelyContinuous = true;
};
ChainRuleResult chain_rule_gap(std::span<const double> P, int nx, int ny,
                               std::span<const double> Q1, std::span<const double> Q2);

// E_{rho_N} || b1^N - u_nlS ||^2 by tensor-grid quadrature.
double drift_mismatch(const NBodyState& state, const NlsSolution& nls);

// Right-hand side of the drift-mismatch identity, evaluated under both
// readings of the kinetic term; the grad_1 reading is the one the identity
// selects numerically.
struct EntropyIdentityResult {
    double mismatch = 0.0;
    double rhsGrad1 = 0.0;  // integral |grad_1 Psi|^2 + V(r1) + 2 g phi^2(r1) terms - mu
    double rhsFullGrad = 0.0;  // same with integral |grad Psi|^2 / 2 instead
    double gapGrad1 = 0.0;
    double gapFullGrad = 0.0;
    bool grad1Selected = false;  // which reading lands closer
};
EntropyIdentityResult entropy_identity_check(const NBodyState& state, const NlsSolution& nls,
                                             double g);

// Path-space relative entropy through the closed form (t/2) * mismatch.
inline double one_particle_entropy(double t, double mismatch) {
    if (!(t >= 0.0)) throw DomainError("one_particle_entropy: t >= 0");
    return 0.5 * t * mismatch;
}

struct KMarginalResult {
    double kl = 0.0;        // grid KL of the k-marginal against rho_nls^k
    double tv = 0.0;        // grid TV of the same pair
    double pathBound = 0.0; // k * Hbar(t), reported alongside
};
KMarginalResult k_marginal_entropy(const NBodyState& state, const NlsSolution& nls, int k,
                                   double t, double mismatch);

// Density-level chain-rule bound KL(rho^(1) | rho_nls) <= KL(rho_N | rho_nls^N)/N.
struct ChainBoundResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
ChainBoundResult k_marginal_chain_bound(const NBodyState& state, const NlsSolution& nls);

struct FisherResult {
    double In = 0.0;          // integral |grad G|^2 / G
    double normalized = 0.0;  // In / particleCount
};
FisherResult fisher_information(const GridFunction& rho, int particleCount);

// I_n(G) - I_l(G_head) - I_{n-l}(G_tail); >= 0 up to quadrature (equality iff product).
double fisher_superadditivity_gap(const GridFunction& G, int l);

// alpha I(G1) + (1-alpha) I(G2) - I(alpha G1 + (1-alpha) G2); >= 0 by convexity.
double fisher_convexity_check(const GridFunction& G1, const GridFunction& G2, double alpha);

// Ensemble mean of the per-trajectory sup distance^2 from a coupled run.
inline double kac_chaos_metric(const CoupledResult& coupled) { return coupled.meanSupDistance2; }

// Quadrature bound paired with the Kac metric (Jensen chain at stationarity).
inline double kac_bound(double T, double mismatch) { return T * T * mismatch; }

// Marginal over the trailing axes (integrates out the first l coordinates).
GridFunction marginal_tail(const GridFunction& rho, int l);

} // namespace beclab

#endif
