#ifndef BECLAB_PIPELINE_HPP
#define BECLAB_PIPELINE_HPP

#include "beclab/cache.hpp"
#include "beclab/config.hpp"
#include "beclab/metrics.hpp"
#include "beclab/nbody.hpp"
#include "beclab/report.hpp"

namespace beclab {

// Rebuilds every reported quantity from the wavefunction bits alone, so a
// cache hit and a fresh solve feed identical numbers downstream.
NlsSolution finalize_nls_solution(const GridFunction& phi, const TrapPotential& V, double g);
NBodyState finalize_nbody_state(const GridFunction& psi, const TrapPotential& V,
                                const PairPotential& v0, int N, double beta);

// Ground states through the cache (solve on miss, store, finalize on the
// loaded/solved bits).
NlsSolution nls_ground_state(const RunConfig& cfg, const Grid& grid, double g,
                             const GroundStateCache& cache);
NBodyState nbody_ground_state(const RunConfig& cfg, const Grid& grid, int N, double beta,
                              const GroundStateCache& cache);

struct ChaosCell {
    ChaosReport report;
    double kacBound = 0.0;       // T^2 * driftMismatch
    bool identityGrad1Selected = false;
    double fisherPaperReading = 0.0;  // (1/N) integral |grad Psi|^2, reported alongside
};

ChaosCell compute_chaos_cell(const RunConfig& cfg, int N, double beta,
                             const GroundStateCache& cache);

} // namespace beclab

#endif
