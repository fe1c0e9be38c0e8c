#ifndef BECLAB_SDE_HPP
#define BECLAB_SDE_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "beclab/grid.hpp"
#include "beclab/rng.hpp"

namespace beclab {

struct SdeParams {
    double timeStep = 1e-3;
    double horizon = 1.0;
    long trajectories = 1000;
    std::uint64_t seed = 0;
    int recordedFrames = 101;  // includes t = 0; ~1e2 recorded time points

    void validate() const {
        if (!(timeStep > 0.0)) throw DomainError("SdeParams: dt > 0");
        if (!(horizon >= timeStep)) throw DomainError("SdeParams: T >= dt");
        if (trajectories < 1) throw DomainError("SdeParams: M >= 1");
        if (recordedFrames < 2) throw DomainError("SdeParams: need at least 2 recorded frames");
    }
};

// Drift field b : R^dims -> R^dims evaluated at arbitrary points.
class Drift {
public:
    virtual ~Drift() = default;
    virtual int dims() const = 0;
    virtual void eval(const double* x, double* b) const = 0;
};

class ZeroDrift final : public Drift {
public:
    explicit ZeroDrift(int d) : d_(d) {}
    int dims() const override { return d_; }
    void eval(const double*, double* b) const override {
        for (int i = 0; i < d_; ++i) b[i] = 0.0;
    }

private:
    int d_;
};

// b(x) = (u(x_1), ..., u(x_n)) with u a tabulated per-particle 1D drift.
class PerParticleDrift final : public Drift {
public:
    PerParticleDrift(Grid grid, std::vector<double> u, int particles);
    int dims() const override { return particles_; }
    void eval(const double* x, double* b) const override;
    double eval1(double x) const;

private:
    Grid grid_;
    std::vector<double> u_;
    int particles_;
};

// Full N-body drift from the first-component table b1 on grid^N, the other
// components obtained by the coordinate-swap symmetry of rho_N.
class SymmetricNBodyDrift final : public Drift {
public:
    SymmetricNBodyDrift(Grid grid, std::vector<double> b1, int particles);
    int dims() const override { return particles_; }
    void eval(const double* x, double* b) const override;
    // first component only (multilinear interpolation of the table)
    double eval_first(const double* x) const;

private:
    Grid grid_;
    std::vector<double> b1_;
    int particles_;
};

// Arbitrary callable drift (tests).
class CallableDrift final : public Drift {
public:
    using Fn = void (*)(const double*, double*, int);
    CallableDrift(int d, Fn f) : d_(d), f_(f) {}
    int dims() const override { return d_; }
    void eval(const double* x, double* b) const override { f_(x, b, d_); }

private:
    int d_;
    Fn f_;
};

struct PathEnsemble {
    SdeParams params{};
    int dims = 1;
    std::vector<double> recordTimes;      // frame -> time
    std::vector<double> states;           // [traj][frame][dim], traj-major
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> streamIndexPerTrajectory;

    double state(long traj, int frame, int dim) const {
        return states[(static_cast<std::size_t>(traj) * recordTimes.size() + frame) * dims + dim];
    }
    int frames() const { return static_cast<int>(recordTimes.size()); }
};

// Draw M points from a grid density: inverse-CDF for one axis, rejection
// sampling against a box-uniform proposal otherwise.
std::vector<double> sample_density(const GridFunction& rho, long M, std::uint64_t seed);

// Euler-Maruyama with unit-coefficient Gaussian increments and reflection at
// the box boundary; states recorded on ~1e2 uniform frames.
PathEnsemble simulate(const Drift& drift, const Grid& grid, const std::vector<double>& init,
                      const SdeParams& params);

struct CoupledResult {
    PathEnsemble ensembleA;  // N-body drift
    PathEnsemble ensembleB;  // per-particle limit drift
    std::vector<double> supDistance2PerTrajectory;  // first components
    double meanSupDistance2 = 0.0;
};

// Synchronous coupling: both systems share initial data and Brownian paths.
CoupledResult simulate_coupled(const Drift& bN, const Drift& uProduct, const Grid& grid,
                               const std::vector<double>& init, const SdeParams& params);

// Normalized histogram of one coordinate over a time window [tLo, tHi].
GridFunction empirical_density(const PathEnsemble& ens, const Grid& grid, int coordinate,
                               double tLo, double tHi);

} // namespace beclab

#endif
