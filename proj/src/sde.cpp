#include "beclab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace beclab {

namespace {

// multilinear interpolation of a tensor table at point x (clamped to the box)
double interp_multilinear(const double* tab, const Grid& g, int axes, const double* x) {
    const int n = g.pointsPerAxis;
    const double h = g.spacing();
    int base[8];
    double frac[8];
    for (int a = 0; a < axes; ++a) {
        double t = (x[a] + g.extent) / h;
        t = std::clamp(t, 0.0, static_cast<double>(n - 1));
        int i = static_cast<int>(t);
        if (i > n - 2) i = n - 2;
        base[a] = i;
        frac[a] = std::clamp(t - i, 0.0, 1.0);
    }
    std::size_t strides[8];
    std::size_t s = 1;
    for (int a = 0; a < axes; ++a) {
        strides[a] = s;
        s *= static_cast<std::size_t>(n);
    }
    double acc = 0.0;
    const int corners = 1 << axes;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t j = 0;
        for (int a = 0; a < axes; ++a) {
            if (c & (1 << a)) {
                w *= frac[a];
                j += strides[a] * static_cast<std::size_t>(base[a] + 1);
            } else {
                w *= 1.0 - frac[a];
                j += strides[a] * static_cast<std::size_t>(base[a]);
            }
        }
        if (w != 0.0) acc += w * tab[j];
    }
    return acc;
}

double reflect_into_box(double x, double L) {
    // fold back into [-L, L]
    while (x > L || x < -L) {
        if (x > L) x = 2.0 * L - x;
        if (x < -L) x = -2.0 * L - x;
    }
    return x;
}

std::vector<double> frame_times(const SdeParams& p, long steps) {
    std::vector<double> t;
    const int F = p.recordedFrames;
    for (int f = 0; f < F; ++f) {
        const long s = static_cast<long>(std::llround(static_cast<double>(f) * steps / (F - 1)));
        t.push_back(s * p.timeStep);
    }
    return t;
}

std::vector<long> frame_steps(const SdeParams& p, long steps) {
    std::vector<long> v;
    const int F = p.recordedFrames;
    for (int f = 0; f < F; ++f)
        v.push_back(static_cast<long>(std::llround(static_cast<double>(f) * steps / (F - 1))));
    return v;
}

} // namespace

PerParticleDrift::PerParticleDrift(Grid grid, std::vector<double> u, int particles)
    : grid_(grid), u_(std::move(u)), particles_(particles) {
    if (grid_.dimension != 1) throw DomainError("PerParticleDrift: d = 1 tables only");
    if (u_.size() != static_cast<std::size_t>(grid_.pointsPerAxis))
        throw GridMismatchError("PerParticleDrift: table size mismatch");
}

double PerParticleDrift::eval1(double x) const {
    return interp_multilinear(u_.data(), grid_, 1, &x);
}

void PerParticleDrift::eval(const double* x, double* b) const {
    for (int i = 0; i < particles_; ++i) b[i] = eval1(x[i]);
}

SymmetricNBodyDrift::SymmetricNBodyDrift(Grid grid, std::vector<double> b1, int particles)
    : grid_(grid), b1_(std::move(b1)), particles_(particles) {
    if (grid_.dimension != 1) throw DomainError("SymmetricNBodyDrift: d = 1 only");
    std::size_t total = 1;
    for (int a = 0; a < particles_; ++a) total *= static_cast<std::size_t>(grid_.pointsPerAxis);
    if (b1_.size() != total) throw GridMismatchError("SymmetricNBodyDrift: table size mismatch");
}

double SymmetricNBodyDrift::eval_first(const double* x) const {
    return interp_multilinear(b1_.data(), grid_, particles_, x);
}

void SymmetricNBodyDrift::eval(const double* x, double* b) const {
    double y[8];
    for (int j = 0; j < particles_; ++j) {
        for (int a = 0; a < particles_; ++a) y[a] = x[a];
        std::swap(y[0], y[j]);
        b[j] = eval_first(y);
    }
}

std::vector<double> sample_density(const GridFunction& rho, long M, std::uint64_t seed) {
    const Grid& g = rho.grid();
    const int axes = rho.axisCount();
    const int n = g.pointsPerAxis;
    const double L = g.extent;
    const double h = g.spacing();
    for (double v : rho.values())
        if (!(v >= 0.0)) throw DomainError("sample_density: density must be nonnegative");
    const double rhoMax = rho.maxAbs();
    if (!(rhoMax > 0.0)) throw DomainError("sample_density: degenerate envelope (rho == 0)");

    CounterRng rng(seed);
    std::vector<double> pts(static_cast<std::size_t>(M) * axes);

    if (axes == 1) {
        // trapezoid CDF at the nodes, inverted by linear interpolation
        std::vector<double> cdf(static_cast<std::size_t>(n), 0.0);
        for (int i = 1; i < n; ++i)
            cdf[i] = cdf[i - 1] + 0.5 * h * (rho[static_cast<std::size_t>(i - 1)] +
                                             rho[static_cast<std::size_t>(i)]);
        const double mass = cdf[n - 1];
        if (!(mass > 0.0)) throw DomainError("sample_density: zero mass");
        for (int i = 0; i < n; ++i) cdf[i] /= mass;
        for (long j = 0; j < M; ++j) {
            const double u = rng.uniform(static_cast<std::uint64_t>(j), 0, 0, RngStream::initial);
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            int k = static_cast<int>(it - cdf.begin());
            if (k <= 0) k = 1;
            const double c0 = cdf[k - 1], c1 = cdf[k];
            const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
            pts[static_cast<std::size_t>(j)] = g.coord(k - 1) + t * h;
        }
        return pts;
    }

    // rejection against the box-uniform proposal with envelope max(rho)
    for (long j = 0; j < M; ++j) {
        double x[8];
        bool accepted = false;
        for (std::uint64_t attempt = 0; attempt < 1000000; ++attempt) {
            for (int a = 0; a < axes; ++a) {
                const double u = rng.uniform(static_cast<std::uint64_t>(j), attempt,
                                             static_cast<std::uint32_t>(a), RngStream::initial);
                x[a] = -L + 2.0 * L * u;
            }
            const double v = rng.uniform(static_cast<std::uint64_t>(j), attempt,
                                         static_cast<std::uint32_t>(axes), RngStream::initial);
            const double val = interp_multilinear(rho.data(), g, axes, x);
            if (v * rhoMax <= val) {
                accepted = true;
                break;
            }
        }
        if (!accepted) throw DomainError("sample_density: rejection sampler stalled");
        for (int a = 0; a < axes; ++a) pts[static_cast<std::size_t>(j) * axes + a] = x[a];
    }
    return pts;
}

PathEnsemble simulate(const Drift& drift, const Grid& grid, const std::vector<double>& init,
                      const SdeParams& params) {
    params.validate();
    const int dims = drift.dims();
    const long M = params.trajectories;
    if (init.size() != static_cast<std::size_t>(M) * dims)
        throw DomainError("simulate: init size != M * dims");
    const double L = grid.extent;
    const double dt = params.timeStep;
    const double sq = std::sqrt(dt);
    const long steps = std::max<long>(1, static_cast<long>(std::llround(params.horizon / dt)));

    PathEnsemble ens;
    ens.params = params;
    ens.dims = dims;
    ens.seed = params.seed;
    ens.recordTimes = frame_times(params, steps);
    const auto fsteps = frame_steps(params, steps);
    ens.states.assign(static_cast<std::size_t>(M) * ens.recordTimes.size() * dims, 0.0);
    ens.streamIndexPerTrajectory.resize(static_cast<std::size_t>(M));

    CounterRng rng(params.seed);
    std::vector<double> x(dims), b(dims);
    for (long j = 0; j < M; ++j) {
        ens.streamIndexPerTrajectory[static_cast<std::size_t>(j)] = static_cast<std::uint64_t>(j);
        for (int a = 0; a < dims; ++a) x[a] = init[static_cast<std::size_t>(j) * dims + a];
        std::size_t frame = 0;
        auto record = [&]() {
            double* dst =
                &ens.states[(static_cast<std::size_t>(j) * ens.recordTimes.size() + frame) * dims];
            for (int a = 0; a < dims; ++a) dst[a] = x[a];
            ++frame;
        };
        while (frame < fsteps.size() && fsteps[frame] == 0) record();
        for (long s = 0; s < steps; ++s) {
            drift.eval(x.data(), b.data());
            for (int a = 0; a < dims; ++a) {
                const double xi = rng.normal(static_cast<std::uint64_t>(j),
                                             static_cast<std::uint64_t>(s),
                                             static_cast<std::uint32_t>(a), RngStream::noise);
                double nx = x[a] + dt * b[a] + sq * xi;
                if (!std::isfinite(nx)) throw SimulationError("simulate: NaN state", j, s);
                x[a] = reflect_into_box(nx, L);
            }
            while (frame < fsteps.size() && fsteps[frame] == s + 1) record();
        }
    }
    return ens;
}

CoupledResult simulate_coupled(const Drift& bN, const Drift& uProduct, const Grid& grid,
                               const std::vector<double>& init, const SdeParams& params) {
    params.validate();
    if (bN.dims() != uProduct.dims()) throw DomainError("simulate_coupled: dims mismatch");
    const int dims = bN.dims();
    const long M = params.trajectories;
    if (init.size() != static_cast<std::size_t>(M) * dims)
        throw DomainError("simulate_coupled: init size != M * dims");
    const double L = grid.extent;
    const double dt = params.timeStep;
    const double sq = std::sqrt(dt);
    const long steps = std::max<long>(1, static_cast<long>(std::llround(params.horizon / dt)));

    CoupledResult res;
    for (PathEnsemble* e : {&res.ensembleA, &res.ensembleB}) {
        e->params = params;
        e->dims = dims;
        e->seed = params.seed;
        e->recordTimes = frame_times(params, steps);
        e->states.assign(static_cast<std::size_t>(M) * e->recordTimes.size() * dims, 0.0);
        e->streamIndexPerTrajectory.resize(static_cast<std::size_t>(M));
    }
    const auto fsteps = frame_steps(params, steps);
    res.supDistance2PerTrajectory.assign(static_cast<std::size_t>(M), 0.0);

    CounterRng rng(params.seed);
    std::vector<double> xa(dims), xb(dims), ba(dims), bb(dims);
    for (long j = 0; j < M; ++j) {
        res.ensembleA.streamIndexPerTrajectory[static_cast<std::size_t>(j)] =
            static_cast<std::uint64_t>(j);
        res.ensembleB.streamIndexPerTrajectory[static_cast<std::size_t>(j)] =
            static_cast<std::uint64_t>(j);
        for (int a = 0; a < dims; ++a)
            xa[a] = xb[a] = init[static_cast<std::size_t>(j) * dims + a];
        std::size_t frame = 0;
        double sup2 = 0.0;
        auto record = [&]() {
            double* da = &res.ensembleA.states[(static_cast<std::size_t>(j) *
                                                    res.ensembleA.recordTimes.size() +
                                                frame) *
                                               dims];
            double* db = &res.ensembleB.states[(static_cast<std::size_t>(j) *
                                                    res.ensembleB.recordTimes.size() +
                                                frame) *
                                               dims];
            for (int a = 0; a < dims; ++a) {
                da[a] = xa[a];
                db[a] = xb[a];
            }
            const double d1 = xa[0] - xb[0];
            sup2 = std::max(sup2, d1 * d1);
            ++frame;
        };
        while (frame < fsteps.size() && fsteps[frame] == 0) record();
        for (long s = 0; s < steps; ++s) {
            bN.eval(xa.data(), ba.data());
            uProduct.eval(xb.data(), bb.data());
            for (int a = 0; a < dims; ++a) {
                const double xi = rng.normal(static_cast<std::uint64_t>(j),
                                             static_cast<std::uint64_t>(s),
                                             static_cast<std::uint32_t>(a), RngStream::noise);
                const double inc = sq * xi;
                double na = xa[a] + dt * ba[a] + inc;
                double nb = xb[a] + dt * bb[a] + inc;
                if (!std::isfinite(na) || !std::isfinite(nb))
                    throw SimulationError("simulate_coupled: NaN state", j, s);
                xa[a] = reflect_into_box(na, L);
                xb[a] = reflect_into_box(nb, L);
            }
            while (frame < fsteps.size() && fsteps[frame] == s + 1) record();
        }
        res.supDistance2PerTrajectory[static_cast<std::size_t>(j)] = sup2;
    }
    double mean = 0.0;
    for (double v : res.supDistance2PerTrajectory) mean += v;
    res.meanSupDistance2 = mean / static_cast<double>(M);
    return res;
}

GridFunction empirical_density(const PathEnsemble& ens, const Grid& grid, int coordinate,
                               double tLo, double tHi) {
    if (coordinate < 0 || coordinate >= ens.dims)
        throw DomainError("empirical_density: coordinate out of range");
    const int n = grid.pointsPerAxis;
    const double h = grid.spacing();
    const double L = grid.extent;
    std::vector<long> counts(static_cast<std::size_t>(n), 0);
    long total = 0;
    for (int f = 0; f < ens.frames(); ++f) {
        const double t = ens.recordTimes[static_cast<std::size_t>(f)];
        if (t < tLo - 1e-12 || t > tHi + 1e-12) continue;
        for (long j = 0; j < ens.params.trajectories; ++j) {
            const double x = ens.state(j, f, coordinate);
            int k = static_cast<int>(std::llround((x + L) / h));
            k = std::clamp(k, 0, n - 1);
            ++counts[static_cast<std::size_t>(k)];
            ++total;
        }
    }
    if (total == 0) throw DomainError("empirical_density: empty time window");
    GridFunction rho(grid.dimension == 1 ? grid : Grid(1, L, n), 1);
    for (int i = 0; i < n; ++i) {
        const double width = (i == 0 || i == n - 1) ? 0.5 * h : h;
        rho[static_cast<std::size_t>(i)] =
            static_cast<double>(counts[static_cast<std::size_t>(i)]) /
            (static_cast<double>(total) * width);
    }
    normalize_mass(rho);
    return rho;
}

} // namespace beclab
