#include "beclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace beclab {

std::size_t tensor_size_checked(const Grid& g, int particleCount, std::size_t budget) {
    std::size_t total = 1;
    const int axes = g.dimension * particleCount;
    for (int a = 0; a < axes; ++a) {
        const std::size_t n = static_cast<std::size_t>(g.pointsPerAxis);
        if (total > budget / n + 1) throw BudgetError("tensor grid exceeds point budget", 0, budget);
        total *= n;
    }
    if (total > budget)
        throw BudgetError("tensor grid exceeds point budget (" + std::to_string(total) +
                              " > " + std::to_string(budget) + " points)",
                          total, budget);
    return total;
}

GridFunction::GridFunction(const Grid& g, int particleCount, double fill)
    : grid_(g), particleCount_(particleCount) {
    if (particleCount < 1) throw DomainError("GridFunction: particleCount >= 1");
    std::size_t total = 1;
    for (int a = 0; a < axisCount(); ++a) total *= static_cast<std::size_t>(g.pointsPerAxis);
    values_.assign(total, fill);
}

GridFunction::GridFunction(const Grid& g, int particleCount, std::vector<double> values)
    : grid_(g), particleCount_(particleCount), values_(std::move(values)) {
    if (particleCount < 1) throw DomainError("GridFunction: particleCount >= 1");
    std::size_t total = 1;
    for (int a = 0; a < axisCount(); ++a) total *= static_cast<std::size_t>(g.pointsPerAxis);
    if (values_.size() != total) throw DomainError("GridFunction: value array size mismatch");
}

double GridFunction::maxAbs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool GridFunction::allFinite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// Product of per-axis trapezoid weights walked in flat order without a full
// index decomposition per point: weight changes only through axis 0 except at
// row boundaries, so recompute from the multi-index only when axis 0 wraps.
template <typename F>
double weighted_fold(const GridFunction& f, F&& term) {
    const int axes = f.axisCount();
    const int n = f.grid().pointsPerAxis;
    const double h = f.grid().spacing();
    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;

    const std::size_t total = f.size();
    std::vector<int> idx(axes, 0);
    double sum = 0.0;
    std::size_t i = 0;
    while (i < total) {
        // weight of axes 1.. for this row
        double wRow = 1.0;
        for (int a = 1; a < axes; ++a) wRow *= axis_weight(idx[a], n);
        for (int i0 = 0; i0 < n; ++i0, ++i) {
            const double w = wRow * axis_weight(i0, n);
            sum += w * term(i);
        }
        // advance the multi-index past one full axis-0 row
        for (int a = 1; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
        if (axes == 1) break;
    }
    return sum * hPow;
}

} // namespace

double grid_integrate(const GridFunction& f) {
    return weighted_fold(f, [&](std::size_t i) { return f[i]; });
}

double grid_inner(const GridFunction& f, const GridFunction& g) {
    if (!(f.grid() == g.grid()) || f.particleCount() != g.particleCount())
        throw GridMismatchError("grid_inner: incompatible grids");
    return weighted_fold(f, [&](std::size_t i) { return f[i] * g[i]; });
}

double normalize_l2(GridFunction& f) {
    const double norm2 = weighted_fold(f, [&](std::size_t i) { return f[i] * f[i]; });
    const double norm = std::sqrt(norm2);
    if (!(norm > 0.0)) throw DomainError("normalize_l2: zero function");
    const double inv = 1.0 / norm;
    for (double& v : f.values()) v *= inv;
    f.markNormalized(true);
    return norm;
}

double normalize_mass(GridFunction& f) {
    const double mass = grid_integrate(f);
    if (!(mass > 0.0)) throw DomainError("normalize_mass: zero mass");
    const double inv = 1.0 / mass;
    for (double& v : f.values()) v *= inv;
    return mass;
}

double default_drift_floor(const GridFunction& rho) {
    return 1e-30 * rho.maxAbs();
}

VectorField drift_from_density(const GridFunction& rho, double floor) {
    if (!(floor > 0.0)) throw DomainError("drift_from_density: floor must be positive");
    const int axes = rho.axisCount();
    const int n = rho.grid().pointsPerAxis;
    const double h = rho.grid().spacing();
    const std::size_t total = rho.size();

    // log of floored density
    std::vector<double> logRho(total);
    for (std::size_t i = 0; i < total; ++i) logRho[i] = std::log(std::max(rho[i], floor));

    VectorField out;
    out.grid = rho.grid();
    out.particleCount = rho.particleCount();
    out.component.assign(axes, std::vector<double>(total));

    const double half = PhysicalConvention::driftFromLogDensity;
    std::size_t stride = 1;
    for (int a = 0; a < axes; ++a) {
        std::vector<double>& b = out.component[a];
        const std::size_t block = stride * static_cast<std::size_t>(n);
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t p0 = base + off;
                // one-sided at edges, central inside (second order)
                b[p0] = half * (logRho[p0 + stride] - logRho[p0]) / h;
                const std::size_t pl = p0 + stride * static_cast<std::size_t>(n - 1);
                b[pl] = half * (logRho[pl] - logRho[pl - stride]) / h;
                for (int i = 1; i < n - 1; ++i) {
                    const std::size_t p = p0 + stride * static_cast<std::size_t>(i);
                    b[p] = half * (logRho[p + stride] - logRho[p - stride]) / (2.0 * h);
                }
            }
        }
        stride *= static_cast<std::size_t>(n);
    }
    return out;
}

} // namespace beclab
