#ifndef BECLAB_GRID_HPP
#define BECLAB_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "beclab/errors.hpp"

namespace beclab {

// Fixed physical convention shared by all solvers: energies carry a unit
// kinetic coefficient (term |grad phi|^2) and diffusions are driven by a
// standard Brownian motion with drift grad(rho)/(2 rho). Under this pair any
// density rho is invariant for dX = drift dt + dW.
struct PhysicalConvention {
    static constexpr double kineticCoefficient = 1.0;
    static constexpr double diffusionCoefficient = 0.5;
    static constexpr double driftFromLogDensity = 0.5; // b = 1/2 * grad log rho
};

// Uniform isotropic tensor mesh on [-L, L]^d per particle, n points per axis.
struct Grid {
    int dimension = 1;      // d, per particle (1..3)
    double extent = 1.0;    // L, half-width
    int pointsPerAxis = 8;  // n

    Grid() = default;
    Grid(int d, double L, int n) : dimension(d), extent(L), pointsPerAxis(n) {
        if (d < 1 || d > 3) throw DomainError("Grid: dimension must be 1, 2 or 3");
        if (n < 8) throw DomainError("Grid: need at least 8 points per axis");
        if (!(L > 0.0)) throw DomainError("Grid: extent must be positive");
    }

    double spacing() const { return 2.0 * extent / (pointsPerAxis - 1); }
    double coord(int i) const { return -extent + i * spacing(); }

    bool operator==(const Grid& o) const {
        return dimension == o.dimension && extent == o.extent && pointsPerAxis == o.pointsPerAxis;
    }
};

// Number of points of the tensor power grid^(axes); throws BudgetError above `budget`.
std::size_t tensor_size_checked(const Grid& g, int particleCount, std::size_t budget);

// Real scalar field sampled on grid^N (N = particleCount), coordinate r1 fastest.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(const Grid& g, int particleCount, double fill = 0.0);
    GridFunction(const Grid& g, int particleCount, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    int particleCount() const { return particleCount_; }
    int axisCount() const { return grid_.dimension * particleCount_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    bool normalized() const { return normalized_; }  // wavefunction sense: integral f^2 = 1
    void markNormalized(bool v) { normalized_ = v; }

    double maxAbs() const;
    bool allFinite() const;

private:
    Grid grid_{};
    int particleCount_ = 1;
    std::vector<double> values_;
    bool normalized_ = false;
};

// Trapezoid weight of axis index i on an n-point axis (unit spacing).
inline double axis_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

// Trapezoid-rule integral with a deterministic ordered fold.
double grid_integrate(const GridFunction& f);
double grid_inner(const GridFunction& f, const GridFunction& g);

// In-place L2 normalization (wavefunctions); returns the norm before scaling.
double normalize_l2(GridFunction& f);
// In-place mass normalization (densities; integral f = 1); returns prior mass.
double normalize_mass(GridFunction& f);

// Vector field on grid^N with d*N components, same layout as GridFunction.
struct VectorField {
    Grid grid{};
    int particleCount = 1;
    std::vector<std::vector<double>> component; // [axis][flatIndex]

    int axisCount() const { return grid.dimension * particleCount; }
    std::size_t pointCount() const { return component.empty() ? 0 : component[0].size(); }
};

// Nelson drift b = 1/2 grad(log rho) computed on max(rho, floor) with central
// differences inside and one-sided differences at the box edges.
// floor <= 0 is a domain error; callers usually pass 1e-30 * max(rho).
VectorField drift_from_density(const GridFunction& rho, double floor);

// Default drift floor used by the lab.
double default_drift_floor(const GridFunction& rho);

// Multi-index helpers (axis 0 fastest).
inline void unflatten(std::size_t flat, int axes, int n, int* idx) {
    for (int a = 0; a < axes; ++a) {
        idx[a] = static_cast<int>(flat % n);
        flat /= n;
    }
}
inline std::size_t flatten(const int* idx, int axes, std::size_t n) {
    std::size_t f = 0;
    for (int a = axes - 1; a >= 0; --a) f = f * n + idx[a];
    return f;
}

} // namespace beclab

#endif
