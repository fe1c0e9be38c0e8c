#ifndef BECLAB_FD_HPP
#define BECLAB_FD_HPP

#include <cstddef>
#include <vector>

namespace beclab {

// Fourth-order finite differences on the tensor grid with zero padding beyond
// the box; adequate because the trap makes boundary values exponentially
// small. Axis 0 has stride 1.

// out += sum over the given axes of (-d^2/dx_a^2) f, 5-point stencil.
void add_neg_laplacian(const double* f, double* out, int axes, int n, double h);

// out += (-d^2/dx_axis^2) f for one axis only.
void add_neg_laplacian_axis(const double* f, double* out, int axis, int axes, int n, double h);

// Fourth-order first derivative along one axis (central inside, one-sided at
// the edges), written into out.
void derivative_axis(const double* f, double* out, int axis, int axes, int n, double h);

// <f, -Lap f> with trapezoid weights (kinetic energy of a wavefunction).
double kinetic_energy(const std::vector<double>& f, int axes, int n, double h);

// Same restricted to one axis: integral |d_axis f|^2 via the stencil form.
double kinetic_energy_axis(const std::vector<double>& f, int axis, int axes, int n, double h);

// Upper bound for the largest eigenvalue of -Lap over `axes` axes (stencil
// symbol maximum 16/(3 h^2) per axis).
inline double laplacian_max_eigenvalue(int axes, double h) {
    return axes * 16.0 / (3.0 * h * h);
}

} // namespace beclab

#endif
