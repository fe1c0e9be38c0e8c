#include "beclab/fd.hpp"

#include <cstring>

#include "beclab/grid.hpp"

namespace beclab {

namespace {

// 4th-order -d2/dx2 coefficients: (-f[i-2] + 16 f[i-1] - 30 f[i] + 16 f[i+1] - f[i+2]) / (12 h^2)
// applied with a minus sign for the negative Laplacian.
struct Stencil2 {
    double c0, c1, c2; // center, +-1, +-2 of -d2
    explicit Stencil2(double h) {
        const double inv = 1.0 / (12.0 * h * h);
        c0 = 30.0 * inv;
        c1 = -16.0 * inv;
        c2 = 1.0 * inv;
    }
};

inline const double* at(const double* f, std::ptrdiff_t off) { return f + off; }

} // namespace

void add_neg_laplacian_axis(const double* f, double* out, int axis, int axes, int n, double h) {
    const Stencil2 st(h);
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(n);
    std::size_t total = 1;
    for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);

    // Iterate rows along `axis`; within a row walk contiguously over the
    // stride-many inner points so every memory stream is unit-stride.
    for (std::size_t base = 0; base < total; base += block) {
        for (int i = 0; i < n; ++i) {
            double* o = out + base + stride * static_cast<std::size_t>(i);
            const double* fc = f + base + stride * static_cast<std::size_t>(i);
            const double* fm1 = i >= 1 ? fc - stride : nullptr;
            const double* fm2 = i >= 2 ? fc - 2 * stride : nullptr;
            const double* fp1 = i + 1 < n ? fc + stride : nullptr;
            const double* fp2 = i + 2 < n ? fc + 2 * stride : nullptr;
            for (std::size_t k = 0; k < stride; ++k) {
                double v = st.c0 * fc[k];
                if (fm1) v += st.c1 * fm1[k];
                if (fp1) v += st.c1 * fp1[k];
                if (fm2) v += st.c2 * fm2[k];
                if (fp2) v += st.c2 * fp2[k];
                o[k] += v;
            }
        }
    }
}

void add_neg_laplacian(const double* f, double* out, int axes, int n, double h) {
    for (int a = 0; a < axes; ++a) add_neg_laplacian_axis(f, out, a, axes, n, h);
}

void derivative_axis(const double* f, double* out, int axis, int axes, int n, double h) {
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(n);
    std::size_t total = 1;
    for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);

    const double i12h = 1.0 / (12.0 * h);
    const double i2h = 1.0 / (2.0 * h);
    for (std::size_t base = 0; base < total; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            const double* fp = f + base + off;
            double* op = out + base + off;
            auto F = [&](int i) { return fp[stride * static_cast<std::size_t>(i)]; };
            auto O = [&](int i) -> double& { return op[stride * static_cast<std::size_t>(i)]; };
            O(0) = (-3.0 * F(0) + 4.0 * F(1) - F(2)) * i2h;
            O(1) = (F(2) - F(0)) * i2h;
            for (int i = 2; i < n - 2; ++i)
                O(i) = (-F(i + 2) + 8.0 * F(i + 1) - 8.0 * F(i - 1) + F(i - 2)) * i12h;
            O(n - 2) = (F(n - 1) - F(n - 3)) * i2h;
            O(n - 1) = (3.0 * F(n - 1) - 4.0 * F(n - 2) + F(n - 3)) * i2h;
        }
    }
}

namespace {

double weighted_inner_with(const std::vector<double>& f, const std::vector<double>& g, int axes,
                           int n, double h) {
    double hPow = 1.0;
    for (int a = 0; a < axes; ++a) hPow *= h;
    const std::size_t total = f.size();
    std::vector<int> idx(axes, 0);
    double sum = 0.0;
    std::size_t i = 0;
    while (i < total) {
        double wRow = 1.0;
        for (int a = 1; a < axes; ++a) wRow *= axis_weight(idx[a], n);
        for (int i0 = 0; i0 < n; ++i0, ++i) sum += wRow * axis_weight(i0, n) * f[i] * g[i];
        for (int a = 1; a < axes; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
        if (axes == 1) break;
    }
    return sum * hPow;
}

} // namespace

double kinetic_energy(const std::vector<double>& f, int axes, int n, double h) {
    std::vector<double> lap(f.size(), 0.0);
    add_neg_laplacian(f.data(), lap.data(), axes, n, h);
    return weighted_inner_with(f, lap, axes, n, h);
}

double kinetic_energy_axis(const std::vector<double>& f, int axis, int axes, int n, double h) {
    std::vector<double> lap(f.size(), 0.0);
    add_neg_laplacian_axis(f.data(), lap.data(), axis, axes, n, h);
    return weighted_inner_with(f, lap, axes, n, h);
}

} // namespace beclab
