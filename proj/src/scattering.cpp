#include "beclab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beclab/errors.hpp"

namespace beclab {

namespace {

double profile_integral_3d(const RadialProfile& v, int m = 100000) {
    const double h = v.supportRadius / m;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double r = i * h;
        const double w = (i == 0 || i == m) ? 0.5 : 1.0;
        s += w * 4.0 * M_PI * r * r * v.v(r);
    }
    return s * h;
}

} // namespace

ScatteringResult scattering_length(const RadialProfile& v, double Rmax, int steps) {
    if (!(Rmax > v.supportRadius))
        throw DomainError("scattering_length: Rmax must exceed the support radius");
    if (steps < 100) throw DomainError("scattering_length: too few steps");

    const double h = Rmax / steps;
    const double h2 = h * h;
    auto f = [&](double r) { return kScatteringKinetic * (r > v.supportRadius ? 0.0 : v.v(r)); };

    // Numerov for u'' = f u, u(0) = 0, u(h) = h + f(0) h^3 / 6
    std::vector<double> u(static_cast<std::size_t>(steps) + 1);
    u[0] = 0.0;
    u[1] = h + f(0.0) * h2 * h / 6.0;
    double fm = f(0.0), f0 = f(h);
    for (int i = 1; i < steps; ++i) {
        const double fp = f((i + 1) * h);
        u[i + 1] = (2.0 * u[i] * (1.0 + 5.0 * h2 * f0 / 12.0) -
                    u[i - 1] * (1.0 - h2 * fm / 12.0)) /
                   (1.0 - h2 * fp / 12.0);
        fm = f0;
        f0 = fp;
    }

    // outside the support u is exactly linear, so a one-step slope is exact
    const double uR = u[steps];
    const double du = (u[steps] - u[steps - 1]) / h;
    if (du == 0.0) throw DomainError("scattering_length: singular matching, u'(Rmax) = 0");

    ScatteringResult res;
    res.a = Rmax - uR / du;
    res.R = Rmax;
    res.bornValue = profile_integral_3d(v) / (4.0 * M_PI);
    const int keep = 512;
    const int strideOut = std::max(1, steps / keep);
    for (int i = 0; i <= steps; i += strideOut) {
        res.radii.push_back(i * h);
        res.profile.push_back(u[static_cast<std::size_t>(i)]);
    }
    return res;
}

ScatteringResult scattering_length(const PairPotential& v, double Rmax, int steps) {
    RadialProfile p{[&v](double r) { return v(r); }, v.supportRadius()};
    return scattering_length(p, Rmax, steps);
}

std::vector<ScatteringSweepRow> scattering_limit_sweep(const PairPotential& v0, double beta,
                                                       const std::vector<int>& Ns) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw DomainError("scattering_limit_sweep: beta in (0,1) required");
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] <= Ns[i - 1]) throw DomainError("scattering_limit_sweep: Ns must increase");

    const double g = pair_coupling(v0, 3);
    std::vector<ScatteringSweepRow> rows;
    for (int N : Ns) {
        const double scale = std::pow(static_cast<double>(N), beta - 1.0);  // < 1
        const double amp = std::pow(static_cast<double>(N), 3.0 * (beta - 1.0));
        RadialProfile uN{[&v0, scale, amp](double r) { return amp * v0(scale * r); },
                         v0.supportRadius() / scale};
        const double Rmax = uN.supportRadius * 1.25 + 1.0;
        const int steps = std::max(20000, static_cast<int>(Rmax / 5e-4));
        ScatteringResult sr = scattering_length(uN, Rmax, steps);
        ScatteringSweepRow row;
        row.N = N;
        row.a = sr.a;
        row.fourPiA = 4.0 * M_PI * sr.a;
        row.g = g;
        row.gap = g - row.fourPiA;
        rows.push_back(row);
    }
    return rows;
}

BallEnergyResult ball_energy_check(const RadialProfile& v, double R, int gridPoints,
                                   long maxSteps) {
    if (!(R >= v.supportRadius)) throw DomainError("ball_energy_check: R >= support required");
    const int m = gridPoints;
    const double h = R / m;

    ScatteringResult sr = scattering_length(v, R * (1.0 + 1e-9) + 2.0 * h, 200000);
    const double a = sr.a;

    // phi on [0, R], phi(R) pinned to 1; explicit flow toward -Lap_r phi + v phi = 0
    std::vector<double> phi(static_cast<std::size_t>(m) + 1, 1.0), G(phi.size(), 0.0);
    double vmax = 0.0;
    for (int i = 0; i <= m; ++i) vmax = std::max(vmax, v.v(i * h));
    const double tau = 1.6 / (6.0 / (h * h) + vmax);

    auto energy = [&]() {
        double E = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double r = i * h;
            double dphi;
            if (i == 0) dphi = (phi[1] - phi[0]) / h;
            else if (i == m) dphi = (phi[m] - phi[m - 1]) / h;
            else dphi = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
            const double w = (i == 0 || i == m) ? 0.5 : 1.0;
            E += w * 4.0 * M_PI * r * r * (dphi * dphi + v.v(r) * phi[i] * phi[i]);
        }
        return E * h;
    };

    double prevE = energy();
    bool converged = false;
    for (long step = 0; step < maxSteps; ++step) {
        G[0] = 6.0 * (phi[1] - phi[0]) / (h * h) - v.v(0.0) * phi[0];
        for (int i = 1; i < m; ++i) {
            const double r = i * h;
            const double lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h) +
                               (phi[i + 1] - phi[i - 1]) / (h * r);
            G[i] = lap - v.v(r) * phi[i];
        }
        for (int i = 0; i < m; ++i) phi[i] += tau * G[i];
        if (step % 2000 == 1999) {
            const double E = energy();
            if (std::abs(prevE - E) < 1e-9 * std::max(1.0, std::abs(E))) {
                prevE = E;
                converged = true;
                break;
            }
            prevE = E;
        }
    }
    if (!converged)
        throw ConvergenceError("ball_energy_check: flow did not settle within maxSteps", prevE,
                               0.0, maxSteps, phi);

    BallEnergyResult res;
    res.numericMin = prevE;
    res.a = a;
    res.formula = (R > a) ? 4.0 * M_PI * a * R / (R - a) : std::numeric_limits<double>::infinity();
    const double denom = std::max(std::abs(res.formula), 1e-300);
    res.relativeGap = std::abs(res.numericMin - res.formula) / denom;
    return res;
}

} // namespace beclab
