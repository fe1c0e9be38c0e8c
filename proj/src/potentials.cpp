#include "beclab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace beclab {

TrapPotential TrapPotential::harmonic(double c) {
    if (!(c > 0.0)) throw DomainError("harmonic trap: coefficient must be positive");
    return TrapPotential(Kind::harmonic, {c}, [c](double r) { return c * r * r; });
}

TrapPotential TrapPotential::quartic(double c) {
    if (!(c > 0.0)) throw DomainError("quartic trap: coefficient must be positive");
    return TrapPotential(Kind::quartic, {c}, [c](double r) { return c * r * r * r * r; });
}

TrapPotential TrapPotential::tabulated(std::vector<double> radii, std::vector<double> values) {
    if (radii.size() != values.size() || radii.size() < 2)
        throw DomainError("tabulated trap: need matching radius/value tables");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i] < radii[i + 1])) throw DomainError("tabulated trap: radii not increasing");
    for (double v : values)
        if (!(v >= 0.0)) throw DomainError("tabulated trap: V must be nonnegative");
    std::vector<double> params;
    params.insert(params.end(), radii.begin(), radii.end());
    params.insert(params.end(), values.begin(), values.end());
    auto r = std::move(radii);
    auto v = std::move(values);
    auto eval = [r, v](double x) {
        x = std::abs(x);
        if (x <= r.front()) return v.front();
        if (x >= r.back()) return v.back();
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t j = static_cast<std::size_t>(it - r.begin());
        const double t = (x - r[j - 1]) / (r[j] - r[j - 1]);
        return (1.0 - t) * v[j - 1] + t * v[j];
    };
    return TrapPotential(Kind::tabulated, std::move(params), eval);
}

std::string TrapPotential::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::harmonic: os << "harmonic"; break;
        case Kind::quartic: os << "quartic"; break;
        case Kind::tabulated: os << "tabulated"; break;
    }
    for (double p : params_) os << ":" << p;
    return os.str();
}

PairPotential PairPotential::zero() {
    return PairPotential(Kind::zero, 0.0, 0.0, [](double) { return 0.0; });
}

PairPotential PairPotential::bump(double amplitude, double R0) {
    if (!(amplitude >= 0.0) || !(R0 > 0.0)) throw DomainError("bump: need amplitude >= 0, R0 > 0");
    return PairPotential(Kind::bump, amplitude, R0, [amplitude, R0](double r) {
        const double u = r / R0;
        const double w = 1.0 - u * u;
        return w > 0.0 ? amplitude * w * w : 0.0;
    });
}

PairPotential PairPotential::parabolic(double amplitude, double R0) {
    if (!(amplitude >= 0.0) || !(R0 > 0.0))
        throw DomainError("parabolic: need amplitude >= 0, R0 > 0");
    return PairPotential(Kind::parabolic, amplitude, R0, [amplitude, R0](double r) {
        const double w = 1.0 - (r / R0) * (r / R0);
        return w > 0.0 ? amplitude * w : 0.0;
    });
}

PairPotential PairPotential::indicator(double amplitude, double R0) {
    if (!(amplitude >= 0.0) || !(R0 > 0.0))
        throw DomainError("indicator: need amplitude >= 0, R0 > 0");
    return PairPotential(Kind::indicator, amplitude, R0,
                         [amplitude](double) { return amplitude; });
}

PairPotential PairPotential::tabulated(std::vector<double> radii, std::vector<double> values) {
    if (radii.size() != values.size() || radii.size() < 2)
        throw DomainError("tabulated pair potential: bad tables");
    for (double v : values)
        if (!(v >= 0.0)) throw DomainError("pair potential must be nonnegative (h2)");
    if (std::abs(values.back()) > 0.0)
        throw DomainError("pair potential must vanish at the support edge (compact support)");
    const double R0 = radii.back();
    auto r = std::move(radii);
    auto v = std::move(values);
    double amp = *std::max_element(v.begin(), v.end());
    auto eval = [r, v](double x) {
        if (x >= r.back()) return 0.0;
        if (x <= r.front()) return v.front();
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t j = static_cast<std::size_t>(it - r.begin());
        const double t = (x - r[j - 1]) / (r[j] - r[j - 1]);
        return (1.0 - t) * v[j - 1] + t * v[j];
    };
    return PairPotential(Kind::tabulated, amp, R0, eval);
}

std::string PairPotential::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::zero: os << "zero"; break;
        case Kind::bump: os << "bump"; break;
        case Kind::parabolic: os << "parabolic"; break;
        case Kind::indicator: os << "indicator"; break;
        case Kind::gaussianTruncated: os << "gausstrunc"; break;
        case Kind::tabulated: os << "tabulated"; break;
    }
    os << ":" << amplitude_ << ":" << supportRadius_;
    return os.str();
}

namespace {

// d-dimensional integral of the radial profile over its support by trapezoid
// rule on [0, R0] (times the sphere factor), refined until stable.
double radial_integral(const PairPotential& v, int d, int m) {
    const double R0 = v.supportRadius();
    const double h = R0 / m;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double r = i * h;
        double shell = 1.0;
        if (d == 1) shell = 2.0;                       // both half-lines
        else if (d == 2) shell = 2.0 * M_PI * r;       // circle
        else shell = 4.0 * M_PI * r * r;               // sphere
        const double w = (i == 0 || i == m) ? 0.5 : 1.0;
        s += w * shell * v(r);
    }
    return s * h;
}

} // namespace

double pair_coupling(const PairPotential& v0, int dimension) {
    if (dimension < 1 || dimension > 3) throw DomainError("pair_coupling: dimension 1..3");
    if (v0.isZero()) return 0.0;
    if (!(v0.supportRadius() > 0.0) || !std::isfinite(v0.supportRadius()))
        throw DomainError("pair_coupling: non-compact support");
    int m = 256;
    double prev = radial_integral(v0, dimension, m);
    for (int pass = 0; pass < 16; ++pass) {
        m *= 2;
        const double cur = radial_integral(v0, dimension, m);
        if (std::abs(cur - prev) <= 1e-8 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

ScaledPairPotential::ScaledPairPotential(PairPotential base, int N, double beta, int dimension)
    : base_(std::move(base)), N_(N), beta_(beta), d_(dimension) {
    if (N < 2) throw DomainError("scale_pair_potential: N >= 2 required");
    if (!(beta >= 0.0) || !(beta < 1.0)) throw DomainError("scale_pair_potential: beta in [0,1)");
    if (dimension < 1 || dimension > 3) throw DomainError("scale_pair_potential: dimension 1..3");
    scale_ = std::pow(static_cast<double>(N), beta);
    prefactor_ = std::pow(static_cast<double>(N), dimension * beta) / (N - 1);
    supportRadius_ = base_.supportRadius() / scale_;
}

ScaledPairPotential scale_pair_potential(const PairPotential& v0, int N, double beta,
                                         int dimension) {
    return ScaledPairPotential(v0, N, beta, dimension);
}

} // namespace beclab
