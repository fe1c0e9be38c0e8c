#ifndef BECLAB_POTENTIALS_HPP
#define BECLAB_POTENTIALS_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "beclab/errors.hpp"

namespace beclab {

// Confining trap V(r) >= 0, continuous, growing at the box edge.
class TrapPotential {
public:
    enum class Kind { harmonic, quartic, tabulated };

    // harmonic: V = c |r|^2, quartic: V = c |r|^4 (c = parameters[0], default 1).
    static TrapPotential harmonic(double c = 1.0);
    static TrapPotential quartic(double c = 1.0);
    // tabulated radial profile on [0, rmax], linear interpolation, clamped right.
    static TrapPotential tabulated(std::vector<double> radii, std::vector<double> values);

    Kind kind() const { return kind_; }
    const std::vector<double>& parameters() const { return params_; }

    // radial evaluation; callers pass |r|
    double operator()(double r) const { return eval_(r); }

    std::string describe() const;

private:
    TrapPotential(Kind k, std::vector<double> p, std::function<double(double)> f)
        : kind_(k), params_(std::move(p)), eval_(std::move(f)) {}
    Kind kind_;
    std::vector<double> params_;
    std::function<double(double)> eval_;
};

// Compactly supported repulsive pair profile v0(r) >= 0, v0 = 0 beyond R0.
class PairPotential {
public:
    enum class Kind { zero, bump, parabolic, indicator, gaussianTruncated, tabulated };

    // bump: c (1 - (r/R0)^2)^2 on r < R0
    static PairPotential bump(double amplitude, double supportRadius);
    // parabolic: c (1 - (r/R0)^2)_+
    static PairPotential parabolic(double amplitude, double supportRadius);
    // indicator: c on r < R0 (mollification ignored at oracle scale)
    static PairPotential indicator(double amplitude, double supportRadius);
    static PairPotential zero();
    static PairPotential tabulated(std::vector<double> radii, std::vector<double> values);

    Kind kind() const { return kind_; }
    double supportRadius() const { return supportRadius_; }
    double amplitude() const { return amplitude_; }
    double operator()(double r) const { return r > supportRadius_ ? 0.0 : eval_(std::abs(r)); }
    bool isZero() const { return kind_ == Kind::zero; }

    std::string describe() const;

private:
    PairPotential(Kind k, double amp, double R0, std::function<double(double)> f)
        : kind_(k), amplitude_(amp), supportRadius_(R0), eval_(std::move(f)) {}
    Kind kind_;
    double amplitude_;
    double supportRadius_;
    std::function<double(double)> eval_;
};

// g = integral of v0 over R^d, trapezoid rule refined to relative 1e-8.
double pair_coupling(const PairPotential& v0, int dimension);

// The beta-scaled interaction v_N(r) = N^(d beta)/(N-1) v0(N^beta r).
class ScaledPairPotential {
public:
    ScaledPairPotential(PairPotential base, int N, double beta, int dimension);

    double operator()(double r) const {
        return r > supportRadius_ ? 0.0 : prefactor_ * base_(scale_ * r);
    }

    const PairPotential& base() const { return base_; }
    int particleNumber() const { return N_; }
    double beta() const { return beta_; }
    int dimension() const { return d_; }
    double supportRadius() const { return supportRadius_; }
    double prefactor() const { return prefactor_; }

private:
    PairPotential base_;
    int N_;
    double beta_;
    int d_;
    double prefactor_;
    double scale_;
    double supportRadius_;
};

ScaledPairPotential scale_pair_potential(const PairPotential& v0, int N, double beta,
                                         int dimension);

} // namespace beclab

#endif
