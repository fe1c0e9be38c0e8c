#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "beclab/metrics.hpp"
#include "beclab/rng.hpp"
#include "beclab/sde.hpp"

using namespace beclab;

namespace {

GridFunction gaussian_density(const Grid& g, double a = 1.0) {
    GridFunction rho(g, 1);
    for (int i = 0; i < g.pointsPerAxis; ++i) {
        const double x = g.coord(i);
        rho[static_cast<std::size_t>(i)] = std::exp(-a * x * x);
    }
    normalize_mass(rho);
    return rho;
}

} // namespace

TEST_CASE("counter RNG is a pure function of its key") {
    CounterRng rng(12345);
    const double a = rng.normal(7, 99, 2, RngStream::noise);
    const double b = rng.normal(7, 99, 2, RngStream::noise);
    CHECK(a == b);
    CHECK(rng.normal(8, 99, 2, RngStream::noise) != a);
    CHECK(rng.normal(7, 100, 2, RngStream::noise) != a);
    CHECK(rng.normal(7, 99, 3, RngStream::noise) != a);
    CHECK(rng.normal(7, 99, 2, RngStream::initial) != a);
    CounterRng other(54321);
    CHECK(other.normal(7, 99, 2, RngStream::noise) != a);
}

TEST_CASE("counter RNG moments are standard normal") {
    CounterRng rng(2024);
    const long M = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (long i = 0; i < M; ++i) {
        const double x = rng.normal(static_cast<std::uint64_t>(i), 0, 0, RngStream::testSweep);
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    s1 /= M;
    s2 /= M;
    s4 /= M;
    CHECK(std::abs(s1) < 4.0 / std::sqrt(static_cast<double>(M)));
    CHECK(s2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(s4 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("inverse-CDF sampling: uniform target passes a KS test") {
    Grid g(1, 1.0, 201);
    GridFunction rho(g, 1, 1.0);
    normalize_mass(rho);
    const long M = 10000;
    std::vector<double> pts = sample_density(rho, M, 31);
    std::sort(pts.begin(), pts.end());
    double ks = 0.0;
    for (long i = 0; i < M; ++i) {
        const double f = (pts[static_cast<std::size_t>(i)] + 1.0) / 2.0;  // uniform CDF on [-1,1]
        ks = std::max(ks, std::abs(f - (i + 1.0) / M));
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / M));
    }
    CHECK(ks < 1.36 / std::sqrt(static_cast<double>(M)));  // 95% KS critical value
}

TEST_CASE("sampling a narrow bump keeps every point inside its support") {
    Grid g(1, 4.0, 401);
    GridFunction rho(g, 1);
    for (int i = 0; i < g.pointsPerAxis; ++i) {
        const double x = g.coord(i);
        rho[static_cast<std::size_t>(i)] = std::abs(x - 0.5) < 0.1 ? 1.0 : 0.0;
    }
    normalize_mass(rho);
    for (double x : sample_density(rho, 2000, 7)) {
        CHECK(x > 0.35);
        CHECK(x < 0.65);
    }
}

TEST_CASE("Gaussian sampling: variance 1/2 within 3 sigma") {
    Grid g(1, 6.0, 513);
    GridFunction rho = gaussian_density(g);
    const long M = 20000;
    std::vector<double> pts = sample_density(rho, M, 11);
    double mean = 0.0;
    for (double x : pts) mean += x;
    mean /= M;
    double var = 0.0;
    for (double x : pts) var += (x - mean) * (x - mean);
    var /= (M - 1);
    const double sigmaVar = std::sqrt(2.0 / (M - 1)) * 0.5;
    CHECK(std::abs(var - 0.5) < 3.0 * sigmaVar);
}

TEST_CASE("rejection sampling in two dimensions matches its marginals") {
    Grid g(1, 5.0, 101);
    GridFunction rho(g, 2);
    const int n = g.pointsPerAxis;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = g.coord(i), y = g.coord(j);
            rho[static_cast<std::size_t>(j) * n + i] = std::exp(-x * x - 0.5 * y * y);
        }
    normalize_mass(rho);
    const long M = 8000;
    std::vector<double> pts = sample_density(rho, M, 5);
    double vx = 0.0, vy = 0.0;
    for (long j = 0; j < M; ++j) {
        vx += pts[static_cast<std::size_t>(2 * j)] * pts[static_cast<std::size_t>(2 * j)];
        vy += pts[static_cast<std::size_t>(2 * j + 1)] * pts[static_cast<std::size_t>(2 * j + 1)];
    }
    vx /= M;
    vy /= M;
    CHECK(vx == doctest::Approx(0.5).epsilon(0.1));
    CHECK(vy == doctest::Approx(1.0).epsilon(0.1));

    GridFunction zero(g, 1, 0.0);
    CHECK_THROWS_AS((void)sample_density(zero, 10, 1), DomainError);
}

TEST_CASE("one Euler step with zero drift reproduces the RNG stream bit-exactly") {
    Grid g(1, 8.0, 65);
    ZeroDrift drift(1);
    SdeParams sp;
    sp.timeStep = 0.01;
    sp.horizon = 0.01;
    sp.trajectories = 16;
    sp.seed = 77;
    sp.recordedFrames = 2;
    std::vector<double> init(16, 0.25);
    PathEnsemble ens = simulate(drift, g, init, sp);
    CounterRng rng(77);
    for (long j = 0; j < 16; ++j) {
        const double expected =
            0.25 + std::sqrt(0.01) * rng.normal(static_cast<std::uint64_t>(j), 0, 0,
                                                RngStream::noise);
        CHECK(ens.state(j, 1, 0) == expected);
    }
}

TEST_CASE("recording with more frames than steps fills every frame") {
    Grid g(1, 8.0, 65);
    ZeroDrift drift(1);
    SdeParams sp;
    sp.timeStep = 0.01;
    sp.horizon = 0.02;  // 2 steps
    sp.trajectories = 4;
    sp.seed = 123;
    sp.recordedFrames = 11;
    std::vector<double> init(4, 0.25);
    PathEnsemble ens = simulate(drift, g, init, sp);
    REQUIRE(ens.frames() == 11);
    // every frame carries a state; frames before the first step hold the init
    for (long j = 0; j < 4; ++j) {
        CHECK(ens.state(j, 0, 0) == 0.25);
        CHECK(ens.state(j, ens.frames() - 1, 0) != 0.0);
        for (int f = 0; f + 1 < ens.frames(); ++f)
            CHECK(ens.recordTimes[static_cast<std::size_t>(f)] <=
                  ens.recordTimes[static_cast<std::size_t>(f) + 1]);
    }
}

TEST_CASE("OU process: stationary variance 1/2") {
    Grid g(1, 8.0, 129);
    GridFunction rho = gaussian_density(g);
    std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
    PerParticleDrift drift(g, std::move(u), 1);
    SdeParams sp;
    sp.timeStep = 1e-3;
    sp.horizon = 6.0;
    sp.trajectories = 10000;
    sp.seed = 3;
    sp.recordedFrames = 13;
    std::vector<double> init = sample_density(rho, sp.trajectories, sp.seed);
    PathEnsemble ens = simulate(drift, g, init, sp);

    double var = 0.0;
    const int last = ens.frames() - 1;
    for (long j = 0; j < sp.trajectories; ++j) {
        const double x = ens.state(j, last, 0);
        var += x * x;
    }
    var /= sp.trajectories;
    const double sigmaVar = std::sqrt(2.0 / (sp.trajectories - 1.0)) * 0.5;
    CHECK(std::abs(var - 0.5) < 3.0 * sigmaVar);
}

TEST_CASE("ensembles are bit-reproducible and trajectory-independent") {
    Grid g(1, 6.0, 65);
    GridFunction rho = gaussian_density(g);
    std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
    PerParticleDrift drift(g, std::move(u), 1);
    SdeParams sp;
    sp.timeStep = 1e-2;
    sp.horizon = 1.0;
    sp.trajectories = 50;
    sp.seed = 2718;
    std::vector<double> init = sample_density(rho, sp.trajectories, sp.seed);
    PathEnsemble a = simulate(drift, g, init, sp);
    PathEnsemble b = simulate(drift, g, init, sp);
    CHECK(a.states == b.states);

    // trajectory j is a pure function of (seed, j): a smaller ensemble
    // reproduces the shared prefix bit-exactly
    SdeParams sp2 = sp;
    sp2.trajectories = 20;
    std::vector<double> init2(init.begin(), init.begin() + 20);
    PathEnsemble c = simulate(drift, g, init2, sp2);
    for (long j = 0; j < 20; ++j)
        for (int f = 0; f < a.frames(); ++f)
            CHECK(a.state(j, f, 0) == c.state(j, f, 0));
}

TEST_CASE("empirical density approaches the OU invariant law") {
    Grid g(1, 6.0, 65);
    GridFunction rho = gaussian_density(g);
    std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
    PerParticleDrift drift(g, std::move(u), 1);
    SdeParams sp;
    sp.timeStep = 1e-3;
    sp.horizon = 4.0;
    sp.trajectories = 4000;
    sp.seed = 13;
    sp.recordedFrames = 41;
    std::vector<double> init = sample_density(rho, sp.trajectories, sp.seed);
    PathEnsemble ens = simulate(drift, g, init, sp);

    GridFunction emp = empirical_density(ens, g, 0, 2.0, 4.0);
    CHECK(tv_density(emp, rho) < 0.03);  // >= 8e4 pooled samples

    // single-trajectory ergodic average vs ensemble histogram
    CHECK_THROWS_AS((void)empirical_density(ens, g, 0, 100.0, 101.0), DomainError);
}

TEST_CASE("uniform draws give a flat histogram within binomial error") {
    Grid g(1, 2.0, 33);
    GridFunction uniform(g, 1, 1.0);
    normalize_mass(uniform);
    std::vector<double> pts = sample_density(uniform, 20000, 999);
    // reuse the ensemble plumbing: a zero-step "ensemble" at t = 0
    ZeroDrift drift(1);
    SdeParams sp;
    sp.timeStep = 1e-3;
    sp.horizon = 1e-3;
    sp.trajectories = 20000;
    sp.seed = 999;
    sp.recordedFrames = 2;
    PathEnsemble ens = simulate(drift, g, pts, sp);
    GridFunction hist = empirical_density(ens, g, 0, -1e-12, 1e-12);
    // per-bin binomial error: p = width/(2L), sigma_density = sqrt(p(1-p)/M)/width
    const double p = g.spacing() / (2.0 * g.extent);
    const double sigmaDensity =
        std::sqrt(p * (1.0 - p) / 20000.0) / g.spacing();
    for (int i = 1; i + 1 < g.pointsPerAxis; ++i)
        CHECK(std::abs(hist[static_cast<std::size_t>(i)] - 0.25) < 5.0 * sigmaDensity);
}

TEST_CASE("single-trajectory ergodic average matches the ensemble histogram") {
    Grid g(1, 6.0, 33);
    GridFunction rho = gaussian_density(g);
    std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
    PerParticleDrift drift(g, std::move(u), 1);

    // one long trajectory, time-averaged over the second half
    SdeParams one;
    one.timeStep = 1e-3;
    one.horizon = 400.0;
    one.trajectories = 1;
    one.seed = 555;
    one.recordedFrames = 4001;  // every 0.1 time units
    std::vector<double> init = sample_density(rho, 1, one.seed);
    PathEnsemble single = simulate(drift, g, init, one);
    GridFunction ergodic = empirical_density(single, g, 0, 200.0, 400.0);

    // matching ensemble snapshot mass
    SdeParams many;
    many.timeStep = 1e-3;
    many.horizon = 3.0;
    many.trajectories = 2000;
    many.seed = 556;
    many.recordedFrames = 4;
    std::vector<double> init2 = sample_density(rho, many.trajectories, many.seed);
    PathEnsemble ens = simulate(drift, g, init2, many);
    GridFunction snapshot = empirical_density(ens, g, 0, 3.0 - 1e-9, 3.0 + 1e-9);

    // both estimate rho; allow 2x the combined statistical scale. The single
    // trajectory decorrelates in O(1) time, so ~200 effective samples.
    const double tvErgodic = tv_density(ergodic, rho);
    const double tvSnapshot = tv_density(snapshot, rho);
    CHECK(tv_density(ergodic, snapshot) < 2.0 * (tvErgodic + tvSnapshot) + 0.02);
    CHECK(tvErgodic < 0.12);
}

TEST_CASE("stationarity of the Nelson diffusion for a double-bump density") {
    Grid g(1, 6.0, 65);
    GridFunction rho(g, 1);
    for (int i = 0; i < g.pointsPerAxis; ++i) {
        const double x = g.coord(i);
        rho[static_cast<std::size_t>(i)] =
            std::exp(-(x - 1.2) * (x - 1.2)) + std::exp(-(x + 1.2) * (x + 1.2));
    }
    normalize_mass(rho);
    std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
    PerParticleDrift drift(g, std::move(u), 1);
    SdeParams sp;
    sp.timeStep = 1e-3;
    sp.horizon = 2.0;
    sp.trajectories = 8000;
    sp.seed = 99;
    sp.recordedFrames = 9;
    std::vector<double> init = sample_density(rho, sp.trajectories, sp.seed);
    PathEnsemble ens = simulate(drift, g, init, sp);

    double expTv = 0.0;
    for (int i = 0; i < g.pointsPerAxis; ++i) {
        const double w = (i == 0 || i == g.pointsPerAxis - 1) ? 0.5 : 1.0;
        const double pbin = rho[static_cast<std::size_t>(i)] * w * g.spacing();
        expTv += 0.5 * std::sqrt(std::max(pbin * (1.0 - pbin), 0.0) / sp.trajectories);
    }
    const double threshold = 2.0 * expTv + 0.01;
    for (int f = 0; f < ens.frames(); ++f) {
        const double tf = ens.recordTimes[static_cast<std::size_t>(f)];
        GridFunction emp = empirical_density(ens, g, 0, tf - 1e-12, tf + 1e-12);
        CHECK(tv_density(emp, rho) < threshold);
    }
}

TEST_CASE("synchronous coupling with identical drifts stays at zero distance") {
    Grid g(1, 6.0, 65);
    GridFunction rho = gaussian_density(g);
    std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
    PerParticleDrift drift(g, u, 2);
    SdeParams sp;
    sp.timeStep = 1e-2;
    sp.horizon = 1.0;
    sp.trajectories = 100;
    sp.seed = 5;
    std::vector<double> init = sample_density(rho, 2 * sp.trajectories, sp.seed);
    CoupledResult res = simulate_coupled(drift, drift, g, init, sp);
    CHECK(res.meanSupDistance2 == 0.0);
    for (double v : res.supDistance2PerTrajectory) CHECK(v == 0.0);
}

TEST_CASE("coupling distance vanishes with the horizon") {
    Grid g(1, 6.0, 65);
    GridFunction rho = gaussian_density(g);
    std::vector<double> uA = drift_component_from_density(rho, 0, default_drift_floor(rho));
    std::vector<double> uB(uA.size());
    for (std::size_t i = 0; i < uA.size(); ++i) uB[i] = 0.5 * uA[i];
    PerParticleDrift driftA(g, uA, 1);
    PerParticleDrift driftB(g, uB, 1);

    double prev = std::numeric_limits<double>::infinity();
    for (double T : {0.64, 0.16, 0.04}) {
        SdeParams sp;
        sp.timeStep = 1e-3;
        sp.horizon = T;
        sp.trajectories = 500;
        sp.seed = 17;
        std::vector<double> init = sample_density(rho, sp.trajectories, sp.seed);
        CoupledResult res = simulate_coupled(driftA, driftB, g, init, sp);
        CHECK(res.meanSupDistance2 < prev);
        prev = res.meanSupDistance2;
    }
}

TEST_CASE("NaN propagation aborts with trajectory and step") {
    Grid g(1, 2.0, 33);
    // drift that explodes immediately
    auto fn = +[](const double*, double* b, int d) {
        for (int i = 0; i < d; ++i) b[i] = std::numeric_limits<double>::quiet_NaN();
    };
    CallableDrift drift(1, fn);
    SdeParams sp;
    sp.timeStep = 0.1;
    sp.horizon = 0.2;
    sp.trajectories = 3;
    sp.seed = 1;
    std::vector<double> init(3, 0.0);
    try {
        (void)simulate(drift, g, init, sp);
        CHECK(false);
    } catch (const SimulationError& e) {
        CHECK(e.trajectory == 0);
        CHECK(e.step == 0);
    }
}
