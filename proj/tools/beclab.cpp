// beclab - mean-field Bose-Einstein condensation laboratory CLI.
//
// Subcommands: solve-nls | solve-nbody | scattering | simulate | chaos-report
//              | sweep | verify
// Exit codes: 0 ok, 1 config error, 2 solver non-convergence, 3 property
// violation, 4 budget refusal. Errors leave a JSON record on stderr.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "beclab/cache.hpp"
#include "beclab/config.hpp"
#include "beclab/errors.hpp"
#include "beclab/fd.hpp"
#include "beclab/metrics.hpp"
#include "beclab/pipeline.hpp"
#include "beclab/rng.hpp"
#include "beclab/scattering.hpp"
#include "beclab/sde.hpp"

using namespace beclab;

namespace {

struct GlobalOpts {
    std::string configPath;
    std::string outDir;
    std::string cacheDir;
    bool noCache = false;
    int workers = 1;
    std::uint64_t seed = 0;
    bool seedSet = false;
};

void emit_error_record(int code, const std::string& kind, const std::string& message) {
    std::ostringstream os;
    os << "{\"error\": {\"code\": " << code << ", \"kind\": \"" << kind
       << "\", \"message\": \"";
    for (char c : message) {
        if (c == '"' || c == '\\') os << '\\';
        if (c == '\n') {
            os << "\\n";
            continue;
        }
        os << c;
    }
    os << "\"}}";
    std::cerr << os.str() << std::endl;
}

RunConfig load_config(const GlobalOpts& g) {
    RunConfig cfg = RunConfig::load(g.configPath);
    if (!g.outDir.empty()) cfg.outputDirectory = g.outDir;
    if (g.seedSet) cfg.seed = g.seed;
    return cfg;
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path p(cfg.outputDirectory);
    std::filesystem::create_directories(p);
    return p;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << content;
}

void print_breakdown(const std::string& label, double E, const EnergyBreakdown& c, double mu,
                     double residual) {
    std::printf("%s\n", label.c_str());
    std::printf("  %-18s %s\n", "energy", format_g17(E).c_str());
    std::printf("  %-18s %s\n", "kinetic", format_g17(c.kinetic).c_str());
    std::printf("  %-18s %s\n", "trap", format_g17(c.trap).c_str());
    std::printf("  %-18s %s\n", "interaction", format_g17(c.interaction).c_str());
    std::printf("  %-18s %s\n", "chemicalPotential", format_g17(mu).c_str());
    std::printf("  %-18s %s\n", "residualNorm", format_g17(residual).c_str());
}

int cmd_solve_nls(const GlobalOpts& g) {
    RunConfig cfg = load_config(g);
    GroundStateCache cache = GroundStateCache::resolve(g.cacheDir, g.noCache);
    Grid grid(cfg.d, cfg.L, cfg.n);
    const double gc = cfg.makePair().isZero() ? 0.0 : pair_coupling(cfg.makePair(), cfg.d);
    NlsSolution sol = nls_ground_state(cfg, grid, gc, cache);
    print_breakdown("solve-nls (g = " + format_g17(gc) + ")", sol.energy, sol.components,
                    sol.chemicalPotential, sol.residualNorm);
    return 0;
}

int cmd_solve_nbody(const GlobalOpts& g, int N, double beta) {
    RunConfig cfg = load_config(g);
    GroundStateCache cache = GroundStateCache::resolve(g.cacheDir, g.noCache);
    if (N == 0) N = cfg.Ns.front();
    if (beta < 0.0) beta = cfg.betas.front();
    Grid grid(1, cfg.L, cfg.n);
    NBodyState st = nbody_ground_state(cfg, grid, N, beta, cache);
    EnergyBreakdown per{st.componentsPerParticle.kinetic1, st.componentsPerParticle.trap1,
                        st.componentsPerParticle.interaction1};
    print_breakdown("solve-nbody N=" + std::to_string(N) + " beta=" + format_g17(beta) +
                        " (per particle)",
                    st.energy / N, per, st.energy / N, st.residualNorm);
    std::printf("  %-18s %s\n", "totalEnergy", format_g17(st.energy).c_str());
    std::printf("  %-18s %s\n", "maxAsymmetry", format_g17(st.maxAsymmetry).c_str());
    return 0;
}

int cmd_scattering(const GlobalOpts& g, double beta, std::vector<int> Ns) {
    RunConfig cfg = load_config(g);
    if (beta < 0.0) beta = 0.5;
    if (Ns.empty()) Ns = {2, 8, 32, 128};
    PairPotential v0 = cfg.makePair();
    if (v0.isZero()) throw ConfigError("scattering: pair potential must be nonzero");
    auto rows = scattering_limit_sweep(v0, beta, Ns);

    std::ostringstream csv;
    csv << "N,a_N,fourPiA,g,gap\r\n";
    for (const auto& r : rows)
        csv << r.N << "," << format_g17(r.a) << "," << format_g17(r.fourPiA) << ","
            << format_g17(r.g) << "," << format_g17(r.gap) << "\r\n";
    const auto out = ensure_out_dir(cfg) / "scattering.csv";
    write_file(out, csv.str());
    std::printf("%s", csv.str().c_str());
    std::fprintf(stderr, "wrote %s\n", out.string().c_str());
    return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::string& system, int N, double beta) {
    RunConfig cfg = load_config(g);
    GroundStateCache cache = GroundStateCache::resolve(g.cacheDir, g.noCache);
    Grid grid(1, cfg.L, cfg.n);
    TrapPotential V = cfg.makeTrap();
    PairPotential v0 = cfg.makePair();
    const double gc = v0.isZero() ? 0.0 : pair_coupling(v0, 1);

    SdeParams sp;
    sp.timeStep = cfg.dt;
    sp.horizon = cfg.T;
    sp.trajectories = cfg.M;
    sp.seed = cfg.seed;
    sp.recordedFrames = cfg.frames;

    PathEnsemble ens;
    GridFunction target(grid, 1);
    if (system == "nls") {
        NlsSolution nls = nls_ground_state(cfg, grid, gc, cache);
        GridFunction rho = nls.phi;
        for (double& v : rho.values()) v *= v;
        std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
        PerParticleDrift drift(grid, std::move(u), 1);
        std::vector<double> init = sample_density(rho, cfg.M, cfg.seed);
        ens = simulate(drift, grid, init, sp);
        target = rho;
    } else if (system == "nbody") {
        if (N == 0) N = cfg.Ns.front();
        if (beta < 0.0) beta = cfg.betas.front();
        NBodyState st = nbody_ground_state(cfg, grid, N, beta, cache);
        GridFunction rhoN = nbody_density(st);
        std::vector<double> b1 = nbody_drift_component(st);
        SymmetricNBodyDrift drift(grid, std::move(b1), N);
        std::vector<double> init = sample_density(rhoN, cfg.M, cfg.seed);
        ens = simulate(drift, grid, init, sp);
        target = marginal_density(st, 1);
    } else {
        throw ConfigError("simulate: unknown system (use nls or nbody)");
    }

    // ensemble CSV
    std::ostringstream csv;
    csv << "trajectory,step,time";
    for (int a = 0; a < ens.dims; ++a) csv << ",x" << (a + 1);
    csv << "\r\n";
    for (long j = 0; j < sp.trajectories; ++j)
        for (int f = 0; f < ens.frames(); ++f) {
            csv << j << "," << f << "," << format_g17(ens.recordTimes[static_cast<std::size_t>(f)]);
            for (int a = 0; a < ens.dims; ++a) csv << "," << format_g17(ens.state(j, f, a));
            csv << "\r\n";
        }
    const auto outDir = ensure_out_dir(cfg);
    write_file(outDir / "ensemble.csv", csv.str());

    // stationarity summary: TV(empirical, target) at a few recorded times
    std::ostringstream summary;
    summary << "time,tvToTarget\r\n";
    for (int f : {0, ens.frames() / 4, ens.frames() / 2, 3 * ens.frames() / 4, ens.frames() - 1}) {
        const double tf = ens.recordTimes[static_cast<std::size_t>(f)];
        GridFunction emp = empirical_density(ens, grid, 0, tf - 1e-12, tf + 1e-12);
        summary << format_g17(tf) << "," << format_g17(tv_density(emp, target)) << "\r\n";
    }
    write_file(outDir / "stationarity.csv", summary.str());
    std::printf("%s", summary.str().c_str());
    std::fprintf(stderr, "wrote %s and %s\n", (outDir / "ensemble.csv").string().c_str(),
                 (outDir / "stationarity.csv").string().c_str());
    return 0;
}

int cmd_chaos_report(const GlobalOpts& g, int N, double beta) {
    RunConfig cfg = load_config(g);
    GroundStateCache cache = GroundStateCache::resolve(g.cacheDir, g.noCache);
    if (N == 0) N = cfg.Ns.front();
    if (beta < 0.0) beta = cfg.betas.front();
    ChaosCell cell = compute_chaos_cell(cfg, N, beta, cache);
    const std::string json = chaos_report_json(cell.report);
    const auto outDir = ensure_out_dir(cfg);
    std::ostringstream name;
    name << "chaos_N" << N << "_beta" << format_g17(beta) << ".json";
    write_file(outDir / name.str(), json + "\n");
    std::printf("%s\n", json.c_str());
    return 0;
}

struct SweepResult {
    std::vector<ChaosCell> cells;
    std::string aggregateCsv;
};

SweepResult run_sweep(const RunConfig& cfg, const GroundStateCache& cache, int workers) {
    std::vector<std::pair<int, double>> cells;
    for (double beta : cfg.betas)
        for (int N : cfg.Ns) cells.emplace_back(N, beta);

    std::vector<ChaosCell> results(cells.size());
    // cells are independent jobs; each cell is computed by exactly one worker
    // and assembled in cell order, so worker count affects wall time only
    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
    if (pool == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            results[i] = compute_chaos_cell(cfg, cells[i].first, cells[i].second, cache);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        std::mutex errMutex;
        std::exception_ptr firstError;
        for (int w = 0; w < pool; ++w)
            threads.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    try {
                        results[i] =
                            compute_chaos_cell(cfg, cells[i].first, cells[i].second, cache);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(errMutex);
                        if (!firstError) firstError = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& t : threads) t.join();
        if (firstError) std::rethrow_exception(firstError);
    }

    int maxK = 0;
    for (int N : cfg.Ns) maxK = std::max(maxK, N - 1);
    std::ostringstream csv;
    csv << chaos_report_csv_header(maxK) << ",kacBound,monotoneTrend\r\n";
    std::size_t idx = 0;
    for (double beta : cfg.betas) {
        (void)beta;
        const ChaosCell* prev = nullptr;
        for (std::size_t j = 0; j < cfg.Ns.size(); ++j, ++idx) {
            const ChaosCell& cell = results[idx];
            bool monotone = true;
            if (prev) {
                const double tol = 1e-12;
                monotone = cell.report.driftMismatch <= prev->report.driftMismatch + tol &&
                           cell.report.normalizedEntropy <= prev->report.normalizedEntropy + tol &&
                           cell.report.kMarginalTV[0] <= prev->report.kMarginalTV[0] + tol &&
                           cell.report.kacMetric <= prev->report.kacMetric + tol;
            }
            csv << chaos_report_csv_row(cell.report, maxK) << ","
                << format_g17(cell.kacBound) << "," << (monotone ? "true" : "false") << "\r\n";
            prev = &cell;
        }
    }
    return {std::move(results), csv.str()};
}

int cmd_sweep(const GlobalOpts& g) {
    RunConfig cfg = load_config(g);
    GroundStateCache cache = GroundStateCache::resolve(g.cacheDir, g.noCache);
    SweepResult sweep = run_sweep(cfg, cache, g.workers);
    const auto outDir = ensure_out_dir(cfg);
    write_file(outDir / "sweep.csv", sweep.aggregateCsv);
    std::size_t idx = 0;
    for (double beta : cfg.betas)
        for (int N : cfg.Ns) {
            std::ostringstream name;
            name << "chaos_N" << N << "_beta" << format_g17(beta) << ".json";
            write_file(outDir / name.str(), chaos_report_json(sweep.cells[idx].report) + "\n");
            ++idx;
        }
    std::printf("%s", sweep.aggregateCsv.c_str());
    std::fprintf(stderr, "wrote %s\n", (outDir / "sweep.csv").string().c_str());
    return 0;
}

// ---- verify: the cross-module property suite --------------------------

struct VerifyCounter {
    int passed = 0;
    std::vector<std::string> failures;
    void check(bool ok, const std::string& what) {
        if (ok) {
            ++passed;
        } else {
            failures.push_back(what);
            std::fprintf(stderr, "FAIL %s\n", what.c_str());
        }
    }
};

void verify_model_core(VerifyCounter& vc) {
    Grid grid(1, 2.0, 257);
    // trapezoid exactness on constants and odd functions
    GridFunction one(grid, 1, 1.0);
    vc.check(std::abs(grid_integrate(one) - 4.0) < 1e-12, "model-core: trapezoid constant");
    GridFunction x(grid, 1);
    for (int i = 0; i < grid.pointsPerAxis; ++i) x[static_cast<std::size_t>(i)] = grid.coord(i);
    vc.check(std::abs(grid_integrate(x)) < 1e-12, "model-core: trapezoid odd symmetry");

    // scaling identity integral v_N = g/(N-1)
    PairPotential v0 = PairPotential::bump(0.9375, 1.0);
    const double g1 = pair_coupling(v0, 1);
    for (int N : {2, 3, 4})
        for (double beta : {0.0, 0.25, 0.5, 0.75}) {
            ScaledPairPotential vN = scale_pair_potential(v0, N, beta, 1);
            const int m = 200001;
            const double R = vN.supportRadius();
            const double h = 2.0 * R / (m - 1);
            double integral = 0.0;
            for (int i = 0; i < m; ++i) {
                const double w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
                integral += w * vN(std::abs(-R + i * h));
            }
            integral *= h;
            const double expected = g1 / (N - 1);
            vc.check(std::abs(integral - expected) <= 1e-6 * std::abs(expected),
                     "model-core: scaling identity N=" + std::to_string(N));
        }

    // drift gradient refinement ratio in [3.5, 4.5]; exp(-x^4) has a nonzero
    // third log-derivative, so the O(h^2) term is visible
    auto drift_err = [](int n) {
        Grid g(1, 3.0, n);
        GridFunction rho(g, 1);
        for (int i = 0; i < n; ++i) {
            const double xv = g.coord(i);
            rho[static_cast<std::size_t>(i)] = std::exp(-xv * xv * xv * xv);
        }
        normalize_mass(rho);
        VectorField b = drift_from_density(rho, default_drift_floor(rho));
        double err = 0.0;
        for (int i = n / 4; i < 3 * n / 4; ++i) {
            const double xv = g.coord(i);
            err = std::max(err, std::abs(b.component[0][static_cast<std::size_t>(i)] +
                                         2.0 * xv * xv * xv));
        }
        return err;
    };
    const double e1 = drift_err(161), e2 = drift_err(321);
    const double ratio = e1 / e2;
    vc.check(ratio > 3.5 && ratio < 4.5, "model-core: drift refinement ratio");
}

void verify_gp(VerifyCounter& vc, CounterRng& rng, const std::vector<double>& lambdas) {
    Grid grid(1, 8.0, 129);
    TrapPotential V = TrapPotential::harmonic();
    FlowParams p;
    NlsSolution sol = minimize_nls(V, 1.0, grid, p);
    vc.check(sol.maxEnergyIncrease <= 1e-12, "gp: energy monotone along the flow");
    vc.check(std::abs(grid_inner(sol.phi, sol.phi) - 1.0) <= 1e-10, "gp: normalized output");
    bool positive = true;
    for (double v : sol.phi.values()) positive = positive && v > 0.0;
    vc.check(positive, "gp: strictly positive minimizer");

    // variational upper bound over random smooth trials
    bool variational = true;
    for (int trial = 0; trial < 100; ++trial) {
        GridFunction phi(grid, 1);
        const double a = 0.4 + 1.2 * rng.uniform(static_cast<std::uint64_t>(trial), 0, 0,
                                                 RngStream::testSweep);
        const double c = 2.0 * rng.uniform(static_cast<std::uint64_t>(trial), 1, 0,
                                           RngStream::testSweep) - 1.0;
        const double q = 0.5 * rng.uniform(static_cast<std::uint64_t>(trial), 2, 0,
                                           RngStream::testSweep);
        for (int i = 0; i < grid.pointsPerAxis; ++i) {
            const double xv = grid.coord(i);
            phi[static_cast<std::size_t>(i)] = (1.0 + c * xv + q * xv * xv) * std::exp(-a * xv * xv);
        }
        normalize_l2(phi);
        if (nls_energy_of(phi, V, 1.0) < sol.energy - 1e-10) variational = false;
    }
    vc.check(variational, "gp: variational upper bound (100 random trials)");

    // concavity of the lambda-energy maps on the configured lambda list
    for (PerturbedTerm term : {PerturbedTerm::trap, PerturbedTerm::interaction}) {
        std::vector<double> ls = lambdas;
        std::sort(ls.begin(), ls.end());
        std::vector<double> Es;
        for (double l : ls) Es.push_back(perturbed_nls_energy(term, l, V, 1.0, grid, p).energy);
        bool concave = true;
        for (std::size_t i = 1; i + 1 < ls.size(); ++i) {
            const double t = (ls[i] - ls[i - 1]) / (ls[i + 1] - ls[i - 1]);
            const double interp = (1.0 - t) * Es[i - 1] + t * Es[i + 1];
            if (!(Es[i] >= interp - 1e-8)) concave = false;
        }
        vc.check(concave, "gp: lambda-energy concavity");
    }
}

void verify_scattering(VerifyCounter& vc) {
    PairPotential v0 = PairPotential::bump(0.4, 1.0);
    auto rows = scattering_limit_sweep(v0, 0.5, {2, 8, 32});
    bool upper = true, shrinking = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].fourPiA > rows[i].g + 1e-8) upper = false;
        if (i > 0 && std::abs(rows[i].gap) >= std::abs(rows[i - 1].gap)) shrinking = false;
    }
    vc.check(upper, "scattering: 4 pi a_N <= g");
    vc.check(shrinking, "scattering: |4 pi a_N - g| decreasing");
}

void verify_nbody(VerifyCounter& vc) {
    Grid grid(1, 6.0, 49);
    TrapPotential V = TrapPotential::harmonic();
    FlowParams p;
    p.energyTolerance = 1e-13;
    p.residualTolerance = 1e-7;
    NlsSolution one = minimize_nls(V, 0.0, grid, p);
    for (int N : {2, 3}) {
        NBodyState st = minimize_nbody(V, PairPotential::zero(), N, 0.0, grid, p);
        vc.check(std::abs(st.energy / N - one.energy) <= 1e-8,
                 "nbody: non-interacting factorization N=" + std::to_string(N));
        vc.check(st.maxAsymmetry <= 1e-10, "nbody: symmetry N=" + std::to_string(N));
        const double perParticleSum = st.componentsPerParticle.kinetic1 +
                                      st.componentsPerParticle.trap1 +
                                      st.componentsPerParticle.interaction1;
        vc.check(std::abs(st.energy / N - perParticleSum) <= 1e-10,
                 "nbody: component bookkeeping N=" + std::to_string(N));
    }

    // variational bound against the product trial state
    PairPotential v0 = PairPotential::bump(0.9375, 1.0);
    const double g = pair_coupling(v0, 1);
    NBodyState st = minimize_nbody(V, v0, 2, 0.5, grid, p);
    NlsSolution nls = minimize_nls(V, g, grid, p);
    GridFunction trial(grid, 2);
    const int n = grid.pointsPerAxis;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            trial[static_cast<std::size_t>(j) * n + i] =
                nls.phi[static_cast<std::size_t>(i)] * nls.phi[static_cast<std::size_t>(j)];
    normalize_l2(trial);
    NBodyState trialState = finalize_nbody_state(trial, V, v0, 2, 0.5);
    vc.check(st.energy <= trialState.energy + 1e-10, "nbody: product-state variational bound");
}

void verify_inequalities(VerifyCounter& vc, CounterRng& rng) {
    // randomized Pinsker and chain-rule sweeps
    bool pinskerOk = true, chainOk = true;
    for (int it = 0; it < 10000; ++it) {
        const std::uint64_t traj = static_cast<std::uint64_t>(it);
        const int m = 2 + static_cast<int>(14.0 * rng.uniform(traj, 0, 1, RngStream::testSweep));
        std::vector<double> P(static_cast<std::size_t>(m)), Q(static_cast<std::size_t>(m));
        double sp = 0.0, sq = 0.0;
        for (int i = 0; i < m; ++i) {
            P[static_cast<std::size_t>(i)] = -std::log(
                rng.uniform(traj, static_cast<std::uint64_t>(2 * i + 2), 1, RngStream::testSweep));
            Q[static_cast<std::size_t>(i)] = -std::log(
                rng.uniform(traj, static_cast<std::uint64_t>(2 * i + 3), 1, RngStream::testSweep));
            sp += P[static_cast<std::size_t>(i)];
            sq += Q[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < m; ++i) {
            P[static_cast<std::size_t>(i)] /= sp;
            Q[static_cast<std::size_t>(i)] /= sq;
        }
        PinskerResult pr = pinsker_check(P, Q);
        if (pr.violated || pr.strongerViolated) pinskerOk = false;

        const int nx = 2 + (it % 7), ny = 2 + (it % 5);
        std::vector<double> J(static_cast<std::size_t>(nx * ny));
        std::vector<double> Q1(static_cast<std::size_t>(nx)), Q2(static_cast<std::size_t>(ny));
        double sj = 0.0, s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < nx * ny; ++i) {
            J[static_cast<std::size_t>(i)] = -std::log(rng.uniform(
                traj, static_cast<std::uint64_t>(100 + i), 2, RngStream::testSweep));
            sj += J[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < nx; ++i) {
            Q1[static_cast<std::size_t>(i)] = -std::log(rng.uniform(
                traj, static_cast<std::uint64_t>(300 + i), 2, RngStream::testSweep));
            s1 += Q1[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < ny; ++i) {
            Q2[static_cast<std::size_t>(i)] = -std::log(rng.uniform(
                traj, static_cast<std::uint64_t>(400 + i), 2, RngStream::testSweep));
            s2 += Q2[static_cast<std::size_t>(i)];
        }
        for (double& v : J) v /= sj;
        for (double& v : Q1) v /= s1;
        for (double& v : Q2) v /= s2;
        ChainRuleResult cr = chain_rule_gap(J, nx, ny, Q1, Q2);
        if (!(cr.gap >= -1e-12)) chainOk = false;
    }
    vc.check(pinskerOk, "metrics: Pinsker sweep (1e4 instances)");
    vc.check(chainOk, "metrics: chain-rule sweep (1e4 instances)");

    // Fisher superadditivity and convexity
    Grid g2(1, 4.0, 33);
    bool fisherOk = true;
    for (int it = 0; it < 2000 && fisherOk; ++it) {
        const std::uint64_t traj = static_cast<std::uint64_t>(it);
        GridFunction G(g2, 2);
        const double ax = 0.5 + rng.uniform(traj, 0, 3, RngStream::testSweep);
        const double ay = 0.5 + rng.uniform(traj, 1, 3, RngStream::testSweep);
        const double cxy = 1.6 * rng.uniform(traj, 2, 3, RngStream::testSweep) - 0.8;
        const int n = g2.pointsPerAxis;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double xv = g2.coord(i), yv = g2.coord(j);
                G[static_cast<std::size_t>(j) * n + i] =
                    std::exp(-(ax * xv * xv + ay * yv * yv + cxy * xv * yv)) + 1e-12;
            }
        normalize_mass(G);
        if (!(fisher_superadditivity_gap(G, 1) >= -1e-8)) fisherOk = false;

        GridFunction G1(g2, 1), G2f(g2, 1);
        for (int i = 0; i < n; ++i) {
            const double xv = g2.coord(i);
            G1[static_cast<std::size_t>(i)] = std::exp(-ax * xv * xv) + 1e-12;
            G2f[static_cast<std::size_t>(i)] = std::exp(-ay * (xv - 0.5) * (xv - 0.5)) + 1e-12;
        }
        normalize_mass(G1);
        normalize_mass(G2f);
        const double alpha = rng.uniform(traj, 3, 3, RngStream::testSweep);
        if (!(fisher_convexity_check(G1, G2f, alpha) >= -1e-8)) fisherOk = false;
    }
    vc.check(fisherOk, "metrics: Fisher superadditivity + convexity sweep");
}

void verify_sde(VerifyCounter& vc) {
    // stationarity on a Gaussian and a double bump
    Grid grid(1, 6.0, 65);
    for (int which : {0, 1}) {
        GridFunction rho(grid, 1);
        for (int i = 0; i < grid.pointsPerAxis; ++i) {
            const double xv = grid.coord(i);
            rho[static_cast<std::size_t>(i)] =
                which == 0 ? std::exp(-xv * xv)
                           : std::exp(-(xv - 1.2) * (xv - 1.2)) +
                                 std::exp(-(xv + 1.2) * (xv + 1.2));
        }
        normalize_mass(rho);
        std::vector<double> u = drift_component_from_density(rho, 0, default_drift_floor(rho));
        PerParticleDrift drift(grid, std::move(u), 1);
        SdeParams sp;
        sp.timeStep = 1e-3;
        sp.horizon = 2.0;
        sp.trajectories = 8000;
        sp.seed = 99;
        sp.recordedFrames = 9;
        std::vector<double> init = sample_density(rho, sp.trajectories, sp.seed);
        PathEnsemble ens = simulate(drift, grid, init, sp);
        // statistical threshold: expected histogram TV plus margin
        double expTv = 0.0;
        for (int i = 0; i < grid.pointsPerAxis; ++i) {
            const double w = (i == 0 || i == grid.pointsPerAxis - 1) ? 0.5 : 1.0;
            const double pbin = rho[static_cast<std::size_t>(i)] * w * grid.spacing();
            expTv += 0.5 * std::sqrt(pbin * (1.0 - pbin) / sp.trajectories);
        }
        const double threshold = 2.0 * expTv + 0.01;
        bool stationary = true;
        for (int f = 0; f < ens.frames(); ++f) {
            const double tf = ens.recordTimes[static_cast<std::size_t>(f)];
            GridFunction emp = empirical_density(ens, grid, 0, tf - 1e-12, tf + 1e-12);
            if (tv_density(emp, rho) > threshold) stationary = false;
        }
        vc.check(stationary, which == 0 ? "sde: Gaussian stationarity" : "sde: double-bump stationarity");
    }

    // determinism: identical runs produce identical bytes
    Grid grid2(1, 4.0, 33);
    ZeroDrift zd(1);
    SdeParams sp;
    sp.timeStep = 1e-2;
    sp.horizon = 0.5;
    sp.trajectories = 64;
    sp.seed = 7;
    std::vector<double> init(64, 0.0);
    PathEnsemble a = simulate(zd, grid2, init, sp);
    PathEnsemble b = simulate(zd, grid2, init, sp);
    vc.check(a.states == b.states, "sde: bit-identical repeat run");
}

void verify_chaos_cell(VerifyCounter& vc, const GlobalOpts& g) {
    RunConfig cfg = load_config(g);
    cfg.n = 49;
    cfg.L = 6.0;
    cfg.M = 800;
    cfg.t = 1.0;
    GroundStateCache cache = GroundStateCache::disabled();
    ChaosCell cell = compute_chaos_cell(cfg, 2, 0.5, cache);
    const ChaosReport& r = cell.report;
    vc.check(r.driftMismatch >= 0.0, "chaos: mismatch nonnegative");
    bool ck = true;
    for (std::size_t k = 0; k < r.kMarginalTV.size(); ++k)
        if (r.kMarginalTV[k] > std::sqrt(2.0 * r.kMarginalEntropy[k]) + 1e-12) ck = false;
    vc.check(ck, "chaos: Csiszar-Kullback on k-marginals");
    vc.check(r.kacMetric <= cell.kacBound * 1.25 + 1e-12, "chaos: Kac coupling bound");
    vc.check(cell.identityGrad1Selected, "chaos: identity selects the grad_1 reading");
    vc.check(std::abs(r.normalizedEntropy - 0.5 * r.t * r.driftMismatch) <= 1e-15,
             "chaos: Hbar closed form");
}

int cmd_verify(const GlobalOpts& g) {
    VerifyCounter vc;
    CounterRng rng(424242);
    RunConfig cfgForLambdas = load_config(g);
    verify_model_core(vc);
    verify_gp(vc, rng, cfgForLambdas.lambdas);
    verify_scattering(vc);
    verify_nbody(vc);
    verify_inequalities(vc, rng);
    verify_sde(vc);
    verify_chaos_cell(vc, g);
    std::printf("verify: %d properties passed, %zu failed\n", vc.passed, vc.failures.size());
    if (!vc.failures.empty()) {
        emit_error_record(3, "property_violation",
                          "verify: " + std::to_string(vc.failures.size()) + " properties failed");
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"beclab - mean-field condensation laboratory"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.configPath, "INI config path");
    app.add_option("--out", g.outDir, "output directory (overrides config)");
    app.add_option("--cache", g.cacheDir, "ground-state cache directory");
    app.add_flag("--no-cache", g.noCache, "disable the ground-state cache");
    app.add_option("--workers", g.workers, "worker count (wall time only; outputs are identical)");
    auto* seedOpt = app.add_option("--seed", g.seed, "RNG seed (overrides config)");

    auto* solveNls = app.add_subcommand("solve-nls", "one-particle ground state");
    auto* solveNbody = app.add_subcommand("solve-nbody", "N-body tensor-grid ground state");
    auto* scatteringCmd = app.add_subcommand("scattering", "scattering-length limit sweep");
    auto* simulateCmd = app.add_subcommand("simulate", "Nelson diffusion ensemble");
    auto* chaosCmd = app.add_subcommand("chaos-report", "chaos diagnostics for one (N, beta, t)");
    auto* sweepCmd = app.add_subcommand("sweep", "cross-product chaos sweep");
    auto* verifyCmd = app.add_subcommand("verify", "run the full property suite");

    int N = 0;
    double beta = -1.0;
    std::string system = "nls";
    std::vector<int> Ns;
    for (CLI::App* cmd : {solveNbody, chaosCmd, simulateCmd}) {
        cmd->add_option("--N", N, "particle number");
        cmd->add_option("--beta", beta, "scaling exponent");
    }
    scatteringCmd->add_option("--beta", beta, "scaling exponent");
    scatteringCmd->add_option("--Ns", Ns, "particle numbers");
    simulateCmd->add_option("--system", system, "nls | nbody");

    try {
        app.parse(argc, argv);
        g.seedSet = seedOpt->count() > 0;
        if (solveNls->parsed()) return cmd_solve_nls(g);
        if (solveNbody->parsed()) return cmd_solve_nbody(g, N, beta);
        if (scatteringCmd->parsed()) return cmd_scattering(g, beta, Ns);
        if (simulateCmd->parsed()) return cmd_simulate(g, system, N, beta);
        if (chaosCmd->parsed()) return cmd_chaos_report(g, N, beta);
        if (sweepCmd->parsed()) return cmd_sweep(g);
        if (verifyCmd->parsed()) return cmd_verify(g);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        emit_error_record(1, "config_error", e.what());
        return 1;
    } catch (const DomainError& e) {
        emit_error_record(1, "config_error", e.what());
        return 1;
    } catch (const BudgetError& e) {
        emit_error_record(4, "budget_refusal",
                          std::string(e.what()) + " (raise solver.budget to at least " +
                              std::to_string(e.requested) + ")");
        return 4;
    } catch (const ConvergenceError& e) {
        emit_error_record(2, "non_convergence", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error_record(1, "error", e.what());
        return 1;
    }
}
