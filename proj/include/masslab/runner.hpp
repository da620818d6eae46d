#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "masslab/algebra.hpp"
#include "masslab/report.hpp"
#include "masslab/scenario.hpp"
#include "masslab/snapshot.hpp"
#include "masslab/verify.hpp"

namespace masslab {

// ---------------------------------------------------------------------------
// Config -> domain objects
// ---------------------------------------------------------------------------

inline Constants constants_from(const ScenarioConfig& cfg) {
    Constants k;
    k.hbar = cfg.get_double("physics.hbar", 1.0);
    k.c = cfg.get_double("physics.c", std::numeric_limits<double>::infinity());
    k.validate();
    return k;
}

inline SpatialGrid grid_from(const ScenarioConfig& cfg) {
    return make_spatial_grid(cfg.get_size("grid.n"), cfg.get_double("grid.L"));
}

inline SGrid sgrid_from(const ScenarioConfig& cfg) {
    return make_sgrid(cfg.get_size("grid.n_s"), cfg.get_double("grid.L_s"));
}

/// Builds the initial superposition: one Gaussian packet per listed mass,
/// channel i scaled to squared norm weight_i (weights normalized to sum 1).
inline SuperpositionState state_from(const ScenarioConfig& cfg) {
    const SpatialGrid grid = grid_from(cfg);
    const std::vector<double> masses = cfg.get_list("physics.masses");
    const std::size_t nch = masses.size();
    std::vector<double> weights =
        cfg.get_broadcast_list("physics.weights", nch, 1.0 / static_cast<double>(nch));
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw config_error("field 'physics.weights' entries must be > 0");
        wsum += w;
    }
    const std::vector<double> x0 = cfg.get_broadcast_list("physics.x0", nch, 0.0);
    const std::vector<double> k0 = cfg.get_broadcast_list("physics.k0", nch, 0.0);
    const std::vector<double> sigma = cfg.get_broadcast_list("physics.sigma", nch, 1.0);

    std::vector<MassChannel> channels;
    channels.reserve(nch);
    for (std::size_t i = 0; i < nch; ++i) {
        wave psi = gaussian_packet(grid, x0[i], k0[i], sigma[i]);
        const double amp = std::sqrt(weights[i] / wsum);
        for (auto& z : psi) z *= amp;
        channels.push_back(MassChannel{masses[i], 0.0, grid, std::move(psi)});
    }
    return make_superposition(std::move(channels));
}

/// Deterministic Gaussian-type probe fields for the algebra checks: a few
/// lattice-mass components with random packets and coefficients, nonzero
/// time stamps so the boost generator's t-term participates.
inline std::vector<ExtendedField> make_probes(const SpatialGrid& grid, const SGrid& sgrid,
                                              const Constants& k, std::size_t count,
                                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::uniform_real_distribution<double> uk(-2.0, 2.0);
    std::uniform_real_distribution<double> usig(0.8, 1.4);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<std::size_t> umass(1, sgrid.n_s - 1);

    std::vector<ExtendedField> probes;
    probes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        wave spec(grid.n * sgrid.n_s, complexd{0.0, 0.0});
        const std::size_t ncomp = 2 + (i % 2);
        for (std::size_t c = 0; c < ncomp; ++c) {
            const std::size_t kk = umass(rng);
            const wave packet = gaussian_packet(grid, ux(rng), uk(rng), usig(rng));
            const complexd coeff = std::exp(complexd(0.0, uphase(rng)));
            for (std::size_t ix = 0; ix < grid.n; ++ix) spec[kk * grid.n + ix] += coeff * packet[ix];
        }
        ExtendedField f = field_from_s_spectrum(std::move(spec), grid, sgrid,
                                                0.25 * static_cast<double>(i + 1));
        const double nf = norm(f);
        if (!(nf > 0.0)) throw invalid_parameter("make_probes: zero probe");
        for (auto& z : f.field) z /= nf;
        probes.push_back(std::move(f));
    }
    (void)k;
    return probes;
}

// ---------------------------------------------------------------------------
// Scenario dispatch
// ---------------------------------------------------------------------------

namespace runner_detail {

inline void validate_stepping(const ScenarioConfig& cfg) {
    const double dt = cfg.get_double("numerics.dt");
    const double t_final = cfg.get_double("numerics.t_final");
    if (!(dt > 0.0)) throw config_error("field 'numerics.dt' must be > 0");
    if (!(t_final > 0.0)) throw config_error("field 'numerics.t_final' must be > 0");
    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    if (steps == 0 || std::abs(steps * dt - t_final) > 1e-9 * t_final)
        throw config_error("field 'numerics.t_final' must be a positive multiple of dt");
    const std::size_t stride = cfg.get_size("numerics.snapshot_stride", 1);
    if (stride == 0 || steps % stride != 0)
        throw config_error("field 'numerics.snapshot_stride' must divide t_final/dt");
}

// When an s-grid is configured the listed masses must sit on its conjugate
// lattice, whether or not the scenario exercises the extended route.
inline void validate_mass_lattice(const ScenarioConfig& cfg, const Constants& k) {
    if (!cfg.has("grid.n_s")) return;
    const SGrid sgrid = sgrid_from(cfg);
    for (double m : cfg.get_list("physics.masses")) {
        try {
            sgrid.mass_index(m, k.hbar);
        } catch (const lattice_mismatch& e) {
            throw config_error(std::string("field 'physics.masses': ") + e.what());
        }
    }
}

inline void run_free_covariance(const ScenarioConfig& cfg, RunReport& rep) {
    const Constants k = constants_from(cfg);
    validate_stepping(cfg);
    validate_mass_lattice(cfg, k);
    const SuperpositionState initial = state_from(cfg);
    const double v = cfg.get_double("physics.v");
    const double dt = cfg.get_double("numerics.dt");
    const double t_final = cfg.get_double("numerics.t_final");
    const std::size_t stride = cfg.get_size("numerics.snapshot_stride", 1);
    const double residual_tol = cfg.get_double("tolerances.residual", 1e-5);
    const double fidelity_tol = cfg.get_double("tolerances.fidelity", 1e-8);
    const double phase_tol = cfg.get_double("tolerances.phase", 1e-6);

    const CovarianceReport r =
        check_galilean_covariance(initial, v, t_final, dt, stride, k, residual_tol);

    rep.metric("residual_max", r.residual.max_residual);
    rep.metric("full_fidelity", r.full_fidelity);
    for (std::size_t i = 0; i < r.channel_fidelities.size(); ++i)
        rep.metric("channel_fidelity." + std::to_string(i), r.channel_fidelities[i]);
    for (std::size_t i = 0; i < r.channel_phases.size(); ++i) {
        rep.metric("channel_phase." + std::to_string(i), r.channel_phases[i]);
        rep.metric("predicted_phase." + std::to_string(i), r.predicted_phases[i]);
    }
    rep.check("boosted_residual", r.residual.pass,
              format_double(r.residual.max_residual) + " < " + format_double(residual_tol));
    rep.check("route_fidelity", r.full_fidelity > 1.0 - fidelity_tol,
              format_double(r.full_fidelity) + " > 1 - " + format_double(fidelity_tol));
    if (initial.size() > 1) {
        rep.metric("phase_error_max", r.max_phase_error);
        rep.check("relative_phase", r.max_phase_error < phase_tol,
                  format_double(r.max_phase_error) + " < " + format_double(phase_tol));
    }
    rep.states.emplace_back("initial", initial);
    rep.states.emplace_back("boosted_final", r.boosted_final);
}

inline void run_ep_check(const ScenarioConfig& cfg, RunReport& rep) {
    const Constants k = constants_from(cfg);
    validate_stepping(cfg);
    validate_mass_lattice(cfg, k);
    const SuperpositionState initial = state_from(cfg);
    const double g = cfg.get_double("physics.g");
    const bool rest = cfg.get_bool("physics.rest_energy", false);
    const double dt = cfg.get_double("numerics.dt");
    const double t_final = cfg.get_double("numerics.t_final");
    const std::size_t stride = cfg.get_size("numerics.snapshot_stride", 1);
    const double fidelity_tol = cfg.get_double("tolerances.fidelity", 1e-6);
    const double residual_tol = cfg.get_double("tolerances.residual", 1e-4);

    const EpResolution res = resolve_ep_sign(initial, g, t_final, dt, stride, k, rest,
                                             fidelity_tol, residual_tol);

    for (const EPReport* r : {&res.minus, &res.plus}) {
        const std::string tag = to_string(r->convention);
        rep.metric("fidelity." + tag, r->full_fidelity);
        rep.metric("residual_max." + tag, r->pulled_back_residual.max_residual);
        for (std::size_t i = 0; i < r->channel_fidelities.size(); ++i)
            rep.metric("channel_fidelity." + tag + "." + std::to_string(i),
                       r->channel_fidelities[i]);
    }
    const std::string resolved =
        res.degenerate ? "degenerate" : (res.resolved ? to_string(*res.resolved) : "none");
    rep.metric("resolved_convention", resolved);

    if (g == 0.0) {
        // Conventions coincide; the scenario passes on its own merits.
        rep.check("ep_fidelity", res.minus.full_fidelity > 1.0 - fidelity_tol,
                  format_double(res.minus.full_fidelity) + " > 1 - " +
                      format_double(fidelity_tol));
        rep.check("ep_residual", res.minus.pulled_back_residual.pass,
                  format_double(res.minus.pulled_back_residual.max_residual) + " < " +
                      format_double(residual_tol));
    } else {
        rep.check("sign_convention_unique", res.resolved.has_value(),
                  "exactly one convention passes (" + resolved + ")");
        const EPReport& winner =
            (res.resolved == EpSignConvention::t3_plus) ? res.plus : res.minus;
        rep.check("ep_fidelity",
                  res.resolved.has_value() && winner.full_fidelity > 1.0 - fidelity_tol,
                  format_double(winner.full_fidelity) + " > 1 - " +
                      format_double(fidelity_tol));
        rep.check("ep_residual",
                  res.resolved.has_value() && winner.pulled_back_residual.pass,
                  format_double(winner.pulled_back_residual.max_residual) + " < " +
                      format_double(residual_tol));
    }
    rep.states.emplace_back("initial", initial);
    rep.states.emplace_back("direct_final", res.direct_final);
    rep.states.emplace_back("pulled_back_final", res.minus.pulled_back_final);
}

inline void run_bargmann_scan(const ScenarioConfig& cfg, RunReport& rep) {
    const Constants k = constants_from(cfg);
    const SpatialGrid grid = grid_from(cfg);
    const std::vector<double> masses = cfg.get_list("physics.masses");
    if (masses.size() != 2)
        throw config_error("field 'physics.masses' must carry exactly 2 entries for bargmann_scan");
    const double av_min = cfg.get_double("numerics.av_min", 0.0);
    const double av_max = cfg.get_double("numerics.av_max", std::numbers::pi);
    const std::size_t points = cfg.get_size("numerics.av_points", 20);
    if (points < 2) throw config_error("field 'numerics.av_points' must be >= 2");
    const double law_tol = cfg.get_double("tolerances.law_deviation", 1e-10);

    std::vector<double> av(points);
    for (std::size_t i = 0; i < points; ++i)
        av[i] = av_min + (av_max - av_min) * static_cast<double>(i) /
                             static_cast<double>(points - 1);
    rep.scan = loop_fidelity_scan(masses[0], masses[1], av, grid, k);

    double worst = 0.0;
    for (const auto& p : rep.scan) worst = std::max(worst, std::abs(p.fidelity - p.predicted));
    rep.metric("law_max_deviation", worst);
    rep.metric("scan_points", static_cast<double>(points));
    rep.check("fidelity_law", worst < law_tol,
              format_double(worst) + " < " + format_double(law_tol));
}

inline void run_algebra_check(const ScenarioConfig& cfg, RunReport& rep) {
    const Constants k = constants_from(cfg);
    const SpatialGrid grid = grid_from(cfg);
    const SGrid sgrid = sgrid_from(cfg);
    const std::size_t nprobes = cfg.get_size("numerics.probes", 6);
    const auto seed = static_cast<std::uint64_t>(cfg.get_size("seed", 12345));
    const double tol = cfg.get_double("tolerances.commutator", 1e-10);
    if (nprobes < 5) throw config_error("field 'numerics.probes' must be >= 5");

    const auto probes = make_probes(grid, sgrid, k, nprobes, seed);
    const GeneratorSpec X = position_generator();
    const GeneratorSpec P = momentum_generator(k);
    const GeneratorSpec M = mass_generator(k);
    const GeneratorSpec C = boost_generator(k);
    const complexd ih{0.0, k.hbar};

    struct Case {
        const char* name;
        const GeneratorSpec& a;
        const GeneratorSpec& b;
        GeneratorSpec expected;
    };
    const Case cases[] = {
        {"xp_equals_ihbar", X, P, scaled(ih, identity_generator(), "ih*I")},
        {"cp_equals_ihbar_m", C, P, scaled(ih, M, "ih*M")},
        {"mx_commutes", M, X, zero_generator()},
        {"mp_commutes", M, P, zero_generator()},
    };
    for (const auto& c : cases) {
        const double err = commutator_check(c.a, c.b, c.expected, probes);
        rep.metric(std::string("commutator_error.") + c.name, err);
        rep.check(c.name, err < tol, format_double(err) + " < " + format_double(tol));
    }
    rep.metric("probe_count", static_cast<double>(nprobes));
}

inline void run_poincare_reduction(const ScenarioConfig& cfg, RunReport& rep) {
    const Constants k = constants_from(cfg);
    const double v = cfg.get_double("physics.v");
    const double a = cfg.get_double("physics.a");
    const double m = cfg.get_list("physics.masses").front();
    const double p = cfg.get_double("physics.p", 0.3);
    const std::vector<double> cs =
        cfg.get_list("numerics.c_values", std::vector<double>{10.0, 100.0, 1000.0});
    if (cs.size() < 2) throw config_error("field 'numerics.c_values' needs >= 2 entries");
    const double ratio_tol = cfg.get_double("tolerances.ratio", 0.01);
    const double coords_tol = cfg.get_double("tolerances.coords", 1e-14);

    // Coordinate displacements against direct substitution.
    double coords_err = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const double c = cs[i];
        const auto d = poincare_loop_coords(v, a, c);
        coords_err = std::max(coords_err, std::abs(d.dx - 0.5 * v * a * v / (c * c)));
        coords_err = std::max(coords_err, std::abs(d.dt - v * a / (c * c)));
        rep.metric("dx.c" + std::to_string(i), d.dx);
        rep.metric("dt.c" + std::to_string(i), d.dt);
    }
    rep.check("coords_substitution", coords_err <= coords_tol,
              format_double(coords_err) + " <= " + format_double(coords_tol));

    // dt scales exactly as c^-2.
    const auto d0 = poincare_loop_coords(v, a, cs[0]);
    const auto d1 = poincare_loop_coords(v, a, cs[1]);
    const double expect = (cs[1] / cs[0]) * (cs[1] / cs[0]);
    const double ratio = d0.dt / d1.dt;
    rep.metric("dt_ratio_01", ratio);
    rep.check("dt_c2_scaling", std::abs(ratio / expect - 1.0) < 1e-12,
              format_double(ratio) + " == " + format_double(expect));

    // Loop phase: the c-independent part is m v a / hbar; the remainder
    // scales as c^-2, i.e. correction * c^2 is the same constant K for all c.
    std::vector<double> kvals;
    bool warned = false;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto ph = poincare_loop_phase(m, p, v, a, cs[i], k.hbar);
        warned = warned || ph.regime_warning;
        rep.metric("phase.c" + std::to_string(i), ph.phase);
        rep.metric("correction.c" + std::to_string(i), ph.correction);
        kvals.push_back(ph.correction * cs[i] * cs[i]);
        rep.metric("K.c" + std::to_string(i), kvals.back());
    }
    double kerr = 0.0;
    for (double kv : kvals) kerr = std::max(kerr, std::abs(kv / kvals[0] - 1.0));
    rep.metric("K_relative_spread", kerr);
    rep.check("correction_c2_scaling", kerr < ratio_tol,
              format_double(kerr) + " < " + format_double(ratio_tol));

    const auto ph0 = poincare_loop_phase(m, 0.0, v, a, cs[0], k.hbar);
    rep.metric("zero_momentum_phase", ph0.phase);
    rep.check("zero_momentum_exact",
              std::abs(ph0.phase - m * v * a / k.hbar) <=
                  1e-15 * std::abs(m * v * a / k.hbar),
              "phase(p=0) == m v a / hbar");
    if (warned) rep.metric("regime_warning", "momentum outside the nonrelativistic regime");
}

}  // namespace runner_detail

/// Executes one scenario. Throws config_error for invalid configurations and
/// other masslab errors for runtime failures; never writes files.
inline RunReport run(const ScenarioConfig& cfg) {
    RunReport rep;
    rep.scenario = to_string(cfg.kind());
    for (const auto& [key, value] : cfg.entries()) rep.config_echo[key] = value;

    const auto start = std::chrono::steady_clock::now();
    try {
        switch (cfg.kind()) {
            case ScenarioKind::free_covariance:
                runner_detail::run_free_covariance(cfg, rep);
                break;
            case ScenarioKind::ep_check: runner_detail::run_ep_check(cfg, rep); break;
            case ScenarioKind::bargmann_scan: runner_detail::run_bargmann_scan(cfg, rep); break;
            case ScenarioKind::algebra_check: runner_detail::run_algebra_check(cfg, rep); break;
            case ScenarioKind::poincare_reduction:
                runner_detail::run_poincare_reduction(cfg, rep);
                break;
        }
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        throw error("scenario '" + rep.scenario + "': " + e.what());
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

struct RunOptions {
    std::string out_dir;  // resolved by the CLI (flag > env > config > default)
    bool quiet = false;
    bool snapshots = false;
};

/// Runs a scenario and writes report.txt, any scan CSV, and optional state
/// snapshots under options.out_dir. Returns 0 when every check passed, 1
/// otherwise.
inline int run_to_files(const ScenarioConfig& cfg, const RunOptions& options) {
    const RunReport rep = run(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(options.out_dir);
    write_text_file((fs::path(options.out_dir) / "report.txt").string(), rep.to_text());
    if (!rep.scan.empty())
        write_text_file((fs::path(options.out_dir) / (rep.scenario + ".csv")).string(),
                        rep.scan_csv());
    if (options.snapshots)
        for (const auto& [name, state] : rep.states)
            save_snapshot(state, (fs::path(options.out_dir) / (name + ".mlsnap")).string());
    if (!options.quiet) std::cout << rep.to_text();
    return rep.pass() ? 0 : 1;
}

}  // namespace masslab
