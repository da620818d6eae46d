#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "masslab/spectral.hpp"
#include "masslab/state.hpp"

namespace masslab {

// ---------------------------------------------------------------------------
// Hamiltonian description
// ---------------------------------------------------------------------------

struct NoPotential {};

/// Uniform-field potential: channel of mass m feels V_m(x) = m * g * x.
struct UniformField {
    double g = 0.0;
};

/// External, mass-independent potential V(x, t). Potentials never depend on
/// the auxiliary coordinate s; that restriction is structural (the type
/// cannot express s-dependence), which keeps every evolution channel-wise.
struct CustomPotential {
    std::function<double(double x, double t)> v;
};

struct HamiltonianSpec {
    Constants constants;
    bool rest_energy = false;  // include the m c^2 channel phase
    std::variant<NoPotential, UniformField, CustomPotential> potential = NoPotential{};

    void validate() const {
        constants.validate();
        if (rest_energy && constants.galilean())
            throw invalid_parameter("HamiltonianSpec: rest_energy requires finite c");
        if (const auto* uf = std::get_if<UniformField>(&potential)) {
            if (!std::isfinite(uf->g))
                throw invalid_parameter("HamiltonianSpec: uniform field g must be finite");
        }
        if (const auto* cp = std::get_if<CustomPotential>(&potential)) {
            if (!cp->v) throw invalid_parameter("HamiltonianSpec: custom potential is empty");
        }
    }

    bool has_potential() const { return !std::holds_alternative<NoPotential>(potential); }

    /// Potential felt by a channel of mass m at (x, t).
    double channel_potential(double mass, double x, double t) const {
        if (const auto* uf = std::get_if<UniformField>(&potential)) return mass * uf->g * x;
        if (const auto* cp = std::get_if<CustomPotential>(&potential)) return cp->v(x, t);
        return 0.0;
    }
};

/// Uniformly spaced snapshots of an evolving state.
template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> snapshots;

    std::size_t size() const { return times.size(); }
};

// ---------------------------------------------------------------------------
// Analytic oracle: free Gaussian
// ---------------------------------------------------------------------------

/// Exact freely evolved Gaussian packet at time t, unit norm on the grid.
/// At t = 0 it coincides with gaussian_packet(grid, x0, k0, sigma).
inline MassChannel free_gaussian_analytic(double mass, double x0, double k0, double sigma,
                                          double t, const SpatialGrid& grid,
                                          const Constants& k) {
    k.validate();
    if (!(mass > 0.0)) throw invalid_parameter("free_gaussian_analytic: mass must be > 0");
    if (!(sigma > 0.0)) throw invalid_parameter("free_gaussian_analytic: sigma must be > 0");
    const double hbar = k.hbar;
    const complexd beta = complexd(sigma * sigma, 0.5 * hbar * t / mass);
    const double v0 = hbar * k0 / mass;
    const complexd width_factor = std::sqrt(complexd(sigma * sigma, 0.0) / beta);
    wave psi(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double u = x - x0 - v0 * t;
        const complexd arg =
            complexd(0.0, k0 * x - 0.5 * hbar * k0 * k0 * t / mass) - u * u / (4.0 * beta);
        psi[j] = width_factor * std::exp(arg);
    }
    const double nrm = norm(psi, grid);
    for (auto& z : psi) z /= nrm;
    return MassChannel{mass, t, grid, std::move(psi)};
}

// ---------------------------------------------------------------------------
// Split-step propagation
// ---------------------------------------------------------------------------

namespace detail {

inline wave kinetic_multiplier(const SpatialGrid& grid, double mass, double hbar,
                               double dt_fraction) {
    wave mult(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double kk = grid.wavenumber(j);
        mult[j] = std::exp(complexd(0.0, -hbar * kk * kk * dt_fraction / (2.0 * mass)));
    }
    return mult;
}

}  // namespace detail

/// Second-order Strang propagation: kinetic half step, potential full step
/// (sampled at the step midpoint), kinetic half step. The rest-energy phase
/// exp(-i m c^2 dt / hbar) is applied analytically once per step, never
/// through the splitting. Potential-free steps collapse to a single exact
/// spectral multiplier. A boundary-tail check runs every step and aborts
/// with the offending step index.
inline MassChannel split_step_evolve(MassChannel channel, const HamiltonianSpec& ham,
                                     double dt, std::size_t steps) {
    ham.validate();
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw invalid_parameter("split_step_evolve: dt must be finite and > 0");
    if (!(channel.mass > 0.0))
        throw invalid_parameter("split_step_evolve: mass must be > 0");
    const SpatialGrid grid = channel.grid;
    const double hbar = ham.constants.hbar;
    const double mass = channel.mass;

    const bool with_potential = ham.has_potential();
    const wave kin = with_potential ? detail::kinetic_multiplier(grid, mass, hbar, 0.5 * dt)
                                    : detail::kinetic_multiplier(grid, mass, hbar, dt);

    // Pointwise potential phase; for time-independent potentials compute once.
    const bool time_dependent = std::holds_alternative<CustomPotential>(ham.potential);
    wave pot_phase;
    auto build_pot_phase = [&](double t_mid) {
        pot_phase.resize(grid.n);
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double v = ham.channel_potential(mass, grid.x(j), t_mid);
            pot_phase[j] = std::exp(complexd(0.0, -v * dt / hbar));
        }
    };
    if (with_potential && !time_dependent) build_pot_phase(channel.t);

    const complexd rest_phase =
        ham.rest_energy
            ? std::exp(complexd(0.0, -mass * ham.constants.c * ham.constants.c * dt / hbar))
            : complexd{1.0, 0.0};

    wave& psi = channel.psi;
    for (std::size_t step = 0; step < steps; ++step) {
        fft::forward(psi);
        for (std::size_t j = 0; j < grid.n; ++j) psi[j] *= kin[j];
        fft::inverse(psi);
        if (with_potential) {
            if (time_dependent) build_pot_phase(channel.t + 0.5 * dt);
            for (std::size_t j = 0; j < grid.n; ++j) psi[j] *= pot_phase[j];
            fft::forward(psi);
            for (std::size_t j = 0; j < grid.n; ++j) psi[j] *= kin[j];
            fft::inverse(psi);
        }
        if (ham.rest_energy)
            for (auto& z : psi) z *= rest_phase;
        channel.t += dt;
        require_in_box(psi, grid, "split_step_evolve", step);
    }
    return channel;
}

/// Channel-wise evolution of a superposition. For a single channel with
/// rest_energy off this is by construction identical to split_step_evolve.
inline SuperpositionState extended_evolve(SuperpositionState state, const HamiltonianSpec& ham,
                                          double dt, std::size_t steps) {
    for (auto& ch : state.channels) ch = split_step_evolve(std::move(ch), ham, dt, steps);
    return state;
}

/// Records num_snapshots+... snapshots of a channel-wise evolution: snapshot
/// 0 is the initial state, then one every `stride` steps until `steps`.
/// `steps` must be a multiple of `stride`.
inline Trajectory<SuperpositionState> evolve_trajectory(const SuperpositionState& initial,
                                                        const HamiltonianSpec& ham, double dt,
                                                        std::size_t steps, std::size_t stride) {
    if (stride == 0 || steps % stride != 0)
        throw invalid_parameter("evolve_trajectory: steps must be a positive multiple of stride");
    Trajectory<SuperpositionState> traj;
    traj.times.reserve(steps / stride + 1);
    traj.snapshots.reserve(steps / stride + 1);
    traj.times.push_back(initial.t());
    traj.snapshots.push_back(initial);
    SuperpositionState current = initial;
    for (std::size_t done = 0; done < steps; done += stride) {
        current = extended_evolve(std::move(current), ham, dt, stride);
        traj.times.push_back(current.t());
        traj.snapshots.push_back(current);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Reciprocal mass operator
// ---------------------------------------------------------------------------

/// Multiplies each mass component by the reciprocal-mass factor i*hbar/m
/// (the inverse of d/ds on the channel kernel, so d/ds composed with this
/// map is the identity). Requires a vanishing zero-mass component.
inline ExtendedField inverse_s_derivative(const ExtendedField& f, const Constants& k) {
    k.validate();
    const std::size_t n = f.grid.n;
    wave spec = s_spectrum(f);

    double zero_mass = 0.0;
    for (std::size_t ix = 0; ix < n; ++ix) zero_mass += std::norm(spec[ix]);
    zero_mass = std::sqrt(zero_mass * f.grid.spacing());
    const double total = norm(f);
    if (zero_mass > 1e-12 * std::max(total, 1e-300))
        throw non_convergent_state(
            "inverse_s_derivative: zero-mass component norm " + std::to_string(zero_mass) +
            " exceeds 1e-12 of the field norm");

    for (std::size_t kk = 1; kk < f.sgrid.n_s; ++kk) {
        const double m = f.sgrid.mass(kk, k.hbar);
        const complexd factor{0.0, k.hbar / m};  // i*hbar/m
        for (std::size_t ix = 0; ix < n; ++ix) spec[kk * n + ix] *= factor;
    }
    for (std::size_t ix = 0; ix < n; ++ix) spec[ix] = complexd{0.0, 0.0};
    return field_from_s_spectrum(std::move(spec), f.grid, f.sgrid, f.t);
}

/// d/ds by Fourier multiplier -i m_k / hbar on each mass component.
inline ExtendedField s_derivative(const ExtendedField& f, const Constants& k) {
    k.validate();
    const std::size_t n = f.grid.n;
    wave spec = s_spectrum(f);
    for (std::size_t kk = 0; kk < f.sgrid.n_s; ++kk) {
        const complexd factor{0.0, -f.sgrid.mass(kk, k.hbar) / k.hbar};
        for (std::size_t ix = 0; ix < n; ++ix) spec[kk * n + ix] *= factor;
    }
    return field_from_s_spectrum(std::move(spec), f.grid, f.sgrid, f.t);
}

// ---------------------------------------------------------------------------
// Hamiltonian application (used by the residual checks)
// ---------------------------------------------------------------------------

/// H psi for one channel: (m c^2 if rest) psi - hbar^2/2m psi'' + V_m psi,
/// with the potential sampled at the channel's own time stamp.
inline wave apply_hamiltonian(const MassChannel& ch, const HamiltonianSpec& ham) {
    ham.validate();
    const double hbar = ham.constants.hbar;
    wave h = spectral_derivative(ch.psi, ch.grid, 2);
    const double kin = -hbar * hbar / (2.0 * ch.mass);
    const double rest =
        ham.rest_energy ? ch.mass * ham.constants.c * ham.constants.c : 0.0;
    for (std::size_t j = 0; j < ch.grid.n; ++j) {
        h[j] *= kin;
        h[j] += (rest + ham.channel_potential(ch.mass, ch.grid.x(j), ch.t)) * ch.psi[j];
    }
    return h;
}

inline SuperpositionState apply_hamiltonian(const SuperpositionState& state,
                                            const HamiltonianSpec& ham) {
    SuperpositionState out = state;
    for (auto& ch : out.channels) ch.psi = apply_hamiltonian(ch, ham);
    return out;
}

/// The generalized-equation right-hand side on an extended field, applied
/// mass-component-wise: (m c^2 if rest) - hbar^2/2m d^2/dx^2 + V(x, t).
/// The kinetic term needs reciprocal masses, so the zero-mass component must
/// vanish.
inline ExtendedField apply_hamiltonian(const ExtendedField& f, const HamiltonianSpec& ham) {
    ham.validate();
    const std::size_t n = f.grid.n;
    const double hbar = ham.constants.hbar;
    wave spec = s_spectrum(f);

    double zero_mass = 0.0;
    for (std::size_t ix = 0; ix < n; ++ix) zero_mass += std::norm(spec[ix]);
    zero_mass = std::sqrt(zero_mass * f.grid.spacing());
    if (zero_mass > 1e-12 * std::max(norm(f), 1e-300))
        throw non_convergent_state(
            "apply_hamiltonian: extended field has a zero-mass component");

    wave row(n);
    for (std::size_t kk = 1; kk < f.sgrid.n_s; ++kk) {
        const double m = f.sgrid.mass(kk, hbar);
        std::copy(spec.begin() + kk * n, spec.begin() + (kk + 1) * n, row.begin());
        wave d2 = spectral_derivative(row, f.grid, 2);
        const double kin = -hbar * hbar / (2.0 * m);
        const double rest = ham.rest_energy ? m * ham.constants.c * ham.constants.c : 0.0;
        for (std::size_t ix = 0; ix < n; ++ix) {
            spec[kk * n + ix] = kin * d2[ix] +
                                (rest + ham.channel_potential(m, f.grid.x(ix), f.t)) * row[ix];
        }
    }
    return field_from_s_spectrum(std::move(spec), f.grid, f.sgrid, f.t);
}

}  // namespace masslab
