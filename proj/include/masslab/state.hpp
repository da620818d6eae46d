#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "masslab/constants.hpp"
#include "masslab/errors.hpp"
#include "masslab/fft.hpp"
#include "masslab/grid.hpp"

namespace masslab {

using complexd = std::complex<double>;
using wave = std::vector<complexd>;

/// One definite-mass wavefunction sampled on a spatial grid.
struct MassChannel {
    double mass = 1.0;  // > 0
    double t = 0.0;
    SpatialGrid grid;
    wave psi;
};

/// A finite superposition of definite-mass channels sharing one grid and one
/// time stamp. Distinct masses span orthogonal sectors: the total squared
/// norm is the sum of the channel squared norms.
struct SuperpositionState {
    std::vector<MassChannel> channels;  // strictly increasing mass

    const SpatialGrid& grid() const { return channels.front().grid; }
    double t() const { return channels.front().t; }
    std::size_t size() const { return channels.size(); }

    std::vector<double> masses() const {
        std::vector<double> ms(channels.size());
        for (std::size_t i = 0; i < channels.size(); ++i) ms[i] = channels[i].mass;
        return ms;
    }
};

/// Complex field on the product grid (x-grid) x (s-grid) at fixed t.
/// Layout: field[is * grid.n + ix].
struct ExtendedField {
    SpatialGrid grid;
    SGrid sgrid;
    double t = 0.0;
    wave field;

    complexd& at(std::size_t ix, std::size_t is) { return field[is * grid.n + ix]; }
    complexd at(std::size_t ix, std::size_t is) const { return field[is * grid.n + ix]; }
};

// ---------------------------------------------------------------------------
// Norms and inner products (grid quadrature)
// ---------------------------------------------------------------------------

inline complexd inner(const wave& a, const wave& b, const SpatialGrid& g) {
    complexd acc{0.0, 0.0};
    for (std::size_t j = 0; j < g.n; ++j) acc += std::conj(a[j]) * b[j];
    return acc * g.spacing();
}

inline double norm(const wave& a, const SpatialGrid& g) {
    double acc = 0.0;
    for (const auto& z : a) acc += std::norm(z);
    return std::sqrt(acc * g.spacing());
}

inline double norm(const MassChannel& ch) { return norm(ch.psi, ch.grid); }

inline double norm(const SuperpositionState& state) {
    double acc = 0.0;
    for (const auto& ch : state.channels) {
        const double nc = norm(ch);
        acc += nc * nc;
    }
    return std::sqrt(acc);
}

/// Field norm with the s-direction weighted by 1/n_s. This weight makes the
/// mass-sector decomposition an isometry: the squared field norm equals the
/// sum over mass components of their spatial squared norms.
inline double norm(const ExtendedField& f) {
    double acc = 0.0;
    for (const auto& z : f.field) acc += std::norm(z);
    return std::sqrt(acc * f.grid.spacing() / static_cast<double>(f.sgrid.n_s));
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Validates channel compatibility, orders channels by mass, rejects
/// duplicate or non-positive masses.
inline SuperpositionState make_superposition(std::vector<MassChannel> channels) {
    if (channels.empty())
        throw invalid_parameter("SuperpositionState: needs at least one channel");
    for (const auto& ch : channels) {
        if (!(ch.mass > 0.0) || !std::isfinite(ch.mass))
            throw invalid_parameter("MassChannel: mass must be finite and > 0");
        if (ch.psi.size() != ch.grid.n)
            throw invalid_parameter("MassChannel: sample count does not match grid");
        if (!std::isfinite(norm(ch)))
            throw invalid_parameter("MassChannel: non-finite L2 norm");
    }
    for (std::size_t i = 1; i < channels.size(); ++i) {
        if (!(channels[i].grid == channels[0].grid))
            throw incompatible_states("SuperpositionState: channels must share one grid");
        if (channels[i].t != channels[0].t)
            throw incompatible_states("SuperpositionState: channels must share one time stamp");
    }
    std::sort(channels.begin(), channels.end(),
              [](const MassChannel& a, const MassChannel& b) { return a.mass < b.mass; });
    for (std::size_t i = 1; i < channels.size(); ++i)
        if (channels[i].mass == channels[i - 1].mass)
            throw invalid_parameter("SuperpositionState: masses must be pairwise distinct");
    return SuperpositionState{std::move(channels)};
}

/// Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i k0 x), unit L2
/// norm on the grid. Keeping the tails inside the box is the caller's job.
inline wave gaussian_packet(const SpatialGrid& grid, double x0, double k0, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw invalid_parameter("gaussian_packet: sigma must be finite and > 0");
    wave psi(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double u = (x - x0) / (2.0 * sigma);
        psi[j] = std::exp(complexd(-u * u, k0 * x));
    }
    const double nrm = norm(psi, grid);
    for (auto& z : psi) z /= nrm;
    return psi;
}

// ---------------------------------------------------------------------------
// Fidelity
// ---------------------------------------------------------------------------

/// |<a|b>|^2 with <a|b> summed channel-wise over the shared mass list
/// (cross-mass overlaps vanish by sector orthogonality). Both states are
/// expected to be unit-normalized.
inline double fidelity(const SuperpositionState& a, const SuperpositionState& b) {
    if (!(a.grid() == b.grid()))
        throw incompatible_states("fidelity: states live on different grids");
    if (a.size() != b.size())
        throw incompatible_states("fidelity: states carry different mass lists");
    complexd overlap{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.channels[i].mass != b.channels[i].mass)
            throw incompatible_states("fidelity: states carry different mass lists");
        overlap += inner(a.channels[i].psi, b.channels[i].psi, a.grid());
    }
    // quadrature roundoff can push |<a|b>|^2 a few ulp past 1
    return std::min(std::norm(overlap), 1.0);
}

// ---------------------------------------------------------------------------
// Channel <-> extended-field conversion
//
// Synthesis kernel (see Constants): Psi(x, s_j) = sum_k c_k(x) e^{-i m_k s_j /hbar}
// with m_k s_j / hbar = 2 pi k j / n_s, i.e. a forward DFT over the s axis.
// ---------------------------------------------------------------------------

/// Mass components c_k(x) of a field, layout spectrum[k * n + ix].
inline wave s_spectrum(const ExtendedField& f) {
    const std::size_t n = f.grid.n;
    const std::size_t ns = f.sgrid.n_s;
    wave spec(n * ns);
    wave col(ns);
    for (std::size_t ix = 0; ix < n; ++ix) {
        for (std::size_t j = 0; j < ns; ++j) col[j] = f.field[j * n + ix];
        fft::inverse(col);  // c_k = (1/n_s) sum_j field_j e^{+2 pi i k j / n_s}
        for (std::size_t k = 0; k < ns; ++k) spec[k * n + ix] = col[k];
    }
    return spec;
}

inline ExtendedField field_from_s_spectrum(wave spec, const SpatialGrid& grid,
                                           const SGrid& sgrid, double t) {
    const std::size_t n = grid.n;
    const std::size_t ns = sgrid.n_s;
    ExtendedField f{grid, sgrid, t, wave(n * ns)};
    wave col(ns);
    for (std::size_t ix = 0; ix < n; ++ix) {
        for (std::size_t k = 0; k < ns; ++k) col[k] = spec[k * n + ix];
        fft::forward(col);  // field_j = sum_k c_k e^{-2 pi i k j / n_s}
        for (std::size_t j = 0; j < ns; ++j) f.field[j * n + ix] = col[j];
    }
    return f;
}

/// Places each channel at its conjugate-lattice slot; every other mass
/// component of the result is zero. Throws lattice_mismatch for off-lattice
/// masses (no silent rounding).
inline ExtendedField channels_to_sfield(const SuperpositionState& state,
                                        const SGrid& sgrid, const Constants& k) {
    k.validate();
    const std::size_t n = state.grid().n;
    wave spec(n * sgrid.n_s, complexd{0.0, 0.0});
    for (const auto& ch : state.channels) {
        const std::size_t idx = sgrid.mass_index(ch.mass, k.hbar);
        std::copy(ch.psi.begin(), ch.psi.end(), spec.begin() + idx * n);
    }
    return field_from_s_spectrum(std::move(spec), state.grid(), sgrid, state.t());
}

struct SfieldProjection {
    SuperpositionState state;
    /// Norm left in the mass components that were not requested.
    double residual = 0.0;
};

/// Projects the requested lattice masses out of a field and reports the norm
/// remaining in all other components.
inline SfieldProjection sfield_to_channels(const ExtendedField& f,
                                           const std::vector<double>& masses,
                                           const Constants& k) {
    k.validate();
    if (masses.empty())
        throw invalid_parameter("sfield_to_channels: empty mass list");
    const std::size_t n = f.grid.n;
    const wave spec = s_spectrum(f);

    std::vector<bool> taken(f.sgrid.n_s, false);
    std::vector<MassChannel> channels;
    channels.reserve(masses.size());
    for (double m : masses) {
        const std::size_t idx = f.sgrid.mass_index(m, k.hbar);
        taken[idx] = true;
        MassChannel ch{m, f.t, f.grid, wave(spec.begin() + idx * n, spec.begin() + (idx + 1) * n)};
        channels.push_back(std::move(ch));
    }

    double leftover = 0.0;
    for (std::size_t kk = 0; kk < f.sgrid.n_s; ++kk) {
        if (taken[kk]) continue;
        for (std::size_t ix = 0; ix < n; ++ix) leftover += std::norm(spec[kk * n + ix]);
    }
    return SfieldProjection{make_superposition(std::move(channels)),
                            std::sqrt(leftover * f.grid.spacing())};
}

}  // namespace masslab
