#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "masslab/errors.hpp"

namespace masslab {

/// Uniform periodic spatial grid on the centered box [-L/2, L/2).
///
/// Point count is restricted to powers of two so every transform stays on
/// the fast radix path.
struct SpatialGrid {
    std::size_t n = 0;
    double length = 0.0;

    double spacing() const { return length / static_cast<double>(n); }

    double x(std::size_t j) const {
        return -0.5 * length + static_cast<double>(j) * spacing();
    }

    /// FFT-ordered wavenumber of bin j: k_j = 2*pi*f_j/L with
    /// f_j = j for j <= n/2 and f_j = j - n above.
    double wavenumber(std::size_t j) const {
        const double f = (j <= n / 2) ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n);
        return 2.0 * std::numbers::pi * f / length;
    }

    std::vector<double> points() const {
        std::vector<double> xs(n);
        for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
        return xs;
    }

    bool operator==(const SpatialGrid&) const = default;
};

inline SpatialGrid make_spatial_grid(std::size_t n, double length) {
    if (n < 2 || !std::has_single_bit(n))
        throw invalid_parameter("SpatialGrid: n must be a power of two >= 2");
    if (!(length > 0.0) || !std::isfinite(length))
        throw invalid_parameter("SpatialGrid: length must be finite and > 0");
    return SpatialGrid{n, length};
}

/// Uniform periodic grid in the auxiliary coordinate s, points s_j = j*L_s/n_s.
///
/// Its conjugate (mass) lattice is m_k = 2*pi*hbar*k / L_s for integer
/// k in [0, n_s); states carry strictly positive masses, so k >= 1.
struct SGrid {
    std::size_t n_s = 0;
    double length_s = 0.0;

    double spacing() const { return length_s / static_cast<double>(n_s); }

    double s(std::size_t j) const { return static_cast<double>(j) * spacing(); }

    double mass_spacing(double hbar) const {
        return 2.0 * std::numbers::pi * hbar / length_s;
    }

    double mass(std::size_t k, double hbar) const {
        return static_cast<double>(k) * mass_spacing(hbar);
    }

    /// Lattice index of `mass`, refusing silent rounding: the relative
    /// mismatch must be below 1e-9. Throws lattice_mismatch otherwise or
    /// when the index falls outside [1, n_s).
    std::size_t mass_index(double mass, double hbar) const;

    bool operator==(const SGrid&) const = default;
};

inline std::size_t SGrid::mass_index(double mass, double hbar) const {
    const double dm = mass_spacing(hbar);
    const double ratio = mass / dm;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio)))
        throw lattice_mismatch("mass " + std::to_string(mass) +
                               " is not on the conjugate lattice (spacing " +
                               std::to_string(dm) + ")");
    if (rounded < 1.0 || rounded >= static_cast<double>(n_s))
        throw lattice_mismatch("mass " + std::to_string(mass) +
                               " maps to lattice index " + std::to_string(rounded) +
                               " outside [1, n_s)");
    return static_cast<std::size_t>(rounded);
}

inline SGrid make_sgrid(std::size_t n_s, double length_s) {
    if (n_s < 2) throw invalid_parameter("SGrid: n_s must be >= 2");
    if (!(length_s > 0.0) || !std::isfinite(length_s))
        throw invalid_parameter("SGrid: length_s must be finite and > 0");
    return SGrid{n_s, length_s};
}

}  // namespace masslab
