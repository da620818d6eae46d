#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include "masslab/state.hpp"

namespace masslab {

/// Derivative by Fourier multiplier (ik)^order on the periodic grid.
/// Order 1 zeroes the Nyquist bin (its sign is not defined for complex
/// signals); order 2 uses -k^2 including Nyquist.
inline wave spectral_derivative(const wave& w, const SpatialGrid& grid, int order) {
    if (order != 1 && order != 2)
        throw invalid_parameter("spectral_derivative: order must be 1 or 2");
    if (w.size() != grid.n)
        throw invalid_parameter("spectral_derivative: sample count does not match grid");
    wave out = w;
    fft::forward(out);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double k = grid.wavenumber(j);
        if (order == 1) {
            out[j] *= (j == grid.n / 2) ? complexd{0.0, 0.0} : complexd{0.0, k};
        } else {
            out[j] *= -k * k;
        }
    }
    fft::inverse(out);
    return out;
}

/// psi(x - delta) by the spectral phase multiplier e^{-i k delta}; exact for
/// band-limited periodic data.
inline wave spectral_shift(const wave& w, const SpatialGrid& grid, double delta) {
    if (w.size() != grid.n)
        throw invalid_parameter("spectral_shift: sample count does not match grid");
    if (delta == 0.0) return w;
    wave out = w;
    fft::forward(out);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double k = grid.wavenumber(j);
        out[j] *= std::exp(complexd(0.0, -k * delta));
    }
    fft::inverse(out);
    return out;
}

// ---------------------------------------------------------------------------
// Grid-quadrature observables
// ---------------------------------------------------------------------------

inline double mean_position(const wave& w, const SpatialGrid& grid) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double p = std::norm(w[j]);
        num += grid.x(j) * p;
        den += p;
    }
    return num / den;
}

inline double position_variance(const wave& w, const SpatialGrid& grid) {
    const double xc = mean_position(w, grid);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double p = std::norm(w[j]);
        const double d = grid.x(j) - xc;
        num += d * d * p;
        den += p;
    }
    return num / den;
}

/// Spectrum-weighted mean wavenumber.
inline double mean_wavenumber(const wave& w, const SpatialGrid& grid) {
    wave spec = w;
    fft::forward(spec);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double p = std::norm(spec[j]);
        num += grid.wavenumber(j) * p;
        den += p;
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Boundary guard
// ---------------------------------------------------------------------------

/// Number of guard cells on each side of the box used for tail detection.
inline std::size_t boundary_margin_cells(const SpatialGrid& grid) {
    return std::max<std::size_t>(grid.n / 16, 1);
}

/// Relative L2 norm living in the boundary margin. Zero-norm input reports 0.
inline double boundary_tail_fraction(const wave& w, const SpatialGrid& grid) {
    const std::size_t margin = boundary_margin_cells(grid);
    double tail = 0.0, total = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double p = std::norm(w[j]);
        total += p;
        if (j < margin || j >= grid.n - margin) tail += p;
    }
    if (total == 0.0) return 0.0;
    return std::sqrt(tail / total);
}

/// Default threshold for the boundary guard; covariance checks are
/// meaningless once wrap-around contaminates the state.
inline constexpr double kBoundaryTailThreshold = 1e-8;

inline void require_in_box(const wave& w, const SpatialGrid& grid,
                           const char* where, std::size_t step = 0) {
    const double f = boundary_tail_fraction(w, grid);
    if (f > kBoundaryTailThreshold)
        throw out_of_box(std::string(where) + ": boundary tail fraction " +
                             std::to_string(f) + " exceeds threshold",
                         step);
}

}  // namespace masslab
