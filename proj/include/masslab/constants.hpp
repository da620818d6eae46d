#pragma once

#include <cmath>
#include <limits>

#include "masslab/errors.hpp"

namespace masslab {

/// Physical constants in force for a computation.
///
/// `c = infinity` is a sentinel meaning "strictly Galilean": rest-energy
/// terms are disabled and relativistic loop displacements vanish.
///
/// Sign conventions (single authoritative site; every phase formula in the
/// library is derived from these):
///
///  * Channel kernel. An extended field decomposes over mass channels as
///        Psi(x, s) = sum_m exp(-i m s / hbar) psi_m(x),
///    so the mass operator i*hbar*d/ds has eigenvalue +m on channel m.
///    Admissible masses are the positive points of the conjugate lattice
///    m_k = 2*pi*hbar*k / L_s.
///
///  * Boost (velocity v). Coordinates map as x' = x + v t, t' = t.  Channel
///    wavefunctions pick up the phase evaluated at the source point x:
///        psi'_m(x') = exp(+i m (v x + v^2 t / 2) / hbar) psi_m(x),
///    with x = x' - v t.  In the boosted coordinate this multiplier reads
///    exp(+i m (v x' - v^2 t / 2) / hbar); the combination is fixed by
///    requiring boosted free solutions to satisfy the free equation.
///    The matching s-coordinate shift of the extended field is
///    s' = s + v x + v^2 t / 2.
///
///  * Uniform acceleration (g). Coordinates map as x~ = x - g t^2 / 2,
///    t~ = t.  The covariant channel phase is
///        psi~_m(x~) = exp(-i m (g t x~ + g^2 t^3 / 6) / hbar) psi_m(x),
///    with x = x~ + g t^2 / 2 (the `t3_minus` convention; the competing
///    `t3_plus` convention flips the cubic term and is rejected by the
///    equivalence-principle residual checks in the verify module).  The
///    matching s-shift is s~ = s - g t x + g^2 t^3 / 3.
///
///  * Event bookkeeping (frames::transform_event) uses the coordinate-map
///    convention s' = s - v x - v^2 t / 2 for boosts; see frames.hpp.
struct Constants {
    double hbar = 1.0;
    double c = std::numeric_limits<double>::infinity();

    bool galilean() const { return std::isinf(c); }

    void validate() const {
        if (!(hbar > 0.0)) throw invalid_parameter("Constants: hbar must be > 0");
        if (!(c > 0.0)) throw invalid_parameter("Constants: c must be > 0 (or infinity)");
    }
};

}  // namespace masslab
