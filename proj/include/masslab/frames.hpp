#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "masslab/spectral.hpp"
#include "masslab/state.hpp"

namespace masslab {

// ---------------------------------------------------------------------------
// Events and coordinate maps
// ---------------------------------------------------------------------------

struct Event {
    double x = 0.0;
    double t = 0.0;
    std::optional<double> s;
};

struct Translation {
    double a = 0.0;
};
struct Boost {
    double v = 0.0;
};
struct Acceleration {
    double g = 0.0;
};

/// Tagged frame change; composed sequences apply left to right.
struct FrameTransform {
    using Step = std::variant<Translation, Boost, Acceleration>;
    std::vector<Step> steps;
    Constants constants;

    static FrameTransform translation(double a, Constants k = {}) {
        return FrameTransform{{Translation{a}}, k};
    }
    static FrameTransform boost(double v, Constants k = {}) {
        return FrameTransform{{Boost{v}}, k};
    }
    static FrameTransform acceleration(double g, Constants k = {}) {
        return FrameTransform{{Acceleration{g}}, k};
    }
    static FrameTransform composed(std::vector<Step> seq, Constants k = {}) {
        return FrameTransform{std::move(seq), k};
    }

    void validate() const {
        constants.validate();
        if (steps.empty()) throw invalid_parameter("FrameTransform: empty sequence");
        for (const auto& st : steps) {
            const bool ok = std::visit(
                [](const auto& p) {
                    using T = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, Translation>) return std::isfinite(p.a);
                    else if constexpr (std::is_same_v<T, Boost>) return std::isfinite(p.v);
                    else return std::isfinite(p.g);
                },
                st);
            if (!ok) throw invalid_parameter("FrameTransform: non-finite parameter");
        }
    }
};

/// Coordinate action of a frame change on an event.
///
/// The optional s-component follows the coordinate-map convention
///   boost:        s' = s - v x - v^2 t / 2
///   acceleration: s' = s - g t x + g^2 t^3 / 3
///   translation:  s' = s
/// with x, t the pre-transform coordinates. Field transformations derive
/// their channel phases from the covariance-resolved convention documented
/// in constants.hpp; the two differ by the overall sign of the boost shift.
inline Event transform_event(Event e, const FrameTransform& f) {
    f.validate();
    for (const auto& st : f.steps) {
        std::visit(
            [&e](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Translation>) {
                    e.x += p.a;
                } else if constexpr (std::is_same_v<T, Boost>) {
                    if (e.s) *e.s -= p.v * e.x + 0.5 * p.v * p.v * e.t;
                    e.x += p.v * e.t;
                } else {
                    if (e.s)
                        *e.s -= p.g * e.t * e.x - p.g * p.g * e.t * e.t * e.t / 3.0;
                    e.x -= 0.5 * p.g * e.t * e.t;
                }
            },
            st);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Phase rules
// ---------------------------------------------------------------------------

/// Boost phase function f_v(x', t') = v x' + v^2 t' / 2. Wavefunctions obey
/// psi'_m(x') = exp(+i m f_v(x, t) / hbar) psi_m(x) with the phase evaluated
/// at the source point x = x' - v t (see constants.hpp).
inline double boost_phase(double v, double xp, double tp) {
    return v * xp + 0.5 * v * v * tp;
}

/// Accelerated-frame phase function f~_g(x~, t~) = -g t~ x~ + g^2 t~^3 / 6.
inline double accel_phase(double g, double xt, double tt) {
    return -g * tt * xt + g * g * tt * tt * tt / 6.0;
}

// ---------------------------------------------------------------------------
// Unitary frame representations on states
// ---------------------------------------------------------------------------

/// Pure spatial translation: every channel psi(x) -> psi(x - a).
inline SuperpositionState translate_state(const SuperpositionState& state, double a) {
    SuperpositionState out = state;
    for (auto& ch : out.channels) {
        ch.psi = spectral_shift(ch.psi, ch.grid, a);
        require_in_box(ch.psi, ch.grid, "translate_state");
    }
    return out;
}

/// Galilean boost at the state's time stamp t:
///   psi'_m(x) = exp(+i m boost_phase(v, x - v t, t) / hbar) psi_m(x - v t).
/// Unitary; the modulus at mapped points is unchanged.
inline SuperpositionState apply_boost(const SuperpositionState& state, double v,
                                      const Constants& k) {
    k.validate();
    if (!std::isfinite(v)) throw invalid_parameter("apply_boost: v must be finite");
    SuperpositionState out = state;
    const double t = state.t();
    for (auto& ch : out.channels) {
        wave shifted = spectral_shift(ch.psi, ch.grid, v * t);
        const double scale = ch.mass / k.hbar;
        for (std::size_t j = 0; j < ch.grid.n; ++j) {
            const double source_x = ch.grid.x(j) - v * t;
            shifted[j] *= std::exp(complexd(0.0, scale * boost_phase(v, source_x, t)));
        }
        require_in_box(shifted, ch.grid, "apply_boost");
        ch.psi = std::move(shifted);
    }
    return out;
}

/// The four-leg loop T_a, then B_v, then T_{-a}, then B_{-v}, applied by
/// explicit composition at the state's fixed time stamp. On channel m the
/// result is exp(+i m a v / hbar) times the input.
inline SuperpositionState bargmann_loop_galileo(const SuperpositionState& state, double a,
                                                double v, const Constants& k) {
    SuperpositionState cur = translate_state(state, a);
    cur = apply_boost(cur, v, k);
    cur = translate_state(cur, -a);
    cur = apply_boost(cur, -v, k);
    return cur;
}

/// The same loop in the extended representation: a translation of the field
/// in s, Psi'(x, s) = Psi(x, s - a v), realized as the mass-component phase
/// exp(+i m_k a v / hbar). Agrees channel-wise with bargmann_loop_galileo.
inline ExtendedField bargmann_loop_extended(const ExtendedField& f, double a, double v,
                                            const Constants& k) {
    k.validate();
    const std::size_t n = f.grid.n;
    wave spec = s_spectrum(f);
    for (std::size_t kk = 0; kk < f.sgrid.n_s; ++kk) {
        const double m = f.sgrid.mass(kk, k.hbar);
        const complexd phase = std::exp(complexd(0.0, m * a * v / k.hbar));
        for (std::size_t ix = 0; ix < n; ++ix) spec[kk * n + ix] *= phase;
    }
    return field_from_s_spectrum(std::move(spec), f.grid, f.sgrid, f.t);
}

// ---------------------------------------------------------------------------
// Relativistic loop, to leading order in 1/c^2
// ---------------------------------------------------------------------------

struct PoincareLoopDisplacement {
    double dx = 0.0;
    double dt = 0.0;
};

/// Displacement of the origin event under the boost/translation loop in the
/// relativistic setting: (v a v / 2c^2, v a / c^2). The c = infinity
/// sentinel returns (0, 0).
inline PoincareLoopDisplacement poincare_loop_coords(double v, double a, double c) {
    if (std::isinf(c)) return {0.0, 0.0};
    if (!(c > 0.0)) throw invalid_parameter("poincare_loop_coords: c must be > 0");
    const double va = v * a;
    return {0.5 * va * v / (c * c), va / (c * c)};
}

struct PoincareLoopPhase {
    double phase = 0.0;      // total loop phase on a momentum eigenstate
    double mass_term = 0.0;  // m v a / hbar, the c-independent part
    double correction = 0.0; // phase - mass_term, scales as 1/c^2
    bool regime_warning = false;  // |p| >= 0.1 m c: outside the working order
};

/// Loop phase H v a / (hbar c^2) + (v a)(v p) / (2 hbar c^2) on a momentum
/// eigenstate, with H = m c^2 + p^2 / 2m. For p = 0 this is exactly
/// m v a / hbar, independent of c; the finite-c remainder scales as c^-2.
inline PoincareLoopPhase poincare_loop_phase(double m, double p, double v, double a,
                                             double c, double hbar) {
    if (!(m > 0.0)) throw invalid_parameter("poincare_loop_phase: m must be > 0");
    if (!(hbar > 0.0)) throw invalid_parameter("poincare_loop_phase: hbar must be > 0");
    PoincareLoopPhase out;
    out.mass_term = m * v * a / hbar;
    if (std::isinf(c)) {
        out.phase = out.mass_term;
        out.correction = 0.0;
        return out;
    }
    if (!(c > 0.0)) throw invalid_parameter("poincare_loop_phase: c must be > 0");
    out.regime_warning = std::abs(p) >= 0.1 * m * c;
    const double va = v * a;
    const double h_energy = m * c * c + p * p / (2.0 * m);
    out.phase = h_energy * va / (hbar * c * c) + va * v * p / (2.0 * hbar * c * c);
    out.correction = out.phase - out.mass_term;
    return out;
}

}  // namespace masslab
