#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "masslab/dynamics.hpp"
#include "masslab/state.hpp"

namespace masslab {

/// A named linear operator on extended fields (a generator realization or a
/// scaled/combined expected value for a commutator).
struct GeneratorSpec {
    std::string name;
    std::function<ExtendedField(const ExtendedField&)> apply;
};

// Grid realizations of the extended-algebra generators.

inline GeneratorSpec position_generator() {
    return {"X", [](const ExtendedField& f) {
                ExtendedField out = f;
                for (std::size_t is = 0; is < f.sgrid.n_s; ++is)
                    for (std::size_t ix = 0; ix < f.grid.n; ++ix)
                        out.at(ix, is) = f.grid.x(ix) * f.at(ix, is);
                return out;
            }};
}

inline GeneratorSpec momentum_generator(Constants k) {
    k.validate();
    return {"P", [k](const ExtendedField& f) {
                ExtendedField out = f;
                wave row(f.grid.n);
                for (std::size_t is = 0; is < f.sgrid.n_s; ++is) {
                    for (std::size_t ix = 0; ix < f.grid.n; ++ix) row[ix] = f.at(ix, is);
                    wave d = spectral_derivative(row, f.grid, 1);
                    for (std::size_t ix = 0; ix < f.grid.n; ++ix)
                        out.at(ix, is) = complexd(0.0, -k.hbar) * d[ix];
                }
                return out;
            }};
}

/// M = i hbar d/ds: multiplies mass component k by its lattice mass m_k.
inline GeneratorSpec mass_generator(Constants k) {
    k.validate();
    return {"M", [k](const ExtendedField& f) {
                wave spec = s_spectrum(f);
                const std::size_t n = f.grid.n;
                for (std::size_t kk = 0; kk < f.sgrid.n_s; ++kk) {
                    const double m = f.sgrid.mass(kk, k.hbar);
                    for (std::size_t ix = 0; ix < n; ++ix) spec[kk * n + ix] *= m;
                }
                return field_from_s_spectrum(std::move(spec), f.grid, f.sgrid, f.t);
            }};
}

/// Boost generator C = M X - t P at the field's own time stamp.
inline GeneratorSpec boost_generator(Constants k) {
    k.validate();
    GeneratorSpec X = position_generator();
    GeneratorSpec M = mass_generator(k);
    GeneratorSpec P = momentum_generator(k);
    return {"C", [X, M, P](const ExtendedField& f) {
                ExtendedField mx = M.apply(X.apply(f));
                ExtendedField tp = P.apply(f);
                for (std::size_t i = 0; i < mx.field.size(); ++i)
                    mx.field[i] -= f.t * tp.field[i];
                return mx;
            }};
}

/// Extended Hamiltonian H = M c^2 - (hbar^2/2) M^{-1} d^2/dx^2. Needs a
/// finite c and a vanishing zero-mass component.
inline GeneratorSpec hamiltonian_generator(Constants k) {
    k.validate();
    if (k.galilean())
        throw invalid_parameter("hamiltonian_generator: needs finite c");
    return {"H", [k](const ExtendedField& f) {
                HamiltonianSpec ham{k, true, NoPotential{}};
                return apply_hamiltonian(f, ham);
            }};
}

inline GeneratorSpec identity_generator() {
    return {"I", [](const ExtendedField& f) { return f; }};
}

inline GeneratorSpec zero_generator() {
    return {"0", [](const ExtendedField& f) {
                ExtendedField out = f;
                for (auto& z : out.field) z = complexd{0.0, 0.0};
                return out;
            }};
}

/// lambda * G, named for report lines.
inline GeneratorSpec scaled(complexd lambda, GeneratorSpec g, std::string name) {
    return {std::move(name), [lambda, g = std::move(g)](const ExtendedField& f) {
                ExtendedField out = g.apply(f);
                for (auto& z : out.field) z *= lambda;
                return out;
            }};
}

/// Max over probes of ||(A B - B A - expected) probe|| / ||probe||.
/// Probes must have nonzero norm.
inline double commutator_check(const GeneratorSpec& A, const GeneratorSpec& B,
                               const GeneratorSpec& expected,
                               std::span<const ExtendedField> probes) {
    if (probes.empty()) throw invalid_parameter("commutator_check: no probes");
    double worst = 0.0;
    for (const auto& p : probes) {
        const double pn = norm(p);
        if (!(pn > 0.0)) throw invalid_parameter("commutator_check: probe with zero norm");
        ExtendedField ab = A.apply(B.apply(p));
        const ExtendedField ba = B.apply(A.apply(p));
        const ExtendedField ex = expected.apply(p);
        for (std::size_t i = 0; i < ab.field.size(); ++i)
            ab.field[i] -= ba.field[i] + ex.field[i];
        worst = std::max(worst, norm(ab) / pn);
    }
    return worst;
}

}  // namespace masslab
