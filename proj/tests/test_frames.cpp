#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "masslab/algebra.hpp"
#include "masslab/frames.hpp"
#include "masslab/runner.hpp"

using namespace masslab;

namespace {

const Constants kDefault{};

SuperpositionState two_mass_state(const SpatialGrid& grid, double m1, double m2,
                                  double k0 = 0.0, double t = 0.0) {
    wave psi = gaussian_packet(grid, 0.0, k0, 1.0);
    for (auto& z : psi) z *= 1.0 / std::sqrt(2.0);
    return make_superposition({MassChannel{m1, t, grid, psi}, MassChannel{m2, t, grid, psi}});
}

}  // namespace

TEST_CASE("transform_event") {
    SECTION("zero boost is the identity") {
        const Event e{1.5, 3.0, 0.25};
        const Event out = transform_event(e, FrameTransform::boost(0.0));
        CHECK(out.x == e.x);
        CHECK(out.t == e.t);
        CHECK(*out.s == *e.s);
    }
    SECTION("boost v=2 on (x=1, t=3, s=0)") {
        const Event out = transform_event(Event{1.0, 3.0, 0.0}, FrameTransform::boost(2.0));
        CHECK(out.x == Catch::Approx(7.0));
        CHECK(out.t == Catch::Approx(3.0));
        CHECK(*out.s == Catch::Approx(-8.0));
    }
    SECTION("acceleration g=1 on (x=2, t=2, s=0)") {
        const Event out =
            transform_event(Event{2.0, 2.0, 0.0}, FrameTransform::acceleration(1.0));
        CHECK(out.x == Catch::Approx(0.0));
        CHECK(out.t == Catch::Approx(2.0));
        CHECK(*out.s == Catch::Approx(-4.0 + 8.0 / 3.0));
    }
    SECTION("translations leave s untouched") {
        const Event out = transform_event(Event{1.0, 2.0, 0.5}, FrameTransform::translation(3.0));
        CHECK(out.x == Catch::Approx(4.0));
        CHECK(*out.s == 0.5);
    }
    SECTION("composed sequences apply left to right") {
        const auto f = FrameTransform::composed({Translation{1.0}, Boost{2.0}});
        const Event out = transform_event(Event{0.0, 1.0, {}}, f);
        CHECK(out.x == Catch::Approx(3.0));  // translate then boost
        CHECK_FALSE(out.s.has_value());
    }
    SECTION("empty composition rejected") {
        CHECK_THROWS_AS(transform_event(Event{}, FrameTransform::composed({})),
                        invalid_parameter);
    }
}

TEST_CASE("phase functions") {
    CHECK(boost_phase(0.0, 12.0, -3.0) == 0.0);
    CHECK(boost_phase(2.0, 3.0, 1.0) == Catch::Approx(8.0));
    CHECK(boost_phase(1.0, 0.0, 2.0) == Catch::Approx(1.0));
    CHECK(accel_phase(0.0, 5.0, 2.0) == 0.0);
    CHECK(accel_phase(1.0, 1.0, 1.0) == Catch::Approx(-5.0 / 6.0));
    CHECK(accel_phase(3.0, 7.0, 0.0) == 0.0);
}

TEST_CASE("apply_boost") {
    const SpatialGrid g = make_spatial_grid(1024, 40.0);
    SECTION("v=0 leaves the state unchanged") {
        const SuperpositionState s = two_mass_state(g, 1.0, 2.0);
        const SuperpositionState out = apply_boost(s, 0.0, kDefault);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                CHECK(std::abs(out.channels[i].psi[j] - s.channels[i].psi[j]) < 1e-14);
    }
    SECTION("norm preserved for any v") {
        const SuperpositionState s = two_mass_state(g, 1.0, 2.0, 1.0, 0.5);
        for (double v : {-1.5, 0.3, 2.0})
            CHECK(norm(apply_boost(s, v, kDefault)) == Catch::Approx(norm(s)).margin(1e-12));
    }
    SECTION("momentum shift m v / hbar") {
        const auto s = make_superposition(
            {MassChannel{1.0, 0.0, g, gaussian_packet(g, 0.0, 0.0, 1.0)}});
        const SuperpositionState out = apply_boost(s, 2.0, kDefault);
        CHECK(std::abs(mean_wavenumber(out.channels[0].psi, g) - 2.0) < 1e-8);
    }
    SECTION("modulus covariance at mapped points") {
        // at t != 0 the argument shift is v t; compare against the shifted input
        const double t = 0.75, v = 1.25;
        const auto s = make_superposition(
            {MassChannel{2.0, t, g, gaussian_packet(g, 0.0, 1.0, 1.0)}});
        const SuperpositionState out = apply_boost(s, v, kDefault);
        const wave shifted = spectral_shift(s.channels[0].psi, g, v * t);
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(std::abs(std::abs(out.channels[0].psi[j]) - std::abs(shifted[j])) < 1e-11);
    }
    SECTION("boost that pushes the packet into the boundary margin errors") {
        const auto s = make_superposition(
            {MassChannel{1.0, 1.0, g, gaussian_packet(g, 0.0, 0.0, 1.0)}});
        CHECK_THROWS_AS(apply_boost(s, 18.0, kDefault), out_of_box);
    }
}

TEST_CASE("bargmann loop, Galileo representation") {
    const SpatialGrid g = make_spatial_grid(512, 40.0);
    SECTION("a*v = 0 is the identity on every channel") {
        const SuperpositionState s = two_mass_state(g, 1.0, 3.0);
        for (auto [a, v] : {std::pair{0.0, 1.3}, std::pair{2.0, 0.0}}) {
            const SuperpositionState out = bargmann_loop_galileo(s, a, v, kDefault);
            for (std::size_t i = 0; i < s.size(); ++i)
                for (std::size_t j = 0; j < g.n; ++j)
                    CHECK(std::abs(out.channels[i].psi[j] - s.channels[i].psi[j]) < 1e-12);
        }
    }
    SECTION("m=1, a=pi, v=1: output is minus the input pointwise") {
        const auto s = make_superposition(
            {MassChannel{1.0, 0.0, g, gaussian_packet(g, 0.0, 0.5, 1.0)}});
        const SuperpositionState out = bargmann_loop_galileo(s, std::numbers::pi, 1.0, kDefault);
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(std::abs(out.channels[0].psi[j] + s.channels[0].psi[j]) < 1e-12);
    }
    SECTION("the loop phase is e^{i m a v / hbar} at a nonzero time stamp too") {
        const double t = 0.6, a = 1.1, v = 0.7, m = 2.0;
        const auto s = make_superposition(
            {MassChannel{m, t, g, gaussian_packet(g, 0.0, 0.5, 1.0)}});
        const SuperpositionState out = bargmann_loop_galileo(s, a, v, kDefault);
        const complexd expect = std::exp(complexd(0.0, m * a * v));
        for (std::size_t j = 0; j < g.n; ++j)
            CHECK(std::abs(out.channels[0].psi[j] - expect * s.channels[0].psi[j]) < 1e-11);
    }
    SECTION("equal weights, dm=2, a*v=pi/2: loop output orthogonal to input") {
        const SuperpositionState s = two_mass_state(g, 1.0, 3.0);
        const SuperpositionState out =
            bargmann_loop_galileo(s, std::numbers::pi / 2.0, 1.0, kDefault);
        CHECK(fidelity(s, out) == Catch::Approx(0.0).margin(1e-10));
    }
    SECTION("single-mass ray invariance") {
        const auto s = make_superposition(
            {MassChannel{1.7, 0.0, g, gaussian_packet(g, 0.0, 1.0, 1.0)}});
        const SuperpositionState out = bargmann_loop_galileo(s, 1.3, 0.9, kDefault);
        CHECK(fidelity(s, out) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("unitary") {
        const SuperpositionState s = two_mass_state(g, 1.0, 2.0, 1.0, 0.3);
        CHECK(norm(bargmann_loop_galileo(s, 2.0, 1.0, kDefault)) ==
              Catch::Approx(norm(s)).margin(1e-12));
    }
}

TEST_CASE("bargmann loop, extended representation") {
    const SpatialGrid g = make_spatial_grid(128, 40.0);
    const SGrid sg = make_sgrid(8, 2.0 * std::numbers::pi);  // mass spacing 1
    const SuperpositionState s = two_mass_state(g, 1.0, 3.0);
    const ExtendedField f = channels_to_sfield(s, sg, kDefault);

    SECTION("a*v = 0 is the identity") {
        const ExtendedField out = bargmann_loop_extended(f, 0.0, 1.0, kDefault);
        for (std::size_t i = 0; i < f.field.size(); ++i)
            CHECK(std::abs(out.field[i] - f.field[i]) < 1e-13);
    }
    SECTION("a*v equal to the full s-period is the identity") {
        const ExtendedField out = bargmann_loop_extended(f, sg.length_s, 1.0, kDefault);
        for (std::size_t i = 0; i < f.field.size(); ++i)
            CHECK(std::abs(out.field[i] - f.field[i]) < 1e-12);
    }
    SECTION("norm preserved and channel phases match the Galileo loop") {
        const double a = 0.83, v = 1.21;
        const ExtendedField out = bargmann_loop_extended(f, a, v, kDefault);
        CHECK(norm(out) == Catch::Approx(norm(f)).margin(1e-12));
        const auto channels = sfield_to_channels(out, {1.0, 3.0}, kDefault);
        const SuperpositionState direct = bargmann_loop_galileo(s, a, v, kDefault);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                CHECK(std::abs(channels.state.channels[i].psi[j] -
                               direct.channels[i].psi[j]) < 1e-12);
    }
    SECTION("the loop equals a translation of the field in s") {
        // Psi'(x, s) = Psi(x, s - a v): check at a one-step lattice shift
        const double av = sg.spacing();
        const ExtendedField out = bargmann_loop_extended(f, av, 1.0, kDefault);
        for (std::size_t is = 0; is < sg.n_s; ++is)
            for (std::size_t ix = 0; ix < g.n; ++ix)
                CHECK(std::abs(out.at(ix, is) - f.at(ix, (is + sg.n_s - 1) % sg.n_s)) < 1e-12);
    }
}

TEST_CASE("representation agreement on random lattice states") {
    // n = 256 keeps the boost multiplier of the heaviest mass band-limited
    const SpatialGrid g = make_spatial_grid(256, 40.0);
    const SGrid sg = make_sgrid(16, 2.0 * std::numbers::pi);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<MassChannel> channels;
        for (std::size_t k = 1; k <= 4; ++k) {
            wave psi = gaussian_packet(g, u(rng), u(rng), 1.0 + 0.2 * u(rng));
            const complexd coeff = complexd(u(rng), u(rng));
            for (auto& z : psi) z *= coeff;
            channels.push_back(MassChannel{static_cast<double>(k), 0.4, g, std::move(psi)});
        }
        const SuperpositionState state = make_superposition(std::move(channels));
        const double a = 0.9 + 0.3 * trial, v = 1.1;

        const ExtendedField looped =
            bargmann_loop_extended(channels_to_sfield(state, sg, kDefault), a, v, kDefault);
        const SuperpositionState via_field =
            sfield_to_channels(looped, state.masses(), kDefault).state;
        const SuperpositionState direct = bargmann_loop_galileo(state, a, v, kDefault);
        for (std::size_t i = 0; i < state.size(); ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                CHECK(std::abs(via_field.channels[i].psi[j] - direct.channels[i].psi[j]) <
                      1e-11);
    }
}

TEST_CASE("generator algebra") {
    const SpatialGrid g = make_spatial_grid(128, 40.0);
    const SGrid sg = make_sgrid(8, 2.0 * std::numbers::pi);
    const auto probes = make_probes(g, sg, kDefault, 6, 2024);
    const GeneratorSpec X = position_generator();
    const GeneratorSpec P = momentum_generator(kDefault);
    const GeneratorSpec M = mass_generator(kDefault);
    const GeneratorSpec C = boost_generator(kDefault);
    const complexd ih{0.0, 1.0};

    SECTION("[X,P] = i hbar") {
        CHECK(commutator_check(X, P, scaled(ih, identity_generator(), "ih*I"), probes) < 1e-10);
    }
    SECTION("[C,P] = i hbar M") {
        CHECK(commutator_check(C, P, scaled(ih, M, "ih*M"), probes) < 1e-10);
    }
    SECTION("[M,P] = 0 and [M,X] = 0") {
        CHECK(commutator_check(M, P, zero_generator(), probes) < 1e-12);
        CHECK(commutator_check(M, X, zero_generator(), probes) < 1e-12);
    }
    SECTION("M and P commute as Fourier multipliers on lattice states") {
        for (const auto& p : probes) {
            const ExtendedField mp = M.apply(P.apply(p));
            const ExtendedField pm = P.apply(M.apply(p));
            double worst = 0.0;
            for (std::size_t i = 0; i < mp.field.size(); ++i)
                worst = std::max(worst, std::abs(mp.field[i] - pm.field[i]));
            CHECK(worst < 1e-12);
        }
    }
    SECTION("extended hamiltonian needs finite c, acts on zero-mass-free probes") {
        Constants rel{1.0, 10.0};
        const GeneratorSpec H = hamiltonian_generator(rel);
        const ExtendedField hp = H.apply(probes[0]);
        CHECK(norm(hp) > 0.0);
        CHECK_THROWS_AS(hamiltonian_generator(kDefault), invalid_parameter);
    }
    SECTION("zero-norm probe rejected") {
        ExtendedField zero = probes[0];
        for (auto& z : zero.field) z = complexd{0.0, 0.0};
        std::vector<ExtendedField> bad{zero};
        CHECK_THROWS_AS(commutator_check(X, P, zero_generator(), bad), invalid_parameter);
    }
}

TEST_CASE("poincare loop coordinates") {
    SECTION("v=0 or a=0") {
        for (auto [v, a] : {std::pair{0.0, 2.0}, std::pair{1.0, 0.0}}) {
            const auto d = poincare_loop_coords(v, a, 10.0);
            CHECK(d.dx == 0.0);
            CHECK(d.dt == 0.0);
        }
    }
    SECTION("direct substitution at v=1, a=1, c=10") {
        const auto d = poincare_loop_coords(1.0, 1.0, 10.0);
        CHECK(d.dx == Catch::Approx(0.005).margin(1e-16));
        CHECK(d.dt == Catch::Approx(0.01).margin(1e-16));
    }
    SECTION("dt scales exactly as c^-2") {
        const auto d10 = poincare_loop_coords(1.3, 0.7, 10.0);
        const auto d100 = poincare_loop_coords(1.3, 0.7, 100.0);
        CHECK(d10.dt / d100.dt == Catch::Approx(100.0).margin(1e-10));
    }
    SECTION("galilean sentinel") {
        const auto d = poincare_loop_coords(1.0, 1.0, kDefault.c);
        CHECK(d.dx == 0.0);
        CHECK(d.dt == 0.0);
    }
}

TEST_CASE("poincare loop phase") {
    SECTION("p=0: phase is exactly m v a / hbar, independent of c") {
        for (double c : {10.0, 100.0, 1000.0}) {
            const auto ph = poincare_loop_phase(2.0, 0.0, 1.5, 0.8, c, 1.0);
            CHECK(ph.phase == Catch::Approx(2.0 * 1.5 * 0.8).margin(1e-15));
            CHECK(ph.correction == 0.0);
        }
    }
    SECTION("v=0 gives zero phase") {
        const auto ph = poincare_loop_phase(1.0, 0.5, 0.0, 2.0, 10.0, 1.0);
        CHECK(ph.phase == 0.0);
    }
    SECTION("correction scales as c^-2") {
        const double m = 1.0, p = 0.4, v = 1.0, a = 1.0;
        const auto c10 = poincare_loop_phase(m, p, v, a, 10.0, 1.0);
        const auto c20 = poincare_loop_phase(m, p, v, a, 20.0, 1.0);
        const auto c1000 = poincare_loop_phase(m, p, v, a, 1000.0, 1.0);
        CHECK(c10.correction / c20.correction == Catch::Approx(4.0).margin(1e-9));
        CHECK(c10.correction * 100.0 ==
              Catch::Approx(c1000.correction * 1000.0 * 1000.0).margin(1e-12));
    }
    SECTION("regime warning") {
        CHECK_FALSE(poincare_loop_phase(1.0, 0.1, 1.0, 1.0, 10.0, 1.0).regime_warning);
        CHECK(poincare_loop_phase(1.0, 2.0, 1.0, 1.0, 10.0, 1.0).regime_warning);
    }
}
