#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "homodyne/fock_oracle.hpp"
#include "homodyne/moments.hpp"
#include "homodyne/network.hpp"
#include "homodyne/states.hpp"

using namespace homodyne;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(4321);
    return gen;
}

Complex random_complex(double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng()), u(rng())};
}

AffineMode random_mode(const std::vector<std::string>& labels, double scale = 1.0) {
    AffineMode::CoeffMap u, v;
    for (const auto& label : labels) {
        u[label] = random_complex(scale);
        v[label] = random_complex(scale);
    }
    return AffineMode(std::move(u), std::move(v), random_complex(scale));
}

}  // namespace

TEST_CASE("lo_for_scheme phase patterns") {
    const LoSpec base{Complex(2.0, 0.0), Complex(3.0, 0.0)};

    SECTION("b1/b1dag at theta = 0 gives real positive amplitudes") {
        const auto lo = lo_for_scheme(base, LoScheme::b1_b1dag, 0.0);
        CHECK(std::abs(lo.gamma_plus - Complex(2.0, 0.0)) < 1e-15);
        CHECK(std::abs(lo.gamma_minus - Complex(3.0, 0.0)) < 1e-15);
    }
    SECTION("b2/b2dag at theta = pi/2") {
        const auto lo = lo_for_scheme(base, LoScheme::b2_b2dag, M_PI / 2.0);
        CHECK(std::abs(lo.gamma_plus - Complex(0.0, 2.0)) < 1e-14);
        CHECK(std::abs(lo.gamma_minus - Complex(0.0, -3.0)) < 1e-14);
    }
    SECTION("b1/b2dag puts the lower sideband at i e^{-i theta}") {
        const auto lo = lo_for_scheme(base, LoScheme::b1_b2dag, 0.3);
        CHECK(std::abs(lo.gamma_plus - 2.0 * std::polar(1.0, 0.3)) < 1e-14);
        CHECK(std::abs(lo.gamma_minus - Complex(0.0, 1.0) * 3.0 * std::polar(1.0, -0.3)) < 1e-14);
    }
    SECTION("dbhd scheme sets equal phases") {
        const auto lo = lo_for_scheme(base, LoScheme::dbhd_theta, 1.1);
        CHECK(std::abs(std::arg(lo.gamma_plus) - 1.1) < 1e-14);
        CHECK(std::abs(std::arg(lo.gamma_minus) - 1.1) < 1e-14);
    }
    SECTION("vanishing LO rejected where a scheme needs it") {
        LoSpec dead{Complex(0.0, 0.0), Complex(1.0, 0.0)};
        CHECK_THROWS_AS(dead.require_nonvanishing(), std::invalid_argument);
    }
}

TEST_CASE("mean field") {
    InputStateSpec state;
    state.set_coherent("l", Complex(2.0, 1.0));

    CHECK(mean_field(AffineMode::annihilator("l"), state) == Complex(2.0, 1.0));
    CHECK(mean_field(AffineMode::annihilator("e"), state) == Complex(0.0, 0.0));

    SECTION("linearity through a beam splitter") {
        const auto b = AffineMode::annihilator("b").with_displacement(Complex(1.0, 0.0));
        const auto e = AffineMode::annihilator("e");
        const auto [o1, o2] = beam_splitter_map(0.5, b, e, BsConvention::split);
        // (b - e)/sqrt(2) with <b> = 1, vacuum e
        CHECK(std::abs(mean_field(o1, InputStateSpec{}) - Complex(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    }
    SECTION("creation coefficients pick up the conjugate amplitude") {
        const auto xd = AffineMode::creator("l");
        CHECK(mean_field(xd, state) == Complex(2.0, -1.0));
    }
    SECTION("product-state property: means are linear in the amplitudes") {
        for (int k = 0; k < 20; ++k) {
            const auto x = random_mode({"p", "q"});
            const Complex gp = random_complex(), gq = random_complex();
            InputStateSpec s1, s2, sum;
            s1.set_coherent("p", gp);
            s2.set_coherent("q", gq);
            sum.set_coherent("p", gp).set_coherent("q", gq);
            const Complex d = x.displacement();
            CHECK(std::abs(mean_field(x, sum) -
                           (mean_field(x, s1) + mean_field(x, s2) - d)) < 1e-14);
        }
        // all amplitudes zero: every displacement-free port mode has mean 0
        const auto ports = propagate_pure(build_eight_port(0.37));
        for (const auto& [port, mode] : ports) {
            CHECK(mean_field(mode, InputStateSpec{}) == Complex(0.0, 0.0));
        }
    }
}

TEST_CASE("photon-number expectations") {
    SECTION("coherent mode") {
        InputStateSpec state;
        state.set_coherent("l", Complex(0.5, 0.0));
        const auto n = QuadObservable::photon_number(AffineMode::annihilator("l"));
        CHECK(std::abs(expect(n, state) - Complex(0.25, 0.0)) < 1e-15);
    }
    SECTION("pure creation coefficient counts the vacuum ordering term") {
        const auto n = QuadObservable::photon_number(AffineMode::creator("a"));
        CHECK(std::abs(expect(n, InputStateSpec{}) - Complex(1.0, 0.0)) < 1e-15);
    }
    SECTION("simple homodyne detector port") {
        // eta = 0.5, <b> = 1 (displacement), gamma = 2:
        // <n_co> = eta <n_b> + (1-eta)|gamma|^2 + sqrt(eta(1-eta)) <gamma^* b + gamma b^dag>
        //        = 0.5*1 + 0.5*4 + 0.5*(2*1*2) = 4.5, cross-checked by the Fock oracle
        const auto net = build_simple_homodyne(0.5);
        const auto ports = net.propagate(
            {{"b", AffineMode::annihilator("b").with_displacement(Complex(1.0, 0.0))},
             {"l_i", AffineMode::annihilator("l")}});
        InputStateSpec state;
        state.set_coherent("l", Complex(2.0, 0.0));
        const auto n = QuadObservable::photon_number(ports.at("PD"));
        CHECK(std::abs(expect(n, state) - Complex(4.5, 0.0)) < 1e-14);

        FockConfig cfg{30, {"b", "l"}};  // |gamma| = 2 needs headroom for the norm guard
        CHECK(std::abs(oracle_expect(n, state, cfg) - Complex(4.5, 0.0)) < 1e-8);
    }
    SECTION("linearity in the observable") {
        InputStateSpec state;
        state.set_coherent("m0", random_complex());
        const auto q1 = QuadObservable::photon_number(random_mode({"m0", "m1"}));
        const auto q2 = QuadObservable::photon_number(random_mode({"m0", "m1"}));
        const Complex alpha = random_complex(), beta = random_complex();
        const Complex lhs = expect(alpha * q1 + beta * q2, state);
        const Complex rhs = alpha * expect(q1, state) + beta * expect(q2, state);
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
    SECTION("self-adjoint observables have real expectations") {
        InputStateSpec state;
        state.set_coherent("m0", random_complex());
        for (int k = 0; k < 20; ++k) {
            QuadObservable q;
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            q.add_term(Complex(u(rng()), 0.0), random_mode({"m0", "m1"}));
            q.add_term(Complex(u(rng()), 0.0), random_mode({"m0", "m1"}));
            q.add_scalar(Complex(u(rng()), 0.0));
            REQUIRE(q.is_self_adjoint());
            CHECK(std::abs(expect(q, state).imag()) < 1e-13);
        }
    }
}

TEST_CASE("self-adjointness predicates") {
    const auto x = random_mode({"m0"});
    QuadObservable q;
    q.add_term(Complex(2.0, 0.0), x);
    CHECK(q.is_self_adjoint());
    q.add_scalar(Complex(0.0, 1.0));
    CHECK_FALSE(q.is_self_adjoint());
    QuadObservable anti;
    anti.add_term(Complex(0.0, -3.0), x);
    CHECK(anti.is_anti_self_adjoint());
    SECTION("duplicate terms merge before the check") {
        QuadObservable dup;
        dup.add_term(Complex(1.0, 0.5), x);
        dup.add_term(Complex(1.0, -0.5), x);
        CHECK(dup.is_self_adjoint());
    }
}

TEST_CASE("symmetrized correlator and noise psd") {
    SECTION("coherent shot noise") {
        InputStateSpec state;
        state.set_coherent("l", Complex(0.5, 0.0));
        const auto n = QuadObservable::photon_number(AffineMode::annihilator("l"));
        const auto r = symmetrized_correlator(n, n, state);
        CHECK(r.psd == Catch::Approx(0.25).margin(1e-14));            // delta coefficient = |gamma|^2
        CHECK(std::abs(r.product_part - Complex(0.0625, 0.0)) < 1e-14);
        CHECK(noise_psd(n, state) == Catch::Approx(0.5).margin(1e-14));  // S = 2 |gamma|^2

        FockConfig cfg{14, {"l"}};
        const Complex full = oracle_symmetrized(n, n, state, cfg);
        CHECK(std::abs(full - (r.product_part + Complex(r.psd, 0.0))) < 1e-8);
    }
    SECTION("different sectors decouple") {
        InputStateSpec state;
        state.set_coherent("l", Complex(0.5, 0.0));
        state.set_coherent("m", Complex(0.3, 0.1));
        const auto nl = QuadObservable::photon_number(AffineMode::annihilator("l"));
        const auto nm = QuadObservable::photon_number(AffineMode::annihilator("m"));
        const auto r = symmetrized_correlator(nl, nm, state);
        CHECK(r.psd == 0.0);
        CHECK(std::abs(r.product_part - expect(nl, state) * std::conj(expect(nm, state))) < 1e-14);
    }
    SECTION("scalar observable has no fluctuation") {
        const QuadObservable c(Complex(3.0, 0.0));
        CHECK(noise_psd(c, InputStateSpec{}) == 0.0);
    }
    SECTION("noise psd is displacement-offset invariant") {
        InputStateSpec state;
        state.set_coherent("m0", random_complex(0.7));
        for (int k = 0; k < 10; ++k) {
            QuadObservable q;
            q.add_term(random_complex(), random_mode({"m0", "m1"}));
            const double base = noise_psd(q, state);
            QuadObservable shifted = q;
            shifted.add_scalar(random_complex(5.0));
            CHECK(noise_psd(shifted, state) == Catch::Approx(base).margin(1e-12));
        }
    }
    SECTION("vacuum quadrature observable has unit spectral density") {
        // (b1 + b1^dag)/sqrt(2) encoded as a difference of displaced photon numbers
        const auto [b1, b2] = to_quadratures(AffineMode::annihilator("b+"),
                                             AffineMode::annihilator("b-"));
        const double c = 0.7;
        const double w = 1.0 / (2.0 * std::sqrt(2.0) * c);
        QuadObservable quad;
        quad.add_term(Complex(w, 0.0), b1 + AffineMode::constant(Complex(c, 0.0)));
        quad.add_term(Complex(-w, 0.0), b1 - AffineMode::constant(Complex(c, 0.0)));
        CHECK(noise_psd(quad, InputStateSpec{}) == Catch::Approx(1.0).margin(1e-13));
        CHECK(field_noise_psd(b1) == Catch::Approx(1.0).margin(1e-15));
        CHECK(field_noise_psd(b2) == Catch::Approx(1.0).margin(1e-15));

        FockConfig cfg{10, {"b+", "b-"}};
        const auto r = symmetrized_correlator(quad, quad, InputStateSpec{});
        CHECK(std::abs(oracle_symmetrized(quad, quad, InputStateSpec{}, cfg) -
                       (r.product_part + Complex(r.psd, 0.0))) < 1e-10);
    }
    SECTION("sector-checked variants reject stray modes") {
        SidebandSector sector(50.0);
        sector.add_mode("a+", Sideband::upper, SourceKind::main_input);
        sector.add_mode("a-", Sideband::lower, SourceKind::main_input);
        const auto inside = QuadObservable::photon_number(AffineMode::annihilator("a+"));
        const auto outside = QuadObservable::photon_number(AffineMode::annihilator("z"));
        CHECK_NOTHROW(noise_psd(inside, InputStateSpec{}, sector));
        CHECK_THROWS_AS(noise_psd(outside, InputStateSpec{}, sector), std::invalid_argument);
        SidebandSector other(60.0);
        other.add_mode("z", Sideband::upper, SourceKind::aux_vacuum);
        const auto r = symmetrized_correlator(inside, sector, outside, other, InputStateSpec{});
        CHECK(r.psd == 0.0);  // different sectors share no modes
        CHECK_THROWS_AS(symmetrized_correlator(outside, sector, inside, sector, InputStateSpec{}),
                        std::invalid_argument);
    }
    SECTION("noise psd is nonnegative on random observables") {
        InputStateSpec state;
        state.set_coherent("m0", random_complex(0.8));
        for (int k = 0; k < 30; ++k) {
            QuadObservable q;
            q.add_term(random_complex(), random_mode({"m0", "m1", "m2"}));
            q.add_term(random_complex(), random_mode({"m0", "m1"}));
            CHECK(noise_psd(q, state) >= -1e-13);
        }
    }
}
