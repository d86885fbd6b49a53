#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "homodyne/fock_oracle.hpp"
#include "homodyne/readout.hpp"

using namespace homodyne;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(31415);
    return gen;
}

double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng());
}

Complex random_complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

}  // namespace

TEST_CASE("oracle basic values") {
    SECTION("coherent photon number") {
        InputStateSpec state;
        state.set_coherent("l", Complex(0.5, 0.0));
        const auto n = QuadObservable::photon_number(AffineMode::annihilator("l"));
        FockConfig cfg{14, {"l"}};
        CHECK(std::abs(oracle_expect(n, state, cfg) - Complex(0.25, 0.0)) < 1e-8);
    }
    SECTION("vacuum photon number is exactly zero") {
        const auto n = QuadObservable::photon_number(AffineMode::annihilator("l"));
        FockConfig cfg{8, {"l"}};
        CHECK(std::abs(oracle_expect(n, InputStateSpec{}, cfg)) < 1e-15);
    }
    SECTION("<a a^dag> = 1 from the canonical commutator") {
        const auto q = QuadObservable::photon_number(AffineMode::creator("a"));
        FockConfig cfg{10, {"a"}};
        CHECK(std::abs(oracle_expect(q, InputStateSpec{}, cfg) - Complex(1.0, 0.0)) < 1e-12);
    }
    SECTION("scalar observable") {
        const QuadObservable c(Complex(0.0, 2.0));
        FockConfig cfg{4, {"a"}};
        CHECK(std::abs(oracle_symmetrized(c, c, InputStateSpec{}, cfg) - Complex(4.0, 0.0)) < 1e-14);
    }
}

TEST_CASE("oracle guards") {
    SECTION("dimension guard") {
        FockConfig cfg{14, {"a", "b", "c", "d", "e", "f"}};  // 14^6 > 1e6
        CHECK_THROWS_AS(FockSpace(cfg, InputStateSpec{}), std::runtime_error);
    }
    SECTION("truncation norm guard") {
        InputStateSpec state;
        state.set_coherent("a", Complex(3.0, 0.0));  // |gamma|^2 = 9 at cutoff 6
        FockConfig cfg{6, {"a"}};
        CHECK_THROWS_AS(FockSpace(cfg, state), std::runtime_error);
    }
    SECTION("cutoff floor") {
        FockConfig cfg{1, {"a"}};
        CHECK_THROWS_AS(FockSpace(cfg, InputStateSpec{}), std::invalid_argument);
    }
    SECTION("mode coverage") {
        FockConfig cfg{6, {"a"}};
        FockSpace space(cfg, InputStateSpec{});
        const auto q = QuadObservable::photon_number(AffineMode::annihilator("zz"));
        CHECK_THROWS_AS(space.expect(q), std::invalid_argument);
    }
}

TEST_CASE("dense oracle matrices are Hermitian for self-adjoint observables") {
    InputStateSpec state;
    state.set_coherent("m0", Complex(0.4, 0.2));
    FockConfig cfg{8, {"m0", "m1"}};
    FockSpace space(cfg, state);
    for (int k = 0; k < 5; ++k) {
        QuadObservable q;
        AffineMode::CoeffMap u{{"m0", random_complex(1.0)}, {"m1", random_complex(1.0)}};
        AffineMode::CoeffMap v{{"m0", random_complex(1.0)}};
        q.add_term(Complex(uniform(-2.0, 2.0), 0.0), AffineMode(u, v, random_complex(1.0)));
        q.add_scalar(Complex(uniform(-1.0, 1.0), 0.0));
        REQUIRE(q.is_self_adjoint());
        const Eigen::MatrixXcd m = space.dense_matrix(q);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("dense guard on large spaces") {
        FockConfig big{14, {"a", "b", "c", "d"}};
        FockSpace space_big(big, InputStateSpec{});
        CHECK_THROWS_AS(space_big.dense_matrix(QuadObservable::photon_number(
                            AffineMode::annihilator("a"))),
                        std::runtime_error);
    }
}

TEST_CASE("matrix-free application matches the dense matrix") {
    InputStateSpec state;
    state.set_coherent("m0", Complex(0.3, -0.5));
    FockConfig cfg{10, {"m0", "m1"}};
    FockSpace space(cfg, state);
    QuadObservable q;
    q.add_term(random_complex(1.0),
               AffineMode({{"m0", random_complex(1.0)}}, {{"m1", random_complex(1.0)}},
                          random_complex(0.5)));
    const Eigen::MatrixXcd m = space.dense_matrix(q);
    const Eigen::VectorXcd direct = space.apply(q, space.state());
    const Eigen::VectorXcd via_matrix = m * space.state();
    CHECK((direct - via_matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("engine equivalence on randomized eight-port scenarios") {
    // the acceptance suite runs the full 50-scenario version at cutoff 14
    for (int k = 0; k < 6; ++k) {
        const double eta = uniform(0.15, 0.85);
        const double theta = uniform(0.0, 2.0 * M_PI);
        const double ag = uniform(0.3, 0.8);
        const Complex dp = random_complex(0.4), dm = random_complex(0.4);
        const LoSpec lo = lo_for_scheme(LoSpec{Complex(ag, 0.0), Complex(ag, 0.0)},
                                        LoScheme::dbhd_theta, theta);
        EightPortRig rig(AffineMode::annihilator("b+").with_displacement(dp),
                         AffineMode::annihilator("b-").with_displacement(dm), lo, eta);
        const auto state = rig.lo_state();
        FockOracle oracle({FockConfig{10, {"b+", "l+", "e+", "f+"}},
                           FockConfig{10, {"b-", "l-", "e-", "f-"}}},
                          state);

        const auto t_theta = rig.angle_readout();
        const auto est = rig.estimators(Sideband::upper).annihilation;
        for (const auto& q : {t_theta, est}) {
            CHECK(std::abs(expect(q, state) - oracle.expect(q)) < 1e-6);
            const auto engine = symmetrized_correlator(q, q, state);
            CHECK(std::abs(oracle.symmetrized(q, q) -
                           (engine.product_part + Complex(engine.psd, 0.0))) < 1e-6);
        }
    }
}

TEST_CASE("oracle handles the ponderomotive shear on one sideband") {
    // Kimble-type b+ couples a+ and a-: five modes in one group.
    const double kappa = 1.2, theta = 0.7, eta = 0.4;
    const auto ap = AffineMode::annihilator("a+");
    const auto am = AffineMode::annihilator("a-");
    auto [a1, a2] = to_quadratures(ap, am);
    AffineMode b1 = a1;
    AffineMode b2 = a2 - Complex(kappa, 0.0) * a1 + AffineMode::constant(Complex(0.2, 0.0));
    auto [bp, bm] = from_quadratures(b1, b2);

    const LoSpec lo = lo_for_scheme(LoSpec{Complex(0.6, 0.0), Complex(0.6, 0.0)},
                                    LoScheme::dbhd_theta, theta);
    EightPortRig rig(bp, bm, lo, eta);
    const auto state = rig.lo_state();
    const auto d1d2 = rig.readouts(Sideband::upper).d1d2;

    FockConfig cfg{8, {"a+", "a-", "l+", "e+", "f+"}};
    FockSpace space(cfg, state);
    CHECK(std::abs(expect(d1d2, state) - space.expect(d1d2)) < 1e-6);
    const auto engine = symmetrized_correlator(d1d2, d1d2, state);
    CHECK(std::abs(space.symmetrized(d1d2, d1d2) -
                   (engine.product_part + Complex(engine.psd, 0.0))) < 2e-5);
}
