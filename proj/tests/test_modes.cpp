#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "homodyne/modes.hpp"

using namespace homodyne;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(1234);
    return gen;
}

Complex random_complex(double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng()), u(rng())};
}

AffineMode random_mode(const std::vector<std::string>& labels) {
    AffineMode::CoeffMap u, v;
    for (const auto& label : labels) {
        u[label] = random_complex();
        v[label] = random_complex();
    }
    return AffineMode(std::move(u), std::move(v), random_complex());
}

}  // namespace

TEST_CASE("affine mode arithmetic and pruning") {
    const auto a = AffineMode::annihilator("a+");
    const auto b = AffineMode::annihilator("a-");

    SECTION("1*x + 0*y = x") {
        const auto combined = linear_combine({{Complex(1.0, 0.0), a}, {Complex(0.0, 0.0), b}});
        CHECK(combined == a);
    }
    SECTION("x - x is the zero operator with empty maps") {
        const auto z = a - a;
        CHECK(z.is_zero());
        CHECK(z.u().empty());
        CHECK(z.v().empty());
    }
    SECTION("near-zero coefficients are dropped") {
        const auto tiny = Complex(1e-16, 0.0) * a;
        CHECK(tiny.u().empty());
    }
}

TEST_CASE("adjoint swaps u with conj(v) and conjugates the displacement") {
    const AffineMode x({{"a+", Complex(1.0, 0.0)}}, {}, Complex(2.0, 1.0));
    const auto xd = x.adjoint();
    CHECK(xd.u().empty());
    CHECK(xd.v_coeff("a+") == Complex(1.0, 0.0));
    CHECK(xd.displacement() == Complex(2.0, -1.0));
}

TEST_CASE("adjoint is an involution on random modes") {
    for (int k = 0; k < 50; ++k) {
        const auto x = random_mode({"a+", "a-", "l+", "l-"});
        const auto back = x.adjoint().adjoint();
        CHECK(back == x);
    }
}

TEST_CASE("canonical commutators") {
    const auto ap = AffineMode::annihilator("a+");
    const auto am = AffineMode::annihilator("a-");
    CHECK(commutator_pair(ap, ap) == Complex(1.0, 0.0));
    CHECK(commutator_pair(ap, am) == Complex(0.0, 0.0));

    SECTION("quadrature built from pure sidebands commutes with itself") {
        const auto [b1, b2] = to_quadratures(ap, am);
        CHECK(std::abs(commutator_pair(b1, b1)) < 1e-14);
        // [b1, b2] = commutator_pair(b1, adjoint(b2)) vanishes; [b1, b2^dag] = i
        CHECK(std::abs(commutator_pair(b1, b2.adjoint())) < 1e-14);
        CHECK(std::abs(commutator_pair(b1, b2) - Complex(0.0, 1.0)) < 1e-14);
    }
    SECTION("commutator_pair(x,x) is real for random modes") {
        for (int k = 0; k < 50; ++k) {
            const auto x = random_mode({"a+", "a-", "e+"});
            CHECK(std::abs(commutator_pair(x, x).imag()) < 1e-14);
        }
    }
}

TEST_CASE("quadrature transform examples") {
    const auto ap = AffineMode::annihilator("a+");
    const auto am = AffineMode::annihilator("a-");
    const double s2 = 1.0 / std::sqrt(2.0);

    SECTION("pure sidebands") {
        const auto [b1, b2] = to_quadratures(ap, am);
        CHECK(std::abs(b1.u_coeff("a+") - Complex(s2, 0.0)) < 1e-15);
        CHECK(std::abs(b1.v_coeff("a-") - Complex(s2, 0.0)) < 1e-15);
        CHECK(b1.displacement() == Complex(0.0, 0.0));
        CHECK(std::abs(b2.u_coeff("a+") - Complex(0.0, -s2)) < 1e-15);
        CHECK(std::abs(b2.v_coeff("a-") - Complex(0.0, s2)) < 1e-15);
    }
    SECTION("zero displacements stay zero") {
        const auto [b1, b2] = to_quadratures(ap, am);
        CHECK(b1.displacement() == Complex(0.0, 0.0));
        CHECK(b2.displacement() == Complex(0.0, 0.0));
    }
    SECTION("displacement map") {
        const auto [b1, b2] =
            to_quadratures(ap.with_displacement(Complex(1.0, 0.0)), am.with_displacement(Complex(0.0, 1.0)));
        // (1 + conj(i))/sqrt(2) = (1 - i)/sqrt(2)
        CHECK(std::abs(b1.displacement() - Complex(s2, -s2)) < 1e-14);
    }
    SECTION("from_quadratures displacement example") {
        const auto one = AffineMode::constant(Complex(1.0, 0.0));
        const auto zero = AffineMode();
        const auto [bp, bm] = from_quadratures(one, zero);
        CHECK(std::abs(bp.displacement() - Complex(s2, 0.0)) < 1e-15);
        CHECK(std::abs(bm.displacement() - Complex(s2, 0.0)) < 1e-15);
    }
    SECTION("zero operators map to zero operators") {
        const auto [bp, bm] = from_quadratures(AffineMode(), AffineMode());
        CHECK(bp.is_zero());
        CHECK(bm.is_zero());
    }
}

TEST_CASE("quadrature round trip is the identity on random modes") {
    for (int k = 0; k < 50; ++k) {
        const auto bp = random_mode({"a+", "a-"});
        const auto bm = random_mode({"a+", "a-"});
        const auto [b1, b2] = to_quadratures(bp, bm);
        const auto [bp2, bm2] = from_quadratures(b1, b2);
        const auto diff_p = bp2 - bp;
        const auto diff_m = bm2 - bm;
        CHECK(std::sqrt(diff_p.u_norm2() + diff_p.v_norm2()) < 1e-14);
        CHECK(std::abs(diff_p.displacement()) < 1e-14);
        CHECK(std::sqrt(diff_m.u_norm2() + diff_m.v_norm2()) < 1e-14);
        CHECK(std::abs(diff_m.displacement()) < 1e-14);

        const auto [b1b, b2b] = to_quadratures(bp2, bm2);
        const auto dd = b1b - b1;
        CHECK(std::sqrt(dd.u_norm2() + dd.v_norm2()) < 1e-14);
    }
}

TEST_CASE("sector registry enforces uniqueness and membership") {
    SidebandSector sector(100.0);
    sector.add_mode("a+", Sideband::upper, SourceKind::main_input);
    sector.add_mode("a-", Sideband::lower, SourceKind::main_input);
    CHECK_THROWS_AS(sector.add_mode("a+", Sideband::upper, SourceKind::main_input),
                    std::invalid_argument);
    CHECK(sector.contains("a+"));
    CHECK_FALSE(sector.contains("l+"));
    CHECK_THROWS_AS(SidebandSector(0.0), std::invalid_argument);

    SECTION("sector mismatch rejected by the checked transforms") {
        const auto good = AffineMode::annihilator("a+");
        const auto stray = AffineMode::annihilator("l+");
        CHECK_THROWS_AS(to_quadratures(good, stray, sector), std::invalid_argument);
        CHECK_THROWS_AS(from_quadratures(good, stray, sector), std::invalid_argument);
        CHECK_NOTHROW(to_quadratures(good, AffineMode::annihilator("a-"), sector));
    }
}
