#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sphmult/space.hpp"

using namespace sphmult;

TEST_CASE("named presets and multiplicity parsing") {
    CHECK(parse_space("H2") == RankOneSpace(1, 0));
    CHECK(parse_space("H3") == RankOneSpace(2, 0));
    CHECK(parse_space("CH2") == RankOneSpace(2, 1));
    CHECK(parse_space("4,3") == RankOneSpace(4, 3));
    CHECK_THROWS_AS(parse_space("H9"), std::invalid_argument);
    CHECK_THROWS_AS(parse_space("a,b"), std::invalid_argument);
}

TEST_CASE("dimension and half-sum of roots") {
    const RankOneSpace ch2 = RankOneSpace::CH2();
    CHECK(ch2.n() == 4);
    CHECK(ch2.rho() == doctest::Approx(2.0));
    CHECK(RankOneSpace::H2().rho() == doctest::Approx(0.5));
    const ProductSpace p = parse_product_space("H3xH2");
    CHECK(p.x1 == RankOneSpace::H3());
    CHECK(p.x2 == RankOneSpace::H2());
    CHECK(parse_product_space("2,0;1,0").x1 == RankOneSpace::H3());
}

TEST_CASE("Cartan density against sinh powers") {
    for (double t : {1e-3, 0.4, 2.0, 30.0}) {
        CHECK(density_delta(RankOneSpace::H2(), t) == doctest::Approx(std::sinh(t)).epsilon(1e-13));
        CHECK(density_delta(RankOneSpace::H3(), t) == doctest::Approx(std::pow(std::sinh(t), 2)).epsilon(1e-13));
        CHECK(density_delta(RankOneSpace::CH2(), t) ==
              doctest::Approx(std::pow(std::sinh(t), 2) * std::sinh(2 * t) / 2).epsilon(1e-13));
    }
    // no overflow where sinh itself overflows
    CHECK(std::isfinite(log_density_delta(RankOneSpace::CH2(), 400.0)));
    CHECK_THROWS(density_delta(RankOneSpace::H2(), 0.0));
}

TEST_CASE("local weight squares to t^{n-1} / delta") {
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace::H3(), RankOneSpace::CH2()})
        for (double t : {0.01, 1.0, 5.0}) {
            const double w = weight_w(s, t);
            CHECK(w * w * density_delta(s, t) == doctest::Approx(std::pow(t, s.n() - 1)).epsilon(1e-12));
        }
}

TEST_CASE("exponent and its conjugate share delta") {
    const Exponent p(1.5);
    CHECK(p.delta() == doctest::Approx(1.0 / 3.0));
    CHECK(p.conjugate().p() == doctest::Approx(3.0));
    CHECK(p.conjugate().delta() == doctest::Approx(p.delta()));
    CHECK(Exponent(2.0).delta() == 0.0);
    CHECK_THROWS(Exponent(1.0));
}
