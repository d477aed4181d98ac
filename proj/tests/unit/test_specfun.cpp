#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "reference_values.hpp"
#include "sphmult/space.hpp"
#include "sphmult/specfun.hpp"

using namespace sphmult;

TEST_CASE("complex Gamma: recurrence, reflection and poles") {
    for (cplx z : {cplx(0.3, 0.2), cplx(4.5, -3.0), cplx(-2.5, 1.0)}) {
        const cplx g = gamma_complex(z).value, g1 = gamma_complex(z + 1.0).value;
        CHECK(std::abs(g1 - z * g) <= 1e-12 * std::abs(g1));
        const cplx refl = gamma_complex(z).value * gamma_complex(1.0 - z).value * std::sin(std::numbers::pi * z);
        CHECK(std::abs(refl - std::numbers::pi) < 1e-11);
    }
    CHECK(gamma_complex(cplx(-3.0, 0.0)).status == Status::pole);
    CHECK(std::abs(gamma_complex(cplx(0.5, 0.0)).value - std::sqrt(std::numbers::pi)) < 1e-14);
}

TEST_CASE("normalised Bessel function against reference values") {
    for (const auto& r : ref::kBessel) {
        const cplx v = bessel_cJ(r.mu, r.z);
        CHECK(std::abs(v - r.value) < 1e-12);
    }
    // series and asymptotic branches agree where both are accurate
    for (double x : {18.0, 25.0})
        CHECK(std::abs(bessel_cJ_series(1.0, x) - bessel_cJ_asymptotic(1.0, x)) < 1e-9);
}

TEST_CASE("c-function against asymptotic extraction reference") {
    for (const auto& r : ref::kC) {
        const CFunctionValue c = c_function(parse_space(r.space), r.lambda);
        REQUIRE(c.status == Status::ok);
        CHECK(std::abs(c.value - r.value) < 1e-12 * std::abs(r.value));
    }
    // c(-i rho) = 1
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace::H3(), RankOneSpace::CH2()})
        CHECK(std::abs(c_function(s, cplx(0.0, -s.rho())).value - 1.0) < 1e-12);
}

TEST_CASE("Plancherel density is |c|^{-2} and even") {
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace::CH2()})
        for (double l : {0.3, 2.0, 11.0}) {
            const double pl = plancherel_density(s, l);
            CHECK(pl == doctest::Approx(1.0 / std::norm(c_function(s, l).value)).epsilon(1e-12));
            CHECK(pl == doctest::Approx(plancherel_density(s, -l)).epsilon(1e-14));
        }
    // H3: |c|^{-2} = l^2
    CHECK(plancherel_density(RankOneSpace::H3(), 3.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(c_inverse(RankOneSpace::H3(), 0.0) == cplx(0.0, 0.0));
}

TEST_CASE("Gamma_l recursion starts at one and flags resonances") {
    const GammaCoefficients g = gamma_ell(RankOneSpace::H2(), cplx(1.3, 0.0), 6);
    REQUIRE(g.status == Status::ok);
    CHECK(g.values.size() == 7);
    CHECK(g.values[0] == cplx(1.0, 0.0));
    const GammaCoefficients r = gamma_ell(RankOneSpace::H2(), cplx(0.0, -2.0), 6);
    CHECK(r.status == Status::resonance);
    CHECK(r.resonance_index == 2);
}
