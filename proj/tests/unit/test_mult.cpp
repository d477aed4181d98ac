#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sphmult/mult.hpp"

using namespace sphmult;

TEST_CASE("tube geometry") {
    const ProductSpace s = parse_product_space("H2xH2");
    const Tube t(s, Exponent(1.5));
    CHECK(t.rank() == 2);
    CHECK(t.half_width(0) == doctest::Approx(1.0 / 6.0));
    CHECK(t.contains(cplx(5.0, 0.1), cplx(-3.0, -0.1)));
    CHECK_FALSE(t.contains(cplx(5.0, 0.2), 0.0));
    CHECK(t.contains_closed(cplx(0.0, t.half_width(0)), 0.0));
    CHECK_FALSE(t.contains(cplx(0.0, t.half_width(0)), 0.0));
    CHECK(theta_p(s.x1, Exponent(1.5), cplx(0.0, t.half_width(0))) == doctest::Approx(0.0));
    CHECK(dp_ionescu(s, Exponent(1.5), cplx(3.0, 0.0), cplx(4.0, 0.0)) ==
          doctest::Approx(std::sqrt(25.0 + 1.0 / 36.0)));
    CHECK_THROWS(dp_ionescu(s, Exponent(1.5), cplx(0.0, 1.0), 0.0));
}

TEST_CASE("derivative tables: analytic, Cauchy and Richardson agree") {
    const ProductSpace s = parse_product_space("H2xH2");
    const MultiplierSpec g = builtin_multiplier("gaussian", {0.2}, s);
    const auto exact = derivative_table(g, cplx(0.7, 0.05), cplx(-1.1, 0.0), 3, 2, {.method = DerivativeMethod::analytic});
    const auto cauchy = derivative_table(g, cplx(0.7, 0.05), cplx(-1.1, 0.0), 3, 2, {.method = DerivativeMethod::cauchy});
    REQUIRE(exact.size() == 12);
    for (std::size_t k = 0; k < exact.size(); ++k) CHECK(std::abs(exact[k] - cauchy[k]) < 1e-8);
    // d/dx e^{-0.2 x^2} at 0.7
    const cplx z1(0.7, 0.05), z2(-1.1, 0.0);
    CHECK(std::abs(exact[1 * 3 + 0] - (-0.4 * z1 * std::exp(-0.2 * (z1 * z1 + z2 * z2)))) < 1e-12);
    CHECK(richardson_derivative(std::function<double(double)>([](double x) { return std::sin(x); }), 0.3, 3, 0.05) ==
          doctest::Approx(-std::cos(0.3)).epsilon(1e-7));
}

TEST_CASE("built-in multipliers are Weyl invariant and validate parameters") {
    const ProductSpace s = parse_product_space("H2xH3");
    for (auto kind : {"imaginary_powers", "gaussian", "constant"}) {
        const auto m = builtin_multiplier(kind, std::string(kind) == "imaginary_powers" ? std::vector<double>{1, 1, 1}
                                                                                         : std::vector<double>{0.5},
                                          s);
        CHECK(m.check_weyl());
    }
    CHECK_THROWS(builtin_multiplier("gaussian", {1.0, 2.0}, s));
    CHECK_THROWS(builtin_multiplier("nope", {}, s));
    // |(l^2 + rho^2)^{iu}| = 1 on the real axis
    CHECK(std::abs(imaginary_power_1d(s.x2, 2.0)(3.7)) == doctest::Approx(1.0));
}

TEST_CASE("sampled norms") {
    const ProductSpace s = parse_product_space("H2xH2");
    const Exponent p(1.5);
    const NormReport c = marc_norm(s, p, builtin_multiplier("constant", {2.5}, s), {2, 2});
    CHECK_FALSE(c.infinite);
    CHECK(c.value == doctest::Approx(2.5).epsilon(1e-9));
    const NormReport ip = marc_norm(s, p, builtin_multiplier("imaginary_powers", {1, 1, 1}, s), {1, 1});
    CHECK_FALSE(ip.infinite);
    CHECK(ip.value >= 1.0);
    // a Euclidean Marcinkiewicz multiplier is singular at the origin, so it is not a tube multiplier
    CHECK_THROWS_WITH(marc_norm(s, p, builtin_multiplier("euclid_marc", {1, 1}, s), {1, 1}),
                      doctest::Contains("not declared holomorphic"));
    // on the real axis it satisfies the Euclidean condition
    const NormReport e = multiplier_norm(Condition::marc_frastar, s, p, builtin_multiplier("euclid_marc", {1, 1}, s),
                                         {1, 1}, {.domain = NormDomain::real_axis});
    CHECK_FALSE(e.infinite);
}

TEST_CASE("independence regimes have the expected exponents") {
    const auto r = independence_witness(parse_product_space("H2xH2"), Exponent(1.5));
    CHECK(r.regime_a_slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(r.regime_b_marc_exponent == doctest::Approx(1.25).epsilon(0.04));
    CHECK(r.regime_b_joint_exponent == doctest::Approx(0.5).epsilon(0.1));
}
