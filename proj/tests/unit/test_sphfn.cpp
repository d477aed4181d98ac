#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "reference_values.hpp"
#include "sphmult/space.hpp"
#include "sphmult/sphfn.hpp"

using namespace sphmult;

TEST_CASE("oracle matches hypergeometric reference values") {
    for (const auto& r : ref::kPhi) {
        const cplx v = phi_oracle(parse_space(r.space), r.lambda, r.t);
        CHECK(std::abs(v - r.value) < 1e-10);
    }
}

TEST_CASE("oracle table equals pointwise oracle") {
    const std::vector<double> ts{0.0, 0.2, 1.0, 3.5, 9.0};
    const auto table = phi_oracle_table(RankOneSpace::CH2(), cplx(1.5, 0.4), ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(std::abs(table[i] - phi_oracle(RankOneSpace::CH2(), cplx(1.5, 0.4), ts[i])) < 1e-11);
}

TEST_CASE("closed form on H3") {
    for (double l : {0.4, 3.0})
        for (double t : {0.5, 2.0, 7.0})
            CHECK(phi_oracle(RankOneSpace::H3(), l, t).real() ==
                  doctest::Approx(std::sin(l * t) / (l * std::sinh(t))).epsilon(1e-10));
}

TEST_CASE("normalisation, trivial character and Weyl symmetry") {
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace::H3(), RankOneSpace::CH2()}) {
        CHECK(std::abs(phi_oracle(s, 4.2, 0.0) - 1.0) < 1e-12);
        for (double t : {0.3, 4.0, 12.0}) {
            CHECK(std::abs(phi_oracle(s, cplx(0.0, s.rho()), t) - 1.0) < 1e-8);
            CHECK(std::abs(phi_oracle(s, cplx(0.0, -s.rho()), t) - 1.0) < 1e-8);
            CHECK(std::abs(phi_oracle(s, cplx(2.0, 0.3), t) - phi_oracle(s, cplx(-2.0, -0.3), t)) < 1e-9);
        }
    }
}

TEST_CASE("ODE residual is small on the working range") {
    for (const auto& s : {RankOneSpace::H2(), RankOneSpace::CH2()})
        for (double t : {0.1, 1.0, 10.0}) CHECK(ode_residual(s, cplx(7.0, 0.2), t) < 1e-6);
}

TEST_CASE("series and Harish-Chandra expansion agree with the oracle in their domains") {
    const RankOneSpace s = RankOneSpace::H2();
    CHECK(std::abs(phi_series(s, cplx(1.0, 0.3), 0.5) - phi_oracle(s, cplx(1.0, 0.3), 0.5)) < 1e-12);
    CHECK(phi_hc(s, 2.0, 3.0, 12).est_error < 1e-9);
    CHECK_THROWS(hc_value(s, 2.0, 0.2, 12));
    // error decreases with the number of terms
    double prev = 1.0;
    for (int L : {1, 3, 6, 12}) {
        const double e = phi_hc(s, 1.0, 1.0, L).est_error;
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("local term error behaves like t^2") {
    const RankOneSpace s = RankOneSpace::H2();
    const double e1 = std::abs(phi_oracle(s, 1.0, 0.02) - local_term(s, 1.0, 0.02));
    const double e2 = std::abs(phi_oracle(s, 1.0, 0.04) - local_term(s, 1.0, 0.04));
    CHECK(std::log2(e2 / e1) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(phi_local(s, 1.0, 0.5).est_error < 0.01);
    CHECK_THROWS(phi_local(s, 1.0, 2.0));
}

TEST_CASE("Weyl symmetry check report passes") {
    const double ls[] = {0.5, 3.0}, ts[] = {0.5, 5.0};
    CHECK(weyl_symmetry_check(RankOneSpace::CH2(), ls, ts).passed());
}
