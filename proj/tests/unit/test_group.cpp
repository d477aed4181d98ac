#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "sphmult/group.hpp"
#include "sphmult/transform.hpp"

using namespace sphmult;

namespace {

MatrixElement random_sl2(std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    return MatrixElement::rotation(N(rng)) * MatrixElement::torus(2.0 * N(rng)) * MatrixElement::nbar(N(rng)) *
           MatrixElement::rotation(N(rng));
}

}  // namespace

TEST_CASE("Cartan radius equals acosh of half the Frobenius norm squared") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const MatrixElement g = random_sl2(rng);
        const double fro = g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d;
        CHECK(cartan_radius(g) == doctest::Approx(std::acosh(fro / 2.0)).epsilon(1e-9));
    }
}

TEST_CASE("Iwasawa coordinates reconstruct the element") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const MatrixElement g = random_sl2(rng);
        CHECK(iwasawa(g).matrix().distance(g) < 1e-10 * (1.0 + std::abs(g.a) + std::abs(g.b) + std::abs(g.c) + std::abs(g.d)));
    }
    CHECK_THROWS(iwasawa(MatrixElement{2.0, 0.0, 0.0, 1.0}));
}

TEST_CASE("cancellation-free radius of v(x) a(t)") {
    for (double x : {0.0, 1e-3, 0.5, 7.0})
        for (double t : {0.01, 1.0, 12.0})
            CHECK(cartan_radius_nbar_a(x, t) ==
                  doctest::Approx(cartan_radius(MatrixElement::nbar(x) * MatrixElement::torus(t))).epsilon(1e-9));
}

TEST_CASE("Iwasawa/Cartan gap stays in [0, 2 e^{-2 t_b}] and decays at rate 2") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> X(-40.0, 40.0), T(0.05, 15.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = X(rng), t = T(rng);
        const double e = iwasawa_cartan_gap(x, t);
        CHECK(e >= -1e-12);
        CHECK(e <= 2.0 * std::exp(-2.0 * t) + 1e-12);
    }
    const double slope = std::log(iwasawa_cartan_gap(1.0, 9.0) / iwasawa_cartan_gap(1.0, 8.0));
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.02));
}

TEST_CASE("Haar measure in both coordinate systems") {
    const HaarComparison h = haar_consistency([](double t) { return std::exp(-t * t); }, 6.0);
    CHECK(h.relative_error < 1e-8);
    CHECK(poisson_tails(2.0).converges);
    CHECK(poisson_weight(0.0) == doctest::Approx(1.0));
}

TEST_CASE("horocycle integral equals the slice-identity Abel transform") {
    const RankOneSpace s = RankOneSpace::H2();
    const auto f = RadialFunction::sample([](double t) { return cplx(std::exp(-t * t), 0.0); },
                                          RadialGrid::uniform(12.0, 0.5));
    const std::vector<double> bs{0.3, 1.0, 2.5};
    const auto slice = abel_transform(s, f, bs, 40.0);
    for (std::size_t i = 0; i < bs.size(); ++i)
        CHECK(std::abs(abel_horocycle(f, bs[i]) - slice[i].real()) < 1e-6);
}

TEST_CASE("Cv_p norm of a positive kernel is its mass") {
    const double h = 0.05;
    std::vector<double> phi;
    double mass = 0.0;
    for (double x = -4.0; x <= 4.0 + 1e-12; x += h) {
        phi.push_back(std::exp(-x * x));
        mass += h * phi.back();
    }
    CHECK(cvp_norm_1d(phi, h, 1.5) == doctest::Approx(mass).epsilon(0.02));
    CHECK(cvp_norm_1d(phi, h, 1.5) <= mass * (1.0 + 1e-9));
}

TEST_CASE("transference on the identity-like kernel") {
    const TransferenceTrial t = identity_trial(1.5);
    CHECK(t.lhs == doctest::Approx(1.0).epsilon(0.05));
    CHECK(t.rhs == doctest::Approx(1.0).epsilon(0.05));
    const GroupKernel k = random_group_kernel(9);
    const TransferenceTrial r = transference_trial(k, 1.5, {.nx = 48, .nt = 48});
    CHECK(r.lhs <= 1.05 * r.rhs);
}
