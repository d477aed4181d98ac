#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sphmult/kernels.hpp"
#include "sphmult/mult.hpp"

using namespace sphmult;

TEST_CASE("bump: plateau, support, symmetry, monotone transition") {
    for (double x : {0.0, 0.3, 1.0}) CHECK(bump_bC(x) == 1.0);
    for (double x : {2.0, 2.7, 40.0}) CHECK(bump_bC(x) == 0.0);
    double prev = 1.0;
    for (double x = 1.0; x <= 2.0; x += 0.01) {
        CHECK(bump_bC(x) <= prev);
        CHECK(bump_bC(-x) == bump_bC(x));
        prev = bump_bC(x);
    }
    for (double x : {1.2, 1.5, 1.9})
        CHECK(bump_bC_derivative(x) == doctest::Approx(richardson_derivative(std::function<double(double)>(bump_bC), x, 1, 0.01)).epsilon(1e-6));
    // every derivative vanishes at the junctions
    for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(richardson_derivative(std::function<double(double)>(bump_bC), 1.0 + 0.02, k, 0.005)) < 1e-3);
        CHECK(std::abs(richardson_derivative(std::function<double(double)>(bump_bC), 2.0 - 0.02, k, 0.005)) < 1e-3);
    }
}

TEST_CASE("piece names round-trip") {
    for (auto id : {KernelPieceId::kappa_A, KernelPieceId::phi_p_11_d12, KernelPieceId::J_average}) {
        CHECK(parse_piece(to_string(id)) == id);
    }
    CHECK(is_rank_one(KernelPieceId::kappa_omega));
    CHECK_FALSE(is_rank_one(KernelPieceId::k11));
    CHECK_THROWS(parse_piece("kappa_zz"));
    CHECK(parse_route("shifted_full") == PhiRoute::shifted_full);
}

TEST_CASE("contour routes agree and kappa_1 factorises") {
    const RankOneSpace s = RankOneSpace::H2();
    const Exponent p(4.0 / 3.0);
    const SpectralFunction m = product_1d(gaussian_1d(0.1), boundary_power_1d(s, p, 1.0));
    const KernelOptions opt{.lambda_max = 20.0};
    const cplx raw = phi_p_eval(s, m, p, 3.0, PhiRoute::raw, opt);
    CHECK(std::abs(phi_p_eval(s, m, p, 3.0, PhiRoute::shifted_eps, opt) - raw) < 1e-10);
    CHECK(std::abs(phi_p_eval(s, m, p, 3.0, PhiRoute::shifted_full, opt) - raw) < 1e-10);
    const cplx k1 = kernel_piece_eval(KernelPieceId::kappa_1, s, m, p, {3.0, 0.0}, 0.0, opt);
    CHECK(std::abs(k1 - std::exp(-2.0 * s.rho() * 3.0 / p.p()) * raw) < 1e-12);
    // Phi = 1 on [0, 1]
    CHECK(phi_p_eval(s, m, p, 0.5, PhiRoute::raw, opt) == cplx(0.0, 0.0));
}

TEST_CASE("contour shift is checked against the analytic strip and the exponent range") {
    const RankOneSpace s = RankOneSpace::H2();
    SpectralFunction thin = gaussian_1d(0.1);
    thin.analytic_strip = 0.05;
    CHECK_THROWS_WITH(phi_p_eval(s, thin, Exponent(4.0 / 3.0), 3.0, PhiRoute::shifted_full),
                      doctest::Contains("insufficient analytic strip"));
    CHECK_THROWS_AS(phi_p_eval(s, gaussian_1d(0.1), Exponent(3.0), 3.0, PhiRoute::raw), std::invalid_argument);
}

TEST_CASE("rank-one split reproduces the inverse transform") {
    const std::vector<double> ts{0.5, 1.5, 2.5, 6.0};
    const RankOneSplit split = rank_one_split(RankOneSpace::H2(), gaussian_1d(0.0), ts, 0.1);
    CHECK(split.local_residual < 1e-8);
    CHECK(split.global_residual < 1e-8);
}

TEST_CASE("product kernels: zero multiplier, Weyl invariance, splitting") {
    const ProductSpace s = parse_product_space("H2xH2");
    const Exponent p(1.5);
    const std::vector<double> t1{0.5, 3.0}, t2{0.5, 1.5};

    const MultiplierSpec zero = builtin_multiplier("constant", {0.0}, s);
    for (const cplx& v : kernel_piece_grid(KernelPieceId::k11, s, zero, p, t1, t2, 0.1)) CHECK(v == cplx(0.0, 0.0));

    // kernels see only the Weyl-symmetrised multiplier; asymmetric input is refused
    const MultiplierSpec g = builtin_multiplier("gaussian", {0.1}, s);
    MultiplierSpec skew = g;
    skew.evaluator = [g](cplx a, cplx b) { return g(a, b) * (1.0 + 0.3 * a + 0.2 * a * b); };
    skew.analytic_derivative = nullptr;
    skew.weyl_symmetric = false;
    CHECK_THROWS(kernel_piece_grid(KernelPieceId::k00, s, skew, p, t1, t2, 0.0));
    MultiplierSpec sym = skew;
    sym.evaluator = [skew](cplx a, cplx b) { return 0.25 * (skew(a, b) + skew(-a, b) + skew(a, -b) + skew(-a, -b)); };
    sym.weyl_symmetric = true;
    const auto kg = kernel_piece_grid(KernelPieceId::k00, s, g, p, t1, t2, 0.0);
    const auto ks = kernel_piece_grid(KernelPieceId::k00, s, sym, p, t1, t2, 0.0);
    for (std::size_t i = 0; i < kg.size(); ++i) CHECK(std::abs(kg[i] - ks[i]) < 1e-10);

    const ProductSplit split = product_split(s, g, t1, t2, 0.0);
    CHECK(split.residual < 1e-8);
}

TEST_CASE("tau decomposition sums to the whole kernel") {
    const std::vector<double> xs{0.0, 0.7, 3.0}, bs{1.5, 4.0};
    const TauTables tau = tau_decomposition(RankOneSpace::H2(), gaussian_1d(0.0), Exponent(1.5), xs, bs, 0.1);
    CHECK(tau.residual < 1e-10);
    CHECK(std::abs(tau.tau1[0]) == 0.0);
}

TEST_CASE("mixed-parity Chebyshev average against tanh-sinh") {
    const ProductSpace s = parse_product_space("H3xH2");
    const MultiplierSpec g = builtin_multiplier("gaussian", {0.05}, s);
    boost::math::quadrature::tanh_sinh<double> ts;
    for (std::array<int, 2> d : {std::array<int, 2>{0, 0}, std::array<int, 2>{1, 1}}) {
        const std::array<double, 2> v{3.0, 5.0};
        // H3 is odd: evaluated at v1; H2 is even: averaged over s in [0, 1]
        const auto re_im = [&](bool imag) {
            return ts.integrate(
                [&](double u) {
                    if (std::abs(v[1] * u) <= 1.0) return 0.0;
                    const cplx f = chebyshev_integrand(s, g, {v[0], v[1] * u}, {1, 0}, d);
                    return (imag ? f.imag() : f.real()) * std::pow(u, d[1]) / std::sqrt(1.0 - u * u);
                },
                0.0, 1.0);
        };
        const cplx oracle(re_im(false), re_im(true));
        const cplx value = chebyshev_average(s, g, v, ParityCase::even_odd, d);
        CHECK(std::abs(value - oracle) < 1e-6 * std::max(1.0, std::abs(oracle)));
    }
    CHECK_THROWS(chebyshev_average(s, g, {3.0, 5.0}, ParityCase::even_even));
}

TEST_CASE("estimate targets cover every family") {
    const auto targets = bound_targets(Exponent(1.5));
    CHECK(targets.size() >= 20);
    bool exponential = false;
    for (const auto& t : targets) exponential = exponential || t.exponential;
    CHECK(exponential);
    CHECK(estimate_verify(targets.at(2), Exponent(1.5)).passed());
}
