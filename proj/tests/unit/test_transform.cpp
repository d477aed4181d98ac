#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "sphmult/mult.hpp"
#include "sphmult/transform.hpp"

using namespace sphmult;

namespace {

// On H3: f(t) = (t / sinh t) e^{-t^2 / 4e} has transform 2 sqrt(pi) e^{3/2} e^{-e l^2}.
double heat_h3(double eps, double t) { return (t == 0.0 ? 1.0 : t / std::sinh(t)) * std::exp(-t * t / (4 * eps)); }
double heat_h3_hat(double eps, double l) { return 2 * std::sqrt(std::numbers::pi) * std::pow(eps, 1.5) * std::exp(-eps * l * l); }

RadialFunction sampled(const std::function<double(double)>& f, double t_max = 12.0) {
    return RadialFunction::sample([&](double t) { return cplx(f(t), 0.0); }, RadialGrid::uniform(t_max, 0.5));
}

}  // namespace

TEST_CASE("Gaussian pair on H3: forward transform") {
    const RankOneSpace s = RankOneSpace::H3();
    const auto f = sampled([](double t) { return heat_h3(0.3, t); });
    for (double l : {0.0, 0.7, 2.5, 5.0})
        CHECK(std::abs(spherical_transform(s, f, l) - heat_h3_hat(0.3, l)) < 1e-10);
}

TEST_CASE("Gaussian pair on H3: inverse transform") {
    const RankOneSpace s = RankOneSpace::H3();
    const std::vector<double> ts{0.0, 0.5, 1.5, 3.0};
    const auto v = inverse_spherical_transform(s, gaussian_1d(0.0), ts, 0.3);
    const double scale = heat_h3_hat(0.3, 0.0);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(v[i] * scale - heat_h3(0.3, ts[i])) < 1e-9);
}

TEST_CASE("round trip and Plancherel on H2") {
    const RankOneSpace s = RankOneSpace::H2();
    const auto f = sampled([](double t) { return std::exp(-t * t); });
    SpectralFunction hat{[&](cplx l) { return spherical_transform(s, f, l.real()); }, true, 0.0, "hat"};
    const std::vector<double> ts{0.1, 1.0, 2.0};
    const auto back = inverse_spherical_transform(s, hat, ts, 0.0, {.lambda_max = 25.0});
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(std::abs(back[i] - std::exp(-ts[i] * ts[i])) < 1e-4 * std::exp(-ts[i] * ts[i]) + 1e-8);
    // int |f|^2 delta = C int_R |Hf|^2 |c|^{-2}
    CHECK(plancherel_ratio(s, f, 25.0) == doctest::Approx(inversion_constant(s)).epsilon(1e-6));
}

TEST_CASE("Abel transform of the H3 pair is a Euclidean Gaussian") {
    const RankOneSpace s = RankOneSpace::H3();
    const auto f = sampled([](double t) { return heat_h3(0.25, t); });
    const std::vector<double> b{0.0, 0.5, 1.2};
    const auto a = abel_transform(s, f, b, 40.0);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(std::abs(a[i] - 0.25 * std::exp(-b[i] * b[i])) < 1e-9);
}

TEST_CASE("convolution multiplies transforms") {
    const RankOneSpace s = RankOneSpace::H3();
    const auto f = sampled([](double t) { return heat_h3(0.2, t); });
    const auto g = sampled([](double t) { return heat_h3(0.3, t); });
    const RadialFunction h = convolve_radial(s, f, g, 40.0);
    const double c = heat_h3_hat(0.2, 0) * heat_h3_hat(0.3, 0) / heat_h3_hat(0.5, 0);
    for (double t : {0.0, 1.0, 2.5}) CHECK(std::abs(h.at(t) - c * heat_h3(0.5, t)) < 1e-8);
}

TEST_CASE("radial functions interpolate and vanish beyond the grid") {
    const auto f = sampled([](double t) { return std::cos(t); }, 4.0);
    CHECK(std::abs(f.at(1.2345) - std::cos(1.2345)) < 1e-12);
    CHECK(f.at(5.0) == cplx(0.0, 0.0));
    CHECK(spectral_cutoff(0.1) == doctest::Approx(20.0));
    CHECK(spectral_cutoff(0.0) == doctest::Approx(60.0));
}
