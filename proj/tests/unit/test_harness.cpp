#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sphmult/harness.hpp"
#include "sphmult/parallel.hpp"

using namespace sphmult;

namespace {

const ProductSpace kH2H2 = parse_product_space("H2xH2");

DiscreteOperator small_operator(const std::string& kind = "imaginary_powers") {
    const MultiplierSpec m = kind == "one" ? builtin_multiplier("constant", {1.0}, kH2H2)
                                           : builtin_multiplier(kind, {1.0, 1.0, 1.0}, kH2H2);
    return DiscreteOperator(kH2H2, m, 0.04, 0.0, RadialGrid::uniform(4.0, 1.0, 16));
}

std::vector<cplx> smooth_input(const DiscreteOperator& op) {
    const auto& r = op.radii();
    std::vector<cplx> f(r.size() * r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j) f[i * r.size() + j] = std::exp(-r[i] * r[i] - 2.0 * r[j] * r[j]);
    return f;
}

}  // namespace

TEST_CASE("config parsing reports the offending path") {
    nlohmann::json j{{"space", "H2xH2"}, {"p", 1.5}};
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("/multiplier"), std::invalid_argument);
    j["multiplier"] = "gaussian";
    j["params"] = {0.1};
    j["epsilon"] = "big";
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("/epsilon"), std::invalid_argument);
    j["epsilon"] = 0.02;
    j["resolutions"] = {64, 70};
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j), doctest::Contains("/resolutions/1"), std::invalid_argument);
    j["resolutions"] = {32};
    const ExperimentConfig c = ExperimentConfig::from_json(j);
    CHECK(c.epsilon == 0.02);
    CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("operator rejects unsupported spaces") {
    CHECK_THROWS(DiscreteOperator(parse_product_space("H3xH2"), builtin_multiplier("constant", {1.0}, kH2H2), 0.04, 0.0,
                                  RadialGrid::uniform(4.0, 1.0)));
}

TEST_CASE("adjoint is the conjugate transpose") {
    const DiscreteOperator op = small_operator();
    const auto f = smooth_input(op);
    std::vector<cplx> g(f.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = cplx(std::cos(0.37 * k), std::sin(0.11 * k));
    const auto bf = op.apply(f), bhg = op.apply(g, true);
    cplx lhs = 0.0, rhs = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        lhs += std::conj(bf[k]) * g[k];
        rhs += std::conj(f[k]) * bhg[k];
    }
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("pieces sum to the whole operator") {
    const DiscreteOperator op = small_operator();
    const auto f = smooth_input(op);
    const auto whole = op.apply(f);
    std::vector<cplx> sum(whole.size());
    for (int i = 0; i < 3; ++i) {
        const auto v = op.piece(i).apply(f);
        for (std::size_t k = 0; k < v.size(); ++k) sum[k] += v[k];
    }
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < sum.size(); ++k) {
        err = std::max(err, std::abs(sum[k] - whole[k]));
        scale = std::max(scale, std::abs(whole[k]));
    }
    CHECK(err < 1e-12 * scale);
    CHECK_THROWS(op.piece(3));
    const double tm = op.truncation_mass(f);
    CHECK(tm >= 0.0);
    CHECK(tm < 1.0);
}

TEST_CASE("regularised identity has L^2 norm at most one") {
    const DiscreteOperator op = small_operator("one");
    const auto f = smooth_input(op);
    CHECK(lp_norm(op, op.apply(f), 2.0) <= lp_norm(op, f, 2.0) * (1.0 + 1e-9));
    CHECK(op.sup_multiplier() == doctest::Approx(1.0));
}

TEST_CASE("norm search is deterministic and independent of the worker count") {
    const DiscreteOperator op = small_operator();
    const unsigned saved = thread_count();
    set_thread_count(1);
    const NormSearch a = search_lp_norm(op, 1.5, {.trials = 3, .power_iterations = 6, .seed = 4});
    set_thread_count(3);
    const NormSearch b = search_lp_norm(op, 1.5, {.trials = 3, .power_iterations = 6, .seed = 4});
    set_thread_count(saved);
    CHECK(a.best == b.best);
    CHECK(a.trial_curve == b.trial_curve);
    CHECK(a.best > 0.5);
    for (std::size_t i = 1; i < a.trial_curve.size(); ++i) CHECK(a.trial_curve[i] >= a.trial_curve[i - 1]);
}

TEST_CASE("bi-radial sampling and suite plumbing") {
    const auto f = BiRadialFunction::sample([](double a, double b) { return a + 2.0 * b; }, 4.0, 32);
    CHECK(f.points() == 32);
    CHECK(f.values.size() == 32 * 32);
    CHECK_THROWS(BiRadialFunction::sample([](double, double) { return 0.0; }, 4.0, 30));
    CHECK(suite_names().size() == 6);
    CHECK_THROWS(run_suite("nope", {}));
    const SuiteResult r = run_suite("independence", {});
    CHECK(r.passed());
    CHECK(r.csv().rfind("name,bound,surrogate,fitted,claimed,tolerance,residual,verdict\n", 0) == 0);
}
