#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphmult/mult.hpp"
#include "sphmult/report.hpp"
#include "sphmult/transform.hpp"

namespace sphmult {

struct ExperimentConfig {
    std::string space = "H2xH2";
    double p = 1.5;
    std::string multiplier = "imaginary_powers";  // builtin kind, or "one" for m = 1
    std::vector<double> params{1.0, 1.0, 1.0};
    double epsilon = 0.04;            // regulariser e^{-eps (l1^2 + l2^2)}
    double lambda_max = 0.0;          // 0: sqrt(40 / eps)
    double radius = 4.0;              // geodesic ball radius in each factor
    std::vector<int> resolutions{64, 128, 192};  // radial points per factor
    int nodes_per_panel = 16;
    int trials = 6;
    int power_iterations = 20;
    std::uint64_t seed = 7;
    unsigned threads = 0;             // 0: keep the current worker count
    std::string out_dir = "sphmult-out";

    nlohmann::json to_json() const;
    // Requires space, p and multiplier; other keys default.  Errors name the offending JSON path.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// K x K-invariant function on a product of two geodesic balls of H2,
// values[i * n + j] = f(r_i, r_j) on the Gauss-Legendre nodes of `grid`.
struct BiRadialFunction {
    RadialGrid grid;
    std::vector<cplx> values;

    std::size_t points() const;
    static BiRadialFunction sample(const std::function<cplx(double, double)>& f, double radius, int points,
                                   int nodes_per_panel = 16);
};

// B f = f * k_B discretised on a bi-radial grid.  The angular averages of k_B(d1, d2)
// are taken through the spherical product formula, so the operator acts as
// interpolate -> spherical transform -> multiply by m_eps -> inverse transform -> sample.
class DiscreteOperator {
public:
    DiscreteOperator(const ProductSpace& space, const MultiplierSpec& m, double epsilon, double lambda_max,
                     const RadialGrid& grid);

    std::size_t points() const;
    const std::vector<double>& radii() const;
    const std::vector<double>& volume_weights() const;  // w_i delta(r_i)
    std::vector<cplx> apply(std::span<const cplx> f, bool adjoint = false) const;
    // Operators with kernels Phi1 Phi2 k_B, [(1 - Phi1) Phi2 + Phi1 (1 - Phi2)] k_B, (1 - Phi1)(1 - Phi2) k_B.
    DiscreteOperator piece(int which) const;
    // Share of ||B f||_2^2 lying outside the product of balls.
    double truncation_mass(std::span<const cplx> f) const;
    double sup_multiplier() const;  // max |m_eps| over the spectral nodes

private:
    struct Impl;
    explicit DiscreteOperator(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

double lp_norm(const DiscreteOperator& op, std::span<const cplx> f, double p);

BiRadialFunction apply_operator(const ExperimentConfig& config, const BiRadialFunction& f);

struct OperatorEstimate {
    double p = 2.0;
    double empirical_norm_lower_bound = 0.0;           // at the finest resolution
    std::vector<double> trial_curve;                   // running maximum over trials
    std::vector<std::pair<int, double>> resolution_curve;
    std::array<double, 3> piece_lower_bounds{};        // B0, B1, B2
    double piece_sum_residual = 0.0;                   // max |B0 f + B1 f + B2 f - B f| / |B f|
    double truncation_mass = 0.0;
    bool converged = true;
    Verdict verdict = Verdict::inconclusive;
    std::string note;

    nlohmann::json to_json() const;
};

struct NormSearchOptions {
    int trials = 6;
    int power_iterations = 20;
    std::uint64_t seed = 7;
};

// Randomised lower bound for ||op||_{p -> p}: bump superpositions refined by p-norm power iteration.
struct NormSearch {
    double best = 0.0;
    std::vector<double> trial_curve;
    std::vector<cplx> maximiser;
    bool converged = true;
};
NormSearch search_lp_norm(const DiscreteOperator& op, double p, const NormSearchOptions& opt = {});

OperatorEstimate estimate_lp_norm(const ExperimentConfig& config, bool with_pieces = true);

struct SuiteResult {
    std::string name;
    std::vector<EstimateReport> reports;
    std::vector<OperatorEstimate> operators;
    double seconds = 0.0;

    bool passed() const;
    nlohmann::json to_json() const;
    std::string csv() const;
};

// Suites: sanity, expansions, paper-bounds, independence, transference, operator.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& config);
const std::vector<std::string>& suite_names();
// Writes <dir>/<suite>.json and <dir>/<suite>.csv.
void write_bundle(const SuiteResult& result, const std::string& dir);

}  // namespace sphmult
