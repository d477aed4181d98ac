#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "sphmult/group.hpp"
#include "sphmult/harness.hpp"
#include "sphmult/kernels.hpp"
#include "sphmult/mult.hpp"
#include "sphmult/parallel.hpp"
#include "sphmult/sphfn.hpp"
#include "sphmult/transform.hpp"

using namespace sphmult;
using json = nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 7;
    unsigned threads = 0;
    std::string out_dir;
    bool json = false;
    bool csv = false;
};

cplx parse_complex(std::string text) {
    std::erase(text, ' ');
    static const std::regex re(R"(^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)?(?:([+-](?:[0-9.]+(?:[eE][+-]?[0-9]+)?)?)i)?$)");
    std::smatch m;
    if (text.empty() || !std::regex_match(text, m, re)) throw CLI::ValidationError("complex", "cannot parse " + text);
    const double re_part = m[1].matched ? std::stod(m[1]) : 0.0;
    double im_part = 0.0;
    if (m[2].matched) {
        const std::string s = m[2];
        im_part = (s == "+") ? 1.0 : (s == "-") ? -1.0 : std::stod(s);
    }
    return {re_part, im_part};
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    os.precision(15);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
    return os.str();
}

std::string csv_from_rows(const json& rows) {
    std::ostringstream os;
    os.precision(15);
    if (rows.empty()) return {};
    std::vector<std::string> keys;
    for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << keys[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const json& v = r.at(keys[i]);
            os << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
        }
        os << '\n';
    }
    return os.str();
}

// Prints JSON (default or --json) or CSV (--csv); mirrors both into --out-dir when given.
void emit(const Globals& g, const std::string& name, const json& doc, const std::string& csv) {
    if (g.csv && !csv.empty())
        std::cout << csv;
    else
        std::cout << doc.dump(2) << '\n';
    if (!g.out_dir.empty()) {
        std::filesystem::create_directories(g.out_dir);
        std::ofstream(std::filesystem::path(g.out_dir) / (name + ".json")) << doc.dump(2) << '\n';
        if (!csv.empty()) std::ofstream(std::filesystem::path(g.out_dir) / (name + ".csv")) << csv;
    }
}

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

// One-variable spectral function by family name.
SpectralFunction spectral_family(const std::string& kind, const RankOneSpace& space, double param, double p) {
    if (kind == "gaussian") return gaussian_1d(param);
    if (kind == "one") return gaussian_1d(0.0);
    if (kind == "imaginary_power") return imaginary_power_1d(space, param);
    if (kind == "boundary_power") return boundary_power_1d(space, Exponent(p), param);
    throw CLI::ValidationError("--kind", "unknown family " + kind);
}

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return ExperimentConfig::from_json(json::parse(text));
    // key = value lines; values are parsed as JSON when possible, else taken as strings
    json j = json::object();
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded() && value.find(',') != std::string::npos)
            parsed = json::parse("[" + value + "]", nullptr, false);
        j[key] = parsed.is_discarded() ? json(value) : parsed;
    }
    return ExperimentConfig::from_json(j);
}

void apply_globals(const Globals& g, ExperimentConfig& c, CLI::App& app) {
    if (app.get_option("--seed")->count()) c.seed = g.seed;
    if (app.get_option("--threads")->count()) c.threads = g.threads;
    if (!g.out_dir.empty()) c.out_dir = g.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral multipliers on rank-one symmetric spaces and their products"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");
    app.add_option("--out-dir", g.out_dir, "Also write JSON/CSV outputs to this directory");
    app.add_flag("--json", g.json, "JSON output (default)");
    app.add_flag("--csv", g.csv, "CSV output where available");
    int exit_code = 0;

    // ---- space
    auto* space_cmd = app.add_subcommand("space", "Structure constants of a rank-one space");
    std::string space_name = "H2";
    double p_value = 1.5;
    space_cmd->add_option("--space", space_name, "H2, H3, CH2 or m_alpha,m_2alpha")->capture_default_str();
    space_cmd->add_option("--p", p_value, "Exponent")->capture_default_str();
    space_cmd->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        const Exponent p(p_value);
        json doc{{"space", s.name()}, {"m_alpha", s.m_alpha()}, {"m_2alpha", s.m_2alpha()}, {"n", s.n()},
                 {"rho", s.rho()}, {"p", p.p()}, {"delta", p.delta()}, {"tube_half_width", p.delta() * s.rho()}};
        emit(g, "space", doc, "");
    });

    // ---- specfun
    auto* specfun = app.add_subcommand("specfun", "Special functions");
    specfun->require_subcommand(1);
    std::string lambda_text = "1";
    auto* cfun = specfun->add_subcommand("c", "Harish-Chandra c-function");
    bool use_fit = false;
    cfun->add_option("--space", space_name)->capture_default_str();
    cfun->add_option("--lambda", lambda_text, "Spectral parameter, e.g. 1 or 1+0.2i")->capture_default_str();
    cfun->add_flag("--fit", use_fit, "Extract from large-t asymptotics instead of the closed form");
    cfun->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        const cplx l = parse_complex(lambda_text);
        if (use_fit && l.imag() != 0.0) throw CLI::ValidationError("--fit", "needs a real lambda");
        const CFunctionValue c = use_fit ? hc_fit(s, l.real()) : c_function(s, l);
        json doc{{"lambda", cjson(c.lambda)}, {"re", c.value.real()}, {"im", c.value.imag()},
                 {"source", to_string(c.source)}, {"status", to_string(c.status)}, {"fit_residual", c.fit_residual}};
        std::ostringstream os;
        os.precision(15);
        os << "lambda_re,lambda_im,re,im,source,fit_residual\n"
           << c.lambda.real() << ',' << c.lambda.imag() << ',' << c.value.real() << ',' << c.value.imag() << ','
           << to_string(c.source) << ',' << c.fit_residual << '\n';
        emit(g, "specfun_c", doc, os.str());
    });
    auto* plan = specfun->add_subcommand("plancherel", "Plancherel density |c|^-2 on a lambda grid");
    double lmax = 20.0;
    int npoints = 41;
    plan->add_option("--space", space_name)->capture_default_str();
    plan->add_option("--lambda-max", lmax)->capture_default_str();
    plan->add_option("--points", npoints)->capture_default_str();
    plan->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        std::vector<std::vector<double>> rows;
        json arr = json::array();
        for (double l : linspace(0.0, lmax, npoints)) {
            rows.push_back({l, plancherel_density(s, l)});
            arr.push_back({{"lambda", l}, {"density", rows.back()[1]}});
        }
        emit(g, "specfun_plancherel", {{"space", s.name()}, {"inversion_constant", inversion_constant(s)}, {"values", arr}},
             csv_table({"lambda", "density"}, rows));
    });
    auto* bessel = specfun->add_subcommand("bessel", "Normalised Bessel function cJ_mu(z)");
    double mu = 0.0;
    std::string z_text = "1";
    bessel->add_option("--mu", mu)->capture_default_str();
    bessel->add_option("--z", z_text)->capture_default_str();
    bessel->callback([&] {
        const cplx v = bessel_cJ(mu, parse_complex(z_text));
        emit(g, "specfun_bessel", {{"mu", mu}, {"z", cjson(parse_complex(z_text))}, {"re", v.real()}, {"im", v.imag()}},
             "");
    });

    // ---- sphfn
    auto* sphfn = app.add_subcommand("sphfn", "Spherical functions");
    sphfn->require_subcommand(1);
    auto* sph_eval = sphfn->add_subcommand("eval", "Evaluate phi_lambda(t) by one or all methods");
    double t_value = 2.0;
    std::string method = "all";
    int hc_terms = 12;
    sph_eval->add_option("--space", space_name)->capture_default_str();
    sph_eval->add_option("--lambda", lambda_text)->capture_default_str();
    sph_eval->add_option("--t", t_value)->capture_default_str();
    sph_eval->add_option("--method", method, "oracle, local, hc or all")
        ->check(CLI::IsMember({"oracle", "local", "hc", "all"}))
        ->capture_default_str();
    sph_eval->add_option("--L", hc_terms, "Harish-Chandra series terms")->capture_default_str();
    double local_radius = 1.0;
    sph_eval->add_option("--r0", local_radius, "Radius of the local expansion")->capture_default_str();
    sph_eval->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        const cplx l = parse_complex(lambda_text);
        std::vector<SphericalSample> samples;
        if (method == "oracle" || method == "all")
            samples.push_back({l, t_value, phi_oracle(s, l, t_value), SphericalMethod::oracle, Status::ok, 0.0});
        json skipped = json::array();
        if (method == "local" || (method == "all" && t_value <= local_radius))
            samples.push_back(phi_local(s, l, t_value, local_radius));
        else if (method == "all")
            skipped.push_back("local");
        if (method == "hc" || (method == "all" && t_value >= 0.5))
            samples.push_back(phi_hc(s, l, t_value, hc_terms));
        else if (method == "all")
            skipped.push_back("hc");
        json vals = json::array(), dev = json::array();
        std::ostringstream os;
        os.precision(15);
        os << "method,re,im,est_error,status\n";
        for (const auto& x : samples) {
            vals.push_back({{"method", to_string(x.method)}, {"re", x.value.real()}, {"im", x.value.imag()},
                            {"est_error", x.est_error}, {"status", to_string(x.status)}});
            os << to_string(x.method) << ',' << x.value.real() << ',' << x.value.imag() << ',' << x.est_error << ','
               << to_string(x.status) << '\n';
        }
        for (std::size_t i = 0; i < samples.size(); ++i)
            for (std::size_t j = i + 1; j < samples.size(); ++j) {
                const double d = std::abs(samples[i].value - samples[j].value);
                const std::string pair = std::string(to_string(samples[i].method)) + "-" + to_string(samples[j].method);
                dev.push_back({{"pair", pair}, {"deviation", d}});
                os << "deviation " << pair << ",,," << d << ",\n";
            }
        emit(g, "sphfn_eval", {{"space", s.name()}, {"lambda", cjson(l)}, {"t", t_value}, {"values", vals},
                               {"deviations", dev}, {"skipped_outside_domain", skipped}},
             os.str());
    });

    // ---- transform
    auto* transform = app.add_subcommand("transform", "Spherical, inverse and Abel transforms");
    transform->require_subcommand(1);
    double eps = 0.05, t_max = 8.0, width = 1.0;
    std::string out_file, kind = "gaussian";
    double kind_param = 0.1;
    auto common_transform = [&](CLI::App* c) {
        c->add_option("--space", space_name)->capture_default_str();
        c->add_option("--eps", eps, "Gaussian regulariser / width parameter")->capture_default_str();
        c->add_option("--points", npoints)->capture_default_str();
        c->add_option("--out", out_file, "CSV output file");
    };
    auto write_csv = [&](const std::string& name, const std::string& csv, const json& doc) {
        if (!out_file.empty()) {
            std::ofstream(out_file) << csv;
            if (!g.out_dir.empty()) emit(g, name, doc, csv);
        } else {
            emit(g, name, doc, csv);
        }
    };
    auto sampled_input = [&](const RankOneSpace&) {
        const double w = width;
        return RadialFunction::sample([w](double t) { return cplx(std::exp(-t * t / (w * w)), 0.0); },
                                      RadialGrid::uniform(std::max(10.0, 8.0 * w), 0.5));
    };
    auto* fwd = transform->add_subcommand("forward", "Spherical transform of exp(-t^2 / width^2)");
    common_transform(fwd);
    fwd->add_option("--width", width)->capture_default_str();
    fwd->add_option("--lambda-max", lmax)->capture_default_str();
    fwd->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        const auto ls = linspace(0.0, lmax, npoints);
        const auto v = spherical_transform(s, sampled_input(s), ls);
        std::vector<std::vector<double>> rows;
        json arr = json::array();
        for (std::size_t i = 0; i < ls.size(); ++i) {
            rows.push_back({ls[i], v[i].real(), v[i].imag()});
            arr.push_back({{"lambda", ls[i]}, {"re", v[i].real()}, {"im", v[i].imag()}});
        }
        write_csv("transform_forward", csv_table({"lambda", "re", "im"}, rows), {{"values", arr}});
    });
    auto* inv = transform->add_subcommand("inverse", "Inverse transform of m(l) exp(-eps l^2)");
    common_transform(inv);
    inv->add_option("--kind", kind, "gaussian, one, imaginary_power or boundary_power")->capture_default_str();
    inv->add_option("--param", kind_param, "Family parameter (Gaussian width or power u)")->capture_default_str();
    inv->add_option("--p", p_value)->capture_default_str();
    inv->add_option("--t-max", t_max)->capture_default_str();
    inv->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        const auto ts = linspace(0.0, t_max, npoints);
        const auto v = inverse_spherical_transform(s, spectral_family(kind, s, kind_param, p_value), ts, eps);
        std::vector<std::vector<double>> rows;
        json arr = json::array();
        for (std::size_t i = 0; i < ts.size(); ++i) {
            rows.push_back({ts[i], v[i].real(), v[i].imag()});
            arr.push_back({{"t", ts[i]}, {"re", v[i].real()}, {"im", v[i].imag()}});
        }
        write_csv("transform_inverse", csv_table({"t", "re", "im"}, rows), {{"values", arr}});
    });
    auto* abel = transform->add_subcommand("abel", "Abel transform of exp(-t^2 / width^2)");
    common_transform(abel);
    abel->add_option("--width", width)->capture_default_str();
    abel->add_option("--t-max", t_max)->capture_default_str();
    abel->callback([&] {
        const RankOneSpace s = parse_space(space_name);
        const auto bs = linspace(0.0, t_max, npoints);
        const auto v = abel_transform(s, sampled_input(s), bs, 60.0);
        std::vector<std::vector<double>> rows;
        json arr = json::array();
        for (std::size_t i = 0; i < bs.size(); ++i) {
            rows.push_back({bs[i], v[i].real(), v[i].imag()});
            arr.push_back({{"t", bs[i]}, {"re", v[i].real()}, {"im", v[i].imag()}});
        }
        write_csv("transform_abel", csv_table({"t", "re", "im"}, rows), {{"values", arr}});
    });

    // ---- mult
    auto* mult = app.add_subcommand("mult", "Multiplier conditions");
    mult->require_subcommand(1);
    auto* check = mult->add_subcommand("check", "Sampled multiplier norm for one condition");
    std::string product_name = "H2xH2", mkind = "imaginary_powers", condition = "marc";
    std::vector<double> params{1.0, 1.0, 1.0};
    std::vector<int> order{3, 3};
    bool real_axis = false;
    check->add_option("--space", product_name)->capture_default_str();
    check->add_option("--p", p_value)->capture_default_str();
    check->add_option("--kind", mkind, "imaginary_powers, gaussian, constant or euclid_marc")->capture_default_str();
    check->add_option("--params", params)->delimiter(',')->capture_default_str();
    check->add_option("--order", order)->delimiter(',')->expected(2)->capture_default_str();
    check->add_option("--condition", condition, "horm, horm_infty, marc, marc_infty, marc_frastar, ionescu")
        ->capture_default_str();
    check->add_flag("--real-axis", real_axis, "Sample on the real axis instead of the tube");
    check->callback([&] {
        const ProductSpace s = parse_product_space(product_name);
        NormOptions opt;
        if (real_axis) opt.domain = NormDomain::real_axis;
        const NormReport r = multiplier_norm(parse_condition(condition), s, Exponent(p_value),
                                             builtin_multiplier(mkind, params, s), {order[0], order[1]}, opt);
        json doc = r.to_json();
        doc["space"] = s.name();
        doc["p"] = p_value;
        doc["kind"] = mkind;
        emit(g, "mult_check", doc, csv_from_rows(json::array({{{"condition", condition},
                                                                {"value", r.value},
                                                                {"infinite", r.infinite}}})));
    });
    auto* indep = mult->add_subcommand("independence", "Marcinkiewicz vs joint weight regimes");
    indep->add_option("--space", product_name)->capture_default_str();
    indep->add_option("--p", p_value)->capture_default_str();
    indep->callback([&] {
        const auto r = independence_witness(parse_product_space(product_name), Exponent(p_value));
        emit(g, "mult_independence", r.to_json(), "");
    });

    // ---- kernels
    auto* kernels = app.add_subcommand("kernels", "Kernel pieces and their pointwise bounds");
    kernels->require_subcommand(1);
    auto* keval = kernels->add_subcommand("eval", "Evaluate a kernel piece");
    std::string piece = "kappa_omega", route = "shifted_eps";
    double t2_value = 0.0, u_param = 1.0;
    keval->add_option("--piece", piece)->capture_default_str();
    keval->add_option("--space", space_name, "Rank-one space, or a product such as H2xH2")->capture_default_str();
    keval->add_option("--p", p_value)->capture_default_str();
    keval->add_option("--t", t_value)->capture_default_str();
    keval->add_option("--t2", t2_value, "Second coordinate of product or tau pieces")->capture_default_str();
    keval->add_option("--eps", eps)->capture_default_str();
    std::string kernel_kind = "imaginary_power";
    keval->add_option("--kind", kernel_kind, "gaussian, one, imaginary_power or boundary_power")->capture_default_str();
    keval->add_option("--param", u_param)->capture_default_str();
    keval->add_option("--route", route, "raw, shifted_full or shifted_eps")->capture_default_str();
    keval->callback([&] {
        const KernelPieceId id = parse_piece(piece);
        KernelOptions opt;
        opt.route = parse_route(route);
        const Exponent p(p_value);
        cplx v;
        std::string sname;
        if (is_rank_one(id)) {
            const RankOneSpace s = parse_space(space_name);
            sname = s.name();
            v = kernel_piece_eval(id, s, spectral_family(kernel_kind, s, u_param, p_value), p, {t_value, t2_value}, eps, opt);
        } else {
            const ProductSpace s = parse_product_space(space_name);
            sname = s.name();
            const MultiplierSpec m = tensor_product(spectral_family(kernel_kind, s.x1, u_param, p_value),
                                                    spectral_family(kernel_kind, s.x2, u_param, p_value));
            v = kernel_piece_eval(id, s, m, p, {t_value, t2_value}, eps, opt);
        }
        emit(g, "kernels_eval",
             {{"piece", piece}, {"space", sname}, {"p", p_value}, {"t", t_value}, {"t2", t2_value}, {"eps", eps},
              {"re", v.real()}, {"im", v.imag()}},
             "");
    });
    auto* kverify = kernels->add_subcommand("verify", "Run the estimate battery");
    std::string suite = "paper-bounds";
    kverify->add_option("--suite", suite)->check(CLI::IsMember({"paper-bounds"}))->capture_default_str();
    kverify->add_option("--p", p_value)->capture_default_str();
    kverify->callback([&] {
        const Exponent p(p_value);
        const auto reports = estimate_battery(p_value > 2.0 ? p.conjugate() : p);
        json arr = json::array(), rows = json::array();
        bool ok = true;
        for (const auto& r : reports) {
            arr.push_back(r.to_json());
            rows.push_back({{"name", r.name}, {"fitted", r.fitted}, {"claimed", r.claimed}, {"tolerance", r.tolerance},
                            {"residual", r.residual}, {"verdict", to_string(r.verdict)}});
            ok = ok && r.verdict != Verdict::fail;
        }
        emit(g, "kernels_verify", {{"suite", suite}, {"passed", ok}, {"reports", arr}}, csv_from_rows(rows));
        if (!ok) exit_code = 1;
    });

    // ---- group
    auto* group = app.add_subcommand("group", "Group-side checks");
    group->require_subcommand(1);
    auto* transf = group->add_subcommand("transference", "Transference inequality on random kernels");
    int trials = 20;
    std::string grid_text = "96x96";
    transf->add_option("--p", p_value)->capture_default_str();
    transf->add_option("--trials", trials)->capture_default_str();
    transf->add_option("--grid", grid_text, "nx x nt")->capture_default_str();
    transf->callback([&] {
        TransferenceOptions opt;
        const auto x = grid_text.find('x');
        if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected NXxNT");
        opt.nx = std::stoi(grid_text.substr(0, x));
        opt.nt = std::stoi(grid_text.substr(x + 1));
        opt.seed = g.seed;
        const auto check_r = transference_check(p_value, trials, opt);
        const auto sep = separable_factorization(p_value, opt);
        json rows = json::array();
        for (const auto* r : {&check_r, &sep})
            rows.push_back({{"name", r->name}, {"fitted", r->fitted}, {"claimed", r->claimed},
                            {"verdict", to_string(r->verdict)}});
        emit(g, "group_transference", {{"transference", check_r.to_json()}, {"separable", sep.to_json()}},
             csv_from_rows(rows));
        if (!check_r.passed() || !sep.passed()) exit_code = 1;
    });
    auto* haar = group->add_subcommand("haar", "Iwasawa vs Cartan integral of exp(-t^2)");
    haar->add_option("--t-max", t_max)->capture_default_str();
    haar->callback([&] {
        const auto h = haar_consistency([](double t) { return std::exp(-t * t); }, t_max);
        emit(g, "group_haar", {{"iwasawa", h.iwasawa}, {"cartan", h.cartan}, {"relative_error", h.relative_error}},
             "");
    });
    auto* gap = group->add_subcommand("gap", "Iwasawa/Cartan gap E(v, b)");
    double x_value = 1.0;
    gap->add_option("--x", x_value)->capture_default_str();
    gap->add_option("--t", t_value, "t_b")->capture_default_str();
    gap->callback([&] {
        const double e = iwasawa_cartan_gap(x_value, t_value);
        emit(g, "group_gap",
             {{"x", x_value}, {"t_b", t_value}, {"gap", e}, {"bound", 2.0 * std::exp(-2.0 * t_value)}}, "");
    });
    auto* tails = group->add_subcommand("tails", "Tails of P^q and H P^q");
    double q_value = 2.0;
    tails->add_option("--q", q_value, "Power q > 1")->capture_default_str();
    tails->callback([&] {
        const auto r = poisson_tails(q_value);
        emit(g, "group_tails",
             {{"q", r.q}, {"radii", r.radii}, {"p_integrals", r.p_integrals}, {"hp_integrals", r.hp_integrals},
              {"p_tail_exponent", r.p_tail_exponent}, {"converges", r.converges}},
             "");
    });

    // ---- harness / run
    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a named suite and write its JSON/CSV bundle");
    run->alias("harness");
    std::vector<std::string> suites;
    run->add_option("--suite", suites, "sanity, expansions, paper-bounds, independence, transference, operator, all")
        ->required();
    run->add_option("--config", config_path, "JSON or key = value configuration file");
    run->callback([&] {
        ExperimentConfig c = load_config(config_path);
        apply_globals(g, c, app);
        std::vector<std::string> names;
        for (const auto& s : suites) {
            if (s == "all")
                names.insert(names.end(), suite_names().begin(), suite_names().end());
            else
                names.push_back(s);
        }
        json summary = json::array();
        for (const auto& name : names) {
            const SuiteResult r = run_suite(name, c);
            write_bundle(r, c.out_dir);
            summary.push_back({{"suite", name}, {"passed", r.passed()}, {"seconds", r.seconds}});
            std::cerr << name << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.seconds << " s)\n";
            if (!r.passed()) exit_code = 1;
        }
        std::cout << json{{"out_dir", c.out_dir}, {"suites", summary}}.dump(2) << '\n';
    });
    auto* estimate = app.add_subcommand("estimate", "Empirical L^p operator norm for a configuration");
    bool no_pieces = false;
    estimate->add_option("--config", config_path, "JSON or key = value configuration file");
    estimate->add_option("--p", p_value, "Override the configured exponent");
    estimate->add_flag("--no-pieces", no_pieces, "Skip the B0/B1/B2 piece estimates");
    estimate->callback([&] {
        ExperimentConfig c = load_config(config_path);
        apply_globals(g, c, app);
        if (estimate->get_option("--p")->count()) c.p = p_value;
        const OperatorEstimate e = estimate_lp_norm(c, !no_pieces);
        json doc = e.to_json();
        doc["config"] = c.to_json();
        json rows = json::array();
        for (const auto& [n, v] : e.resolution_curve) rows.push_back({{"points", n}, {"norm", v}});
        emit(g, "estimate", doc, csv_from_rows(rows));
        if (e.verdict == Verdict::fail) exit_code = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return exit_code;
}
