// Batch front-end: config-driven runs of the thermodynamic solver, the
// scalar factorization data, the Fredholm-determinant oracle, the localized
// model diagnostics and the assembled asymptotic laws.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnls/asym.hpp"
#include "qnls/errors.hpp"
#include "qnls/fredholm.hpp"
#include "qnls/localized.hpp"
#include "qnls/pcf.hpp"
#include "qnls/rankone.hpp"
#include "qnls/scalar_rhp.hpp"

using namespace qnls;
using nlohmann::json;

namespace {

struct RunConfig {
    ThermoParams thermo;
    FieldSet fields;
    int panels = 64;
    int order = 16;
    double tail_tol = 1e-16;
    double eps_reg = 0.0;  // 0 -> default 0.01*T
    std::vector<double> t_list;
    std::vector<double> x_list;
    double lambda0 = 1.0;
    bool has_lambda0 = false;
    std::string mode = "shifted";  // plain | shifted
    std::string out_dir = ".";
    int threads = 1;
};

json cd_json(cd z) { return json::array({z.real(), z.imag()}); }

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LogField parse_field(const json& j) {
    if (j.is_null()) return LogField::zero();
    return field_from_json(j.dump());
}

RunConfig load_config(const std::string& path, int threads_flag) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig rc;
    const json& th = j.at("thermo");
    rc.thermo.c = th.at("c").get<double>();
    rc.thermo.h = th.at("h").get<double>();
    rc.thermo.T = th.at("T").get<double>();
    if (!(rc.thermo.c > 0.0) || !(rc.thermo.T > 0.0))
        throw ConfigError("thermo: c and T must be positive");
    rc.fields.c = rc.thermo.c;
    if (j.contains("fields")) {
        const json& f = j["fields"];
        if (f.contains("psi")) rc.fields.psi = parse_field(f["psi"]);
        if (f.contains("phiA")) rc.fields.phiA = parse_field(f["phiA"]);
        if (f.contains("phiD")) rc.fields.phiD = parse_field(f["phiD"]);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        rc.panels = g.value("panels", rc.panels);
        rc.order = g.value("order", rc.order);
        rc.tail_tol = g.value("tail_tol", rc.tail_tol);
        rc.eps_reg = g.value("eps_reg", 0.0);
    }
    if (rc.eps_reg <= 0.0) rc.eps_reg = 0.01 * rc.thermo.T;
    if (j.contains("experiment")) {
        const json& e = j["experiment"];
        if (e.contains("t")) rc.t_list = e["t"].get<std::vector<double>>();
        if (e.contains("x")) rc.x_list = e["x"].get<std::vector<double>>();
        if (e.contains("lambda0")) {
            rc.lambda0 = e["lambda0"].get<double>();
            rc.has_lambda0 = true;
        }
        if (e.contains("t_range")) {
            const json& r = e["t_range"];
            const double lo = r.at(0).get<double>(), hi = r.at(1).get<double>();
            const int n = r.at(2).get<int>();
            for (int i = 0; i < n; ++i)
                rc.t_list.push_back(lo + (hi - lo) * i / std::max(1, n - 1));
        }
    }
    rc.mode = j.value("mode", rc.mode);
    if (rc.mode != "plain" && rc.mode != "shifted")
        throw ConfigError("mode must be 'plain' or 'shifted'");
    if (j.contains("phase")) {
        const std::string ph = j["phase"].get<std::string>();
        if ((ph == "positive") != (rc.thermo.h > 0.0))
            throw ConfigError("phase flag inconsistent with sign(h)");
    }
    rc.out_dir = j.value("output", json::object()).value("dir", std::string("."));
    rc.threads = threads_flag;
    if (const char* env = std::getenv("QNLS_THREADS"); env && threads_flag <= 1)
        rc.threads = std::max(1, std::atoi(env));
    return rc;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/" + name);
    out << text;
}

int cmd_thermo(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    std::ostringstream csv;
    csv << "lambda,epsilon,theta,rho_t\n";
    for (int i = 0; i < st.grid.size(); ++i)
        csv << format17(st.grid.nodes[i].real()) << ',' << format17(st.epsilon[i]) << ','
            << format17(st.theta[i]) << ',' << format17(st.rho_t[i]) << '\n';
    write_file(rc.out_dir, "thermo.csv", csv.str());
    json roots = json::array();
    for (double r : st.q_roots) roots.push_back(r);
    json out{{"q_roots", roots},
             {"converged", st.report.converged},
             {"iterations", st.report.iterations},
             {"residual", st.report.residual}};
    write_file(rc.out_dir, "q_roots.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_roots(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    json out;
    out["q_roots"] = st.q_roots;
    auto caps = find_capital_lambdas(rc.fields, st,
                                     rc.has_lambda0 ? std::optional<double>(rc.lambda0)
                                                    : std::nullopt);
    if (caps) out["capital_lambdas"] = {caps->first, caps->second};
    else out["capital_lambdas"] = json::array();
    std::cout << out.dump(2) << "\n";
    write_file(rc.out_dir, "roots.json", out.dump(2) + "\n");
    return 0;
}

int cmd_delta(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    const double L = fermi_halfwidth(rc.thermo.T, rc.tail_tol) + 1.0;
    json out;
    cd split(rc.lambda0);
    if (rc.mode == "shifted" && !rc.t_list.empty()) {
        SaddleData sd = shifted_saddle(rc.fields, st, 2.0 * rc.lambda0 * rc.t_list[0],
                                       rc.t_list[0]);
        split = sd.Lambda;
        out["Lambda"] = cd_json(sd.Lambda);
    }
    DeltaExpansion de;
    if (rc.thermo.h > 0.0) {
        auto caps = find_capital_lambdas(rc.fields, st, rc.lambda0);
        const double radius =
            0.2 * std::min(caps->second - caps->first, rc.lambda0 - caps->second);
        Contour gamma = Contour::deformed(caps->first, caps->second, rc.lambda0, L, radius);
        de = delta_coeffs_on_contour(rc.fields, st, gamma, split, 24, rc.order);
        out["contour"] = json::parse(gamma.to_json());
    } else {
        QuadGrid g = gauss_panels(cd(-L), cd(split.real()), rc.panels, rc.order);
        g.append(gauss_panels(cd(split.real()), cd(L), rc.panels, rc.order));
        de = delta_coeffs(rc.fields, st, g, split);
        out["contour"] = json::parse(Contour::real_line(L).to_json());
    }
    out["delta0"] = cd_json(de.delta0);
    out["delta1"] = cd_json(de.delta1);
    std::cout << out.dump(2) << "\n";
    write_file(rc.out_dir, "delta.json", out.dump(2) + "\n");
    return 0;
}

KernelConfig kernel_config(const RunConfig& rc, const ThermoState& st, double x, double t) {
    KernelConfig kc;
    kc.fields = rc.fields;
    kc.thermo = st;
    kc.x = x;
    kc.t = t;
    kc.eps_reg = rc.eps_reg;
    kc.tail_tol = rc.tail_tol;
    kc.order = rc.order;
    return kc;
}

int cmd_fredholm(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    json rows = json::array();
    for (size_t k = 0; k < rc.t_list.size(); ++k) {
        const double t = rc.t_list[k];
        const double x = k < rc.x_list.size() ? rc.x_list[k] : 2.0 * rc.lambda0 * t;
        DetResult r = det_V(kernel_config(rc, st, x, t));
        rows.push_back(json{{"t", t},
                            {"x", x},
                            {"det", cd_json(r.det)},
                            {"logdet", cd_json(r.logdet)},
                            {"det_kt", cd_json(r.det_kt)},
                            {"nodes", r.n_nodes},
                            {"panels", r.panels},
                            {"eta", r.eta}});
    }
    json out{{"results", rows}};
    std::cout << out.dump(2) << "\n";
    write_file(rc.out_dir, "fredholm.json", out.dump(2) + "\n");
    return 0;
}

int cmd_localized_check(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    const double t = rc.t_list.empty() ? 10.0 : rc.t_list[0];
    ModelScalars ms = model_scalars(rc.fields, st, cd(rc.lambda0), 2.0 * rc.lambda0 * t, t);
    SectorJumpReport rep = verify_sector_jumps(ms, t);
    json out{{"nu", cd_json(ms.nu)},
             {"s", cd_json(ms.s)},
             {"identity_residual", rep.identity_residual},
             {"nu_invariance", rep.nu_invariance},
             {"jump_residuals", rep.residuals},
             {"max_residual", rep.max_residual()},
             {"tolerance", 1e-10},
             {"pass", rep.max_residual() < 1e-10}};
    std::cout << out.dump(2) << "\n";
    write_file(rc.out_dir, "localized.json", out.dump(2) + "\n");
    return out["pass"].get<bool>() ? 0 : 1;
}

json asym_row(const RunConfig& rc, const ThermoState& st, double x, double t) {
    AsymptoticResult r = rc.thermo.h < 0.0 ? assemble_B_neg(rc.fields, st, x, t)
                                           : assemble_B_pos(rc.fields, st, x, t);
    return json{{"x", x},
                {"t", t},
                {"lambda0", x / (2.0 * t)},
                {"Lambda", cd_json(r.Lambda)},
                {"nu", cd_json(r.nu)},
                {"exp_exponent", cd_json(r.exp_exponent)},
                {"power_exponent", cd_json(r.power_exponent)},
                {"log_scale", r.log_scale},
                {"constant_undetermined", r.constant_undetermined},
                {"scalar_prefactor", cd_json(r.scalar_prefactor)},
                {"remainder_order", r.remainder_order}};
}

std::string asym_csv_header() {
    return "x,t,lambda0,re_Lambda,im_Lambda,re_nu,im_nu,re_exp,im_exp,re_pow,im_pow\n";
}

std::string asym_csv_row(const json& r) {
    std::ostringstream os;
    os << format17(r["x"].get<double>()) << ',' << format17(r["t"].get<double>()) << ','
       << format17(r["lambda0"].get<double>()) << ','
       << format17(r["Lambda"][0].get<double>()) << ','
       << format17(r["Lambda"][1].get<double>()) << ','
       << format17(r["nu"][0].get<double>()) << ',' << format17(r["nu"][1].get<double>())
       << ',' << format17(r["exp_exponent"][0].get<double>()) << ','
       << format17(r["exp_exponent"][1].get<double>()) << ','
       << format17(r["power_exponent"][0].get<double>()) << ','
       << format17(r["power_exponent"][1].get<double>()) << '\n';
    return os.str();
}

int cmd_asym(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    std::ostringstream csv;
    csv << asym_csv_header();
    for (size_t k = 0; k < rc.t_list.size(); ++k) {
        const double t = rc.t_list[k];
        const double x = k < rc.x_list.size() ? rc.x_list[k] : 2.0 * rc.lambda0 * t;
        csv << asym_csv_row(asym_row(rc, st, x, t));
    }
    write_file(rc.out_dir, "asym.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_sweep(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    // evaluate sweep points concurrently, emit in input order
    std::vector<std::pair<double, double>> pts;
    for (double t : rc.t_list)
        if (rc.x_list.empty()) pts.emplace_back(2.0 * rc.lambda0 * t, t);
        else
            for (double x : rc.x_list) pts.emplace_back(x, t);
    std::vector<json> rows(pts.size());
    const int nw = std::max(1, rc.threads);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= pts.size()) return;
            rows[i] = asym_row(rc, st, pts[i].first, pts[i].second);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    std::ostringstream csv;
    csv << asym_csv_header();
    for (const json& r : rows) csv << asym_csv_row(r);
    write_file(rc.out_dir, "sweep.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_compare(const RunConfig& rc) {
    if (rc.t_list.empty()) throw ConfigError("compare: experiment.t list required");
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    const double max_t = 60.0;
    for (double t : rc.t_list)
        if (t > max_t)
            throw ConfigError("compare: t exceeds the oracle envelope, max admissible t = " +
                              std::to_string(max_t));
    std::vector<double> lndet_oracle, lndet_asym;
    for (double t : rc.t_list) {
        const double x = 2.0 * rc.lambda0 * t;
        DetResult r = det_V(kernel_config(rc, st, x, t));
        lndet_oracle.push_back(r.logdet.real());
        const cd lead = rc.mode == "plain"
                            ? logdet_leading(rc.fields, st, x, t, LeadingMode::plain)
                            : logdet_leading(rc.fields, st, x, t, LeadingMode::shifted);
        lndet_asym.push_back(lead.real());
    }
    // fit the undetermined constant by least squares
    double c0 = 0.0;
    for (size_t i = 0; i < rc.t_list.size(); ++i) c0 += lndet_oracle[i] - lndet_asym[i];
    c0 /= rc.t_list.size();
    json rows = json::array();
    for (size_t i = 0; i < rc.t_list.size(); ++i) {
        rows.push_back(json{{"t", rc.t_list[i]},
                            {"logdet_oracle", lndet_oracle[i]},
                            {"logdet_asym", lndet_asym[i]},
                            {"residual", lndet_oracle[i] - lndet_asym[i] - c0}});
    }
    json out{{"fitted_constant", c0}, {"mode", rc.mode}, {"points", rows}};
    std::cout << out.dump(2) << "\n";
    write_file(rc.out_dir, "compare.json", out.dump(2) + "\n");
    return 0;
}

int cmd_checks(const RunConfig& rc) {
    ThermoState st = solve_thermo(rc.thermo, rc.panels, rc.order, rc.tail_tol);
    validate_field_set(rc.fields);
    json out;
    bool pass = true;
    // rank-one identity checks
    {
        const double lam = rc.lambda0;
        RegVectors v = make_vectors(rc.fields, lam, rc.eps_reg,
                                    make_ugrid(rc.thermo.T, rc.tail_tol, lam, rc.eps_reg,
                                               16, 8, 12));
        const double n1 = std::abs(v.inner(1) - 1.0);
        const double n2 = std::abs(v.inner(2) - 1.0);
        const double t = rc.t_list.empty() ? 5.0 : rc.t_list[0];
        QuasidetReport q = quasidet_check(jump_G(rc.fields, st, lam, 2.0 * lam * t, t, v));
        out["rankone"] = {{"norm1", n1},
                          {"norm2", n2},
                          {"quasidet", q.max_residual()},
                          {"tolerance", 1e-8},
                          {"pass", n1 < 1e-10 && n2 < 1e-10 && q.max_residual() < 1e-8}};
        pass = pass && out["rankone"]["pass"].get<bool>();
    }
    // scalar factorization checks (negative-h configurations)
    if (rc.thermo.h < 0.0) {
        const double L = fermi_halfwidth(rc.thermo.T, rc.tail_tol) + 1.0;
        QuadGrid g = gauss_panels(cd(-L), cd(rc.lambda0), rc.panels, rc.order);
        g.append(gauss_panels(cd(rc.lambda0), cd(L), rc.panels, rc.order));
        double defect = 0.0;
        log_jump_on_grid(rc.fields, st, g, cd(rc.lambda0), &defect);
        DeltaExpansion de = delta_coeffs(rc.fields, st, g, cd(rc.lambda0));
        const cd z(0.0, 1e4);
        const cd ext = std::log(delta_solution(rc.fields, st, g, cd(rc.lambda0), z)) * z;
        const double extract_err =
            std::abs(ext - de.delta0) / std::max(1e-300, std::abs(de.delta0));
        out["scalar_rhp"] = {{"index_defect", defect},
                             {"delta0", cd_json(de.delta0)},
                             {"delta1", cd_json(de.delta1)},
                             {"extraction_relerr", extract_err},
                             {"tolerance", 1e-3},
                             {"pass", defect < 1e-6 && extract_err < 1e-3}};
        pass = pass && out["scalar_rhp"]["pass"].get<bool>();
    }
    // parabolic-cylinder checks
    {
        const cd nu(0.3, 0.4);
        auto [r1, r2] = recurrence_residuals(nu, cd(1.7, 0.4));
        const double d0err = std::abs(pcf_D(cd(0.0), cd(2.0)).value - std::exp(-1.0));
        out["pcf"] = {{"recurrence", std::max(std::abs(r1), std::abs(r2))},
                      {"d0_at_2", d0err},
                      {"tolerance", 1e-8},
                      {"pass", std::max(std::abs(r1), std::abs(r2)) < 1e-8 && d0err < 1e-13}};
        pass = pass && out["pcf"]["pass"].get<bool>();
    }
    // localized-model checks
    {
        const double t = rc.t_list.empty() ? 10.0 : rc.t_list[0];
        ModelScalars ms =
            model_scalars(rc.fields, st, cd(rc.lambda0), 2.0 * rc.lambda0 * t, t);
        SectorJumpReport rep = verify_sector_jumps(ms, t);
        out["localized"] = {{"max_residual", rep.max_residual()},
                            {"tolerance", 1e-10},
                            {"pass", rep.max_residual() < 1e-10}};
        pass = pass && out["localized"]["pass"].get<bool>();
    }
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    write_file(rc.out_dir, "checks.json", out.dump(2) + "\n");
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermal correlation asymptotics toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // flags may follow the subcommand
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::string mode_flag;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--threads", threads, "worker threads for sweeps");
    app.add_option("--mode", mode_flag, "plain | shifted (overrides config)");
    for (const char* name : {"thermo", "roots", "delta", "fredholm", "localized-check",
                             "asym", "compare", "checks", "sweep"})
        app.add_subcommand(name);
    CLI11_PARSE(app, argc, argv);
    try {
        RunConfig rc = load_config(config_path, threads);
        if (!out_dir.empty()) rc.out_dir = out_dir;
        if (!mode_flag.empty()) {
            if (mode_flag != "plain" && mode_flag != "shifted")
                throw ConfigError("mode must be 'plain' or 'shifted'");
            rc.mode = mode_flag;
        }
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "thermo") return cmd_thermo(rc);
        if (sub == "roots") return cmd_roots(rc);
        if (sub == "delta") return cmd_delta(rc);
        if (sub == "fredholm") return cmd_fredholm(rc);
        if (sub == "localized-check") return cmd_localized_check(rc);
        if (sub == "asym") return cmd_asym(rc);
        if (sub == "compare") return cmd_compare(rc);
        if (sub == "checks") return cmd_checks(rc);
        if (sub == "sweep") return cmd_sweep(rc);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NonconvergenceError& e) {
        std::cerr << "nonconvergence: " << e.what() << "\n";
        return 3;
    } catch (const AssumptionError& e) {
        std::cerr << "assumption violated: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
