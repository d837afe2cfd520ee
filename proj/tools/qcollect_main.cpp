// qcollect: command-line surface over the collectibility toolkit.
//
//   collect      pure/mixed collectibility of a state file, with verdict
//   crit-table   critical-purity table (both panels, 4 decimals)
//   werner-scan  two-qubit Werner thresholds over a lambda grid
//   witness      pseudopure two-qubit witness from a state or click records
//   simulate     seeded coincidence simulation plus the click-based witness
//
// Every output embeds tool version, seed and the flag echo. Exit codes:
// 0 success (any verdict), 2 input/validation error, 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcollect/bounds.hpp"
#include "qcollect/collect.hpp"
#include "qcollect/io.hpp"
#include "qcollect/pseudopure.hpp"
#include "qcollect/qcore.hpp"
#include "qcollect/rng.hpp"
#include "qcollect/version.hpp"
#include "qcollect/werner.hpp"

using json = nlohmann::ordered_json;
using namespace qcollect;

namespace {

int g_precision = 6;

// Round through a %.Ng print so emitted numbers match the precision flag.
double rounded(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", g_precision, v);
    return std::strtod(buf, nullptr);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", g_precision, v);
    return buf;
}

std::string fmt_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

json make_header(const std::string& command, std::uint64_t seed, const json& flags) {
    json h;
    h["tool"] = "qcollect";
    h["version"] = kVersion;
    h["command"] = command;
    h["seed"] = seed;
    h["flags"] = flags;
    return h;
}

std::string csv_header(const std::string& command, std::uint64_t seed,
                       const std::string& flag_echo) {
    std::ostringstream out;
    out << "# qcollect " << kVersion << " command=" << command << " seed=" << seed;
    if (!flag_echo.empty()) out << " " << flag_echo;
    out << "\n";
    return out.str();
}

void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
        if (!contents.empty() && contents.back() != '\n') std::cout << "\n";
    } else {
        io::write_text_file(path, contents);
    }
}

int optimizer_threads(int restarts) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("COLLECT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(1, restarts))));
}

json basis_to_json(const collect::SeparableBasisSet& basis) {
    json locals = json::array();
    for (const auto& u : basis.locals) {
        json rows = json::array();
        for (std::size_t r = 0; r < u.rows(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < u.cols(); ++c)
                row.push_back(json::array({rounded(u(r, c).real()), rounded(u(r, c).imag())}));
            rows.push_back(row);
        }
        locals.push_back(rows);
    }
    return json{{"locals", locals}};
}

json axis_to_json(const pseudopure::MeasurementAxis& axis) {
    return json{{"theta", rounded(axis.theta)}, {"phi", rounded(axis.phi)}};
}

json axis_witness_to_json(const pseudopure::AxisWitness& w, bool with_se) {
    json j;
    j["g_pp"] = rounded(w.gram.g_pp);
    j["g_mm"] = rounded(w.gram.g_mm);
    j["g_pm_abs2"] = rounded(w.gram.g_pm_abs2);
    j["overlap"] = rounded(w.gram.overlap);
    j["p_plus"] = rounded(w.p_plus);
    j["p_minus"] = rounded(w.p_minus);
    j["eta"] = rounded(w.eta);
    j["lhs"] = rounded(w.lhs);
    j["rhs"] = rounded(w.rhs);
    j["W"] = rounded(w.w);
    j["ya_bound"] = rounded(w.ya_bound);
    if (with_se) {
        j["lhs_se"] = rounded(w.lhs_se);
        j["rhs_se"] = rounded(w.rhs_se);
        j["W_se"] = rounded(w.w_se);
    }
    if (w.branch_degenerate) j["branch_degenerate"] = true;
    return j;
}

json witness_report_to_json(const pseudopure::WitnessReport& rep) {
    json j;
    j["primal"] = axis_witness_to_json(rep.primal, rep.from_counts);
    j["dual"] = axis_witness_to_json(rep.dual, rep.from_counts);
    j["budget"] = json{{"eps_plus", rounded(rep.budget.eps_plus)},
                       {"eps_minus", rounded(rep.budget.eps_minus)},
                       {"eps_plus_prime", rounded(rep.budget.eps_plus_prime)},
                       {"eps_minus_prime", rounded(rep.budget.eps_minus_prime)},
                       {"eps_prime_max", rounded(rep.budget.eps_prime_max)},
                       {"eta", rounded(rep.budget.eta)}};
    const pseudopure::YaCriteria crit = pseudopure::criteria_Ya_mixed(rep);
    j["ya_criteria"] = json{{"value", rounded(crit.value)},
                            {"threshold", rounded(crit.threshold)},
                            {"verdict", collect::to_string(crit.verdict)}};
    j["from_counts"] = rep.from_counts;
    if (rep.clamped_estimates) j["clamped_estimates"] = true;
    j["verdict"] = collect::to_string(rep.verdict);
    return j;
}

std::string click_record_to_csv(const pseudopure::ClickRecord& rec, const std::string& axis_name,
                                std::uint64_t seed, const std::string& flag_echo) {
    std::ostringstream out;
    out << csv_header("simulate", seed, flag_echo);
    out << "axis,branch_i,branch_j,coincidence_count,marginal_count_1,marginal_count_2,shots\n";
    const std::int64_t m1m = rec.shots - rec.marginal1_plus;
    const std::int64_t m2m = rec.shots - rec.marginal2_plus;
    out << axis_name << ",1,1," << rec.coinc_pp << "," << rec.marginal1_plus << ","
        << rec.marginal2_plus << "," << rec.shots << "\n";
    out << axis_name << ",2,2," << rec.coinc_mm << "," << m1m << "," << m2m << "," << rec.shots
        << "\n";
    out << axis_name << ",1,2," << rec.coinc_pm << "," << rec.marginal1_plus << "," << m2m << ","
        << rec.shots << "\n";
    return out.str();
}

pseudopure::ClickRecord click_record_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    pseudopure::ClickRecord rec;
    std::string line;
    bool have_pp = false, have_mm = false, have_pm = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("axis,", 0) == 0) continue;  // column header
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) throw ParseError("click CSV rows need 7 columns: " + path);
        const int bi = std::stoi(cells[1]);
        const int bj = std::stoi(cells[2]);
        const std::int64_t coinc = std::stoll(cells[3]);
        const std::int64_t m1 = std::stoll(cells[4]);
        const std::int64_t m2 = std::stoll(cells[5]);
        const std::int64_t shots = std::stoll(cells[6]);
        if (rec.shots == 0) rec.shots = shots;
        if (rec.shots != shots) throw ParseError("inconsistent shot counts in " + path);
        if (coinc < 0 || m1 < 0 || m2 < 0 || coinc > shots || m1 > shots || m2 > shots)
            throw ParseError("counts exceed the shot budget in " + path);
        rec.axis_label = cells[0];
        if (bi == 1 && bj == 1) {
            rec.coinc_pp = coinc;
            rec.marginal1_plus = m1;
            rec.marginal2_plus = m2;
            have_pp = true;
        } else if (bi == 2 && bj == 2) {
            rec.coinc_mm = coinc;
            have_mm = true;
        } else if ((bi == 1 && bj == 2) || (bi == 2 && bj == 1)) {
            rec.coinc_pm = coinc;
            have_pm = true;
        }
    }
    if (!have_pp || !have_mm || !have_pm)
        throw ParseError("click CSV is missing branch rows: " + path);
    if (rec.shots < 1) throw ParseError("click CSV carries no shots: " + path);
    return rec;
}

struct AxisFlag {
    double theta = 0.0;
    double phi = 0.0;
};

pseudopure::MeasurementAxis to_axis(const AxisFlag& f) {
    return pseudopure::MeasurementAxis{f.theta, f.phi};
}

// --- subcommands ------------------------------------------------------------

struct CollectArgs {
    std::string input;
    std::string output;
    bool pure = false;
    bool mixed = false;
    int restarts = 32;
    int max_iters = 2000;
    double objective_tol = 1e-10;
    std::uint64_t seed = 0;
};

int run_collect(const CollectArgs& args) {
    const io::LoadedState state = io::load_state(args.input);
    const bool as_pure = args.pure || (!args.mixed && std::holds_alternative<PureState>(state));

    collect::OptimizerConfig cfg;
    cfg.restarts = args.restarts;
    cfg.max_iters = args.max_iters;
    cfg.objective_tol = args.objective_tol;
    cfg.seed = args.seed;
    cfg.threads = optimizer_threads(cfg.restarts);

    json flags{{"input", args.input},
               {"mode", as_pure ? "pure" : "mixed"},
               {"restarts", cfg.restarts},
               {"max_iters", cfg.max_iters},
               {"objective_tol", cfg.objective_tol}};
    json out = make_header("collect", args.seed, flags);

    if (as_pure) {
        if (!std::holds_alternative<PureState>(state))
            throw ParseError("--pure requires a state file with amplitudes");
        const PureState& psi = std::get<PureState>(state);
        const collect::CollectReport rep = collect::collectibility_pure_max(psi, cfg);
        out["shape"] = json{{"k", psi.shape().subsystems}, {"n", psi.shape().local_dim}};
        out["value"] = rounded(rep.value);
        out["restarts_converged"] = rep.restarts_converged;
        out["bounds"] =
            json{{"universal", rounded(std::pow(psi.shape().local_dim,
                                                -double(psi.shape().local_dim)))},
                 {"universal_name", "N^-N"},
                 {"detection_threshold", rounded(rep.threshold)},
                 {"detection_threshold_name", rep.threshold_name}};
        out["verdict"] = collect::to_string(rep.verdict);
        out["basis"] = basis_to_json(rep.basis);
    } else {
        DensityMatrix rho = std::holds_alternative<DensityMatrix>(state)
                                ? std::get<DensityMatrix>(state)
                                : density_from_pure(std::get<PureState>(state));
        const collect::CollectReport rep = collect::collectibility_mixed_max(rho, cfg);
        const double pur = purity(rho);
        const double rn =
            bounds::r_bound(bounds::BoundQuery{rho.shape().total_dim(),
                                               static_cast<std::size_t>(rho.shape().local_dim),
                                               1.0, pur})
                .r;
        out["shape"] = json{{"k", rho.shape().subsystems}, {"n", rho.shape().local_dim}};
        out["purity"] = rounded(pur);
        out["value"] = rounded(rep.value);
        out["restarts_converged"] = rep.restarts_converged;
        out["bounds"] = json{{"universal", rounded(rn)},
                             {"universal_name", "r_N(N^K, 1, purity)"},
                             {"detection_threshold", rounded(rep.threshold)},
                             {"detection_threshold_name", rep.threshold_name}};
        out["verdict"] = collect::to_string(rep.verdict);
        out["basis"] = basis_to_json(rep.basis);
    }
    emit(args.output, out.dump(2) + "\n");
    return 0;
}

int run_crit_table(const std::string& output) {
    std::ostringstream out;
    out << csv_header("crit-table", 0, "");
    out << "panel,parameter,value,p_min,p_ppt,p_crit\n";
    const int dims[] = {2, 3, 4};
    for (int n : dims) {
        const TensorShape shape(2, n);
        const bounds::PurityFloors f = bounds::purity_floors(shape);
        out << "bipartite,N," << n << "," << fmt_fixed(f.p_min, 4) << ","
            << fmt_fixed(f.p_ppt, 4) << "," << fmt_fixed(bounds::critical_purity(shape), 4)
            << "\n";
    }
    for (int k : dims) {
        const TensorShape shape(k, 2);
        const bounds::PurityFloors f = bounds::purity_floors(shape);
        out << "qubits,K," << k << "," << fmt_fixed(f.p_min, 4) << "," << fmt_fixed(f.p_ppt, 4)
            << "," << fmt_fixed(bounds::critical_purity(shape), 4) << "\n";
    }
    emit(output, out.str());
    return 0;
}

int run_werner_scan(int lambda_steps, const std::string& output) {
    if (lambda_steps < 2) throw BadParams("need at least two lambda steps");
    std::ostringstream out;
    out << csv_header("werner-scan", 0, "lambda-steps=" + std::to_string(lambda_steps));
    out << "lambda,alpha_T,alpha_C\n";
    for (int i = 0; i < lambda_steps; ++i) {
        const double lambda = static_cast<double>(i) / (lambda_steps - 1);
        const werner::WernerThresholds t = werner::thresholds_two_qubit(lambda);
        out << fmt(lambda) << "," << fmt(t.alpha_t) << "," << fmt(t.alpha_c) << "\n";
    }
    emit(output, out.str());
    return 0;
}

struct WitnessArgs {
    std::string input;
    std::vector<std::string> clicks;
    std::string output;
    AxisFlag axis{0.0, 0.0};
    AxisFlag axis_prime{1.5707963267948966, 0.0};
};

int run_witness(const WitnessArgs& args) {
    const pseudopure::MeasurementAxis axis = to_axis(args.axis);
    const pseudopure::MeasurementAxis axis_prime = to_axis(args.axis_prime);

    json flags{{"axis", json{{"theta", args.axis.theta}, {"phi", args.axis.phi}}},
               {"axis_prime",
                json{{"theta", args.axis_prime.theta}, {"phi", args.axis_prime.phi}}}};

    pseudopure::WitnessReport rep;
    if (!args.clicks.empty()) {
        if (args.clicks.size() != 2)
            throw ParseError("--clicks needs exactly two CSV paths (one per axis)");
        flags["clicks"] = args.clicks;
        const pseudopure::ClickRecord rec = click_record_from_csv(args.clicks[0]);
        const pseudopure::ClickRecord rec_prime = click_record_from_csv(args.clicks[1]);
        rep = pseudopure::witness_from_clicks(rec, axis, rec_prime, axis_prime);
    } else {
        if (args.input.empty()) throw ParseError("witness needs --input or --clicks");
        flags["input"] = args.input;
        const io::LoadedState state = io::load_state(args.input);
        const DensityMatrix rho = std::holds_alternative<DensityMatrix>(state)
                                      ? std::get<DensityMatrix>(state)
                                      : density_from_pure(std::get<PureState>(state));
        rep = pseudopure::witness(rho, axis, axis_prime);
    }

    json out = make_header("witness", 0, flags);
    out["axes"] = json{{"primary", axis_to_json(axis)}, {"complementary", axis_to_json(axis_prime)}};
    out.update(witness_report_to_json(rep));
    emit(args.output, out.dump(2) + "\n");
    return 0;
}

struct SimulateArgs {
    std::string input;
    std::string prefix = "clicks";
    std::int64_t shots = 100000;
    std::uint64_t seed = 0;
    AxisFlag axis{0.0, 0.0};
    AxisFlag axis_prime{1.5707963267948966, 0.0};
};

int run_simulate(const SimulateArgs& args) {
    if (args.shots < 1) throw BadParams("need at least one shot");
    const io::LoadedState state = io::load_state(args.input);
    const DensityMatrix rho = std::holds_alternative<DensityMatrix>(state)
                                  ? std::get<DensityMatrix>(state)
                                  : density_from_pure(std::get<PureState>(state));
    const pseudopure::MeasurementAxis axis = to_axis(args.axis);
    const pseudopure::MeasurementAxis axis_prime = to_axis(args.axis_prime);

    const SplitMix64 base(args.seed);
    pseudopure::ClickRecord rec =
        pseudopure::simulate_clicks(rho, axis, args.shots, base.split(1).next());
    pseudopure::ClickRecord rec_prime =
        pseudopure::simulate_clicks(rho, axis_prime, args.shots, base.split(2).next());

    const std::string echo = "shots=" + std::to_string(args.shots) + " input=" + args.input;
    io::write_text_file(args.prefix + "_axis1.csv",
                        click_record_to_csv(rec, "axis1", args.seed, echo));
    io::write_text_file(args.prefix + "_axis2.csv",
                        click_record_to_csv(rec_prime, "axis2", args.seed, echo));

    json flags{{"input", args.input},
               {"shots", args.shots},
               {"output_prefix", args.prefix},
               {"axis", json{{"theta", args.axis.theta}, {"phi", args.axis.phi}}},
               {"axis_prime",
                json{{"theta", args.axis_prime.theta}, {"phi", args.axis_prime.phi}}}};
    json out = make_header("simulate", args.seed, flags);
    out["records"] =
        json::array({args.prefix + "_axis1.csv", args.prefix + "_axis2.csv"});

    try {
        const pseudopure::WitnessReport rep =
            pseudopure::witness_from_clicks(rec, axis, rec_prime, axis_prime);
        out.update(witness_report_to_json(rep));
    } catch (const InsufficientCounts& e) {
        out["warning"] = std::string(e.what());
        out["verdict"] = collect::to_string(collect::Verdict::INCONCLUSIVE);
    }

    const std::string report_path = args.prefix + "_report.json";
    io::write_text_file(report_path, out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collectibility toolkit for entanglement detection"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.add_option("--precision", g_precision, "significant digits in numeric output")
        ->capture_default_str();

    CollectArgs collect_args;
    CLI::App* collect_cmd = app.add_subcommand("collect", "maximize collectibility of a state");
    collect_cmd->add_option("--input", collect_args.input, "state JSON file")->required();
    collect_cmd->add_option("--output", collect_args.output, "report path (default stdout)");
    collect_cmd->add_flag("--pure", collect_args.pure, "pure-state collectibility");
    collect_cmd->add_flag("--mixed", collect_args.mixed, "mixed-state collectibility");
    collect_cmd->add_option("--restarts", collect_args.restarts)->capture_default_str();
    collect_cmd->add_option("--max-iters", collect_args.max_iters)->capture_default_str();
    collect_cmd->add_option("--objective-tol", collect_args.objective_tol)->capture_default_str();
    collect_cmd->add_option("--seed", collect_args.seed)->capture_default_str();

    std::string table_output;
    CLI::App* table_cmd = app.add_subcommand("crit-table", "critical purity table");
    table_cmd->add_option("--output", table_output, "CSV path (default stdout)");

    int lambda_steps = 21;
    std::string scan_output;
    CLI::App* scan_cmd = app.add_subcommand("werner-scan", "two-qubit Werner thresholds");
    scan_cmd->add_option("--lambda-steps", lambda_steps)->capture_default_str();
    scan_cmd->add_option("--output", scan_output, "CSV path (default stdout)");

    WitnessArgs witness_args;
    CLI::App* witness_cmd = app.add_subcommand("witness", "pseudopure two-qubit witness");
    witness_cmd->add_option("--input", witness_args.input, "state JSON file");
    witness_cmd->add_option("--clicks", witness_args.clicks,
                            "two click CSVs (primary axis, complementary axis)")
        ->expected(2);
    witness_cmd->add_option("--output", witness_args.output, "report path (default stdout)");
    witness_cmd->add_option("--axis", [&witness_args](const std::vector<std::string>& vals) {
        witness_args.axis.theta = std::stod(vals.at(0));
        witness_args.axis.phi = std::stod(vals.at(1));
        return true;
    }, "primary axis: theta phi (radians)")->expected(2);
    witness_cmd->add_option("--axis-prime", [&witness_args](const std::vector<std::string>& vals) {
        witness_args.axis_prime.theta = std::stod(vals.at(0));
        witness_args.axis_prime.phi = std::stod(vals.at(1));
        return true;
    }, "complementary axis: theta phi (radians)")->expected(2);

    SimulateArgs sim_args;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "simulate the coincidence experiment");
    sim_cmd->add_option("--input", sim_args.input, "state JSON file")->required();
    sim_cmd->add_option("--shots", sim_args.shots)->capture_default_str();
    sim_cmd->add_option("--seed", sim_args.seed)->capture_default_str();
    sim_cmd->add_option("--output-prefix", sim_args.prefix)->capture_default_str();
    sim_cmd->add_option("--axis", [&sim_args](const std::vector<std::string>& vals) {
        sim_args.axis.theta = std::stod(vals.at(0));
        sim_args.axis.phi = std::stod(vals.at(1));
        return true;
    }, "primary axis: theta phi (radians)")->expected(2);
    sim_cmd->add_option("--axis-prime", [&sim_args](const std::vector<std::string>& vals) {
        sim_args.axis_prime.theta = std::stod(vals.at(0));
        sim_args.axis_prime.phi = std::stod(vals.at(1));
        return true;
    }, "complementary axis: theta phi (radians)")->expected(2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*collect_cmd) return run_collect(collect_args);
        if (*table_cmd) return run_crit_table(table_output);
        if (*scan_cmd) return run_werner_scan(lambda_steps, scan_output);
        if (*witness_cmd) return run_witness(witness_args);
        if (*sim_cmd) return run_simulate(sim_args);
    } catch (const NoRoot& e) {
        std::cerr << "qcollect: " << e.what() << "\n";
        return 3;
    } catch (const NegativeRadicand& e) {
        std::cerr << "qcollect: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "qcollect: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qcollect: internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
