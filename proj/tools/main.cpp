// icudo: design-based subsampling approximation of U-statistics.
//
// Subcommands: oa (generate/verify orthogonal arrays), estimate (evaluate an
// estimator on a CSV data set), tune (pick the OA strength and level count
// for a run budget), bench (seeded Monte Carlo efficiency experiments).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "icudo/bench.hpp"
#include "icudo/estimators.hpp"
#include "icudo/hoeffding.hpp"
#include "icudo/oa.hpp"
#include "icudo/partition.hpp"
#include "icudo/sampling.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitData = 4;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ICUDO_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw icudo::DataError("ICUDO_SEED is not an integer");
        }
    }
    return 20240601;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw icudo::DataError("cannot open output file: " + out_path);
    f << text;
}

void echo_config(const nlohmann::ordered_json& cfg) {
    std::cerr << "config: " << cfg.dump() << "\n";
}

std::map<std::string, double> kernel_param_map(double x, double xprime, int cluster_axis,
                                               double cluster_cut) {
    std::map<std::string, double> p = {{"x", x}, {"xprime", xprime}, {"cluster_cut", cluster_cut}};
    if (cluster_axis > 0) p["cluster_axis"] = static_cast<double>(cluster_axis);
    return p;
}

struct OaArgs {
    int L = 0, d = 0, t = 0;
    long long m_target = 0;
    std::string verify_path, out;
};

int cmd_oa(const OaArgs& a, std::uint64_t seed, bool permute) {
    using namespace icudo;
    if (!a.verify_path.empty()) {
        const OrthogonalArray oa = read_oa_file(a.verify_path);
        const bool strength_ok = verify_strength(oa, oa.strength);
        bool cf_ok = true;
        std::string cf_note = "skipped (d <= t)";
        if (oa.factors > oa.strength) {
            cf_ok = verify_coincidence_free(oa);
            cf_note = cf_ok ? "pass" : "FAIL";
        }
        nlohmann::ordered_json rep;
        rep["file"] = a.verify_path;
        rep["oa"] = {{"m", oa.runs}, {"d", oa.factors}, {"L", oa.levels}, {"t", oa.strength}, {"lambda", oa.index}};
        rep["strength"] = strength_ok ? "pass" : "FAIL";
        rep["coincidence_free"] = cf_note;
        std::cout << rep.dump(2) << "\n";
        return (strength_ok && cf_ok) ? 0 : 1;
    }
    OrthogonalArray oa;
    if (a.m_target > 0) {
        oa = feasible_design(a.m_target, a.d, a.t);
    } else if (a.t == a.d) {
        oa = full_factorial_oa(a.L, a.d);
    } else {
        oa = bush_oa(a.L, a.d, a.t);
    }
    if (permute) oa = permute_levels(oa, Rng(seed));
    std::ostringstream os;
    write_oa_text(oa, os);
    write_output(os.str(), a.out);
    return 0;
}

struct EstimateArgs {
    std::string data_path, kernel, scheme, oa_path, dump_design;
    double x = 0.0, xprime = 0.0, cluster_cut = 0.0;
    int cluster_axis = 0;  // 0 = kernel default
    long long m = 0;
    int L = 0, t = 0, b = 0;
    bool debiased = false;
    long long budget = 1000000000LL;
    std::string out;
    bool timings = false;
};

int cmd_estimate(const EstimateArgs& a, std::uint64_t seed) {
    using namespace icudo;
    const auto t0 = std::chrono::steady_clock::now();
    const DataSet data = read_dataset_csv_file(a.data_path);
    const KernelSpec kernel = make_kernel_by_name(
        a.kernel, kernel_param_map(a.x, a.xprime, a.cluster_axis, a.cluster_cut), data.dim);
    std::vector<int> n_sizes;
    for (int k = 0; k < data.num_samples(); ++k) n_sizes.push_back(data.count(k));

    EstimateResult r;
    Rng rng(seed);
    auto run_design = [&](DesignSample ds) {
        if (!a.dump_design.empty()) {
            std::ofstream f(a.dump_design);
            if (!f) throw DataError("cannot open design dump file: " + a.dump_design);
            write_design_csv(ds, f);
        }
        return incomplete_u(data, kernel, ds);
    };
    if (a.scheme == "complete") {
        r = complete_u(data, kernel, a.budget);
    } else if (a.scheme == "v") {
        r = v_statistic(data, kernel, a.budget);
    } else if (a.scheme == "icur") {
        if (a.m <= 0) throw InfeasibleError("icur needs --m");
        r = run_design(icur_sample(n_sizes, kernel.orders, a.m, rng));
    } else if (a.scheme == "dc") {
        if (data.num_samples() != 1) throw InfeasibleError("dc is one-sample only");
        if (a.b <= 0) throw InfeasibleError("dc needs --b");
        r = run_design(dc_sample(n_sizes[0], kernel.order_total(), a.b, rng));
    } else if (a.scheme == "icudo") {
        const int d = kernel.order_total();
        OrthogonalArray oa;
        if (!a.oa_path.empty()) {
            oa = read_oa_file(a.oa_path);
            if (oa.factors != d)
                throw DataError("supplied OA has " + std::to_string(oa.factors) +
                                " columns, kernel needs " + std::to_string(d));
            if (!verify_strength(oa, oa.strength))
                throw DataError("supplied OA fails its claimed strength " +
                                std::to_string(oa.strength));
            if (oa.factors > oa.strength && !verify_coincidence_free(oa))
                std::cerr << "warning: supplied OA has a coincidence defect; proceeding, but the "
                             "variance guarantees for strength "
                          << oa.strength << " no longer hold\n";
        } else if (a.L > 0 && a.t > 0) {
            oa = (a.t == d) ? full_factorial_oa(a.L, d) : bush_oa(a.L, d, a.t);
        } else if (a.m > 0) {
            oa = feasible_design(a.m, d, a.t > 0 ? a.t : d);
        } else {
            throw InfeasibleError("icudo needs --oa FILE, --L and --t, or --m (+ optional --t)");
        }
        const auto parts = build_partitions(data, oa.levels, rng.child(1));
        r = run_design(a.debiased ? icudo_debiased_sample(oa, parts, kernel.orders, rng.child(2))
                                  : icudo_sample(oa, parts, kernel.orders, rng.child(2)));
    } else {
        throw InfeasibleError("unknown scheme '" + a.scheme +
                              "' (expected complete|v|icur|dc|icudo)");
    }

    nlohmann::ordered_json j;
    j["scheme"] = r.scheme;
    j["value"] = r.value;
    j["m"] = r.m_used;
    j["seed"] = seed;
    if (a.timings)
        j["elapsed_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (r.scale_factor != 1.0) j["scale_factor"] = r.scale_factor;
    j["kernel"] = a.kernel;
    j["data"] = a.data_path;
    write_output(j.dump(2) + "\n", a.out);
    return 0;
}

struct TuneArgs {
    std::string data_path, kernel, subsizes_csv, out;
    long long m_target = 0;
    int boots = 2000, probes = 100000;
    double step = 1e-3;
    double x = 0.0, xprime = 0.0;
};

int cmd_tune(const TuneArgs& a, std::uint64_t seed) {
    using namespace icudo;
    const DataSet data = read_dataset_csv_file(a.data_path);
    const KernelSpec kernel =
        make_kernel_by_name(a.kernel, kernel_param_map(a.x, a.xprime, 0, 0.0), data.dim);
    const int d = kernel.order_total();
    std::vector<int> subsizes;
    if (a.subsizes_csv.empty()) {
        subsizes = default_subsizes(d, data.count(0));
    } else {
        std::istringstream ss(a.subsizes_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) subsizes.push_back(std::stoi(tok));
    }
    Rng rng(seed);
    const auto comp = bootstrap_delta(data, kernel, subsizes, a.boots, rng.child(1));
    const double gsq = estimate_gamma_sq(data, kernel, a.probes, a.step, rng.child(2));
    const auto table = phi_table(a.m_target, kernel.orders, comp, gsq);
    const auto choice = choose_design(a.m_target, kernel.orders, comp, gsq);

    nlohmann::ordered_json j;
    j["kernel"] = a.kernel;
    j["m_target"] = a.m_target;
    j["delta_sq"] = nlohmann::ordered_json::array();
    for (int jj = 1; jj <= d; ++jj) j["delta_sq"].push_back(comp.delta_sq(jj));
    j["gamma_sq"] = gsq;
    j["phi_table"] = nlohmann::ordered_json::array();
    for (const auto& c : table)
        j["phi_table"].push_back(
            {{"t", c.strength}, {"L", c.levels}, {"m", c.m_realized}, {"phi", c.phi}});
    j["choice"] = {{"t", choice.strength},
                   {"L", choice.levels},
                   {"m", choice.m_realized},
                   {"phi", choice.phi}};
    write_output(j.dump(2) + "\n", a.out);
    return 0;
}

struct BenchArgs {
    std::string config_path, out, format = "csv";
    int replicates = 0, threads = -1;
    long long seed = -1;
    bool paper_style = false, timings = false;
};

int cmd_bench(const BenchArgs& a) {
    using namespace icudo;
    BenchConfig cfg = load_bench_config(a.config_path);
    if (a.replicates > 0) cfg.replicates = a.replicates;
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    if (a.threads >= 0) cfg.threads = a.threads;

    nlohmann::ordered_json echo;
    echo["config"] = a.config_path;
    echo["name"] = cfg.name;
    echo["kernel"] = cfg.kernel_name;
    echo["replicates"] = cfg.replicates;
    echo["seed"] = cfg.seed;
    echo["threads"] = cfg.threads;
    echo["reference"] = cfg.reference.mode;
    echo_config(echo);

    const BenchResult res = run_bench(cfg);
    TableFormat fmt;
    if (a.format == "csv")
        fmt = TableFormat::csv;
    else if (a.format == "markdown")
        fmt = TableFormat::markdown;
    else if (a.format == "json")
        fmt = TableFormat::json;
    else
        throw InfeasibleError("unknown format '" + a.format + "' (csv|markdown|json)");
    write_output(emit_table(res, cfg, fmt, a.paper_style, a.timings), a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fast approximation of U-statistics via design-based subsampling"};
    app.name("icudo");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    long long seed_flag = -1;
    app.add_option("--seed", seed_flag, "Master seed (falls back to ICUDO_SEED, then a fixed default)");

    OaArgs oa;
    bool oa_no_permute = false;
    auto* soa = app.add_subcommand("oa", "Generate or verify an orthogonal array");
    soa->add_option("--L", oa.L, "Level count");
    soa->add_option("--d", oa.d, "Factor (column) count");
    soa->add_option("--t", oa.t, "Strength");
    soa->add_option("--m-target", oa.m_target, "Pick L so the run count is nearest this target");
    soa->add_option("--verify", oa.verify_path, "Verify an OA text file instead of generating");
    soa->add_option("--out", oa.out, "Output path (default stdout)");
    soa->add_flag("--no-permute", oa_no_permute, "Skip the random level permutation");

    EstimateArgs es;
    auto* ses = app.add_subcommand("estimate", "Evaluate an estimator on a CSV data set");
    ses->add_option("--data", es.data_path, "Dataset CSV path")->required();
    ses->add_option("--kernel", es.kernel, "Kernel name")->required();
    ses->add_option("--scheme", es.scheme, "complete|v|icur|dc|icudo")->required();
    ses->add_option("--m", es.m, "Subsample size (icur/icudo)");
    ses->add_option("--L", es.L, "Group count (icudo)");
    ses->add_option("--t", es.t, "OA strength (icudo)");
    ses->add_option("--oa", es.oa_path, "Use a stored OA text file (icudo)");
    ses->add_option("--b", es.b, "Block size (dc)");
    ses->add_flag("--debiased", es.debiased, "Duplicate-free draws with weights (icudo)");
    ses->add_option("--x", es.x, "Kernel parameter x (monotone)");
    ses->add_option("--xprime", es.xprime, "Kernel parameter x' (monotone)");
    ses->add_option("--cluster-axis", es.cluster_axis, "cluster-cost: 1-based label axis");
    ses->add_option("--cluster-cut", es.cluster_cut, "cluster-cost: label threshold");
    ses->add_option("--budget", es.budget, "Kernel evaluation budget for complete/v");
    ses->add_option("--dump-design", es.dump_design, "Write the realized design to a CSV for audit/replay");
    ses->add_option("--out", es.out, "Output path (default stdout)");
    ses->add_flag("--timings", es.timings, "Include elapsed_ms (not byte-reproducible)");

    TuneArgs tu;
    auto* stu = app.add_subcommand("tune", "Choose the OA strength and level count for a budget");
    stu->add_option("--data", tu.data_path, "Dataset CSV path")->required();
    stu->add_option("--kernel", tu.kernel, "Kernel name")->required();
    stu->add_option("--m-target", tu.m_target, "Run budget m")->required();
    stu->add_option("--boots", tu.boots, "Bootstrap replicates per subsample size");
    stu->add_option("--subsizes", tu.subsizes_csv, "Comma-separated subsample sizes (default d+1..2d)");
    stu->add_option("--probes", tu.probes, "Finite-difference probes for gamma^2");
    stu->add_option("--step", tu.step, "Finite-difference step in rank units");
    stu->add_option("--x", tu.x, "Kernel parameter x (monotone)");
    stu->add_option("--xprime", tu.xprime, "Kernel parameter x' (monotone)");
    stu->add_option("--out", tu.out, "Output path (default stdout)");

    BenchArgs be;
    auto* sbe = app.add_subcommand("bench", "Run a seeded Monte Carlo benchmark config");
    sbe->add_option("--config", be.config_path, "Bench config JSON")->required();
    sbe->add_option("--replicates", be.replicates, "Override the replicate count");
    sbe->add_option("--threads", be.threads, "Worker count (0 = hardware)");
    sbe->add_option("--format", be.format, "csv|markdown|json");
    sbe->add_option("--out", be.out, "Output path (default stdout)");
    sbe->add_flag("--paper-style", be.paper_style, "Cap displayed efficiencies at 100%");
    sbe->add_flag("--timings", be.timings, "Include timing columns (not byte-reproducible)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : default_seed();
        if (soa->parsed()) {
            if (oa.verify_path.empty()) {
                if (oa.m_target > 0) {
                    if (oa.d <= 0 || oa.t <= 0) throw icudo::InfeasibleError("oa: --m-target needs --d and --t");
                } else if (oa.L <= 0 || oa.d <= 0 || oa.t <= 0) {
                    throw icudo::InfeasibleError("oa: need --L, --d, --t (or --m-target, or --verify)");
                }
            }
            nlohmann::ordered_json echo;
            echo["cmd"] = "oa";
            echo["L"] = oa.L;
            echo["d"] = oa.d;
            echo["t"] = oa.t;
            echo["m_target"] = oa.m_target;
            echo["verify"] = oa.verify_path;
            echo["seed"] = seed;
            echo_config(echo);
            return cmd_oa(oa, seed, !oa_no_permute);
        }
        if (ses->parsed()) {
            nlohmann::ordered_json echo;
            echo["cmd"] = "estimate";
            echo["data"] = es.data_path;
            echo["kernel"] = es.kernel;
            echo["scheme"] = es.scheme;
            echo["m"] = es.m;
            echo["L"] = es.L;
            echo["t"] = es.t;
            echo["b"] = es.b;
            echo["debiased"] = es.debiased;
            echo["seed"] = seed;
            echo_config(echo);
            return cmd_estimate(es, seed);
        }
        if (stu->parsed()) {
            nlohmann::ordered_json echo;
            echo["cmd"] = "tune";
            echo["data"] = tu.data_path;
            echo["kernel"] = tu.kernel;
            echo["m_target"] = tu.m_target;
            echo["boots"] = tu.boots;
            echo["subsizes"] = tu.subsizes_csv;
            echo["seed"] = seed;
            echo_config(echo);
            return cmd_tune(tu, seed);
        }
        return cmd_bench(be);
    } catch (const icudo::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const icudo::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const icudo::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
