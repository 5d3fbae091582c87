// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "icudo/bench.hpp"
#include "icudo/dataset.hpp"
#include "icudo/estimators.hpp"
#include "icudo/hoeffding.hpp"
#include "icudo/oa.hpp"
#include "icudo/partition.hpp"
#include "icudo/sampling.hpp"

using namespace icudo;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Exact conditional unbiasedness of the debiased scheme by enumeration.

double enumerated_expectation(const DataSet& data, const KernelSpec& kernel, int levels) {
    std::vector<Partition> parts;
    for (int k = 0; k < data.num_samples(); ++k) {
        std::vector<int> retained(static_cast<std::size_t>(data.count(k)));
        for (int i = 0; i < data.count(k); ++i) retained[static_cast<std::size_t>(i)] = i;
        parts.push_back(sort_partition(std::span<const double>(data.samples[static_cast<std::size_t>(k)]),
                                       retained, levels));
    }
    const auto oa = full_factorial_oa(levels, kernel.order_total());
    const auto atoms = enumerate_design_distribution(oa, parts, kernel.orders, /*debiased=*/true);
    std::vector<double> buf(static_cast<std::size_t>(kernel.order_total()));
    double e = 0;
    for (const auto& a : atoms) {
        int col = 0;
        for (int k = 0; k < data.num_samples(); ++k)
            for (int j = 0; j < kernel.orders[static_cast<std::size_t>(k)]; ++j, ++col)
                buf[static_cast<std::size_t>(col)] = data.value(k, a.tuple[static_cast<std::size_t>(col)]);
        e += a.prob * a.weight * kernel.eval(buf.data());
    }
    return e;
}

Outcome criterion1() {
    Outcome o;
    double worst = 0;
    const struct {
        int n, L;
    } shapes[] = {{4, 2}, {6, 3}};
    Rng master(11001);
    for (const auto& s : shapes) {
        for (int rep = 0; rep < 10; ++rep) {
            Rng r = master.child2(static_cast<std::uint64_t>(s.n), static_cast<std::uint64_t>(rep));
            // one sample, d = 2
            {
                std::vector<double> v(static_cast<std::size_t>(s.n));
                for (auto& x : v) x = r.next_normal();
                const auto data = DataSet::from_values(v);
                const auto k = kernel_product(2);
                const double u0 = complete_u(data, k).value;
                const double e = enumerated_expectation(data, k, s.L);
                worst = std::max(worst, std::abs(e - u0) / std::max(1.0, std::abs(u0)));
            }
            // two samples, d1 = d2 = 1
            {
                DataSet data;
                data.dim = 1;
                data.samples.resize(2);
                for (int k = 0; k < 2; ++k)
                    for (int i = 0; i < s.n; ++i)
                        data.samples[static_cast<std::size_t>(k)].push_back(r.next_normal());
                const auto k2 = kernel_ranking(RankingLoss::hinge);
                const double u0 = complete_u(data, k2).value;
                const double e = enumerated_expectation(data, k2, s.L);
                worst = std::max(worst, std::abs(e - u0) / std::max(1.0, std::abs(u0)));
            }
        }
    }
    o.pass = worst <= 1e-12;
    o.detail = "max relative deviation " + fmt(worst) + " (tolerance 1e-12)";
    return o;
}

// ---------------------------------------------------------------------------
// 2. OA correctness.

Outcome criterion2() {
    Outcome o;
    const auto a = bush_oa(3, 4, 2);
    const bool a_ok = a.runs == 9 && verify_strength(a, 2) && verify_coincidence_free(a);
    const auto b = bush_oa(3, 4, 3);
    const bool b_ok = b.runs == 27 && verify_strength(b, 3) && verify_coincidence_free(b);

    OrthogonalArray fx;
    fx.runs = 9;
    fx.factors = 4;
    fx.levels = 3;
    fx.strength = 2;
    fx.index = 1;
    const int rows[9][4] = {{1, 1, 1, 1}, {1, 2, 2, 2}, {1, 3, 3, 3}, {2, 1, 2, 3}, {2, 2, 3, 1},
                            {2, 3, 1, 2}, {3, 1, 3, 2}, {3, 2, 1, 3}, {3, 3, 2, 1}};
    for (auto& row : rows)
        for (int v : row) fx.entries.push_back(v);
    const bool fx_ok = verify_strength(fx, 2) && verify_coincidence_free(fx);

    o.pass = a_ok && b_ok && fx_ok;
    o.detail = std::string("OA(9,4,3,2) ") + (a_ok ? "ok" : "FAIL") + ", OA(27,4,3,3) " +
               (b_ok ? "ok" : "FAIL") + ", worked 9x4 fixture " + (fx_ok ? "ok" : "FAIL");
    return o;
}

// ---------------------------------------------------------------------------
// 3. Weight identities over random balanced partitions.

Outcome criterion3() {
    Outcome o;
    int checked = 0;
    Rng master(33003);
    for (int trial = 0; checked < 100; ++trial) {
        Rng r = master.child(static_cast<std::uint64_t>(trial));
        const int K = 1 + r.next_int(2);
        std::vector<int> orders;
        int d_total = 0;
        for (int k = 0; k < K; ++k) {
            const int dk = 1 + r.next_int(3);
            orders.push_back(dk);
            d_total += dk;
        }
        if (d_total < 2 || d_total > 4) continue;
        const int L = 2 + r.next_int(4);
        std::vector<Partition> parts;
        for (int k = 0; k < K; ++k) {
            const int group = 1 + r.next_int(6);
            const int n = L * group;
            std::vector<double> vals(static_cast<std::size_t>(n));
            for (auto& v : vals) v = r.next_unit();
            std::vector<int> retained(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) retained[static_cast<std::size_t>(i)] = i;
            parts.push_back(sort_partition(vals, retained, L));
        }
        unsigned long long total = 0;
        std::vector<int> labels(static_cast<std::size_t>(d_total), 1);
        while (true) {
            total += grid_distinct_count(labels, orders, parts);
            int j = d_total - 1;
            while (j >= 0 && ++labels[static_cast<std::size_t>(j)] > L) {
                labels[static_cast<std::size_t>(j)] = 1;
                --j;
            }
            if (j < 0) break;
        }
        if (total != s0_star_count(orders, parts)) {
            o.pass = false;
            o.detail = "identity failed at trial " + std::to_string(trial);
            return o;
        }
        ++checked;
    }
    o.detail = "sum of grid counts equals |S0*| exactly on 100 random balanced partitions";
    return o;
}

// ---------------------------------------------------------------------------
// 4. Closed-form MSE of the complete U-statistic vs Monte Carlo.

Outcome criterion4() {
    Outcome o;
    const double mu = 2.0;
    const auto comp = HoeffdingComponents::one_sample({mu * mu * mu * mu, mu * mu, 1.0});
    std::string parts;
    for (int n : {20, 50}) {
        BenchConfig cfg;
        cfg.name = "mse-check";
        cfg.kernel_name = "product3";
        DataModelSpec m;
        m.dist = "normal";
        m.n = n;
        m.mean = {mu};
        m.var = {1.0};
        cfg.samples = {m};
        cfg.theta = mu * mu * mu;
        cfg.replicates = 10000;
        cfg.seed = 44004;
        cfg.threads = 0;
        cfg.reference.mode = "complete-mc";
        const auto res = run_bench(cfg);
        const double analytic = mse_complete({n}, comp);
        const bool ok = std::abs(res.ref_mse - analytic) <= 3 * res.ref_se;
        if (!ok) o.pass = false;
        parts += "n=" + std::to_string(n) + ": mc " + fmt(res.ref_mse) + " vs analytic " +
                 fmt(analytic) + " (3se " + fmt(3 * res.ref_se) + (ok ? ") ok; " : ") FAIL; ");
    }
    o.detail = parts + "10^4 replicates each";
    return o;
}

// ---------------------------------------------------------------------------
// 5. Reduced-scale Table 1: ICUDO vs ICUR under a complete-MC reference.

Outcome criterion5(const std::string& config_dir) {
    Outcome o;
    BenchConfig cfg = load_bench_config(config_dir + "/table1.json");
    const auto res = run_bench(cfg);
    std::size_t icur_i = 0, icudo_i = 0;
    for (std::size_t ei = 0; ei < res.labels.size(); ++ei) {
        if (res.labels[ei] == "icur") icur_i = ei;
        if (res.labels[ei] == "icudo3") icudo_i = ei;
    }
    bool order_ok = true;
    for (std::size_t gi = 0; gi < res.m_grid.size(); ++gi) {
        const auto& a = res.cell(gi, icudo_i);
        const auto& b = res.cell(gi, icur_i);
        if (a.available && b.available && a.eff < b.eff) order_ok = false;
    }
    const auto& icur_at_n = res.cell(0, icur_i);
    const auto& icudo_at_n = res.cell(0, icudo_i);
    const bool icur_below = icur_at_n.eff < 0.80;
    const bool icudo_above_icur = icudo_at_n.eff > icur_at_n.eff;
    o.pass = order_ok && icur_below && icudo_above_icur;
    o.detail = "Eff(icudo)>=Eff(icur) at every m " + std::string(order_ok ? "ok" : "FAIL") +
               "; at m=n: icur " + fmt(icur_at_n.eff) + " (<0.80 " + (icur_below ? "ok" : "FAIL") +
               "), icudo " + fmt(icudo_at_n.eff) + " (" + (icudo_above_icur ? "above icur" : "FAIL") +
               ")";
    return o;
}

// ---------------------------------------------------------------------------
// 6. Table 2 orderings with paired two-standard-error margins.

// Paired MSE difference B - A over shared replicates; positive means A is
// more efficient. Returns the z-score of the difference.
double paired_z(const BenchCell& a, const BenchCell& b, double theta) {
    const int R = static_cast<int>(a.estimates.size());
    double dmean = 0;
    for (int r = 0; r < R; ++r) {
        const double ea = a.estimates[static_cast<std::size_t>(r)] - theta;
        const double eb = b.estimates[static_cast<std::size_t>(r)] - theta;
        dmean += eb * eb - ea * ea;
    }
    dmean /= R;
    double dvar = 0;
    for (int r = 0; r < R; ++r) {
        const double ea = a.estimates[static_cast<std::size_t>(r)] - theta;
        const double eb = b.estimates[static_cast<std::size_t>(r)] - theta;
        const double dd = (eb * eb - ea * ea) - dmean;
        dvar += dd * dd;
    }
    const double dse = std::sqrt(dvar / R / R);
    return dse > 0 ? dmean / dse : (dmean > 0 ? 1e9 : -1e9);
}

Outcome criterion6(const std::string& config_dir) {
    Outcome o;
    std::string detail;

    // mu = 2: oa2 > oa3 > rnd at every m/n >= 0.05, by 2 paired se
    BenchConfig cfg2 = load_bench_config(config_dir + "/table2.json");
    const auto res2 = run_bench(cfg2);
    std::size_t rnd_i = 0, oa2_i = 0, oa3_i = 0;
    for (std::size_t ei = 0; ei < res2.labels.size(); ++ei) {
        if (res2.labels[ei] == "rnd") rnd_i = ei;
        if (res2.labels[ei] == "oa2") oa2_i = ei;
        if (res2.labels[ei] == "oa3") oa3_i = ei;
    }
    const double n = static_cast<double>(cfg2.samples[0].n);
    double min_z_a = 1e300, min_z_b = 1e300;
    std::string zs_a;
    for (std::size_t gi = 0; gi < res2.m_grid.size(); ++gi) {
        if (static_cast<double>(res2.m_grid[gi]) / n < 0.05) continue;
        const double za = paired_z(res2.cell(gi, oa2_i), res2.cell(gi, oa3_i), res2.theta_used);
        zs_a += (zs_a.empty() ? "" : "/") + fmt(za);
        min_z_a = std::min(min_z_a, za);
        min_z_b = std::min(min_z_b, paired_z(res2.cell(gi, oa3_i), res2.cell(gi, rnd_i), res2.theta_used));
    }
    const bool mu2_oa23 = min_z_a >= 2.0;
    const bool mu2_oa3rnd = min_z_b >= 2.0;
    detail += "mu=2: oa2>oa3 z by row " + zs_a + (mu2_oa23 ? " ok" : " FAIL") +
              ", oa3>rnd min z " + fmt(min_z_b) + (mu2_oa3rnd ? " ok" : " FAIL");
    detail += " [eff at m/n=0.05: oa2 " + fmt(res2.cell(2, oa2_i).eff) + ", oa3 " +
              fmt(res2.cell(2, oa3_i).eff) + ", rnd " + fmt(res2.cell(2, rnd_i).eff) + "]";

    // cross-checks at m/n = 1
    const std::size_t last = res2.m_grid.size() - 1;
    const auto& rnd_cell = res2.cell(last, rnd_i);
    const bool near_paper = std::abs(rnd_cell.eff - 0.6751) <= 0.08;
    const auto comp = HoeffdingComponents::one_sample(cfg2.reference.delta_sq);
    const double predicted =
        mse_complete({cfg2.samples[0].n}, comp) /
        mse_icur_approx({cfg2.samples[0].n}, res2.cell(last, rnd_i).m_realized, comp);
    const bool near_theory = std::abs(rnd_cell.eff - predicted) <= 3 * rnd_cell.eff_se;
    detail += "; Eff(rnd,m=n) " + fmt(rnd_cell.eff) + " vs 0.6751+-0.08 " +
              (near_paper ? "ok" : "FAIL") + ", vs prediction " + fmt(predicted) + " within 3se " +
              (near_theory ? "ok" : "FAIL");

    // mu = 0.5: oa3 > oa2 at every m/n >= 0.05
    BenchConfig cfgb = load_bench_config(config_dir + "/table2b.json");
    const auto resb = run_bench(cfgb);
    for (std::size_t ei = 0; ei < resb.labels.size(); ++ei) {
        if (resb.labels[ei] == "oa2") oa2_i = ei;
        if (resb.labels[ei] == "oa3") oa3_i = ei;
    }
    double min_z_c = 1e300;
    for (std::size_t gi = 0; gi < resb.m_grid.size(); ++gi) {
        if (static_cast<double>(resb.m_grid[gi]) / n < 0.05) continue;
        min_z_c = std::min(min_z_c, paired_z(resb.cell(gi, oa3_i), resb.cell(gi, oa2_i), resb.theta_used));
    }
    const bool mu05 = min_z_c >= 2.0;
    detail += "; mu=0.5: oa3>oa2 min z " + fmt(min_z_c) + (mu05 ? " ok" : " FAIL");

    o.pass = mu2_oa23 && mu2_oa3rnd && near_paper && near_theory && mu05;
    o.detail = detail;
    return o;
}

// ---------------------------------------------------------------------------
// 7. Kendall reference values.

Outcome criterion7() {
    Outcome o;
    BenchConfig cfg;
    cfg.name = "kendall-acceptance";
    cfg.kernel_name = "kendall";
    DataModelSpec m;
    m.dist = "normal";
    m.n = 10000;
    m.dim = 2;
    m.mean = {0.0, 0.0};
    m.var = {3.0, 1.0};
    cfg.samples = {m};
    cfg.theta = 0.0;
    EstimatorSpec rnd, oa;
    rnd.label = "rnd";
    rnd.scheme = "icur";
    oa.label = "oa";
    oa.scheme = "icudo";
    oa.strength = 2;
    oa.debiased = true;
    cfg.estimators = {rnd, oa};
    cfg.m_grid = {100, 10000};
    cfg.replicates = 200;
    cfg.seed = 77007;
    cfg.threads = 0;
    cfg.metric = "mse";
    cfg.reference.mode = "complete-mc";
    const auto res = run_bench(cfg);

    const double mse0 = res.ref_mse;
    const bool ref_ok = mse0 >= 8.97e-5 * 0.85 && mse0 <= 8.97e-5 * 1.15;
    const double oa_big = res.cell(1, 1).mse;
    const double r_big = oa_big / 9e-5;
    const bool oa_ok = r_big <= 1.5 && r_big >= 1.0 / 1.5;
    const double ratio = res.cell(0, 0).mse / res.cell(0, 1).mse;
    const bool ratio_ok = ratio >= 5.0;

    o.pass = ref_ok && oa_ok && ratio_ok;
    o.detail = "MSE(U0) " + fmt(mse0) + " vs 8.97e-5 +-15% " + (ref_ok ? "ok" : "FAIL") +
               "; MSE(oa,m=1e4) " + fmt(oa_big) + " vs 9e-5 factor<=1.5 " + (oa_ok ? "ok" : "FAIL") +
               "; MSE(rnd)/MSE(oa) at m=100 = " + fmt(ratio) + " (>=5 " + (ratio_ok ? "ok" : "FAIL") +
               ")";
    return o;
}

// ---------------------------------------------------------------------------
// 8. Debiasing gain in the degenerate case.

Outcome criterion8() {
    Outcome o;
    BenchConfig cfg;
    cfg.name = "degenerate-debias";
    cfg.kernel_name = "product2";
    DataModelSpec m;
    m.dist = "normal";
    m.n = 1000;
    m.mean = {0.0};
    m.var = {1.0};
    cfg.samples = {m};
    cfg.theta = 0.0;
    EstimatorSpec plain, deb;
    plain.label = "plain";
    plain.scheme = "icudo";
    plain.strength = 2;
    deb.label = "debiased";
    deb.scheme = "icudo";
    deb.strength = 2;
    deb.debiased = true;
    cfg.estimators = {plain, deb};
    cfg.m_grid = {100, 400, 2500, 10000};
    cfg.replicates = 500;
    cfg.seed = 88008;
    cfg.threads = 0;
    cfg.reference.mode = "complete-mc";
    const auto res = run_bench(cfg);
    const std::size_t last = cfg.m_grid.size() - 1;
    const double eff_plain = res.cell(last, 0).eff;
    const double eff_deb = res.cell(last, 1).eff;
    o.pass = eff_deb - eff_plain >= 0.20;
    o.detail = "at m=10^4: debiased " + fmt(eff_deb) + " vs plain " + fmt(eff_plain) + " (gap " +
               fmt(eff_deb - eff_plain) + ", need >= 0.20)";
    return o;
}

// ---------------------------------------------------------------------------
// 9. Tuner choices through the CLI.

std::string run_cli_capture(const std::string& args, int& exit_code) {
    const std::string cmd = std::string(ICUDO_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        exit_code = -1;
        return out;
    }
    while (fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
    const int status = pclose(p);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

int parse_choice_t(const std::string& json_out) {
    const auto pos = json_out.find("\"choice\"");
    if (pos == std::string::npos) return -1;
    const auto tpos = json_out.find("\"t\":", pos);
    if (tpos == std::string::npos) return -1;
    return std::atoi(json_out.c_str() + tpos + 4);
}

Outcome criterion9() {
    Outcome o;
    // data sets
    {
        std::ofstream f("/tmp/icudo_acc_sign.csv");
        f << "x\n";
        Rng r(99009);
        f.precision(17);
        for (int i = 0; i < 10000; ++i) f << r.next_normal() << "\n";
    }
    {
        std::ofstream f("/tmp/icudo_acc_prod.csv");
        f << "x\n";
        Rng r(99010);
        f.precision(17);
        for (int i = 0; i < 10000; ++i) f << 2.0 + r.next_normal() << "\n";
    }
    int code1 = 0, code2 = 0;
    const auto out1 = run_cli_capture(
        "--seed 5 tune --data /tmp/icudo_acc_sign.csv --kernel sign3 --m-target 1000000 "
        "--boots 20000",
        code1);
    const auto out2 = run_cli_capture(
        "--seed 5 tune --data /tmp/icudo_acc_prod.csv --kernel product3 --m-target 10000 "
        "--boots 20000",
        code2);
    const int t1 = parse_choice_t(out1);
    const int t2 = parse_choice_t(out2);
    const bool ok1 = code1 == 0 && t1 == 3;
    const bool ok2 = code2 == 0 && t2 == 2;
    o.pass = ok1 && ok2;
    o.detail = "symmetric-sign data, m=10^6: t=" + std::to_string(t1) + (ok1 ? " ok" : " FAIL") +
               "; product data (mu=2), m=10^4: t=" + std::to_string(t2) + (ok2 ? " ok" : " FAIL");
    return o;
}

// ---------------------------------------------------------------------------
// 10. Worker-count determinism.

Outcome criterion10(const std::string& config_dir) {
    Outcome o;
    BenchConfig cfg = load_bench_config(config_dir + "/table2b.json");
    cfg.replicates = 40;
    cfg.threads = 1;
    const auto r1 = run_bench(cfg);
    const auto t1 = emit_table(r1, cfg, TableFormat::csv);
    const auto j1 = emit_table(r1, cfg, TableFormat::json);
    cfg.threads = 8;
    const auto r8 = run_bench(cfg);
    const auto t8 = emit_table(r8, cfg, TableFormat::csv);
    const auto j8 = emit_table(r8, cfg, TableFormat::json);
    o.pass = (t1 == t8) && (j1 == j8);
    o.detail = o.pass ? "csv and json outputs byte-identical at 1 and 8 workers"
                      : "outputs differ between 1 and 8 workers";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string config_dir = "tools/configs";
    if (argc > 1) config_dir = argv[1];
#ifdef ICUDO_CONFIG_DIR
    if (argc <= 1) config_dir = ICUDO_CONFIG_DIR;
#endif

    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> entries = {
        {1, "debiased-exact-unbiasedness", [] { return criterion1(); }},
        {2, "oa-correctness", [] { return criterion2(); }},
        {3, "weight-identities", [] { return criterion3(); }},
        {4, "mse-closed-form-vs-mc", [] { return criterion4(); }},
        {5, "table1-reduced", [&] { return criterion5(config_dir); }},
        {6, "table2-orderings", [&] { return criterion6(config_dir); }},
        {7, "kendall-reference", [] { return criterion7(); }},
        {8, "degenerate-debias-gain", [] { return criterion8(); }},
        {9, "tuner-choices", [] { return criterion9(); }},
        {10, "determinism", [&] { return criterion10(config_dir); }},
    };

    int failures = 0;
    for (const auto& e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d %-28s %s  [%.1fs]  %s\n", e.id, e.name,
                    o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
