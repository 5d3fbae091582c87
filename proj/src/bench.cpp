#include "icudo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "icudo/estimators.hpp"
#include "icudo/oa.hpp"
#include "icudo/partition.hpp"
#include "icudo/sampling.hpp"

#include "json.hpp"

namespace icudo {

namespace {

constexpr std::uint64_t kTagData = 0x11;
constexpr std::uint64_t kTagDesign = 0x22;
constexpr std::uint64_t kTagPartition = 0x33;
constexpr std::uint64_t kTagPilot = 0x44;

double comb_d(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_eff(double v, bool paper_style) {
    char buf[40];
    if (paper_style && v > 1.0) return "100%";
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

DataSet generate_data(const std::vector<DataModelSpec>& models, Rng rng) {
    DataSet d;
    if (models.empty()) throw InfeasibleError("generate_data: no sample models");
    d.dim = models.front().dim;
    for (const auto& m : models)
        if (m.dim != d.dim) throw InfeasibleError("generate_data: mixed dimensions");
    for (std::size_t k = 0; k < models.size(); ++k) {
        const auto& m = models[k];
        Rng sr = rng.child(k);
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(m.n) * d.dim);
        for (int i = 0; i < m.n; ++i) {
            for (int c = 0; c < m.dim; ++c) {
                double v;
                if (m.dist == "normal") {
                    const double mu = c < static_cast<int>(m.mean.size()) ? m.mean[static_cast<std::size_t>(c)] : 0.0;
                    const double va = c < static_cast<int>(m.var.size()) ? m.var[static_cast<std::size_t>(c)] : 1.0;
                    v = mu + std::sqrt(va) * sr.next_normal();
                } else if (m.dist == "uniform") {
                    v = sr.next_unit();
                } else if (m.dist == "pareto") {
                    // inverse of phi(x) = 1 - (b/x)^a, so phi(X) ~ U(0,1)
                    const double u = sr.next_unit();
                    v = m.pareto_scale * std::pow(1.0 - u, -1.0 / m.pareto_shape);
                } else {
                    throw InfeasibleError("generate_data: unknown distribution '" + m.dist + "'");
                }
                flat.push_back(v);
            }
        }
        d.samples.push_back(std::move(flat));
    }
    return d;
}

BenchConfig parse_bench_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw DataError(std::string("bench config: JSON parse error: ") + e.what());
    }
    BenchConfig cfg;
    try {
        cfg.name = j.value("name", "bench");
        const auto& jk = j.at("kernel");
        cfg.kernel_name = jk.at("name").get<std::string>();
        if (jk.contains("params"))
            for (auto it = jk["params"].begin(); it != jk["params"].end(); ++it)
                cfg.kernel_params[it.key()] = it.value().get<double>();
        for (const auto& js : j.at("data").at("samples")) {
            DataModelSpec m;
            m.dist = js.value("dist", "normal");
            m.n = js.at("n").get<int>();
            m.dim = js.value("dim", 1);
            if (js.contains("mean")) m.mean = js["mean"].get<std::vector<double>>();
            if (js.contains("var")) m.var = js["var"].get<std::vector<double>>();
            m.pareto_shape = js.value("shape", 1.0);
            m.pareto_scale = js.value("scale", 1.0);
            cfg.samples.push_back(std::move(m));
        }
        if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
        for (const auto& je : j.at("estimators")) {
            EstimatorSpec e;
            e.scheme = je.at("scheme").get<std::string>();
            e.label = je.value("label", e.scheme);
            e.strength = je.value("t", 0);
            e.debiased = je.value("debiased", false);
            e.auto_tune = je.value("auto_tune", false);
            cfg.estimators.push_back(std::move(e));
        }
        cfg.m_grid = j.at("m_grid").get<std::vector<long long>>();
        cfg.replicates = j.at("replicates").get<int>();
        cfg.seed = j.value("seed", 1ULL);
        cfg.threads = j.value("threads", 0);
        cfg.metric = j.value("metric", "eff");
        cfg.complete_budget = j.value("complete_budget", 1000000000LL);
        if (j.contains("reference")) {
            const auto& jr = j["reference"];
            cfg.reference.mode = jr.value("mode", "complete-mc");
            if (jr.contains("delta_sq")) cfg.reference.delta_sq = jr["delta_sq"].get<std::vector<double>>();
            cfg.reference.value = jr.value("value", 0.0);
            cfg.reference.note = jr.value("note", "");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bench config: ") + e.what());
    }
    if (cfg.replicates < 2) throw InfeasibleError("bench config: replicates must be >= 2");
    if (cfg.reference.mode == "fixed-value" && cfg.reference.note.empty())
        throw InfeasibleError("bench config: fixed-value reference requires a provenance note");
    if (cfg.metric != "eff" && cfg.metric != "mse")
        throw InfeasibleError("bench config: metric must be 'eff' or 'mse'");
    return cfg;
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open bench config: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_bench_config(ss.str());
}

namespace {

// Static description of one estimator cell, fixed across replicates.
struct CellPlan {
    EstimatorSpec spec;
    long long m_target = 0;
    bool available = true;
    std::string note;
    long long m_realized = 0;
    int dc_block = 0;
    OrthogonalArray oa;  // icudo only
};

CellPlan make_plan(const EstimatorSpec& spec, long long m_target, const KernelSpec& kernel,
                   const std::vector<int>& n_sizes, int tuned_t) {
    CellPlan p;
    p.spec = spec;
    p.m_target = m_target;
    const int d = kernel.order_total();
    try {
        if (spec.scheme == "icur") {
            double cap = 1.0;
            for (std::size_t k = 0; k < n_sizes.size(); ++k)
                cap *= comb_d(n_sizes[k], kernel.orders[k]);
            if (static_cast<double>(m_target) > cap)
                throw InfeasibleError("m exceeds the combination count");
            p.m_realized = m_target;
        } else if (spec.scheme == "dc") {
            if (n_sizes.size() != 1) throw InfeasibleError("dc is one-sample only");
            const int n = n_sizes[0];
            long long best_m = -1;
            int best_b = 0;
            for (int b = d; b <= n; ++b) {
                const double md = static_cast<double>(n / b) * comb_d(b, d);
                if (md > 4.0 * static_cast<double>(m_target) && best_m > 0) break;
                const long long m = static_cast<long long>(md);
                if (m < 1) continue;
                if (best_m < 0 || std::llabs(m - m_target) < std::llabs(best_m - m_target)) {
                    best_m = m;
                    best_b = b;
                }
            }
            if (best_m < 0 ||
                std::llabs(best_m - m_target) > static_cast<long long>(0.25 * static_cast<double>(m_target)))
                throw InfeasibleError("no block size b gives m within 25% of the target");
            p.dc_block = best_b;
            p.m_realized = best_m;
        } else if (spec.scheme == "icudo") {
            int t = spec.strength > 0 ? spec.strength : d;
            if (spec.auto_tune) t = tuned_t;
            p.oa = feasible_design(m_target, d, t);
            p.m_realized = p.oa.runs;
            for (std::size_t k = 0; k < n_sizes.size(); ++k)
                if (n_sizes[k] / p.oa.levels < kernel.orders[k])
                    throw InfeasibleError("groups of " + std::to_string(n_sizes[k] / p.oa.levels) +
                                          " cannot host " + std::to_string(kernel.orders[k]) +
                                          " distinct draws");
            p.note = "OA(" + std::to_string(p.oa.runs) + "," + std::to_string(p.oa.factors) + "," +
                     std::to_string(p.oa.levels) + "," + std::to_string(p.oa.strength) + ")" +
                     (spec.debiased ? " debiased" : "");
        } else {
            throw InfeasibleError("unknown scheme '" + spec.scheme + "'");
        }
    } catch (const std::exception& e) {
        p.available = false;
        p.note = e.what();
    }
    return p;
}

}  // namespace

BenchResult run_bench(const BenchConfig& cfg) {
    const DataSet probe = generate_data(cfg.samples, Rng(1));
    const KernelSpec kernel = make_kernel_by_name(cfg.kernel_name, cfg.kernel_params, probe.dim);
    if (kernel.num_samples() != static_cast<int>(cfg.samples.size()))
        throw InfeasibleError("bench: kernel expects " + std::to_string(kernel.num_samples()) +
                              " samples, config has " + std::to_string(cfg.samples.size()));
    std::vector<int> n_sizes;
    for (const auto& m : cfg.samples) n_sizes.push_back(m.n);
    const Rng master(cfg.seed);

    // Tune once per grid point on pilot data when requested.
    std::vector<int> tuned_t(cfg.m_grid.size(), kernel.order_total());
    if (std::any_of(cfg.estimators.begin(), cfg.estimators.end(),
                    [](const EstimatorSpec& e) { return e.auto_tune; })) {
        const DataSet pilot = generate_data(cfg.samples, master.child(kTagPilot));
        const auto subsizes = default_subsizes(kernel.order_total(), pilot.count(0));
        const auto comp = bootstrap_delta(pilot, kernel, subsizes, 20000, master.child2(kTagPilot, 1));
        const double gsq =
            estimate_gamma_sq(pilot, kernel, 100000, 1e-3, master.child2(kTagPilot, 2));
        for (std::size_t gi = 0; gi < cfg.m_grid.size(); ++gi)
            tuned_t[gi] = choose_design(cfg.m_grid[gi], kernel.orders, comp, gsq).strength;
    }

    // Fixed per-cell plans.
    const std::size_t G = cfg.m_grid.size(), E = cfg.estimators.size();
    std::vector<CellPlan> plans;
    plans.reserve(G * E);
    for (std::size_t gi = 0; gi < G; ++gi)
        for (std::size_t ei = 0; ei < E; ++ei)
            plans.push_back(make_plan(cfg.estimators[ei], cfg.m_grid[gi], kernel, n_sizes, tuned_t[gi]));

    const int R = cfg.replicates;
    const bool want_u0 = cfg.reference.mode == "complete-mc";
    std::vector<double> u0(static_cast<std::size_t>(want_u0 ? R : 0), 0.0);
    std::vector<std::vector<double>> est(plans.size(), std::vector<double>(static_cast<std::size_t>(R), 0.0));
    std::vector<std::vector<double>> wall(plans.size(), std::vector<double>(static_cast<std::size_t>(R), 0.0));

    // Levels needed per replicate (partition cache keys).
    std::vector<int> level_set;
    for (const auto& p : plans)
        if (p.available && p.spec.scheme == "icudo") level_set.push_back(p.oa.levels);
    std::sort(level_set.begin(), level_set.end());
    level_set.erase(std::unique(level_set.begin(), level_set.end()), level_set.end());

    auto run_replicate = [&](int r) {
        const DataSet data = generate_data(cfg.samples, master.child2(kTagData, static_cast<std::uint64_t>(r)));
        if (want_u0) u0[static_cast<std::size_t>(r)] = complete_u(data, kernel, cfg.complete_budget).value;

        std::vector<std::vector<Partition>> parts_by_level(level_set.size());
        for (std::size_t li = 0; li < level_set.size(); ++li)
            parts_by_level[li] = build_partitions(
                data, level_set[li], master.child2(kTagPartition, static_cast<std::uint64_t>(r)).child(
                                         static_cast<std::uint64_t>(level_set[li])));

        for (std::size_t ci = 0; ci < plans.size(); ++ci) {
            const auto& p = plans[ci];
            if (!p.available) continue;
            const auto t0 = std::chrono::steady_clock::now();
            Rng drng = master.child2(kTagDesign, static_cast<std::uint64_t>(ci)).child(static_cast<std::uint64_t>(r));
            DesignSample ds;
            if (p.spec.scheme == "icur") {
                ds = icur_sample(n_sizes, kernel.orders, p.m_realized, drng);
            } else if (p.spec.scheme == "dc") {
                ds = dc_sample(n_sizes[0], kernel.order_total(), p.dc_block, drng);
            } else {
                const auto li = static_cast<std::size_t>(
                    std::lower_bound(level_set.begin(), level_set.end(), p.oa.levels) - level_set.begin());
                const auto& parts = parts_by_level[li];
                ds = p.spec.debiased ? icudo_debiased_sample(p.oa, parts, kernel.orders, drng)
                                     : icudo_sample(p.oa, parts, kernel.orders, drng);
            }
            est[ci][static_cast<std::size_t>(r)] = incomplete_u(data, kernel, ds).value;
            wall[ci][static_cast<std::size_t>(r)] =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    int nthreads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, R));
    if (nthreads == 1) {
        for (int r = 0; r < R; ++r) run_replicate(r);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&] {
                try {
                    for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) run_replicate(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    next.store(R);  // stop the other workers
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    BenchResult res;
    res.name = cfg.name;
    res.m_grid = cfg.m_grid;
    res.replicates = R;
    res.seed = cfg.seed;
    for (const auto& e : cfg.estimators) res.labels.push_back(e.label);

    // Estimand.
    if (cfg.theta.has_value()) {
        res.theta_used = *cfg.theta;
    } else if (want_u0) {
        double s = 0;
        for (double v : u0) s += v;
        res.theta_used = s / R;
        res.ref_note = "theta estimated as the grand mean of the complete U-statistic";
    } else {
        throw InfeasibleError("bench: theta required unless the reference mode is complete-mc");
    }

    // Reference MSE.
    if (cfg.reference.mode == "complete-mc") {
        double s = 0, s2 = 0;
        for (double v : u0) {
            const double e2 = (v - res.theta_used) * (v - res.theta_used);
            s += e2;
            s2 += e2 * e2;
        }
        res.ref_mse = s / R;
        res.ref_se = std::sqrt(std::max(0.0, s2 / R - res.ref_mse * res.ref_mse) / R);
        res.ref_estimates = u0;
    } else if (cfg.reference.mode == "analytic-delta") {
        if (cfg.reference.delta_sq.empty())
            throw InfeasibleError("bench: analytic-delta reference needs delta_sq");
        if (n_sizes.size() != 1)
            throw InfeasibleError("bench: analytic-delta reference is one-sample only");
        const auto comp = HoeffdingComponents::one_sample(cfg.reference.delta_sq);
        res.ref_mse = mse_complete(n_sizes, comp);
        res.ref_se = 0;
        res.ref_note = "analytic delta components";
    } else if (cfg.reference.mode == "fixed-value") {
        res.ref_mse = cfg.reference.value;
        res.ref_se = 0;
        res.ref_note = cfg.reference.note;
    } else if (cfg.reference.mode == "none") {
        if (cfg.metric != "mse")
            throw InfeasibleError("bench: reference mode 'none' needs metric 'mse'");
        res.ref_mse = 0;
        res.ref_se = 0;
        res.ref_note = "no reference; raw MSE";
    } else {
        throw InfeasibleError("bench: unknown reference mode '" + cfg.reference.mode + "'");
    }

    for (std::size_t ci = 0; ci < plans.size(); ++ci) {
        const auto& p = plans[ci];
        BenchCell c;
        c.label = p.spec.label;
        c.m_target = p.m_target;
        c.m_realized = p.m_realized;
        c.available = p.available;
        c.note = p.note;
        if (p.available) {
            const auto& v = est[ci];
            double mean = 0;
            for (double x : v) mean += x;
            mean /= R;
            double var = 0, mse = 0, m2 = 0;
            for (double x : v) {
                var += (x - mean) * (x - mean);
                const double e2 = (x - res.theta_used) * (x - res.theta_used);
                mse += e2;
                m2 += e2 * e2;
            }
            var /= R;
            mse /= R;
            c.mean = mean;
            c.bias = mean - res.theta_used;
            c.variance = var;
            c.mse = mse;
            c.mse_se = std::sqrt(std::max(0.0, m2 / R - mse * mse) / R);
            if (mse > 0 && res.ref_mse > 0) {
                c.eff = res.ref_mse / mse;
                const double rel_est = c.mse_se / mse;
                const double rel_ref = res.ref_mse > 0 ? res.ref_se / res.ref_mse : 0.0;
                c.eff_se = c.eff * std::sqrt(rel_est * rel_est + rel_ref * rel_ref);
            }
            for (double w : wall[ci]) c.wall_ms += w;
            c.estimates = v;
        }
        res.cells.push_back(std::move(c));
    }
    return res;
}

std::string emit_table(const BenchResult& res, const BenchConfig& cfg, TableFormat fmt,
                       bool paper_style, bool with_timings) {
    const bool eff = cfg.metric == "eff";
    const double n1 = static_cast<double>(cfg.samples.front().n);

    if (fmt == TableFormat::json) {
        nlohmann::ordered_json j;
        j["name"] = res.name;
        j["seed"] = res.seed;
        j["replicates"] = res.replicates;
        j["theta"] = res.theta_used;
        j["reference"] = {{"mode", cfg.reference.mode}, {"mse", res.ref_mse}, {"se", res.ref_se}};
        if (!res.ref_note.empty()) j["reference"]["note"] = res.ref_note;
        j["cells"] = nlohmann::ordered_json::array();
        for (std::size_t gi = 0; gi < res.m_grid.size(); ++gi) {
            for (std::size_t ei = 0; ei < res.labels.size(); ++ei) {
                const auto& c = res.cell(gi, ei);
                nlohmann::ordered_json jc;
                jc["estimator"] = c.label;
                jc["m_target"] = c.m_target;
                if (!c.available) {
                    jc["available"] = false;
                    jc["note"] = c.note;
                } else {
                    jc["m"] = c.m_realized;
                    jc["mean"] = c.mean;
                    jc["bias"] = c.bias;
                    jc["variance"] = c.variance;
                    jc["mse"] = c.mse;
                    jc["mse_se"] = c.mse_se;
                    jc["eff"] = c.eff;
                    jc["eff_se"] = c.eff_se;
                    if (!c.note.empty()) jc["note"] = c.note;
                    if (with_timings) jc["elapsed_ms"] = c.wall_ms;
                }
                j["cells"].push_back(std::move(jc));
            }
        }
        return j.dump(2) + "\n";
    }

    Table t;
    t.header = {"m", "m_over_n"};
    for (const auto& label : res.labels) {
        if (eff) {
            t.header.push_back(label + "_eff");
            t.header.push_back(label + "_eff_se");
        } else {
            t.header.push_back(label + "_mse");
            t.header.push_back(label + "_mse_se");
        }
        t.header.push_back(label + "_m");
        if (with_timings) t.header.push_back(label + "_ms");
    }
    for (std::size_t gi = 0; gi < res.m_grid.size(); ++gi) {
        std::vector<std::string> row;
        row.push_back(std::to_string(res.m_grid[gi]));
        row.push_back(fmt_g(static_cast<double>(res.m_grid[gi]) / n1));
        for (std::size_t ei = 0; ei < res.labels.size(); ++ei) {
            const auto& c = res.cell(gi, ei);
            if (!c.available) {
                row.push_back(fmt == TableFormat::markdown ? "--" : "");
                row.push_back(fmt == TableFormat::markdown ? "--" : "");
                row.push_back(fmt == TableFormat::markdown ? "--" : "");
                if (with_timings) row.push_back(fmt == TableFormat::markdown ? "--" : "");
                continue;
            }
            if (eff) {
                row.push_back(fmt_eff(c.eff, paper_style));
                row.push_back(fmt_eff(c.eff_se, false));
            } else {
                row.push_back(fmt_g(c.mse));
                row.push_back(fmt_g(c.mse_se));
            }
            row.push_back(std::to_string(c.m_realized));
            if (with_timings) row.push_back(fmt_g(c.wall_ms));
        }
        t.rows.push_back(std::move(row));
    }
    return fmt == TableFormat::csv ? table_to_csv(t) : table_to_markdown(t);
}

}  // namespace icudo
