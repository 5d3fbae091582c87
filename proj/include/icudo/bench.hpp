#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icudo/dataset.hpp"
#include "icudo/errors.hpp"
#include "icudo/hoeffding.hpp"
#include "icudo/kernels.hpp"
#include "icudo/table.hpp"

namespace icudo {

struct DataModelSpec {
    std::string dist = "normal";  // normal | uniform | pareto
    int n = 0;
    int dim = 1;
    std::vector<double> mean;  // per coordinate (normal)
    std::vector<double> var;   // per coordinate (normal)
    double pareto_shape = 1.0, pareto_scale = 1.0;
};

struct EstimatorSpec {
    std::string label;
    std::string scheme;  // icur | dc | icudo
    int strength = 0;    // icudo: t, 0 means t = d
    bool debiased = false;
    bool auto_tune = false;  // icudo: pick (L,t) with the phi tuner on pilot data
};

struct ReferenceSpec {
    std::string mode = "complete-mc";  // analytic-delta | complete-mc | fixed-value
    std::vector<double> delta_sq;      // analytic-delta, one-sample, by projection order
    double value = 0.0;                // fixed-value
    std::string note;                  // provenance, required for fixed-value
};

struct BenchConfig {
    std::string name;
    std::string kernel_name;
    std::map<std::string, double> kernel_params;
    std::vector<DataModelSpec> samples;
    std::optional<double> theta;  // true estimand; complete-mc can fall back to the grand mean
    std::vector<EstimatorSpec> estimators;
    std::vector<long long> m_grid;
    int replicates = 2;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware
    ReferenceSpec reference;
    std::string metric = "eff";  // eff | mse
    long long complete_budget = 1000000000LL;
};

struct BenchCell {
    std::string label;
    long long m_target = 0;
    long long m_realized = 0;
    bool available = true;
    std::string note;  // unavailability reason or design identity
    double mean = 0, bias = 0, variance = 0, mse = 0, mse_se = 0;
    double eff = 0, eff_se = 0;
    double wall_ms = 0;
    std::vector<double> estimates;  // per replicate, in replicate order
};

struct BenchResult {
    std::string name;
    double theta_used = 0;
    double ref_mse = 0, ref_se = 0;
    std::string ref_note;
    std::vector<long long> m_grid;
    std::vector<std::string> labels;
    std::vector<BenchCell> cells;  // grid-major
    std::vector<double> ref_estimates;  // complete-U values per replicate (complete-mc)
    int replicates = 0;
    std::uint64_t seed = 0;

    const BenchCell& cell(std::size_t gi, std::size_t ei) const { return cells[gi * labels.size() + ei]; }
};

// Data simulated from the configured models; replicate r uses sub-stream r.
DataSet generate_data(const std::vector<DataModelSpec>& models, Rng rng);

BenchConfig load_bench_config(const std::string& path);
BenchConfig parse_bench_config(const std::string& json_text);

// Deterministic given (config, seed); independent of the worker count.
BenchResult run_bench(const BenchConfig& cfg);

enum class TableFormat { csv, markdown, json };

// Rows m, m/n; per-estimator Eff or MSE columns with standard errors and the
// realized m. paper_style caps displayed efficiencies at 100%. Timing
// columns only appear when with_timings is set (they are not byte-stable).
std::string emit_table(const BenchResult& res, const BenchConfig& cfg, TableFormat fmt,
                       bool paper_style = false, bool with_timings = false);

}  // namespace icudo
