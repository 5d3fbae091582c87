#pragma once

#include <string>

#include "icudo/dataset.hpp"
#include "icudo/kernels.hpp"
#include "icudo/sampling.hpp"

namespace icudo {

struct EstimateResult {
    double value = 0.0;
    long long m_used = 0;
    std::string scheme;
    // Multiplier recovering the un-normalized sum for sum-scaled kernels
    // (combination count); 1 otherwise.
    double scale_factor = 1.0;
};

// Exact average of the kernel over all unordered per-sample combinations.
// Streams the combinations in mixed-radix lexicographic order; refuses when
// the combination count exceeds the eval budget.
EstimateResult complete_u(const DataSet& data, const KernelSpec& kernel,
                          long long budget = 1000000000LL);

// Average over all n^d ordered tuples, duplicates included. One-sample only.
EstimateResult v_statistic(const DataSet& data, const KernelSpec& kernel,
                           long long budget = 1000000000LL);

// (1/m) sum_i weight_i * g(tuple_i) over the rows of a design sample.
EstimateResult incomplete_u(const DataSet& data, const KernelSpec& kernel, const DesignSample& s);

// MSE(reference)/MSE(estimator). Reported raw; values above 1 are possible
// under Monte Carlo noise.
double efficiency(double mse_ref, double mse_est);

}  // namespace icudo
