#include "icudo/estimators.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace icudo {

namespace {

// Neumaier compensated accumulator; fixed summation order makes estimator
// values reproducible bit for bit.
struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

double comb_d(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

void check_kernel_data(const DataSet& data, const KernelSpec& kernel) {
    if (kernel.num_samples() != data.num_samples())
        throw DataError("estimator: kernel expects " + std::to_string(kernel.num_samples()) +
                        " samples, data has " + std::to_string(data.num_samples()));
    if (kernel.point_dim != data.dim)
        throw DataError("estimator: kernel expects dimension " + std::to_string(kernel.point_dim) +
                        ", data has " + std::to_string(data.dim));
    for (int k = 0; k < data.num_samples(); ++k)
        if (data.count(k) < kernel.orders[static_cast<std::size_t>(k)])
            throw DataError("estimator: sample " + std::to_string(k + 1) +
                            " smaller than its kernel order");
}

double sum_scale(const DataSet& data, const KernelSpec& kernel) {
    if (!kernel.sum_scaled) return 1.0;
    double v = 1.0;
    for (int k = 0; k < data.num_samples(); ++k)
        v *= comb_d(data.count(k), kernel.orders[static_cast<std::size_t>(k)]);
    return v;
}

}  // namespace

EstimateResult complete_u(const DataSet& data, const KernelSpec& kernel, long long budget) {
    check_kernel_data(data, kernel);
    const int K = data.num_samples();
    const int d = kernel.order_total();
    const int w = data.dim;

    double total_d = 1.0;
    for (int k = 0; k < K; ++k) total_d *= comb_d(data.count(k), kernel.orders[static_cast<std::size_t>(k)]);
    if (total_d > static_cast<double>(budget))
        throw CapacityError("complete_u: " + std::to_string(total_d) +
                            " combinations exceed the evaluation budget of " + std::to_string(budget) +
                            "; use an incomplete scheme (icur/icudo) instead");

    std::vector<std::vector<int>> combo(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        combo[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(kernel.orders[static_cast<std::size_t>(k)]));
        std::iota(combo[static_cast<std::size_t>(k)].begin(), combo[static_cast<std::size_t>(k)].end(), 0);
    }
    std::vector<double> buf(static_cast<std::size_t>(d) * w);
    auto fill_sample = [&](int k, int slot_offset) {
        for (int j = 0; j < kernel.orders[static_cast<std::size_t>(k)]; ++j) {
            const auto pt = data.point(k, combo[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
            for (int c = 0; c < w; ++c)
                buf[static_cast<std::size_t>(slot_offset + j) * w + static_cast<std::size_t>(c)] = pt[static_cast<std::size_t>(c)];
        }
    };
    std::vector<int> offsets(static_cast<std::size_t>(K), 0);
    for (int k = 1; k < K; ++k)
        offsets[static_cast<std::size_t>(k)] = offsets[static_cast<std::size_t>(k - 1)] + kernel.orders[static_cast<std::size_t>(k - 1)];
    for (int k = 0; k < K; ++k) fill_sample(k, offsets[static_cast<std::size_t>(k)]);

    // advance the lexicographic combination of sample k; false when exhausted
    auto advance = [&](int k) {
        auto& c = combo[static_cast<std::size_t>(k)];
        const int n = data.count(k), dk = kernel.orders[static_cast<std::size_t>(k)];
        int i = dk - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == n - dk + i) --i;
        if (i < 0) {
            std::iota(c.begin(), c.end(), 0);
            return false;
        }
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < dk; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
        return true;
    };

    Kahan acc;
    long long count = 0;
    while (true) {
        acc.add(kernel.eval(buf.data()));
        ++count;
        int k = K - 1;
        while (k >= 0) {
            const bool more = advance(k);
            fill_sample(k, offsets[static_cast<std::size_t>(k)]);
            if (more) break;
            --k;
        }
        if (k < 0) break;
    }

    EstimateResult r;
    r.value = acc.total() / static_cast<double>(count);
    r.m_used = count;
    r.scheme = "complete";
    r.scale_factor = sum_scale(data, kernel);
    return r;
}

EstimateResult v_statistic(const DataSet& data, const KernelSpec& kernel, long long budget) {
    check_kernel_data(data, kernel);
    if (data.num_samples() != 1) throw DataError("v_statistic: one-sample only");
    const int d = kernel.order_total();
    const int n = data.count(0);
    const int w = data.dim;
    double total = 1.0;
    for (int j = 0; j < d; ++j) total *= n;
    if (total > static_cast<double>(budget))
        throw CapacityError("v_statistic: n^d exceeds the evaluation budget");

    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> buf(static_cast<std::size_t>(d) * w);
    auto fill = [&](int slot) {
        const auto pt = data.point(0, idx[static_cast<std::size_t>(slot)]);
        for (int c = 0; c < w; ++c)
            buf[static_cast<std::size_t>(slot) * w + static_cast<std::size_t>(c)] = pt[static_cast<std::size_t>(c)];
    };
    for (int j = 0; j < d; ++j) fill(j);

    Kahan acc;
    long long count = 0;
    while (true) {
        acc.add(kernel.eval(buf.data()));
        ++count;
        int j = d - 1;
        while (j >= 0) {
            if (++idx[static_cast<std::size_t>(j)] < n) {
                fill(j);
                break;
            }
            idx[static_cast<std::size_t>(j)] = 0;
            fill(j);
            --j;
        }
        if (j < 0) break;
    }

    EstimateResult r;
    r.value = acc.total() / static_cast<double>(count);
    r.m_used = count;
    r.scheme = "v";
    r.scale_factor = sum_scale(data, kernel);
    return r;
}

EstimateResult incomplete_u(const DataSet& data, const KernelSpec& kernel, const DesignSample& s) {
    check_kernel_data(data, kernel);
    if (s.orders != kernel.orders)
        throw DataError("incomplete_u: design and kernel disagree on per-sample orders");
    const int d = s.d_total();
    const int w = data.dim;
    const int m = s.rows();
    if (m == 0) throw DataError("incomplete_u: empty design");

    std::vector<double> buf(static_cast<std::size_t>(d) * w);
    Kahan acc;
    for (int i = 0; i < m; ++i) {
        const int* row = s.row(i);
        int col = 0;
        for (int k = 0; k < data.num_samples(); ++k) {
            const int nk = data.count(k);
            for (int j = 0; j < kernel.orders[static_cast<std::size_t>(k)]; ++j, ++col) {
                const int index = row[col];
                if (index < 0 || index >= nk)
                    throw DataError("incomplete_u: design row " + std::to_string(i + 1) +
                                    " indexes observation " + std::to_string(index) +
                                    " outside sample " + std::to_string(k + 1));
                const auto pt = data.point(k, index);
                for (int c = 0; c < w; ++c)
                    buf[static_cast<std::size_t>(col) * w + static_cast<std::size_t>(c)] = pt[static_cast<std::size_t>(c)];
            }
        }
        acc.add(s.weights[static_cast<std::size_t>(i)] * kernel.eval(buf.data()));
    }

    EstimateResult r;
    r.value = acc.total() / static_cast<double>(m);
    r.m_used = m;
    r.scheme = s.scheme;
    r.scale_factor = sum_scale(data, kernel);
    return r;
}

double efficiency(double mse_ref, double mse_est) {
    if (!(mse_ref > 0.0) || !(mse_est > 0.0))
        throw std::domain_error("efficiency: MSEs must be positive");
    return mse_ref / mse_est;
}

}  // namespace icudo
