#include "icudo/hoeffding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icudo/estimators.hpp"
#include "icudo/oa.hpp"

namespace icudo {

namespace {

double comb_d(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

int sum_of(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

}  // namespace

HoeffdingComponents::HoeffdingComponents(std::vector<int> orders, std::vector<double> delta_sq_table)
    : orders_(std::move(orders)), table_(std::move(delta_sq_table)) {
    std::size_t want = 1;
    for (int dk : orders_) {
        if (dk < 1) throw InfeasibleError("HoeffdingComponents: orders must be >= 1");
        want *= static_cast<std::size_t>(dk + 1);
    }
    if (table_.size() != want)
        throw InfeasibleError("HoeffdingComponents: table size mismatch (want " +
                              std::to_string(want) + ", got " + std::to_string(table_.size()) + ")");
    for (double v : table_)
        if (v < 0.0 || !std::isfinite(v))
            throw InfeasibleError("HoeffdingComponents: delta^2 entries must be finite and >= 0");
    if (table_[0] != 0.0) throw InfeasibleError("HoeffdingComponents: delta^2 at u=0 must be 0");
}

HoeffdingComponents HoeffdingComponents::one_sample(const std::vector<double>& delta_sq_by_order) {
    std::vector<double> table(delta_sq_by_order.size() + 1, 0.0);
    for (std::size_t j = 0; j < delta_sq_by_order.size(); ++j) table[j + 1] = delta_sq_by_order[j];
    return HoeffdingComponents({static_cast<int>(delta_sq_by_order.size())}, std::move(table));
}

int HoeffdingComponents::order_total() const { return sum_of(orders_); }

std::size_t HoeffdingComponents::index_of(const std::vector<int>& u) const {
    if (u.size() != orders_.size()) throw InfeasibleError("HoeffdingComponents: bad index length");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] < 0 || u[k] > orders_[k]) throw InfeasibleError("HoeffdingComponents: index out of range");
        idx = idx * static_cast<std::size_t>(orders_[k] + 1) + static_cast<std::size_t>(u[k]);
    }
    return idx;
}

double HoeffdingComponents::sigma_sq(const std::vector<int>& u) const {
    // sum over v <= u componentwise of prod_k C(u_k, v_k) * delta^2_v
    double total = 0.0;
    std::vector<int> v(u.size(), 0);
    while (true) {
        double coef = 1.0;
        for (std::size_t k = 0; k < u.size(); ++k) coef *= comb_d(u[k], v[k]);
        total += coef * delta_sq(v);
        int k = static_cast<int>(u.size()) - 1;
        while (k >= 0 && ++v[static_cast<std::size_t>(k)] > u[static_cast<std::size_t>(k)]) {
            v[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return total;
}

double HoeffdingComponents::delta_sq(int j) const {
    if (num_samples() != 1) throw InfeasibleError("delta_sq(j): one-sample accessor");
    return delta_sq(std::vector<int>{j});
}

double HoeffdingComponents::sigma_sq(int j) const {
    if (num_samples() != 1) throw InfeasibleError("sigma_sq(j): one-sample accessor");
    return sigma_sq(std::vector<int>{j});
}

double mse_complete(const std::vector<int>& n_sizes, const HoeffdingComponents& comp) {
    const auto& orders = comp.orders();
    if (n_sizes.size() != orders.size()) throw InfeasibleError("mse_complete: sizes/orders mismatch");
    for (std::size_t k = 0; k < orders.size(); ++k)
        if (n_sizes[k] < orders[k])
            throw std::domain_error("mse_complete: n_" + std::to_string(k + 1) + " < d_" +
                                    std::to_string(k + 1));
    if (comp.num_samples() == 1) {
        const int d = orders[0], n = n_sizes[0];
        double total = 0.0;
        for (int j = 1; j <= d; ++j)
            total += comb_d(d, j) * comb_d(d, j) / comb_d(n, j) * comp.delta_sq(j);
        return total;
    }
    // Sen's product formula on the sigma scale.
    double denom = 1.0;
    for (std::size_t k = 0; k < orders.size(); ++k) denom *= comb_d(n_sizes[k], orders[k]);
    double total = 0.0;
    comp.for_each([&](const std::vector<int>& u, double) {
        if (sum_of(u) == 0) return;
        double coef = 1.0;
        for (std::size_t k = 0; k < u.size(); ++k)
            coef *= comb_d(orders[k], u[k]) * comb_d(n_sizes[k] - orders[k], orders[k] - u[k]);
        total += coef * comp.sigma_sq(u);
    });
    return total / denom;
}

double mse_icur_approx(const std::vector<int>& n_sizes, long long m, const HoeffdingComponents& comp) {
    if (m < 1) throw std::domain_error("mse_icur_approx: m must be >= 1");
    const double sigma_d = comp.sigma_sq(std::vector<int>(comp.orders()));
    return mse_complete(n_sizes, comp) + sigma_d / static_cast<double>(m);
}

double r_of_t(int t, const HoeffdingComponents& comp) {
    double total = 0.0;
    const auto& orders = comp.orders();
    comp.for_each([&](const std::vector<int>& u, double dsq) {
        if (sum_of(u) <= t) return;
        double coef = 1.0;
        for (std::size_t k = 0; k < u.size(); ++k) coef *= comb_d(orders[k], u[k]);
        total += coef * dsq;
    });
    return total;
}

HoeffdingComponents bootstrap_delta(const DataSet& data, const KernelSpec& kernel,
                                    const std::vector<int>& subsizes, int boots, Rng rng) {
    if (data.num_samples() != 1 || kernel.num_samples() != 1)
        throw InfeasibleError("bootstrap_delta: one-sample kernels only");
    const int d = kernel.order_total();
    const int n = data.count(0);
    if (static_cast<int>(subsizes.size()) < d)
        throw InfeasibleError("bootstrap_delta: need at least d subsample sizes");
    if (boots < 100) throw InfeasibleError("bootstrap_delta: need boots >= 100");
    {
        auto s = subsizes;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw InfeasibleError("bootstrap_delta: duplicated subsample size makes the system singular");
        if (s.front() < d) throw InfeasibleError("bootstrap_delta: subsample sizes must be >= d");
    }

    // Bootstrap Var(U_0) at each subsample size. One resample of the largest
    // size per replicate; the smaller sizes reuse its prefixes. The shared
    // draws correlate the per-size estimates, which tames the noise
    // amplification of the ill-conditioned solve below.
    const int q = static_cast<int>(subsizes.size());
    const int nmax = *std::max_element(subsizes.begin(), subsizes.end());
    std::vector<double> mean(static_cast<std::size_t>(q), 0.0), m2(static_cast<std::size_t>(q), 0.0);
    std::vector<double> pool;
    DataSet sub;
    sub.dim = data.dim;
    sub.samples.resize(1);
    for (int b = 0; b < boots; ++b) {
        Rng brng = rng.child(static_cast<std::uint64_t>(b));
        pool.clear();
        for (int i = 0; i < nmax; ++i) {
            const auto pt = data.point(0, brng.next_int(n));
            pool.insert(pool.end(), pt.begin(), pt.end());
        }
        for (int s = 0; s < q; ++s) {
            const std::size_t len = static_cast<std::size_t>(subsizes[static_cast<std::size_t>(s)]) * data.dim;
            sub.samples[0].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(len));
            const double v = complete_u(sub, kernel).value;
            mean[static_cast<std::size_t>(s)] += v;
            m2[static_cast<std::size_t>(s)] += v * v;
        }
    }
    std::vector<double> mse_hat(static_cast<std::size_t>(q));
    for (int s = 0; s < q; ++s) {
        const double mu = mean[static_cast<std::size_t>(s)] / boots;
        mse_hat[static_cast<std::size_t>(s)] =
            std::max(0.0, m2[static_cast<std::size_t>(s)] / boots - mu * mu);
    }

    // Solve (least squares when q > d):  sum_j A[s][j] delta_j^2 = mse_hat[s],
    // A[s][j] = C(d,j)^2 / C(n'_s, j).
    std::vector<std::vector<double>> A(static_cast<std::size_t>(q), std::vector<double>(static_cast<std::size_t>(d)));
    for (int s = 0; s < q; ++s)
        for (int j = 1; j <= d; ++j)
            A[static_cast<std::size_t>(s)][static_cast<std::size_t>(j - 1)] =
                comb_d(d, j) * comb_d(d, j) / comb_d(subsizes[static_cast<std::size_t>(s)], j);

    // Normal equations; d <= 6 in practice, plain Gaussian elimination.
    std::vector<std::vector<double>> M(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d + 1), 0.0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j)
            for (int s = 0; s < q; ++s)
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    A[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] *
                    A[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
        for (int s = 0; s < q; ++s)
            M[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] +=
                A[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] * mse_hat[static_cast<std::size_t>(s)];
    }
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(M[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                piv = r;
        if (std::abs(M[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < 1e-300)
            throw InfeasibleError("bootstrap_delta: singular system");
        std::swap(M[static_cast<std::size_t>(col)], M[static_cast<std::size_t>(piv)]);
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             M[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            for (int c = col; c <= d; ++c)
                M[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * M[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
    }
    std::vector<double> dsq(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const double v = M[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] /
                         M[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
        dsq[static_cast<std::size_t>(j)] = std::max(0.0, v);  // variances, clamp noise
    }
    return HoeffdingComponents::one_sample(dsq);
}

std::vector<int> default_subsizes(int order, int n) {
    std::vector<int> sizes;
    for (int s = order; s <= 2 * order && s <= n; ++s) sizes.push_back(s);
    double s = 2.0 * order;
    while (sizes.size() < static_cast<std::size_t>(3 * order) && s * 1.3 <= std::min(9.0 * order, 0.5 * n)) {
        s *= 1.3;
        const int v = static_cast<int>(std::ceil(s));
        if (v > sizes.back()) sizes.push_back(v);
    }
    return sizes;
}

double estimate_gamma_sq(const DataSet& data, const KernelSpec& kernel, int probes, double step,
                         Rng rng, GammaScale scale) {
    if (data.num_samples() != 1 || kernel.num_samples() != 1 || data.dim != 1)
        throw InfeasibleError("estimate_gamma_sq: univariate one-sample kernels only");
    if (probes < 1 || step <= 0) throw InfeasibleError("estimate_gamma_sq: bad probes/step");
    const int d = kernel.order_total();
    const int n = data.count(0);

    std::vector<double> sorted(data.samples[0]);
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double u) {
        const double pos = std::clamp(u, 0.0, 1.0) * (n - 1);
        const int lo = static_cast<int>(pos);
        const int hi = std::min(lo + 1, n - 1);
        const double w = pos - lo;
        return sorted[static_cast<std::size_t>(lo)] * (1 - w) + sorted[static_cast<std::size_t>(hi)] * w;
    };

    std::vector<double> x(static_cast<std::size_t>(d));
    long skipped = 0;
    double total = 0.0;
    for (int p = 0; p < probes; ++p) {
        Rng pr = rng.child(static_cast<std::uint64_t>(p));
        double fd;
        if (scale == GammaScale::quantile) {
            std::vector<double> z(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(j)] = pr.next_unit();
            z[0] = std::clamp(z[0], step, 1.0 - step);
            for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = quantile(z[static_cast<std::size_t>(j)]);
            const double keep = x[0];
            x[0] = quantile(z[0] + step);
            const double gp = kernel.eval(x.data());
            x[0] = quantile(z[0] - step);
            const double gm = kernel.eval(x.data());
            x[0] = keep;
            fd = (gp - gm) / (2 * step);
        } else {
            for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = data.value(0, pr.next_int(n));
            const double keep = x[0];
            x[0] = keep + step;
            const double gp = kernel.eval(x.data());
            x[0] = keep - step;
            const double gm = kernel.eval(x.data());
            x[0] = keep;
            fd = (gp - gm) / (2 * step);
        }
        if (!std::isfinite(fd)) {
            ++skipped;
            continue;
        }
        total += fd * fd;
    }
    if (skipped * 10 > probes)
        throw DataError("estimate_gamma_sq: more than 10% of probes were non-finite");
    return total / static_cast<double>(probes - skipped);
}

std::vector<DesignChoice> phi_table(long long m_target, const std::vector<int>& orders,
                                    const HoeffdingComponents& comp, double gamma_sq) {
    const int d = sum_of(orders);
    if (d < 2) throw InfeasibleError("phi_table: kernel order must be >= 2");
    std::vector<DesignChoice> out;
    for (int t = 2; t <= d; ++t) {
        OrthogonalArray oa;
        try {
            oa = feasible_design(m_target, d, t);
        } catch (const InfeasibleError&) {
            continue;
        }
        DesignChoice c;
        c.levels = oa.levels;
        c.strength = t;
        c.m_realized = oa.runs;
        c.phi = r_of_t(t, comp) / static_cast<double>(oa.runs) +
                static_cast<double>(d) * gamma_sq /
                    (12.0 * static_cast<double>(oa.runs) * oa.levels * oa.levels);
        out.push_back(c);
    }
    if (out.empty()) throw InfeasibleError("phi_table: no feasible (L,t) for m_target");
    return out;
}

DesignChoice choose_design(long long m_target, const std::vector<int>& orders,
                           const HoeffdingComponents& comp, double gamma_sq) {
    const auto table = phi_table(m_target, orders, comp, gamma_sq);
    DesignChoice best = table.front();
    for (const auto& c : table)
        if (c.phi < best.phi || (c.phi == best.phi && c.strength > best.strength)) best = c;
    return best;
}

}  // namespace icudo
