#include "icudo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace icudo {

double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

KernelSpec kernel_sign_symmetry() {
    KernelSpec k;
    k.name = "sign3";
    k.orders = {3};
    k.point_dim = 1;
    k.eval = [](const double* x) {
        return sign_of(2 * x[0] - x[1] - x[2]) + sign_of(2 * x[1] - x[0] - x[2]) +
               sign_of(2 * x[2] - x[0] - x[1]);
    };
    return k;
}

KernelSpec kernel_product(int order) {
    if (order < 1) throw InfeasibleError("kernel_product: order must be >= 1");
    KernelSpec k;
    k.name = "product" + std::to_string(order);
    k.orders = {order};
    k.point_dim = 1;
    k.eval = [order](const double* x) {
        double v = 1.0;
        for (int j = 0; j < order; ++j) v *= x[j];
        return v;
    };
    return k;
}

KernelSpec kernel_ranking(RankingLoss psi, std::function<double(double)> score) {
    KernelSpec k;
    k.name = (psi == RankingLoss::hinge) ? "rank-hinge" : "rank-logistic";
    k.orders = {1, 1};
    k.point_dim = 1;
    if (!score) score = [](double v) { return v; };
    if (psi == RankingLoss::hinge) {
        k.eval = [score](const double* x) {
            const double z = score(x[1]) - score(x[0]);
            return z < 1.0 ? 1.0 - z : 0.0;
        };
    } else {
        k.eval = [score](const double* x) {
            const double z = score(x[1]) - score(x[0]);
            // log(1+exp(-z)) without overflow for large |z|
            return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
        };
    }
    return k;
}

KernelSpec kernel_two_sample_similarity() {
    KernelSpec k;
    k.name = "twosample-sim";
    k.orders = {2, 2};
    k.point_dim = 1;
    k.eval = [](const double* v) {
        const double x1 = v[0], x2 = v[1], y1 = v[2], y2 = v[3];
        double t1 = 0, t2 = 0;
        if (x1 < y1 && x2 < y1) t1 += 1;
        if (x1 < y2 && x2 < y2) t1 += 1;
        if (y1 < x1 && y2 < x1) t2 += 1;
        if (y1 < x2 && y2 < x2) t2 += 1;
        return 0.5 * (t1 + t2);
    };
    return k;
}

KernelSpec kernel_kendall() {
    KernelSpec k;
    k.name = "kendall";
    k.orders = {2};
    k.point_dim = 2;
    k.eval = [](const double* v) {
        const double x1 = v[0], y1 = v[1], x2 = v[2], y2 = v[3];
        double s = -1.0;
        if (x1 < x2 && y1 < y2) s += 2.0;
        if (x2 < x1 && y2 < y1) s += 2.0;
        return s;
    };
    return k;
}

KernelSpec kernel_monotonicity(double x, double x_prime) {
    KernelSpec k;
    k.name = "monotone";
    k.orders = {2};
    k.point_dim = 2;
    k.eval = [x, x_prime](const double* v) {
        const double xi = v[0], yi = v[1], xj = v[2], yj = v[3];
        const double ind = (yi <= x_prime ? 1.0 : 0.0) - (yj <= x_prime ? 1.0 : 0.0);
        if (ind == 0.0) return 0.0;
        auto epan = [](double u) { return 0.75 * (1.0 - u * u); };
        return ind * sign_of(xi - xj) * epan(x - xi) * epan(x - xj);
    };
    return k;
}

KernelSpec kernel_cluster_cost(std::function<int(const double*)> label_of, int point_dim) {
    KernelSpec k;
    k.name = "cluster-cost";
    k.orders = {2};
    k.point_dim = point_dim;
    k.sum_scaled = true;
    k.eval = [label_of, point_dim](const double* v) {
        const double* p = v;
        const double* q = v + point_dim;
        if (label_of(p) != label_of(q)) return 0.0;
        double s = 0;
        for (int c = 0; c < point_dim; ++c) s += (p[c] - q[c]) * (p[c] - q[c]);
        return std::sqrt(s);
    };
    return k;
}

bool check_symmetry(const KernelSpec& k, int trials, Rng rng) {
    const int d = k.order_total();
    const int w = k.point_dim;
    std::vector<double> base(static_cast<std::size_t>(d) * w);
    std::vector<double> permuted(base.size());
    for (int trial = 0; trial < trials; ++trial) {
        Rng tr = rng.child(static_cast<std::uint64_t>(trial));
        for (auto& v : base) v = 4.0 * tr.next_unit() - 2.0;
        const double ref = k.eval(base.data());
        int offset = 0;
        for (std::size_t s = 0; s < k.orders.size(); ++s) {
            const int dk = k.orders[s];
            std::vector<int> perm(static_cast<std::size_t>(dk));
            std::iota(perm.begin(), perm.end(), 0);
            tr.shuffle(perm);
            for (int j = 0; j < dk; ++j)
                for (int c = 0; c < w; ++c)
                    permuted[static_cast<std::size_t>(offset + j) * w + static_cast<std::size_t>(c)] =
                        base[static_cast<std::size_t>(offset + perm[static_cast<std::size_t>(j)]) * w +
                             static_cast<std::size_t>(c)];
            offset += dk;
        }
        const double got = k.eval(permuted.data());
        const double tol = 1e-12 * std::max(1.0, std::abs(ref));
        if (std::abs(got - ref) > tol) return false;
    }
    return true;
}

KernelSpec make_kernel_by_name(const std::string& name, const std::map<std::string, double>& params,
                               int data_dim) {
    auto get = [&](const std::string& key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    if (name == "sign3") return kernel_sign_symmetry();
    if (name == "product2") return kernel_product(2);
    if (name == "product3") return kernel_product(3);
    if (name == "rank-hinge") return kernel_ranking(RankingLoss::hinge);
    if (name == "rank-logistic") return kernel_ranking(RankingLoss::logistic);
    if (name == "twosample-sim") return kernel_two_sample_similarity();
    if (name == "kendall") return kernel_kendall();
    if (name == "monotone") return kernel_monotonicity(get("x", 0.0), get("xprime", 0.0));
    if (name == "cluster-cost") {
        // 1-based coordinate selecting the label axis
        const int axis = static_cast<int>(get("cluster_axis", data_dim >= 2 ? 2 : 1));
        const double cut = get("cluster_cut", 0.0);
        if (axis < 1 || axis > data_dim)
            throw InfeasibleError("cluster-cost: cluster_axis out of range for dimension " +
                                  std::to_string(data_dim));
        auto labels = [axis, cut](const double* p) { return p[axis - 1] > cut ? 1 : 0; };
        return kernel_cluster_cost(labels, data_dim);
    }
    throw InfeasibleError("unknown kernel '" + name +
                          "' (expected sign3|product2|product3|rank-hinge|rank-logistic|"
                          "twosample-sim|kendall|monotone|cluster-cost)");
}

}  // namespace icudo
