#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "icudo/errors.hpp"
#include "icudo/rng.hpp"

namespace icudo {

// A symmetric kernel of per-sample orders (d_1,...,d_K) on points of a fixed
// dimension. eval reads a flat buffer of order_total() * point_dim doubles,
// slots grouped by sample; it must be invariant under permuting the slots of
// any one sample (check_symmetry tests this on random inputs).
struct KernelSpec {
    std::string name;
    std::vector<int> orders;
    int point_dim = 1;
    std::function<double(const double*)> eval;
    // Set for statistics the literature reports as un-normalized sums; the
    // estimators then report the combination count as a scale factor that
    // maps the kernel average back to the sum.
    bool sum_scaled = false;

    int num_samples() const { return static_cast<int>(orders.size()); }
    int order_total() const {
        int d = 0;
        for (int dk : orders) d += dk;
        return d;
    }
};

double sign_of(double x);  // sign with sign(0) = 0

// g(x1,x2,x3) = sign(2x1-x2-x3) + sign(2x2-x1-x3) + sign(2x3-x1-x2).
// Mean zero under any symmetric distribution.
KernelSpec kernel_sign_symmetry();

// g(x1,...,xd) = x1*...*xd, estimates mu^d.
KernelSpec kernel_product(int order);

enum class RankingLoss { hinge, logistic };

// Two-sample pairwise ranking loss psi(f(y) - f(x)), d1 = d2 = 1.
KernelSpec kernel_ranking(RankingLoss psi, std::function<double(double)> score = {});

// Two-sample similarity kernel, d1 = d2 = 2, block-symmetrized:
//   mean of I(x_a < y_b, x_{3-a} < y_b) over b, plus the mirrored term.
// Its expectation is 2/3 + integral((F1-F2)^2 d(F1+F2)/2).
KernelSpec kernel_two_sample_similarity();

// Kendall concordance kernel on bivariate points:
// 2 I(x1<x2, y1<y2) + 2 I(x2<x1, y2<y1) - 1.
KernelSpec kernel_kendall();

// Stochastic-monotonicity kernel on bivariate points (order 2), evaluated at
// fixed (x, x'): (I{Y_i<=x'} - I{Y_j<=x'}) sign(X_i-X_j) K(x-X_i) K(x-X_j)
// with K(u) = 0.75 (1 - u^2).
KernelSpec kernel_monotonicity(double x = 0.0, double x_prime = 0.0);

// Within-cluster distance kernel: D(p, q) when both points share a label,
// else 0. Euclidean D. The kernel average times scale_factor n(n-1)/2
// recovers the un-normalized cluster cost.
KernelSpec kernel_cluster_cost(std::function<int(const double*)> label_of, int point_dim);

// True iff eval is invariant (1e-12 relative) under random within-sample
// argument permutations across `trials` random inputs.
bool check_symmetry(const KernelSpec& k, int trials, Rng rng);

// CLI name lookup: sign3 | product2 | product3 | rank-hinge | rank-logistic |
// twosample-sim | kendall | monotone | cluster-cost.
KernelSpec make_kernel_by_name(const std::string& name, const std::map<std::string, double>& params,
                               int data_dim);

}  // namespace icudo
