#pragma once

#include <vector>

#include "icudo/dataset.hpp"
#include "icudo/errors.hpp"
#include "icudo/kernels.hpp"
#include "icudo/rng.hpp"

namespace icudo {

// Variance components delta^2_u of the kernel projections, indexed by the
// per-sample projection orders u = (j_1,...,j_K), 0 <= j_k <= d_k. The
// one-sample case is K = 1. Derived sigma^2_u follow from
//   sigma^2_u = sum_{v <= u componentwise} prod_k C(j_k, v_k) delta^2_v.
class HoeffdingComponents {
  public:
    HoeffdingComponents(std::vector<int> orders, std::vector<double> delta_sq_table);
    static HoeffdingComponents one_sample(const std::vector<double>& delta_sq_by_order);

    const std::vector<int>& orders() const { return orders_; }
    int num_samples() const { return static_cast<int>(orders_.size()); }
    int order_total() const;

    double delta_sq(const std::vector<int>& u) const { return table_[index_of(u)]; }
    double sigma_sq(const std::vector<int>& u) const;
    // One-sample accessors by projection order j.
    double delta_sq(int j) const;
    double sigma_sq(int j) const;

    // Iterate all u (including the zero vector); callback(u, delta_sq_u).
    template <typename F>
    void for_each(F&& f) const {
        std::vector<int> u(orders_.size(), 0);
        std::size_t i = 0;
        while (true) {
            f(u, table_[i]);
            ++i;
            int k = static_cast<int>(u.size()) - 1;
            while (k >= 0 && ++u[static_cast<std::size_t>(k)] > orders_[static_cast<std::size_t>(k)]) {
                u[static_cast<std::size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
        }
    }

  private:
    std::size_t index_of(const std::vector<int>& u) const;
    std::vector<int> orders_;
    std::vector<double> table_;  // mixed-radix over (d_k + 1), last sample fastest
};

// Exact MSE of the complete U-statistic from the components:
// one sample sum_j C(d,j)^2 C(n,j)^{-1} delta_j^2; multi-sample via the
// sigma-form product formula.
double mse_complete(const std::vector<int>& n_sizes, const HoeffdingComponents& comp);

// MSE(U_0) + sigma_d^2 / m, the O(1/(nm)) term dropped.
double mse_icur_approx(const std::vector<int>& n_sizes, long long m, const HoeffdingComponents& comp);

// Tail sum R(t): one-sample sum_{j>t} C(d,j) delta_j^2; multi-sample
// sum over |u| > t of prod_k C(d_k, j_k) delta_u^2. Zero at t = d.
double r_of_t(int t, const HoeffdingComponents& comp);

// Bootstrap estimate of the one-sample delta^2 vector: for each subsample
// size n' >= d, the complete U-statistic is bootstrapped to estimate
// MSE(U_0; n'), and the linear system from the MSE formula is solved for
// delta^2 (least squares when more than d sizes are given). Negative
// solutions clamp to 0. Each bootstrap replicate draws one resample of the
// largest size and evaluates every smaller size on its prefix; the shared
// draws keep the ill-conditioned solve from amplifying independent noise.
// The n' = d row anchors the top component (it measures Var(g) directly).
HoeffdingComponents bootstrap_delta(const DataSet& data, const KernelSpec& kernel,
                                    const std::vector<int>& subsizes, int boots, Rng rng);

// Default subsample ladder for bootstrap_delta: d, d+1, ..., 2d, then
// geometric steps up to about 9d (capped at n).
std::vector<int> default_subsizes(int order, int n);

enum class GammaScale { quantile, raw };

// Monte Carlo mean of squared central finite differences of the kernel in
// its first argument over random data tuples. quantile scale composes the
// kernel with the empirical quantile transform (step h in rank units); raw
// differentiates on the data scale directly.
double estimate_gamma_sq(const DataSet& data, const KernelSpec& kernel, int probes, double step,
                         Rng rng, GammaScale scale = GammaScale::quantile);

struct DesignChoice {
    int levels = 0;
    int strength = 0;
    long long m_realized = 0;
    double phi = 0.0;
};

// phi(L,t) = R(t)/m + d * gamma_sq / (12 m L^2) for every feasible strength
// t in {2..d}, with L from feasible_design(m_target, d, t).
std::vector<DesignChoice> phi_table(long long m_target, const std::vector<int>& orders,
                                    const HoeffdingComponents& comp, double gamma_sq);

// The phi minimizer; ties break toward the larger strength.
DesignChoice choose_design(long long m_target, const std::vector<int>& orders,
                           const HoeffdingComponents& comp, double gamma_sq);

}  // namespace icudo
