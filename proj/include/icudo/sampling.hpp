#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "icudo/errors.hpp"
#include "icudo/oa.hpp"
#include "icudo/partition.hpp"
#include "icudo/rng.hpp"

namespace icudo {

// The realized subsampling plan: m index tuples with per-tuple weights.
// Tuples are stored flat, d_total slots per row, slots grouped by sample in
// the kernel's order. Weights are all 1 except for the debiased scheme.
struct DesignSample {
    std::vector<int> tuples;
    std::vector<double> weights;
    std::vector<int> orders;
    std::string scheme;
    std::string provenance;  // OA identity / block size / seed, for audit
    std::uint64_t seed = 0;

    int d_total() const {
        int d = 0;
        for (int dk : orders) d += dk;
        return d;
    }
    int rows() const { return static_cast<int>(weights.size()); }
    const int* row(int i) const { return tuples.data() + static_cast<std::size_t>(i) * d_total(); }
};

// m distinct unordered combinations drawn uniformly without replacement
// (per-sample combinations, paired across samples). Indices within each
// sample block come out sorted ascending.
DesignSample icur_sample(const std::vector<int>& n_sizes, const std::vector<int>& orders,
                         long long m, Rng rng);

// Divide-and-conquer plan: a uniform random partition of {0..n-1} into
// floor(n/b) blocks of size b; the tuples are all within-block combinations,
// so the plain average equals the average of per-block complete U-statistics.
// One-sample only. Realized m = floor(n/b) * C(b,d).
DesignSample dc_sample(int n, int order, int block, Rng rng);

// |G_a intersect S0*| for a grid a (flat group labels, 1-based, grouped by
// sample): the product over samples and distinct labels of the falling
// factorial fall(group size, label multiplicity).
std::uint64_t grid_distinct_count(const std::vector<int>& grid_labels, const std::vector<int>& orders,
                                  const std::vector<Partition>& parts);

// |S0*| = product over samples of fall(n_k', d_k).
std::uint64_t s0_star_count(const std::vector<int>& orders, const std::vector<Partition>& parts);

// ICUDO rows: per OA row, one tuple drawn uniformly from the grid the row
// selects (duplicates within a sample allowed); weights all 1. The array is
// level-permuted first unless permute=false. Per-row draws use sub-streams
// keyed by row index.
DesignSample icudo_sample(const OrthogonalArray& oa, const std::vector<Partition>& parts,
                          const std::vector<int>& orders, Rng rng, bool permute = true);

// Debiased ICUDO rows: tuples drawn uniformly from the duplicate-free part
// of each grid, weight L^d |G_a intersect S0*| / |S0*| attached per row.
DesignSample icudo_debiased_sample(const OrthogonalArray& oa, const std::vector<Partition>& parts,
                                   const std::vector<int>& orders, Rng rng, bool permute = true);

// The exact distribution of one design row under uniform level permutations
// and uniform within-grid draws. Independent uniform column permutations
// make the row's grid-label vector exactly uniform on {1..L}^d, so the
// distribution enumerates L^d grids times their member tuples.
struct DesignAtom {
    std::vector<int> tuple;
    double weight;
    double prob;
};
std::vector<DesignAtom> enumerate_design_distribution(const OrthogonalArray& oa,
                                                      const std::vector<Partition>& parts,
                                                      const std::vector<int>& orders, bool debiased,
                                                      std::size_t max_atoms = 1000000);

// Audit CSV: header row, columns row,sample_k,slot_j,index,weight.
void write_design_csv(const DesignSample& s, std::ostream& os);
DesignSample read_design_csv(std::istream& is, const std::vector<int>& orders);

}  // namespace icudo
