#pragma once

#include <span>
#include <vector>

#include "icudo/dataset.hpp"
#include "icudo/errors.hpp"
#include "icudo/rng.hpp"

namespace icudo {

// One sample's observation indices divided into `levels` disjoint groups.
// In balanced mode every group has exactly retained()/levels indices.
struct Partition {
    int levels = 0;
    int sample_id = 0;
    std::vector<std::vector<int>> groups;

    int retained() const {
        int n = 0;
        for (const auto& g : groups) n += static_cast<int>(g.size());
        return n;
    }
    int group_size(int l) const { return static_cast<int>(groups[static_cast<std::size_t>(l)].size()); }
};

// Uniformly random subset of size floor(n/L)*L, returned sorted.
// The identity when L divides n.
std::vector<int> truncate_to_multiple(int n, int levels, Rng rng);

// Consecutive blocks of the order statistics: every value in group l1 is <=
// every value in group l2 for l1 < l2. Ties break by original index.
// `retained` must have size divisible by L; indices refer into `values`.
Partition sort_partition(std::span<const double> values, std::span<const int> retained, int levels);

// Equal-size groups from capacity-constrained k-means: seeded k-means++,
// Lloyd iterations, then one balancing pass assigning points to centroids in
// decreasing order of assignment-cost margin under a hard capacity of
// retained/L per group. Groups are ordered by centroid coordinates, so in
// one dimension this reduces to the sorted block split.
Partition balanced_cluster_partition(const DataSet& data, int sample, std::span<const int> retained,
                                     int levels, Rng rng);

// Truncate-then-partition for every sample of a data set: sorting when
// dim == 1, balanced clustering otherwise.
std::vector<Partition> build_partitions(const DataSet& data, int levels, Rng rng);

}  // namespace icudo
