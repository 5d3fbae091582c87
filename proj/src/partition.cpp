#include "icudo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace icudo {

std::vector<int> truncate_to_multiple(int n, int levels, Rng rng) {
    if (levels < 1 || levels > n)
        throw InfeasibleError("truncate_to_multiple: need 1 <= L <= n (L=" + std::to_string(levels) +
                              ", n=" + std::to_string(n) + ")");
    const int keep = (n / levels) * levels;
    if (keep == n) {
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    auto idx = rng.sample_indices(n, keep);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Partition sort_partition(std::span<const double> values, std::span<const int> retained, int levels) {
    const int n = static_cast<int>(retained.size());
    if (levels < 1 || n % levels != 0)
        throw InfeasibleError("sort_partition: group count " + std::to_string(levels) +
                              " must divide the retained size " + std::to_string(n) +
                              " (truncate first)");
    std::vector<int> order(retained.begin(), retained.end());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[static_cast<std::size_t>(a)] != values[static_cast<std::size_t>(b)])
            return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
        return a < b;
    });
    Partition p;
    p.levels = levels;
    p.groups.resize(static_cast<std::size_t>(levels));
    const int block = n / levels;
    for (int l = 0; l < levels; ++l)
        p.groups[static_cast<std::size_t>(l)].assign(order.begin() + static_cast<std::ptrdiff_t>(l) * block,
                                                     order.begin() + static_cast<std::ptrdiff_t>(l + 1) * block);
    return p;
}

namespace {

double sq_dist(std::span<const double> a, const std::vector<double>& b, std::size_t boff, int dim) {
    double s = 0;
    for (int c = 0; c < dim; ++c) {
        const double d = a[static_cast<std::size_t>(c)] - b[boff + static_cast<std::size_t>(c)];
        s += d * d;
    }
    return s;
}

}  // namespace

Partition balanced_cluster_partition(const DataSet& data, int sample, std::span<const int> retained,
                                     int levels, Rng rng) {
    const int n = static_cast<int>(retained.size());
    const int dim = data.dim;
    if (levels < 1 || n % levels != 0)
        throw InfeasibleError("balanced_cluster_partition: group count must divide the retained size");
    const int cap = n / levels;

    // k-means++ seeding
    std::vector<double> centroids(static_cast<std::size_t>(levels) * dim);
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    {
        const int first = retained[static_cast<std::size_t>(rng.next_int(n))];
        for (int c = 0; c < dim; ++c) centroids[static_cast<std::size_t>(c)] = data.point(sample, first)[static_cast<std::size_t>(c)];
        for (int l = 1; l < levels; ++l) {
            double total = 0;
            for (int i = 0; i < n; ++i) {
                const double d = sq_dist(data.point(sample, retained[static_cast<std::size_t>(i)]),
                                         centroids, static_cast<std::size_t>(l - 1) * dim, dim);
                d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], d);
                total += d2[static_cast<std::size_t>(i)];
            }
            int pick;
            if (total <= 0) {
                pick = rng.next_int(n);  // degenerate data, any point will do
            } else {
                double u = rng.next_unit() * total;
                pick = n - 1;
                for (int i = 0; i < n; ++i) {
                    u -= d2[static_cast<std::size_t>(i)];
                    if (u <= 0) {
                        pick = i;
                        break;
                    }
                }
            }
            const auto pt = data.point(sample, retained[static_cast<std::size_t>(pick)]);
            for (int c = 0; c < dim; ++c)
                centroids[static_cast<std::size_t>(l) * dim + static_cast<std::size_t>(c)] = pt[static_cast<std::size_t>(c)];
        }
    }

    // Lloyd iterations (unconstrained), cap 100, tol 1e-8 on centroid movement
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    std::vector<double> sums(static_cast<std::size_t>(levels) * dim);
    std::vector<int> sizes(static_cast<std::size_t>(levels));
    for (int iter = 0; iter < 100; ++iter) {
        for (int i = 0; i < n; ++i) {
            const auto pt = data.point(sample, retained[static_cast<std::size_t>(i)]);
            double best = std::numeric_limits<double>::infinity();
            int bl = 0;
            for (int l = 0; l < levels; ++l) {
                const double d = sq_dist(pt, centroids, static_cast<std::size_t>(l) * dim, dim);
                if (d < best) {
                    best = d;
                    bl = l;
                }
            }
            assign[static_cast<std::size_t>(i)] = bl;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (int i = 0; i < n; ++i) {
            const auto pt = data.point(sample, retained[static_cast<std::size_t>(i)]);
            const int l = assign[static_cast<std::size_t>(i)];
            ++sizes[static_cast<std::size_t>(l)];
            for (int c = 0; c < dim; ++c)
                sums[static_cast<std::size_t>(l) * dim + static_cast<std::size_t>(c)] += pt[static_cast<std::size_t>(c)];
        }
        double moved = 0;
        for (int l = 0; l < levels; ++l) {
            if (sizes[static_cast<std::size_t>(l)] == 0) {
                // re-seed an empty cluster at the point farthest from its centroid
                double worst = -1;
                int wi = 0;
                for (int i = 0; i < n; ++i) {
                    const double d = sq_dist(data.point(sample, retained[static_cast<std::size_t>(i)]),
                                             centroids,
                                             static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]) * dim, dim);
                    if (d > worst) {
                        worst = d;
                        wi = i;
                    }
                }
                const auto pt = data.point(sample, retained[static_cast<std::size_t>(wi)]);
                for (int c = 0; c < dim; ++c)
                    centroids[static_cast<std::size_t>(l) * dim + static_cast<std::size_t>(c)] = pt[static_cast<std::size_t>(c)];
                moved = std::numeric_limits<double>::infinity();
                continue;
            }
            double delta = 0;
            for (int c = 0; c < dim; ++c) {
                const double nc = sums[static_cast<std::size_t>(l) * dim + static_cast<std::size_t>(c)] /
                                  sizes[static_cast<std::size_t>(l)];
                const double d = nc - centroids[static_cast<std::size_t>(l) * dim + static_cast<std::size_t>(c)];
                delta += d * d;
                centroids[static_cast<std::size_t>(l) * dim + static_cast<std::size_t>(c)] = nc;
            }
            moved = std::max(moved, delta);
        }
        if (moved <= 1e-8 * 1e-8) break;
    }

    // Balancing pass: order points by how much they care (cost of the second
    // choice minus the first), then greedily take the cheapest centroid that
    // still has capacity.
    std::vector<std::vector<double>> cost(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(levels)));
    std::vector<double> margin(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto pt = data.point(sample, retained[static_cast<std::size_t>(i)]);
        double best = std::numeric_limits<double>::infinity(), second = std::numeric_limits<double>::infinity();
        for (int l = 0; l < levels; ++l) {
            const double d = sq_dist(pt, centroids, static_cast<std::size_t>(l) * dim, dim);
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] = d;
            if (d < best) {
                second = best;
                best = d;
            } else if (d < second) {
                second = d;
            }
        }
        margin[static_cast<std::size_t>(i)] = (levels > 1) ? second - best : 0.0;
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (margin[static_cast<std::size_t>(a)] != margin[static_cast<std::size_t>(b)])
            return margin[static_cast<std::size_t>(a)] > margin[static_cast<std::size_t>(b)];
        return a < b;
    });
    std::vector<int> room(static_cast<std::size_t>(levels), cap);
    std::vector<int> final_assign(static_cast<std::size_t>(n), -1);
    for (int i : order) {
        double best = std::numeric_limits<double>::infinity();
        int bl = -1;
        for (int l = 0; l < levels; ++l) {
            if (room[static_cast<std::size_t>(l)] > 0 && cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] < best) {
                best = cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
                bl = l;
            }
        }
        final_assign[static_cast<std::size_t>(i)] = bl;
        --room[static_cast<std::size_t>(bl)];
    }

    // Stable group numbering: order groups by centroid coordinates.
    std::vector<int> group_order(static_cast<std::size_t>(levels));
    std::iota(group_order.begin(), group_order.end(), 0);
    std::sort(group_order.begin(), group_order.end(), [&](int a, int b) {
        for (int c = 0; c < dim; ++c) {
            const double va = centroids[static_cast<std::size_t>(a) * dim + static_cast<std::size_t>(c)];
            const double vb = centroids[static_cast<std::size_t>(b) * dim + static_cast<std::size_t>(c)];
            if (va != vb) return va < vb;
        }
        return a < b;
    });
    std::vector<int> rank(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) rank[static_cast<std::size_t>(group_order[static_cast<std::size_t>(l)])] = l;

    Partition p;
    p.levels = levels;
    p.sample_id = sample;
    p.groups.resize(static_cast<std::size_t>(levels));
    for (int i = 0; i < n; ++i)
        p.groups[static_cast<std::size_t>(rank[static_cast<std::size_t>(final_assign[static_cast<std::size_t>(i)])])]
            .push_back(retained[static_cast<std::size_t>(i)]);
    return p;
}

std::vector<Partition> build_partitions(const DataSet& data, int levels, Rng rng) {
    std::vector<Partition> out;
    out.reserve(static_cast<std::size_t>(data.num_samples()));
    for (int k = 0; k < data.num_samples(); ++k) {
        Rng sub = rng.child(static_cast<std::uint64_t>(k));
        const auto retained = truncate_to_multiple(data.count(k), levels, sub.child(0));
        Partition p;
        if (data.dim == 1) {
            p = sort_partition(std::span<const double>(data.samples[static_cast<std::size_t>(k)]),
                               retained, levels);
        } else {
            p = balanced_cluster_partition(data, k, retained, levels, sub.child(1));
        }
        p.sample_id = k;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace icudo
