#include "icudo/sampling.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace icudo {

namespace {

// C(n,k) capped; returns cap+1 when the true value exceeds cap.
long long comb_capped(int n, int k, long long cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 num = 1;
    for (int i = 1; i <= k; ++i) {
        num = num * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned>(i);
        if (num > static_cast<unsigned __int128>(cap)) return cap + 1;
    }
    return static_cast<long long>(num);
}

std::uint64_t falling(std::uint64_t s, int c) {
    unsigned __int128 v = 1;
    for (int i = 0; i < c; ++i) {
        if (s < static_cast<std::uint64_t>(i)) return 0;
        v *= (s - static_cast<std::uint64_t>(i));
        if (v > static_cast<unsigned __int128>(UINT64_MAX))
            throw CapacityError("falling factorial overflows 64 bits");
    }
    return static_cast<std::uint64_t>(v);
}

void check_orders_match(const std::vector<int>& orders, const std::vector<Partition>& parts) {
    if (orders.size() != parts.size())
        throw DataError("sampling: orders and partitions disagree on the sample count");
}

}  // namespace

DesignSample icur_sample(const std::vector<int>& n_sizes, const std::vector<int>& orders,
                         long long m, Rng rng) {
    if (n_sizes.size() != orders.size()) throw DataError("icur_sample: sizes/orders mismatch");
    const int K = static_cast<int>(orders.size());
    int d_total = 0;
    for (int dk : orders) d_total += dk;

    const long long cap_limit = 4000000000000000000LL;
    long long cap = 1;
    for (int k = 0; k < K; ++k) {
        const long long c = comb_capped(n_sizes[static_cast<std::size_t>(k)], orders[static_cast<std::size_t>(k)], cap_limit);
        if (c == 0)
            throw InfeasibleError("icur_sample: sample " + std::to_string(k + 1) +
                                  " smaller than its kernel order");
        if (c > cap_limit / std::max(1LL, cap))
            cap = cap_limit;
        else
            cap *= c;
    }
    if (m < 1 || m > cap)
        throw InfeasibleError("icur_sample: m = " + std::to_string(m) +
                              " exceeds the combination count " + std::to_string(cap));

    DesignSample s;
    s.orders = orders;
    s.scheme = "icur";
    s.seed = rng.root();
    s.tuples.reserve(static_cast<std::size_t>(m) * d_total);
    s.weights.assign(static_cast<std::size_t>(m), 1.0);

    // Rank a combination tuple to a unique key across samples.
    auto rank_row = [&](const std::vector<int>& row) {
        unsigned __int128 key = 0;
        int off = 0;
        for (int k = 0; k < K; ++k) {
            unsigned __int128 r = 0;  // colex rank of the sorted combination
            for (int j = 0; j < orders[static_cast<std::size_t>(k)]; ++j)
                r += static_cast<unsigned __int128>(comb_capped(row[static_cast<std::size_t>(off + j)], j + 1, cap_limit));
            key = key * static_cast<unsigned __int128>(
                            comb_capped(n_sizes[static_cast<std::size_t>(k)], orders[static_cast<std::size_t>(k)], cap_limit)) +
                  r;
            off += orders[static_cast<std::size_t>(k)];
        }
        return std::make_pair(static_cast<std::uint64_t>(key),
                              static_cast<std::uint64_t>(key >> 64));
    };

    struct PairHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
            return Rng::mix(p.first ^ Rng::mix(p.second));
        }
    };

    std::vector<int> row(static_cast<std::size_t>(d_total));
    auto draw_row = [&](Rng& r) {
        int off = 0;
        for (int k = 0; k < K; ++k) {
            const int dk = orders[static_cast<std::size_t>(k)];
            auto pick = r.sample_indices(n_sizes[static_cast<std::size_t>(k)], dk);
            std::sort(pick.begin(), pick.end());
            for (int j = 0; j < dk; ++j) row[static_cast<std::size_t>(off + j)] = pick[static_cast<std::size_t>(j)];
            off += dk;
        }
    };

    if (cap <= 1000000 && 2 * m > cap) {
        // Dense regime: enumerate everything and take a uniform m-subset.
        std::vector<std::vector<int>> all;
        all.reserve(static_cast<std::size_t>(cap));
        // enumerate per-sample combinations, then take the cartesian product
        std::vector<std::vector<std::vector<int>>> combos(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const int n = n_sizes[static_cast<std::size_t>(k)], dk = orders[static_cast<std::size_t>(k)];
            std::vector<int> c(static_cast<std::size_t>(dk));
            std::iota(c.begin(), c.end(), 0);
            while (true) {
                combos[static_cast<std::size_t>(k)].push_back(c);
                int i = dk - 1;
                while (i >= 0 && c[static_cast<std::size_t>(i)] == n - dk + i) --i;
                if (i < 0) break;
                ++c[static_cast<std::size_t>(i)];
                for (int j = i + 1; j < dk; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
        std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
        while (true) {
            std::vector<int> full;
            for (int k = 0; k < K; ++k)
                for (int v : combos[static_cast<std::size_t>(k)][pos[static_cast<std::size_t>(k)]]) full.push_back(v);
            all.push_back(std::move(full));
            int k = K - 1;
            while (k >= 0 && ++pos[static_cast<std::size_t>(k)] == combos[static_cast<std::size_t>(k)].size()) {
                pos[static_cast<std::size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
        }
        for (long long i = 0; i < m; ++i) {
            const long long j = i + static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(cap - i)));
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
            for (int v : all[static_cast<std::size_t>(i)]) s.tuples.push_back(v);
        }
    } else {
        std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> seen;
        seen.reserve(static_cast<std::size_t>(m) * 2);
        while (static_cast<long long>(seen.size()) < m) {
            draw_row(rng);
            if (seen.insert(rank_row(row)).second)
                for (int v : row) s.tuples.push_back(v);
        }
    }
    s.provenance = "icur m=" + std::to_string(m);
    return s;
}

DesignSample dc_sample(int n, int order, int block, Rng rng) {
    if (block < order)
        throw InfeasibleError("dc_sample: block size " + std::to_string(block) +
                              " below kernel order " + std::to_string(order));
    if (block > n)
        throw InfeasibleError("dc_sample: block size " + std::to_string(block) + " exceeds n = " +
                              std::to_string(n));
    const int nblocks = n / block;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);

    DesignSample s;
    s.orders = {order};
    s.scheme = "dc";
    s.seed = rng.root();
    std::vector<int> c(static_cast<std::size_t>(order));
    for (int b = 0; b < nblocks; ++b) {
        const int* members = perm.data() + static_cast<std::ptrdiff_t>(b) * block;
        std::iota(c.begin(), c.end(), 0);
        while (true) {
            for (int j = 0; j < order; ++j) s.tuples.push_back(members[c[static_cast<std::size_t>(j)]]);
            s.weights.push_back(1.0);
            int i = order - 1;
            while (i >= 0 && c[static_cast<std::size_t>(i)] == block - order + i) --i;
            if (i < 0) break;
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < order; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    s.provenance = "dc b=" + std::to_string(block) + " blocks=" + std::to_string(nblocks);
    return s;
}

std::uint64_t grid_distinct_count(const std::vector<int>& grid_labels, const std::vector<int>& orders,
                                  const std::vector<Partition>& parts) {
    check_orders_match(orders, parts);
    unsigned __int128 total = 1;
    int off = 0;
    for (std::size_t k = 0; k < orders.size(); ++k) {
        const int dk = orders[k];
        const int L = parts[k].levels;
        std::vector<int> mult(static_cast<std::size_t>(L), 0);
        for (int j = 0; j < dk; ++j) {
            const int lab = grid_labels[static_cast<std::size_t>(off + j)];
            if (lab < 1 || lab > L) throw DataError("grid_distinct_count: label out of range");
            ++mult[static_cast<std::size_t>(lab - 1)];
        }
        for (int l = 0; l < L; ++l) {
            if (mult[static_cast<std::size_t>(l)] == 0) continue;
            total *= falling(static_cast<std::uint64_t>(parts[k].group_size(l)), mult[static_cast<std::size_t>(l)]);
            if (total == 0) return 0;
        }
        off += dk;
    }
    if (total > static_cast<unsigned __int128>(UINT64_MAX))
        throw CapacityError("grid_distinct_count overflows 64 bits");
    return static_cast<std::uint64_t>(total);
}

std::uint64_t s0_star_count(const std::vector<int>& orders, const std::vector<Partition>& parts) {
    check_orders_match(orders, parts);
    unsigned __int128 total = 1;
    for (std::size_t k = 0; k < orders.size(); ++k) {
        total *= falling(static_cast<std::uint64_t>(parts[k].retained()), orders[k]);
        if (total > static_cast<unsigned __int128>(UINT64_MAX))
            throw CapacityError("s0_star_count overflows 64 bits");
    }
    return static_cast<std::uint64_t>(total);
}

namespace {

void check_icudo_inputs(const OrthogonalArray& oa, const std::vector<Partition>& parts,
                        const std::vector<int>& orders) {
    check_orders_match(orders, parts);
    int d_total = 0;
    for (int dk : orders) d_total += dk;
    if (oa.factors != d_total)
        throw DataError("icudo: OA has " + std::to_string(oa.factors) + " columns but the kernel needs " +
                        std::to_string(d_total));
    for (const auto& p : parts)
        if (p.levels != oa.levels)
            throw DataError("icudo: partition has " + std::to_string(p.levels) +
                            " groups but the OA has " + std::to_string(oa.levels) + " levels");
}

std::string oa_tag(const OrthogonalArray& oa) {
    return "OA(" + std::to_string(oa.runs) + "," + std::to_string(oa.factors) + "," +
           std::to_string(oa.levels) + "," + std::to_string(oa.strength) + ")";
}

}  // namespace

DesignSample icudo_sample(const OrthogonalArray& oa, const std::vector<Partition>& parts,
                          const std::vector<int>& orders, Rng rng, bool permute) {
    check_icudo_inputs(oa, parts, orders);
    const OrthogonalArray a = permute ? permute_levels(oa, rng.child(0xA11)) : oa;
    const int d = a.factors;
    const int K = static_cast<int>(orders.size());

    DesignSample s;
    s.orders = orders;
    s.scheme = "icudo";
    s.seed = rng.root();
    s.provenance = "icudo " + oa_tag(oa);
    s.tuples.resize(static_cast<std::size_t>(a.runs) * d);
    s.weights.assign(static_cast<std::size_t>(a.runs), 1.0);
    for (int i = 0; i < a.runs; ++i) {
        Rng row_rng = rng.child2(0xD0, static_cast<std::uint64_t>(i));
        int col = 0;
        for (int k = 0; k < K; ++k) {
            for (int j = 0; j < orders[static_cast<std::size_t>(k)]; ++j, ++col) {
                const auto& grp = parts[static_cast<std::size_t>(k)].groups[static_cast<std::size_t>(a.at(i, col) - 1)];
                s.tuples[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(col)] =
                    grp[static_cast<std::size_t>(row_rng.next_int(static_cast<int>(grp.size())))];
            }
        }
    }
    return s;
}

DesignSample icudo_debiased_sample(const OrthogonalArray& oa, const std::vector<Partition>& parts,
                                   const std::vector<int>& orders, Rng rng, bool permute) {
    check_icudo_inputs(oa, parts, orders);
    const OrthogonalArray a = permute ? permute_levels(oa, rng.child(0xA11)) : oa;
    const int d = a.factors;
    const int K = static_cast<int>(orders.size());
    const std::uint64_t s0 = s0_star_count(orders, parts);
    double ld = 1.0;
    for (int j = 0; j < d; ++j) ld *= a.levels;

    DesignSample s;
    s.orders = orders;
    s.scheme = "icudo-debiased";
    s.seed = rng.root();
    s.provenance = "icudo-debiased " + oa_tag(oa);
    s.tuples.resize(static_cast<std::size_t>(a.runs) * d);
    s.weights.resize(static_cast<std::size_t>(a.runs));

    std::vector<int> labels(static_cast<std::size_t>(d));
    for (int i = 0; i < a.runs; ++i) {
        Rng row_rng = rng.child2(0xDB, static_cast<std::uint64_t>(i));
        for (int c = 0; c < d; ++c) labels[static_cast<std::size_t>(c)] = a.at(i, c);
        const std::uint64_t cnt = grid_distinct_count(labels, orders, parts);
        if (cnt == 0)
            throw InfeasibleError("icudo_debiased_sample: grid " + std::to_string(i + 1) +
                                  " has empty duplicate-free intersection (a group is smaller than "
                                  "its label multiplicity)");
        s.weights[static_cast<std::size_t>(i)] =
            ld * static_cast<double>(static_cast<long double>(cnt) / static_cast<long double>(s0));

        // Slots sharing a label draw distinct members of that group; slots
        // with different labels are automatically distinct across groups.
        int col = 0;
        for (int k = 0; k < K; ++k) {
            const int dk = orders[static_cast<std::size_t>(k)];
            const int L = parts[static_cast<std::size_t>(k)].levels;
            // slots of this sample grouped by label
            std::vector<std::vector<int>> slots_of(static_cast<std::size_t>(L));
            for (int j = 0; j < dk; ++j)
                slots_of[static_cast<std::size_t>(labels[static_cast<std::size_t>(col + j)] - 1)].push_back(col + j);
            for (int l = 0; l < L; ++l) {
                const auto& slots = slots_of[static_cast<std::size_t>(l)];
                if (slots.empty()) continue;
                const auto& grp = parts[static_cast<std::size_t>(k)].groups[static_cast<std::size_t>(l)];
                auto pick = row_rng.sample_indices(static_cast<int>(grp.size()), static_cast<int>(slots.size()));
                for (std::size_t j = 0; j < slots.size(); ++j)
                    s.tuples[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(slots[j])] =
                        grp[static_cast<std::size_t>(pick[j])];
            }
            col += dk;
        }
    }
    return s;
}

std::vector<DesignAtom> enumerate_design_distribution(const OrthogonalArray& oa,
                                                      const std::vector<Partition>& parts,
                                                      const std::vector<int>& orders, bool debiased,
                                                      std::size_t max_atoms) {
    check_icudo_inputs(oa, parts, orders);
    const int d = oa.factors;
    const int L = oa.levels;
    const int K = static_cast<int>(orders.size());

    double grid_prob = 1.0;
    std::size_t grid_count = 1;
    for (int j = 0; j < d; ++j) {
        grid_prob /= L;
        grid_count *= static_cast<std::size_t>(L);
        if (grid_count > max_atoms)
            throw CapacityError("enumerate_design_distribution: L^d exceeds the atom budget");
    }
    const std::uint64_t s0 = debiased ? s0_star_count(orders, parts) : 0;
    double ld = 1.0;
    for (int j = 0; j < d; ++j) ld *= L;

    std::vector<int> sample_of(static_cast<std::size_t>(d));
    for (int k = 0, col = 0; k < K; ++k)
        for (int j = 0; j < orders[static_cast<std::size_t>(k)]; ++j, ++col)
            sample_of[static_cast<std::size_t>(col)] = k;

    std::vector<DesignAtom> atoms;
    std::vector<int> labels(static_cast<std::size_t>(d), 1);
    std::vector<int> tuple(static_cast<std::size_t>(d));
    while (true) {
        // members of this grid
        double weight = 1.0;
        std::uint64_t cnt = 0;
        if (debiased) {
            cnt = grid_distinct_count(labels, orders, parts);
            if (cnt == 0)
                throw InfeasibleError("enumerate_design_distribution: empty duplicate-free grid");
            weight = ld * static_cast<double>(static_cast<long double>(cnt) / static_cast<long double>(s0));
        } else {
            cnt = 1;
            int col = 0;
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < orders[static_cast<std::size_t>(k)]; ++j, ++col)
                    cnt *= static_cast<std::uint64_t>(
                        parts[static_cast<std::size_t>(k)].group_size(labels[static_cast<std::size_t>(col)] - 1));
        }
        const double atom_prob = grid_prob / static_cast<double>(cnt);

        // enumerate the grid's tuples (filter within-sample duplicates when debiased)
        std::vector<int> pos(static_cast<std::size_t>(d), 0);
        while (true) {
            int col = 0;
            bool ok = true;
            for (int k = 0; k < K && ok; ++k) {
                const int dk = orders[static_cast<std::size_t>(k)];
                for (int j = 0; j < dk; ++j) {
                    const auto& grp =
                        parts[static_cast<std::size_t>(k)].groups[static_cast<std::size_t>(labels[static_cast<std::size_t>(col + j)] - 1)];
                    tuple[static_cast<std::size_t>(col + j)] = grp[static_cast<std::size_t>(pos[static_cast<std::size_t>(col + j)])];
                }
                if (debiased) {
                    for (int j1 = 0; j1 < dk && ok; ++j1)
                        for (int j2 = j1 + 1; j2 < dk; ++j2)
                            if (tuple[static_cast<std::size_t>(col + j1)] == tuple[static_cast<std::size_t>(col + j2)]) {
                                ok = false;
                                break;
                            }
                }
                col += dk;
            }
            if (ok) {
                if (atoms.size() >= max_atoms)
                    throw CapacityError("enumerate_design_distribution: atom budget exceeded");
                atoms.push_back({tuple, weight, atom_prob});
            }
            int c = d - 1;
            while (c >= 0) {
                const int gs = parts[static_cast<std::size_t>(sample_of[static_cast<std::size_t>(c)])]
                                   .group_size(labels[static_cast<std::size_t>(c)] - 1);
                if (++pos[static_cast<std::size_t>(c)] < gs) break;
                pos[static_cast<std::size_t>(c)] = 0;
                --c;
            }
            if (c < 0) break;
        }

        int c = d - 1;
        while (c >= 0 && ++labels[static_cast<std::size_t>(c)] > L) {
            labels[static_cast<std::size_t>(c)] = 1;
            --c;
        }
        if (c < 0) break;
    }
    return atoms;
}

void write_design_csv(const DesignSample& s, std::ostream& os) {
    os << "row,sample_k,slot_j,index,weight\n";
    os.precision(17);
    const int d = s.d_total();
    for (int i = 0; i < s.rows(); ++i) {
        int col = 0;
        for (std::size_t k = 0; k < s.orders.size(); ++k) {
            for (int j = 0; j < s.orders[k]; ++j, ++col) {
                os << (i + 1) << ',' << (k + 1) << ',' << (j + 1) << ','
                   << s.tuples[static_cast<std::size_t>(i) * d + static_cast<std::size_t>(col)] << ','
                   << s.weights[static_cast<std::size_t>(i)] << '\n';
            }
        }
    }
}

DesignSample read_design_csv(std::istream& is, const std::vector<int>& orders) {
    DesignSample s;
    s.orders = orders;
    s.scheme = "replay";
    const int d = s.d_total();
    std::string line;
    if (!std::getline(is, line) || line.rfind("row,sample_k,slot_j,index,weight", 0) != 0)
        throw DataError("design CSV: missing header");
    long lineno = 1;
    int expected_row = 1, expected_col = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int row, k, j, index;
        double w;
        char c1, c2, c3, c4;
        if (!(ls >> row >> c1 >> k >> c2 >> j >> c3 >> index >> c4 >> w) || c1 != ',' || c2 != ',' ||
            c3 != ',' || c4 != ',')
            throw DataError("design CSV line " + std::to_string(lineno) + ": malformed row");
        if (row != expected_row)
            throw DataError("design CSV line " + std::to_string(lineno) + ": rows out of order");
        s.tuples.push_back(index);
        if (expected_col == 0) s.weights.push_back(w);
        if (++expected_col == d) {
            expected_col = 0;
            ++expected_row;
        }
    }
    if (expected_col != 0) throw DataError("design CSV: truncated final row");
    return s;
}

}  // namespace icudo
