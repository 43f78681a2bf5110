// Copyright 2026 The jointmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Measurement-setting families.
//
// A setting is U = U_resh U_sup U_pair. U_pair maps the standard pair
// (2i-1, 2i) onto (pi(2i-1), pi(2i)), U_sup superposes the modes inside each
// base cluster Y_a, and U_resh moves Y_a onto sigma(Y_a). In round r the
// readout of standard pair i therefore involves exactly the two round
// clusters sigma(Y_a), sigma(Y_b) with pi(2i-1) in Y_a and pi(2i) in Y_b.
//
// Grids are row-major with a top-left origin: the mode in row r, column c of
// a grid with C columns is (r - 1) * C + c. Standard pairs are horizontally
// adjacent cells. "Shifting a column down by s" maps the mode in row r of that
// column to the mode in row r + s (cyclically).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jointmeas/flo.hpp"
#include "jointmeas/majorana.hpp"
#include "jointmeas/random.hpp"

namespace jointmeas {

enum class SchemeKind { kPairs2, kQuadruplesPrime7, kRandom9, kPhysical4 };

inline std::string to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::kPairs2: return "pairs2";
        case SchemeKind::kQuadruplesPrime7: return "quad7";
        case SchemeKind::kRandom9: return "rand9";
        case SchemeKind::kPhysical4: return "physical4";
    }
    return "?";
}

inline SchemeKind parse_scheme_kind(const std::string& s) {
    if (s == "pairs2") return SchemeKind::kPairs2;
    if (s == "quad7") return SchemeKind::kQuadruplesPrime7;
    if (s == "rand9") return SchemeKind::kRandom9;
    if (s == "physical4") return SchemeKind::kPhysical4;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected pairs2|quad7|rand9|physical4)");
}

struct GridLayout {
    int rows = 0;
    int cols = 0;

    int size() const { return rows * cols; }

    /// 1-based row and column; the row wraps cyclically.
    int mode_at(int row, int col) const {
        const int r = ((row - 1) % rows + rows) % rows;
        return r * cols + col;
    }

    std::pair<int, int> cell_of(int mode) const {
        if (mode < 1 || mode > size()) throw std::out_of_range("GridLayout::cell_of: mode outside grid");
        return {(mode - 1) / cols + 1, (mode - 1) % cols + 1};
    }

    /// Permutation shifting column c down by shifts[c - 1] rows (cyclically).
    ModePermutation column_shift(const std::vector<int>& shifts) const {
        std::vector<int> image(size());
        for (int m = 1; m <= size(); ++m) {
            auto [r, c] = cell_of(m);
            image[m - 1] = mode_at(r + shifts.at(c - 1), c);
        }
        return ModePermutation(std::move(image));
    }

    bool operator==(const GridLayout&) const = default;
};

enum class ClusterParity { kNone, kOdd, kEven };

struct ClusterPartition {
    std::vector<MajoranaIndexSet> clusters;
    std::vector<ClusterParity> labels;
    /// cluster_of[m - 1] is the 0-based cluster holding mode m.
    std::vector<int> cluster_of;

    static ClusterPartition make(std::vector<MajoranaIndexSet> clusters, std::vector<ClusterParity> labels,
                                 int n_majorana) {
        if (labels.empty()) labels.assign(clusters.size(), ClusterParity::kNone);
        if (labels.size() != clusters.size()) throw std::invalid_argument("ClusterPartition: label count mismatch");
        ClusterPartition p;
        p.cluster_of.assign(n_majorana, -1);
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (int m : clusters[a]) {
                if (m < 1 || m > n_majorana || p.cluster_of[m - 1] != -1) {
                    throw std::invalid_argument("ClusterPartition: clusters are not a disjoint cover");
                }
                p.cluster_of[m - 1] = static_cast<int>(a);
                if ((labels[a] == ClusterParity::kOdd && m % 2 == 0) ||
                    (labels[a] == ClusterParity::kEven && m % 2 == 1)) {
                    throw std::invalid_argument("ClusterPartition: mode parity contradicts cluster label");
                }
            }
        }
        if (std::find(p.cluster_of.begin(), p.cluster_of.end(), -1) != p.cluster_of.end()) {
            throw std::invalid_argument("ClusterPartition: clusters do not cover every mode");
        }
        p.clusters = std::move(clusters);
        p.labels = std::move(labels);
        return p;
    }

    int size() const { return static_cast<int>(clusters.size()); }
};

struct PairCoupling {
    int first_cluster = -1;
    int second_cluster = -1;
};

struct MeasurementSetting {
    int round_index = 1;
    GridLayout layout;
    /// Round clusters sigma(Y_a); cluster a of this partition is the image of base cluster a.
    ClusterPartition partition;
    ModePermutation pairing;
    ModePermutation reshuffle;
    /// blocks[a] acts on base cluster Y_a in increasing mode order.
    std::vector<FlatBlock> blocks;
    OrthogonalMatrix composed;
    /// coupling[i - 1]: round clusters touched by the readout of standard pair i.
    std::vector<PairCoupling> coupling;
    /// (smaller cluster, larger cluster) -> standard pair indices i (1-based).
    std::map<std::pair<int, int>, std::vector<int>> pairs_between;

    int n_majorana() const { return composed.dim(); }
    int n_fermionic() const { return composed.dim() / 2; }

    const std::vector<int>& couplings(int a, int b) const {
        static const std::vector<int> none;
        auto it = pairs_between.find({std::min(a, b), std::max(a, b)});
        return it == pairs_between.end() ? none : it->second;
    }
};

enum class CoverageTarget { kPairs, kQuadruples, kChemistry };

struct CoverageReport {
    CoverageTarget target = CoverageTarget::kPairs;
    std::size_t n_targets = 0;
    /// Target sets not consistent with any setting.
    std::vector<MajoranaIndexSet> uncovered;
    /// Consistent somewhere, but no setting reads them out with nonzero visibility.
    std::vector<MajoranaIndexSet> zero_visibility;
    std::vector<MajoranaIndexSet> targets;
    std::vector<double> best_visibility;
    std::vector<int> best_round;

    bool passed() const { return uncovered.empty(); }
};

struct SettingFamily {
    SchemeKind kind = SchemeKind::kPairs2;
    ModeCount modes;
    std::vector<MeasurementSetting> settings;
    /// Modes added by embedding; empty when the family was built at its native size.
    MajoranaIndexSet auxiliary;
    /// Filled by the random-partition builder.
    std::optional<CoverageReport> coverage;

    int size() const { return static_cast<int>(settings.size()); }
    const MeasurementSetting& operator[](int r) const { return settings.at(r); }
};

/// Assembles one setting from base clusters Y_a, the pairing pi and the reshuffle sigma.
inline MeasurementSetting make_setting(int round_index, const GridLayout& layout,
                                       const std::vector<MajoranaIndexSet>& base_clusters,
                                       const std::vector<ClusterParity>& labels, const ModePermutation& pairing,
                                       const ModePermutation& reshuffle, BlockFamily blocks) {
    const int dim = pairing.size();
    if (reshuffle.size() != dim || dim % 2 != 0) throw std::invalid_argument("make_setting: dimension mismatch");
    auto base = ClusterPartition::make(base_clusters, labels, dim);

    MeasurementSetting s;
    s.round_index = round_index;
    s.layout = layout;
    s.pairing = pairing;
    s.reshuffle = reshuffle;

    std::map<int, FlatBlock> by_size;
    Eigen::MatrixXd sup = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& cluster : base.clusters) {
        const int l = static_cast<int>(cluster.size());
        auto it = by_size.find(l);
        if (it == by_size.end()) it = by_size.emplace(l, build_flat_block(l, blocks)).first;
        s.blocks.push_back(it->second);
        for (int a = 0; a < l; ++a)
            for (int b = 0; b < l; ++b) sup(cluster[a] - 1, cluster[b] - 1) = it->second.entries(a, b);
    }
    s.composed = compose_setting(reshuffle, OrthogonalMatrix(std::move(sup)), pairing);

    std::vector<MajoranaIndexSet> round_clusters;
    round_clusters.reserve(base.clusters.size());
    for (const auto& c : base.clusters) round_clusters.push_back(reshuffle.apply(c));
    s.partition = ClusterPartition::make(std::move(round_clusters), base.labels, dim);

    for (int i = 1; i <= dim / 2; ++i) {
        const int a = base.cluster_of[pairing(2 * i - 1) - 1];
        const int b = base.cluster_of[pairing(2 * i) - 1];
        if (a == b) {
            throw std::invalid_argument("make_setting: standard pair " + std::to_string(i) +
                                        " is mapped inside a single cluster");
        }
        s.coupling.push_back({a, b});
        s.pairs_between[{std::min(a, b), std::max(a, b)}].push_back(i);
    }
    return s;
}

/// True iff every element of `a` lies in a different cluster of the setting.
inline bool consistent(const MeasurementSetting& setting, const MajoranaIndexSet& a) {
    a.check_range(ModeCount::from_majorana(setting.n_majorana()));
    std::vector<int> seen;
    seen.reserve(a.size());
    for (int m : a) {
        const int c = setting.partition.cluster_of[m - 1];
        if (std::find(seen.begin(), seen.end(), c) != seen.end()) return false;
        seen.push_back(c);
    }
    return true;
}

struct TargetChoice {
    MajoranaIndexSet pairs;
    /// Signed det R_{A, pairs}.
    double nu = 0.0;
};

namespace detail {

inline void enumerate_matchings(const MeasurementSetting& s, std::vector<int>& clusters, std::vector<bool>& used,
                                std::vector<int>& chosen, std::vector<std::vector<int>>& out) {
    std::size_t u = 0;
    while (u < clusters.size() && used[u]) ++u;
    if (u == clusters.size()) {
        out.push_back(chosen);
        return;
    }
    used[u] = true;
    for (std::size_t v = u + 1; v < clusters.size(); ++v) {
        if (used[v]) continue;
        used[v] = true;
        for (int pair : s.couplings(clusters[u], clusters[v])) {
            chosen.push_back(pair);
            enumerate_matchings(s, clusters, used, chosen, out);
            chosen.pop_back();
        }
        used[v] = false;
    }
    used[u] = false;
}

}  // namespace detail

/// Chooses the union B of |A|/2 read-out pairs maximizing |det R_{A,B}| over all
/// assignments of cluster couplings; ties go to the lexicographically smaller B.
/// Returns nullopt when no assignment exists (A inconsistent or couplings missing).
inline std::optional<TargetChoice> best_target(const MeasurementSetting& setting, const MajoranaIndexSet& a) {
    if (!a.even()) throw std::invalid_argument("best_target: observable must have even size");
    if (a.empty()) return TargetChoice{{}, 1.0};
    if (!consistent(setting, a)) return std::nullopt;
    std::vector<int> clusters;
    for (int m : a) clusters.push_back(setting.partition.cluster_of[m - 1]);
    std::vector<bool> used(clusters.size(), false);
    std::vector<int> chosen;
    std::vector<std::vector<int>> matchings;
    detail::enumerate_matchings(setting, clusters, used, chosen, matchings);

    std::optional<TargetChoice> best;
    for (const auto& m : matchings) {
        std::vector<int> b;
        for (int i : m) {
            b.push_back(2 * i - 1);
            b.push_back(2 * i);
        }
        TargetChoice cand{MajoranaIndexSet(std::move(b)), 0.0};
        cand.nu = submatrix_det(setting.composed, a, cand.pairs);
        if (!best) {
            best = std::move(cand);
            continue;
        }
        const double diff = std::abs(cand.nu) - std::abs(best->nu);
        const double tol = 1e-12 * std::max(1.0, std::abs(best->nu));
        if (diff > tol || (std::abs(diff) <= tol && cand.pairs.indices() < best->pairs.indices())) {
            best = std::move(cand);
        }
    }
    return best;
}

/// f(A): the read-out pairs used for A in this setting.
inline MajoranaIndexSet select_target_pairs(const MeasurementSetting& setting, const MajoranaIndexSet& a) {
    if (!consistent(setting, a)) {
        throw std::invalid_argument("select_target_pairs: " + a.to_string() + " is not consistent with round " +
                                    std::to_string(setting.round_index));
    }
    auto best = best_target(setting, a);
    if (!best) {
        throw std::invalid_argument("select_target_pairs: no coupling assignment reads out " + a.to_string());
    }
    return best->pairs;
}

// ---------------------------------------------------------------------------
// Embedding

struct Embedding {
    ModeCount total;
    MajoranaIndexSet auxiliary;
    /// Grid parameter L of the chosen family.
    int side = 0;
};

namespace detail {

inline bool is_prime(int x) {
    if (x < 2) return false;
    for (int d = 2; d * d <= x; ++d)
        if (x % d == 0) return false;
    return true;
}

inline int native_size(SchemeKind kind, int side) {
    return kind == SchemeKind::kPhysical4 ? 2 * side * side : side * (side + 1);
}

inline bool admissible_side(SchemeKind kind, int side) {
    switch (kind) {
        case SchemeKind::kPairs2: return side >= 2 && side % 2 == 0;
        case SchemeKind::kQuadruplesPrime7: return side >= 6 && is_prime(side + 1);
        case SchemeKind::kRandom9: return side >= 1;
        case SchemeKind::kPhysical4: return side >= 1;
    }
    return false;
}

/// L with native_size(kind, L) == n_majorana, or -1.
inline int exact_side(SchemeKind kind, int n_majorana) {
    for (int l = 1; native_size(kind, l) <= n_majorana; ++l) {
        if (native_size(kind, l) == n_majorana && admissible_side(kind, l)) return l;
    }
    return -1;
}

}  // namespace detail

/// Smallest admissible grid holding `physical`; auxiliary modes are appended after the physical ones.
inline Embedding embed_modes(ModeCount physical, SchemeKind kind) {
    int l = 1;
    while (!detail::admissible_side(kind, l) || detail::native_size(kind, l) < physical.majorana()) ++l;
    const int total = detail::native_size(kind, l);
    std::vector<int> aux;
    for (int m = physical.majorana() + 1; m <= total; ++m) aux.push_back(m);
    return {ModeCount::from_majorana(total), MajoranaIndexSet::from_sorted(std::move(aux)), l};
}

// ---------------------------------------------------------------------------
// Builders

namespace detail {

inline std::vector<MajoranaIndexSet> grid_rows(const GridLayout& g) {
    std::vector<MajoranaIndexSet> rows;
    for (int r = 1; r <= g.rows; ++r) {
        std::vector<int> v;
        for (int c = 1; c <= g.cols; ++c) v.push_back(g.mode_at(r, c));
        rows.push_back(MajoranaIndexSet::from_sorted(std::move(v)));
    }
    return rows;
}

/// Pairing for an (l rows) x (k cols) grid: the m-th even column (column 2m) moves down by m.
inline ModePermutation row_grid_pairing(const GridLayout& g) {
    std::vector<int> shifts(g.cols, 0);
    for (int m = 1; 2 * m <= g.cols; ++m) shifts[2 * m - 1] = m;
    return g.column_shift(shifts);
}

}  // namespace detail

/// Two settings on the (L+1) x L grid, 2N = L(L+1), L even.
inline SettingFamily build_pair_scheme(ModeCount n, BlockFamily blocks = BlockFamily::kAuto) {
    const int l = detail::exact_side(SchemeKind::kPairs2, n.majorana());
    if (l < 0) {
        throw std::invalid_argument("build_pair_scheme: 2N = " + std::to_string(n.majorana()) +
                                    " is not L(L+1) with L even; embed first");
    }
    const GridLayout g{l + 1, l};
    const auto rows = detail::grid_rows(g);
    const auto pi = detail::row_grid_pairing(g);
    std::vector<int> shifts(l);
    for (int c = 1; c <= l; ++c) shifts[c - 1] = c - 1;

    SettingFamily f;
    f.kind = SchemeKind::kPairs2;
    f.modes = n;
    f.settings.push_back(make_setting(1, g, rows, {}, pi, ModePermutation::identity(n.majorana()), blocks));
    f.settings.push_back(make_setting(2, g, rows, {}, pi, g.column_shift(shifts), blocks));
    return f;
}

/// Seven arrangements pi^a, a = 0..6, of an l x k grid (l rows, k columns) whose
/// column i is shifted by v_i = i - 1. Requires l prime, l >= 7, k >= 4, k even, k <= l.
inline SettingFamily build_quadruple_scheme_prime(int l, int k, BlockFamily blocks = BlockFamily::kAuto) {
    if (l < 7 || !detail::is_prime(l)) throw std::invalid_argument("build_quadruple_scheme_prime: l must be a prime >= 7");
    if (k < 4) throw std::invalid_argument("build_quadruple_scheme_prime: k must be >= 4");
    if (k % 2 != 0) throw std::invalid_argument("build_quadruple_scheme_prime: k must be even to hold standard pairs");
    if (k > l) throw std::invalid_argument("build_quadruple_scheme_prime: need k <= l for distinct shifts");
    const GridLayout g{l, k};
    const auto rows = detail::grid_rows(g);
    const auto pi = detail::row_grid_pairing(g);

    SettingFamily f;
    f.kind = SchemeKind::kQuadruplesPrime7;
    f.modes = ModeCount::from_majorana(l * k);
    for (int a = 0; a < 7; ++a) {
        std::vector<int> shifts(k);
        for (int i = 1; i <= k; ++i) shifts[i - 1] = a * (i - 1);
        f.settings.push_back(make_setting(a + 1, g, rows, {}, pi, g.column_shift(shifts), blocks));
    }
    return f;
}

/// 2N = L(L+1) with L + 1 prime and L >= 6: the (L+1) x L layout of the pair scheme.
inline SettingFamily build_quadruple_scheme_prime(ModeCount n, BlockFamily blocks = BlockFamily::kAuto) {
    const int l = detail::exact_side(SchemeKind::kQuadruplesPrime7, n.majorana());
    if (l < 0) {
        throw std::invalid_argument("build_quadruple_scheme_prime: 2N = " + std::to_string(n.majorana()) +
                                    " is not L(L+1) with L+1 prime >= 7; embed first");
    }
    return build_quadruple_scheme_prime(l + 1, l, blocks);
}

inline CoverageReport coverage_check(const SettingFamily& family, CoverageTarget target);

/// `count` uniformly random partitions of 2N = L(L+1) modes into L+1 clusters of
/// size L. Each partition gets a pairing that joins every pair of clusters once.
inline SettingFamily build_random_partition_scheme(ModeCount n, int count, std::uint64_t seed,
                                                   BlockFamily blocks = BlockFamily::kAuto) {
    if (count < 1) throw std::invalid_argument("build_random_partition_scheme: count must be >= 1");
    const int l = detail::exact_side(SchemeKind::kRandom9, n.majorana());
    if (l < 0) {
        throw std::invalid_argument("build_random_partition_scheme: 2N = " + std::to_string(n.majorana()) +
                                    " is not L(L+1); embed first");
    }
    const GridLayout g{l + 1, l};
    Rng rng(derive_seed(seed, 0x7a11));

    SettingFamily f;
    f.kind = SchemeKind::kRandom9;
    f.modes = n;
    for (int r = 1; r <= count; ++r) {
        std::vector<int> modes(n.majorana());
        std::iota(modes.begin(), modes.end(), 1);
        rng.shuffle(modes);
        std::vector<MajoranaIndexSet> clusters;
        for (int a = 0; a <= l; ++a) {
            clusters.emplace_back(std::vector<int>(modes.begin() + a * l, modes.begin() + (a + 1) * l));
        }
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a <= l; ++a)
            for (int b = a + 1; b <= l; ++b) edges.emplace_back(a, b);
        rng.shuffle(edges);
        std::vector<int> next(l + 1, 0);
        std::vector<int> image(n.majorana());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [a, b] = edges[i];
            image[2 * i] = clusters[a][next[a]++];
            image[2 * i + 1] = clusters[b][next[b]++];
        }
        f.settings.push_back(make_setting(r, g, clusters, {}, ModePermutation(std::move(image)),
                                          ModePermutation::identity(n.majorana()), blocks));
    }
    f.coverage = coverage_check(f, CoverageTarget::kQuadruples);
    return f;
}

/// Four rounds on the L x 2L grid (2N = 2L^2). Clusters are the odd and the
/// even modes of each row; cluster 2(a-1) is O_a and cluster 2(a-1)+1 is E_a.
inline SettingFamily build_physical_scheme(ModeCount n, BlockFamily blocks = BlockFamily::kAuto) {
    const int l = detail::exact_side(SchemeKind::kPhysical4, n.majorana());
    if (l < 0) {
        throw std::invalid_argument("build_physical_scheme: 2N = " + std::to_string(n.majorana()) +
                                    " is not 2L^2; embed first");
    }
    const GridLayout g{l, 2 * l};
    std::vector<MajoranaIndexSet> clusters;
    std::vector<ClusterParity> labels;
    for (int r = 1; r <= l; ++r) {
        std::vector<int> odd, even;
        for (int c = 1; c <= 2 * l; ++c) (c % 2 ? odd : even).push_back(g.mode_at(r, c));
        clusters.push_back(MajoranaIndexSet::from_sorted(std::move(odd)));
        labels.push_back(ClusterParity::kOdd);
        clusters.push_back(MajoranaIndexSet::from_sorted(std::move(even)));
        labels.push_back(ClusterParity::kEven);
    }
    // The l-th odd (even) column is column 2l-1 (2l); it moves down by l-1.
    std::vector<int> even_shift(2 * l, 0), odd_shift(2 * l, 0), both_shift(2 * l, 0);
    for (int c = 1; c <= l; ++c) {
        even_shift[2 * c - 1] = c - 1;
        odd_shift[2 * c - 2] = c - 1;
        both_shift[2 * c - 1] = c - 1;
        both_shift[2 * c - 2] = c - 1;
    }
    const auto pi = g.column_shift(even_shift);
    const auto sigma2 = g.column_shift(odd_shift);
    const auto sigma3 = g.column_shift(even_shift);
    const auto sigma4 = sigma2 * sigma3;

    SettingFamily f;
    f.kind = SchemeKind::kPhysical4;
    f.modes = n;
    const ModePermutation reshuffles[] = {ModePermutation::identity(n.majorana()), sigma2, sigma3, sigma4};
    for (int r = 0; r < 4; ++r) {
        f.settings.push_back(make_setting(r + 1, g, clusters, labels, pi, reshuffles[r], blocks));
    }
    return f;
}

struct FamilyOptions {
    BlockFamily blocks = BlockFamily::kAuto;
    std::uint64_t seed = 0;
    int random_count = 9;
};

/// Embeds `physical` into the smallest admissible size and builds the family there.
inline SettingFamily build_family(SchemeKind kind, ModeCount physical, const FamilyOptions& opt = {}) {
    const Embedding e = embed_modes(physical, kind);
    SettingFamily f;
    switch (kind) {
        case SchemeKind::kPairs2: f = build_pair_scheme(e.total, opt.blocks); break;
        case SchemeKind::kQuadruplesPrime7: f = build_quadruple_scheme_prime(e.total, opt.blocks); break;
        case SchemeKind::kRandom9: f = build_random_partition_scheme(e.total, opt.random_count, opt.seed, opt.blocks); break;
        case SchemeKind::kPhysical4: f = build_physical_scheme(e.total, opt.blocks); break;
    }
    f.auxiliary = e.auxiliary;
    return f;
}

// ---------------------------------------------------------------------------
// Structural checks

/// Every standard pair joins two distinct clusters and no two pairs join the same two.
inline bool coupling_graph_simple(const MeasurementSetting& s) {
    for (const auto& [key, pairs] : s.pairs_between)
        if (pairs.size() != 1 || key.first == key.second) return false;
    return true;
}

/// Complete graph on all clusters, or complete bipartite odd/even graph when clusters carry parity labels.
inline bool coupling_graph_complete(const MeasurementSetting& s) {
    const auto& labels = s.partition.labels;
    const int k = s.partition.size();
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            const bool parity_split = labels[a] != ClusterParity::kNone && labels[b] != ClusterParity::kNone;
            const bool required = !parity_split || labels[a] != labels[b];
            if (required != !s.couplings(a, b).empty()) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Coverage

namespace detail {

template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 1);
    while (true) {
        fn(MajoranaIndexSet::from_sorted(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i + 1) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

/// All chemistry-structured sets over [1, n_majorana]: pairs with one odd and one
/// even index, quadruples with two of each.
inline std::vector<MajoranaIndexSet> chemistry_targets(int n_majorana) {
    std::vector<MajoranaIndexSet> out;
    for (int a = 1; a <= n_majorana; a += 2)
        for (int b = 2; b <= n_majorana; b += 2) out.push_back(MajoranaIndexSet{a, b});
    for (int o1 = 1; o1 <= n_majorana; o1 += 2)
        for (int o2 = o1 + 2; o2 <= n_majorana; o2 += 2)
            for (int e1 = 2; e1 <= n_majorana; e1 += 2)
                for (int e2 = e1 + 2; e2 <= n_majorana; e2 += 2) out.push_back(MajoranaIndexSet{o1, o2, e1, e2});
    return out;
}

inline CoverageReport coverage_check(const SettingFamily& family, CoverageTarget target) {
    CoverageReport rep;
    rep.target = target;
    const int n = family.modes.majorana();
    auto visit = [&](const MajoranaIndexSet& a) {
        double best = 0.0;
        int best_round = 0;
        bool any_consistent = false;
        for (const auto& s : family.settings) {
            if (!consistent(s, a)) continue;
            any_consistent = true;
            if (auto t = best_target(s, a); t && std::abs(t->nu) > best) {
                best = std::abs(t->nu);
                best_round = s.round_index;
            }
        }
        if (!any_consistent) {
            rep.uncovered.push_back(a);
        } else if (best == 0.0) {
            rep.zero_visibility.push_back(a);
        }
        rep.targets.push_back(a);
        rep.best_visibility.push_back(best);
        rep.best_round.push_back(best_round);
    };
    switch (target) {
        case CoverageTarget::kPairs: detail::for_each_subset(n, 2, visit); break;
        case CoverageTarget::kQuadruples: detail::for_each_subset(n, 4, visit); break;
        case CoverageTarget::kChemistry:
            for (const auto& a : chemistry_targets(n)) visit(a);
            break;
    }
    rep.n_targets = rep.targets.size();
    return rep;
}

}  // namespace jointmeas
