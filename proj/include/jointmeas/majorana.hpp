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

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace jointmeas {

/// Number of fermionic modes N; the Majorana operators are indexed 1..2N.
class ModeCount {
  public:
    constexpr ModeCount() = default;
    explicit ModeCount(int n_fermionic) : n_(n_fermionic) {
        if (n_fermionic < 1) {
            throw std::invalid_argument("ModeCount: need at least one fermionic mode");
        }
    }
    static ModeCount from_majorana(int n_majorana) {
        if (n_majorana < 2 || n_majorana % 2 != 0) {
            throw std::invalid_argument("ModeCount: Majorana count must be even and positive");
        }
        return ModeCount(n_majorana / 2);
    }

    constexpr int fermionic() const { return n_; }
    constexpr int majorana() const { return 2 * n_; }

    constexpr auto operator<=>(const ModeCount&) const = default;

  private:
    int n_ = 1;
};

/// Sorted set of 1-based Majorana indices. The empty set stands for the identity.
class MajoranaIndexSet {
  public:
    MajoranaIndexSet() = default;
    MajoranaIndexSet(std::initializer_list<int> indices) : MajoranaIndexSet(std::vector<int>(indices)) {}
    explicit MajoranaIndexSet(std::vector<int> indices) : idx_(std::move(indices)) {
        std::sort(idx_.begin(), idx_.end());
        if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
            throw std::invalid_argument("MajoranaIndexSet: duplicate index");
        }
        if (!idx_.empty() && idx_.front() < 1) {
            throw std::out_of_range("MajoranaIndexSet: indices are 1-based");
        }
    }

    /// Builds from a list that is already strictly increasing; no re-sorting.
    static MajoranaIndexSet from_sorted(std::vector<int> indices) {
        MajoranaIndexSet s;
        s.idx_ = std::move(indices);
        return s;
    }

    /// Set of all i with bit (i-1) of `mask` set.
    static MajoranaIndexSet from_mask(unsigned long long mask) {
        std::vector<int> v;
        for (int i = 0; mask != 0; ++i, mask >>= 1) {
            if (mask & 1ULL) v.push_back(i + 1);
        }
        return from_sorted(std::move(v));
    }

    /// Bitmask with bit (i-1) set for every member; requires max index <= 64.
    unsigned long long mask() const {
        unsigned long long m = 0;
        for (int i : idx_) {
            if (i > 64) throw std::out_of_range("MajoranaIndexSet::mask: index above 64");
            m |= 1ULL << (i - 1);
        }
        return m;
    }

    const std::vector<int>& indices() const { return idx_; }
    std::size_t size() const { return idx_.size(); }
    bool empty() const { return idx_.empty(); }
    bool even() const { return idx_.size() % 2 == 0; }
    int max() const { return idx_.empty() ? 0 : idx_.back(); }
    bool contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }
    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }
    int operator[](std::size_t k) const { return idx_[k]; }

    /// Throws std::out_of_range unless every index lies in [1, 2N].
    void check_range(ModeCount n) const {
        if (!idx_.empty() && idx_.back() > n.majorana()) {
            throw std::out_of_range("Majorana index " + std::to_string(idx_.back()) +
                                    " exceeds 2N = " + std::to_string(n.majorana()));
        }
    }

    bool operator==(const MajoranaIndexSet&) const = default;
    /// Orders by size first, then lexicographically.
    std::strong_ordering operator<=>(const MajoranaIndexSet& o) const {
        if (auto c = idx_.size() <=> o.idx_.size(); c != 0) return c;
        return idx_ <=> o.idx_;
    }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t k = 0; k < idx_.size(); ++k) {
            if (k) s += ",";
            s += std::to_string(idx_[k]);
        }
        return s + "}";
    }

  private:
    std::vector<int> idx_;
};

inline std::ostream& operator<<(std::ostream& os, const MajoranaIndexSet& s) { return os << s.to_string(); }

/// Exact fourth root of unity i^k.
class Phase {
  public:
    constexpr Phase() = default;
    constexpr explicit Phase(int power) : k_(((power % 4) + 4) % 4) {}
    static constexpr Phase one() { return Phase(0); }
    static constexpr Phase i() { return Phase(1); }
    static constexpr Phase minus_one() { return Phase(2); }
    static constexpr Phase minus_i() { return Phase(3); }

    constexpr int power() const { return k_; }
    constexpr bool is_real() const { return k_ % 2 == 0; }
    /// +1 or -1; only meaningful when is_real().
    constexpr int real_sign() const { return k_ == 0 ? 1 : -1; }
    constexpr Phase operator*(Phase o) const { return Phase(k_ + o.k_); }
    constexpr Phase conj() const { return Phase(-k_); }
    constexpr bool operator==(const Phase&) const = default;

  private:
    int k_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Phase p) {
    static const char* names[] = {"+1", "+i", "-1", "-i"};
    return os << names[p.power()];
}

struct SignedTerm {
    Phase phase;
    MajoranaIndexSet set;
    bool operator==(const SignedTerm&) const = default;
};

inline std::size_t intersection_size(const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

inline MajoranaIndexSet symmetric_difference(const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return MajoranaIndexSet::from_sorted(std::move(out));
}

/// True iff gamma_A and gamma_B commute, i.e. |A||B| + |A n B| is even.
inline bool commutes(const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    return (a.size() * b.size() + intersection_size(a, b)) % 2 == 0;
}

inline bool commutes(const MajoranaIndexSet& a, const MajoranaIndexSet& b, ModeCount n) {
    a.check_range(n);
    b.check_range(n);
    return commutes(a, b);
}

/// Number of transpositions needed to sort the concatenation a ++ b, counted
/// as sum over b of #{x in a : x > b}. Equal elements do not count.
inline std::size_t merge_inversions(const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    std::size_t inv = 0;
    std::size_t greater = a.size();
    auto ia = a.begin();
    for (int x : b) {
        while (ia != a.end() && *ia <= x) {
            ++ia;
            --greater;
        }
        inv += greater;
    }
    return inv;
}

/// gamma_A gamma_B = phase * gamma_{A xor B} with gamma_A = i^{|A|/2} prod_{i in A} gamma_i.
inline SignedTerm monomial_product(const MajoranaIndexSet& a, const MajoranaIndexSet& b) {
    if (!a.even() || !b.even()) {
        throw std::invalid_argument("monomial_product: both sets must have even size");
    }
    const std::size_t shared = intersection_size(a, b);
    const int sign_power = (merge_inversions(a, b) % 2) ? 2 : 0;
    return {Phase(sign_power + static_cast<int>(shared)), symmetric_difference(a, b)};
}

inline SignedTerm monomial_product(const MajoranaIndexSet& a, const MajoranaIndexSet& b, ModeCount n) {
    a.check_range(n);
    b.check_range(n);
    return monomial_product(a, b);
}

/// Hash usable with unordered containers.
struct MajoranaIndexSetHash {
    std::size_t operator()(const MajoranaIndexSet& s) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (int i : s) {
            h ^= static_cast<std::size_t>(i);
            h *= 1099511628211ULL;
        }
        return h ^ s.size();
    }
};

}  // namespace jointmeas
