#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace carleson {

// Stream derivation: every random choice in the project flows from one root
// seed through named substreams, so runs are reproducible flag-for-flag.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = root;
    std::uint64_t h = splitmix64(s);
    s ^= hash_label(label);
    h ^= splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xbf58476d1ce4e5b9ULL;
    h ^= splitmix64(s);
    return h;
}

// mt19937_64 gives a standard-pinned bit sequence; double conversion is done
// by hand because std::uniform_real_distribution is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // unbiased integer in [0, n) via rejection
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

inline Rng substream(std::uint64_t root, std::string_view label,
                     std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(derive_seed(root, label, a, b));
}

// Fisher-Yates
inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

// Walker alias method for weight-proportional index sampling in O(1).
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights) {
        const int n = static_cast<int>(weights.size());
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        double total = 0.0;
        for (double w : weights) total += w;
        std::vector<double> scaled(n);
        std::vector<int> small, large;
        for (int i = 0; i < n; ++i) {
            scaled[i] = weights[i] * n / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            int s = small.back(); small.pop_back();
            int l = large.back(); large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (int i : large) prob_[i] = 1.0;
        for (int i : small) prob_[i] = 1.0;
    }

    int sample(Rng& rng) const {
        const int n = static_cast<int>(prob_.size());
        int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        return rng.next_double() < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<int> alias_;
};

}  // namespace carleson
