#pragma once

#include <map>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "bloch/potential.hpp"

namespace bloch {

// Sequence of signs +1/-1; "+-+" <-> {+1, -1, +1}.
struct SignWord {
    std::vector<int> signs;

    SignWord() = default;
    explicit SignWord(std::vector<int> s);
    explicit SignWord(const std::string& text);
    std::size_t size() const { return signs.size(); }
    std::string str() const;
};

inline constexpr int kMaxWordLength = 8;

// Ordered simplex integral over a <= z1 <= ... <= zn <= b of
// exp(sum_j sigma_j V(z_j)), by nested cumulative integration.
double bracket(const PeriodicPotential& pot, const SignWord& word, double a, double b, double tol = 1e-12,
               int max_length = kMaxWordLength);

// Same, bypassing the cache.
double bracket_uncached(const PeriodicPotential& pot, const SignWord& word, double a, double b, double tol = 1e-12);

// Integrals with alternating signs starting from `first`:
// I_0 = 1, I_1 = [first], I_2 = [first, -first], ... up to I_nmax.
std::vector<double> alternating_integrals(const PeriodicPotential& pot, int first, double a, double b, int nmax,
                                          double tol = 1e-12);

// Q = [-+-+] + [+-+-] over one cell; x-independence is checked.
double cell_Q(const PeriodicPotential& pot, double tol = 1e-12);

class BracketCache {
public:
    bool find(const std::string& word, double a, double b, std::uint64_t hash, double& out) const;
    void store(const std::string& word, double a, double b, std::uint64_t hash, double value);
    void clear();
    std::size_t size() const;

private:
    using Key = std::tuple<std::string, double, double, std::uint64_t>;
    mutable std::shared_mutex mu_;
    std::map<Key, double> map_;
};

BracketCache& bracket_cache();

}  // namespace bloch
