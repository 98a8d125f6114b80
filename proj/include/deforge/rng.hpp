#pragma once

#include <cstdint>
#include <vector>

#include "deforge/scalar.hpp"

namespace deforge {

// Deterministic splitmix64 generator.  Standard-library distributions are
// deliberately avoided: identical seeds must give identical streams on every
// platform and standard library.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform-enough integer in [0, n); n = 0 yields 0.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    long int_in(long lo, long hi) {
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1) != 0; }

    // Small exact rational with numerator in [-max_num, max_num] and
    // denominator in [1, max_den].
    mpq_class rat(long max_num = 3, long max_den = 2) {
        mpq_class q(int_in(-max_num, max_num), int_in(1, max_den));
        q.canonicalize();
        return q;
    }

    GQ gq(long max_num = 3, long max_den = 2) { return GQ(rat(max_num, max_den), rat(max_num, max_den)); }

    GQ gq_nonzero(long max_num = 3, long max_den = 2) {
        for (;;) {
            GQ g = gq(max_num, max_den);
            if (!g.is_zero()) return g;
        }
    }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[below(xs.size())];
    }
};

}  // namespace deforge
