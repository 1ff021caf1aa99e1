#pragma once

#include <cstdint>
#include <random>

namespace rnl {

// All randomness in the library flows from a single 64-bit seed through this
// wrapper. The engine (mt19937_64) has standard-specified output and the
// distributions below are hand-rolled, so every draw is reproducible across
// standard libraries. Substreams are derived by mixing (seed, path) with
// splitmix64, so adding one experiment never perturbs the draws of another.
uint64_t splitmix64(uint64_t& state);

class Rng {
  public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64() { return gen_(); }

    // [0, 1), 53-bit resolution
    double uniform();
    double uniform(double a, double b);

    // standard normal via Box-Muller (second value cached)
    double normal();

    // [0, n), modulo reduction; fine at desk scale
    uint64_t bounded(uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i + 1));
            std::swap(v[i], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derived generator for stream (a, b, c) under the given root seed.
Rng substream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

} // namespace rnl
