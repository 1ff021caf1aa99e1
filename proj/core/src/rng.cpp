#include "rnl/rng.hpp"

#include <cmath>
#include <numbers>

namespace rnl {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) {
    uint64_t s = seed;
    gen_.seed(splitmix64(s));
}

double Rng::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
    return a + (b - a) * uniform();
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
}

uint64_t Rng::bounded(uint64_t n) {
    return n == 0 ? 0 : gen_() % n;
}

Rng substream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    uint64_t s = seed;
    uint64_t mix = splitmix64(s);
    s = mix ^ (a * 0x9e3779b97f4a7c15ULL);
    mix = splitmix64(s);
    s = mix ^ (b * 0xbf58476d1ce4e5b9ULL);
    mix = splitmix64(s);
    s = mix ^ (c * 0x94d049bb133111ebULL);
    return Rng(splitmix64(s));
}

} // namespace rnl
