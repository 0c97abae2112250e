#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ecosub {

inline constexpr const char* kRngName = "mt19937_64/splitmix64-stream/box-muller";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Standard normals from mt19937_64. Box-Muller is written out because
// std::normal_distribution differs between standard libraries.
class NormalStream {
public:
    // Stream k of a seed is seeded with splitmix64(seed ^ splitmix64(k)).
    NormalStream(std::uint64_t seed, std::uint64_t stream = 0)
        : eng_(splitmix64(seed ^ splitmix64(stream))) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform_open();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    // Uniform on (0,1], 53 random bits.
    double uniform_open() { return ((eng_() >> 11) + 1) * 0x1.0p-53; }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ecosub
