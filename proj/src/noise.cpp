#include "seelab/noise.hpp"

#include <cmath>
#include <numbers>

namespace seelab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t step_key(std::uint64_t seed, std::uint64_t sample, std::uint64_t step) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (sample + 0x632BE59BD9B4E019ULL));
    return mix64(h ^ (step + 0x8CB92BA72F3D8DD7ULL));
}

// Uniform in (0, 1] from the top 53 bits.
double unit_open_left(std::uint64_t bits) { return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53; }

void box_muller(std::uint64_t key, std::uint64_t pair, double& c, double& s) {
    std::uint64_t a = mix64(key ^ (pair * kGolden + 0xD1B54A32D192ED03ULL));
    std::uint64_t b = mix64(a + kGolden);
    double r = std::sqrt(-2.0 * std::log(unit_open_left(a)));
    double angle = 2.0 * std::numbers::pi * unit_open_left(b);
    c = r * std::cos(angle);
    s = r * std::sin(angle);
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double gaussian_increment(std::uint64_t seed, std::uint64_t sample, std::uint64_t step, std::uint64_t mode) {
    double c, s;
    box_muller(step_key(seed, sample, step), (mode - 1) / 2, c, s);
    return (mode % 2 == 1) ? c : s;
}

void fill_gaussians(std::uint64_t seed, std::uint64_t sample, std::uint64_t step, std::uint64_t first_mode,
                    std::size_t count, double* out) {
    if (count == 0) return;
    const std::uint64_t key = step_key(seed, sample, step);
    std::size_t i = 0;
    double c, s;
    if (first_mode % 2 == 0) {
        box_muller(key, (first_mode - 1) / 2, c, s);
        out[i++] = s;
    }
    for (; i + 1 < count; i += 2) {
        box_muller(key, (first_mode + i - 1) / 2, c, s);
        out[i] = c;
        out[i + 1] = s;
    }
    if (i < count) {
        box_muller(key, (first_mode + i - 1) / 2, c, s);
        out[i] = c;
    }
}

}  // namespace seelab
