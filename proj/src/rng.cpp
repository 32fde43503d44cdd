#include "envcva/rng.hpp"

#include <cmath>
#include <numbers>

namespace envcva {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t stream, std::uint64_t index) const noexcept {
    std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                     static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(key_);
    std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

std::pair<double, double> CounterRng::uniform2(std::uint64_t stream, std::uint64_t index) const noexcept {
    const auto b = block(stream, index);
    return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
}

std::pair<double, double> CounterRng::normal2(std::uint64_t stream, std::uint64_t index) const noexcept {
    const auto [u1, u2] = uniform2(stream, index);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull; // FNV-1a
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return splitmix64(master ^ splitmix64(h));
}

} // namespace envcva
