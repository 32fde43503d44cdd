#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>

namespace envcva {

// Counter-based generator (Philox4x32-10). Every variate is a pure function of
// (key, stream, index), so parallel schedules cannot change a simulation.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t key() const noexcept { return key_; }

    std::array<std::uint32_t, 4> block(std::uint64_t stream, std::uint64_t index) const noexcept;

    // Two independent uniforms on the open interval (0,1), 53-bit resolution.
    std::pair<double, double> uniform2(std::uint64_t stream, std::uint64_t index) const noexcept;

    // Two independent standard normals (Box-Muller on uniform2).
    std::pair<double, double> normal2(std::uint64_t stream, std::uint64_t index) const noexcept;

private:
    std::uint64_t key_;
};

// Derives a child seed from a master seed and a purpose label.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

} // namespace envcva
