#include "envcva/time_grid.hpp"

#include <cmath>

#include "envcva/error.hpp"

namespace envcva {

std::vector<double> make_uniform_grid(double horizon, double dt) {
    if (!(dt > 0.0) || !(horizon > 0.0)) throw ValidationError("grid needs positive horizon and dt");
    const double steps = horizon / dt;
    const long n = std::lround(steps);
    if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps))
        throw ValidationError("horizon must be a multiple of dt");
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
    grid.back() = horizon;
    return grid;
}

double uniform_step(std::span<const double> grid) {
    if (grid.size() < 2) throw ValidationError("grid needs at least two points");
    const double dt = grid[1] - grid[0];
    if (!(dt > 0.0)) throw ValidationError("grid must be increasing");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs((grid[i] - grid[i - 1]) - dt) > 1e-9 * dt) throw ValidationError("grid is not uniform");
    return dt;
}

void require_same_grid(std::span<const double> a, std::span<const double> b, const std::string& context) {
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = std::abs(a[i] - b[i]) <= 1e-12 * std::max(1.0, std::abs(a[i]));
    if (!same) throw ValidationError("grid mismatch: " + context);
}

} // namespace envcva
