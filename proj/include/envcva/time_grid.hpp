#pragma once

#include <span>
#include <string>
#include <vector>

namespace envcva {

// Uniform grid {0, dt, ..., horizon}; horizon must be a multiple of dt.
std::vector<double> make_uniform_grid(double horizon, double dt);

// Step size of a uniform grid; throws ValidationError otherwise.
double uniform_step(std::span<const double> grid);

void require_same_grid(std::span<const double> a, std::span<const double> b, const std::string& context);

} // namespace envcva
