#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "envcva/exposure.hpp"

namespace testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("envcva_unit_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream(path) << text;
    return path;
}

// Small cube with caller-supplied exposures, unit discount unless given.
inline envcva::ExposureCube make_cube(std::vector<double> grid, std::size_t paths, std::vector<double> exposure,
                                      std::vector<double> discount = {}) {
    envcva::ExposureCube cube;
    cube.grid = std::move(grid);
    cube.n_paths = paths;
    cube.positive_exposure = std::move(exposure);
    cube.discount = discount.empty() ? std::vector<double>(cube.grid.size(), 1.0) : std::move(discount);
    return cube;
}

} // namespace testing
