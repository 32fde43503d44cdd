#include "envcva/stats.hpp"

#include <algorithm>
#include <cmath>

#include "envcva/error.hpp"

namespace envcva::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw ValidationError("mean of empty sample");
    double sum = 0.0;
    for (const double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (const double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

double median(std::span<const double> x) {
    if (x.empty()) throw ValidationError("median of empty sample");
    std::vector<double> v(x.begin(), x.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double empirical_quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level outside [0,1]");
    const double n = static_cast<double>(sorted.size());
    // The 1e-9 slack keeps q*n on exact integers despite binary rounding of q.
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q * n - 1e-9)));
    return sorted[std::min(rank, sorted.size()) - 1];
}

double empirical_quantile(std::span<const double> x, double q) {
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    return empirical_quantile_sorted(v, q);
}

std::vector<double> isotonic_increasing(std::span<const double> y) {
    struct Block {
        double sum;
        std::size_t count;
        double value() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    blocks.reserve(y.size());
    for (const double v : y) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].value() > blocks.back().value()) {
            const Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.value());
    return out;
}

} // namespace envcva::stats
