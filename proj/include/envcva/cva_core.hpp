#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "envcva/credit_curves.hpp"
#include "envcva/exposure.hpp"

namespace envcva {

struct CvaResult {
    double cva = 0.0;
    double cva_bp = 0.0;
    double standard_error = 0.0;
    double notional = 1.0;
    std::string scenario_id;
};

CvaResult make_cva_result(double cva, double standard_error, double notional, std::string scenario_id);

// First and second moments of the cube. Building it once makes every
// subsequent closed-form CVA O(n^2) instead of O(paths x n).
struct ExposureProfile {
    std::vector<double> grid;
    std::vector<double> discount;
    std::vector<double> epe;
    std::vector<double> covariance; // (n x n) row-major, population covariance across paths
    std::size_t n_paths = 0;

    static ExposureProfile from_cube(const ExposureCube& cube);
};

// CVA = sum_{i=1..n} (1 - R(t_i)) DF(0,t_i) EPE(t_i) (S(t_{i-1}) - S(t_i)).
CvaResult independence_cva(const ExposureProfile& profile, const SurvivalCurve& survival, const RecoveryPath& recovery,
                           double notional, const std::string& scenario_id);
CvaResult independence_cva(const ExposureCube& cube, const SurvivalCurve& survival, const RecoveryPath& recovery,
                           double notional, const std::string& scenario_id);
CvaResult independence_cva(const ExposureCube& cube, const SurvivalCurve& survival, double recovery, double notional,
                           const std::string& scenario_id);

// Discounted default losses under the independence benchmark, in draw order.
// interval[j] = i in 1..n means default in (t_{i-1}, t_i] valued at t_i; 0 means survival.
struct LossSampleSet {
    std::vector<double> losses;
    std::vector<std::uint32_t> path_index;
    std::vector<std::uint32_t> interval;
    std::string scenario_id;
    std::uint64_t seed = 0;
    double notional = 1.0;

    std::size_t n_draws() const { return losses.size(); }
    double mean() const;
    double standard_error() const;
};

LossSampleSet sample_losses(const ExposureCube& cube, const SurvivalCurve& survival, const RecoveryPath& recovery,
                            std::size_t n_draws, std::uint64_t seed, double notional, const std::string& scenario_id);
LossSampleSet sample_losses(const ExposureCube& cube, const SurvivalCurve& survival, double recovery,
                            std::size_t n_draws, std::uint64_t seed, double notional, const std::string& scenario_id);

// Sample-mean CVA of a loss set.
CvaResult cva_from_samples(const LossSampleSet& losses);

// ECVA in basis points of notional: CVA_s - CVA_ref.
double ecva_relative(const CvaResult& scenario, const CvaResult& reference);

struct DistributionSummary {
    std::size_t n = 0;
    double policy_only = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double var95 = 0.0;
    double es95 = 0.0;
    double var99 = 0.0;
    double es99 = 0.0;
    double prob_negative = 0.0;
};

// VaR_q is the ceil(q n)-th order statistic; ES_q averages values >= VaR_q.
DistributionSummary distribution_summary(std::span<const double> values, double policy_only);

struct CornerDecomposition {
    double cva_00 = 0.0, cva_10 = 0.0, cva_01 = 0.0, cva_11 = 0.0;
    double credit = 0.0, market = 0.0, interaction = 0.0, total = 0.0;
    double interaction_share = 0.0;
};

// Corners CVA_ij = CVA(lambda_i, M_j).
CornerDecomposition corner_decomposition(double cva_00, double cva_10, double cva_01, double cva_11);

} // namespace envcva
