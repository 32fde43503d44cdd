#pragma once

#include <span>
#include <string>
#include <vector>

#include "envcva/cva_core.hpp"
#include "envcva/exposure.hpp"

namespace envcva {

struct KlBudget {
    enum class Provenance { fixed, calibrated };

    double epsilon = 0.0; // nats
    Provenance provenance = Provenance::fixed;

    // Pinsker: total variation between Q and P is at most sqrt(epsilon / 2).
    double pinsker_tv_bound() const;
};

enum class BoundDirection { upper, lower };

struct RobustBound {
    double bound = 0.0;
    double eta_star = 0.0;   // +inf at epsilon = 0; 0 when the bound is the sample maximum
    double epsilon = 0.0;
    double achieved_kl = 0.0;
    double sample_mean = 0.0;
    BoundDirection direction = BoundDirection::upper;
    std::vector<double> weights; // q_j in draw order
};

// eta eps + eta ln((1/N) sum exp(L_j / eta)), max-shifted.
double dual_objective(double eta, std::span<const double> losses, double epsilon);

// KL(q || uniform) = sum q_j ln(N q_j).
double kl_from_uniform(std::span<const double> weights);

// Exponentially tilted weights q_j = exp(L_j/eta) / sum_l exp(L_l/eta).
std::vector<double> tilted_weights(std::span<const double> losses, double eta);

// sup (or inf) of E_Q[L] over KL(Q || P_N) <= epsilon via the one-dimensional dual.
RobustBound solve_kl_bound(std::span<const double> losses, double epsilon, BoundDirection direction = BoundDirection::upper);
RobustBound solve_kl_bound(const LossSampleSet& losses, double epsilon, BoundDirection direction = BoundDirection::upper);

struct WwrDecomposition {
    double ecva_ind_bp = 0.0;
    double ecva_upper_bp = 0.0;
    double delta_wwr_bp = 0.0;
    double addon_s_bp = 0.0;   // upper_s - ind_s
    double addon_ref_bp = 0.0; // upper_ref - ind_ref
};

// ECVA^upper = upper_s - upper_ref, Delta WWR = ECVA^upper - ECVA^ind (may be negative).
WwrDecomposition delta_wwr(const RobustBound& bound_s, const RobustBound& bound_ref, const CvaResult& ind_s,
                           const CvaResult& ind_ref);

// cva_upper = sup_Q E_Q[L_s] - mean(L_ref), so wwr = sup_Q E_Q[L_s] - mean(L_s) is
// nondecreasing and concave in epsilon.
struct SweepRow {
    double epsilon = 0.0;
    double cva_ind = 0.0;   // scenario-relative, currency
    double cva_upper = 0.0; // scenario-relative, currency
    double wwr = 0.0;       // cva_upper - cva_ind
};

struct EpsSweep {
    std::vector<SweepRow> rows;
    bool wwr_nondecreasing = true;
};

EpsSweep eps_sweep(const LossSampleSet& losses_s, const LossSampleSet& losses_ref, std::span<const double> epsilons);

struct MarginalDistortion {
    std::vector<double> times;   // t_1..t_n
    std::vector<double> pmf_p;   // default-interval masses under P
    std::vector<double> pmf_q;   // under Q*
    double survivor_p = 0.0;
    double survivor_q = 0.0;
    std::vector<double> epe_p;   // per t_1..t_n
    std::vector<double> epe_q;
};

MarginalDistortion marginal_distortion(const LossSampleSet& losses, std::span<const double> weights,
                                       const ExposureCube& cube);

} // namespace envcva
