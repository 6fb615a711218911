#pragma once

// Free-evolution pullback v(t) = exp(-i t |k|^2-multiplier) uhat(t), the
// (x - 2it grad) operator, Cauchy-gap tracking in L^2 and the weighted norm,
// and extraction of the scattering-state estimate.

#include <vector>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"

namespace qsl {

// Inverse of the free flow used by the solver (multiplier exp(-i t |k|^2)).
Field free_pullback(const Field& u, double t);

// Componentwise x_j u - 2 i t (d_j u).
std::vector<Field> h_operator(const Field& u, double t);

struct PullbackSeries {
    std::vector<double> times;
    std::vector<Field> v;                       // pullbacks at the checkpoints
    std::vector<std::vector<double>> gap_l2;    // pairwise |v_i - v_j|_2
    std::vector<std::vector<double>> gap_sigma; // L2 + Hdot1 + x-weighted gaps
    Field u_plus;                               // pullback at the last checkpoint
    double last_gap_l2 = 0.0;                   // gap between the last two checkpoints
};

// Pairwise gaps between pullbacks of the stored checkpoints.
PullbackSeries cauchy_gaps(const Trajectory& traj);

struct MbBoundSeries {
    std::vector<double> t;
    std::vector<double> hu_sq;        // |(x - 2it grad) u|^2
    std::vector<double> hu_sq_over_tl;
    double sup_hu_sq = 0.0;
    double sup_ratio = 0.0;
    bool bounded_trend = true;  // last value within 2x of the series median
};

// Time series of the weighted-operator norm and its t^l-normalized ratio.
MbBoundSeries mb_bound_check(const Trajectory& traj, double l);

}  // namespace qsl
