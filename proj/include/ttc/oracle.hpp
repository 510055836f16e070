#pragma once

#include <cstdint>
#include <vector>

#include "ttc/forward.hpp"
#include "ttc/model.hpp"

namespace ttc::oracle {

/// Reference results computed the slow, obvious way: every record's history
/// chain is rebuilt from scratch (fresh propagators, no prefix sharing, no
/// caching) on a single thread. This is the yardstick the optimized engine
/// is tested against, so it deliberately shares no incremental machinery
/// with it.
struct ExactDistribution {
    int event_count = 0;
    int grid_size = 0;
    std::vector<double> weights;        // tr[rho_F pi_n] in odometer order
    std::vector<double> probabilities;  // weights / denominator
    double denominator = 0.0;

    std::vector<int> decode(std::uint64_t flat) const;
    std::uint64_t encode(const std::vector<int>& outcomes) const;
    std::uint64_t size() const { return weights.size(); }
};

/// tr[rho_F pi_n] for one record, rebuilt from scratch.
double record_weight(const TwoTimeModel& model, const std::vector<int>& outcomes);

/// tr[conj(rho_I) pibar_n] for the same record seen backward, rebuilt from
/// scratch with the reversed times and outcome order.
double backward_record_weight(const TwoTimeModel& model, const std::vector<int>& outcomes);

/// Exhaustive enumeration of all grid_size^events records. Throws
/// CapacityError above `cap` records.
ExactDistribution enumerate_records(const TwoTimeModel& model,
                                    std::uint64_t cap = 1'000'000);

/// Agreement between sampled trajectories and an exact distribution.
struct FitReport {
    double tv_distance = 0.0;  // 0.5 sum_r |empirical_r - exact_r|
    double chi2 = 0.0;         // Pearson statistic over pooled bins
    int dof = 0;               // pooled bins - 1
    std::uint64_t samples = 0;
};

/// Bins with expected count below 5 are pooled with their neighbours before
/// the chi-square statistic is formed.
FitReport compare_empirical(const ExactDistribution& exact,
                            const std::vector<TrajectoryOutput>& batch);

/// Monte Carlo estimate of the record-sum denominator for models beyond the
/// enumeration cap: forward trajectories are drawn with probability tr[pi_n],
/// and tr[rho_F pi_n] / tr[pi_n] averages to the denominator. Sequential by
/// design (reference path).
struct McEstimate {
    double value = 0.0;
    double stderror = 0.0;
    std::uint64_t samples = 0;
};

McEstimate estimate_denominator(const TwoTimeModel& model, std::uint64_t seed, int samples);

}  // namespace ttc::oracle
