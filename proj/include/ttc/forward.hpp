#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttc/model.hpp"

namespace ttc {

/// One sampled trajectory: the record, its weight tr[pi_n], and optionally
/// the normalized state just after each event.
struct TrajectoryOutput {
    CollapseRecord record;
    double weight = 0.0;
    std::uint64_t seed = 0;
    std::optional<std::vector<DensityOperator>> states;
};

/// p_a = w_a tr[L_a^2 rho] for a unit-trace state. Sums to 1 by completeness.
std::vector<double> collapse_distribution(const DensityOperator& rho, const CollapseFamily& family,
                                          const Tolerances& tol = default_tolerances());

/// Unnormalized history operator pi_t for t in [t_0, t_n]: the initial state
/// sandwiched between propagators and collapse operators for every event
/// strictly before t. Each event contributes sqrt(w_a) L_a on both sides, so
/// tr[pi_n] is the discrete (measure-weighted) record probability.
DensityOperator history_operator(const TwoTimeModel& model, const CollapseRecord& record, double t);

/// rho_t = pi_t / tr[pi_t]; throws ZeroWeightError on impossible branches.
DensityOperator state_at(const TwoTimeModel& model, const CollapseRecord& record, double t);

/// Runs the forward collapse dynamics once with a dedicated generator.
/// Deterministic for a fixed seed. The returned weight is recomputed through
/// history_operator and cross-checked against the running product of drawn
/// branch probabilities (1e-9 relative).
TrajectoryOutput sample_trajectory(const TwoTimeModel& model, std::uint64_t seed,
                                   bool keep_states = false);

/// Samples `count` trajectories with independent generators seeded as
/// derive_seed(base_seed, index). Parallelized across trajectories; results
/// are indexed by trajectory, so output is identical for any thread count.
std::vector<TrajectoryOutput> sample_batch(const TwoTimeModel& model, std::uint64_t base_seed,
                                           int count);

/// Batch CSV: "seed,outcomes,weight" rows, outcomes semicolon-joined.
std::string trajectory_csv(const std::vector<TrajectoryOutput>& batch);

namespace detail {
/// Raw-matrix core of history_operator, shared with sampling. Applies
/// events with time strictly below t starting from `initial`.
Matrix history_matrix(const Matrix& initial, const HermitianOperator& h,
                      const CollapseFamily& family, const std::vector<double>& times,
                      const std::vector<int>& outcomes, double t);
}  // namespace detail

}  // namespace ttc
