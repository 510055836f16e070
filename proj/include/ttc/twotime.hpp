#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ttc/forward.hpp"
#include "ttc/model.hpp"

namespace ttc {

enum class Direction { forward, backward };

/// Conditional single-event distribution next to its Born-rule counterpart,
/// with the shielding residual that explains any gap between them.
struct BornAnalysis {
    int event_index = 0;
    Direction direction = Direction::forward;
    std::vector<double> conditional;
    std::vector<double> born;
    double deviation = 0.0;
    double shielding_residual = 0.0;
};

/// Exhaustive record table in odometer order (first event outcome most
/// significant). Records are flat indices into the m^(n-1) outcome tuples.
struct RecordTable {
    int event_count = 0;
    int grid_size = 0;
    std::vector<double> weights;        // tr[rho_F pi_n] per record
    std::vector<double> probabilities;  // weights / denominator
    double denominator = 0.0;

    std::vector<int> decode(std::uint64_t flat) const;
    std::uint64_t encode(const std::vector<int>& outcomes) const;
    std::uint64_t size() const { return weights.size(); }
};

inline constexpr std::uint64_t kEnumerationCap = 1'000'000;

/// Boundary-conditioned record probabilities, backward histories, the
/// time-symmetry check, conditional collapse distributions and Born-rule
/// analysis for one model. Aggregates over future/past outcomes and the
/// exhaustive table are cached; caching is internally synchronized.
///
/// Enumeration work is parallelized over the leading outcome index with
/// partial results combined in a fixed order, so every result is identical
/// for any thread count.
class TwoTimeEngine {
public:
    explicit TwoTimeEngine(TwoTimeModel model);

    const TwoTimeModel& model() const { return model_; }

    /// tr[rho_F pi_n]; includes the record's quadrature weight factors.
    double joint_record_weight(const CollapseRecord& record) const;

    /// Joint weight normalized over all records (exhaustive denominator).
    double record_probability(const CollapseRecord& record) const;

    /// Sum of joint weights over all records; > 0 for compatible boundaries.
    double denominator() const;

    /// Full enumeration; throws CapacityError beyond kEnumerationCap records.
    const RecordTable& table() const;

    /// Backward history pi-bar at backward-time coordinate t_bar in
    /// [-t_n, -t_0]: starts from conj(rho_F), applies the record's outcomes
    /// in reversed order at the relabeled times, same operator grammar as
    /// the forward history.
    DensityOperator backward_history(const CollapseRecord& record, double t_bar) const;

    /// |tr[rho_F pi_n] - tr[conj(rho_I) pibar_n]|. Zero up to roundoff when
    /// the symmetry conditions hold.
    double time_symmetry_residual(const CollapseRecord& record) const;

    /// P(z_j | boundaries, past outcomes z_1..z_{j-1}) with j = prefix
    /// length + 1. Evaluated by the bidirectional contraction against the
    /// aggregated backward state, cross-checked against direct suffix
    /// enumeration; the two routes must agree to 1e-10.
    std::vector<double> conditional_next_collapse(const std::vector<int>& prefix) const;

    /// Mirror image: P(zbar_j | boundaries, backward prefix zbar_1..zbar_{j-1}),
    /// prefix given in backward labels (zbar_i = z_{n-i}).
    std::vector<double> backward_conditional_next_collapse(const std::vector<int>& prefix) const;

    /// Deviation of the aggregated opposite-direction history from a
    /// multiple of the identity at event j: max entrywise |M/(tr M/d) - 1|.
    double shielding_residual(int j, Direction direction) const;

    /// The aggregate M itself: the sum of opposite-direction histories at
    /// event j over the m^(n-1-j) outcome tuples on the far side. Because
    /// every collapse event preserves the trace (completeness), tr M equals
    /// tr[rho_F] (forward) or tr[rho_I] = 1 (backward) exactly.
    Matrix aggregated_history(int j, Direction direction) const;

    /// Conditional vs Born-rule distribution at event j given the past
    /// prefix (forward labels for forward direction, backward labels for
    /// backward; empty prefix means j = 1).
    BornAnalysis born_analysis(int j, Direction direction,
                               const std::vector<int>& prefix = {}) const;

    /// Probability-table CSV: "record,weight,probability" per record.
    std::string probability_table_csv() const;

private:
    // pi at forward time t_j, events 1..j-1 applied (unnormalized)
    Matrix forward_prefix_matrix(const std::vector<int>& prefix) const;
    // pibar at backward time tbar_j, backward events 1..j-1 applied
    Matrix backward_prefix_matrix(const std::vector<int>& prefix) const;
    // aggregate of backward histories at tbar_{n-j} over all future tuples
    const Matrix& aggregated_backward(int j) const;
    // aggregate of forward histories at t_{n-j} over all past tuples
    const Matrix& aggregated_forward(int j) const;
    double real_probability_trace(const Complex& value, const char* what) const;
    void require_event_index(int j) const;

    TwoTimeModel model_;
    std::vector<double> reversed_times_;
    std::vector<Matrix> gap_unitaries_;  // U(t_{i+1} - t_i), shared by both directions
    Matrix rho_f_conj_;
    Matrix rho_i_conj_;

    mutable std::mutex cache_mutex_;
    mutable std::optional<RecordTable> table_;
    mutable std::map<int, Matrix> backward_aggregates_;
    mutable std::map<int, Matrix> forward_aggregates_;
};

/// The model seen in the opposite time direction: schedule negated and
/// reversed, boundaries swapped and conjugated. conj(rho_F) is rescaled to
/// unit trace so it can serve as the initial state; record probabilities
/// are unaffected by that scale.
TwoTimeModel reversed_model(const TwoTimeModel& model);

/// Smallest-index record helpers for CLI/tests: all m^k outcome tuples
/// would exceed the cap -> CapacityError.
std::uint64_t checked_record_space(int grid_size, int events, std::uint64_t cap = kEnumerationCap);

std::string direction_name(Direction d);

}  // namespace ttc
