#pragma once

#include <memory>
#include <vector>

#include "ttc/linalg.hpp"

namespace ttc {

/// Discretized outcome axis: m distinct outcome values z_a with positive
/// quadrature weights w_a standing in for the integration measure dz.
class OutcomeGrid {
public:
    OutcomeGrid(std::vector<double> points, std::vector<double> weights);

    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

    bool operator==(const OutcomeGrid& o) const {
        return points_ == o.points_ && weights_ == o.weights_;
    }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Hermitian collapse operators L(z_a) on an outcome grid, satisfying the
/// completeness relation sum_a w_a L_a^2 = 1 within tol.complete.
class CollapseFamily {
public:
    CollapseFamily(OutcomeGrid grid, std::vector<HermitianOperator> operators,
                   const Tolerances& tol = default_tolerances());

    int size() const { return grid_.size(); }
    const OutcomeGrid& grid() const { return grid_; }
    const std::vector<HermitianOperator>& operators() const { return operators_; }
    const HermitianOperator& op(int a) const { return operators_[static_cast<std::size_t>(a)]; }
    double weight(int a) const { return grid_.weights()[static_cast<std::size_t>(a)]; }
    const SpacePtr& space() const { return operators_.front().space(); }

private:
    OutcomeGrid grid_;
    std::vector<HermitianOperator> operators_;
};

/// Strictly increasing times t_0 < t_1 < ... < t_n. The first and last slot
/// carry the boundary conditions; interior times are collapse events.
class EventSchedule {
public:
    explicit EventSchedule(std::vector<double> times);

    const std::vector<double>& times() const { return times_; }
    /// n, with n-1 interior events.
    int n() const { return static_cast<int>(times_.size()) - 1; }
    int event_count() const { return n() - 1; }
    double t0() const { return times_.front(); }
    double tn() const { return times_.back(); }
    /// Time of interior event i, 1-based (t_i for i in 1..n-1).
    double event_time(int i) const { return times_[static_cast<std::size_t>(i)]; }

    bool operator==(const EventSchedule& o) const { return times_ == o.times_; }

private:
    std::vector<double> times_;
};

using SchedulePtr = std::shared_ptr<const EventSchedule>;

/// Outcome indices (z_1, ..., z_{n-1}) bound to a schedule. Indices point
/// into the model's outcome grid.
class CollapseRecord {
public:
    CollapseRecord(std::vector<int> outcome_indices, SchedulePtr schedule, int grid_size);

    const std::vector<int>& outcomes() const { return outcomes_; }
    const SchedulePtr& schedule() const { return schedule_; }
    int size() const { return static_cast<int>(outcomes_.size()); }

    bool operator==(const CollapseRecord& o) const {
        return outcomes_ == o.outcomes_ && *schedule_ == *o.schedule_;
    }

private:
    std::vector<int> outcomes_;
    SchedulePtr schedule_;
};

/// Relabeling map: times negated and reversed, outcome list reversed.
/// An involution; the outcome multiset is preserved.
CollapseRecord reverse_record(const CollapseRecord& record, int grid_size);

/// Hamiltonian, collapse family, event schedule and the two boundary
/// conditions, all on one space.
class TwoTimeModel {
public:
    TwoTimeModel(SpacePtr space, HermitianOperator h, CollapseFamily family,
                 SchedulePtr schedule, DensityOperator rho_i, DensityOperator rho_f,
                 const Tolerances& tol = default_tolerances());

    const SpacePtr& space() const { return space_; }
    const HermitianOperator& hamiltonian() const { return h_; }
    const CollapseFamily& family() const { return family_; }
    const SchedulePtr& schedule() const { return schedule_; }
    const DensityOperator& rho_i() const { return rho_i_; }
    const DensityOperator& rho_f() const { return rho_f_; }
    const Tolerances& tol() const { return tol_; }
    int dim() const { return space_->dim(); }

    CollapseRecord make_record(std::vector<int> outcome_indices) const;

private:
    SpacePtr space_;
    HermitianOperator h_;
    CollapseFamily family_;
    SchedulePtr schedule_;
    DensityOperator rho_i_;
    DensityOperator rho_f_;
    Tolerances tol_;
};

/// Family with unit weights and L_a = P_a for mutually orthogonal idempotent
/// projectors summing to the identity. Completeness then holds exactly.
CollapseFamily build_projective_family(const std::vector<HermitianOperator>& projectors,
                                       const Tolerances& tol = default_tolerances());

/// Gaussian position-localization family on a finite lattice: diagonal
/// operators L_a = c exp(-(alpha/2)(x - z_a)^2) with cell-width quadrature
/// weights, renormalized per basis index so completeness holds exactly.
/// x_op must be diagonal in the distinguished basis.
CollapseFamily build_grw_family(const std::vector<double>& lattice, const HermitianOperator& x_op,
                                double alpha, const Tolerances& tol = default_tolerances());

/// max entrywise |sum_a w_a L_a^2 - 1| for an arbitrary candidate family.
double completeness_residual(const OutcomeGrid& grid,
                             const std::vector<HermitianOperator>& operators);
double completeness_residual(const CollapseFamily& family);

struct SymmetryReport {
    double h_asym = 0.0;  // max entrywise |H - H^T|
    double l_asym = 0.0;  // max over a of max entrywise |L_a - L_a^T|
    bool pass = false;
};

/// Checks for a basis-symmetric model: Hermitian + symmetric means real
/// entries, which is what makes U(t)* = U(-t) and L* = L hold.
SymmetryReport check_symmetry_conditions(const HermitianOperator& h, const CollapseFamily& family,
                                         const Tolerances& tol = default_tolerances());

}  // namespace ttc
