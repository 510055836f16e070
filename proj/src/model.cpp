#include "ttc/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ttc {

namespace {

std::string residual_msg(const char* what, double residual, double tol) {
    std::ostringstream os;
    os << what << ": residual " << residual << " exceeds tolerance " << tol;
    return os.str();
}

Matrix completeness_sum(const OutcomeGrid& grid, const std::vector<HermitianOperator>& ops) {
    const auto d = ops.front().matrix().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < ops.size(); ++a) {
        const Matrix& l = ops[a].matrix();
        sum += grid.weights()[a] * (l * l);
    }
    return sum;
}

}  // namespace

OutcomeGrid::OutcomeGrid(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty()) throw ValidationError("OutcomeGrid: need at least one point");
    if (points_.size() != weights_.size()) {
        throw ValidationError("OutcomeGrid: points and weights differ in length");
    }
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ValidationError("OutcomeGrid: weights must be positive and finite");
        }
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) throw ValidationError("OutcomeGrid: non-finite point");
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            if (points_[i] == points_[j]) {
                std::ostringstream os;
                os << "OutcomeGrid: duplicate outcome value " << points_[i];
                throw ValidationError(os.str());
            }
        }
    }
}

CollapseFamily::CollapseFamily(OutcomeGrid grid, std::vector<HermitianOperator> operators,
                               const Tolerances& tol)
    : grid_(std::move(grid)), operators_(std::move(operators)) {
    if (operators_.empty() || static_cast<int>(operators_.size()) != grid_.size()) {
        throw ValidationError("CollapseFamily: operator count does not match grid size");
    }
    for (std::size_t a = 1; a < operators_.size(); ++a) {
        detail::require_same_space(operators_[0].space(), operators_[a].space(), "CollapseFamily");
    }
    const double res = completeness_residual(grid_, operators_);
    if (res > tol.complete) {
        throw ValidationError(residual_msg("CollapseFamily: completeness violated", res, tol.complete));
    }
}

EventSchedule::EventSchedule(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) {
        throw ValidationError("EventSchedule: need at least t_0 and t_n");
    }
    for (double t : times_) {
        if (!std::isfinite(t)) throw ValidationError("EventSchedule: non-finite time");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i - 1] < times_[i])) {
            throw ValidationError("EventSchedule: times must be strictly increasing");
        }
    }
}

CollapseRecord::CollapseRecord(std::vector<int> outcome_indices, SchedulePtr schedule,
                               int grid_size)
    : outcomes_(std::move(outcome_indices)), schedule_(std::move(schedule)) {
    if (!schedule_) throw ValidationError("CollapseRecord: null schedule");
    if (static_cast<int>(outcomes_.size()) != schedule_->event_count()) {
        throw ValidationError("CollapseRecord: outcome count does not match interior event count");
    }
    for (int idx : outcomes_) {
        if (idx < 0 || idx >= grid_size) {
            throw ValidationError("CollapseRecord: outcome index out of range");
        }
    }
}

CollapseRecord reverse_record(const CollapseRecord& record, int grid_size) {
    const auto& times = record.schedule()->times();
    std::vector<double> rev_times(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        rev_times[j] = -times[times.size() - 1 - j];
    }
    std::vector<int> rev_outcomes(record.outcomes().rbegin(), record.outcomes().rend());
    auto rev_schedule = std::make_shared<const EventSchedule>(std::move(rev_times));
    return CollapseRecord(std::move(rev_outcomes), std::move(rev_schedule), grid_size);
}

TwoTimeModel::TwoTimeModel(SpacePtr space, HermitianOperator h, CollapseFamily family,
                           SchedulePtr schedule, DensityOperator rho_i, DensityOperator rho_f,
                           const Tolerances& tol)
    : space_(std::move(space)),
      h_(std::move(h)),
      family_(std::move(family)),
      schedule_(std::move(schedule)),
      rho_i_(std::move(rho_i)),
      rho_f_(std::move(rho_f)),
      tol_(tol) {
    if (!space_) throw ValidationError("TwoTimeModel: null space");
    if (!schedule_) throw ValidationError("TwoTimeModel: null schedule");
    detail::require_same_space(space_, h_.space(), "TwoTimeModel: H");
    detail::require_same_space(space_, family_.space(), "TwoTimeModel: family");
    detail::require_same_space(space_, rho_i_.space(), "TwoTimeModel: rho_I");
    detail::require_same_space(space_, rho_f_.space(), "TwoTimeModel: rho_F");
    if (rho_i_.role() != DensityRole::state) {
        throw ValidationError("TwoTimeModel: rho_I must have role=state");
    }
    if (rho_f_.role() != DensityRole::povm_element) {
        throw ValidationError("TwoTimeModel: rho_F must have role=povm_element");
    }
}

CollapseRecord TwoTimeModel::make_record(std::vector<int> outcome_indices) const {
    return CollapseRecord(std::move(outcome_indices), schedule_, family_.size());
}

CollapseFamily build_projective_family(const std::vector<HermitianOperator>& projectors,
                                       const Tolerances& tol) {
    if (projectors.empty()) throw ValidationError("build_projective_family: empty projector set");
    const auto d = projectors.front().matrix().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < projectors.size(); ++a) {
        const Matrix& p = projectors[a].matrix();
        const double idem = (p * p - p).cwiseAbs().maxCoeff();
        if (idem > 1e-10) {
            throw ValidationError(residual_msg("build_projective_family: not idempotent", idem, 1e-10));
        }
        for (std::size_t b = a + 1; b < projectors.size(); ++b) {
            const double orth = (p * projectors[b].matrix()).cwiseAbs().maxCoeff();
            if (orth > 1e-10) {
                throw ValidationError(
                    residual_msg("build_projective_family: projectors not orthogonal", orth, 1e-10));
            }
        }
        sum += p;
    }
    const double comp = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (comp > 1e-10) {
        throw ValidationError(
            residual_msg("build_projective_family: projectors do not sum to identity", comp, 1e-10));
    }
    std::vector<double> points(projectors.size());
    for (std::size_t a = 0; a < points.size(); ++a) points[a] = static_cast<double>(a);
    std::vector<double> weights(projectors.size(), 1.0);
    return CollapseFamily(OutcomeGrid(std::move(points), std::move(weights)), projectors, tol);
}

CollapseFamily build_grw_family(const std::vector<double>& lattice, const HermitianOperator& x_op,
                                double alpha, const Tolerances& tol) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("build_grw_family: alpha must be positive");
    }
    const int d = x_op.dim();
    const Matrix& x = x_op.matrix();
    double offdiag = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i != j) offdiag = std::max(offdiag, std::abs(x(i, j)));
        }
    }
    if (offdiag > tol.herm) {
        throw ValidationError(
            residual_msg("build_grw_family: x_op not diagonal in the distinguished basis",
                         offdiag, tol.herm));
    }
    const int m = static_cast<int>(lattice.size());
    if (m < 1) throw ValidationError("build_grw_family: empty lattice");
    std::vector<double> z(lattice);
    if (!std::is_sorted(z.begin(), z.end(), std::less_equal<double>())) {
        // allow unsorted input but weights need ordered cells
        std::sort(z.begin(), z.end());
    }

    // Cell-width quadrature weights: interior points get half the span of
    // their neighbours, edge points their single adjacent cell. A single
    // point gets unit weight.
    std::vector<double> w(static_cast<std::size_t>(m), 1.0);
    if (m > 1) {
        w[0] = z[1] - z[0];
        w[static_cast<std::size_t>(m - 1)] = z[static_cast<std::size_t>(m - 1)] - z[static_cast<std::size_t>(m - 2)];
        for (int a = 1; a + 1 < m; ++a) {
            w[static_cast<std::size_t>(a)] =
                (z[static_cast<std::size_t>(a + 1)] - z[static_cast<std::size_t>(a - 1)]) / 2.0;
        }
    }

    // Raw Gaussians g_a(i) = exp(-(alpha/2)(x_i - z_a)^2) and per-index sums
    // S_i = sum_a w_a g_a(i)^2.
    std::vector<Eigen::VectorXd> g(static_cast<std::size_t>(m));
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
    for (int a = 0; a < m; ++a) {
        Eigen::VectorXd ga(d);
        for (int i = 0; i < d; ++i) {
            const double dx = x(i, i).real() - z[static_cast<std::size_t>(a)];
            ga(i) = std::exp(-(alpha / 2.0) * dx * dx);
        }
        s += w[static_cast<std::size_t>(a)] * ga.cwiseProduct(ga);
        g[static_cast<std::size_t>(a)] = std::move(ga);
    }
    const double smin = s.minCoeff();
    const double smax = s.maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e8) {
        std::ostringstream os;
        os << "build_grw_family: lattice cannot be renormalized (diagonal completeness sums"
           << " condition number " << (smin > 0.0 ? smax / smin : std::nan("")) << ")";
        throw ValidationError(os.str());
    }

    // Global scale first (mean diagonal sum -> 1), then exact per-index
    // renormalization so edge-of-lattice Gaussians cannot leak probability.
    const double c = 1.0 / std::sqrt(s.mean());
    Eigen::VectorXd s_scaled = (c * c) * s;
    std::vector<HermitianOperator> ops;
    ops.reserve(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        Matrix l = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            l(i, i) = c * g[static_cast<std::size_t>(a)](i) / std::sqrt(s_scaled(i));
        }
        ops.emplace_back(std::move(l), x_op.space(), tol);
    }
    return CollapseFamily(OutcomeGrid(std::move(z), std::move(w)), std::move(ops), tol);
}

double completeness_residual(const OutcomeGrid& grid,
                             const std::vector<HermitianOperator>& operators) {
    if (operators.empty() || static_cast<int>(operators.size()) != grid.size()) {
        throw ValidationError("completeness_residual: operator count does not match grid size");
    }
    const auto d = operators.front().matrix().rows();
    return (completeness_sum(grid, operators) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

double completeness_residual(const CollapseFamily& family) {
    return completeness_residual(family.grid(), family.operators());
}

SymmetryReport check_symmetry_conditions(const HermitianOperator& h, const CollapseFamily& family,
                                         const Tolerances& tol) {
    SymmetryReport report;
    const Matrix& hm = h.matrix();
    report.h_asym = (hm - hm.transpose()).cwiseAbs().maxCoeff();
    for (const auto& l : family.operators()) {
        const Matrix& lm = l.matrix();
        report.l_asym = std::max(report.l_asym, (lm - lm.transpose()).cwiseAbs().maxCoeff());
    }
    report.pass = report.h_asym <= tol.sym && report.l_asym <= tol.sym;
    return report;
}

}  // namespace ttc
