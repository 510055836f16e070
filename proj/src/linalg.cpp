#include "ttc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace ttc {

namespace detail {

double hermiticity_residual(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw ValidationError(std::string(what) + ": non-finite entries");
    }
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
    if (a == b) return;
    if (a && b && *a == *b) return;
    throw ValidationError(std::string(what) + ": operands live on different spaces");
}

}  // namespace detail

namespace {

std::string residual_msg(const char* what, double residual, double tol) {
    std::ostringstream os;
    os << what << ": residual " << residual << " exceeds tolerance " << tol;
    return os.str();
}

Eigen::SelfAdjointEigenSolver<Matrix> solve_hermitian(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) {
        throw NumericalError("hermitian eigendecomposition failed to converge");
    }
    return es;
}

}  // namespace

HilbertSpace::HilbertSpace(int dim, std::vector<std::string> basis_labels)
    : dim_(dim), labels_(std::move(basis_labels)) {
    if (dim_ < 1) throw ValidationError("HilbertSpace: dim must be >= 1");
    if (static_cast<int>(labels_.size()) != dim_) {
        throw ValidationError("HilbertSpace: expected exactly dim basis labels");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        for (std::size_t j = i + 1; j < labels_.size(); ++j) {
            if (labels_[i] == labels_[j]) {
                throw ValidationError("HilbertSpace: duplicate basis label '" + labels_[i] + "'");
            }
        }
    }
}

std::shared_ptr<const HilbertSpace> HilbertSpace::make(int dim) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) labels.push_back(std::to_string(i));
    return std::make_shared<const HilbertSpace>(dim, std::move(labels));
}

std::shared_ptr<const HilbertSpace> HilbertSpace::make(int dim, std::vector<std::string> labels) {
    return std::make_shared<const HilbertSpace>(dim, std::move(labels));
}

HermitianOperator::HermitianOperator(Matrix entries, SpacePtr space, const Tolerances& tol)
    : entries_(std::move(entries)), space_(std::move(space)) {
    if (!space_) throw ValidationError("HermitianOperator: null space");
    const int d = space_->dim();
    if (entries_.rows() != d || entries_.cols() != d) {
        throw ValidationError("HermitianOperator: entries are not dim x dim");
    }
    detail::require_finite(entries_, "HermitianOperator");
    const double res = detail::hermiticity_residual(entries_);
    if (res > tol.herm) {
        throw ValidationError(residual_msg("HermitianOperator: not Hermitian", res, tol.herm));
    }
}

UnitaryOperator::UnitaryOperator(Matrix entries, SpacePtr space, const Tolerances& tol)
    : entries_(std::move(entries)), space_(std::move(space)) {
    if (!space_) throw ValidationError("UnitaryOperator: null space");
    const int d = space_->dim();
    if (entries_.rows() != d || entries_.cols() != d) {
        throw ValidationError("UnitaryOperator: entries are not dim x dim");
    }
    detail::require_finite(entries_, "UnitaryOperator");
    const double res =
        (entries_ * entries_.adjoint() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (res > tol.unitary) {
        throw ValidationError(residual_msg("UnitaryOperator: not unitary", res, tol.unitary));
    }
}

PureState::PureState(Vector amplitudes, SpacePtr space, const Tolerances& tol)
    : amps_(std::move(amplitudes)), space_(std::move(space)) {
    if (!space_) throw ValidationError("PureState: null space");
    if (amps_.size() != space_->dim()) {
        throw ValidationError("PureState: amplitude count does not match dim");
    }
    if (!amps_.allFinite()) throw ValidationError("PureState: non-finite amplitudes");
    if (amps_.norm() <= tol.zero) {
        throw ValidationError("PureState: zero vector rejected");
    }
}

DensityOperator PureState::projector() const {
    Matrix p = amps_ * amps_.adjoint();
    p /= p.trace().real();
    return DensityOperator(HermitianOperator(std::move(p), space_), DensityRole::state);
}

DensityOperator::DensityOperator(HermitianOperator op, DensityRole role, const Tolerances& tol)
    : op_(std::move(op)), role_(role) {
    const auto es = solve_hermitian(op_.matrix());
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    switch (role_) {
        case DensityRole::state: {
            if (lo < -tol.psd) {
                throw ValidationError(residual_msg("DensityOperator[state]: not PSD", -lo, tol.psd));
            }
            const double tr = op_.matrix().trace().real();
            if (std::abs(tr - 1.0) > 1e-10) {
                throw ValidationError(
                    residual_msg("DensityOperator[state]: trace != 1", std::abs(tr - 1.0), 1e-10));
            }
            break;
        }
        case DensityRole::povm_element: {
            if (lo < -tol.psd || hi > 1.0 + tol.psd) {
                std::ostringstream os;
                os << "DensityOperator[povm_element]: eigenvalues [" << lo << ", " << hi
                   << "] outside [0, 1] beyond tolerance " << tol.psd;
                throw ValidationError(os.str());
            }
            break;
        }
        case DensityRole::unnormalized_history: {
            if (lo < -tol.psd) {
                throw ValidationError(
                    residual_msg("DensityOperator[unnormalized_history]: not PSD", -lo, tol.psd));
            }
            if (op_.matrix().trace().real() < -tol.psd) {
                throw ValidationError("DensityOperator[unnormalized_history]: negative trace");
            }
            break;
        }
    }
}

UnitaryOperator propagator(const HermitianOperator& h, double dt, const Tolerances& tol) {
    if (!std::isfinite(dt)) throw ValidationError("propagator: dt must be finite");
    const auto es = solve_hermitian(h.matrix());
    const Vector phases =
        (Complex(0.0, -dt) * es.eigenvalues().cast<Complex>().array()).exp().matrix();
    Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return UnitaryOperator(std::move(u), h.space(), tol);
}

Matrix conjugate_in_basis(const Matrix& a) {
    return a.conjugate();
}

HermitianOperator conjugate_in_basis(const HermitianOperator& a) {
    return HermitianOperator(a.matrix().conjugate(), a.space());
}

Complex trace_product(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw ValidationError("trace_product: shape mismatch");
    }
    // tr[AB] without forming the product
    return (a.transpose().cwiseProduct(b)).sum();
}

Complex trace_product(const HermitianOperator& a, const HermitianOperator& b) {
    detail::require_same_space(a.space(), b.space(), "trace_product");
    return trace_product(a.matrix(), b.matrix());
}

std::pair<DensityOperator, double> normalize_history(const DensityOperator& pi,
                                                     const Tolerances& tol) {
    if (pi.role() != DensityRole::unnormalized_history) {
        throw ValidationError("normalize_history: input must have role unnormalized_history");
    }
    const double weight = pi.matrix().trace().real();
    if (weight <= tol.zero) {
        std::ostringstream os;
        os << "normalize_history: zero-weight history (tr = " << weight << ")";
        throw ZeroWeightError(os.str());
    }
    Matrix rho = pi.matrix() / weight;
    return {DensityOperator(HermitianOperator(std::move(rho), pi.space(), tol),
                            DensityRole::state, tol),
            weight};
}

double min_eigenvalue(const Matrix& m) {
    return solve_hermitian(m).eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& m) {
    return solve_hermitian(m).eigenvalues().maxCoeff();
}

}  // namespace ttc
