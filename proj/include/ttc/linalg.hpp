#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ttc/errors.hpp"

namespace ttc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Finite Hilbert space with a distinguished (storage) basis. All operators
/// in a model refer to one shared instance.
class HilbertSpace {
public:
    HilbertSpace(int dim, std::vector<std::string> basis_labels);

    int dim() const { return dim_; }
    const std::vector<std::string>& basis_labels() const { return labels_; }

    bool operator==(const HilbertSpace& other) const {
        return dim_ == other.dim_ && labels_ == other.labels_;
    }

    /// Space with default labels "0", "1", ...
    static std::shared_ptr<const HilbertSpace> make(int dim);
    static std::shared_ptr<const HilbertSpace> make(int dim, std::vector<std::string> labels);

private:
    int dim_;
    std::vector<std::string> labels_;
};

using SpacePtr = std::shared_ptr<const HilbertSpace>;

namespace detail {
/// max_ij |A_ij - conj(A_ji)|
double hermiticity_residual(const Matrix& m);
/// max entrywise |A - B|
double max_abs_diff(const Matrix& a, const Matrix& b);
void require_finite(const Matrix& m, const char* what);
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what);
}  // namespace detail

/// Dense Hermitian matrix bound to a space. Entries are stored exactly as
/// given; Hermiticity is checked at construction, not enforced by symmetrizing.
class HermitianOperator {
public:
    HermitianOperator(Matrix entries, SpacePtr space,
                      const Tolerances& tol = default_tolerances());

    const Matrix& matrix() const { return entries_; }
    const SpacePtr& space() const { return space_; }
    int dim() const { return space_->dim(); }

private:
    Matrix entries_;
    SpacePtr space_;
};

class UnitaryOperator {
public:
    UnitaryOperator(Matrix entries, SpacePtr space,
                    const Tolerances& tol = default_tolerances());

    const Matrix& matrix() const { return entries_; }
    const SpacePtr& space() const { return space_; }
    int dim() const { return space_->dim(); }

private:
    Matrix entries_;
    SpacePtr space_;
};

/// State vector; zero vectors are rejected, normalization is the caller's
/// business.
class PureState {
public:
    PureState(Vector amplitudes, SpacePtr space,
              const Tolerances& tol = default_tolerances());

    const Vector& amplitudes() const { return amps_; }
    const SpacePtr& space() const { return space_; }

    /// |psi><psi| / <psi|psi> as a role=state density operator.
    class DensityOperator projector() const;

private:
    Vector amps_;
    SpacePtr space_;
};

enum class DensityRole { state, povm_element, unnormalized_history };

/// Hermitian PSD operator whose admissible spectrum depends on its role:
///   state                 - PSD, trace 1
///   povm_element          - eigenvalues in [0, 1]
///   unnormalized_history  - PSD, any nonnegative trace
class DensityOperator {
public:
    DensityOperator(HermitianOperator op, DensityRole role,
                    const Tolerances& tol = default_tolerances());

    const HermitianOperator& op() const { return op_; }
    const Matrix& matrix() const { return op_.matrix(); }
    const SpacePtr& space() const { return op_.space(); }
    int dim() const { return op_.dim(); }
    DensityRole role() const { return role_; }

private:
    HermitianOperator op_;
    DensityRole role_;
};

/// e^{-iH dt} via Hermitian eigendecomposition. dt may be negative.
UnitaryOperator propagator(const HermitianOperator& h, double dt,
                           const Tolerances& tol = default_tolerances());

/// Entrywise complex conjugation in the distinguished basis
/// (an involution; distributes over products).
Matrix conjugate_in_basis(const Matrix& a);
HermitianOperator conjugate_in_basis(const HermitianOperator& a);

/// tr[A B]. Callers that need a probability must themselves reject
/// imaginary parts above tol.imag.
Complex trace_product(const Matrix& a, const Matrix& b);
Complex trace_product(const HermitianOperator& a, const HermitianOperator& b);

/// Splits an unnormalized history into (state, weight = tr[pi]). Throws
/// ZeroWeightError when the weight is at or below tol.zero: the branch is
/// impossible and has no associated state.
std::pair<DensityOperator, double> normalize_history(
    const DensityOperator& pi, const Tolerances& tol = default_tolerances());

/// min eigenvalue of a Hermitian matrix (used in PSD checks and reports).
double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

}  // namespace ttc
