#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "ttc/linalg.hpp"

using namespace ttc;

namespace {

const Complex kI(0.0, 1.0);

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0, -kI, kI, 0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

}  // namespace

TEST_CASE("spaces carry dim and distinct labels") {
    SpacePtr s = HilbertSpace::make(3);
    CHECK(s->dim() == 3);
    CHECK(s->basis_labels() == std::vector<std::string>{"0", "1", "2"});

    CHECK_THROWS_AS(HilbertSpace(0, {}), ValidationError);
    CHECK_THROWS_AS(HilbertSpace(2, {"a"}), ValidationError);
    CHECK_THROWS_AS(HilbertSpace(2, {"a", "a"}), ValidationError);

    SpacePtr t = HilbertSpace::make(3);
    CHECK(*s == *t);
    CHECK_FALSE(*s == *HilbertSpace::make(2));
}

TEST_CASE("hermitian operators validate entries against the space") {
    SpacePtr s = HilbertSpace::make(2);
    CHECK_NOTHROW(HermitianOperator(sigma_x(), s));
    CHECK_NOTHROW(HermitianOperator(sigma_y(), s));

    Matrix not_herm(2, 2);
    not_herm << 0, 1, 0, 0;
    CHECK_THROWS_WITH_AS(HermitianOperator(not_herm, s),
                         doctest::Contains("not Hermitian"), ValidationError);

    Matrix wrong(3, 3);
    wrong.setIdentity();
    CHECK_THROWS_AS(HermitianOperator(wrong, s), ValidationError);

    Matrix nan_entries = sigma_x();
    nan_entries(0, 1) = std::nan("");
    CHECK_THROWS_AS(HermitianOperator(nan_entries, s), ValidationError);

    // residual just above the 1e-12 tolerance throws, just below passes
    Matrix above = sigma_x();
    above(0, 1) += Complex(0.0, 1e-11);
    CHECK_THROWS_AS(HermitianOperator(above, s), ValidationError);
    Matrix below = sigma_x();
    below(0, 1) += Complex(0.0, 4e-13);
    CHECK_NOTHROW(HermitianOperator(below, s));
}

TEST_CASE("unitary operators reject non-unitary entries with the residual") {
    SpacePtr s = HilbertSpace::make(2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Matrix hadamard(2, 2);
    hadamard << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
    CHECK_NOTHROW(UnitaryOperator(hadamard, s));

    Matrix shear(2, 2);
    shear << 1, 1, 0, 1;
    CHECK_THROWS_WITH_AS(UnitaryOperator(shear, s), doctest::Contains("not unitary"),
                         ValidationError);
}

TEST_CASE("pure states reject zero vectors and project to unit-trace states") {
    SpacePtr s = HilbertSpace::make(2);
    Vector zero = Vector::Zero(2);
    CHECK_THROWS_AS(PureState(zero, s), ValidationError);

    Vector plus(2);
    plus << 1, 1;  // unnormalized on purpose
    DensityOperator rho = PureState(plus, s).projector();
    CHECK(rho.role() == DensityRole::state);
    CHECK(rho.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density roles admit different spectra") {
    SpacePtr s = HilbertSpace::make(2);

    SUBCASE("state: PSD and unit trace") {
        Matrix good(2, 2);
        good << 0.7, 0.1, 0.1, 0.3;
        CHECK_NOTHROW(DensityOperator(HermitianOperator(good, s), DensityRole::state));

        Matrix low_trace = 0.9 * good;
        CHECK_THROWS_WITH_AS(
            DensityOperator(HermitianOperator(low_trace, s), DensityRole::state),
            doctest::Contains("trace"), ValidationError);

        Matrix indefinite(2, 2);
        indefinite << 1.5, 0, 0, -0.5;
        CHECK_THROWS_WITH_AS(
            DensityOperator(HermitianOperator(indefinite, s), DensityRole::state),
            doctest::Contains("not PSD"), ValidationError);
    }

    SUBCASE("povm element: eigenvalues within [0, 1]") {
        CHECK_NOTHROW(DensityOperator(HermitianOperator(Matrix::Identity(2, 2), s),
                                      DensityRole::povm_element));
        Matrix too_big = 1.2 * Matrix::Identity(2, 2);
        CHECK_THROWS_AS(
            DensityOperator(HermitianOperator(too_big, s), DensityRole::povm_element),
            ValidationError);
    }

    SUBCASE("history: any PSD operator, any nonnegative trace") {
        Matrix big = 37.0 * Matrix::Identity(2, 2);
        CHECK_NOTHROW(DensityOperator(HermitianOperator(big, s),
                                      DensityRole::unnormalized_history));
        Matrix negative(2, 2);
        negative << 1.0, 0, 0, -1e-6;
        CHECK_THROWS_AS(DensityOperator(HermitianOperator(negative, s),
                                        DensityRole::unnormalized_history),
                        ValidationError);
    }
}

TEST_CASE("propagator is the matrix exponential of -iH dt") {
    SpacePtr s = HilbertSpace::make(2);
    HermitianOperator h(sigma_x(), s);

    SUBCASE("known closed form for sigma_x") {
        const double t = 0.5;
        Matrix u = propagator(h, t).matrix();
        CHECK(std::abs(u(0, 0) - Complex(std::cos(t), 0)) < 1e-12);
        CHECK(std::abs(u(0, 1) - Complex(0, -std::sin(t))) < 1e-12);
        CHECK(std::abs(u(1, 0) - Complex(0, -std::sin(t))) < 1e-12);
        CHECK(std::abs(u(1, 1) - Complex(std::cos(t), 0)) < 1e-12);
    }

    SUBCASE("zero time is the identity") {
        Matrix u = propagator(h, 0.0).matrix();
        CHECK(detail::max_abs_diff(u, Matrix::Identity(2, 2)) < 1e-14);
    }

    SUBCASE("negative time inverts") {
        Matrix u = propagator(h, 0.7).matrix();
        Matrix v = propagator(h, -0.7).matrix();
        CHECK(detail::max_abs_diff(u * v, Matrix::Identity(2, 2)) < 1e-12);
    }

    SUBCASE("group property") {
        Matrix u = propagator(h, 0.3).matrix() * propagator(h, 0.4).matrix();
        CHECK(detail::max_abs_diff(u, propagator(h, 0.7).matrix()) < 1e-12);
    }

    CHECK_THROWS_AS(propagator(h, std::nan("")), ValidationError);
}

TEST_CASE("basis conjugation is an involution distributing over products") {
    Matrix a = sigma_y();
    Matrix b(2, 2);
    b << Complex(0.3, 0.1), Complex(-0.2, 0.7), Complex(1.0, 0.0), Complex(0.0, -0.4);

    CHECK(detail::max_abs_diff(conjugate_in_basis(conjugate_in_basis(a)), a) == 0.0);
    CHECK(detail::max_abs_diff(conjugate_in_basis(a * b),
                               conjugate_in_basis(a) * conjugate_in_basis(b)) < 1e-15);

    SpacePtr s = HilbertSpace::make(2);
    HermitianOperator hy(sigma_y(), s);
    // conjugating sigma_y flips its sign
    CHECK(detail::max_abs_diff(conjugate_in_basis(hy).matrix(), -sigma_y()) == 0.0);
}

TEST_CASE("trace product matches direct evaluation") {
    CHECK(trace_product(sigma_x(), sigma_x()).real() == doctest::Approx(2.0));
    CHECK(std::abs(trace_product(sigma_x(), sigma_z())) < 1e-15);

    Matrix rho(2, 2);
    rho << 0.7, 0, 0, 0.3;
    CHECK(trace_product(rho, sigma_z()).real() == doctest::Approx(0.4));

    Matrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(trace_product(rect, rect), ValidationError);
}

TEST_CASE("normalize_history splits weight from state") {
    SpacePtr s = HilbertSpace::make(2);
    Matrix pi(2, 2);
    pi << 0.3, 0.1, 0.1, 0.1;
    auto [rho, weight] = normalize_history(
        DensityOperator(HermitianOperator(pi, s), DensityRole::unnormalized_history));
    CHECK(weight == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rho.role() == DensityRole::state);

    CHECK_THROWS_AS(
        normalize_history(DensityOperator(HermitianOperator(Matrix::Zero(2, 2), s),
                                          DensityRole::unnormalized_history)),
        ZeroWeightError);

    // wrong role is a usage error, not a zero weight
    Matrix state(2, 2);
    state << 0.5, 0, 0, 0.5;
    CHECK_THROWS_AS(
        normalize_history(DensityOperator(HermitianOperator(state, s), DensityRole::state)),
        ValidationError);
}

TEST_CASE("eigenvalue extrema") {
    Matrix d(2, 2);
    d << 0.3, 0, 0, 0.7;
    CHECK(min_eigenvalue(d) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(max_eigenvalue(d) == doctest::Approx(0.7).epsilon(1e-14));
}
