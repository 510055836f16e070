#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "ttc/model.hpp"

using namespace ttc;

namespace {

SpacePtr qubit() { return HilbertSpace::make(2); }

std::vector<HermitianOperator> z_projectors(const SpacePtr& s) {
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    Matrix p1 = Matrix::Zero(2, 2);
    p1(1, 1) = 1.0;
    return {HermitianOperator(p0, s), HermitianOperator(p1, s)};
}

HermitianOperator diag_x_op(const SpacePtr& s, std::vector<double> xs) {
    Matrix x = Matrix::Zero(static_cast<int>(xs.size()), static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) x(static_cast<int>(i), static_cast<int>(i)) = xs[i];
    return HermitianOperator(x, s);
}

}  // namespace

TEST_CASE("outcome grids reject duplicates and nonpositive weights") {
    CHECK_NOTHROW(OutcomeGrid({-1.0, 0.0, 1.0}, {0.5, 1.0, 0.5}));
    CHECK_THROWS_AS(OutcomeGrid({0.0, 0.0}, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(OutcomeGrid({0.0, 1.0}, {1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(OutcomeGrid({0.0, 1.0}, {1.0, -0.5}), ValidationError);
    CHECK_THROWS_AS(OutcomeGrid({}, {}), ValidationError);
    CHECK_THROWS_AS(OutcomeGrid({0.0}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("collapse families enforce the completeness relation") {
    SpacePtr s = qubit();
    auto projs = z_projectors(s);

    CHECK_NOTHROW(CollapseFamily(OutcomeGrid({0.0, 1.0}, {1.0, 1.0}), projs));

    // corrupted weights break sum_a w_a L_a^2 = 1 and must be detected
    OutcomeGrid corrupted({0.0, 1.0}, {0.9, 1.1});
    CHECK(completeness_residual(corrupted, projs) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(CollapseFamily(corrupted, projs),
                         doctest::Contains("completeness"), ValidationError);

    CHECK_THROWS_AS(CollapseFamily(OutcomeGrid({0.0}, {1.0}), projs), ValidationError);
}

TEST_CASE("event schedules are strictly increasing") {
    CHECK_NOTHROW(EventSchedule({0.0, 1.0, 2.0}));
    CHECK_THROWS_AS(EventSchedule({0.0}), ValidationError);
    CHECK_THROWS_AS(EventSchedule({0.0, 1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(EventSchedule({0.0, 2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(EventSchedule({0.0, std::nan("")}), ValidationError);

    EventSchedule sched({-1.0, 0.5, 1.25, 2.0});
    CHECK(sched.n() == 3);
    CHECK(sched.event_count() == 2);
    CHECK(sched.t0() == -1.0);
    CHECK(sched.tn() == 2.0);
    CHECK(sched.event_time(1) == 0.5);
    CHECK(sched.event_time(2) == 1.25);
}

TEST_CASE("records are bound to their schedule and grid") {
    auto sched = std::make_shared<const EventSchedule>(std::vector<double>{0.0, 0.5, 1.0, 2.0});
    CHECK_NOTHROW(CollapseRecord({0, 1}, sched, 2));
    CHECK_THROWS_AS(CollapseRecord({0}, sched, 2), ValidationError);
    CHECK_THROWS_AS(CollapseRecord({0, 2}, sched, 2), ValidationError);
    CHECK_THROWS_AS(CollapseRecord({-1, 0}, sched, 2), ValidationError);
}

TEST_CASE("record reversal negates times, reverses outcomes, and is an involution") {
    auto sched = std::make_shared<const EventSchedule>(std::vector<double>{0.0, 0.5, 1.1, 1.8});
    CollapseRecord rec({0, 1}, sched, 2);

    CollapseRecord rev = reverse_record(rec, 2);
    CHECK(rev.outcomes() == std::vector<int>{1, 0});
    CHECK(rev.schedule()->times() == std::vector<double>{-1.8, -1.1, -0.5, 0.0});

    CollapseRecord back = reverse_record(rev, 2);
    CHECK(back == rec);
}

TEST_CASE("projective families require idempotent orthogonal complete projectors") {
    SpacePtr s = qubit();
    auto projs = z_projectors(s);

    CollapseFamily fam = build_projective_family(projs);
    CHECK(fam.size() == 2);
    CHECK(fam.weight(0) == 1.0);
    CHECK(completeness_residual(fam) < 1e-15);

    // scaled projector is no longer idempotent
    Matrix half = 0.5 * projs[0].matrix();
    CHECK_THROWS_WITH_AS(
        build_projective_family({HermitianOperator(half, s), projs[1]}),
        doctest::Contains("idempotent"), ValidationError);

    // |+><+| and |0><0| are idempotent but not orthogonal
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK_THROWS_WITH_AS(
        build_projective_family({projs[0], HermitianOperator(plus, s)}),
        doctest::Contains("orthogonal"), ValidationError);

    // missing projector: sums to less than the identity
    CHECK_THROWS_WITH_AS(build_projective_family({projs[0]}),
                         doctest::Contains("identity"), ValidationError);
}

TEST_CASE("gaussian localization family on a five-site chain") {
    SpacePtr s = HilbertSpace::make(5);
    HermitianOperator x = diag_x_op(s, {-2, -1, 0, 1, 2});

    std::vector<double> lattice;
    for (int k = 0; k < 41; ++k) lattice.push_back(-6.0 + 0.3 * k);

    CollapseFamily fam = build_grw_family(lattice, x, 1.0);
    CHECK(fam.size() == 41);
    CHECK(completeness_residual(fam) < 1e-12);

    // uniform lattice: every quadrature weight equals the spacing
    for (int a = 0; a < fam.size(); ++a) {
        CHECK(fam.weight(a) == doctest::Approx(0.3).epsilon(1e-12));
    }

    // independently derived diagonal of the operator centered at z = 0
    // (lattice index 20): c * exp(-x_i^2/2) / sqrt(S_i)
    const Matrix& l20 = fam.op(20).matrix();
    CHECK(l20(0, 0).real() == doctest::Approx(0.10165379).epsilon(1e-6));
    CHECK(l20(1, 1).real() == doctest::Approx(0.45558067).epsilon(1e-6));
    CHECK(l20(2, 2).real() == doctest::Approx(0.75112554).epsilon(1e-6));
    CHECK(l20(3, 3).real() == doctest::Approx(0.45558067).epsilon(1e-6));
    CHECK(l20(4, 4).real() == doctest::Approx(0.10165379).epsilon(1e-6));
    // symmetric site layout: mirrored entries match
    CHECK(std::abs(l20(0, 0) - l20(4, 4)) < 1e-14);
}

TEST_CASE("sharp gaussians converge to the projective family") {
    SpacePtr s = HilbertSpace::make(5);
    HermitianOperator x = diag_x_op(s, {-2, -1, 0, 1, 2});
    std::vector<double> lattice{-2, -1, 0, 1, 2};

    CollapseFamily fam = build_grw_family(lattice, x, 1e4);
    REQUIRE(fam.size() == 5);
    for (int a = 0; a < 5; ++a) {
        Matrix expected = Matrix::Zero(5, 5);
        expected(a, a) = 1.0;
        CHECK((fam.op(a).matrix() - expected).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("gaussian family rejections") {
    SpacePtr s = HilbertSpace::make(3);
    HermitianOperator x = diag_x_op(s, {-1, 0, 1});

    CHECK_THROWS_AS(build_grw_family({-1, 0, 1}, x, 0.0), ValidationError);
    CHECK_THROWS_AS(build_grw_family({-1, 0, 1}, x, -2.0), ValidationError);
    CHECK_THROWS_AS(build_grw_family({}, x, 1.0), ValidationError);
    CHECK_THROWS_AS(build_grw_family({0.0, 0.0}, x, 1.0), ValidationError);

    Matrix offdiag = Matrix::Zero(3, 3);
    offdiag(0, 1) = offdiag(1, 0) = 1.0;
    CHECK_THROWS_WITH_AS(
        build_grw_family({-1, 0, 1}, HermitianOperator(offdiag, s), 1.0),
        doctest::Contains("diagonal"), ValidationError);

    // a lattice far from every site cannot be renormalized
    CHECK_THROWS_WITH_AS(build_grw_family({100.0, 101.0}, x, 10.0),
                         doctest::Contains("renormalized"), ValidationError);

    // unsorted input is accepted and ordered internally
    CollapseFamily fam = build_grw_family({1, -1, 0}, x, 1.0);
    CHECK(fam.grid().points() == std::vector<double>{-1, 0, 1});
}

TEST_CASE("symmetry report distinguishes real-symmetric from complex models") {
    SpacePtr s = qubit();
    CollapseFamily fam = build_projective_family(z_projectors(s));

    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    SymmetryReport symmetric = check_symmetry_conditions(HermitianOperator(sx, s), fam);
    CHECK(symmetric.pass);
    CHECK(symmetric.h_asym == 0.0);
    CHECK(symmetric.l_asym == 0.0);

    Matrix sy(2, 2);
    sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    SymmetryReport asymmetric = check_symmetry_conditions(HermitianOperator(sy, s), fam);
    CHECK_FALSE(asymmetric.pass);
    CHECK(asymmetric.h_asym == doctest::Approx(2.0));
}

TEST_CASE("two-time models tie every part to one space and fix boundary roles") {
    SpacePtr s = qubit();
    CollapseFamily fam = build_projective_family(z_projectors(s));
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    auto sched = std::make_shared<const EventSchedule>(std::vector<double>{0.0, 1.0, 2.0});
    Matrix half = 0.5 * Matrix::Identity(2, 2);

    DensityOperator rho_i(HermitianOperator(half, s), DensityRole::state);
    DensityOperator rho_f(HermitianOperator(Matrix::Identity(2, 2), s),
                          DensityRole::povm_element);

    TwoTimeModel model(s, HermitianOperator(sx, s), fam, sched, rho_i, rho_f);
    CHECK(model.dim() == 2);
    CHECK(model.schedule()->event_count() == 1);
    CHECK_NOTHROW(model.make_record({1}));
    CHECK_THROWS_AS(model.make_record({0, 1}), ValidationError);

    // roles are enforced, not just documented
    CHECK_THROWS_AS(TwoTimeModel(s, HermitianOperator(sx, s), fam, sched, rho_i, rho_i),
                    ValidationError);
    CHECK_THROWS_AS(TwoTimeModel(s, HermitianOperator(sx, s), fam, sched, rho_f, rho_f),
                    ValidationError);

    // operators from a different space are rejected
    SpacePtr other = HilbertSpace::make(2, {"a", "b"});
    CHECK_THROWS_AS(TwoTimeModel(other, HermitianOperator(sx, s), fam, sched, rho_i, rho_f),
                    ValidationError);
}
