#include "ttc/interferometer.hpp"

#include <cmath>
#include <memory>

namespace ttc {

TwoTimeModel beam_splitter_model(const Tolerances& tol) {
    SpacePtr space = HilbertSpace::make(2, {"0", "1"});
    const double s = 1.0 / std::sqrt(2.0);

    Matrix hadamard(2, 2);
    hadamard << s, s, s, -s;
    // pi * (1 - Hadamard)/2: projector onto the -1 eigenvector, scaled so
    // exp(-iH) = Hadamard and exp(-2iH) = identity.
    Matrix h = M_PI * 0.5 * (Matrix::Identity(2, 2) - hadamard);

    std::vector<HermitianOperator> path_projectors;
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    Matrix p1 = Matrix::Zero(2, 2);
    p1(1, 1) = 1.0;
    path_projectors.emplace_back(p0, space, tol);
    path_projectors.emplace_back(p1, space, tol);

    Matrix rho_i = p0;                       // photon starts in path 0
    Matrix rho_f = Matrix::Identity(2, 2);   // no post-selection

    return TwoTimeModel(space, HermitianOperator(h, space, tol),
                        build_projective_family(path_projectors, tol),
                        std::make_shared<const EventSchedule>(std::vector<double>{0.0, 2.0, 3.0, 5.0}),
                        DensityOperator(HermitianOperator(rho_i, space, tol),
                                        DensityRole::state, tol),
                        DensityOperator(HermitianOperator(rho_f, space, tol),
                                        DensityRole::povm_element, tol),
                        tol);
}

}  // namespace ttc
