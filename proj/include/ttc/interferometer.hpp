#pragma once

#include "ttc/model.hpp"

namespace ttc {

/// Single-photon interferometer demo on a two-path space ("0" = source path,
/// "1" = other path).
///
///   t = 0   photon leaves the source in path 0 (rho_I = |0><0|)
///   t = 2   event 1: which-path record at the source side
///   t = 2..3 the mixing stage: the free evolution acts as a 50/50 splitter
///            (a Hadamard rotation) over this unit interval
///   t = 3   event 2: detector click, one detector per path
///   t = 5   open final boundary (rho_F = identity, no post-selection)
///
/// The Hamiltonian is pi times the projector onto the Hadamard's -1
/// eigenvector, so evolution over an even time span is the identity and over
/// the unit gap is exactly the Hadamard mix. Everything is real and
/// symmetric, so forward and backward analyses are both well defined.
///
/// Forward, each detector fires with probability 1/2 (the Born rule).
/// Backward, the detector click retrodicts the source-side record with
/// certainty, while the backward Born rule still predicts 1/2-1/2: the
/// record behind the splitter is not shielded from the initial condition.
TwoTimeModel beam_splitter_model(const Tolerances& tol = default_tolerances());

}  // namespace ttc
