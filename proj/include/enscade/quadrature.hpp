#pragma once

#include "enscade/fields.hpp"

namespace enscade {

// Rectangle rule on the torus: h^3 * sum of node values. Spectrally exact for
// resolved integrands. Summation order is fixed (deterministic blocked
// pairwise reduction) so repeated runs are bit-identical.

double integrate(const ScalarField& s);
double integrate_weighted(const ScalarField& s, const ScalarField& w);

}  // namespace enscade
