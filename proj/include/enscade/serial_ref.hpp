#pragma once

#include <span>

#include "enscade/ensemble.hpp"
#include "enscade/fields.hpp"

namespace enscade::serial_ref {

// Straight-line serial reference kernels. These are the plain loops the
// OpenMP kernels are checked against in the tests and raced against in the
// benchmark; they use naive left-to-right accumulation with no blocking.

double naive_sum(std::span<const double> v);
double naive_dot(std::span<const double> a, std::span<const double> b);
double integrate(const ScalarField& s);
double integrate_weighted(const ScalarField& s, const ScalarField& w);

/// (omega . grad u) . omega contraction from precomputed gradients, plain loops.
ScalarField stretch_contract(const VectorField3& omega,
                             const std::array<VectorField3, 3>& grad_u);

double ensemble_average(const ScalarField& f, const CutoffEnsemble& e);

/// Direct Morrey scan: every center in the region, full radius ladder.
double morrey_snapshot(const ScalarField& omega_sq, double q, double region_radius,
                       std::span<const double> radii);

}  // namespace enscade::serial_ref
