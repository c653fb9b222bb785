#pragma once

#include <span>
#include <vector>

#include "quenchmap/matrix.hpp"
#include "quenchmap/quench.hpp"

namespace quenchmap {

enum class KernelKind { linear, fidelity };

/// K(a,b) = <x_a, x_b> for rows of A against rows of B (rows of A index the
/// result's rows). Pass the same matrix twice for a square training Gram.
Matrix gram_linear(const Matrix& a, const Matrix& b);

/// K(a,b) = |<psi_a|psi_b>|^2 between quench output states.
Matrix gram_fidelity(std::span<const StateVector> a, std::span<const StateVector> b);

/// Largest symmetry violation |K(i,j) - K(j,i)| of a square Gram matrix.
double gram_asymmetry(const Matrix& k);

} // namespace quenchmap
