#pragma once

// Entropic functionals in nats, extended homogeneously to the cone of
// positive trace-class operators: H(λρ) = λH(ρ).

#include <span>
#include <vector>

#include "sqent/state.hpp"

namespace sqent {

/// η(x) = -x log x with η(0) = 0.
double eta(double x);

/// Σ η(λ_i) - η(Σ λ_i); negative entries are treated as 0.
double entropy_of_spectrum(std::span<const double> values);
double entropy_of_spectrum(const RVector& values);

/// Cone entropy of a raw Hermitian PSD matrix.
double matrix_entropy(const CMatrix& m);

double entropy(const DensityOperator& rho);

/// h₂(λ) = η(λ) + η(1-λ) on [0, 1].
double binary_entropy(double lambda);

/// θ(x) = (1+x) h₂(x/(1+x)) on [0, ∞).
double theta(double x);

/// Lindblad relative entropy Tr ρ log ρ - Tr ρ log σ + Tr σ - Tr ρ, or +∞ when
/// supp ρ ⊄ supp σ (kernel of σ taken at eigenvalue threshold 1e-10).
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

/// I(A:B) for a bipartition {part_a, part_b} of the layout labels.
double mutual_information(const DensityOperator& omega, const LabelSet& part_a, const LabelSet& part_b);

/// Extended conditional entropy H(A) - I(A:B); `of` and `given` partition the layout.
double conditional_entropy(const DensityOperator& omega, const LabelSet& of, const LabelSet& given);

/// The three equivalent finite-dimensional forms of I(A:B|E), for cross-checks.
struct CmiForms {
  double entropic;      // H(AE) + H(BE) - H(E) - H(ABE)
  double chain;         // I(A:BE) - I(A:E)
  double mutual;        // I(A:B) - I(A:E) - I(B:E) + I(AB:E)
};
CmiForms cmi_forms(const DensityOperator& omega, const LabelSet& a, const LabelSet& b, const LabelSet& e);

/// Conditional mutual information I(A:B|E). A, B, E must partition the layout;
/// E may be empty (giving I(A:B)). Throws InvariantViolation if the three
/// forms disagree by more than 1e-8 or the value is below -1e-9.
double cmi(const DensityOperator& omega, const LabelSet& a, const LabelSet& b, const LabelSet& e);

/// Values I(A:BE) - I(A:E) of the compressions Q ω Q with Q = P ⊗ I over an
/// increasing sequence of projectors P on subsystem `a_label`.
std::vector<double> cmi_truncated_sequence(const DensityOperator& omega, const std::string& a_label,
                                           const LabelSet& b, const LabelSet& e,
                                           const std::vector<LocalProjector>& ladder);

/// Raw-matrix CMI kernel, I(A:B|E) of an operator on A⊗B⊗E in that factor order.
double cmi_raw(const CMatrix& abe, Index dim_a, Index dim_b, Index dim_e);

}  // namespace sqent
