#pragma once

// Squashed entanglement estimates: upper bounds from optimized extensions
// over bounded-dimension squashing channels, lower bounds, and explicit
// Markov certificates for separable decompositions.

#include <vector>

#include "sqent/certificate.hpp"
#include "sqent/state.hpp"
#include "sqent/stiefel.hpp"

namespace sqent {

struct SquashResult {
  double value = 0.0;  // ½ I(A:B|E) of the certificate
  ExtensionCertificate certificate;
  bool converged = true;
  int best_restart = 0;
  std::vector<double> restart_values;  // ½ CMI per restart
  std::vector<TraceRow> trace;
};

/// Upper estimate of E^n_sq for a normalized bipartite state: minimizes
/// ½ I(A:B|E) over channels from the purifying system C to E (dim n) via
/// Stinespring isometries C → E⊗F with dim F = rank(ω)·n. n = 1 is exact and
/// skips the optimizer.
SquashResult esq_upper(const DensityOperator& omega, Index n, const OptimizerConfig& cfg);

/// The objective minimized by esq_upper (n >= 2), over isometries of shape
/// (n · rank · n) x rank, with its analytic gradient.
StiefelObjective squash_objective(const DensityOperator& omega, Index n);

struct SequenceEntry {
  Index n = 1;
  double value = 0.0;  // running minimum
  double raw = 0.0;
};
std::vector<SequenceEntry> esq_sequence(const DensityOperator& omega, Index n_max, const OptimizerConfig& cfg);

/// max(0, ½ I(A:B) - H(ω_AB)), valid for every extension dimension.
double esq_lower(const DensityOperator& omega);

struct ProductTerm {
  double probability = 0.0;
  DensityOperator rho;    // on A
  DensityOperator sigma;  // on B
};

/// Builds Σ π_i ρ_i⊗σ_i⊗|i⟩⟨i| and certifies I(A:B|E) ≤ 1e-9.
ExtensionCertificate markov_certificate(const std::vector<ProductTerm>& decomposition);

struct LadderStep {
  std::size_t step = 0;
  double trace = 0.0;
  double value = 0.0;        // Tr(ω_k) · E^n_sq(ω_k / Tr ω_k)
  double running_sup = 0.0;
};

/// Squashed-entanglement estimates along increasing local projector ladders,
/// with the homogeneous extension to subnormalized compressions.
std::vector<LadderStep> universal_extension_estimate(const DensityOperator& omega,
                                                     const std::vector<LocalProjector>& ladder_a,
                                                     const std::vector<LocalProjector>& ladder_b, Index n,
                                                     const OptimizerConfig& cfg);

struct SandwichReport {
  double lower = 0.0;
  double upper_trivial = 0.0;
  double upper_optimized = 0.0;
  double upper_formation = 0.0;
  bool converged = true;
};

SandwichReport bounds_sandwich(const DensityOperator& omega, Index n, const OptimizerConfig& cfg);

}  // namespace sqent
