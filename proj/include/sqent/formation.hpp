#pragma once

// Entanglement of formation by convex-roof minimization over pure-state
// decompositions, plus the two-qubit closed form used as an independent check.

#include <vector>

#include <json.hpp>

#include "sqent/certificate.hpp"
#include "sqent/state.hpp"
#include "sqent/stiefel.hpp"

namespace sqent {

struct PureDecomposition {
  SystemLayout layout;
  std::vector<double> weights;
  std::vector<CVector> vectors;  // unit vectors

  /// Throws InvariantViolation unless weights sum to 1 and the mixture
  /// reproduces `target` within 1e-8.
  void verify(const DensityOperator& target) const;
  DensityOperator mixture() const;
};

nlohmann::json to_json(const PureDecomposition& decomposition);

struct FormationResult {
  double value = 0.0;
  PureDecomposition decomposition;
  bool converged = true;
  int best_restart = 0;
  std::vector<double> restart_values;
  std::vector<TraceRow> trace;
};

/// rank² capped at 16, never below rank.
Index default_ensemble_size(Index rank);

/// Convex-roof upper estimate Σ p_i H(Tr_B ψ_i) minimized over decompositions
/// of size m, parametrized by isometries acting on the eigen-ensemble.
/// m = 0 selects default_ensemble_size.
FormationResult eof_upper(const DensityOperator& omega, Index m, const OptimizerConfig& cfg);

/// The convex-roof objective over m x rank isometries, with analytic gradient.
StiefelObjective formation_objective(const DensityOperator& omega);

/// Concurrence of a two-qubit state from the spin-flipped spectrum.
double concurrence(const DensityOperator& omega);
/// Closed-form two-qubit entanglement of formation in nats.
double wootters_eof(const DensityOperator& omega);

/// Σ p_i |ψ_i⟩⟨ψ_i| ⊗ |i⟩⟨i|_E built from a decomposition.
ExtensionCertificate classical_extension(const PureDecomposition& decomposition);

/// ½ I(A:B|E) of the classical extension of the best decomposition; checked
/// against the convex-roof value to 1e-6.
double eof_via_classical_extension(const DensityOperator& omega, Index m, const OptimizerConfig& cfg);

}  // namespace sqent
