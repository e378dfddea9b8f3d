#pragma once

// Gibbs-state machinery for a single-mode Hamiltonian H = Σ E_n |n⟩⟨n| and
// the energy-constrained continuity bounds built on it.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqent/state.hpp"

namespace sqent {

/// Spectrum of a Hamiltonian with ground energy 0. Either an explicit finite
/// list of levels or the infinite unit-spaced oscillator ladder {0, 1, 2, ...},
/// whose Gibbs sums have closed forms.
class HamiltonianSpectrum {
 public:
  /// Levels must be finite, nondecreasing and start at exactly 0.
  static HamiltonianSpectrum from_levels(std::vector<double> levels, std::optional<std::string> model = {});
  /// Oscillator truncated to levels {0, ..., d-1}.
  static HamiltonianSpectrum oscillator(Index d);
  static HamiltonianSpectrum oscillator_ladder();
  /// Smallest oscillator truncation whose Gibbs tail e^{-βd} at energy e_max is below `tail`.
  static HamiltonianSpectrum oscillator_for_energy(double e_max, double tail = 1e-8);

  bool infinite() const { return infinite_; }
  const std::optional<std::string>& model() const { return model_; }
  /// Throws for the infinite ladder.
  const std::vector<double>& levels() const;
  Index dim() const;

  /// The infinite ladder for oscillator-tagged spectra, otherwise a copy.
  HamiltonianSpectrum untruncated() const;
  /// Probability mass the truncation drops at inverse temperature β
  /// (e^{-βd} for a truncated oscillator, 0 when nothing is known).
  double tail_estimate(double beta) const;

 private:
  std::vector<double> levels_;
  std::optional<std::string> model_;
  bool infinite_ = false;
};

double partition_function(const HamiltonianSpectrum& spec, double beta);
double mean_energy(const HamiltonianSpectrum& spec, double beta);

/// Inverse temperature with mean energy E, by bisection in log β over [1e-8, 1e8].
/// Throws InvalidArgument when E is not attainable in that range.
double solve_beta(const HamiltonianSpectrum& spec, double energy);

std::vector<double> gibbs_probabilities(const HamiltonianSpectrum& spec, double energy);
/// Diagonal Gibbs state on a single subsystem; explicit spectra only.
DensityOperator gibbs_state(const HamiltonianSpectrum& spec, double energy, const std::string& label = "A");
double gibbs_entropy(const HamiltonianSpectrum& spec, double energy);

/// Tr H ρ for a single-subsystem state in the energy eigenbasis.
double energy_expectation(const HamiltonianSpectrum& spec, const DensityOperator& rho);

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundReport {
  std::string bound;
  std::string convention;  // "half-trace" or "trace"
  double eps = 0.0;
  double eps_prime = 0.0;
  double delta = 0.0;
  double energy = 0.0;
  std::vector<BoundTerm> terms;
  double total = 0.0;
};

nlohmann::json to_json(const BoundReport& report);

/// Tripartite CMI bound, ε = ½‖ρ-σ‖₁, 0 ≤ ε < ε' ≤ 1, δ = (ε'-ε)/(1+ε'):
/// (2ε'+4δ) H(γ(E/δ)) + 4(1+ε') h₂(ε'/(1+ε')) + 4 h₂(δ).
BoundReport cmi_continuity_bound(const HamiltonianSpectrum& spec, double energy, double eps, double eps_prime);

/// Bound for E_sq and E_F, ε = ‖ρ-σ‖₁ < 1, √ε < ε' ≤ 1, δ = (ε'-√ε)/(1+ε'):
/// (ε'+2δ) H(γ(E/δ)) + 2(1+ε') h₂(ε'/(1+ε')) + 2 h₂(δ).
BoundReport em_continuity_bound(const HamiltonianSpectrum& spec, double energy, double eps, double eps_prime);

/// √ε log d_A + 2(1+√ε) h₂(√ε/(1+√ε)), ε = ‖ρ-σ‖₁.
double finite_dim_esq_bound(Index dim_a, double eps);

/// 2ε' log d + 4(1+ε') h₂(ε'/(1+ε')).
double fannes_cmi_bound(Index d, double eps_prime);

/// Per-copy em bound for n copies, using H(γ_n(nE/δ)) = n H(γ(E/δ)).
double regularized_bound(const HamiltonianSpectrum& spec, double energy, double eps, Index n, double eps_prime);

struct TightnessWitness {
  DensityOperator rho;    // γ(E) ⊗ τ_B ⊗ τ_C
  DensityOperator sigma;  // (1-ε) ρ + ε |φ_AC⟩⟨φ_AC| ⊗ τ'_B
  double gap = 0.0;       // I(A:C|B)_σ - I(A:C|B)_ρ
  double half_trace_distance = 0.0;
  double gibbs_entropy = 0.0;
  std::optional<BoundReport> bound;  // on the untruncated spectrum
};

/// Requires an explicit spectrum, dim_b ≥ 2, dim_c ≥ number of levels and
/// ε ∈ [0, 1). The bound is evaluated when eps_prime is given or ε > 0
/// (default ε' = min(1, 2ε)).
TightnessWitness tightness_witness(const HamiltonianSpectrum& spec, double energy, double eps, Index dim_b,
                                   Index dim_c, std::optional<double> eps_prime = {});

/// Projector onto the levels with E_n ≤ cutoff.
LocalProjector energy_truncation_projector(const HamiltonianSpectrum& spec, double cutoff,
                                           const std::string& label = "A");

}  // namespace sqent
