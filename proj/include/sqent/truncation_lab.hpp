#pragma once

// Model bipartite states and truncation experiments over local rank ladders.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqent/squashed.hpp"
#include "sqent/state.hpp"
#include "sqent/stiefel.hpp"

namespace sqent {

enum class Family { tmsv, classical_correlated, werner, isotropic, bell };

std::string to_string(Family family);
/// Accepts "tmsv", "classical-correlated", "werner", "isotropic", "bell".
Family parse_family(const std::string& name);

struct ModelStateSpec {
  Family family = Family::bell;
  double parameter = 0.0;  // λ for tmsv, p for werner/isotropic, tail exponent for classical-correlated
  Index dim = 2;           // local truncation dimension

  static ModelStateSpec tmsv(double lambda, Index d);
  static ModelStateSpec classical_correlated(Index d, double tail_exponent = 2.0);
  static ModelStateSpec werner(double p);
  static ModelStateSpec isotropic(double p);
  static ModelStateSpec bell();

  void validate() const;
};

nlohmann::json to_json(const ModelStateSpec& spec);

/// State on subsystems A and B.
DensityOperator build_state(const ModelStateSpec& spec);

/// Σ π_k |k⟩⟨k| ⊗ |k⟩⟨k| as product terms, for the classical-correlated family.
std::vector<ProductTerm> classical_decomposition(const ModelStateSpec& spec);

struct ConvergenceRow {
  Index rank = 0;
  double trace = 0.0;
  double esq_upper = 0.0;
  double eof_upper = 0.0;
  double esq_lower = 0.0;
  double mutual_information = 0.0;
  std::string certificate;  // source of the esq_upper value
  bool converged = true;
};

/// One row per ladder rank r: the state compressed by the leading-r
/// projectors on A and B, with every measure extended homogeneously
/// (value = Tr ω_r · M(ω_r / Tr ω_r)).
std::vector<ConvergenceRow> convergence_run(const ModelStateSpec& spec, const std::vector<Index>& ranks, Index n,
                                            const OptimizerConfig& cfg);

struct DichotomyRow {
  Index n = 0;
  double mutual_information = 0.0;
  double lower = 0.0;            // max(0, ½(I - 4 log n))
  double certified_upper = 0.0;  // ½ I(A:B|E) of an explicit extension with dim E ≤ n
  std::string certificate;
};

/// Classical-correlated family only. For n ≥ d the certificate is the Markov
/// extension; below that the classical index is coarse-grained into n groups.
std::vector<DichotomyRow> dichotomy_probe(const ModelStateSpec& spec, const std::vector<Index>& ns);

std::string to_csv(const std::vector<ConvergenceRow>& rows);
std::string to_csv(const std::vector<DichotomyRow>& rows);

}  // namespace sqent
