#pragma once

// Multi-restart local minimization over complex isometries V (V†V = I).
// Shared by the squashing-channel and pure-decomposition searches.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sqent/types.hpp"

namespace sqent {

enum class GradientMode { analytic, finite_difference };

struct OptimizerConfig {
  int restarts = 8;
  int max_iterations = 1000;
  double step_tolerance = 1e-7;    // Riemannian gradient norm
  double value_tolerance = 1e-12;  // per-iteration objective decrease
  std::uint64_t seed = 1;
  GradientMode gradient = GradientMode::analytic;
  double fd_step = 1e-5;
  int threads = 1;
  bool record_trace = false;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Objective value at an isometry; when `gradient` is non-null it receives the
/// Euclidean gradient G with df = Re Tr(G† dV).
using StiefelObjective = std::function<double(const CMatrix& point, CMatrix* gradient)>;

/// Start point for a restart index; must be deterministic in (index, rng state).
using StiefelInitializer = std::function<CMatrix(int restart, std::mt19937_64& rng)>;

struct TraceRow {
  int restart = 0;
  int iteration = 0;
  double value = 0.0;
};

struct LocalSearch {
  CMatrix point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MultiStartResult {
  LocalSearch best;
  int best_restart = 0;
  std::vector<double> restart_values;  // per restart index
  std::vector<TraceRow> trace;         // ordered by (restart, iteration)
  bool any_converged = false;
};

/// Central finite-difference Euclidean gradient over real and imaginary parts.
CMatrix finite_difference_gradient(const StiefelObjective& f, const CMatrix& point, double step);

/// Riemannian gradient descent with Barzilai-Borwein steps, Armijo
/// backtracking and polar retraction.
LocalSearch minimize_on_stiefel(const StiefelObjective& f, CMatrix start, const OptimizerConfig& cfg,
                                std::vector<double>* trace = nullptr);

/// Runs every restart (in parallel up to cfg.threads) and reduces to the
/// minimum value, ties going to the lowest restart index.
MultiStartResult multistart_minimize(const StiefelObjective& f, const StiefelInitializer& init,
                                     const OptimizerConfig& cfg);

}  // namespace sqent
