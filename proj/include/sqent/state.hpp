#pragma once

// Labeled dense states over composite systems.

#include <cstdint>
#include <string>
#include <vector>

#include "sqent/types.hpp"

namespace sqent {

struct Subsystem {
  std::string label;
  Index dim = 1;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

using LabelSet = std::vector<std::string>;

/// Ordered list of labeled tensor factors, always kept in canonical
/// (lexicographic label) order.
class SystemLayout {
 public:
  SystemLayout() = default;
  /// Validates (unique labels, dims >= 1) and sorts into canonical order.
  explicit SystemLayout(std::vector<Subsystem> subsystems);

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }
  Index total_dim() const;
  std::vector<Index> dims() const;
  LabelSet labels() const;

  bool contains(const std::string& label) const;
  std::size_t position(const std::string& label) const;
  Index dim_of(const std::string& label) const;

  /// Per-factor membership flags; throws on unknown labels.
  std::vector<bool> mask(const LabelSet& labels) const;
  SystemLayout restricted(const LabelSet& labels) const;

  friend bool operator==(const SystemLayout&, const SystemLayout&) = default;

 private:
  std::vector<Subsystem> subsystems_;
};

/// Unit vector over a layout.
class PureStateVector {
 public:
  PureStateVector(SystemLayout layout, CVector amplitudes);

  const SystemLayout& layout() const { return layout_; }
  const CVector& amplitudes() const { return amplitudes_; }

 private:
  SystemLayout layout_;
  CVector amplitudes_;
};

/// Positive semidefinite Hermitian operator with trace in (0, 1]. Tiny
/// negative eigenvalues (above -1e-10) are clipped on construction.
class DensityOperator {
 public:
  /// `matrix` is indexed in the layout's canonical factor order.
  DensityOperator(SystemLayout layout, CMatrix matrix);

  /// Accepts factors in any order and permutes the matrix into canonical order.
  static DensityOperator from_factors(const std::vector<Subsystem>& factors, const CMatrix& matrix);
  static DensityOperator from_pure(const PureStateVector& psi);

  const SystemLayout& layout() const { return layout_; }
  const CMatrix& matrix() const { return matrix_; }
  double weight() const { return weight_; }
  Index dim() const { return matrix_.rows(); }

  RVector eigenvalues() const;
  DensityOperator scaled(double factor) const;
  DensityOperator normalized() const;

 private:
  SystemLayout layout_;
  CMatrix matrix_;
  double weight_ = 0.0;
};

/// Orthogonal projector on one subsystem.
class LocalProjector {
 public:
  LocalProjector(std::string target, CMatrix matrix);

  /// Projector onto the span of the listed computational basis states.
  static LocalProjector basis(std::string target, Index dim, const std::vector<Index>& levels);
  /// Projector onto the first `rank` computational basis states.
  static LocalProjector leading(std::string target, Index dim, Index rank);

  const std::string& target() const { return target_; }
  const CMatrix& matrix() const { return matrix_; }
  Index rank() const { return rank_; }
  /// Orthonormal basis of the range as columns (dim x rank).
  const CMatrix& range_basis() const { return range_; }

 private:
  std::string target_;
  CMatrix matrix_;
  CMatrix range_;
  Index rank_ = 0;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
PureStateVector tensor(const PureStateVector& a, const PureStateVector& b);

DensityOperator partial_trace(const DensityOperator& omega, const LabelSet& keep);

/// Minimal purification sum_i sqrt(l_i) |e_i>|i> with reference dimension
/// equal to the numerical rank (eigenvalues above 1e-12).
PureStateVector purify(const DensityOperator& omega, const std::string& reference_label);

/// (⊗P) omega (⊗P) restricted to the projector ranges; optionally renormalized.
DensityOperator compress(const DensityOperator& omega, const std::vector<LocalProjector>& projectors,
                         bool renormalize);

/// (V ⊗ I) omega (V ⊗ I)† for an operator V on one subsystem (dimension kept).
DensityOperator apply_local(const DensityOperator& omega, const std::string& label, const CMatrix& op);

/// Full trace norm ||rho - sigma||_1.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// Random state of the given rank: G G† / Tr with G a complex Ginibre matrix.
DensityOperator random_state(const SystemLayout& layout, Index rank, std::uint64_t seed);
PureStateVector random_pure_state(const SystemLayout& layout, std::uint64_t seed);
/// Random operator with operator norm <= 1.
CMatrix random_contraction(Index dim, std::uint64_t seed);

/// A label not used in the layout, derived from `preferred`.
std::string fresh_label(const SystemLayout& layout, const std::string& preferred);

}  // namespace sqent
