#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sqent/linalg.hpp"
#include "sqent/state.hpp"

namespace testing {

using namespace sqent;

inline const double kLog2 = std::log(2.0);

inline DensityOperator ket_state(const std::string& label, Index dim, Index level) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(level, level) = 1.0;
  return DensityOperator(SystemLayout({{label, dim}}), m);
}

inline DensityOperator maximally_mixed(const SystemLayout& layout) {
  const Index d = layout.total_dim();
  return DensityOperator(layout, CMatrix::Identity(d, d) / static_cast<double>(d));
}

inline DensityOperator bell_state() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return DensityOperator(SystemLayout({{"A", 2}, {"B", 2}}), v * v.adjoint());
}

inline SystemLayout layout_ab(Index da, Index db) { return SystemLayout({{"A", da}, {"B", db}}); }
inline SystemLayout layout_abc(Index da, Index db, Index dc) {
  return SystemLayout({{"A", da}, {"B", db}, {"C", dc}});
}

// Entropy straight from the definition, independent of the cone formula.
inline double plain_entropy(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  double h = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double x = es.eigenvalues()(i);
    if (x > 1e-300) h -= x * std::log(x);
  }
  return h;
}

// Naive partial trace over the second of two factors.
inline CMatrix trace_second(const CMatrix& m, Index da, Index db) {
  CMatrix out = CMatrix::Zero(da, da);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j)
      for (Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

inline CMatrix trace_first(const CMatrix& m, Index da, Index db) {
  CMatrix out = CMatrix::Zero(db, db);
  for (Index i = 0; i < db; ++i)
    for (Index j = 0; j < db; ++j)
      for (Index k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
  return out;
}

}  // namespace testing
