#pragma once

// Raw dense-matrix kernels over tensor-product index spaces. Factor order
// follows the Kronecker convention: the first factor is the most significant
// digit of the flat index.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sqent/types.hpp"

namespace sqent::linalg {

struct EigenSystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};

/// Eigenvalues of a Hermitian matrix (ascending). Splits the matrix into the
/// connected components of its nonzero pattern and diagonalizes each block,
/// so block-diagonal and diagonal inputs of large size stay cheap.
RVector hermitian_eigenvalues(const CMatrix& m);

/// Full eigendecomposition of a Hermitian matrix, block-aware like
/// hermitian_eigenvalues.
EigenSystem hermitian_eigensystem(const CMatrix& m);

/// f applied to the spectrum of a Hermitian matrix.
CMatrix spectral_function(const CMatrix& m, const std::function<double(double)>& f);

std::int64_t product(std::span<const Index> dims);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

/// Partial trace over every factor whose keep flag is false.
CMatrix partial_trace(const CMatrix& m, std::span<const Index> dims,
                      const std::vector<bool>& keep);

/// Operator acting as `op` on the kept factors and as the identity on the
/// others, in the original factor order.
CMatrix embed(const CMatrix& op, std::span<const Index> dims,
              const std::vector<bool>& keep);

/// Reorders tensor factors: output factor k is input factor perm[k].
CMatrix permute_factors(const CMatrix& m, std::span<const Index> dims,
                        std::span<const std::size_t> perm);
CVector permute_factors(const CVector& v, std::span<const Index> dims,
                        std::span<const std::size_t> perm);

/// Applies `op` to a single factor: (I ⊗ op ⊗ I) m (I ⊗ op ⊗ I)†, where `op`
/// may be rectangular (changing the factor dimension).
CMatrix conjugate_factor(const CMatrix& m, std::span<const Index> dims,
                         std::size_t factor, const CMatrix& op);

/// Closest isometry in Frobenius norm (polar factor U W† of the SVD).
CMatrix polar_isometry(const CMatrix& m);

CMatrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng);

/// Haar-distributed isometry with orthonormal columns (rows >= cols).
CMatrix haar_isometry(Index rows, Index cols, std::mt19937_64& rng);

double max_abs(const CMatrix& m);

}  // namespace sqent::linalg
