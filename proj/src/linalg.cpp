#include "sqent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sqent::linalg {
namespace {

// Connected components of the nonzero pattern of a square matrix.
std::vector<std::vector<Index>> nonzero_blocks(const CMatrix& m) {
  const Index n = m.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (m(i, j) != cplx{0.0, 0.0} || m(j, i) != cplx{0.0, 0.0}) {
        const Index a = find(i);
        const Index b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

CMatrix gather(const CMatrix& m, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  CMatrix out(k, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) out(i, j) = m(idx[i], idx[j]);
  return out;
}

std::vector<Index> strides_of(std::span<const Index> dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

// Splits every flat index into (kept index, traced index).
void split_indices(std::span<const Index> dims, const std::vector<bool>& keep,
                   std::vector<Index>& kept, std::vector<Index>& traced) {
  const Index total = product(dims);
  kept.assign(static_cast<std::size_t>(total), 0);
  traced.assign(static_cast<std::size_t>(total), 0);
  std::vector<Index> digit(dims.size(), 0);
  for (Index flat = 0; flat < total; ++flat) {
    Index k = 0;
    Index t = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (keep[f])
        k = k * dims[f] + digit[f];
      else
        t = t * dims[f] + digit[f];
    }
    kept[flat] = k;
    traced[flat] = t;
    for (std::size_t f = dims.size(); f-- > 0;) {
      if (++digit[f] < dims[f]) break;
      digit[f] = 0;
    }
  }
}

Index kept_dim(std::span<const Index> dims, const std::vector<bool>& keep) {
  Index d = 1;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (keep[f]) d *= dims[f];
  return d;
}

std::vector<Index> permutation_map(std::span<const Index> dims,
                                   std::span<const std::size_t> perm) {
  // out flat index -> in flat index
  std::vector<Index> out_dims(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out_dims[k] = dims[perm[k]];
  const auto in_strides = strides_of(dims);
  const Index total = product(dims);
  std::vector<Index> map(static_cast<std::size_t>(total));
  std::vector<Index> digit(perm.size(), 0);
  for (Index flat = 0; flat < total; ++flat) {
    Index src = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) src += digit[k] * in_strides[perm[k]];
    map[flat] = src;
    for (std::size_t k = perm.size(); k-- > 0;) {
      if (++digit[k] < out_dims[k]) break;
      digit[k] = 0;
    }
  }
  return map;
}

}  // namespace

RVector hermitian_eigenvalues(const CMatrix& m) {
  const auto blocks = nonzero_blocks(m);
  if (blocks.size() == 1) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }
  RVector values(m.rows());
  Index pos = 0;
  for (const auto& block : blocks) {
    if (block.size() == 1) {
      values(pos++) = m(block[0], block[0]).real();
      continue;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(gather(m, block), Eigen::EigenvaluesOnly);
    values.segment(pos, solver.eigenvalues().size()) = solver.eigenvalues();
    pos += solver.eigenvalues().size();
  }
  std::sort(values.begin(), values.end());
  return values;
}

EigenSystem hermitian_eigensystem(const CMatrix& m) {
  const auto blocks = nonzero_blocks(m);
  if (blocks.size() == 1) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    return {solver.eigenvalues(), solver.eigenvectors()};
  }
  const Index n = m.rows();
  RVector values(n);
  CMatrix vectors = CMatrix::Zero(n, n);
  Index pos = 0;
  for (const auto& block : blocks) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(gather(m, block));
    for (Index c = 0; c < static_cast<Index>(block.size()); ++c) {
      values(pos) = solver.eigenvalues()(c);
      for (Index r = 0; r < static_cast<Index>(block.size()); ++r)
        vectors(block[r], pos) = solver.eigenvectors()(r, c);
      ++pos;
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  EigenSystem sorted{RVector(n), CMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    sorted.values(k) = values(order[k]);
    sorted.vectors.col(k) = vectors.col(order[k]);
  }
  return sorted;
}

CMatrix spectral_function(const CMatrix& m, const std::function<double(double)>& f) {
  const auto eig = hermitian_eigensystem(m);
  RVector fv(eig.values.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.values(i));
  return eig.vectors * fv.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

std::int64_t product(std::span<const Index> dims) {
  std::int64_t p = 1;
  for (Index d : dims) p *= d;
  return p;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CMatrix partial_trace(const CMatrix& m, std::span<const Index> dims,
                      const std::vector<bool>& keep) {
  std::vector<Index> kept;
  std::vector<Index> traced;
  split_indices(dims, keep, kept, traced);
  const Index dk = kept_dim(dims, keep);
  const Index dt = m.rows() / dk;
  // group flat indices by traced index; each group holds dk entries in kept order
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(dt));
  for (Index flat = 0; flat < m.rows(); ++flat) groups[traced[flat]].push_back(flat);
  CMatrix out = CMatrix::Zero(dk, dk);
  for (const auto& g : groups) {
    for (Index j = 0; j < dk; ++j) {
      const Index cj = g[j];
      for (Index i = 0; i < dk; ++i) out(kept[g[i]], kept[cj]) += m(g[i], cj);
    }
  }
  return out;
}

CMatrix embed(const CMatrix& op, std::span<const Index> dims, const std::vector<bool>& keep) {
  std::vector<Index> kept;
  std::vector<Index> traced;
  split_indices(dims, keep, kept, traced);
  const Index total = product(dims);
  CMatrix out = CMatrix::Zero(total, total);
  for (Index j = 0; j < total; ++j)
    for (Index i = 0; i < total; ++i)
      if (traced[i] == traced[j]) out(i, j) = op(kept[i], kept[j]);
  return out;
}

CMatrix permute_factors(const CMatrix& m, std::span<const Index> dims,
                        std::span<const std::size_t> perm) {
  const auto map = permutation_map(dims, perm);
  const Index n = m.rows();
  CMatrix out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = m(map[i], map[j]);
  return out;
}

CVector permute_factors(const CVector& v, std::span<const Index> dims,
                        std::span<const std::size_t> perm) {
  const auto map = permutation_map(dims, perm);
  CVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = v(map[i]);
  return out;
}

CMatrix conjugate_factor(const CMatrix& m, std::span<const Index> dims, std::size_t factor,
                         const CMatrix& op) {
  Index left = 1;
  Index right = 1;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (f < factor) left *= dims[f];
    if (f > factor) right *= dims[f];
  }
  const CMatrix full = kron(kron(CMatrix::Identity(left, left), op),
                            CMatrix::Identity(right, right));
  return full * m * full.adjoint();
}

CMatrix polar_isometry(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx{re, im};
    }
  return g;
}

CMatrix haar_isometry(Index rows, Index cols, std::mt19937_64& rng) {
  const CMatrix g = random_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  // fix the phase ambiguity of QR so the distribution is exactly Haar
  const CMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index k = 0; k < cols; ++k) {
    const cplx d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace sqent::linalg
