#include "sqent/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "sqent/linalg.hpp"

namespace sqent {
namespace {

std::vector<std::size_t> canonical_order(const std::vector<Subsystem>& factors) {
  std::vector<std::size_t> perm(factors.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return factors[a].label < factors[b].label;
  });
  return perm;
}

std::vector<Index> dims_of(const std::vector<Subsystem>& factors) {
  std::vector<Index> d;
  d.reserve(factors.size());
  for (const auto& s : factors) d.push_back(s.dim);
  return d;
}

bool is_identity_perm(const std::vector<std::size_t>& perm) {
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (perm[k] != k) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- layout

SystemLayout::SystemLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  std::set<std::string> seen;
  for (const auto& s : subsystems_) {
    if (s.label.empty()) throw InvalidArgument("subsystem label must be nonempty");
    if (s.dim < 1) throw InvalidArgument("subsystem '" + s.label + "' has dimension < 1");
    if (!seen.insert(s.label).second) throw InvalidArgument("duplicate subsystem label '" + s.label + "'");
  }
  std::sort(subsystems_.begin(), subsystems_.end(),
            [](const Subsystem& a, const Subsystem& b) { return a.label < b.label; });
}

Index SystemLayout::total_dim() const {
  Index d = 1;
  for (const auto& s : subsystems_) d *= s.dim;
  return d;
}

std::vector<Index> SystemLayout::dims() const { return dims_of(subsystems_); }

LabelSet SystemLayout::labels() const {
  LabelSet out;
  for (const auto& s : subsystems_) out.push_back(s.label);
  return out;
}

bool SystemLayout::contains(const std::string& label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

std::size_t SystemLayout::position(const std::string& label) const {
  for (std::size_t k = 0; k < subsystems_.size(); ++k)
    if (subsystems_[k].label == label) return k;
  throw InvalidArgument("unknown subsystem label '" + label + "'");
}

Index SystemLayout::dim_of(const std::string& label) const { return subsystems_[position(label)].dim; }

std::vector<bool> SystemLayout::mask(const LabelSet& labels) const {
  std::vector<bool> m(subsystems_.size(), false);
  for (const auto& l : labels) m[position(l)] = true;
  return m;
}

SystemLayout SystemLayout::restricted(const LabelSet& labels) const {
  const auto m = mask(labels);
  std::vector<Subsystem> kept;
  for (std::size_t k = 0; k < subsystems_.size(); ++k)
    if (m[k]) kept.push_back(subsystems_[k]);
  return SystemLayout(std::move(kept));
}

// ---------------------------------------------------------------- pure states

PureStateVector::PureStateVector(SystemLayout layout, CVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != layout_.total_dim())
    throw InvalidArgument("amplitude vector size does not match layout dimension");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw InvalidArgument("pure state vector is not normalized");
}

// ---------------------------------------------------------------- density operators

DensityOperator::DensityOperator(SystemLayout layout, CMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const Index d = layout_.total_dim();
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw InvalidArgument("matrix size does not match layout dimension");
  const CMatrix adj = matrix_.adjoint();
  if (linalg::max_abs(matrix_ - adj) > kHermitianTolerance)
    throw InvariantViolation("density matrix is not Hermitian");
  matrix_ = 0.5 * (matrix_ + adj);

  RVector eig = linalg::hermitian_eigenvalues(matrix_);
  if (eig(0) < -kPsdFloor)
    throw InvariantViolation("density matrix has eigenvalue " + std::to_string(eig(0)) +
                             " below the PSD floor");
  // Eigenvalues within rounding noise of zero are left alone so that stored
  // states round-trip bit-exactly; consumers clamp spectra at zero.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, eig.cwiseAbs().maxCoeff());
  if (eig(0) < -noise) {
    auto sys = linalg::hermitian_eigensystem(matrix_);
    sys.values = sys.values.cwiseMax(0.0);
    matrix_ = sys.vectors * sys.values.cast<cplx>().asDiagonal() * sys.vectors.adjoint();
  }
  weight_ = matrix_.trace().real();
  if (!(weight_ > 0.0)) throw InvalidArgument("density operator has zero trace");
  if (weight_ > 1.0 + kHermitianTolerance)
    throw InvariantViolation("density operator trace " + std::to_string(weight_) + " exceeds 1");
}

DensityOperator DensityOperator::from_factors(const std::vector<Subsystem>& factors,
                                              const CMatrix& matrix) {
  const auto perm = canonical_order(factors);
  if (is_identity_perm(perm)) return DensityOperator(SystemLayout(factors), matrix);
  const auto dims = dims_of(factors);
  if (matrix.rows() != linalg::product(dims) || matrix.cols() != matrix.rows())
    throw InvalidArgument("matrix size does not match layout dimension");
  return DensityOperator(SystemLayout(factors), linalg::permute_factors(matrix, dims, perm));
}

DensityOperator DensityOperator::from_pure(const PureStateVector& psi) {
  return DensityOperator(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
}

RVector DensityOperator::eigenvalues() const {
  return linalg::hermitian_eigenvalues(matrix_).cwiseMax(0.0);
}

DensityOperator DensityOperator::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  return DensityOperator(layout_, matrix_ * factor);
}

DensityOperator DensityOperator::normalized() const { return DensityOperator(layout_, matrix_ / weight_); }

// ---------------------------------------------------------------- projectors

LocalProjector::LocalProjector(std::string target, CMatrix matrix)
    : target_(std::move(target)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("projector must be square");
  if (linalg::max_abs(matrix_ - matrix_.adjoint()) > 1e-10)
    throw InvalidArgument("projector on '" + target_ + "' is not Hermitian");
  if (linalg::max_abs(matrix_ * matrix_ - matrix_) > 1e-10)
    throw InvalidArgument("projector on '" + target_ + "' is not idempotent");
  const double tr = matrix_.trace().real();
  rank_ = static_cast<Index>(std::llround(tr));
  if (rank_ < 1) throw InvalidArgument("projector on '" + target_ + "' has rank 0");

  const Index d = matrix_.rows();
  const bool diagonal = linalg::max_abs(matrix_ - CMatrix(matrix_.diagonal().asDiagonal())) == 0.0;
  range_ = CMatrix::Zero(d, rank_);
  if (diagonal) {
    Index col = 0;
    for (Index i = 0; i < d && col < rank_; ++i)
      if (matrix_(i, i).real() > 0.5) range_(i, col++) = 1.0;
  } else {
    const auto sys = linalg::hermitian_eigensystem(matrix_);
    range_ = sys.vectors.rightCols(rank_);
  }
}

LocalProjector LocalProjector::basis(std::string target, Index dim, const std::vector<Index>& levels) {
  CMatrix p = CMatrix::Zero(dim, dim);
  for (Index l : levels) {
    if (l < 0 || l >= dim) throw InvalidArgument("projector level out of range");
    p(l, l) = 1.0;
  }
  return LocalProjector(std::move(target), p);
}

LocalProjector LocalProjector::leading(std::string target, Index dim, Index rank) {
  if (rank < 1 || rank > dim) throw InvalidArgument("projector rank out of range");
  std::vector<Index> levels(static_cast<std::size_t>(rank));
  std::iota(levels.begin(), levels.end(), Index{0});
  return basis(std::move(target), dim, levels);
}

// ---------------------------------------------------------------- operations

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  std::vector<Subsystem> factors = a.layout().subsystems();
  for (const auto& s : b.layout().subsystems()) {
    if (a.layout().contains(s.label))
      throw InvalidArgument("tensor product label collision on '" + s.label + "'");
    factors.push_back(s);
  }
  return DensityOperator::from_factors(factors, linalg::kron(a.matrix(), b.matrix()));
}

PureStateVector tensor(const PureStateVector& a, const PureStateVector& b) {
  std::vector<Subsystem> factors = a.layout().subsystems();
  for (const auto& s : b.layout().subsystems()) {
    if (a.layout().contains(s.label))
      throw InvalidArgument("tensor product label collision on '" + s.label + "'");
    factors.push_back(s);
  }
  const CVector v = linalg::kron(a.amplitudes(), b.amplitudes());
  const auto perm = canonical_order(factors);
  const auto dims = dims_of(factors);
  return PureStateVector(SystemLayout(factors), linalg::permute_factors(v, dims, perm));
}

DensityOperator partial_trace(const DensityOperator& omega, const LabelSet& keep) {
  if (keep.empty()) throw InvalidArgument("partial trace must keep at least one subsystem");
  const auto mask = omega.layout().mask(keep);
  const auto dims = omega.layout().dims();
  return DensityOperator(omega.layout().restricted(keep), linalg::partial_trace(omega.matrix(), dims, mask));
}

PureStateVector purify(const DensityOperator& omega, const std::string& reference_label) {
  if (std::abs(omega.weight() - 1.0) > 1e-10)
    throw InvalidArgument("purification requires a normalized state");
  if (omega.layout().contains(reference_label))
    throw InvalidArgument("reference label '" + reference_label + "' already in layout");
  const auto sys = linalg::hermitian_eigensystem(omega.matrix());
  const Index d = omega.dim();
  std::vector<Index> support;
  for (Index i = d; i-- > 0;)
    if (sys.values(i) > kRankThreshold) support.push_back(i);
  const Index r = static_cast<Index>(support.size());
  CVector v = CVector::Zero(d * r);
  for (Index k = 0; k < r; ++k) {
    const double amp = std::sqrt(sys.values(support[k]));
    for (Index i = 0; i < d; ++i) v(i * r + k) = amp * sys.vectors(i, support[k]);
  }
  v /= v.norm();
  std::vector<Subsystem> factors = omega.layout().subsystems();
  factors.push_back({reference_label, r});
  const auto perm = canonical_order(factors);
  return PureStateVector(SystemLayout(factors), linalg::permute_factors(v, dims_of(factors), perm));
}

DensityOperator compress(const DensityOperator& omega, const std::vector<LocalProjector>& projectors,
                         bool renormalize) {
  std::vector<Subsystem> factors = omega.layout().subsystems();
  CMatrix m = omega.matrix();
  std::set<std::string> used;
  for (const auto& p : projectors) {
    if (!used.insert(p.target()).second)
      throw InvalidArgument("two projectors target subsystem '" + p.target() + "'");
    const std::size_t pos = omega.layout().position(p.target());
    if (p.matrix().rows() != factors[pos].dim)
      throw InvalidArgument("projector dimension does not match subsystem '" + p.target() + "'");
    m = linalg::conjugate_factor(m, dims_of(factors), pos, p.range_basis().adjoint());
    factors[pos].dim = p.rank();
  }
  const double tr = m.trace().real();
  if (renormalize) {
    if (tr < 1e-12) throw InvalidArgument("compressed state has vanishing trace");
    m /= tr;
  } else if (!(tr > 0.0)) {
    throw InvalidArgument("compression annihilates the state");
  }
  return DensityOperator(SystemLayout(factors), m);
}

DensityOperator apply_local(const DensityOperator& omega, const std::string& label, const CMatrix& op) {
  const std::size_t pos = omega.layout().position(label);
  const auto dims = omega.layout().dims();
  if (op.rows() != dims[pos] || op.cols() != dims[pos])
    throw InvalidArgument("local operator dimension does not match subsystem '" + label + "'");
  return DensityOperator(omega.layout(), linalg::conjugate_factor(omega.matrix(), dims, pos, op));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.layout() == sigma.layout())) throw InvalidArgument("trace distance: layout mismatch");
  const CMatrix diff = rho.matrix() - sigma.matrix();
  return linalg::hermitian_eigenvalues(0.5 * (diff + diff.adjoint())).cwiseAbs().sum();
}

DensityOperator random_state(const SystemLayout& layout, Index rank, std::uint64_t seed) {
  const Index d = layout.total_dim();
  if (rank < 1 || rank > d) throw InvalidArgument("random_state: rank out of range");
  std::mt19937_64 rng(seed);
  const CMatrix g = linalg::random_gaussian(d, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(layout, rho);
}

PureStateVector random_pure_state(const SystemLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CVector v = linalg::random_gaussian(layout.total_dim(), 1, rng).col(0);
  v /= v.norm();
  return PureStateVector(layout, v);
}

CMatrix random_contraction(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CMatrix g = linalg::random_gaussian(dim, dim, rng);
  Eigen::JacobiSVD<CMatrix> svd(g);
  std::uniform_real_distribution<double> scale(0.3, 1.0);
  return g * (scale(rng) / svd.singularValues()(0));
}

std::string fresh_label(const SystemLayout& layout, const std::string& preferred) {
  if (!layout.contains(preferred)) return preferred;
  for (int k = 1;; ++k) {
    std::string candidate = preferred + std::to_string(k);
    if (!layout.contains(candidate)) return candidate;
  }
}

}  // namespace sqent
