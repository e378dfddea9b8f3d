#include "sqent/formation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "detail.hpp"
#include "sqent/entropic.hpp"
#include "sqent/linalg.hpp"

namespace sqent {

DensityOperator PureDecomposition::mixture() const {
  if (weights.size() != vectors.size() || weights.empty())
    throw InvalidArgument("decomposition: weights and vectors must be nonempty and of equal length");
  const Index d = layout.total_dim();
  CMatrix m = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (vectors[i].size() != d) throw InvalidArgument("decomposition: vector dimension mismatch");
    m += weights[i] * vectors[i] * vectors[i].adjoint();
  }
  return DensityOperator(layout, m);
}

void PureDecomposition::verify(const DensityOperator& target) const {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvariantViolation("decomposition: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-8) throw InvariantViolation("decomposition: weights do not sum to 1");
  for (const auto& v : vectors)
    if (std::abs(v.norm() - 1.0) > 1e-8) throw InvariantViolation("decomposition: vector is not normalized");
  if (!(layout == target.layout())) throw InvariantViolation("decomposition: layout mismatch");
  if (linalg::max_abs(mixture().matrix() - target.matrix()) > 1e-8)
    throw InvariantViolation("decomposition: mixture does not reproduce the state");
}

nlohmann::json to_json(const PureDecomposition& decomposition) {
  nlohmann::json layout = nlohmann::json::array();
  for (const auto& s : decomposition.layout.subsystems()) layout.push_back({s.label, s.dim});
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t i = 0; i < decomposition.weights.size(); ++i) {
    nlohmann::json amps = nlohmann::json::array();
    for (Index k = 0; k < decomposition.vectors[i].size(); ++k)
      amps.push_back({decomposition.vectors[i](k).real(), decomposition.vectors[i](k).imag()});
    terms.push_back({{"weight", decomposition.weights[i]}, {"amplitudes", amps}});
  }
  return {{"layout", layout}, {"terms", terms}};
}

Index default_ensemble_size(Index rank) { return std::max(rank, std::min<Index>(rank * rank, 16)); }

namespace {

// Σ_i H(Tr_B |ψ̃_i⟩⟨ψ̃_i|) for subnormalized ψ̃_i = columns of V_ω Wᵀ,
// with V_ω = eigvecs·√λ and W an m x r isometry.
class FormationProblem {
 public:
  explicit FormationProblem(const DensityOperator& omega) {
    const auto dims = omega.layout().dims();
    dim_a_ = dims[0];
    dim_b_ = dims[1];
    const auto sys = linalg::hermitian_eigensystem(omega.matrix());
    std::vector<Index> support;
    for (Index i = sys.values.size(); i-- > 0;)
      if (sys.values(i) > kRankThreshold) support.push_back(i);
    rank_ = static_cast<Index>(support.size());
    root_.resize(omega.dim(), rank_);
    for (Index k = 0; k < rank_; ++k)
      root_.col(k) = std::sqrt(sys.values(support[k])) * sys.vectors.col(support[k]);
    // renormalize against discarded tails
    root_ /= root_.norm();
  }

  Index rank() const { return rank_; }

  CMatrix columns(const CMatrix& w) const { return root_ * w.transpose(); }

  CMatrix block(const CMatrix& cols, Index i) const {
    // |ψ⟩ = Σ M(a,b)|a⟩|b⟩ with b fastest
    CMatrix m(dim_a_, dim_b_);
    for (Index a = 0; a < dim_a_; ++a)
      for (Index b = 0; b < dim_b_; ++b) m(a, b) = cols(a * dim_b_ + b, i);
    return m;
  }

  double operator()(const CMatrix& w, CMatrix* grad) const {
    const CMatrix cols = columns(w);
    double value = 0.0;
    CMatrix q = grad ? CMatrix::Zero(cols.rows(), cols.cols()) : CMatrix();
    for (Index i = 0; i < cols.cols(); ++i) {
      const CMatrix m = block(cols, i);
      const CMatrix rho = m * m.adjoint();
      const auto sys = linalg::hermitian_eigensystem(rho);
      value += entropy_of_spectrum(sys.values);
      if (!grad) continue;
      const double t = std::max(rho.trace().real(), detail::kLogFloor);
      RVector logs(sys.values.size());
      for (Index k = 0; k < logs.size(); ++k) logs(k) = std::log(std::max(sys.values(k), detail::kLogFloor) / t);
      const CMatrix lm = sys.vectors * logs.cast<cplx>().asDiagonal() * sys.vectors.adjoint() * m;
      for (Index a = 0; a < dim_a_; ++a)
        for (Index b = 0; b < dim_b_; ++b) q(a * dim_b_ + b, i) = lm(a, b);
    }
    if (grad) *grad = -2.0 * (root_.adjoint() * q).transpose();
    return value;
  }

  PureDecomposition decomposition(const SystemLayout& layout, const CMatrix& w) const {
    const CMatrix cols = columns(w);
    PureDecomposition out{layout, {}, {}};
    for (Index i = 0; i < cols.cols(); ++i) {
      const double p = cols.col(i).squaredNorm();
      if (p <= 1e-15) continue;
      out.weights.push_back(p);
      out.vectors.push_back(cols.col(i) / std::sqrt(p));
    }
    return out;
  }

 private:
  Index dim_a_ = 1;
  Index dim_b_ = 1;
  Index rank_ = 0;
  CMatrix root_;
};

}  // namespace

StiefelObjective formation_objective(const DensityOperator& omega) {
  detail::require_normalized_bipartite(omega, "formation_objective");
  auto problem = std::make_shared<const FormationProblem>(omega);
  return [problem](const CMatrix& w, CMatrix* grad) { return (*problem)(w, grad); };
}

FormationResult eof_upper(const DensityOperator& omega, Index m, const OptimizerConfig& cfg) {
  detail::require_normalized_bipartite(omega, "eof_upper");
  cfg.validate();
  const FormationProblem problem(omega);
  const Index r = problem.rank();
  if (m == 0) m = default_ensemble_size(r);
  if (m < r) throw InvalidArgument("eof_upper: ensemble size must be at least the rank " + std::to_string(r));

  const StiefelObjective objective = [&problem](const CMatrix& w, CMatrix* grad) { return problem(w, grad); };
  const StiefelInitializer init = [r, m](int restart, std::mt19937_64& rng) -> CMatrix {
    if (restart == 0) {
      CMatrix w = CMatrix::Zero(m, r);
      w.topRows(r).setIdentity();
      return w;
    }
    return linalg::haar_isometry(m, r, rng);
  };
  MultiStartResult run = multistart_minimize(objective, init, cfg);

  FormationResult out{0.0, problem.decomposition(omega.layout(), run.best.point), run.best.converged,
                      run.best_restart, std::move(run.restart_values), std::move(run.trace)};
  out.decomposition.verify(omega);
  for (std::size_t i = 0; i < out.decomposition.weights.size(); ++i) {
    const DensityOperator psi(omega.layout(), out.decomposition.vectors[i] * out.decomposition.vectors[i].adjoint());
    out.value += out.decomposition.weights[i] * entropy(partial_trace(psi, {omega.layout().labels()[0]}));
  }
  return out;
}

double concurrence(const DensityOperator& omega) {
  if (omega.layout().dims() != std::vector<Index>{2, 2})
    throw InvalidArgument("concurrence: requires a two-qubit state");
  CMatrix yy = CMatrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const CMatrix& rho = omega.matrix();
  const CMatrix flipped = yy * rho.conjugate() * yy;
  const CMatrix root = linalg::spectral_function(rho, [](double x) { return std::sqrt(std::max(0.0, x)); });
  const CMatrix r = root * flipped * root;
  RVector mu = linalg::hermitian_eigenvalues(0.5 * (r + r.adjoint()));
  for (Index i = 0; i < 4; ++i) mu(i) = std::sqrt(std::max(0.0, mu(i)));
  std::sort(mu.data(), mu.data() + 4, std::greater<>());
  return std::max(0.0, mu(0) - mu(1) - mu(2) - mu(3));
}

double wootters_eof(const DensityOperator& omega) {
  const double c = std::min(1.0, concurrence(omega));
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

ExtensionCertificate classical_extension(const PureDecomposition& decomposition) {
  if (decomposition.layout.size() != 2) throw InvalidArgument("classical_extension: expected a bipartite layout");
  const auto& subs = decomposition.layout.subsystems();
  const std::string label_e = fresh_label(decomposition.layout, "E");
  const Index k = static_cast<Index>(decomposition.weights.size());
  const Index d = decomposition.layout.total_dim();
  CMatrix abe = CMatrix::Zero(d * k, d * k);
  for (Index i = 0; i < k; ++i) {
    CMatrix flag = CMatrix::Zero(k, k);
    flag(i, i) = 1.0;
    const CVector& v = decomposition.vectors[static_cast<std::size_t>(i)];
    abe += decomposition.weights[static_cast<std::size_t>(i)] * linalg::kron(CMatrix(v * v.adjoint()), flag);
  }
  ExtensionCertificate cert{DensityOperator::from_factors({subs[0], subs[1], {label_e, k}}, abe),
                            subs[0].label,
                            subs[1].label,
                            label_e,
                            0.0,
                            std::nullopt,
                            CertificateSource::formation_extension};
  cert.cmi_value = cmi(cert.extension, {subs[0].label}, {subs[1].label}, {label_e});
  return cert;
}

double eof_via_classical_extension(const DensityOperator& omega, Index m, const OptimizerConfig& cfg) {
  const FormationResult ef = eof_upper(omega, m, cfg);
  const ExtensionCertificate cert = classical_extension(ef.decomposition);
  const double value = 0.5 * cert.cmi_value;
  // for pure components I(A:B|E) = 2 Σ p_i H(A)_i
  if (std::abs(value - ef.value) > 1e-6)
    throw InvariantViolation("eof_via_classical_extension: extension CMI disagrees with the convex roof");
  return value;
}

}  // namespace sqent
