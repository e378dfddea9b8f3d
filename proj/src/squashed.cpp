#include "sqent/squashed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "detail.hpp"
#include "sqent/entropic.hpp"
#include "sqent/formation.hpp"
#include "sqent/linalg.hpp"

namespace sqent {

std::string to_string(CertificateSource source) {
  switch (source) {
    case CertificateSource::optimizer: return "optimizer";
    case CertificateSource::analytic_markov: return "analytic-markov";
    case CertificateSource::trivial: return "trivial";
    case CertificateSource::formation_extension: return "formation-extension";
  }
  return "unknown";
}

void verify_certificate(const ExtensionCertificate& cert, const DensityOperator& target) {
  const DensityOperator reduced = partial_trace(cert.extension, {cert.label_a, cert.label_b});
  if (!(reduced.layout() == target.layout()))
    throw InvariantViolation("certificate: extension does not reduce to the target layout");
  if (linalg::max_abs(reduced.matrix() - target.matrix()) > 1e-8)
    throw InvariantViolation("certificate: extension does not reduce to the target state");
  const double recomputed = cmi(cert.extension, {cert.label_a}, {cert.label_b}, {cert.label_e});
  if (std::abs(recomputed - cert.cmi_value) > 1e-8)
    throw InvariantViolation("certificate: stored CMI does not match recomputation");
}

namespace {

// ½ I(A:B|E) of (id_AB ⊗ V)|Ψ⟩ traced over F, as a function of V.
class SquashProblem {
 public:
  SquashProblem(const DensityOperator& omega, Index n) : n_(n) {
    const auto dims = omega.layout().dims();
    dim_a_ = dims[0];
    dim_b_ = dims[1];
    const auto sys = linalg::hermitian_eigensystem(omega.matrix());
    std::vector<Index> support;
    for (Index i = sys.values.size(); i-- > 0;)
      if (sys.values(i) > kRankThreshold) support.push_back(i);
    dim_c_ = static_cast<Index>(support.size());
    psi_.resize(omega.dim(), dim_c_);
    for (Index k = 0; k < dim_c_; ++k)
      psi_.col(k) = std::sqrt(sys.values(support[k])) * sys.vectors.col(support[k]);
    psi_ /= psi_.norm();
    dim_f_ = dim_c_ * n_;
  }

  Index dim_c() const { return dim_c_; }
  Index dim_e() const { return n_; }
  Index dim_f() const { return dim_f_; }
  Index rows() const { return n_ * dim_f_; }

  // ABE ⊗ F amplitudes arranged as (abe) x f.
  CMatrix amplitudes(const CMatrix& v) const {
    const CMatrix y = psi_ * v.transpose();
    const Index d_ab = dim_a_ * dim_b_;
    CMatrix x(d_ab * n_, dim_f_);
    for (Index ab = 0; ab < d_ab; ++ab)
      for (Index e = 0; e < n_; ++e)
        for (Index f = 0; f < dim_f_; ++f) x(ab * n_ + e, f) = y(ab, e * dim_f_ + f);
    return x;
  }

  CMatrix extension(const CMatrix& v) const {
    const CMatrix x = amplitudes(v);
    return x * x.adjoint();
  }

  double operator()(const CMatrix& v, CMatrix* grad) const {
    const CMatrix x = amplitudes(v);
    const CMatrix rho = x * x.adjoint();
    const std::array<Index, 3> dims{dim_a_, dim_b_, n_};
    if (grad == nullptr) return 0.5 * cmi_raw(rho, dim_a_, dim_b_, n_);

    const std::vector<bool> ae{true, false, true};
    const std::vector<bool> be{false, true, true};
    const std::vector<bool> e{false, false, true};
    double value = 0.0;
    CMatrix g = CMatrix::Zero(rho.rows(), rho.cols());
    auto accumulate = [&](const CMatrix& marginal, const std::vector<bool>* keep, double sign) {
      const auto sys = linalg::hermitian_eigensystem(marginal);
      value += sign * entropy_of_spectrum(sys.values);
      RVector logs(sys.values.size());
      for (Index i = 0; i < logs.size(); ++i) logs(i) = std::log(std::max(sys.values(i), detail::kLogFloor));
      const CMatrix log_m = sys.vectors * logs.cast<cplx>().asDiagonal() * sys.vectors.adjoint();
      g += sign * (keep ? linalg::embed(log_m, dims, *keep) : log_m);
    };
    accumulate(linalg::partial_trace(rho, dims, ae), &ae, 1.0);
    accumulate(linalg::partial_trace(rho, dims, be), &be, 1.0);
    accumulate(linalg::partial_trace(rho, dims, e), &e, -1.0);
    accumulate(rho, nullptr, -1.0);

    // d(½ CMI) = -Re ⟨Φ|(G⊗I_F)|dΦ⟩
    const CMatrix z = g * x;
    const Index d_ab = dim_a_ * dim_b_;
    CMatrix y(d_ab, n_ * dim_f_);
    for (Index ab = 0; ab < d_ab; ++ab)
      for (Index ee = 0; ee < n_; ++ee)
        for (Index f = 0; f < dim_f_; ++f) y(ab, ee * dim_f_ + f) = z(ab * n_ + ee, f);
    *grad = -(psi_.adjoint() * y).transpose();
    return 0.5 * value;
  }

  // V|c⟩ = |0⟩_E|c⟩_F: E decoupled.
  CMatrix trivial_channel() const {
    CMatrix v = CMatrix::Zero(rows(), dim_c_);
    for (Index c = 0; c < dim_c_; ++c) v(c, c) = 1.0;
    return v;
  }

  // V|c⟩ = |c mod n⟩_E|c⟩_F: measurement of C in the eigenbasis of ω_C.
  CMatrix diagonal_channel() const {
    CMatrix v = CMatrix::Zero(rows(), dim_c_);
    for (Index c = 0; c < dim_c_; ++c) v((c % n_) * dim_f_ + c, c) = 1.0;
    return v;
  }

 private:
  Index n_;
  Index dim_a_ = 1;
  Index dim_b_ = 1;
  Index dim_c_ = 1;
  Index dim_f_ = 1;
  CMatrix psi_;  // (ab) x c
};

ExtensionCertificate make_certificate(const DensityOperator& omega, const CMatrix& abe, Index dim_e,
                                      CertificateSource source) {
  const auto& subs = omega.layout().subsystems();
  const std::string label_e = fresh_label(omega.layout(), "E");
  ExtensionCertificate cert{DensityOperator::from_factors({subs[0], subs[1], {label_e, dim_e}}, abe),
                            subs[0].label,
                            subs[1].label,
                            label_e,
                            0.0,
                            std::nullopt,
                            source};
  cert.cmi_value = cmi(cert.extension, {cert.label_a}, {cert.label_b}, {cert.label_e});
  return cert;
}

}  // namespace

StiefelObjective squash_objective(const DensityOperator& omega, Index n) {
  detail::require_normalized_bipartite(omega, "squash_objective");
  if (n < 2) throw InvalidArgument("squash_objective: n must be >= 2");
  auto problem = std::make_shared<const SquashProblem>(omega, n);
  return [problem](const CMatrix& v, CMatrix* grad) { return (*problem)(v, grad); };
}

SquashResult esq_upper(const DensityOperator& omega, Index n, const OptimizerConfig& cfg) {
  detail::require_normalized_bipartite(omega, "esq_upper");
  if (n < 1) throw InvalidArgument("esq_upper: squash dimension n must be >= 1");
  cfg.validate();
  const auto& subs = omega.layout().subsystems();
  const double mi = mutual_information(omega, {subs[0].label}, {subs[1].label});

  if (n == 1) {
    ExtensionCertificate cert = make_certificate(omega, omega.matrix(), 1, CertificateSource::trivial);
    const double value = 0.5 * cert.cmi_value;
    return SquashResult{value, std::move(cert), true, 0, {value}, {}};
  }

  const SquashProblem problem(omega, n);
  const StiefelObjective objective = [&problem](const CMatrix& v, CMatrix* grad) { return problem(v, grad); };
  const StiefelInitializer init = [&problem](int restart, std::mt19937_64& rng) -> CMatrix {
    if (restart == 0) return problem.trivial_channel();
    if (restart == 1) return problem.diagonal_channel();
    return linalg::haar_isometry(problem.rows(), problem.dim_c(), rng);
  };
  MultiStartResult run = multistart_minimize(objective, init, cfg);

  SquashResult out{0.0,
                   make_certificate(omega, problem.extension(run.best.point), n, CertificateSource::optimizer),
                   run.best.converged,
                   run.best_restart,
                   std::move(run.restart_values),
                   std::move(run.trace)};
  out.certificate.channel = SquashingChannel{run.best.point, problem.dim_c(), problem.dim_e(), problem.dim_f()};
  out.value = 0.5 * out.certificate.cmi_value;
  for (double& v : out.restart_values) v = std::max(0.0, v);

  // bounded-dimension extensions cannot squash more than 4 log n
  if (out.certificate.cmi_value < mi - 4.0 * std::log(static_cast<double>(n)) - 1e-9)
    throw InvariantViolation("esq_upper: certificate violates the I(A:B) - 4 log n lower bound");
  if (out.value > 0.5 * mi + cfg.value_tolerance + 1e-9)
    throw InvariantViolation("esq_upper: result exceeds the trivial extension value");
  return out;
}

std::vector<SequenceEntry> esq_sequence(const DensityOperator& omega, Index n_max, const OptimizerConfig& cfg) {
  if (n_max < 1) throw InvalidArgument("esq_sequence: n_max must be >= 1");
  std::vector<SequenceEntry> out;
  double running = kInfinity;
  for (Index n = 1; n <= n_max; ++n) {
    const double raw = esq_upper(omega, n, cfg).value;
    running = std::min(running, raw);
    out.push_back({n, running, raw});
  }
  return out;
}

double esq_lower(const DensityOperator& omega) {
  detail::require_normalized_bipartite(omega, "esq_lower");
  const auto& subs = omega.layout().subsystems();
  const double mi = mutual_information(omega, {subs[0].label}, {subs[1].label});
  return std::max(0.0, 0.5 * mi - entropy(omega));
}

ExtensionCertificate markov_certificate(const std::vector<ProductTerm>& decomposition) {
  if (decomposition.empty()) throw InvalidArgument("markov_certificate: empty decomposition");
  const SystemLayout& layout_a = decomposition.front().rho.layout();
  const SystemLayout& layout_b = decomposition.front().sigma.layout();
  if (layout_a.size() != 1 || layout_b.size() != 1)
    throw InvalidArgument("markov_certificate: terms must act on single subsystems A and B");
  double total = 0.0;
  for (const auto& term : decomposition) {
    if (!(term.probability >= 0.0)) throw InvalidArgument("markov_certificate: negative probability");
    if (!(term.rho.layout() == layout_a) || !(term.sigma.layout() == layout_b))
      throw InvalidArgument("markov_certificate: inconsistent term layouts");
    if (std::abs(term.rho.weight() - 1.0) > 1e-10 || std::abs(term.sigma.weight() - 1.0) > 1e-10)
      throw InvalidArgument("markov_certificate: term states must be normalized");
    total += term.probability;
  }
  if (std::abs(total - 1.0) > 1e-10) throw InvalidArgument("markov_certificate: probabilities must sum to 1");

  const Subsystem a = layout_a.subsystems()[0];
  const Subsystem b = layout_b.subsystems()[0];
  if (a.label == b.label) throw InvalidArgument("markov_certificate: A and B share a label");
  const SystemLayout ab({a, b});
  const std::string label_e = fresh_label(ab, "E");
  const Index k = static_cast<Index>(decomposition.size());
  CMatrix abe = CMatrix::Zero(a.dim * b.dim * k, a.dim * b.dim * k);
  for (Index i = 0; i < k; ++i) {
    const auto& term = decomposition[static_cast<std::size_t>(i)];
    CMatrix flag = CMatrix::Zero(k, k);
    flag(i, i) = 1.0;
    abe += term.probability * linalg::kron(linalg::kron(term.rho.matrix(), term.sigma.matrix()), flag);
  }
  ExtensionCertificate cert{DensityOperator::from_factors({a, b, {label_e, k}}, abe),
                            a.label,
                            b.label,
                            label_e,
                            0.0,
                            std::nullopt,
                            CertificateSource::analytic_markov};
  cert.cmi_value = cmi(cert.extension, {a.label}, {b.label}, {label_e});
  if (cert.cmi_value > 1e-9)
    throw InvariantViolation("markov_certificate: extension is not a Markov chain (CMI " +
                             std::to_string(cert.cmi_value) + ")");
  return cert;
}

std::vector<LadderStep> universal_extension_estimate(const DensityOperator& omega,
                                                     const std::vector<LocalProjector>& ladder_a,
                                                     const std::vector<LocalProjector>& ladder_b, Index n,
                                                     const OptimizerConfig& cfg) {
  detail::require_normalized_bipartite(omega, "universal_extension_estimate");
  if (ladder_a.size() != ladder_b.size() || ladder_a.empty())
    throw InvalidArgument("universal_extension_estimate: ladders must be nonempty and of equal length");
  const auto& subs = omega.layout().subsystems();
  for (std::size_t k = 0; k < ladder_a.size(); ++k) {
    if (ladder_a[k].target() != subs[0].label || ladder_b[k].target() != subs[1].label)
      throw InvalidArgument("universal_extension_estimate: ladder targets must be the two subsystems");
    if (k > 0) {
      for (const auto* ladder : {&ladder_a, &ladder_b}) {
        const CMatrix& prev = (*ladder)[k - 1].matrix();
        if (linalg::max_abs((*ladder)[k].matrix() * prev - prev) > 1e-10)
          throw InvalidArgument("universal_extension_estimate: ladder is not increasing");
      }
    }
  }
  std::vector<LadderStep> out;
  double sup = 0.0;
  for (std::size_t k = 0; k < ladder_a.size(); ++k) {
    LadderStep step{k, 0.0, 0.0, 0.0};
    const CMatrix pa = ladder_a[k].matrix();
    const CMatrix pb = ladder_b[k].matrix();
    const CMatrix p = linalg::kron(pa, pb);
    step.trace = (p * omega.matrix() * p).trace().real();
    if (step.trace > kRankThreshold) {
      const DensityOperator compressed = compress(omega, {ladder_a[k], ladder_b[k]}, false);
      step.value = compressed.weight() * esq_upper(compressed.normalized(), n, cfg).value;
    }
    sup = std::max(sup, step.value);
    step.running_sup = sup;
    out.push_back(step);
  }
  return out;
}

SandwichReport bounds_sandwich(const DensityOperator& omega, Index n, const OptimizerConfig& cfg) {
  detail::require_normalized_bipartite(omega, "bounds_sandwich");
  const auto& subs = omega.layout().subsystems();
  SandwichReport report;
  report.lower = esq_lower(omega);
  report.upper_trivial = 0.5 * mutual_information(omega, {subs[0].label}, {subs[1].label});
  const SquashResult sq = esq_upper(omega, n, cfg);
  report.upper_optimized = sq.value;
  const FormationResult ef = eof_upper(omega, 0, cfg);
  report.upper_formation = ef.value;
  report.converged = sq.converged && ef.converged;
  const double least_upper = std::min({report.upper_trivial, report.upper_optimized, report.upper_formation});
  if (report.lower > least_upper + 1e-6)
    throw InvariantViolation("bounds_sandwich: lower bound exceeds an upper bound");
  return report;
}

}  // namespace sqent
