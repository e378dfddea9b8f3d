#include "sqent/truncation_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "sqent/entropic.hpp"
#include "sqent/formation.hpp"
#include "sqent/linalg.hpp"
#include "sqent/state_io.hpp"

namespace sqent {

std::string to_string(Family family) {
  switch (family) {
    case Family::tmsv: return "tmsv";
    case Family::classical_correlated: return "classical-correlated";
    case Family::werner: return "werner";
    case Family::isotropic: return "isotropic";
    case Family::bell: return "bell";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::tmsv, Family::classical_correlated, Family::werner, Family::isotropic, Family::bell})
    if (to_string(f) == name) return f;
  throw InvalidArgument("unknown state family '" + name + "'");
}

ModelStateSpec ModelStateSpec::tmsv(double lambda, Index d) { return {Family::tmsv, lambda, d}; }
ModelStateSpec ModelStateSpec::classical_correlated(Index d, double tail_exponent) {
  return {Family::classical_correlated, tail_exponent, d};
}
ModelStateSpec ModelStateSpec::werner(double p) { return {Family::werner, p, 2}; }
ModelStateSpec ModelStateSpec::isotropic(double p) { return {Family::isotropic, p, 2}; }
ModelStateSpec ModelStateSpec::bell() { return {Family::bell, 0.0, 2}; }

void ModelStateSpec::validate() const {
  switch (family) {
    case Family::tmsv:
      if (!(parameter > 0.0 && parameter < 1.0)) throw InvalidArgument("tmsv: lambda must lie in (0, 1)");
      if (dim < 2) throw InvalidArgument("tmsv: truncation dimension must be >= 2");
      break;
    case Family::classical_correlated:
      if (!(parameter > 1.0) || !std::isfinite(parameter))
        throw InvalidArgument("classical-correlated: tail exponent must be > 1");
      if (dim < 2) throw InvalidArgument("classical-correlated: d must be >= 2");
      break;
    case Family::werner:
    case Family::isotropic:
      if (!(parameter >= 0.0 && parameter <= 1.0)) throw InvalidArgument(to_string(family) + ": p must lie in [0, 1]");
      [[fallthrough]];
    case Family::bell:
      if (dim != 2) throw InvalidArgument(to_string(family) + ": two-qubit family has dimension 2");
      break;
  }
}

nlohmann::json to_json(const ModelStateSpec& spec) {
  return {{"family", to_string(spec.family)}, {"parameter", json_number(spec.parameter)}, {"dim", spec.dim}};
}

namespace {

std::vector<double> classical_weights(const ModelStateSpec& spec) {
  std::vector<double> pi(static_cast<std::size_t>(spec.dim));
  for (std::size_t k = 0; k < pi.size(); ++k) {
    const double kk = static_cast<double>(k);
    pi[k] = 1.0 / ((kk + 1.0) * std::pow(std::log(kk + 2.0), spec.parameter));
  }
  const double z = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& x : pi) x /= z;
  return pi;
}

DensityOperator diagonal_state(const std::string& label, Index dim, Index level) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(level, level) = 1.0;
  return DensityOperator(SystemLayout({{label, dim}}), m);
}

// Diagonal states Σ π_k |kk⟩⟨kk| only.
std::optional<std::vector<ProductTerm>> diagonal_classical_terms(const DensityOperator& omega) {
  const CMatrix& m = omega.matrix();
  if (linalg::max_abs(CMatrix(m.diagonal().asDiagonal()) - m) > 0.0) return std::nullopt;
  const auto dims = omega.layout().dims();
  const auto& subs = omega.layout().subsystems();
  std::vector<ProductTerm> terms;
  const double w = omega.weight();
  for (Index a = 0; a < dims[0]; ++a)
    for (Index b = 0; b < dims[1]; ++b) {
      const double p = m(a * dims[1] + b, a * dims[1] + b).real() / w;
      if (p <= 0.0) continue;
      terms.push_back({p, diagonal_state(subs[0].label, dims[0], a), diagonal_state(subs[1].label, dims[1], b)});
    }
  double total = 0.0;
  for (const auto& t : terms) total += t.probability;
  for (auto& t : terms) t.probability /= total;
  return terms;
}

ConvergenceRow measure_row(const DensityOperator& omega, Index rank, Index n, const OptimizerConfig& cfg) {
  const Index d = omega.layout().dims()[0];
  ConvergenceRow row;
  row.rank = rank;
  const DensityOperator compressed =
      compress(omega, {LocalProjector::leading("A", d, rank), LocalProjector::leading("B", d, rank)}, false);
  row.trace = compressed.weight();
  row.certificate = to_string(CertificateSource::trivial);
  if (rank == 1 || row.trace <= kRankThreshold) return row;
  const DensityOperator state = compressed.normalized();
  const double t = row.trace;

  row.mutual_information = t * mutual_information(state, {"A"}, {"B"});
  row.esq_lower = t * esq_lower(state);

  const SquashResult sq = esq_upper(state, n, cfg);
  const FormationResult ef = eof_upper(state, 0, cfg);
  row.converged = sq.converged && ef.converged;
  row.eof_upper = t * ef.value;
  double best = sq.value;
  row.certificate = to_string(sq.certificate.source);
  const double formation = 0.5 * classical_extension(ef.decomposition).cmi_value;
  if (formation < best) {
    best = formation;
    row.certificate = to_string(CertificateSource::formation_extension);
  }
  if (const auto terms = diagonal_classical_terms(state)) {
    const double markov = 0.5 * markov_certificate(*terms).cmi_value;
    if (markov <= best) {
      best = markov;
      row.certificate = to_string(CertificateSource::analytic_markov);
    }
  }
  row.esq_upper = t * best;

  if (row.esq_lower > row.esq_upper + 1e-6 ||
      row.esq_upper > std::min(0.5 * row.mutual_information, row.eof_upper) + 1e-6)
    throw InvariantViolation("convergence_run: sandwich violated at rank " + std::to_string(rank));
  return row;
}

}  // namespace

DensityOperator build_state(const ModelStateSpec& spec) {
  spec.validate();
  const Index d = spec.dim;
  const SystemLayout layout({{"A", d}, {"B", d}});
  CMatrix m = CMatrix::Zero(d * d, d * d);
  switch (spec.family) {
    case Family::tmsv: {
      CVector psi = CVector::Zero(d * d);
      for (Index k = 0; k < d; ++k) psi(k * d + k) = std::pow(spec.parameter, 0.5 * static_cast<double>(k));
      psi.normalize();
      m = psi * psi.adjoint();
      break;
    }
    case Family::classical_correlated: {
      const auto pi = classical_weights(spec);
      for (Index k = 0; k < d; ++k) m(k * d + k, k * d + k) = pi[static_cast<std::size_t>(k)];
      break;
    }
    case Family::werner:
    case Family::isotropic:
    case Family::bell: {
      const double s = 1.0 / std::sqrt(2.0);
      CVector psi = CVector::Zero(4);
      if (spec.family == Family::werner) {
        psi(1) = s;
        psi(2) = -s;
      } else {
        psi(0) = s;
        psi(3) = s;
      }
      const double p = spec.family == Family::bell ? 1.0 : spec.parameter;
      m = p * psi * psi.adjoint() + (1.0 - p) * 0.25 * CMatrix::Identity(4, 4);
      break;
    }
  }
  return DensityOperator(layout, m);
}

std::vector<ProductTerm> classical_decomposition(const ModelStateSpec& spec) {
  spec.validate();
  if (spec.family != Family::classical_correlated)
    throw InvalidArgument("classical_decomposition: requires the classical-correlated family");
  const auto pi = classical_weights(spec);
  std::vector<ProductTerm> terms;
  for (Index k = 0; k < spec.dim; ++k)
    terms.push_back({pi[static_cast<std::size_t>(k)], diagonal_state("A", spec.dim, k), diagonal_state("B", spec.dim, k)});
  return terms;
}

std::vector<ConvergenceRow> convergence_run(const ModelStateSpec& spec, const std::vector<Index>& ranks, Index n,
                                            const OptimizerConfig& cfg) {
  cfg.validate();
  if (ranks.empty()) throw InvalidArgument("convergence_run: empty ladder");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] < 1 || ranks[i] > spec.dim)
      throw InvalidArgument("convergence_run: ladder ranks must lie in [1, " + std::to_string(spec.dim) + "]");
    if (i > 0 && ranks[i] <= ranks[i - 1]) throw InvalidArgument("convergence_run: ladder ranks must increase");
  }
  const DensityOperator omega = build_state(spec);

  std::vector<ConvergenceRow> rows(ranks.size());
  std::vector<std::exception_ptr> errors(ranks.size());
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), ranks.size());
  OptimizerConfig inner = cfg;
  if (workers > 1) inner.threads = 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ranks.size(); i = next++) {
      try {
        rows[i] = measure_row(omega, ranks[i], n, inner);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].trace < rows[i - 1].trace - 1e-12)
      throw InvariantViolation("convergence_run: compressed traces decrease along the ladder");
  return rows;
}

std::vector<DichotomyRow> dichotomy_probe(const ModelStateSpec& spec, const std::vector<Index>& ns) {
  spec.validate();
  if (spec.family != Family::classical_correlated)
    throw InvalidArgument("dichotomy_probe: requires the classical-correlated family");
  const DensityOperator omega = build_state(spec);
  const double mi = mutual_information(omega, {"A"}, {"B"});
  const auto pi = classical_weights(spec);
  const Index d = spec.dim;

  std::vector<DichotomyRow> rows;
  for (Index n : ns) {
    if (n < 1) throw InvalidArgument("dichotomy_probe: n must be >= 1");
    DichotomyRow row{n, mi, std::max(0.0, 0.5 * (mi - 4.0 * std::log(static_cast<double>(n)))), 0.0, ""};
    if (n >= d) {
      row.certified_upper = 0.5 * markov_certificate(classical_decomposition(spec)).cmi_value;
      row.certificate = to_string(CertificateSource::analytic_markov);
    } else {
      // balance the group masses: I(A:B|G) = H(π) - H(G)
      std::vector<Index> order(static_cast<std::size_t>(d));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
        return pi[static_cast<std::size_t>(x)] > pi[static_cast<std::size_t>(y)];
      });
      std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
      std::vector<Index> group(static_cast<std::size_t>(d));
      for (Index k : order) {
        const auto g = static_cast<std::size_t>(std::min_element(mass.begin(), mass.end()) - mass.begin());
        mass[g] += pi[static_cast<std::size_t>(k)];
        group[static_cast<std::size_t>(k)] = static_cast<Index>(g);
      }
      CMatrix abe = CMatrix::Zero(d * d * n, d * d * n);
      for (Index k = 0; k < d; ++k) {
        const Index i = (k * d + k) * n + group[static_cast<std::size_t>(k)];
        abe(i, i) = pi[static_cast<std::size_t>(k)];
      }
      const DensityOperator ext = DensityOperator::from_factors({{"A", d}, {"B", d}, {"E", n}}, abe);
      row.certified_upper = 0.5 * cmi(ext, {"A"}, {"B"}, {"E"});
      row.certificate = "coarse-grained";
    }
    if (row.lower > row.certified_upper + 1e-9)
      throw InvariantViolation("dichotomy_probe: lower bound exceeds certified upper bound");
    rows.push_back(row);
  }
  return rows;
}

std::string to_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "rank,trace,esq_upper,eof_upper,esq_lower,mutual_information,certificate,converged\n";
  for (const auto& r : rows)
    out << r.rank << ',' << csv_number(r.trace) << ',' << csv_number(r.esq_upper) << ',' << csv_number(r.eof_upper)
        << ',' << csv_number(r.esq_lower) << ',' << csv_number(r.mutual_information) << ',' << r.certificate << ','
        << (r.converged ? "true" : "false") << '\n';
  return out.str();
}

std::string to_csv(const std::vector<DichotomyRow>& rows) {
  std::ostringstream out;
  out << "n,mutual_information,lower,certified_upper,certificate\n";
  for (const auto& r : rows)
    out << r.n << ',' << csv_number(r.mutual_information) << ',' << csv_number(r.lower) << ','
        << csv_number(r.certified_upper) << ',' << r.certificate << '\n';
  return out.str();
}

}  // namespace sqent
