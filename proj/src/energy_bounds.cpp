#include "sqent/energy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sqent/entropic.hpp"
#include "sqent/linalg.hpp"
#include "sqent/state_io.hpp"

namespace sqent {
namespace {

constexpr double kBetaMin = 1e-8;
constexpr double kBetaMax = 1e8;

void require_beta(double beta) {
  if (!(beta > 0.0) || std::isinf(beta)) throw InvalidArgument("inverse temperature must be positive and finite");
}

// (1+x) h₂(x/(1+x)) with x = ε'
double binary_term(double eps_prime) { return theta(eps_prime); }

}  // namespace

HamiltonianSpectrum HamiltonianSpectrum::from_levels(std::vector<double> levels, std::optional<std::string> model) {
  if (levels.empty()) throw InvalidArgument("spectrum: no levels");
  if (levels.front() != 0.0) throw InvalidArgument("spectrum: ground level must be 0");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) throw InvalidArgument("spectrum: levels must be finite");
    if (i > 0 && levels[i] < levels[i - 1]) throw InvalidArgument("spectrum: levels must be nondecreasing");
  }
  HamiltonianSpectrum s;
  s.levels_ = std::move(levels);
  s.model_ = std::move(model);
  return s;
}

HamiltonianSpectrum HamiltonianSpectrum::oscillator(Index d) {
  if (d < 1) throw InvalidArgument("oscillator: dimension must be >= 1");
  std::vector<double> levels(static_cast<std::size_t>(d));
  std::iota(levels.begin(), levels.end(), 0.0);
  return from_levels(std::move(levels), "oscillator");
}

HamiltonianSpectrum HamiltonianSpectrum::oscillator_ladder() {
  HamiltonianSpectrum s;
  s.model_ = "oscillator";
  s.infinite_ = true;
  return s;
}

HamiltonianSpectrum HamiltonianSpectrum::oscillator_for_energy(double e_max, double tail) {
  if (!(e_max > 0.0) || !std::isfinite(e_max)) throw InvalidArgument("oscillator_for_energy: energy must be positive");
  if (!(tail > 0.0 && tail < 1.0)) throw InvalidArgument("oscillator_for_energy: tail must lie in (0, 1)");
  const double beta = std::log1p(1.0 / e_max);
  const auto d = static_cast<Index>(std::ceil(-std::log(tail) / beta));
  return oscillator(std::max<Index>(d, 2));
}

const std::vector<double>& HamiltonianSpectrum::levels() const {
  if (infinite_) throw InvalidArgument("spectrum: the oscillator ladder has no finite level list");
  return levels_;
}

Index HamiltonianSpectrum::dim() const { return static_cast<Index>(levels().size()); }

HamiltonianSpectrum HamiltonianSpectrum::untruncated() const {
  if (model_ && *model_ == "oscillator") return oscillator_ladder();
  return *this;
}

double HamiltonianSpectrum::tail_estimate(double beta) const {
  require_beta(beta);
  if (infinite_ || !(model_ && *model_ == "oscillator")) return 0.0;
  return std::exp(-beta * static_cast<double>(levels_.size()));
}

double partition_function(const HamiltonianSpectrum& spec, double beta) {
  require_beta(beta);
  if (spec.infinite()) return -1.0 / std::expm1(-beta);
  double z = 0.0;
  for (double e : spec.levels()) z += std::exp(-beta * e);
  return z;
}

double mean_energy(const HamiltonianSpectrum& spec, double beta) {
  require_beta(beta);
  if (spec.infinite()) return 1.0 / std::expm1(beta);
  double z = 0.0;
  double acc = 0.0;
  for (double e : spec.levels()) {
    const double w = std::exp(-beta * e);
    z += w;
    acc += e * w;
  }
  return acc / z;
}

double solve_beta(const HamiltonianSpectrum& spec, double energy) {
  if (!(energy > 0.0) || !std::isfinite(energy)) throw InvalidArgument("solve_beta: energy must be positive and finite");
  if (spec.infinite()) return std::log1p(1.0 / energy);
  const double top = mean_energy(spec, kBetaMin);
  const double bottom = mean_energy(spec, kBetaMax);
  if (!(energy < top && energy > bottom))
    throw InvalidArgument("solve_beta: energy " + std::to_string(energy) + " is not attainable (range (" +
                          std::to_string(bottom) + ", " + std::to_string(top) + "))");
  double lo = std::log(kBetaMin);
  double hi = std::log(kBetaMax);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mean_energy(spec, std::exp(mid)) > energy)
      lo = mid;
    else
      hi = mid;
  }
  const double beta_lo = std::exp(lo);
  const double beta_hi = std::exp(hi);
  const double err_lo = std::abs(mean_energy(spec, beta_lo) - energy);
  const double err_hi = std::abs(mean_energy(spec, beta_hi) - energy);
  const double beta = err_lo <= err_hi ? beta_lo : beta_hi;
  if (std::min(err_lo, err_hi) > 1e-10 * std::max(1.0, energy))
    throw InvariantViolation("solve_beta: bisection did not reach the energy tolerance");
  return beta;
}

std::vector<double> gibbs_probabilities(const HamiltonianSpectrum& spec, double energy) {
  const double beta = solve_beta(spec, energy);
  const auto& levels = spec.levels();
  std::vector<double> p(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) p[i] = std::exp(-beta * levels[i]);
  const double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= z;
  return p;
}

DensityOperator gibbs_state(const HamiltonianSpectrum& spec, double energy, const std::string& label) {
  const auto p = gibbs_probabilities(spec, energy);
  const Index d = static_cast<Index>(p.size());
  CMatrix m = CMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) m(i, i) = p[static_cast<std::size_t>(i)];
  return DensityOperator(SystemLayout({{label, d}}), m);
}

double gibbs_entropy(const HamiltonianSpectrum& spec, double energy) {
  if (spec.infinite()) {
    const double beta = solve_beta(spec, energy);
    return beta * energy - std::log(-std::expm1(-beta));
  }
  // at or above the infinite-temperature mean the maximizer is the maximally mixed state
  const auto& levels = spec.levels();
  if (energy >= std::accumulate(levels.begin(), levels.end(), 0.0) / static_cast<double>(levels.size()))
    return std::log(static_cast<double>(spec.dim()));
  return entropy(gibbs_state(spec, energy));
}

double energy_expectation(const HamiltonianSpectrum& spec, const DensityOperator& rho) {
  if (rho.layout().size() != 1 || rho.dim() != spec.dim())
    throw InvalidArgument("energy_expectation: state must live on a single system of the spectrum's dimension");
  double e = 0.0;
  for (Index i = 0; i < rho.dim(); ++i) e += spec.levels()[static_cast<std::size_t>(i)] * rho.matrix()(i, i).real();
  return e;
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : report.terms) terms.push_back({{"name", t.name}, {"value", json_number(t.value)}});
  return {{"bound", report.bound},
          {"convention", report.convention},
          {"eps", json_number(report.eps)},
          {"eps_prime", json_number(report.eps_prime)},
          {"delta", json_number(report.delta)},
          {"energy", json_number(report.energy)},
          {"terms", terms},
          {"total", json_number(report.total)}};
}

BoundReport cmi_continuity_bound(const HamiltonianSpectrum& spec, double energy, double eps, double eps_prime) {
  if (!(eps >= 0.0 && eps < eps_prime && eps_prime <= 1.0))
    throw InvalidArgument("cmi bound: requires 0 <= eps < eps' <= 1");
  const double delta = (eps_prime - eps) / (1.0 + eps_prime);
  BoundReport r{"cmi", "half-trace", eps, eps_prime, delta, energy, {}, 0.0};
  r.terms.push_back({"entropy", (2.0 * eps_prime + 4.0 * delta) * gibbs_entropy(spec, energy / delta)});
  r.terms.push_back({"binary", 4.0 * binary_term(eps_prime)});
  r.terms.push_back({"delta", 4.0 * binary_entropy(delta)});
  for (const auto& t : r.terms) r.total += t.value;
  return r;
}

BoundReport em_continuity_bound(const HamiltonianSpectrum& spec, double energy, double eps, double eps_prime) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("em bound: requires 0 <= eps < 1");
  const double root = std::sqrt(eps);
  if (!(eps_prime > root && eps_prime <= 1.0)) throw InvalidArgument("em bound: requires sqrt(eps) < eps' <= 1");
  const double delta = (eps_prime - root) / (1.0 + eps_prime);
  BoundReport r{"em", "trace", eps, eps_prime, delta, energy, {}, 0.0};
  r.terms.push_back({"entropy", (eps_prime + 2.0 * delta) * gibbs_entropy(spec, energy / delta)});
  r.terms.push_back({"binary", 2.0 * binary_term(eps_prime)});
  r.terms.push_back({"delta", 2.0 * binary_entropy(delta)});
  for (const auto& t : r.terms) r.total += t.value;
  return r;
}

double finite_dim_esq_bound(Index dim_a, double eps) {
  if (dim_a < 2) throw InvalidArgument("finite-dim bound: d_A must be >= 2");
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("finite-dim bound: requires 0 <= eps < 1");
  const double root = std::sqrt(eps);
  return root * std::log(static_cast<double>(dim_a)) + 2.0 * theta(root);
}

double fannes_cmi_bound(Index d, double eps_prime) {
  if (d < 1) throw InvalidArgument("fannes bound: d must be >= 1");
  if (!(eps_prime >= 0.0 && eps_prime <= 1.0)) throw InvalidArgument("fannes bound: requires 0 <= eps' <= 1");
  return 2.0 * eps_prime * std::log(static_cast<double>(d)) + 4.0 * theta(eps_prime);
}

double regularized_bound(const HamiltonianSpectrum& spec, double energy, double eps, Index n, double eps_prime) {
  if (n < 1) throw InvalidArgument("regularized bound: n must be >= 1");
  const BoundReport single = em_continuity_bound(spec, energy, eps, eps_prime);
  const double nd = static_cast<double>(n);
  return (nd * single.terms[0].value + single.terms[1].value + single.terms[2].value) / nd;
}

TightnessWitness tightness_witness(const HamiltonianSpectrum& spec, double energy, double eps, Index dim_b,
                                   Index dim_c, std::optional<double> eps_prime) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("tightness witness: requires 0 <= eps < 1");
  if (dim_b < 2) throw InvalidArgument("tightness witness: dim B must be >= 2");
  const Index d = spec.dim();
  if (dim_c < d) throw InvalidArgument("tightness witness: dim C must be >= " + std::to_string(d));

  const auto p = gibbs_probabilities(spec, energy);
  CMatrix gamma = CMatrix::Zero(d, d);
  CVector phi = CVector::Zero(d * dim_c);
  for (Index n = 0; n < d; ++n) {
    gamma(n, n) = p[static_cast<std::size_t>(n)];
    phi(n * dim_c + n) = std::sqrt(p[static_cast<std::size_t>(n)]);
  }
  CMatrix tau_b = CMatrix::Zero(dim_b, dim_b);
  tau_b(0, 0) = 1.0;
  CMatrix tau_b_perp = CMatrix::Zero(dim_b, dim_b);
  tau_b_perp(1, 1) = 1.0;
  CMatrix tau_c = CMatrix::Zero(dim_c, dim_c);
  tau_c(0, 0) = 1.0;

  const std::vector<Subsystem> abc{{"A", d}, {"B", dim_b}, {"C", dim_c}};
  const std::vector<Subsystem> acb{{"A", d}, {"C", dim_c}, {"B", dim_b}};
  const CMatrix rho_m = linalg::kron(linalg::kron(gamma, tau_b), tau_c);
  const DensityOperator rho = DensityOperator::from_factors(abc, rho_m);
  const DensityOperator flagged = DensityOperator::from_factors(acb, linalg::kron(CMatrix(phi * phi.adjoint()), tau_b_perp));
  const DensityOperator sigma(rho.layout(), (1.0 - eps) * rho.matrix() + eps * flagged.matrix());

  TightnessWitness w{rho, sigma, 0.0, 0.0, 0.0, std::nullopt};
  w.gap = cmi(sigma, {"A"}, {"C"}, {"B"}) - cmi(rho, {"A"}, {"C"}, {"B"});
  w.half_trace_distance = 0.5 * trace_distance(rho, sigma);
  w.gibbs_entropy = entropy_of_spectrum(std::span<const double>(p));
  if (std::abs(w.gap - 2.0 * eps * w.gibbs_entropy) > 1e-8)
    throw InvariantViolation("tightness witness: gap differs from 2 eps H(gamma)");
  if (w.half_trace_distance > eps + 1e-10)
    throw InvariantViolation("tightness witness: states are farther apart than eps");
  if (eps_prime || eps > 0.0)
    w.bound = cmi_continuity_bound(spec.untruncated(), energy, eps, eps_prime.value_or(std::min(1.0, 2.0 * eps)));
  return w;
}

LocalProjector energy_truncation_projector(const HamiltonianSpectrum& spec, double cutoff, const std::string& label) {
  if (!(cutoff >= 0.0)) throw InvalidArgument("energy projector: cutoff must be >= 0");
  std::vector<Index> kept;
  const auto& levels = spec.levels();
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] <= cutoff) kept.push_back(static_cast<Index>(i));
  return LocalProjector::basis(label, spec.dim(), kept);
}

}  // namespace sqent
