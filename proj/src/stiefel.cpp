#include "sqent/stiefel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "sqent/linalg.hpp"

namespace sqent {
namespace {

double inner(const CMatrix& x, const CMatrix& y) { return (x.adjoint() * y).trace().real(); }

// Projection of a Euclidean gradient onto the tangent space at V.
CMatrix riemannian_gradient(const CMatrix& v, const CMatrix& g) {
  const CMatrix vg = v.adjoint() * g;
  return g - v * (0.5 * (vg + vg.adjoint()));
}

double evaluate(const StiefelObjective& f, const CMatrix& v, CMatrix* grad, const OptimizerConfig& cfg) {
  if (grad == nullptr || cfg.gradient == GradientMode::analytic) return f(v, grad);
  *grad = finite_difference_gradient(f, v, cfg.fd_step);
  return f(v, nullptr);
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1) throw InvalidArgument("optimizer.restarts must be >= 1");
  if (max_iterations < 0) throw InvalidArgument("optimizer.max_iterations must be >= 0");
  if (!(step_tolerance > 0.0)) throw InvalidArgument("optimizer.step_tolerance must be > 0");
  if (!(value_tolerance >= 0.0)) throw InvalidArgument("optimizer.value_tolerance must be >= 0");
  if (!(fd_step > 0.0)) throw InvalidArgument("optimizer.fd_step must be > 0");
  if (threads < 1) throw InvalidArgument("optimizer.threads must be >= 1");
}

CMatrix finite_difference_gradient(const StiefelObjective& f, const CMatrix& point, double step) {
  CMatrix grad(point.rows(), point.cols());
  CMatrix probe = point;
  for (Index j = 0; j < point.cols(); ++j) {
    for (Index i = 0; i < point.rows(); ++i) {
      const cplx orig = point(i, j);
      probe(i, j) = orig + cplx{step, 0.0};
      const double re_plus = f(probe, nullptr);
      probe(i, j) = orig - cplx{step, 0.0};
      const double re_minus = f(probe, nullptr);
      probe(i, j) = orig + cplx{0.0, step};
      const double im_plus = f(probe, nullptr);
      probe(i, j) = orig - cplx{0.0, step};
      const double im_minus = f(probe, nullptr);
      probe(i, j) = orig;
      grad(i, j) = cplx{(re_plus - re_minus) / (2.0 * step), (im_plus - im_minus) / (2.0 * step)};
    }
  }
  return grad;
}

LocalSearch minimize_on_stiefel(const StiefelObjective& f, CMatrix start, const OptimizerConfig& cfg,
                                std::vector<double>* trace) {
  LocalSearch out;
  CMatrix v = linalg::polar_isometry(start);
  CMatrix g;
  double value = evaluate(f, v, &g, cfg);
  CMatrix xi = riemannian_gradient(v, g);
  if (trace) trace->push_back(value);

  double step = 1.0;
  int quiet = 0;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const double gnorm2 = inner(xi, xi);
    if (std::sqrt(gnorm2) < cfg.step_tolerance) {
      out.converged = true;
      break;
    }
    double t = step;
    CMatrix candidate;
    double cand_value = value;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      candidate = linalg::polar_isometry(v - t * xi);
      cand_value = f(candidate, nullptr);
      if (cand_value <= value - 1e-4 * t * gnorm2) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // no descent left at working precision
      out.converged = true;
      break;
    }
    CMatrix g_new;
    cand_value = evaluate(f, candidate, &g_new, cfg);
    const CMatrix xi_new = riemannian_gradient(candidate, g_new);

    const CMatrix s = candidate - v;
    const CMatrix y = xi_new - xi;
    const double sy = inner(s, y);
    step = sy > 0.0 ? inner(s, s) / sy : 2.0 * t;
    step = std::clamp(step, 1e-8, 1e4);

    const double decrease = value - cand_value;
    v = std::move(candidate);
    xi = xi_new;
    value = cand_value;
    if (trace) trace->push_back(value);

    if (decrease <= cfg.value_tolerance * std::max(1.0, std::abs(value))) {
      if (++quiet >= 5) {
        out.converged = true;
        ++it;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  out.point = std::move(v);
  out.value = value;
  out.iterations = it;
  return out;
}

MultiStartResult multistart_minimize(const StiefelObjective& f, const StiefelInitializer& init,
                                     const OptimizerConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.restarts);
  std::vector<LocalSearch> results(n);
  std::vector<std::vector<double>> traces(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t r = next++; r < n; r = next++) {
      try {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        CMatrix start = init(static_cast<int>(r), rng);
        results[r] = minimize_on_stiefel(f, std::move(start), cfg, cfg.record_trace ? &traces[r] : nullptr);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  MultiStartResult out;
  out.restart_values.reserve(n);
  std::size_t best = 0;
  for (std::size_t r = 0; r < n; ++r) {
    out.restart_values.push_back(results[r].value);
    out.any_converged = out.any_converged || results[r].converged;
    if (results[r].value < results[best].value) best = r;
  }
  out.best_restart = static_cast<int>(best);
  out.best = std::move(results[best]);
  if (cfg.record_trace) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < traces[r].size(); ++k)
        out.trace.push_back({static_cast<int>(r), static_cast<int>(k), traces[r][k]});
  }
  return out;
}

}  // namespace sqent
