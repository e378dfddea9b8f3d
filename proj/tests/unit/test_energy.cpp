#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sqent/energy_bounds.hpp"
#include "sqent/entropic.hpp"

using namespace sqent;
using namespace testing;

namespace {

double oscillator_entropy(double e) { return (e + 1) * std::log(e + 1) - e * std::log(e); }
double h2(double x) { return x <= 0 || x >= 1 ? 0.0 : -x * std::log(x) - (1 - x) * std::log(1 - x); }

}  // namespace

TEST_CASE("spectrum validation") {
  CHECK_THROWS_AS(HamiltonianSpectrum::from_levels({}), InvalidArgument);
  CHECK_THROWS_AS(HamiltonianSpectrum::from_levels({0.1, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(HamiltonianSpectrum::from_levels({0.0, 2.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(HamiltonianSpectrum::oscillator_ladder().levels(), InvalidArgument);
  CHECK(HamiltonianSpectrum::oscillator(5).untruncated().infinite());
  CHECK_FALSE(HamiltonianSpectrum::from_levels({0.0, 1.0}).untruncated().infinite());
}

TEST_CASE("partition function and mean energy") {
  const auto ground = HamiltonianSpectrum::from_levels({0.0});
  CHECK(partition_function(ground, 1.3) == 1.0);
  CHECK(mean_energy(ground, 1.3) == 0.0);
  const auto osc = HamiltonianSpectrum::oscillator(200);
  CHECK(partition_function(osc, std::log(2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mean_energy(osc, std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean_energy(HamiltonianSpectrum::from_levels({0.0, 1.0}), 1e-9) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(partition_function(osc, 0.0), InvalidArgument);
  CHECK_THROWS_AS(mean_energy(osc, -1.0), InvalidArgument);
}

TEST_CASE("inverse temperature") {
  const auto ladder = HamiltonianSpectrum::oscillator_ladder();
  CHECK(std::abs(solve_beta(ladder, 1.0) - std::log(2.0)) < 1e-9);
  CHECK(std::abs(solve_beta(ladder, 0.1) - std::log(11.0)) < 1e-9);
  for (double e : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const auto osc = HamiltonianSpectrum::oscillator_for_energy(e, 1e-13);
    CHECK(std::abs(solve_beta(osc, e) - std::log1p(1.0 / e)) < 1e-9);
    CHECK(std::abs(gibbs_entropy(osc, e) - oscillator_entropy(e)) < 1e-9);
    CHECK(std::abs(gibbs_entropy(ladder, e) - oscillator_entropy(e)) < 1e-9);
  }
  CHECK_THROWS_AS(solve_beta(HamiltonianSpectrum::from_levels({0.0, 1.0}), 0.5), InvalidArgument);
  CHECK_THROWS_AS(solve_beta(ladder, 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_beta(HamiltonianSpectrum::oscillator(4), 2.0), InvalidArgument);
}

TEST_CASE("gibbs states") {
  const auto osc = HamiltonianSpectrum::oscillator_for_energy(1.0);
  const auto g = gibbs_state(osc, 1.0);
  CHECK(g.layout().labels() == LabelSet{"A"});
  CHECK(energy_expectation(osc, g) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(gibbs_entropy(osc, 1.0) - 2.0 * kLog2) < 1e-6);
  // the truncation's own entropy, tail included
  const auto p = gibbs_probabilities(osc, 1.0);
  double h = 0.0;
  for (double x : p) h -= x * std::log(x);
  CHECK(std::abs(gibbs_entropy(osc, 1.0) - h) < 1e-12);

  const auto twelve = HamiltonianSpectrum::oscillator(12);
  CHECK(gibbs_entropy(twelve, 1.0) < 2.0 * kLog2);
  CHECK(gibbs_entropy(HamiltonianSpectrum::oscillator_ladder(), 1e-6) < 1e-4);
  CHECK(twelve.tail_estimate(std::log(2.0)) == doctest::Approx(std::pow(0.5, 12)));

  // maximality over energy-constrained diagonal states
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double e_max = 1.0;
  int accepted = 0;
  while (accepted < 100) {
    std::vector<double> q(12);
    double z = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = std::pow(u(rng), 1.0 + 4.0 * static_cast<double>(i));
      z += q[i];
    }
    double mean = 0;
    for (std::size_t i = 0; i < q.size(); ++i) mean += static_cast<double>(i) * q[i] / z;
    if (mean > e_max) continue;
    ++accepted;
    double hq = 0;
    for (double x : q) hq += x > 0 ? -(x / z) * std::log(x / z) : 0.0;
    CHECK(hq <= gibbs_entropy(twelve, e_max) + 1e-12);
  }
}

TEST_CASE("cmi continuity bound") {
  const auto ladder = HamiltonianSpectrum::oscillator_ladder();
  const auto r = cmi_continuity_bound(ladder, 1.0, 0.01, 0.2);
  const double delta = (0.2 - 0.01) / 1.2;
  CHECK(r.delta == doctest::Approx(delta));
  CHECK(r.terms.at(0).value == doctest::Approx((0.4 + 4 * delta) * oscillator_entropy(1.0 / delta)).epsilon(1e-10));
  CHECK(r.terms.at(1).value == doctest::Approx(4 * 1.2 * h2(0.2 / 1.2)).epsilon(1e-12));
  CHECK(r.terms.at(2).value == doctest::Approx(4 * h2(delta)).epsilon(1e-12));
  CHECK(std::abs(r.total - (r.terms[0].value + r.terms[1].value + r.terms[2].value)) <= 1e-12);

  const auto edge = cmi_continuity_bound(ladder, 1.0, 0.0, 1.0);
  CHECK(edge.delta == doctest::Approx(0.5));
  CHECK(edge.terms[1].value == doctest::Approx(8 * kLog2));
  CHECK(edge.total == doctest::Approx(4 * oscillator_entropy(2.0) + 8 * kLog2 + 4 * kLog2).epsilon(1e-10));

  const auto tiny = cmi_continuity_bound(ladder, 1.0, 0.2 - 1e-9, 0.2);
  CHECK(std::abs(tiny.total - (tiny.terms[0].value + tiny.terms[1].value + tiny.terms[2].value)) <= 1e-12);

  CHECK_THROWS_AS(cmi_continuity_bound(ladder, 1.0, 0.3, 0.2), InvalidArgument);
  CHECK_THROWS_AS(cmi_continuity_bound(ladder, 1.0, 0.1, 1.1), InvalidArgument);
  const auto saturated = cmi_continuity_bound(HamiltonianSpectrum::oscillator(4), 1.0, 0.19, 0.2);
  CHECK(saturated.terms[0].value == doctest::Approx((0.4 + 4 * saturated.delta) * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("fannes bound is a sub-term of the cmi bound") {
  CHECK(fannes_cmi_bound(7, 0.0) == 0.0);
  CHECK(fannes_cmi_bound(1, 0.3) == doctest::Approx(4 * theta(0.3)));
  CHECK(fannes_cmi_bound(4, 0.1) == doctest::Approx(0.2 * std::log(4.0) + 4 * theta(0.1)));
  const auto r = cmi_continuity_bound(HamiltonianSpectrum::oscillator_ladder(), 1.0, 0.05, 0.3);
  CHECK(r.terms[1].value == doctest::Approx(fannes_cmi_bound(1, 0.3)));
  CHECK_THROWS_AS(fannes_cmi_bound(0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(fannes_cmi_bound(2, 1.5), InvalidArgument);
}

TEST_CASE("em continuity bound") {
  const auto ladder = HamiltonianSpectrum::oscillator_ladder();
  const auto r = em_continuity_bound(ladder, 1.0, 0.0, 1.0);
  CHECK(r.delta == doctest::Approx(0.5));
  CHECK(r.total == doctest::Approx(2 * oscillator_entropy(2.0) + 4 * kLog2 + 2 * kLog2).epsilon(1e-10));
  double prev = kInfinity;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double t = em_continuity_bound(ladder, 1.0, eps, std::min(1.0, 2 * std::sqrt(eps))).total;
    CHECK(t < prev);
    prev = t;
  }
  const auto finite = em_continuity_bound(HamiltonianSpectrum::oscillator(40), 1.0, 0.99, 1.0);
  CHECK(std::isfinite(finite.total));
  CHECK_THROWS_AS(em_continuity_bound(ladder, 1.0, 0.04, 0.2), InvalidArgument);
  CHECK_THROWS_AS(em_continuity_bound(ladder, 1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("finite-dimensional bound") {
  CHECK(finite_dim_esq_bound(2, 0.0) == 0.0);
  CHECK(finite_dim_esq_bound(2, 0.25) == doctest::Approx(0.5 * kLog2 + 3 * h2(1.0 / 3.0)).epsilon(1e-12));
  CHECK(finite_dim_esq_bound(8, 0.25) - finite_dim_esq_bound(4, 0.25) == doctest::Approx(0.5 * kLog2));
  CHECK_THROWS_AS(finite_dim_esq_bound(1, 0.1), InvalidArgument);
  CHECK_THROWS_AS(finite_dim_esq_bound(2, 1.0), InvalidArgument);
}

TEST_CASE("regularized bound") {
  const auto ladder = HamiltonianSpectrum::oscillator_ladder();
  CHECK(regularized_bound(ladder, 1.0, 0.01, 1, 0.3) == doctest::Approx(em_continuity_bound(ladder, 1.0, 0.01, 0.3).total));
  const auto single = em_continuity_bound(ladder, 1.0, 0.01, 0.3);
  CHECK(std::abs(regularized_bound(ladder, 1.0, 0.01, 1000000, 0.3) - single.terms[0].value) < 1e-5);
  double prev = kInfinity;
  for (Index n = 2; n <= 64; ++n) {
    const double nd = static_cast<double>(n);
    const double v = regularized_bound(ladder, 1.0, 1.0 / (nd * nd), n, 2.0 / nd);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 0.5);
  CHECK_THROWS_AS(regularized_bound(ladder, 1.0, 0.01, 0, 0.3), InvalidArgument);
}

TEST_CASE("vanishing delta limit") {
  const auto ladder = HamiltonianSpectrum::oscillator_ladder();
  double prev = kInfinity;
  for (int k = 1; k <= 6; ++k) {
    const double delta = std::pow(10.0, -k);
    const double v = delta * gibbs_entropy(ladder, 1.0 / delta);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("tightness witness") {
  const auto osc12 = HamiltonianSpectrum::oscillator(12);
  const auto zero = tightness_witness(osc12, 1.0, 0.0, 2, 12);
  CHECK(zero.gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(zero.bound);

  const auto w = tightness_witness(osc12, 1.0, 0.1, 2, 12);
  CHECK(std::abs(w.gap - 0.2 * gibbs_entropy(osc12, 1.0)) < 1e-8);
  // truncation at d = 12 misses 2 log 2 by the geometric tail
  CHECK(std::abs(w.gap - 0.2 * 2.0 * kLog2) < 1e-4);
  CHECK(w.half_trace_distance <= 0.1 + 1e-10);
  REQUIRE(w.bound);
  CHECK(w.gap <= w.bound->total);

  const auto osc = HamiltonianSpectrum::oscillator_for_energy(1.0);
  const auto wide = tightness_witness(osc, 1.0, 0.1, 2, osc.dim());
  CHECK(std::abs(wide.gap - 0.2 * 2.0 * kLog2) < 1e-6);
  for (int k = 1; k <= 10; ++k) {
    const double ep = 0.1 + 0.09 * k;
    CHECK(wide.gap <= cmi_continuity_bound(osc.untruncated(), 1.0, 0.1, ep).total);
  }
  CHECK_THROWS_AS(tightness_witness(osc12, 1.0, 0.1, 1, 12), InvalidArgument);
  CHECK_THROWS_AS(tightness_witness(osc12, 1.0, 0.1, 2, 11), InvalidArgument);
}

TEST_CASE("energy truncation projector") {
  const auto osc = HamiltonianSpectrum::oscillator(10);
  CHECK(energy_truncation_projector(osc, 100.0).rank() == 10);
  CHECK(energy_truncation_projector(osc, 0.0).rank() == 1);
  CHECK(energy_truncation_projector(osc, 3.5).rank() == 4);
  CHECK_THROWS_AS(energy_truncation_projector(osc, -1.0), InvalidArgument);

  // most of an energy-constrained state sits below E/δ, with entropy below the Gibbs value there
  const double e = 1.0;
  const double delta = 0.25;
  const auto big = HamiltonianSpectrum::oscillator(24);
  const auto proj = energy_truncation_projector(big, e / delta);
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::mt19937_64 rng(s);
    std::exponential_distribution<double> ex(1.5);
    CMatrix m = CMatrix::Zero(24, 24);
    double z = 0, mean = 0;
    for (Index i = 0; i < 24; ++i) {
      const double w = std::exp(-ex(rng) * static_cast<double>(i));
      m(i, i) = w;
      z += w;
    }
    m /= z;
    for (Index i = 0; i < 24; ++i) mean += static_cast<double>(i) * m(i, i).real();
    if (mean > e) continue;
    const DensityOperator omega(SystemLayout({{"A", 24}}), m);
    const auto low = compress(omega, {proj}, false);
    CHECK(low.weight() >= 1.0 - delta);
    CHECK(entropy(low) <= gibbs_entropy(big, e / delta) + 1e-12);
  }
}
