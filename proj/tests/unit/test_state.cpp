#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "sqent/state_io.hpp"
#include "sqent/truncation_lab.hpp"

using namespace sqent;
using namespace testing;

TEST_CASE("layout is canonical and validated") {
  const SystemLayout l({{"C", 3}, {"A", 2}, {"B", 4}});
  CHECK(l.labels() == LabelSet{"A", "B", "C"});
  CHECK(l.total_dim() == 24);
  CHECK(l.dim_of("B") == 4);
  CHECK_THROWS_AS(SystemLayout({{"A", 2}, {"A", 3}}), InvalidArgument);
  CHECK_THROWS_AS(SystemLayout({{"A", 0}}), InvalidArgument);
  CHECK_THROWS_AS(SystemLayout({{"", 2}}), InvalidArgument);
  CHECK_THROWS_AS(l.mask({"Z"}), InvalidArgument);
}

TEST_CASE("density operator invariants") {
  const SystemLayout l({{"A", 2}});
  CMatrix m(2, 2);
  m << 0.5, cplx(0, 0.1), cplx(0, 0.2), 0.5;
  CHECK_THROWS_AS(DensityOperator(l, m), InvariantViolation);
  m << 1.2, 0, 0, -0.2;
  CHECK_THROWS_AS(DensityOperator(l, m), InvariantViolation);
  m << 1.0 + 1e-12, 0, 0, -1e-12;
  CHECK_NOTHROW(DensityOperator(l, m));
  m << 0.8, 0, 0, 0.7;
  CHECK_THROWS(DensityOperator(l, m));
  m << 0.3, 0, 0, 0.2;
  const DensityOperator sub(l, m);
  CHECK(sub.weight() == doctest::Approx(0.5));
  CHECK(sub.normalized().weight() == doctest::Approx(1.0));
}

TEST_CASE("tensor products") {
  const auto z = tensor(ket_state("A", 2, 0), ket_state("B", 2, 0));
  CHECK(z.layout() == layout_ab(2, 2));
  CHECK(z.matrix()(0, 0).real() == 1.0);
  CHECK(z.matrix().cwiseAbs().sum() == doctest::Approx(1.0));

  const auto half = ket_state("A", 2, 0).scaled(0.5);
  CHECK(tensor(half, ket_state("B", 2, 1).scaled(0.5)).weight() == doctest::Approx(0.25));
  CHECK_THROWS_AS(tensor(ket_state("A", 2, 0), ket_state("A", 2, 0)), InvalidArgument);

  // elementwise Kronecker oracle, factors supplied out of canonical order
  const DensityOperator gamma = random_state(SystemLayout({{"X", 3}}), 3, 11);
  const DensityOperator tau = random_state(SystemLayout({{"B", 2}}), 2, 12);
  const DensityOperator prod = tensor(gamma, tau);
  CHECK(prod.layout().labels() == LabelSet{"B", "X"});
  for (Index b1 = 0; b1 < 2; ++b1)
    for (Index x1 = 0; x1 < 3; ++x1)
      for (Index b2 = 0; b2 < 2; ++b2)
        for (Index x2 = 0; x2 < 3; ++x2)
          CHECK(std::abs(prod.matrix()(b1 * 3 + x1, b2 * 3 + x2) - tau.matrix()(b1, b2) * gamma.matrix()(x1, x2)) <
                1e-15);
}

TEST_CASE("partial trace") {
  const auto bell = bell_state();
  const auto a = partial_trace(bell, {"A"});
  CHECK(linalg::max_abs(a.matrix() - CMatrix::Identity(2, 2) / 2.0) < 1e-15);

  const auto rho = random_state(SystemLayout({{"A", 3}}), 2, 1);
  const auto sigma = random_state(SystemLayout({{"B", 2}}), 2, 2);
  CHECK(linalg::max_abs(partial_trace(tensor(rho, sigma), {"A"}).matrix() - rho.matrix()) < 1e-14);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = random_state(layout_abc(2, 2, 2), 8, seed);
    const auto two_step = partial_trace(partial_trace(w, {"A", "C"}), {"A"});
    CHECK(linalg::max_abs(two_step.matrix() - partial_trace(w, {"A"}).matrix()) < 1e-14);
    CHECK(linalg::max_abs(partial_trace(w, {"A", "B"}).matrix() - trace_second(w.matrix(), 4, 2)) < 1e-14);
  }
  CHECK_THROWS_AS(partial_trace(bell, {}), InvalidArgument);
  CHECK_THROWS_AS(partial_trace(bell, {"Q"}), InvalidArgument);
}

TEST_CASE("partial trace of tensor recovers factors scaled by partner weight") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index da = 1 + static_cast<Index>(seed % 4);
    const Index db = 1 + static_cast<Index>((seed / 4) % 4);
    const auto a = random_state(SystemLayout({{"A", da}}), da, seed).scaled(0.7);
    const auto b = random_state(SystemLayout({{"B", db}}), db, seed + 100).scaled(0.4);
    const auto ab = tensor(a, b);
    CHECK(linalg::max_abs(partial_trace(ab, {"A"}).matrix() - 0.4 * a.matrix()) < 1e-14);
    CHECK(linalg::max_abs(partial_trace(ab, {"B"}).matrix() - 0.7 * b.matrix()) < 1e-14);
  }
}

TEST_CASE("purification") {
  const auto pure = bell_state();
  const auto p = purify(pure, "R");
  CHECK(p.layout().dim_of("R") == 1);
  CHECK(linalg::max_abs(DensityOperator::from_pure(p).matrix() - pure.matrix()) < 1e-12);

  const auto mixed = maximally_mixed(SystemLayout({{"A", 2}}));
  const auto pm = purify(mixed, "R");
  CHECK(pm.layout().dim_of("R") == 2);
  Eigen::JacobiSVD<CMatrix> svd(Eigen::Map<const CMatrix>(pm.amplitudes().data(), 2, 2));
  CHECK(svd.singularValues()(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(svd.singularValues()(1) == doctest::Approx(1.0 / std::sqrt(2.0)));

  const auto r3 = random_state(SystemLayout({{"A", 4}}), 3, 5);
  const auto p3 = purify(r3, "R");
  CHECK(p3.layout().dim_of("R") == 3);
  CHECK(linalg::max_abs(partial_trace(DensityOperator::from_pure(p3), {"A"}).matrix() - r3.matrix()) < 1e-10);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = random_state(layout_ab(2, 3), 1 + static_cast<Index>(seed % 6), seed);
    const auto pw = purify(w, "E");
    CHECK(linalg::max_abs(partial_trace(DensityOperator::from_pure(pw), {"A", "B"}).matrix() - w.matrix()) < 1e-10);
  }
  CHECK_THROWS_AS(purify(mixed.scaled(0.5), "R"), InvalidArgument);
}

TEST_CASE("compression") {
  const auto bell = bell_state();
  const auto full = compress(bell, {LocalProjector::leading("A", 2, 2)}, false);
  CHECK(linalg::max_abs(full.matrix() - bell.matrix()) < 1e-15);

  const auto half = compress(bell, {LocalProjector::basis("A", 2, {0})}, false);
  CHECK(half.weight() == doctest::Approx(0.5));
  CHECK(half.layout().dim_of("A") == 1);
  CHECK(compress(bell, {LocalProjector::basis("A", 2, {0})}, true).weight() == doctest::Approx(1.0));

  const double lambda = 0.5;
  const auto tmsv = build_state(ModelStateSpec::tmsv(lambda, 8));
  const auto c = compress(tmsv, {LocalProjector::leading("A", 8, 4), LocalProjector::leading("B", 8, 4)}, false);
  CHECK(c.weight() == doctest::Approx((1 - std::pow(lambda, 4)) / (1 - std::pow(lambda, 8))).epsilon(1e-12));

  CMatrix p = CMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  CHECK_THROWS(LocalProjector("A", CMatrix::Zero(2, 2)));
  CMatrix not_proj = CMatrix::Identity(2, 2) * 0.5;
  CHECK_THROWS(LocalProjector("A", not_proj));
}

TEST_CASE("contractions never increase weight") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = random_state(layout_ab(3, 2), 4, seed);
    const auto v = random_contraction(3, seed + 7);
    CHECK(apply_local(w, "A", v).weight() <= w.weight() + 1e-12);
  }
}

TEST_CASE("trace distance") {
  const auto r = random_state(layout_ab(2, 2), 3, 1);
  CHECK(trace_distance(r, r) == doctest::Approx(0.0));
  CHECK(trace_distance(ket_state("A", 2, 0), ket_state("A", 2, 1)) == doctest::Approx(2.0));
  const auto rho = ket_state("A", 3, 0);
  const auto tau = ket_state("A", 3, 2);
  const DensityOperator sigma(rho.layout(), 0.9 * rho.matrix() + 0.1 * tau.matrix());
  CHECK(trace_distance(rho, sigma) == doctest::Approx(0.2));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = random_state(layout_ab(2, 2), 4, 3 * s);
    const auto b = random_state(layout_ab(2, 2), 2, 3 * s + 1);
    const auto c = random_state(layout_ab(2, 2), 1, 3 * s + 2);
    CHECK(std::abs(trace_distance(a, b) - trace_distance(b, a)) < 1e-12);
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9);
  }
  CHECK_THROWS_AS(trace_distance(ket_state("A", 2, 0), ket_state("B", 2, 0)), InvalidArgument);
}

TEST_CASE("random states") {
  const auto p = random_state(layout_ab(2, 3), 1, 4);
  CHECK((p.matrix() * p.matrix()).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  const auto a = random_state(layout_ab(2, 3), 3, 9);
  const auto b = random_state(layout_ab(2, 3), 3, 9);
  CHECK((a.matrix().array() == b.matrix().array()).all());
  CHECK(random_state(layout_ab(2, 3), 6, 9).eigenvalues().minCoeff() > 0.0);
  CHECK_THROWS_AS(random_state(layout_ab(2, 3), 7, 9), InvalidArgument);
  CHECK_THROWS_AS(random_state(layout_ab(2, 3), 0, 9), InvalidArgument);
}

TEST_CASE("state files round-trip bit-exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "sqent_state_test";
  std::filesystem::create_directories(dir);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto w = random_state(layout_abc(2, 3, 2), 5, seed).scaled(0.75);
    save_state(dir / "w.json", w);
    const auto back = load_state(dir / "w.json");
    CHECK(back.layout() == w.layout());
    CHECK((back.matrix().array() == w.matrix().array()).all());
    CHECK(back.weight() == w.weight());
  }
  CHECK_THROWS_AS(density_from_json(nlohmann::json::parse(R"({"layout":[["A",2]],"matrix":[[1]]})")), ParseError);
  CHECK_THROWS_AS(load_state(dir / "missing.json"), IoError);
  CHECK(json_number(kInfinity) == "inf");
  CHECK_THROWS(json_number(std::nan("")));
  std::filesystem::remove_all(dir);
}
