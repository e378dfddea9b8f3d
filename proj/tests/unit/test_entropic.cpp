#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sqent/entropic.hpp"
#include "sqent/truncation_lab.hpp"

using namespace sqent;
using namespace testing;

TEST_CASE("entropy on the cone") {
  CHECK(entropy(bell_state()) == doctest::Approx(0.0));
  const auto mixed = maximally_mixed(SystemLayout({{"A", 2}}));
  CHECK(entropy(mixed) == doctest::Approx(kLog2).epsilon(1e-14));
  CHECK(entropy(mixed.scaled(0.5)) == doctest::Approx(0.5 * kLog2).epsilon(1e-14));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto w = random_state(layout_ab(2, 3), 4, s);
    CHECK(entropy(w) == doctest::Approx(plain_entropy(w.matrix())).epsilon(1e-12));
    CHECK(entropy(w.scaled(0.3)) == doctest::Approx(0.3 * entropy(w)).epsilon(1e-12));
  }
}

TEST_CASE("binary entropy and theta") {
  CHECK(binary_entropy(0.5) == doctest::Approx(kLog2));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(theta(0.0) == 0.0);
  CHECK(theta(1.0) == doctest::Approx(2.0 * kLog2));
  CHECK_THROWS_AS(binary_entropy(1.5), InvalidArgument);
  CHECK_THROWS_AS(binary_entropy(-0.1), InvalidArgument);
  CHECK_THROWS_AS(theta(-1.0), InvalidArgument);
}

TEST_CASE("relative entropy") {
  const auto r = random_state(layout_ab(2, 2), 3, 1);
  CHECK(relative_entropy(r, r) == doctest::Approx(0.0).epsilon(1e-12));
  const auto zero = ket_state("A", 2, 0);
  CHECK(relative_entropy(zero, maximally_mixed(zero.layout())) == doctest::Approx(kLog2));
  CHECK(std::isinf(relative_entropy(zero, ket_state("A", 2, 1))));
  const auto s = random_state(layout_ab(2, 2), 4, 2);
  CHECK(relative_entropy(r.scaled(0.4), s.scaled(0.4)) == doctest::Approx(0.4 * relative_entropy(r, s)).epsilon(1e-10));
  CHECK_THROWS_AS(relative_entropy(zero, ket_state("B", 2, 0)), InvalidArgument);
}

TEST_CASE("mutual information") {
  CHECK(mutual_information(tensor(ket_state("A", 2, 0), maximally_mixed(SystemLayout({{"B", 3}}))), {"A"}, {"B"}) ==
        doctest::Approx(0.0));
  CHECK(mutual_information(bell_state(), {"A"}, {"B"}) == doctest::Approx(2.0 * kLog2));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto w = random_state(layout_ab(2, 3), 1 + static_cast<Index>(s % 6), s);
    const double mi = mutual_information(w, {"A"}, {"B"});
    const double prod_re = relative_entropy(w, tensor(partial_trace(w, {"A"}), partial_trace(w, {"B"})));
    CHECK(mi == doctest::Approx(prod_re).epsilon(1e-9));
    CHECK(mi <= 2.0 * std::min(entropy(partial_trace(w, {"A"})), entropy(partial_trace(w, {"B"}))) + 1e-9);
  }
  CHECK_THROWS_AS(mutual_information(random_state(layout_abc(2, 2, 2), 2, 1), {"A"}, {"B"}), InvalidArgument);
  CHECK_THROWS_AS(mutual_information(bell_state(), {"A", "B"}, {"B"}), InvalidArgument);
}

TEST_CASE("conditional entropy") {
  const auto rho = random_state(SystemLayout({{"A", 3}}), 3, 4);
  CHECK(conditional_entropy(tensor(rho, ket_state("B", 2, 1)), {"A"}, {"B"}) == doctest::Approx(entropy(rho)));
  CHECK(conditional_entropy(bell_state(), {"A"}, {"B"}) == doctest::Approx(-kLog2));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto w = random_state(layout_ab(3, 2), 3, s);
    CHECK(std::abs(conditional_entropy(w, {"A"}, {"B"}) - (entropy(w) - entropy(partial_trace(w, {"B"})))) < 1e-9);
  }
}

TEST_CASE("conditional mutual information") {
  const auto w = random_state(layout_ab(2, 3), 4, 3);
  const auto ext = tensor(w, random_state(SystemLayout({{"E", 2}}), 2, 4));
  CHECK(cmi(ext, {"A"}, {"B"}, {"E"}) == doctest::Approx(mutual_information(w, {"A"}, {"B"})).epsilon(1e-10));
  CHECK(cmi(w, {"A"}, {"B"}, {}) == doctest::Approx(mutual_information(w, {"A"}, {"B"})).epsilon(1e-12));

  // duality for pure ABED: I(A:B|E) = I(A:B|D)
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto psi = DensityOperator::from_pure(random_pure_state(SystemLayout({{"A", 2}, {"B", 2}, {"D", 2}, {"E", 3}}), s));
    const double via_e = cmi(partial_trace(psi, {"A", "B", "E"}), {"A"}, {"B"}, {"E"});
    const double via_d = cmi(partial_trace(psi, {"A", "B", "D"}), {"A"}, {"B"}, {"D"});
    CHECK(via_e == doctest::Approx(via_d).epsilon(1e-9));
  }
  CHECK_THROWS_AS(cmi(ext, {"A"}, {}, {"E", "B"}), InvalidArgument);
  CHECK_THROWS_AS(cmi(ext, {"A"}, {"B"}, {}), InvalidArgument);
}

TEST_CASE("truncated CMI sequence") {
  const auto w = random_state(SystemLayout({{"A", 4}, {"B", 2}, {"E", 2}}), 6, 8);
  const double direct = cmi(w, {"A"}, {"B"}, {"E"});
  const auto single = cmi_truncated_sequence(w, "A", {"B"}, {"E"}, {LocalProjector::leading("A", 4, 4)});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(direct).epsilon(1e-8));

  std::vector<LocalProjector> ladder;
  for (Index r = 1; r <= 4; ++r) ladder.push_back(LocalProjector::leading("A", 4, r));
  const auto seq = cmi_truncated_sequence(w, "A", {"B"}, {"E"}, ladder);
  CHECK(std::abs(seq.back() - direct) < 1e-8);

  std::vector<LocalProjector> bad{LocalProjector::basis("A", 4, {1}), LocalProjector::basis("A", 4, {0, 2})};
  CHECK_THROWS_AS(cmi_truncated_sequence(w, "A", {"B"}, {"E"}, bad), InvalidArgument);

  // TMSV ⊗ τ_E along the Fock ladder
  for (Index d = 2; d <= 8; ++d) {
    const auto t = tensor(build_state(ModelStateSpec::tmsv(0.5, d)), random_state(SystemLayout({{"E", 2}}), 2, 1));
    std::vector<LocalProjector> fock;
    for (Index r = 1; r <= d; ++r) fock.push_back(LocalProjector::leading("A", d, r));
    const auto vals = cmi_truncated_sequence(t, "A", {"B"}, {"E"}, fock);
    for (std::size_t k = 1; k < vals.size(); ++k) CHECK(vals[k] >= vals[k - 1] - 1e-9);
  }
}
