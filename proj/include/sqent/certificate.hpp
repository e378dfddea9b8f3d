#pragma once

#include <optional>
#include <string>

#include "sqent/state.hpp"

namespace sqent {

/// Stinespring isometry C → E⊗F of a squashing channel; rows index (e, f)
/// with f fastest.
struct SquashingChannel {
  CMatrix isometry;
  Index dim_c = 1;
  Index dim_e = 1;
  Index dim_f = 1;
};

enum class CertificateSource { optimizer, analytic_markov, trivial, formation_extension };

std::string to_string(CertificateSource source);

/// An explicit extension ω_ABE of a bipartite state together with its
/// conditional mutual information; half of it upper-bounds E_sq.
struct ExtensionCertificate {
  DensityOperator extension;
  std::string label_a;
  std::string label_b;
  std::string label_e;
  double cmi_value = 0.0;
  std::optional<SquashingChannel> channel;
  CertificateSource source = CertificateSource::trivial;
};

/// Throws InvariantViolation unless the extension reduces to `target` and its
/// recomputed CMI matches cmi_value, both within 1e-8.
void verify_certificate(const ExtensionCertificate& cert, const DensityOperator& target);

}  // namespace sqent
