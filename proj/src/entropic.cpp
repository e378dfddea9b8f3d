#include "sqent/entropic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "sqent/linalg.hpp"

namespace sqent {
namespace {

void require_partition(const SystemLayout& layout, const std::vector<const LabelSet*>& parts,
                       const char* what) {
  std::set<std::string> seen;
  for (const LabelSet* part : parts) {
    for (const auto& l : *part) {
      if (!layout.contains(l))
        throw InvalidArgument(std::string(what) + ": unknown label '" + l + "'");
      if (!seen.insert(l).second)
        throw InvalidArgument(std::string(what) + ": label '" + l + "' appears in two parts");
    }
  }
  if (seen.size() != layout.size())
    throw InvalidArgument(std::string(what) + ": parts do not cover the layout");
}

LabelSet join(const LabelSet& x, const LabelSet& y) {
  LabelSet out = x;
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

// Cone entropy of the marginal on `keep`; the empty marginal is a scalar with
// zero entropy.
double marginal_entropy(const DensityOperator& omega, const LabelSet& keep) {
  if (keep.empty()) return 0.0;
  const auto mask = omega.layout().mask(keep);
  const auto dims = omega.layout().dims();
  if (keep.size() == omega.layout().size()) return matrix_entropy(omega.matrix());
  return matrix_entropy(linalg::partial_trace(omega.matrix(), dims, mask));
}

}  // namespace

double eta(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

double entropy_of_spectrum(std::span<const double> values) {
  double sum = 0.0;
  double acc = 0.0;
  for (double v : values) {
    if (v <= 0.0) continue;
    sum += v;
    acc += eta(v);
  }
  return std::max(0.0, acc - eta(sum));
}

double entropy_of_spectrum(const RVector& values) {
  return entropy_of_spectrum(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double matrix_entropy(const CMatrix& m) {
  if (m.rows() == 1) return 0.0;
  return entropy_of_spectrum(linalg::hermitian_eigenvalues(m));
}

double entropy(const DensityOperator& rho) { return matrix_entropy(rho.matrix()); }

double binary_entropy(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("binary_entropy: argument outside [0, 1]");
  return eta(lambda) + eta(1.0 - lambda);
}

double theta(double x) {
  if (!(x >= 0.0)) throw InvalidArgument("theta: argument must be >= 0");
  if (std::isinf(x)) throw InvalidArgument("theta: argument must be finite");
  return (1.0 + x) * binary_entropy(x / (1.0 + x));
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.layout() == sigma.layout())) throw InvalidArgument("relative_entropy: layout mismatch");
  const auto sig = linalg::hermitian_eigensystem(sigma.matrix());
  const CMatrix rho_in_sigma_basis = sig.vectors.adjoint() * rho.matrix() * sig.vectors;
  double cross = 0.0;  // Tr ρ log σ
  for (Index j = 0; j < sig.values.size(); ++j) {
    const double overlap = rho_in_sigma_basis(j, j).real();
    if (sig.values(j) <= kSupportThreshold) {
      if (overlap > kSupportThreshold) return kInfinity;
      continue;
    }
    cross += overlap * std::log(sig.values(j));
  }
  const double rho_log_rho = -entropy_of_spectrum(rho.eigenvalues()) - eta(rho.weight());
  const double value = rho_log_rho - cross + sigma.weight() - rho.weight();
  return value < 0.0 && value > -kSupportThreshold ? 0.0 : value;
}

double mutual_information(const DensityOperator& omega, const LabelSet& part_a, const LabelSet& part_b) {
  require_partition(omega.layout(), {&part_a, &part_b}, "mutual_information");
  if (part_a.empty() || part_b.empty()) throw InvalidArgument("mutual_information: empty part");
  const double value = marginal_entropy(omega, part_a) + marginal_entropy(omega, part_b) -
                       matrix_entropy(omega.matrix());
  return std::max(0.0, value);
}

double conditional_entropy(const DensityOperator& omega, const LabelSet& of, const LabelSet& given) {
  require_partition(omega.layout(), {&of, &given}, "conditional_entropy");
  if (of.empty() || given.empty()) throw InvalidArgument("conditional_entropy: empty part");
  return marginal_entropy(omega, of) - mutual_information(omega, of, given);
}

CmiForms cmi_forms(const DensityOperator& omega, const LabelSet& a, const LabelSet& b, const LabelSet& e) {
  require_partition(omega.layout(), {&a, &b, &e}, "cmi");
  if (a.empty() || b.empty()) throw InvalidArgument("cmi: parts A and B must be nonempty");
  const double h_a = marginal_entropy(omega, a);
  const double h_b = marginal_entropy(omega, b);
  const double h_e = marginal_entropy(omega, e);
  const double h_ab = marginal_entropy(omega, join(a, b));
  const double h_ae = marginal_entropy(omega, join(a, e));
  const double h_be = marginal_entropy(omega, join(b, e));
  const double h_abe = matrix_entropy(omega.matrix());
  auto mi = [](double hx, double hy, double hxy) { return hx + hy - hxy; };
  CmiForms forms{};
  forms.entropic = h_ae + h_be - h_e - h_abe;
  forms.chain = mi(h_a, h_be, h_abe) - mi(h_a, h_e, h_ae);
  forms.mutual = mi(h_a, h_b, h_ab) - mi(h_a, h_e, h_ae) - mi(h_b, h_e, h_be) + mi(h_ab, h_e, h_abe);
  return forms;
}

double cmi(const DensityOperator& omega, const LabelSet& a, const LabelSet& b, const LabelSet& e) {
  const CmiForms forms = cmi_forms(omega, a, b, e);
  const double spread = std::max({std::abs(forms.entropic - forms.chain), std::abs(forms.entropic - forms.mutual),
                                  std::abs(forms.chain - forms.mutual)});
  if (spread > 1e-8)
    throw InvariantViolation("cmi: equivalent forms disagree by " + std::to_string(spread));
  if (forms.entropic < -1e-9)
    throw InvariantViolation("cmi: negative conditional mutual information " + std::to_string(forms.entropic));
  return std::max(0.0, forms.entropic);
}

std::vector<double> cmi_truncated_sequence(const DensityOperator& omega, const std::string& a_label,
                                           const LabelSet& b, const LabelSet& e,
                                           const std::vector<LocalProjector>& ladder) {
  const LabelSet a{a_label};
  require_partition(omega.layout(), {&a, &b, &e}, "cmi_truncated_sequence");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (ladder[k].target() != a_label)
      throw InvalidArgument("cmi_truncated_sequence: projector does not act on '" + a_label + "'");
    if (k > 0) {
      const CMatrix& prev = ladder[k - 1].matrix();
      if (linalg::max_abs(ladder[k].matrix() * prev - prev) > 1e-10)
        throw InvalidArgument("cmi_truncated_sequence: projector sequence is not increasing");
    }
  }
  std::vector<double> values;
  values.reserve(ladder.size());
  for (const auto& p : ladder) {
    const DensityOperator q = compress(omega, {p}, false);
    const double h_a = marginal_entropy(q, a);
    const double h_e = marginal_entropy(q, e);
    const double h_ae = marginal_entropy(q, join(a, e));
    const double h_be = marginal_entropy(q, join(b, e));
    const double h_abe = matrix_entropy(q.matrix());
    values.push_back((h_a + h_be - h_abe) - (h_a + h_e - h_ae));
  }
  return values;
}

double cmi_raw(const CMatrix& abe, Index dim_a, Index dim_b, Index dim_e) {
  const std::array<Index, 3> dims{dim_a, dim_b, dim_e};
  const double h_ae = matrix_entropy(linalg::partial_trace(abe, dims, {true, false, true}));
  const double h_be = matrix_entropy(linalg::partial_trace(abe, dims, {false, true, true}));
  const double h_e = matrix_entropy(linalg::partial_trace(abe, dims, {false, false, true}));
  const double h_abe = matrix_entropy(abe);
  return h_ae + h_be - h_e - h_abe;
}

}  // namespace sqent
