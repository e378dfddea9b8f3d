#include "sqent/state_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace sqent {
namespace {

nlohmann::json complex_entry(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx parse_complex(const nlohmann::json& entry) {
  if (entry.is_number()) return {entry.get<double>(), 0.0};
  if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number())
    throw ParseError("matrix entries must be [re, im] pairs");
  return {entry[0].get<double>(), entry[1].get<double>()};
}

std::vector<Subsystem> parse_layout(const nlohmann::json& layout) {
  if (!layout.is_array() || layout.empty()) throw ParseError("'layout' must be a nonempty array");
  std::vector<Subsystem> factors;
  for (const auto& item : layout) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_number_integer())
      throw ParseError("layout entries must be [label, dim] pairs");
    factors.push_back({item[0].get<std::string>(), item[1].get<Index>()});
  }
  return factors;
}

}  // namespace

nlohmann::json json_number(double value) {
  if (std::isnan(value)) throw InvariantViolation("refusing to emit NaN");
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

std::string csv_number(double value) {
  if (std::isnan(value)) throw InvariantViolation("refusing to emit NaN");
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

nlohmann::json to_json(const DensityOperator& omega) {
  nlohmann::json layout = nlohmann::json::array();
  for (const auto& s : omega.layout().subsystems()) layout.push_back({s.label, s.dim});
  nlohmann::json rows = nlohmann::json::array();
  const CMatrix& m = omega.matrix();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_entry(m(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"layout", layout}, {"matrix", rows}, {"weight", omega.weight()}};
}

DensityOperator density_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("state file must hold a JSON object");
  if (!doc.contains("layout")) throw ParseError("state file is missing 'layout'");
  if (!doc.contains("matrix")) throw ParseError("state file is missing 'matrix'");
  const auto factors = parse_layout(doc["layout"]);
  Index d = 1;
  for (const auto& f : factors) {
    if (f.dim < 1) throw ParseError("layout dimension must be >= 1");
    d *= f.dim;
  }
  const auto& rows = doc["matrix"];
  if (!rows.is_array() || static_cast<Index>(rows.size()) != d)
    throw ParseError("'matrix' must have " + std::to_string(d) + " rows");
  CMatrix m(d, d);
  for (Index i = 0; i < d; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != d)
      throw ParseError("matrix row " + std::to_string(i) + " must have " + std::to_string(d) + " entries");
    for (Index j = 0; j < d; ++j) m(i, j) = parse_complex(row[static_cast<std::size_t>(j)]);
  }
  DensityOperator omega = DensityOperator::from_factors(factors, m);
  if (doc.contains("weight")) {
    if (!doc["weight"].is_number()) throw ParseError("'weight' must be a number");
    if (std::abs(doc["weight"].get<double>() - omega.weight()) > 1e-10)
      throw InvariantViolation("declared weight does not match the matrix trace");
  }
  return omega;
}

nlohmann::json to_json(const PureStateVector& psi) {
  nlohmann::json amps = nlohmann::json::array();
  for (Index i = 0; i < psi.amplitudes().size(); ++i) amps.push_back(complex_entry(psi.amplitudes()(i)));
  return amps;
}

DensityOperator load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open state file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("state file " + path.string() + ": " + e.what());
  }
  return density_from_json(doc);
}

void save_state(const std::filesystem::path& path, const DensityOperator& omega) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write state file " + path.string());
  out << to_json(omega).dump() << '\n';
  if (!out) throw IoError("failed writing state file " + path.string());
}

}  // namespace sqent
