#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "photorecon/detector_model.hpp"
#include "photorecon/error.hpp"
#include "photorecon/landweber.hpp"
#include "photorecon/metrics.hpp"
#include "photorecon/states.hpp"
#include "photorecon/version.hpp"

namespace photorecon {

using Json = nlohmann::ordered_json;

/// Shortest text for doubles is not enough for the exchange format; every
/// real is written with 17 significant digits.
inline std::string format_real(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

inline void emit_json(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(it.key()).dump() + ": ";
      emit_json(out, it.value(), depth + 1);
    }
    out += "\n" + close_pad + "}";
  } else if (j.is_array()) {
    bool flat = true;
    for (const auto& e : j) flat = flat && is_scalar(e);
    if (flat) {
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ", ";
        first = false;
        emit_json(out, e, depth + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    bool first = true;
    for (const auto& e : j) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      emit_json(out, e, depth + 1);
    }
    out += "\n" + close_pad + "]";
  } else if (j.is_number_float()) {
    out += format_real(j.get<double>());
  } else {
    out += j.dump();
  }
}

}  // namespace detail

/// Serialize with 17-significant-digit reals and scalar arrays kept on one line.
inline std::string dump_json(const Json& j) {
  std::string out;
  detail::emit_json(out, j, 0);
  out += "\n";
  return out;
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Embedded in every output file.
struct Provenance {
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::string generator;  // empty when no randomness was involved
  std::string version = kVersion;

  Json to_json() const {
    Json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    j["generator"] = generator.empty() ? Json(nullptr) : Json(generator);
    j["library_version"] = version;
    return j;
  }
};

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorKind::io, "write failed for " + path.string());
}

inline Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, what + ": " + e.what());
  }
}

/// Reals from one of the accepted distribution encodings:
///   a JSON array, a JSON object with a "probs" array (or the "estimate" of a
///   solve report), or plain text with comma/whitespace separators.
inline std::vector<double> parse_real_vector(std::string_view text) {
  std::size_t start = text.find_first_not_of(" \t\r\n");
  if (start == std::string_view::npos) fail(ErrorKind::parse, "distribution is empty");
  if (text.substr(start, 3) == "\xEF\xBB\xBF") start += 3;  // UTF-8 BOM

  if (text[start] == '[' || text[start] == '{') {
    const Json j = parse_json(text.substr(start), "distribution JSON");
    Json arr = j;
    if (j.is_object()) {
      arr = j.contains("probs") ? j.at("probs") : j.contains("estimate") ? j.at("estimate") : Json();
    }
    require(arr.is_array(), ErrorKind::parse,
            "distribution JSON must be an array or an object with a \"probs\" or \"estimate\" array");
    std::vector<double> out;
    for (const auto& e : arr) {
      require(e.is_number(), ErrorKind::parse, "distribution entries must be numbers");
      out.push_back(e.get<double>());
    }
    require(!out.empty(), ErrorKind::parse, "distribution is empty");
    return out;
  }

  std::vector<double> out;
  std::size_t pos = start;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && text[end] != ',' && text[end] != ' ' && text[end] != '\t' &&
           text[end] != '\r' && text[end] != '\n') {
      ++end;
    }
    std::string_view token = text.substr(pos, end - pos);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    require(res.ec == std::errc() && res.ptr == token.data() + token.size(), ErrorKind::parse,
            "cannot parse '" + std::string(text.substr(pos, end - pos)) + "' as a real number");
    out.push_back(v);
    pos = end;
  }
  require(!out.empty(), ErrorKind::parse, "distribution is empty");
  return out;
}

/// Validated photon-number distribution. Never renormalizes: a sum further
/// than 1e-6 from one is rejected, smaller defects go into truncation_tail.
inline PhotonDistribution photon_distribution_from_values(std::vector<double> values) {
  double sum = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    require(std::isfinite(values[n]), ErrorKind::parse,
            "entry " + std::to_string(n) + " is not finite");
    require(values[n] >= 0.0, ErrorKind::negative_probability,
            "entry " + std::to_string(n) + " is negative (" + format_real(values[n]) + ")");
    sum += values[n];
  }
  require(std::fabs(sum - 1.0) <= 1e-6, ErrorKind::sum_deviates,
          "probabilities sum to " + format_real(sum) + ", more than 1e-6 away from 1");
  return {std::move(values), std::max(0.0, 1.0 - sum)};
}

inline PhotonDistribution from_file(const std::filesystem::path& path) {
  return photon_distribution_from_values(parse_real_vector(read_text_file(path)));
}

/// Count distribution: nonnegative, total at most 1 + 1e-12.
inline CountDistribution count_distribution_from_values(std::vector<double> values) {
  double sum = 0.0;
  for (std::size_t m = 0; m < values.size(); ++m) {
    require(std::isfinite(values[m]), ErrorKind::parse,
            "entry " + std::to_string(m) + " is not finite");
    require(values[m] >= 0.0, ErrorKind::negative_probability,
            "entry " + std::to_string(m) + " is negative (" + format_real(values[m]) + ")");
    sum += values[m];
  }
  require(sum <= 1.0 + 1e-12, ErrorKind::sum_deviates,
          "count probabilities sum to " + format_real(sum) + " > 1");
  return {std::move(values)};
}

inline CountDistribution counts_from_file(const std::filesystem::path& path) {
  return count_distribution_from_values(parse_real_vector(read_text_file(path)));
}

// ---- writers ---------------------------------------------------------------

inline Json distribution_json(const std::vector<double>& probs, const Provenance& prov,
                              Json metadata = Json::object()) {
  Json j;
  j["probs"] = probs;
  for (auto it = metadata.begin(); it != metadata.end(); ++it) j[it.key()] = it.value();
  j["provenance"] = prov.to_json();
  return j;
}

inline std::string distribution_csv(const std::vector<double>& probs) {
  std::string out = "n,probability\n";
  for (std::size_t n = 0; n < probs.size(); ++n) {
    out += std::to_string(n) + "," + format_real(probs[n]) + "\n";
  }
  return out;
}

inline Json response_matrix_json(const ResponseMatrix& mat, const Provenance& prov) {
  Json j;
  j["eta"] = mat.params.eta;
  j["n_noise"] = mat.params.n_noise;
  j["n_max"] = mat.n_max();
  j["m_max"] = mat.m_max();
  Json rows = Json::array();
  for (Eigen::Index m = 0; m < mat.entries.rows(); ++m) {
    Json row = Json::array();
    for (Eigen::Index n = 0; n < mat.entries.cols(); ++n) row.push_back(mat.entries(m, n));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  j["col_tail"] = mat.col_tail;
  j["provenance"] = prov.to_json();
  return j;
}

inline Json solve_report_json(const SolveReport& report, const Provenance& prov) {
  Json j;
  j["estimate"] = report.estimate;
  j["iterations_run"] = report.iterations_run;
  j["stop_reason"] = std::string(to_string(report.stop_reason));
  j["chi"] = report.chi;
  j["residual_history"] = report.residual_history;
  j["normalization_history"] = report.normalization_history;
  j["provenance"] = prov.to_json();
  return j;
}

inline Json error_report_json(const ErrorReport& r) {
  Json j;
  j["relative_error"] = r.relative_error;
  j["relative_residual"] = r.relative_residual;
  j["normalization_defect"] = r.normalization_defect;
  return j;
}

}  // namespace photorecon
