#pragma once

// CSV and JSON persistence for the command-line tool.
//
// Logit files:  logit_0..logit_{K-1}[,label][,feat_0..feat_{d-1}]
// Bounds files: a_0..a_{K-1},b_0..b_{K-1}
// Numbers are written with 17 significant digits so doubles round-trip.

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bcsoftmax/calib.hpp"

namespace bcsoftmax::io {

/// Malformed or inconsistent input data. The message names the source and row.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line;  // 1-based source line of each row
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = s.find(',');
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) return out;
    s.remove_prefix(pos + 1);
  }
}

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end)
    throw DataError(where + ": cannot parse '" + std::string(s) + "' as a number");
  return v;
}

// Column indices of name_0, name_1, ... in header order; empty if absent.
inline std::vector<std::size_t> indexed_columns(const std::vector<std::string>& header,
                                                const std::string& prefix,
                                                const std::string& source) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind(prefix, 0) != 0) continue;
    const std::string expected = prefix + std::to_string(cols.size());
    if (header[c] != expected)
      throw DataError(source + ": header column '" + header[c] + "' out of order (expected '" +
                      expected + "')");
    cols.push_back(c);
  }
  return cols;
}

}  // namespace detail

/// Reads a header line and numeric rows. Blank lines are ignored; an empty
/// stream gives an empty table.
inline Table read_csv(std::istream& in, const std::string& source) {
  Table t;
  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    const auto trimmed = detail::trim(text);
    if (trimmed.empty()) continue;
    const auto fields = detail::split(trimmed);
    if (t.header.empty()) {
      for (auto f : fields) t.header.emplace_back(f);
      continue;
    }
    const std::string where = source + ":" + std::to_string(lineno);
    if (fields.size() != t.header.size())
      throw DataError(where + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(detail::parse_double(f, where));
    t.rows.push_back(std::move(row));
    t.line.push_back(lineno);
  }
  return t;
}

/// Interprets a table as a logit dataset. Labels are required when
/// `require_labels` is set; otherwise they are read if present.
inline calib::LabeledLogitSet to_dataset(const Table& t, const std::string& source,
                                         bool require_labels) {
  calib::LabeledLogitSet out;
  if (t.header.empty()) return out;
  const auto logit_cols = detail::indexed_columns(t.header, "logit_", source);
  const auto feat_cols = detail::indexed_columns(t.header, "feat_", source);
  std::size_t label_col = t.header.size();
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == "label") label_col = c;
  if (logit_cols.empty()) throw DataError(source + ": no logit_0.. columns in header");
  if (require_labels && label_col == t.header.size())
    throw DataError(source + ": no label column in header");
  if (logit_cols.size() + feat_cols.size() + (label_col < t.header.size()) != t.header.size())
    throw DataError(source + ": unrecognized header columns");

  out.num_classes = logit_cols.size();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = source + ":" + std::to_string(t.line[r]);
    std::vector<double> x;
    for (std::size_t c : logit_cols) {
      if (!std::isfinite(row[c])) throw DataError(where + ": non-finite logit");
      x.push_back(row[c]);
    }
    out.logits.push_back(std::move(x));
    if (label_col < t.header.size()) {
      const double v = row[label_col];
      if (v != std::floor(v) || v < 0 || v >= static_cast<double>(out.num_classes))
        throw DataError(where + ": label must be an integer in [0, " +
                        std::to_string(out.num_classes) + ")");
      out.labels.push_back(static_cast<int>(v));
    }
    if (!feat_cols.empty()) {
      std::vector<double> f;
      for (std::size_t c : feat_cols) {
        if (!std::isfinite(row[c])) throw DataError(where + ": non-finite feature");
        f.push_back(row[c]);
      }
      out.features.push_back(std::move(f));
    }
  }
  return out;
}

inline void write_dataset(std::ostream& out, const calib::LabeledLogitSet& data) {
  const std::size_t K = data.num_classes;
  std::string line;
  for (std::size_t k = 0; k < K; ++k) line += (k ? ",logit_" : "logit_") + std::to_string(k);
  if (data.has_labels()) line += ",label";
  for (std::size_t j = 0; j < data.feature_dim(); ++j) line += ",feat_" + std::to_string(j);
  out << line << '\n';
  for (std::size_t n = 0; n < data.size(); ++n) {
    line.clear();
    for (std::size_t k = 0; k < K; ++k) {
      if (k) line += ',';
      line += format_double(data.logits[n][k]);
    }
    if (data.has_labels()) line += "," + std::to_string(data.labels[n]);
    if (data.has_features())
      for (double v : data.features[n]) line += "," + format_double(v);
    out << line << '\n';
  }
}

struct BoundsRow {
  std::vector<double> a;
  std::vector<double> b;
};

inline std::vector<BoundsRow> to_bounds(const Table& t, const std::string& source) {
  std::vector<BoundsRow> out;
  if (t.header.empty()) return out;
  const auto a_cols = detail::indexed_columns(t.header, "a_", source);
  const auto b_cols = detail::indexed_columns(t.header, "b_", source);
  if (a_cols.empty() || a_cols.size() != b_cols.size() ||
      a_cols.size() + b_cols.size() != t.header.size())
    throw DataError(source + ": bounds header must be a_0..a_{K-1},b_0..b_{K-1}");
  for (const auto& row : t.rows) {
    BoundsRow br;
    for (std::size_t c : a_cols) br.a.push_back(row[c]);
    for (std::size_t c : b_cols) br.b.push_back(row[c]);
    out.push_back(std::move(br));
  }
  return out;
}

inline void write_probabilities(std::ostream& out, const std::vector<std::vector<double>>& rows,
                                std::size_t K) {
  std::string line;
  for (std::size_t k = 0; k < K; ++k) line += (k ? ",p_" : "p_") + std::to_string(k);
  out << line << '\n';
  for (const auto& row : rows) {
    line.clear();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) line += ',';
      line += format_double(row[k]);
    }
    out << line << '\n';
  }
}

// ---------------------------------------------------------------------------
// Model JSON:
// { "kind", "tau_raw", "params": {...}, "flags": {"use_lower", "use_upper"},
//   "meta": {"seed", "epochs", "final_loss"} }
// Scalar kinds store each raw parameter as a number, linear kinds as
// {"bias", "weight": [...]}.

namespace detail {

inline std::pair<const char*, const char*> param_names(calib::CalibKind kind) {
  return calib::is_pb(kind) ? std::pair{"a_raw", "b_raw"} : std::pair{"c_raw", "C_raw"};
}

inline nlohmann::json head_to_json(const calib::LinearHead& h, bool linear) {
  if (!linear) return h.bias;
  return {{"bias", h.bias}, {"weight", h.weight}};
}

inline calib::LinearHead head_from_json(const nlohmann::json& j, bool linear) {
  calib::LinearHead h;
  if (!linear) {
    h.bias = j.get<double>();
  } else {
    h.bias = j.at("bias").get<double>();
    h.weight = j.at("weight").get<std::vector<double>>();
  }
  return h;
}

}  // namespace detail

inline nlohmann::json model_to_json(const calib::CalibModel& m) {
  nlohmann::json params = nlohmann::json::object();
  if (m.kind != calib::CalibKind::ts) {
    const auto [lo, hi] = detail::param_names(m.kind);
    const bool linear = calib::is_linear(m.kind);
    params[lo] = detail::head_to_json(m.lower, linear);
    params[hi] = detail::head_to_json(m.upper, linear);
  }
  nlohmann::json meta = {{"seed", m.meta.seed}, {"epochs", m.meta.epochs}};
  meta["final_loss"] = std::isfinite(m.meta.final_loss) ? nlohmann::json(m.meta.final_loss)
                                                        : nlohmann::json(nullptr);
  return {{"kind", std::string(calib::to_string(m.kind))},
          {"tau_raw", m.tau_raw},
          {"params", params},
          {"flags", {{"use_lower", m.use_lower}, {"use_upper", m.use_upper}}},
          {"meta", meta}};
}

inline calib::CalibModel model_from_json(const nlohmann::json& j) {
  try {
    calib::CalibModel m;
    m.kind = calib::parse_kind(j.at("kind").get<std::string>());
    m.tau_raw = j.at("tau_raw").get<double>();
    if (m.kind != calib::CalibKind::ts) {
      const auto [lo, hi] = detail::param_names(m.kind);
      const bool linear = calib::is_linear(m.kind);
      m.lower = detail::head_from_json(j.at("params").at(lo), linear);
      m.upper = detail::head_from_json(j.at("params").at(hi), linear);
    }
    m.use_lower = j.at("flags").at("use_lower").get<bool>();
    m.use_upper = j.at("flags").at("use_upper").get<bool>();
    const auto& meta = j.at("meta");
    m.meta.seed = meta.at("seed").get<std::uint64_t>();
    m.meta.epochs = meta.at("epochs").get<std::size_t>();
    m.meta.final_loss = meta.at("final_loss").is_null()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : meta.at("final_loss").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  } catch (const calib::UsageError& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace bcsoftmax::io
