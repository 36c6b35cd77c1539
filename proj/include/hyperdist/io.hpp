#pragma once

// Text formats: points as CSV, hyperplanes/curves/uncertain points as JSON,
// sketches as CSV. Every writer emits numbers with 12 significant digits and
// every reader accepts what the writers produce.
//
// CSV files may start with "# key: value" metadata lines, and may have one
// header row; both are skipped (metadata is returned where useful).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperdist/core.hpp"
#include "hyperdist/streaming.hpp"
#include "hyperdist/trajectories.hpp"

namespace hyperdist::io {

using json = nlohmann::json;
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline constexpr int kSignificantDigits = 12;

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, x);
  return buf;
}

/// x rounded to the printed precision, for JSON output.
inline double rounded(double x) { return std::stod(format_number(x)); }

/// 64-bit FNV-1a; identifies inputs in output metadata.
class Digest {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }

  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string digest(std::string_view bytes) {
  Digest d;
  d.update(bytes);
  return d.hex();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::fail(Errc::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view field, double& out) {
  const std::string f(trim(field));
  if (f.empty()) return false;
  char* end = nullptr;
  out = std::strtod(f.c_str(), &end);
  return end == f.c_str() + f.size();
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

/// Numeric rows of a CSV stream, with its "# key: value" metadata.
struct CsvTable {
  Metadata meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return &v;
    return nullptr;
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string_view body = detail::trim(t.substr(1));
      const std::size_t colon = body.find(':');
      if (colon != std::string_view::npos)
        table.meta.emplace_back(std::string(detail::trim(body.substr(0, colon))),
                                std::string(detail::trim(body.substr(colon + 1))));
      continue;
    }
    const auto fields = detail::split(t);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) numeric = detail::parse_double(fields[j], row[j]);
    if (!numeric) {
      if (seen_data || !table.header.empty())
        hyperdist::detail::fail(Errc::Parse, "non-numeric field on line " + std::to_string(line_no));
      for (auto f : fields) table.header.emplace_back(detail::trim(f));
      continue;
    }
    if (!table.rows.empty() && row.size() != table.rows.front().size())
      hyperdist::detail::fail(Errc::Parse, "inconsistent column count on line " + std::to_string(line_no));
    table.rows.push_back(std::move(row));
    seen_data = true;
  }
  return table;
}

/// One point per row; with `weight_column` the last column holds weights.
inline PointSet points_from_table(const CsvTable& table, bool weight_column) {
  if (table.rows.empty()) hyperdist::detail::fail(Errc::EmptyInput, "no points in input");
  const Index cols = static_cast<Index>(table.rows.front().size());
  const Index d = weight_column ? cols - 1 : cols;
  if (d < 1) hyperdist::detail::fail(Errc::Parse, "weighted points need at least two columns");
  PointMatrix P(static_cast<Index>(table.rows.size()), d);
  Vector w(static_cast<Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (Index j = 0; j < d; ++j) P(static_cast<Index>(i), j) = table.rows[i][static_cast<std::size_t>(j)];
    if (weight_column) w[static_cast<Index>(i)] = table.rows[i].back();
  }
  return weight_column ? PointSet(std::move(P), std::move(w)) : PointSet(std::move(P));
}

inline PointSet read_points_csv(std::istream& in, bool weight_column = false) {
  return points_from_table(read_csv(in), weight_column);
}

inline PointSet read_points_file(const std::string& path, bool weight_column = false) {
  std::istringstream in(read_file(path));
  return read_points_csv(in, weight_column);
}

inline void write_points_csv(std::ostream& out, const PointSet& Q, bool with_weights = false) {
  for (Index i = 0; i < Q.size(); ++i) {
    for (Index j = 0; j < Q.dim(); ++j) out << (j ? "," : "") << format_number(Q.points()(i, j));
    if (with_weights) out << ',' << format_number(Q.weights()[i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline const json& unwrap(const json& j, std::initializer_list<const char*> keys) {
  if (j.is_object()) {
    for (const char* k : keys)
      if (j.contains(k)) return j.at(k);
    hyperdist::detail::fail(Errc::Parse, "JSON object lacks the expected key");
  }
  return j;
}

inline double number(const json& j) {
  if (!j.is_number()) hyperdist::detail::fail(Errc::Parse, "expected a JSON number");
  return j.get<double>();
}

inline Point2 point2(const json& j) {
  if (!j.is_array() || j.size() != 2) hyperdist::detail::fail(Errc::Parse, "expected an [x, y] pair");
  return {number(j[0]), number(j[1])};
}

inline std::vector<Point2> point_list(const json& j) {
  if (!j.is_array()) hyperdist::detail::fail(Errc::Parse, "expected an array of [x, y] pairs");
  std::vector<Point2> pts;
  pts.reserve(j.size());
  for (const auto& p : j) pts.push_back(point2(p));
  return pts;
}

}  // namespace detail

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    hyperdist::detail::fail(Errc::Parse, e.what());
  }
}

inline json read_json_file(const std::string& path) { return parse_json(read_file(path)); }

/// A coefficient array, or {"coeffs": [...], "oriented": bool}. Arrays take
/// `oriented_default`.
inline Hyperplane hyperplane_from_json(const json& j, bool oriented_default = false) {
  bool oriented = oriented_default;
  const json* arr = &j;
  if (j.is_object()) {
    arr = &detail::unwrap(j, {"coeffs", "line", "hyperplane"});
    if (j.contains("oriented")) oriented = j.at("oriented").get<bool>();
    if (arr->is_object()) return hyperplane_from_json(*arr, oriented);
  }
  if (!arr->is_array() || arr->size() < 2) hyperdist::detail::fail(Errc::Parse, "expected a coefficient array");
  Vector u(static_cast<Index>(arr->size()));
  for (std::size_t i = 0; i < arr->size(); ++i) u[static_cast<Index>(i)] = detail::number((*arr)[i]);
  return canonicalize(u, oriented);
}

/// Unoriented hyperplanes as a bare array; oriented ones as an object so the
/// flag survives a round trip.
inline json to_json(const Hyperplane& h) {
  json arr = json::array();
  for (Index i = 0; i < h.coeffs().size(); ++i) arr.push_back(rounded(h.coeffs()[i]));
  if (!h.oriented()) return arr;
  return json{{"coeffs", arr}, {"oriented", true}};
}

inline std::vector<Hyperplane> hyperplanes_from_json(const json& j, bool oriented_default = false) {
  const json& arr = detail::unwrap(j, {"lines", "hyperplanes"});
  if (!arr.is_array()) hyperdist::detail::fail(Errc::Parse, "expected an array of hyperplanes");
  std::vector<Hyperplane> out;
  out.reserve(arr.size());
  for (const auto& h : arr) out.push_back(hyperplane_from_json(h, oriented_default));
  return out;
}

inline json to_json(std::span<const Hyperplane> hs) {
  json arr = json::array();
  for (const auto& h : hs) arr.push_back(to_json(h));
  return arr;
}

inline CurveK curve_from_json(const json& j) {
  return CurveK(detail::point_list(detail::unwrap(j, {"curve", "vertices"})));
}

inline json to_json(const CurveK& c) {
  json arr = json::array();
  for (const auto& v : c.vertices()) arr.push_back({rounded(v.x()), rounded(v.y())});
  return arr;
}

/// Polyline (no segment constraints), same layout as a curve.
inline std::vector<Point2> polyline_from_json(const json& j) {
  return detail::point_list(detail::unwrap(j, {"polyline", "curve", "vertices"}));
}

/// True when j looks like a list of curves rather than a single curve.
inline bool is_curve_list(const json& j) {
  if (j.is_object()) return j.contains("curves");
  return j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array();
}

inline std::vector<CurveK> curves_from_json(const json& j) {
  if (!is_curve_list(j)) return {curve_from_json(j)};
  const json& arr = detail::unwrap(j, {"curves"});
  std::vector<CurveK> out;
  out.reserve(arr.size());
  for (const auto& c : arr) out.push_back(curve_from_json(c));
  return out;
}

inline json to_json(std::span<const CurveK> cs) {
  json arr = json::array();
  for (const auto& c : cs) arr.push_back(to_json(c));
  return arr;
}

/// List of uncertain points, each a list of [x, y] candidate locations.
inline std::vector<std::vector<Point2>> uncertain_from_json(const json& j) {
  const json& arr = detail::unwrap(j, {"points", "locations"});
  if (!arr.is_array()) hyperdist::detail::fail(Errc::Parse, "expected a list of location lists");
  std::vector<std::vector<Point2>> out;
  out.reserve(arr.size());
  for (const auto& p : arr) out.push_back(detail::point_list(p));
  return out;
}

// ---------------------------------------------------------------------------
// Sketch files
//
//   # point_dim: d        # n: stream length     # runs: k
//   # eps: ..  # delta: ..  # c: ..  # seed: s
//   run,a1,..,a{d+1}
//   0,...
//
// Run r was drawn with derive_seed(seed, r).

struct SketchFile {
  Metadata meta;
  std::vector<Sketch> runs;
  std::size_t n = 0;
};

inline void write_sketches(std::ostream& out, std::span<const Sketch> runs, std::uint64_t seed,
                           const Metadata& extra = {}) {
  hyperdist::detail::require(!runs.empty(), Errc::EmptyInput, "no sketches to write");
  const Sketch& first = runs.front();
  Metadata meta = extra;
  meta.emplace_back("point_dim", std::to_string(first.point_dim()));
  meta.emplace_back("n", std::to_string(first.seen_count()));
  meta.emplace_back("runs", std::to_string(runs.size()));
  meta.emplace_back("eps", format_number(first.params().eps));
  meta.emplace_back("delta", format_number(first.params().delta));
  meta.emplace_back("c", format_number(first.params().c));
  meta.emplace_back("seed", std::to_string(seed));
  write_metadata(out, meta);
  out << "run";
  for (Index j = 1; j <= first.columns(); ++j) out << ",a" << j;
  out << '\n';
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& row : runs[r].rows()) {
      out << r;
      for (Index j = 0; j < row.size(); ++j) out << ',' << format_number(row[j]);
      out << '\n';
    }
  }
}

inline SketchFile read_sketches(std::istream& in) {
  CsvTable table = read_csv(in);
  auto need = [&](std::string_view key) -> const std::string& {
    const std::string* v = table.find(key);
    if (!v) hyperdist::detail::fail(Errc::Parse, "sketch file lacks metadata '" + std::string(key) + "'");
    return *v;
  };
  SketchFile file;
  try {
    const Index point_dim = std::stol(need("point_dim"));
    file.n = std::stoul(need("n"));
    const std::size_t runs = std::stoul(need("runs"));
    SketchParams params;
    params.eps = std::stod(need("eps"));
    params.delta = std::stod(need("delta"));
    params.lambda = params.delta / params.eps;
    params.c = std::stod(need("c"));
    const std::uint64_t seed = std::stoull(need("seed"));

    std::vector<std::vector<Vector>> rows(runs);
    for (const auto& r : table.rows) {
      if (static_cast<Index>(r.size()) != point_dim + 2)
        hyperdist::detail::fail(Errc::Parse, "sketch row has the wrong number of columns");
      const auto run = static_cast<std::size_t>(r[0]);
      if (run >= runs || static_cast<double>(run) != r[0])
        hyperdist::detail::fail(Errc::Parse, "sketch row names an unknown run");
      Vector v(point_dim + 1);
      for (Index j = 0; j <= point_dim; ++j) v[j] = r[static_cast<std::size_t>(j) + 1];
      rows[run].push_back(std::move(v));
    }
    for (std::size_t r = 0; r < runs; ++r)
      file.runs.push_back(Sketch::from_rows(point_dim, params, std::move(rows[r]), file.n, derive_seed(seed, r)));
  } catch (const std::logic_error&) {
    hyperdist::detail::fail(Errc::Parse, "malformed sketch metadata");
  }
  file.meta = std::move(table.meta);
  return file;
}

}  // namespace hyperdist::io
