#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperdist/hyperdist.hpp"
#include "hyperdist/io.hpp"

namespace hyperdist::cli {
namespace {

using io::json;

// Failure tied to an input path (reported in the error payload).
class PathError : public Error {
 public:
  PathError(Errc code, const std::string& what, std::string path) : Error(code, what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct Config {
  std::string command;

  // inputs
  std::string points, first, second, third;
  bool weights = false;
  bool oriented = false;

  // numeric flags
  std::string variant = "signed";
  std::optional<std::size_t> n;
  std::optional<double> eps, delta, c, delta_bound, r;
  std::uint64_t seed = 0;
  std::size_t runs = 9;
  long k = 0;
  std::string algo;
  std::string out_path;
  std::string z_path;
  bool lines = false;
  bool bandwidth_free = false;
};

// ---------------------------------------------------------------------------
// inputs and metadata

struct Input {
  std::string path;
  std::string bytes;
};

Input load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PathError(Errc::Io, "cannot open input file", path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return {path, ss.str()};
}

// Parse errors are data errors on a known file.
template <typename Fn>
auto parse_input(const Input& in, Fn&& fn) {
  try {
    return fn(in.bytes);
  } catch (const PathError&) {
    throw;
  } catch (const Error& e) {
    throw PathError(e.code(), e.message(), in.path);
  } catch (const json::exception& e) {
    throw PathError(Errc::Parse, e.what(), in.path);
  }
}

PointSet read_points(const Input& in, bool weights) {
  return parse_input(in, [&](const std::string& bytes) {
    std::istringstream s(bytes);
    return io::read_points_csv(s, weights);
  });
}

json read_json(const Input& in) {
  return parse_input(in, [](const std::string& bytes) { return io::parse_json(bytes); });
}

class Meta {
 public:
  explicit Meta(const std::string& command) { add("command", command); }

  void add(const std::string& key, const std::string& value) { items_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, io::format_number(value)); }
  void add_int(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void input(const std::string& name, const std::string& bytes) {
    add("input." + name, "fnv1a64:" + io::digest(bytes));
  }

  const io::Metadata& items() const { return items_; }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : items_) j[k] = v;
    return j;
  }

 private:
  io::Metadata items_;
};

void emit_json(std::ostream& out, const Meta& meta, json body) {
  body["meta"] = meta.to_json();
  out << body.dump(2) << '\n';
}

void emit_scalar(std::ostream& out, const Meta& meta, double value) {
  io::write_metadata(out, meta.items());
  out << io::format_number(value) << '\n';
}

Hyperplane read_hyperplane(const Input& in, bool oriented) {
  return parse_input(in, [&](const std::string& bytes) {
    return io::hyperplane_from_json(io::parse_json(bytes), oriented);
  });
}

std::vector<Hyperplane> read_hyperplanes(const Input& in, bool oriented) {
  return parse_input(in, [&](const std::string& bytes) {
    const json j = io::parse_json(bytes);
    // A single hyperplane is a list of one.
    const bool single = (j.is_array() && !j.empty() && j[0].is_number()) ||
                        (j.is_object() && (j.contains("coeffs") || j.contains("line") || j.contains("hyperplane")));
    if (single) return std::vector<Hyperplane>{io::hyperplane_from_json(j, oriented)};
    return io::hyperplanes_from_json(j, oriented);
  });
}

std::vector<CurveK> read_curves(const Input& in) {
  return parse_input(in, [](const std::string& bytes) { return io::curves_from_json(io::parse_json(bytes)); });
}

std::uint64_t record_seed(Meta& meta, const Config& cfg) {
  meta.add_int("seed", cfg.seed);
  return cfg.seed;
}

double or_default(std::optional<double> v, double fallback) { return v.value_or(fallback); }

// ---------------------------------------------------------------------------
// subcommands

int cmd_dist(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points), h1in = load(cfg.first), h2in = load(cfg.second);
  const PointSet Q = read_points(pin, cfg.weights);
  const Hyperplane h1 = read_hyperplane(h1in, cfg.oriented);
  const Hyperplane h2 = read_hyperplane(h2in, cfg.oriented);
  if (cfg.weights && cfg.variant != "signed")
    detail::fail(Errc::BadParameter, "--weights is only defined for the signed variant");

  double value = 0.0;
  if (cfg.variant == "signed")
    value = cfg.weights ? dist_weighted(Q, h1, h2) : dist(Q, h1, h2);
  else if (cfg.variant == "unsigned")
    value = dist_unsigned(Q, h1, h2);
  else
    value = dist_frobenius(Q, h1, h2);

  Meta meta("dist");
  meta.add("variant", cfg.variant);
  meta.add("weighted", cfg.weights ? "true" : "false");
  meta.input("points", pin.bytes);
  meta.input("h1", h1in.bytes);
  meta.input("h2", h2in.bytes);
  emit_scalar(out, meta, value);
  return kExitOk;
}

int cmd_sensitivity(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points);
  const PointSet Q = read_points(pin, cfg.weights);
  const Vector sigma = sensitivities(Q);
  const Vector p = Q.probabilities();

  Meta meta("sensitivity");
  meta.add("weighted", cfg.weights ? "true" : "false");
  meta.add("total", sigma.dot(p));
  meta.input("points", pin.bytes);
  io::write_metadata(out, meta.items());
  out << "index,sensitivity\n";
  for (Index i = 0; i < sigma.size(); ++i) out << i << ',' << io::format_number(sigma[i]) << '\n';
  return kExitOk;
}

int cmd_coreset(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points);
  const PointSet Q = read_points(pin, cfg.weights);
  const double eps = or_default(cfg.eps, 0.2);
  const double delta = or_default(cfg.delta, 0.1);
  const std::size_t N = cfg.n ? *cfg.n : coreset_size(Q.dim() + 1, eps, delta);

  Meta meta("coreset");
  const std::uint64_t seed = record_seed(meta, cfg);
  meta.add_int("n", N);
  if (!cfg.n) {
    meta.add("eps", eps);
    meta.add("delta", delta);
  }
  meta.add("weighted", cfg.weights ? "true" : "false");
  meta.input("points", pin.bytes);

  const Coreset C = sensitivity_sample(Q, N, seed);
  io::write_metadata(out, meta.items());
  out << "index,weight\n";
  for (std::size_t j = 0; j < C.size(); ++j) out << C.indices[j] << ',' << io::format_number(C.weights[j]) << '\n';
  return kExitOk;
}

int cmd_stream_sample(const Config& cfg, std::istream& in, std::ostream& out) {
  const double eps = or_default(cfg.eps, 0.25);
  const double delta = or_default(cfg.delta, 0.1);
  if (cfg.runs < 1) detail::fail(Errc::BadParameter, "--runs must be >= 1");

  std::vector<Sketch> runs;
  io::Digest digest;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  std::vector<double> row;
  Vector q;
  while (std::getline(in, line)) {
    ++line_no;
    digest.update(line);
    digest.update("\n");
    const std::string_view t = io::detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = io::detail::split(t);
    row.assign(fields.size(), 0.0);
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) numeric = io::detail::parse_double(fields[j], row[j]);
    if (!numeric) {
      if (!header_allowed)
        throw PathError(Errc::Parse, "non-numeric field on line " + std::to_string(line_no), "<stdin>");
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    if (runs.empty()) {
      const auto d = static_cast<Index>(row.size());
      for (std::size_t r = 0; r < cfg.runs; ++r) runs.emplace_back(d, eps, delta, derive_seed(cfg.seed, r), cfg.c);
      q.resize(d);
    }
    if (static_cast<Index>(row.size()) != q.size())
      throw PathError(Errc::Parse, "inconsistent column count on line " + std::to_string(line_no), "<stdin>");
    for (Index j = 0; j < q.size(); ++j) q[j] = row[static_cast<std::size_t>(j)];
    for (auto& s : runs) s.offer_point(q);
  }
  if (runs.empty()) throw PathError(Errc::EmptyInput, "no points on standard input", "<stdin>");

  Meta meta("stream-sample");
  meta.add("input.stdin", "fnv1a64:" + digest.hex());
  if (cfg.out_path.empty()) {
    io::write_sketches(out, runs, cfg.seed, meta.items());
    return kExitOk;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw PathError(Errc::Io, "cannot open output file", cfg.out_path);
  io::write_sketches(file, runs, cfg.seed, meta.items());
  if (!file) throw PathError(Errc::Io, "failed writing output file", cfg.out_path);

  io::write_metadata(out, meta.items());
  out << "run,accepted\n";
  for (std::size_t r = 0; r < runs.size(); ++r) out << r << ',' << runs[r].accepted_count() << '\n';
  return kExitOk;
}

int cmd_sketch_dist(const Config& cfg, std::ostream& out) {
  const Input sin = load(cfg.points), h1in = load(cfg.first), h2in = load(cfg.second);
  const io::SketchFile file = parse_input(sin, [](const std::string& bytes) {
    std::istringstream s(bytes);
    return io::read_sketches(s);
  });
  const Hyperplane h1 = read_hyperplane(h1in, cfg.oriented);
  const Hyperplane h2 = read_hyperplane(h2in, cfg.oriented);
  const double n = static_cast<double>(file.n);

  Meta meta("sketch-dist");
  if (cfg.delta_bound) meta.add("delta_bound", *cfg.delta_bound);
  meta.input("sketch", sin.bytes);
  meta.input("h1", h1in.bytes);
  meta.input("h2", h2in.bytes);

  json runs = json::array();
  for (std::size_t r = 0; r < file.runs.size(); ++r) {
    const Sketch& s = file.runs[r];
    const Interval iv = cfg.delta_bound ? sketch_bounds(s, file.n, h1, h2, *cfg.delta_bound)
                                        : sketch_bounds_exact(s, file.n, h1, h2);
    const double norm_sq = s.squared_norm(h1.coeffs() - h2.coeffs());
    runs.push_back(json{{"run", r},
                    {"accepted", s.accepted_count()},
                    {"lower", io::rounded(iv.lower)},
                    {"upper", io::rounded(iv.upper)},
                    {"estimate", io::rounded(std::sqrt(norm_sq / n))}});
  }
  const double median = median_estimate(file.runs, h1, h2);
  emit_json(out, meta, {{"n", file.n}, {"runs", runs}, {"median_estimate", io::rounded(std::sqrt(median / n))}});
  return kExitOk;
}

int cmd_traj_dist(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points), ain = load(cfg.first);
  const PointSet Q = read_points(pin, false);
  const std::vector<CurveK> A = read_curves(ain);
  Meta meta("traj-dist");
  meta.input("points", pin.bytes);
  meta.input("curves", ain.bytes);

  if (!cfg.second.empty()) {
    const Input bin = load(cfg.second);
    const std::vector<CurveK> B = read_curves(bin);
    meta.input("curves2", bin.bytes);
    if (A.size() != 1 || B.size() != 1)
      throw PathError(Errc::Parse, "expected a single curve in each file", A.size() != 1 ? ain.path : bin.path);
    emit_scalar(out, meta, dist_curves(Q, A[0], B[0]));
    return kExitOk;
  }
  std::vector<LineRepresentation> reps;
  reps.reserve(A.size());
  for (const auto& c : A) reps.push_back(curve_to_lines(c));
  io::write_metadata(out, meta.items());
  out << "i,j,distance\n";
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      out << i << ',' << j << ',' << io::format_number(dist_curves(Q, reps[i], reps[j])) << '\n';
  return kExitOk;
}

int cmd_traj_embed(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points), cin = load(cfg.first);
  const PointSet Q = read_points(pin, false);
  const std::vector<CurveK> curves = read_curves(cin);
  std::vector<Vector> rows;
  rows.reserve(curves.size());
  for (const auto& c : curves) rows.push_back(curve_embed(Q, c));
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw PathError(Errc::MismatchedK, "curves differ in k", cin.path);

  Meta meta("traj-embed");
  meta.add_int("dimension", static_cast<std::uint64_t>(rows.front().size()));
  meta.input("points", pin.bytes);
  meta.input("curves", cin.bytes);
  io::write_metadata(out, meta.items());
  for (Index j = 0; j < rows.front().size(); ++j) out << (j ? "," : "") << 'e' << j + 1;
  out << '\n';
  for (const auto& r : rows) {
    for (Index j = 0; j < r.size(); ++j) out << (j ? "," : "") << io::format_number(r[j]);
    out << '\n';
  }
  return kExitOk;
}

int cmd_traj_simplify(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points);
  const auto polyline =
      parse_input(pin, [](const std::string& bytes) { return io::polyline_from_json(io::parse_json(bytes)); });
  const CurveK curve = simplify_to_k(polyline, cfg.k);
  Meta meta("traj-simplify");
  meta.add_int("k", static_cast<std::uint64_t>(cfg.k));
  meta.input("polyline", pin.bytes);
  emit_json(out, meta, {{"curve", io::to_json(curve)}});
  return kExitOk;
}

int cmd_traj_mean(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points), cin = load(cfg.first);
  const PointSet Q = read_points(pin, false);
  Meta meta("traj-mean");
  meta.add("mode", cfg.lines ? "lines" : "curves");
  meta.input("points", pin.bytes);
  meta.input(cfg.lines ? "lines" : "curves", cin.bytes);
  if (cfg.lines) {
    const std::vector<Hyperplane> lines = read_hyperplanes(cin, true);
    const OrientedMean m = mean_oriented_lines_detailed(lines, Q);
    emit_json(out, meta, {{"line", io::to_json(m.line)}, {"objective", io::rounded(m.objective)}});
    return kExitOk;
  }
  const std::vector<CurveK> curves = read_curves(cin);
  emit_json(out, meta, {{"curve", io::to_json(mean_curve(curves, Q))}});
  return kExitOk;
}

json index_array(const std::vector<std::size_t>& v) {
  json a = json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

json number_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(io::rounded(x));
  return a;
}

int cmd_cluster(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points), iin = load(cfg.first);
  const PointSet Q = read_points(pin, false);
  const json items = read_json(iin);
  const bool curves_mode = io::is_curve_list(items);
  if (cfg.k < 1) detail::fail(Errc::BadK, "--k must be >= 1");
  const auto k = static_cast<std::size_t>(cfg.k);

  // Both metrics are Euclidean distances between embeddings.
  std::vector<Vector> vectors;
  parse_input(iin, [&](const std::string&) {
    if (curves_mode) {
      for (const auto& c : io::curves_from_json(items)) vectors.push_back(curve_embed(Q, c));
    } else {
      for (const auto& h : io::hyperplanes_from_json(items, cfg.oriented)) vectors.push_back(embed(Q, h).values);
    }
    for (const auto& v : vectors)
      if (v.size() != vectors.front().size()) detail::fail(Errc::MismatchedK, "items differ in shape");
    return 0;
  });

  Meta meta("cluster");
  meta.add("algo", cfg.algo);
  meta.add_int("k", k);
  meta.add("items", curves_mode ? "curves" : "hyperplanes");
  if (cfg.algo == "kmeans") record_seed(meta, cfg);
  meta.input("points", pin.bytes);
  meta.input("items", iin.bytes);

  if (cfg.algo == "kcenter") {
    const KCenterResult r = gonzalez_k_center(
        vectors.size(), [&](std::size_t i, std::size_t j) { return (vectors[i] - vectors[j]).norm(); }, k);
    emit_json(out, meta,
              {{"centers", index_array(r.centers)},
               {"assignment", index_array(r.assignment)},
               {"radii", number_array(r.radii)},
               {"radius", io::rounded(r.radius())}});
    return kExitOk;
  }
  const KMeansResult r = lloyds_k_means(vectors, k, cfg.seed);
  std::vector<double> elbow;
  for (std::size_t kk = 1; kk < k; ++kk) elbow.push_back(lloyds_k_means(vectors, kk, cfg.seed).wcss);
  elbow.push_back(r.wcss);
  json centers = json::array();
  for (Index c = 0; c < r.centers.rows(); ++c) {
    json row = json::array();
    for (Index j = 0; j < r.centers.cols(); ++j) row.push_back(io::rounded(r.centers(c, j)));
    centers.push_back(row);
  }
  emit_json(out, meta,
            {{"assignment", index_array(r.assignment)},
             {"centers", centers},
             {"wcss", io::rounded(r.wcss)},
             {"wcss_history", number_array(r.wcss_history)},
             {"iterations", r.iterations},
             {"elbow", number_array(elbow)}});
  return kExitOk;
}

int cmd_kde(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points), hin = load(cfg.first), qin = load(cfg.second);
  const PointSet Q = read_points(pin, false);
  const std::vector<Hyperplane> H = read_hyperplanes(hin, cfg.oriented);
  const std::vector<Hyperplane> queries = read_hyperplanes(qin, cfg.oriented);

  Meta meta("kde");
  meta.add("kernel", "exp(-d^2)");
  meta.add("normalization", 1.0);
  meta.input("points", pin.bytes);
  meta.input("hyperplanes", hin.bytes);
  meta.input("queries", qin.bytes);
  io::write_metadata(out, meta.items());
  out << "query,kde\n";
  for (std::size_t i = 0; i < queries.size(); ++i) out << i << ',' << io::format_number(kde(Q, H, queries[i])) << '\n';
  return kExitOk;
}

int cmd_siegel(const Config& cfg, std::ostream& out) {
  const Input pin = load(cfg.points);
  const PointSet P = read_points(pin, false);
  if (P.dim() != 2) throw PathError(Errc::DimensionMismatch, "siegel needs points in the plane", pin.path);
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(P.size()));
  for (Index i = 0; i < P.size(); ++i) pts.emplace_back(P.points()(i, 0), P.points()(i, 1));
  const SiegelFit fit = siegel_estimator(pts);

  Meta meta("siegel");
  meta.input("points", pin.bytes);
  emit_json(out, meta,
            {{"slope", io::rounded(fit.slope)}, {"intercept", io::rounded(fit.intercept)}, {"line", io::to_json(fit.line)}});
  return kExitOk;
}

int cmd_uncertain_sample(const Config& cfg, std::ostream& out) {
  const Input uin = load(cfg.first);
  const UncertainPointSet P(
      parse_input(uin, [](const std::string& bytes) { return io::uncertain_from_json(io::parse_json(bytes)); }));
  const std::size_t N = cfg.n ? *cfg.n : siegel_sample_size(cfg.eps.value_or(0.05), cfg.delta.value_or(0.1));

  Meta meta("uncertain-sample");
  const std::uint64_t seed = record_seed(meta, cfg);
  meta.add_int("n", N);
  meta.input("uncertain", uin.bytes);

  const EstimatorSample T = uncertain_siegel_distribution(P, N, seed);
  json body = {{"lines", io::to_json(T.lines)}};
  if (!cfg.z_path.empty()) {
    const Input zin = load(cfg.z_path);
    const Hyperplane z = read_hyperplane(zin, false);
    const PointSet Q = cfg.points.empty() ? P.all_locations() : read_points(load(cfg.points), false);
    const double r = cfg.r.value_or(std::numeric_limits<double>::infinity());
    meta.add("r", r);
    meta.input("z", zin.bytes);
    body["ball_probability"] = io::rounded(empirical_ball_probability(T, Q, z, r));
  }
  emit_json(out, meta, std::move(body));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// errors

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Data: return "data";
    case ErrorCategory::Numerical: return "numerical";
  }
  return "data";
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Numerical: return kExitNumerical;
    case ErrorCategory::Data: return kExitData;
  }
  return kExitData;
}

int report(std::ostream& err, int code, std::string_view category, std::string_view kind, const std::string& message,
           const std::string& path = {}) {
  json e = {{"category", category}, {"code", kind}, {"message", message}, {"exit_code", code}};
  if (!path.empty()) e["path"] = path;
  err << json{{"error", e}}.dump() << '\n';
  return code;
}

int report(std::ostream& err, const Error& e, const std::string& path = {}) {
  return report(err, exit_code(e.category()), category_name(e.category()), to_string(e.code()), e.message(), path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-dependent distances between hyperplanes and trajectories", "hyperdist"};
  app.require_subcommand(1);
  Config cfg;

  auto points_arg = [&](CLI::App* s, const char* what = "points CSV") {
    s->add_option("points", cfg.points, what)->required();
  };
  auto weights_flag = [&](CLI::App* s) { s->add_flag("--weights", cfg.weights, "last CSV column holds weights"); };
  auto oriented_flag = [&](CLI::App* s) {
    s->add_flag("--oriented", cfg.oriented, "treat bare coefficient arrays as oriented");
  };
  auto seed_opt = [&](CLI::App* s) { s->add_option("--seed", cfg.seed, "random seed")->capture_default_str(); };

  auto* dist_cmd = app.add_subcommand("dist", "distance between two hyperplanes over a point set");
  points_arg(dist_cmd);
  dist_cmd->add_option("h1", cfg.first, "hyperplane JSON")->required();
  dist_cmd->add_option("h2", cfg.second, "hyperplane JSON")->required();
  dist_cmd->add_option("--variant", cfg.variant, "signed, unsigned or frobenius")
      ->check(CLI::IsMember({"signed", "unsigned", "frobenius"}))
      ->capture_default_str();
  weights_flag(dist_cmd);
  oriented_flag(dist_cmd);

  auto* sens_cmd = app.add_subcommand("sensitivity", "per-point sensitivities as CSV");
  points_arg(sens_cmd);
  weights_flag(sens_cmd);

  auto* core_cmd = app.add_subcommand("coreset", "sensitivity-sampled coreset as index,weight CSV");
  points_arg(core_cmd);
  core_cmd->add_option("--n", cfg.n, "sample size (default from --eps/--delta)");
  core_cmd->add_option("--eps", cfg.eps, "accuracy for the default sample size (0.2)");
  core_cmd->add_option("--delta", cfg.delta, "failure probability for the default sample size (0.1)");
  seed_opt(core_cmd);
  weights_flag(core_cmd);

  auto* stream_cmd = app.add_subcommand("stream-sample", "online row sampling of points read from stdin");
  stream_cmd->add_option("--eps", cfg.eps, "accuracy in (0,1) (0.25)");
  stream_cmd->add_option("--delta", cfg.delta, "additive error (0.1)");
  stream_cmd->add_option("--runs", cfg.runs, "independent sketches for the median trick")->capture_default_str();
  stream_cmd->add_option("--c", cfg.c, "oversampling factor (default 8 ln((d+1)/eps^2))");
  stream_cmd->add_option("--out", cfg.out_path, "sketch file (default: stdout)");
  seed_opt(stream_cmd);

  auto* sd_cmd = app.add_subcommand("sketch-dist", "distance bounds from a sketch file");
  sd_cmd->add_option("sketch", cfg.points, "sketch CSV")->required();
  sd_cmd->add_option("h1", cfg.first, "hyperplane JSON")->required();
  sd_cmd->add_option("h2", cfg.second, "hyperplane JSON")->required();
  sd_cmd->add_option("--delta-bound", cfg.delta_bound, "offset bound Delta (default: exact coefficient norm)");
  oriented_flag(sd_cmd);

  auto* td_cmd = app.add_subcommand("traj-dist", "curve distance; pairwise table for a single curve list");
  points_arg(td_cmd);
  td_cmd->add_option("curves", cfg.first, "curve or curve list JSON")->required();
  td_cmd->add_option("other", cfg.second, "second curve JSON");

  auto* te_cmd = app.add_subcommand("traj-embed", "curve embeddings as CSV");
  points_arg(te_cmd);
  te_cmd->add_option("curves", cfg.first, "curve list JSON")->required();

  auto* ts_cmd = app.add_subcommand("traj-simplify", "simplify a polyline to k segments");
  ts_cmd->add_option("polyline", cfg.points, "polyline JSON")->required();
  ts_cmd->add_option("--k", cfg.k, "segment count")->required();

  auto* tm_cmd = app.add_subcommand("traj-mean", "mean curve, or mean oriented line with --lines");
  points_arg(tm_cmd);
  tm_cmd->add_option("input", cfg.first, "curve list JSON (or line list with --lines)")->required();
  tm_cmd->add_flag("--lines", cfg.lines, "input holds oriented lines");

  auto* cl_cmd = app.add_subcommand("cluster", "k-center or k-means over hyperplanes or curves");
  points_arg(cl_cmd);
  cl_cmd->add_option("items", cfg.first, "hyperplane list or curve list JSON")->required();
  cl_cmd->add_option("--algo", cfg.algo, "kcenter or kmeans")->required()->check(CLI::IsMember({"kcenter", "kmeans"}));
  cl_cmd->add_option("--k", cfg.k, "cluster count")->required();
  seed_opt(cl_cmd);
  oriented_flag(cl_cmd);

  auto* kde_cmd = app.add_subcommand("kde", "kernel density of query hyperplanes");
  points_arg(kde_cmd);
  kde_cmd->add_option("hyperplanes", cfg.first, "hyperplane list JSON")->required();
  kde_cmd->add_option("queries", cfg.second, "query hyperplane(s) JSON")->required();
  kde_cmd->add_flag("--bandwidth-free", cfg.bandwidth_free, "kernel exp(-d^2) with Z = 1 (the only kernel)");
  oriented_flag(kde_cmd);

  auto* sg_cmd = app.add_subcommand("siegel", "repeated-median line fit of 2-D points");
  points_arg(sg_cmd, "2-D points CSV");

  auto* us_cmd = app.add_subcommand("uncertain-sample", "Siegel fits over random traversals of uncertain points");
  us_cmd->add_option("uncertain", cfg.first, "uncertain points JSON")->required();
  us_cmd->add_option("--n", cfg.n, "sample count (default ceil(4/eps^2 ln(2/delta)))");
  us_cmd->add_option("--eps", cfg.eps, "accuracy for the default sample count (0.05)");
  us_cmd->add_option("--delta", cfg.delta, "failure probability for the default sample count (0.1)");
  us_cmd->add_option("--z", cfg.z_path, "ball center hyperplane JSON for ball_probability");
  us_cmd->add_option("--r", cfg.r, "ball radius (default infinity)");
  us_cmd->add_option("--points", cfg.points, "base set for the ball distance (default: all locations)");
  seed_opt(us_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, kExitUsage, "usage", "Usage", e.what());
  }

  try {
    if (dist_cmd->parsed()) return cmd_dist(cfg, out);
    if (sens_cmd->parsed()) return cmd_sensitivity(cfg, out);
    if (core_cmd->parsed()) return cmd_coreset(cfg, out);
    if (stream_cmd->parsed()) return cmd_stream_sample(cfg, in, out);
    if (sd_cmd->parsed()) return cmd_sketch_dist(cfg, out);
    if (td_cmd->parsed()) return cmd_traj_dist(cfg, out);
    if (te_cmd->parsed()) return cmd_traj_embed(cfg, out);
    if (ts_cmd->parsed()) return cmd_traj_simplify(cfg, out);
    if (tm_cmd->parsed()) return cmd_traj_mean(cfg, out);
    if (cl_cmd->parsed()) return cmd_cluster(cfg, out);
    if (kde_cmd->parsed()) return cmd_kde(cfg, out);
    if (sg_cmd->parsed()) return cmd_siegel(cfg, out);
    if (us_cmd->parsed()) return cmd_uncertain_sample(cfg, out);
  } catch (const PathError& e) {
    return report(err, e, e.path());
  } catch (const Error& e) {
    return report(err, e);
  } catch (const json::exception& e) {
    return report(err, kExitData, "data", "Parse", e.what());
  } catch (const std::exception& e) {
    return report(err, kExitData, "data", "Internal", e.what());
  }
  return report(err, kExitUsage, "usage", "Usage", "no subcommand given");
}

}  // namespace hyperdist::cli
