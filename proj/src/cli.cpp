#include "pacurves/cli.hpp"

#include "pacurves/error.hpp"
#include "pacurves/golden.hpp"
#include "pacurves/pa_analysis.hpp"
#include "pacurves/pa_synthesis.hpp"
#include "pacurves/property_suite.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace pacurves {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

std::string fmt(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Usage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Usage, "cannot write '" + path.string() + "'");
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Usage, "cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

// Numeric CSV with a header row; the first column is the parameter.
struct Table {
  std::vector<std::string> header;
  std::vector<double> s;
  std::vector<std::vector<double>> cols;
};

std::string trim(std::string x) {
  const auto b = x.find_first_not_of(" \t\r");
  const auto e = x.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
}

Table read_table(const std::string& path, std::size_t want_cols) {
  std::istringstream in(read_file(path));
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (t.header.empty()) {
      t.header = cells;
      if (t.header.size() != want_cols + 1) {
        throw Error(ErrorCode::Usage, path + ": expected " + std::to_string(want_cols + 1) + " columns, found " +
                                          std::to_string(t.header.size()));
      }
      t.cols.assign(want_cols, {});
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::Usage, path + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    std::vector<double> vals;
    for (const std::string& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0' || !std::isfinite(v)) {
        throw Error(ErrorCode::Usage, path + ":" + std::to_string(lineno) + ": '" + c + "' is not a number");
      }
      vals.push_back(v);
    }
    t.s.push_back(vals[0]);
    for (std::size_t j = 0; j < want_cols; ++j) t.cols[j].push_back(vals[j + 1]);
  }
  if (t.header.empty()) throw Error(ErrorCode::Usage, path + ": empty file");
  return t;
}

struct LoadedCurve {
  ArcLengthCurve curve;
  /// Parameter of the input file at each arc-length node.
  std::vector<double> raw_at_node;
  bool reparametrized = false;
};

LoadedCurve load_curve(const ManifoldModel& model, const std::string& path) {
  const Table t = read_table(path, static_cast<std::size_t>(model.coord_dim()));
  const Grid raw(t.s);
  std::vector<Vec> points(raw.size(), Vec(model.coord_dim()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (int j = 0; j < model.coord_dim(); ++j) points[i][j] = t.cols[static_cast<std::size_t>(j)][i];
    model.check_point(points[i]);
  }
  const VectorSeries vel = differentiate_series(VectorSeries(raw, points));
  std::vector<double> speed(raw.size());
  double defect = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    speed[i] = model.norm(points[i], model.tangent_part(points[i], vel.values[i]));
    defect = std::max(defect, std::abs(speed[i] - 1.0));
  }
  if (defect <= ArcLengthCurve::kSpeedTolerance) {
    std::vector<Vec> velocity(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) velocity[i] = model.tangent_part(points[i], vel.values[i]) / speed[i];
    return LoadedCurve{ArcLengthCurve::from_samples(model, raw, points, std::move(velocity)), t.s, false};
  }
  ArcLengthCurve curve = arclength_reparametrize(model, raw, points);
  // Invert the arc-length function to map new nodes back to the file's parameter.
  const ScalarSeries length = cumulative_integral(ScalarSeries(raw, speed), raw.front(), raw.front());
  const Grid by_length(length.values);
  std::vector<double> raw_at(curve.grid.size());
  for (std::size_t i = 0; i < raw_at.size(); ++i) {
    raw_at[i] = interpolate(by_length, t.s, std::min(curve.grid[i], by_length.back()));
  }
  return LoadedCurve{std::move(curve), std::move(raw_at), true};
}

// Table columns sampled at the curve nodes.
std::vector<std::vector<double>> resample(const Table& t, const LoadedCurve& lc, bool allow_interpolation,
                                          const std::string& what) {
  const Grid& g = lc.curve.grid;
  bool same = !lc.reparametrized && t.s.size() == g.size();
  for (std::size_t i = 0; same && i < g.size(); ++i) same = std::abs(t.s[i] - g[i]) <= 1e-12 * (1.0 + std::abs(g[i]));
  if (same) return t.cols;
  if (!allow_interpolation) {
    throw Error(ErrorCode::Usage, what + " grid differs from the curve grid; pass --interpolate to resample it");
  }
  const Grid src(t.s);
  std::vector<std::vector<double>> out(t.cols.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = lc.raw_at_node[i];
    if (!src.contains(u)) throw Error(ErrorCode::Usage, what + " does not cover the curve's parameter range");
    for (std::size_t j = 0; j < t.cols.size(); ++j) out[j][i] = interpolate(src, t.cols[j], u);
  }
  return out;
}

std::string field_csv(const ArcLengthCurve& curve, const FieldAlongCurve& field) {
  std::string out = "s";
  for (long j = 0; j < field.vectors.front().size(); ++j) out += ",v" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < field.size(); ++i) {
    out += fmt(curve.grid[i]);
    for (double v : field.vectors[i]) out += "," + fmt(v);
    out += '\n';
  }
  return out;
}

std::string curve_csv(const ArcLengthCurve& curve) {
  std::string out = "s";
  for (int j = 0; j < curve.model.coord_dim(); ++j) out += ",x" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += fmt(curve.grid[i]);
    for (double v : curve.points[i]) out += "," + fmt(v);
    out += '\n';
  }
  return out;
}

// Plot-ready profiles: curvatures, then angle data and law when present.
std::string profiles_csv(const ArcLengthCurve& curve, const FrenetData& frenet, const PADecomposition* decomp,
                         const TorseFormingLaw* law) {
  std::vector<std::pair<std::string, const std::vector<double>*>> cols;
  const auto& k = frenet.curvatures.kappa;
  for (std::size_t j = 0; j < k.size(); ++j) {
    cols.emplace_back(j == 0 ? "kappa" : (j == 1 ? "tau" : "kappa" + std::to_string(j + 1)), &k[j].values);
  }
  if (decomp) {
    cols.emplace_back("theta", &decomp->theta.values);
    cols.emplace_back("oriented_theta", &decomp->oriented_theta.values);
    cols.emplace_back("cos_theta", &decomp->cos_theta.values);
    for (std::size_t j = 0; j < decomp->lambdas.size(); ++j) {
      cols.emplace_back("lambda" + std::to_string(j), &decomp->lambdas[j].values);
    }
  }
  if (law) {
    cols.emplace_back("f", &law->f.values);
    cols.emplace_back("omega", &law->omega_t.values);
  }
  std::string out = "s";
  for (const auto& c : cols) out += "," + c.first;
  out += '\n';
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += fmt(curve.grid[i]);
    for (const auto& c : cols) out += "," + fmt((*c.second)[i]);
    out += '\n';
  }
  return out;
}

std::pair<double, double> parse_span(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Usage, "span must look like a:b");
  try {
    std::size_t n1 = 0, n2 = 0;
    const std::string l = text.substr(0, colon), r = text.substr(colon + 1);
    const double a = std::stod(l, &n1), b = std::stod(r, &n2);
    if (n1 != l.size() || n2 != r.size() || !(b > a)) throw Error(ErrorCode::Usage, "span must satisfy a < b");
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Usage, "span must look like a:b");
  }
}

Vec parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    char* end = nullptr;
    const std::string c = trim(cell);
    v.push_back(std::strtod(c.c_str(), &end));
    if (c.empty() || *end != '\0') throw Error(ErrorCode::Usage, "bad vector component '" + c + "'");
  }
  return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PA_CURVES_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0' || cap < 1) {
      throw Error(ErrorCode::Usage, "PA_CURVES_THREADS must be a positive integer");
    }
    n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::min<unsigned>(n, static_cast<unsigned>(jobs));
}

// --- subcommands -----------------------------------------------------------

struct GoldenJob {
  std::string id;
  std::string json;
  std::string profiles;
  bool pass = false;
  std::optional<Error> error;
};

void run_golden_job(GoldenJob& job, std::optional<double> step) {
  try {
    const GoldenFixture fx = load_fixture(job.id, step);
    const Report report = run_golden(fx);
    job.pass = report.pass();
    job.json = to_json(report);
    const FrenetData frenet = frenet_apparatus(fx.curve);
    std::optional<PADecomposition> decomp;
    std::optional<LawEstimate> law;
    if (fx.field) {
      decomp = decompose(fx.curve, frenet, *fx.field);
      law = estimate_law(fx.curve, *fx.field);
    }
    job.profiles = profiles_csv(fx.curve, frenet, decomp ? &*decomp : nullptr, law ? &law->law : nullptr);
  } catch (const Error& e) {
    job.error = e;
  }
}

int cmd_golden(const std::string& which, const std::string& out_dir, std::optional<double> step) {
  std::vector<GoldenJob> jobs;
  if (which == "all") {
    for (const std::string& id : fixture_ids()) jobs.push_back(GoldenJob{id, {}, {}, false, std::nullopt});
  } else {
    load_fixture(which, step);
    jobs.push_back(GoldenJob{which, {}, {}, false, std::nullopt});
  }
  const fs::path dir = prepare_out(out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) run_golden_job(jobs[k], step);
  };
  std::vector<std::thread> pool;
  const unsigned n = worker_count(jobs.size());
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // Written from one thread in id order so the output never depends on scheduling.
  int status = kExitOk;
  for (const GoldenJob& job : jobs) {
    if (job.error) {
      std::cerr << job.id << ": " << job.error->what() << '\n';
      status = std::max(status, job.error->numerical() ? kExitNumerical : kExitUsage);
      continue;
    }
    write_file(dir / (job.id + ".json"), job.json);
    write_file(dir / (job.id + "_profiles.csv"), job.profiles);
    std::cout << job.id << ' ' << (job.pass ? "pass" : "FAIL") << '\n';
    if (!job.pass && status == kExitOk) status = kExitVerification;
  }
  return status;
}

struct AnalyzeOptions {
  std::string model;
  std::string curve;
  std::string field;
  bool interpolate = false;
  double tol = 1e-4;
  std::string out = ".";
};

int cmd_analyze(const AnalyzeOptions& o) {
  const ManifoldModel model = ManifoldModel::parse(o.model);
  const LoadedCurve lc = load_curve(model, o.curve);
  std::optional<FieldAlongCurve> field;
  if (!o.field.empty()) {
    const auto cols = resample(read_table(o.field, static_cast<std::size_t>(model.coord_dim())), lc, o.interpolate,
                               "field");
    FieldAlongCurve v{lc.curve.grid, std::vector<Vec>(lc.curve.grid.size(), Vec(model.coord_dim()))};
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (int j = 0; j < model.coord_dim(); ++j) v.vectors[i][j] = cols[static_cast<std::size_t>(j)][i];
    }
    field = std::move(v);
  }
  Analysis a = analyze(lc.curve, field, o.tol);
  a.report.subject.insert(a.report.subject.begin(),
                          {{"model", model.spec()}, {"curve", fs::path(o.curve).filename().string()}});
  if (field) a.report.subject.emplace_back("field", fs::path(o.field).filename().string());
  a.report.subject.emplace_back("reparametrized", lc.reparametrized ? "true" : "false");
  if (lc.reparametrized) a.report.notes.push_back("input was not unit speed; resampled by arc length");

  const fs::path dir = prepare_out(o.out);
  write_file(dir / "analysis.json", to_json(a.report));
  write_file(dir / "profiles.csv", profiles_csv(lc.curve, a.frenet, a.decomposition ? &*a.decomposition : nullptr,
                                                a.law ? &a.law->law : nullptr));
  std::cout << "analysis " << (a.report.pass() ? "pass" : "FAIL") << '\n';
  return a.report.pass() ? kExitOk : kExitVerification;
}

struct TransportOptions {
  std::string model;
  std::string curve;
  std::string law;
  std::string v0;
  std::optional<double> at;
  std::string cls = "generic";
  bool interpolate = false;
  std::string out = ".";
};

int cmd_transport(const TransportOptions& o) {
  const ManifoldModel model = ManifoldModel::parse(o.model);
  const LoadedCurve lc = load_curve(model, o.curve);
  const auto cols = resample(read_table(o.law, 2), lc, o.interpolate, "law");
  const Grid& g = lc.curve.grid;
  const TorseFormingLaw law{ScalarSeries(g, cols[0]), ScalarSeries(g, cols[1]), parse_torse_class(o.cls)};
  const Vec v0 = parse_vector(o.v0);
  if (v0.size() != model.coord_dim()) throw Error(ErrorCode::Usage, "--v0 has the wrong number of components");
  std::optional<double> anchor = o.at;
  if (anchor && lc.reparametrized) throw Error(ErrorCode::Usage, "--at needs a unit-speed curve file");
  const FieldAlongCurve v = transport_field(lc.curve, law, v0, anchor);
  const fs::path dir = prepare_out(o.out);
  write_file(dir / "field.csv", field_csv(lc.curve, v));
  return kExitOk;
}

struct SynthesizeOptions {
  std::string params;
  std::string span;
  std::optional<double> step;
  double tol = 1e-4;
  std::string out = ".";
};

int cmd_synthesize(const SynthesizeOptions& o) {
  SynthesisSpec spec = parse_synthesis_spec(read_file(o.params));
  if (!o.span.empty()) std::tie(spec.a, spec.b) = parse_span(o.span);
  if (o.step) spec.step = *o.step;
  const SynthesisResult r = run_synthesis_spec(spec, o.tol);
  const ArcLengthCurve& curve = r.synthesized.curve;
  const fs::path dir = prepare_out(o.out);
  write_file(dir / "report.json", to_json(r.report));
  write_file(dir / "curve.csv", curve_csv(curve));
  write_file(dir / "field.csv", field_csv(curve, r.field));
  write_file(dir / "profiles.csv", profiles_csv(curve, r.synthesized.frenet, &r.prescribed, &r.law));
  std::cout << spec.name << ' ' << (r.report.pass() ? "pass" : "FAIL") << '\n';
  return r.report.pass() ? kExitOk : kExitVerification;
}

int cmd_selfcheck(std::uint64_t seed, int count, const std::string& out) {
  if (count < 1) throw Error(ErrorCode::Usage, "--count must be positive");
  const Report r = transport_property_suite(seed, count);
  for (const Quantity& q : r.quantities) {
    std::cout << q.name << " max " << fmt(q.max_err) << " tol " << fmt(q.tolerance) << (q.pass ? " pass" : " FAIL")
              << '\n';
  }
  if (!out.empty()) write_file(prepare_out(out) / "selfcheck.json", to_json(r));
  return r.pass() ? kExitOk : kExitVerification;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Prescribed-angle curves and torse-forming fields"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-models", "Print the supported model specs");

  std::string golden_id = "all";
  std::string golden_out = "golden_out";
  std::optional<double> golden_step;
  auto* golden = app.add_subcommand("golden", "Run the worked-example fixtures");
  golden->add_option("id", golden_id, "Fixture id (G1..G6) or 'all'");
  golden->add_option("--out", golden_out, "Output directory");
  golden->add_option("--step", golden_step, "Grid step instead of the fixture default")->check(CLI::PositiveNumber);

  AnalyzeOptions ao;
  auto* analyze_cmd = app.add_subcommand("analyze", "Frenet profiles, PA decomposition and checks for a curve");
  analyze_cmd->add_option("--model", ao.model, "Model spec, e.g. euclidean:3")->required();
  analyze_cmd->add_option("--curve", ao.curve, "Curve CSV: s,x1..xk")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--field", ao.field, "Field CSV: s,v1..vk")->check(CLI::ExistingFile);
  analyze_cmd->add_flag("--interpolate", ao.interpolate, "Resample the field onto the curve grid");
  analyze_cmd->add_option("--tol", ao.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--out", ao.out, "Output directory");

  TransportOptions to;
  auto* transport = app.add_subcommand("transport", "Integrate a torse-forming law along a curve");
  transport->add_option("--model", to.model, "Model spec")->required();
  transport->add_option("--curve", to.curve, "Curve CSV: s,x1..xk")->required()->check(CLI::ExistingFile);
  transport->add_option("--law", to.law, "Law CSV: s,f,omega")->required()->check(CLI::ExistingFile);
  transport->add_option("--v0", to.v0, "Initial vector, comma separated")->required();
  transport->add_option("--at", to.at, "Parameter of the initial vector (default: first node)");
  transport->add_option("--class", to.cls, "generic, concircular, torqued, anti-torqued or parallel");
  transport->add_flag("--interpolate", to.interpolate, "Resample the law onto the curve grid");
  transport->add_option("--out", to.out, "Output directory");

  SynthesizeOptions so;
  auto* synth = app.add_subcommand("synthesize", "Build a PA curve from prescribed data and verify it");
  synth->add_option("params", so.params, "Parameter JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--span", so.span, "Parameter span a:b");
  synth->add_option("--step", so.step, "Grid step")->check(CLI::PositiveNumber);
  synth->add_option("--tol", so.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  synth->add_option("--out", so.out, "Output directory");

  std::uint64_t seed = 1;
  int count = 100;
  std::string self_out;
  auto* self = app.add_subcommand("selfcheck", "Seeded randomized transport property checks");
  self->add_option("--seed", seed, "Generator seed");
  self->add_option("--count", count, "Number of instances");
  self->add_option("--out", self_out, "Directory for selfcheck.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*list) {
      for (const std::string& line : model_catalog()) std::cout << line << '\n';
      return kExitOk;
    }
    if (*golden) return cmd_golden(golden_id, golden_out, golden_step);
    if (*analyze_cmd) return cmd_analyze(ao);
    if (*transport) return cmd_transport(to);
    if (*synth) return cmd_synthesize(so);
    if (*self) return cmd_selfcheck(seed, count, self_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace pacurves
