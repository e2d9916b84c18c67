#include "sysfree/cli_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "sysfree/classical_baselines.hpp"
#include "sysfree/covering_graph.hpp"
#include "sysfree/errors.hpp"
#include "sysfree/surgery_geometry.hpp"

namespace fs = std::filesystem;

namespace sysfree::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::int64_t parse_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw UsageError("malformed integer for " + what + ": '" + text + "'");
  }
  if (used != text.size()) throw UsageError("malformed integer for " + what + ": '" + text + "'");
  return v;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("malformed number for " + what + ": '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw UsageError("malformed number for " + what + ": '" + text + "'");
  }
  return v;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_int(item, what));
  if (out.empty()) throw UsageError(what + " must not be empty");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(item, what));
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate_p(std::int64_t p) {
  require(p >= 3 && p % 4 == 3 && arith::is_prime(p),
          "--p must be a prime congruent to 3 mod 4, got " + std::to_string(p));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

json witness_json(const arith::GroupElement& e) {
  const auto& t = e.tuple();
  return json::array({t[0], t[1], t[2], t[3]});
}

json certificate_json(const arith::SystoleCertificate& c) {
  return {{"absTrace", c.abs_trace}, {"length", c.length}, {"witness", witness_json(c.witness)}};
}

std::string scalar_text(const json& v) {
  if (v.is_number_float()) return format_real(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_field(const json& v) {
  std::string s = scalar_text(v);
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  return s;
}

std::string csv_table(const json& rows, const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t k = 0; k < columns.size(); ++k) out += (k ? "," : "") + columns[k];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) out += ",";
      if (row.contains(columns[k])) out += csv_field(row.at(columns[k]));
    }
    out += "\n";
  }
  return out;
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, item] : v.items()) flatten(item, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + scalar_text(v[i]);
    out.emplace_back(prefix, s);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

std::vector<std::string> keys_of(const json& row) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : row.items()) keys.push_back(k);
  return keys;
}

std::optional<fs::path> cache_dir_of(const RunConfig& config) {
  if (config.cache_dir.empty()) return std::nullopt;
  return fs::path(config.cache_dir);
}

// ----- command execution -----

json run_systole(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  const arith::FuchsianParams params(pr.at("p").get<std::int64_t>());
  const arith::CongruenceLevel level(pr.at("N").get<std::int64_t>());
  const auto tb = pr.at("traceBound").get<std::int64_t>();
  const auto box = pr.at("box").get<std::int64_t>();
  const auto threads = pr.at("threads").get<unsigned>();
  const auto cache = cache_dir_of(cfg);
  const auto first = load_or_compute_spectrum(params, level, tb, box, cache, threads);
  const auto second = load_or_compute_spectrum(params, level, tb, 2 * box, cache, threads);
  const auto c1 = arith::certificate_from_spectrum(first);
  const auto c2 = arith::certificate_from_spectrum(second);
  json out = certificate_json(c1);
  out["witnessCount"] = first.entries.front().witness_count();
  out["doubledBox"] = certificate_json(c2);
  out["stable"] = c1.abs_trace == c2.abs_trace;
  return out;
}

json run_spectrum(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  const arith::FuchsianParams params(pr.at("p").get<std::int64_t>());
  const arith::CongruenceLevel level(pr.at("N").get<std::int64_t>());
  const auto spectrum = load_or_compute_spectrum(params, level, pr.at("traceBound").get<std::int64_t>(),
                                                 pr.at("box").get<std::int64_t>(), cache_dir_of(cfg),
                                                 pr.at("threads").get<unsigned>());
  return spectrum_to_json(spectrum);
}

json run_residue_order(const RunConfig& cfg) {
  const arith::FuchsianParams params(cfg.params.at("p").get<std::int64_t>());
  json rows = json::array();
  for (std::int64_t n : cfg.params.at("N").get<std::vector<std::int64_t>>()) {
    const auto order = arith::residue_group_order(params, arith::CongruenceLevel(n));
    const double nd = static_cast<double>(n);
    rows.push_back({{"N", n},
                    {"order", order},
                    {"orderOverN2", static_cast<double>(order) / (nd * nd)},
                    {"orderOverN3", static_cast<double>(order) / (nd * nd * nd)}});
  }
  return {{"rows", rows}};
}

json run_genus(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  const arith::Rational chi0 = parse_rational(pr.at("chi0").get<std::string>());
  std::int64_t index = 0;
  if (pr.contains("index")) {
    index = pr.at("index").get<std::int64_t>();
  } else {
    index = arith::residue_group_order(arith::FuchsianParams(pr.at("p").get<std::int64_t>()),
                                       arith::CongruenceLevel(pr.at("N").get<std::int64_t>()));
  }
  const double genus = arith::genus_estimate(index, chi0);
  return {{"index", index}, {"genus", genus}, {"integral", genus == std::floor(genus)}};
}

json run_diameter(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  const auto g = pr.at("genus").get<std::int64_t>();
  const double bound = arith::diameter_upper_bound(g, pr.at("cIso").get<double>(),
                                                   pr.at("seedArea").get<double>());
  return {{"diameterBound", bound},
          {"area", 4.0 * std::numbers::pi * static_cast<double>(g - 1)}};
}

json run_baseline(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  const auto kind = pr.at("kind").get<std::string>();
  if (kind == "loewner") {
    const auto b = pr.at("basis").get<std::vector<double>>();
    const baselines::Lattice2D lattice({b[0], b[1]}, {b[2], b[3]});
    const double ratio = baselines::loewner_ratio(lattice);
    return {{"systole", baselines::lattice_systole(lattice)},
            {"area", lattice.covolume()},
            {"ratio", ratio},
            {"bound", baselines::kLoewnerBound},
            {"sharp", std::abs(ratio - baselines::kLoewnerBound) <= 1e-9}};
  }
  const baselines::RoundProjectivePlane plane(pr.at("radius").get<double>());
  const double ratio = baselines::pu_ratio(plane);
  return {{"systole", plane.systole()},
          {"area", plane.area()},
          {"ratio", ratio},
          {"bound", baselines::kPuBound},
          {"sharp", std::abs(ratio - baselines::kPuBound) <= 1e-9}};
}

json run_surgery_verify(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  const double eps = pr.at("eps").get<double>();
  const surgery::CollarGeometry geometry(pr.at("loopLength").get<double>(), eps,
                                         pr.at("delta").get<double>());
  std::optional<surgery::TwistMap> twist;
  if (pr.at("twist").get<bool>()) twist.emplace(eps, pr.at("halfWidth").get<double>());
  const bool product = pr.at("outer").get<std::string>() == "product";
  const surgery::MetricField outer =
      product ? surgery::MetricField(surgery::product_tube_metric)
              : surgery::MetricField(surgery::euclidean_torus_metric);
  const surgery::SurgeredCollarMetric metric(geometry, outer, twist);
  surgery::VerificationOptions options;
  options.samples = pr.at("samples").get<std::int64_t>();
  options.seed = pr.at("seed").get<std::uint64_t>();
  const auto res = pr.at("resolution").get<std::vector<int>>();
  options.resolution = {res[0], res[1], res[2]};
  const auto report = surgery::verify_surgery_chart(metric, pr.at("outer").get<std::string>(), options);
  return {{"chart", report.chart},
          {"samples", report.samples},
          {"nonPositiveSamples", report.non_positive_samples},
          {"minEigenvalueProxy", report.min_eigenvalue_proxy},
          {"interfaceMaxMismatch", report.interface_max_mismatch},
          {"derivativeMaxMismatch", report.derivative_max_mismatch},
          {"phiAtMidline", report.phi_at_midline},
          {"cornerMaxError", report.corner_max_error},
          {"volume", report.volume},
          {"resolution", report.resolution}};
}

json check_json(const graph::CoveringCheck& c) {
  return {{"coverSys", c.cover_sys}, {"quotientSys", c.quotient_sys}, {"holds", c.holds}};
}

graph::CoveringGraph graph_from_file(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
    graph::Multigraph g;
    g.vertex_count = doc.at("vertexCount").get<int>();
    for (const auto& e : doc.at("edges")) {
      g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                         e.size() > 2 ? e.at(2).get<double>() : 1.0});
    }
    return {std::move(g), doc.at("involution").get<std::vector<int>>()};
  } catch (const json::exception& ex) {
    throw UsageError("malformed graph file " + path.string() + ": " + ex.what());
  }
}

json run_covering_check(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  if (pr.contains("cycle")) {
    return check_json(graph::graph_quotient_systole_check(
        graph::antipodal_cycle(pr.at("cycle").get<int>())));
  }
  if (pr.contains("graph")) {
    return check_json(graph::graph_quotient_systole_check(
        graph_from_file(pr.at("graph").get<std::string>())));
  }
  std::mt19937_64 rng(pr.at("seed").get<std::uint64_t>());
  json rows = json::array();
  bool all = true;
  double min_slack = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < pr.at("count").get<std::int64_t>(); ++k) {
    const auto cover = graph::random_cubic_double_cover(pr.at("randomCubic").get<int>(), rng,
                                                        pr.at("minLength").get<double>(),
                                                        pr.at("maxLength").get<double>());
    const auto check = graph::graph_quotient_systole_check(cover);
    all = all && check.holds;
    min_slack = std::min(min_slack, check.quotient_sys / check.cover_sys);
    rows.push_back(check_json(check));
  }
  return {{"rows", rows}, {"allHold", all}, {"minQuotientOverCover", min_slack}};
}

std::function<std::int64_t(std::int64_t)> twist_model(const std::string& text) {
  if (text == "2g+1") return [](std::int64_t g) { return 2 * g + 1; };
  if (text.rfind("const:", 0) == 0) {
    const auto n = parse_int(text.substr(6), "--twist-model");
    require(n >= 1, "--twist-model constant must be at least 1");
    return [n](std::int64_t) { return n; };
  }
  throw UsageError("--twist-model must be '2g+1' or 'const:<n>'");
}

std::function<double(std::int64_t)> c_model(const std::string& text) {
  if (text == "g") return [](std::int64_t g) { return static_cast<double>(g); };
  if (text.rfind("const:", 0) == 0) {
    const double v = parse_double(text.substr(6), "--c-model");
    require(v > 0.0, "--c-model constant must be positive");
    return [v](std::int64_t) { return v; };
  }
  if (text.rfind("pow:", 0) == 0) {
    const double e = parse_double(text.substr(4), "--c-model");
    return [e](std::int64_t g) { return std::pow(static_cast<double>(g), e); };
  }
  throw UsageError("--c-model must be 'g', 'const:<v>' or 'pow:<e>'");
}

json run_pipeline_cmd(const RunConfig& cfg) {
  const auto& pr = cfg.params;
  auto params = pipeline::ConstructionParams::with_defaults(
      pr.at("genera").get<std::vector<std::int64_t>>());
  params.twist_count_model = twist_model(pr.at("twistModel").get<std::string>());
  params.c_model = c_model(pr.at("cModel").get<std::string>());
  params.constants = constants_from_json(pr.at("constants"));
  const auto report = pipeline::run_pipeline(params);
  json out = report_to_json(report);
  bool levels = true;
  for (const auto& row : report.rows) levels = levels && row.levels_valid;
  out["ratioStrictlyDecreasing"] = report.ratio_strictly_decreasing();
  out["ratioScaleSpread"] = report.ratio_scale_spread();
  out["allLevelsValid"] = levels;
  return out;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> kColumns = split(kReportCsvHeader, ',');
  return kColumns;
}

}  // namespace

// ----- number formatting -----

std::string format_real(double value, int digits) {
  if (!std::isfinite(value)) return value > 0 ? "inf" : (value < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

json round_reals(const json& value, int digits) {
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (!std::isfinite(v)) return v;
    return std::strtod(format_real(v, digits).c_str(), nullptr);
  }
  if (value.is_array()) {
    json out = json::array();
    for (const auto& item : value) out.push_back(round_reals(item, digits));
    return out;
  }
  if (value.is_object()) {
    json out = json::object();
    for (const auto& [k, item] : value.items()) out[k] = round_reals(item, digits);
    return out;
  }
  return value;
}

arith::Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  arith::Rational r;
  if (slash == std::string::npos) {
    r = {parse_int(text, "rational"), 1};
  } else {
    r = {parse_int(text.substr(0, slash), "rational"), parse_int(text.substr(slash + 1), "rational")};
  }
  require(r.den != 0, "rational denominator must be nonzero");
  if (r.den < 0) r = {-r.num, -r.den};
  return r;
}

// ----- parsing -----

RunConfig parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"Systolic freedom toolkit", "sysfree"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  std::string output;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "plain"}));
  app.add_option("--output", output, "Write the result to this file instead of stdout");

  // Numeric flags are collected as strings so that malformed numbers are
  // reported uniformly as usage errors.
  std::string p = "3", n, trace_bound = "20", box = "50", threads = "0", cache_dir;
  auto add_arith = [&](CLI::App* sub, bool n_list) {
    sub->add_option("--p", p, "Prime congruent to 3 mod 4");
    sub->add_option("--N", n, n_list ? "Comma-separated congruence levels" : "Congruence level")->required();
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--trace-bound", trace_bound, "Largest |trace| searched");
    sub->add_option("--box", box, "Bound on |b| and |d|");
    sub->add_option("--threads", threads, "Worker threads (0 = hardware)");
    sub->add_option("--cache-dir", cache_dir, "Spectrum cache directory");
  };

  auto* systole = app.add_subcommand("systole", "Certified systole upper bound of a congruence surface");
  add_arith(systole, false);
  add_search(systole);
  auto* spectrum = app.add_subcommand("spectrum", "Length spectrum up to a trace bound");
  add_arith(spectrum, false);
  add_search(spectrum);
  auto* residue = app.add_subcommand("residue-order", "Order of the residue group mod N");
  add_arith(residue, true);

  auto* genus = app.add_subcommand("genus", "Genus of a cover from its index");
  std::string index, chi0 = "-1/4", genus_p, genus_n;
  genus->add_option("--index", index, "Cover index");
  genus->add_option("--p", genus_p, "Prime (index from the residue order)");
  genus->add_option("--N", genus_n, "Level (index from the residue order)");
  genus->add_option("--chi0", chi0, "Base Euler characteristic as num/den");

  auto* diameter = app.add_subcommand("diameter", "Diameter upper bound from area growth");
  std::string diam_genus, c_iso = "1", seed_area = "1";
  diameter->add_option("--genus", diam_genus, "Genus")->required();
  diameter->add_option("--c-iso", c_iso, "Isoperimetric constant");
  diameter->add_option("--seed-area", seed_area, "Area of the seed disc");

  auto* baseline = app.add_subcommand("baseline", "Loewner or Pu systolic ratio");
  std::string kind, basis, radius = "1";
  baseline->add_option("--kind", kind, "loewner or pu")->required()->check(CLI::IsMember({"loewner", "pu"}));
  baseline->add_option("--basis", basis, "Lattice basis u_x,u_y,v_x,v_y (default hexagonal)");
  baseline->add_option("--radius", radius, "Sphere radius");

  auto* verify = app.add_subcommand("surgery-verify", "Sample the surgered collar metric");
  std::string loop_length = std::to_string(2.0 * std::numbers::pi), eps = "0.1", delta, half_width,
              outer = "product", samples = "10000", seed = "1", resolution = "32,64,64";
  bool no_twist = false;
  verify->add_option("--loop-length", loop_length, "Length of the surgered loop");
  verify->add_option("--eps", eps, "Inner collar radius");
  verify->add_option("--delta", delta, "Collar width (default eps/4)");
  verify->add_option("--half-width", half_width, "Twist half width (default pi eps/2)");
  verify->add_flag("--no-twist", no_twist, "Plain filling without the twist");
  verify->add_option("--outer", outer, "Outer metric")->check(CLI::IsMember({"product", "euclidean"}));
  verify->add_option("--samples", samples, "Random samples");
  verify->add_option("--seed", seed, "Sampling seed");
  verify->add_option("--resolution", resolution, "Quadrature cells nr,ntheta,nt");

  auto* covering = app.add_subcommand("covering-check", "Quotient versus cover girth");
  std::string cycle, random_cubic, count = "1", graph_seed = "1", min_len = "1", max_len = "1", graph_file;
  auto* cycle_opt = covering->add_option("--cycle", cycle, "Antipodal cycle on this many vertices");
  auto* cubic_opt = covering->add_option("--random-cubic", random_cubic, "Base vertices of random cubic covers");
  auto* file_opt = covering->add_option("--graph", graph_file, "Graph JSON {vertexCount, edges, involution}");
  cycle_opt->excludes(cubic_opt)->excludes(file_opt);
  cubic_opt->excludes(file_opt);
  covering->add_option("--count", count, "Number of random instances");
  covering->add_option("--seed", graph_seed, "Random seed");
  covering->add_option("--min-length", min_len, "Smallest edge length");
  covering->add_option("--max-length", max_len, "Largest edge length");

  auto* pipe = app.add_subcommand("pipeline", "Freedom ratio report over a genus list");
  std::string genus_list, level_list, pipe_p = "3", pipe_chi0 = "-1/4", constants_file,
              twist = "2g+1", cmodel = "g";
  auto* gl = pipe->add_option("--genus-list", genus_list, "Comma-separated increasing genera");
  auto* nl = pipe->add_option("--N-list", level_list, "Levels whose cover genera are used");
  gl->excludes(nl);
  pipe->add_option("--p", pipe_p, "Prime for --N-list");
  pipe->add_option("--chi0", pipe_chi0, "Base Euler characteristic for --N-list");
  pipe->add_option("--constants", constants_file, "Flat JSON map of named constants");
  pipe->add_option("--twist-model", twist, "2g+1 or const:<n>");
  pipe->add_option("--c-model", cmodel, "g, const:<v> or pow:<e>");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  RunConfig cfg;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    cfg.command = "help";
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::CallForVersion&) {
    cfg.command = "help";
    cfg.help_text = std::string(kVersion) + "\n";
    return cfg;
  } catch (const CLI::ParseError& ex) {
    throw UsageError(ex.what());
  }

  cfg.format = format == "csv" ? OutputFormat::kCsv : format == "plain" ? OutputFormat::kPlain : OutputFormat::kJson;
  cfg.output_path = output;
  json& pr = cfg.params;

  auto arith_params = [&](bool n_list) {
    const auto pv = parse_int(p, "--p");
    validate_p(pv);
    pr["p"] = pv;
    if (n_list) {
      const auto levels = parse_int_list(n, "--N");
      for (auto v : levels) require(v >= 2, "--N values must be at least 2");
      pr["N"] = levels;
    } else {
      const auto nv = parse_int(n, "--N");
      require(nv >= 2, "--N must be at least 2");
      pr["N"] = nv;
    }
  };
  auto search_params = [&] {
    const auto tb = parse_int(trace_bound, "--trace-bound");
    const auto bx = parse_int(box, "--box");
    const auto th = parse_int(threads, "--threads");
    require(tb > 2, "--trace-bound must exceed 2");
    require(bx >= 1, "--box must be at least 1");
    require(th >= 0 && th <= 1024, "--threads must be in [0, 1024]");
    pr["traceBound"] = tb;
    pr["box"] = bx;
    pr["threads"] = th;
    cfg.cache_dir = cache_dir;
    if (cfg.cache_dir.empty()) {
      if (const char* env = std::getenv(kCacheDirVariable)) cfg.cache_dir = env;
    }
  };

  CLI::App* chosen = app.get_subcommands().front();
  cfg.command = chosen->get_name();
  if (chosen == systole || chosen == spectrum) {
    arith_params(false);
    search_params();
  } else if (chosen == residue) {
    arith_params(true);
  } else if (chosen == genus) {
    const auto r = parse_rational(chi0);
    require(r.num < 0, "--chi0 must be negative");
    pr["chi0"] = std::to_string(r.num) + "/" + std::to_string(r.den);
    if (!index.empty()) {
      require(genus_p.empty() && genus_n.empty(), "--index excludes --p and --N");
      const auto iv = parse_int(index, "--index");
      require(iv >= 1, "--index must be positive");
      pr["index"] = iv;
    } else {
      require(!genus_n.empty(), "genus needs --index or --N");
      const auto pv = genus_p.empty() ? 3 : parse_int(genus_p, "--p");
      validate_p(pv);
      const auto nv = parse_int(genus_n, "--N");
      require(nv >= 2, "--N must be at least 2");
      pr["p"] = pv;
      pr["N"] = nv;
    }
  } else if (chosen == diameter) {
    const auto g = parse_int(diam_genus, "--genus");
    require(g >= 2, "--genus must be at least 2");
    const double ci = parse_double(c_iso, "--c-iso");
    const double sa = parse_double(seed_area, "--seed-area");
    require(ci > 0.0, "--c-iso must be positive");
    require(sa > 0.0, "--seed-area must be positive");
    pr["genus"] = g;
    pr["cIso"] = ci;
    pr["seedArea"] = sa;
  } else if (chosen == baseline) {
    pr["kind"] = kind;
    if (kind == "loewner") {
      std::vector<double> b;
      if (basis.empty()) {
        const auto hex = baselines::Lattice2D::hexagonal();
        b = {hex.u().x, hex.u().y, hex.v().x, hex.v().y};
      } else {
        b = parse_double_list(basis, "--basis");
      }
      require(b.size() == 4, "--basis needs four numbers");
      pr["basis"] = b;
    } else {
      require(basis.empty(), "--basis applies to --kind loewner only");
      const double rv = parse_double(radius, "--radius");
      require(rv > 0.0, "--radius must be positive");
      pr["radius"] = rv;
    }
  } else if (chosen == verify) {
    const double e = parse_double(eps, "--eps");
    require(e > 0.0, "--eps must be positive");
    const double d = delta.empty() ? e / 4.0 : parse_double(delta, "--delta");
    require(d > 0.0, "--delta must be positive");
    const double w = half_width.empty() ? std::numbers::pi * e / 2.0 : parse_double(half_width, "--half-width");
    require(w > 0.0, "--half-width must be positive");
    const double ll = parse_double(loop_length, "--loop-length");
    require(ll > 0.0, "--loop-length must be positive");
    const auto s = parse_int(samples, "--samples");
    require(s >= 1, "--samples must be positive");
    const auto sd = parse_int(seed, "--seed");
    require(sd >= 0, "--seed must be non-negative");
    std::vector<int> res;
    for (auto v : parse_int_list(resolution, "--resolution")) {
      require(v >= 1 && v <= 4096, "--resolution entries must be in [1, 4096]");
      res.push_back(static_cast<int>(v));
    }
    require(res.size() == 3, "--resolution needs three integers");
    pr["loopLength"] = ll;
    pr["eps"] = e;
    pr["delta"] = d;
    pr["halfWidth"] = w;
    pr["twist"] = !no_twist;
    pr["outer"] = outer;
    pr["samples"] = s;
    pr["seed"] = sd;
    pr["resolution"] = res;
  } else if (chosen == covering) {
    if (!cycle.empty()) {
      const auto c = parse_int(cycle, "--cycle");
      require(c >= 4 && c % 2 == 0 && c <= 1000000, "--cycle must be even and at least 4");
      pr["cycle"] = c;
    } else if (!graph_file.empty()) {
      pr["graph"] = graph_file;
    } else {
      require(!random_cubic.empty(), "covering-check needs --cycle, --random-cubic or --graph");
      const auto v = parse_int(random_cubic, "--random-cubic");
      require(v >= 4 && v % 2 == 0 && v <= 100000, "--random-cubic must be even and at least 4");
      const auto k = parse_int(count, "--count");
      require(k >= 1, "--count must be positive");
      const auto sd = parse_int(graph_seed, "--seed");
      require(sd >= 0, "--seed must be non-negative");
      const double lo = parse_double(min_len, "--min-length");
      const double hi = parse_double(max_len, "--max-length");
      require(lo > 0.0 && hi >= lo, "edge lengths need 0 < min <= max");
      pr["randomCubic"] = v;
      pr["count"] = k;
      pr["seed"] = sd;
      pr["minLength"] = lo;
      pr["maxLength"] = hi;
    }
  } else if (chosen == pipe) {
    std::vector<std::int64_t> genera;
    if (!genus_list.empty()) {
      genera = parse_int_list(genus_list, "--genus-list");
    } else {
      require(!level_list.empty(), "pipeline needs --genus-list or --N-list");
      const auto pv = parse_int(pipe_p, "--p");
      validate_p(pv);
      const auto levels = parse_int_list(level_list, "--N-list");
      for (auto v : levels) require(v >= 2, "--N-list values must be at least 2");
      const auto r = parse_rational(pipe_chi0);
      require(r.num < 0, "--chi0 must be negative");
      genera = genera_from_levels(arith::FuchsianParams(pv), levels, r);
      pr["p"] = pv;
      pr["levels"] = levels;
      pr["chi0"] = std::to_string(r.num) + "/" + std::to_string(r.den);
    }
    for (std::size_t k = 0; k < genera.size(); ++k) {
      require(genera[k] >= 2, "every genus must be at least 2");
      require(k == 0 || genera[k] > genera[k - 1], "genus list must be strictly increasing");
    }
    twist_model(twist);
    c_model(cmodel);
    pr["genera"] = genera;
    pr["twistModel"] = twist;
    pr["cModel"] = cmodel;
    pipeline::PipelineConstants constants;
    if (!constants_file.empty()) {
      constants = load_constants(constants_file);
      pr["constantsFile"] = constants_file;
    }
    pr["constants"] = constants_to_json(constants);
  }
  return cfg;
}

// ----- execution and emission -----

ResultEnvelope execute(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ResultEnvelope env;
  env.command = config.command;
  env.params = config.params;
  const auto& c = config.command;
  if (c == "systole") env.results = run_systole(config);
  else if (c == "spectrum") env.results = run_spectrum(config);
  else if (c == "residue-order") env.results = run_residue_order(config);
  else if (c == "genus") env.results = run_genus(config);
  else if (c == "diameter") env.results = run_diameter(config);
  else if (c == "baseline") env.results = run_baseline(config);
  else if (c == "surgery-verify") env.results = run_surgery_verify(config);
  else if (c == "covering-check") env.results = run_covering_check(config);
  else if (c == "pipeline") env.results = run_pipeline_cmd(config);
  else throw UsageError("unknown command '" + c + "'");
  env.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return env;
}

std::string emit(const ResultEnvelope& envelope, OutputFormat format) {
  const json results = round_reals(envelope.results);
  if (format == OutputFormat::kJson) {
    const json doc = {{"command", envelope.command},
                      {"params", round_reals(envelope.params)},
                      {"results", results},
                      {"version", envelope.version},
                      {"durationSeconds", round_reals(envelope.duration_seconds)}};
    return doc.dump(2) + "\n";
  }
  if (format == OutputFormat::kCsv) {
    if (envelope.command == "pipeline") return csv_table(results.at("rows"), report_columns());
    if (envelope.command == "spectrum") {
      json rows = json::array();
      for (const auto& e : results.at("entries")) {
        rows.push_back({{"absTrace", e.at("absTrace")},
                        {"length", e.at("length")},
                        {"witnessCount", e.at("witnesses").size()}});
      }
      return csv_table(rows, {"absTrace", "length", "witnessCount"});
    }
    if (results.contains("rows") && !results.at("rows").empty()) {
      return csv_table(results.at("rows"), keys_of(results.at("rows").front()));
    }
    std::vector<std::pair<std::string, std::string>> flat;
    flatten(results, "", flat);
    std::string out = "key,value\n";
    for (const auto& [k, v] : flat) out += csv_field(k) + "," + csv_field(v) + "\n";
    return out;
  }
  std::vector<std::pair<std::string, std::string>> flat;
  flatten(results, "", flat);
  std::string out = envelope.command + " (sysfree " + envelope.version + ")\n";
  for (const auto& [k, v] : flat) out += "  " + k + " = " + v + "\n";
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  fs::create_directories(dir, ec);
  static thread_local std::mt19937_64 rng(std::random_device{}());
  const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rng() % 1000000000));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("error writing " + path.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move result into " + path.string());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_cli(args);
    if (cfg.command == "help") {
      out << cfg.help_text;
      return kExitOk;
    }
    const std::string text = emit(execute(cfg), cfg.format);
    if (cfg.output_path.empty()) {
      out << text;
      out.flush();
      if (!out) throw IoError("cannot write to standard output");
    } else {
      write_atomic(cfg.output_path, text);
    }
    return kExitOk;
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const IoError& ex) {
    err << "io error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitComputation;
  }
}

// ----- spectrum cache -----

json spectrum_to_json(const arith::LengthSpectrum& spectrum) {
  json entries = json::array();
  for (const auto& e : spectrum.entries) {
    json witnesses = json::array();
    for (const auto& w : e.witnesses) witnesses.push_back(witness_json(w));
    entries.push_back({{"absTrace", e.abs_trace}, {"length", e.length}, {"witnesses", witnesses}});
  }
  return {{"p", spectrum.p},
          {"N", spectrum.N},
          {"traceBound", spectrum.trace_bound},
          {"boxBound", spectrum.box_bound},
          {"entries", entries}};
}

arith::LengthSpectrum spectrum_from_json(const json& doc) {
  try {
    arith::LengthSpectrum s;
    s.p = doc.at("p").get<std::int64_t>();
    s.N = doc.at("N").get<std::int64_t>();
    s.trace_bound = doc.at("traceBound").get<std::int64_t>();
    s.box_bound = doc.at("boxBound").get<std::int64_t>();
    const arith::FuchsianParams params(s.p);
    const arith::CongruenceLevel level(s.N);
    std::int64_t prev = 0;
    for (const auto& e : doc.at("entries")) {
      arith::SpectrumEntry entry;
      entry.abs_trace = e.at("absTrace").get<std::int64_t>();
      entry.length = e.at("length").get<double>();
      if (entry.abs_trace <= prev || entry.abs_trace > s.trace_bound) {
        throw CacheInvalidError("spectrum entries out of order");
      }
      prev = entry.abs_trace;
      if (std::abs(entry.length - arith::length_from_trace(entry.abs_trace)) > 1e-12 * entry.length) {
        throw CacheInvalidError("cached length disagrees with its trace");
      }
      for (const auto& w : e.at("witnesses")) {
        const auto t = w.get<std::array<std::int64_t, 4>>();
        const arith::GroupElement g(t[0], t[1], t[2], t[3], s.p);
        if (g.tuple() != t || g.abs_trace() != entry.abs_trace || !arith::is_in_level(g, level)) {
          throw CacheInvalidError("cached witness is not a level element of the stated trace");
        }
        entry.witnesses.push_back(g);
      }
      if (entry.witnesses.empty()) throw CacheInvalidError("spectrum entry without witnesses");
      s.entries.push_back(std::move(entry));
    }
    return s;
  } catch (const CacheInvalidError&) {
    throw;
  } catch (const std::exception& ex) {
    throw CacheInvalidError(std::string("malformed spectrum cache: ") + ex.what());
  }
}

fs::path spectrum_cache_path(const fs::path& dir, std::int64_t p, std::int64_t n,
                             std::int64_t trace_bound, std::int64_t box_bound) {
  return dir / ("spectrum_p" + std::to_string(p) + "_N" + std::to_string(n) + "_t" +
                std::to_string(trace_bound) + "_b" + std::to_string(box_bound) + ".json");
}

void write_spectrum_cache(const arith::LengthSpectrum& spectrum, const fs::path& path) {
  write_atomic(path, spectrum_to_json(spectrum).dump() + "\n");
}

arith::LengthSpectrum read_spectrum_cache(const fs::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw CacheInvalidError("corrupt spectrum cache " + path.string() + ": " + ex.what());
  }
  return spectrum_from_json(doc);
}

arith::LengthSpectrum cache_roundtrip(const arith::LengthSpectrum& spectrum, const fs::path& path) {
  write_spectrum_cache(spectrum, path);
  return read_spectrum_cache(path);
}

arith::LengthSpectrum load_or_compute_spectrum(const arith::FuchsianParams& params,
                                               arith::CongruenceLevel level,
                                               std::int64_t trace_bound, std::int64_t box_bound,
                                               const std::optional<fs::path>& cache_dir,
                                               unsigned threads) {
  if (cache_dir) {
    const auto path = spectrum_cache_path(*cache_dir, params.p(), level.N(), trace_bound, box_bound);
    std::error_code ec;
    if (fs::exists(path, ec)) {
      try {
        auto cached = read_spectrum_cache(path);
        if (cached.p == params.p() && cached.N == level.N() && cached.trace_bound == trace_bound &&
            cached.box_bound == box_bound) {
          return cached;
        }
      } catch (const CacheInvalidError&) {
      }
    }
    auto fresh = arith::enumerate_level_elements(params, level, trace_bound, box_bound, threads);
    write_spectrum_cache(fresh, path);
    return fresh;
  }
  return arith::enumerate_level_elements(params, level, trace_bound, box_bound, threads);
}

// ----- reports and constants -----

std::string report_to_csv(const pipeline::FreedomReport& report) {
  return csv_table(round_reals(report_to_json(report)).at("rows"), report_columns());
}

json report_to_json(const pipeline::FreedomReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"g", r.g},
                    {"n", r.n},
                    {"eps", r.eps},
                    {"delta", r.delta},
                    {"sys1_lb", r.sys1_lb},
                    {"sys2_lb", r.sys2_lb},
                    {"vol_ub", r.vol_ub},
                    {"ratio_ub", r.ratio_ub},
                    {"asymptotic", r.asymptotic},
                    {"levels_valid", r.levels_valid},
                    {"chain_sys1", r.chain_sys1},
                    {"chain_sys2", r.chain_sys2},
                    {"chain_vol", r.chain_vol},
                    {"substitution_bound", r.substitution_bound},
                    {"order_lb", r.order_lb},
                    {"loop_length_bound", r.loop_length_bound}});
  }
  return {{"rows", rows}};
}

pipeline::FreedomReport report_from_json(const json& doc) {
  pipeline::FreedomReport report;
  try {
    for (const auto& j : doc.at("rows")) {
      pipeline::ReportRow r;
      r.g = j.at("g").get<std::int64_t>();
      r.n = j.at("n").get<std::int64_t>();
      r.eps = j.at("eps").get<double>();
      r.delta = j.at("delta").get<double>();
      r.sys1_lb = j.at("sys1_lb").get<double>();
      r.sys2_lb = j.at("sys2_lb").get<double>();
      r.vol_ub = j.at("vol_ub").get<double>();
      r.ratio_ub = j.at("ratio_ub").get<double>();
      r.asymptotic = j.at("asymptotic").get<bool>();
      r.levels_valid = j.at("levels_valid").get<bool>();
      r.chain_sys1 = j.at("chain_sys1").get<double>();
      r.chain_sys2 = j.at("chain_sys2").get<double>();
      r.chain_vol = j.at("chain_vol").get<double>();
      r.substitution_bound = j.at("substitution_bound").get<double>();
      r.order_lb = j.at("order_lb").get<double>();
      r.loop_length_bound = j.at("loop_length_bound").get<double>();
      report.rows.push_back(r);
    }
  } catch (const json::exception& ex) {
    throw ParameterError(std::string("malformed report: ") + ex.what());
  }
  return report;
}

pipeline::PipelineConstants constants_from_json(const json& doc) {
  if (!doc.is_object()) throw UsageError("constants must be a flat JSON object");
  pipeline::PipelineConstants constants;
  for (const auto& [name, value] : doc.items()) {
    const auto& names = pipeline::PipelineConstants::names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw UsageError("unknown constant '" + name + "'");
    }
    if (!value.is_number()) throw UsageError("constant '" + name + "' must be a number");
    const double v = value.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("constant '" + name + "' must be positive");
    constants.at(name) = v;
  }
  return constants;
}

pipeline::PipelineConstants load_constants(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& ex) {
    throw UsageError("malformed constants file " + path.string() + ": " + ex.what());
  }
  return constants_from_json(doc);
}

json constants_to_json(const pipeline::PipelineConstants& constants) {
  json out = json::object();
  for (const auto& name : pipeline::PipelineConstants::names()) out[name] = constants.at(name);
  return out;
}

std::vector<std::int64_t> genera_from_levels(const arith::FuchsianParams& params,
                                             const std::vector<std::int64_t>& levels,
                                             arith::Rational chi0) {
  std::vector<std::int64_t> out;
  for (std::int64_t n : levels) {
    const auto index = arith::residue_group_order(params, arith::CongruenceLevel(n));
    out.push_back(static_cast<std::int64_t>(std::ceil(arith::genus_estimate(index, chi0))));
  }
  return out;
}

}  // namespace sysfree::cli
