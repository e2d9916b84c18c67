#include "sysfree/freedom_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sysfree/errors.hpp"
#include "sysfree/surgery_geometry.hpp"

namespace sysfree::pipeline {

namespace {

void require_genus(double g) {
  if (!(g >= 2.0)) throw ParameterError("genus must be at least 2");
}

constexpr double kFiveSixths = 5.0 / 6.0;

}  // namespace

double twist_level(std::int64_t i, std::int64_t n) {
  return 0.5 + static_cast<double>(i - 1) / (3.0 * static_cast<double>(n));
}

double homology_level(std::int64_t j, std::int64_t g) {
  return kFiveSixths + static_cast<double>(j - 1) / (12.0 * static_cast<double>(g));
}

SurgeryLevels surgery_levels(std::int64_t n, std::int64_t g) {
  if (n < 1 || g < 1) throw ParameterError("surgery levels need n >= 1 and g >= 1");
  SurgeryLevels out;
  out.twist_levels.reserve(static_cast<std::size_t>(n));
  out.homology_levels.reserve(static_cast<std::size_t>(2 * g));
  for (std::int64_t i = 1; i <= n; ++i) out.twist_levels.push_back(twist_level(i, n));
  for (std::int64_t j = 1; j <= 2 * g; ++j) out.homology_levels.push_back(homology_level(j, g));
  return out;
}

bool level_invariants_hold(std::int64_t n, std::int64_t g) {
  if (n < 1 || g < 1) return false;
  // Both sequences are generated increasing, so distinctness reduces to strict
  // increase within each and the gap between the last twist and 5/6.
  double prev = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    const double v = twist_level(i, n);
    if (!(v > prev) || !(v < kFiveSixths)) return false;
    prev = v;
  }
  for (std::int64_t j = 1; j <= 2 * g; ++j) {
    const double v = homology_level(j, g);
    if (!(v > prev) || !(v >= kFiveSixths) || !(v < 1.0)) return false;
    prev = v;
  }
  return true;
}

EpsilonDelta epsilon_rule(std::int64_t g, double c_of_g) {
  require_genus(static_cast<double>(g));
  if (!(c_of_g > 0.0)) throw ParameterError("C(g) must be positive");
  const double eps = 1.0 / (static_cast<double>(g) * c_of_g);
  return {eps, eps / 4.0};
}

double sys1_lower(double g, double c_prime, double c) {
  require_genus(g);
  return std::max(0.0, 0.5 * c_prime * std::sqrt(std::log(g)) - c);
}

double sys2_lower(double g, double c) {
  require_genus(g);
  return 0.5 * c * g;
}

double vol_upper(double g, double c) {
  require_genus(g);
  return 0.5 * c * g;
}

double freedom_ratio(double g, double s1, double s2, double s3) {
  require_genus(g);
  if (!(s1 > 0.0 && s2 > 0.0 && s3 > 0.0)) throw ParameterError("constants must be positive");
  return s3 / (s1 * s2 * std::sqrt(std::log(g)));
}

double semibundle_sys_bound(double cover_systole) {
  if (!(cover_systole > 0.0)) throw ParameterError("cover systole must be positive");
  return cover_systole / 2.0;
}

double order_lower_bound(double g, double c2) {
  require_genus(g);
  return c2 * std::sqrt(std::log(g));
}

bool SurgeryPlan::valid() const {
  return level_invariants_hold(twist_count, genus) && eps > 0.0 && delta == eps / 4.0;
}

const std::vector<std::string>& PipelineConstants::names() {
  static const std::vector<std::string> kNames{"c_prime", "c_sub", "s1",         "s2",
                                               "s3",      "c2",    "cover_sys2", "cover_vol"};
  return kNames;
}

double& PipelineConstants::at(const std::string& name) {
  if (name == "c_prime") return c_prime;
  if (name == "c_sub") return c_sub;
  if (name == "s1") return s1;
  if (name == "s2") return s2;
  if (name == "s3") return s3;
  if (name == "c2") return c2;
  if (name == "cover_sys2") return cover_sys2;
  if (name == "cover_vol") return cover_vol;
  throw ParameterError("unknown constant '" + name + "'");
}

double PipelineConstants::at(const std::string& name) const {
  return const_cast<PipelineConstants*>(this)->at(name);
}

ConstructionParams ConstructionParams::with_defaults(std::vector<std::int64_t> genera) {
  ConstructionParams params;
  params.genera = std::move(genera);
  params.twist_count_model = [](std::int64_t g) { return 2 * g + 1; };
  params.c_model = [](std::int64_t g) { return static_cast<double>(g); };
  return params;
}

bool FreedomReport::ratio_strictly_decreasing() const {
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (!row.asymptotic) continue;
    if (!(row.ratio_ub < prev)) return false;
    prev = row.ratio_ub;
  }
  return true;
}

double FreedomReport::ratio_scale_spread() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : rows) {
    if (!row.asymptotic) continue;
    const double v = row.ratio_ub * std::sqrt(std::log(static_cast<double>(row.g)));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi >= lo)) return 0.0;
  return (hi - lo) / hi;
}

FreedomReport run_pipeline(const ConstructionParams& params) {
  if (params.genera.empty()) throw ParameterError("genus list is empty");
  if (!params.twist_count_model || !params.c_model) {
    throw ParameterError("twist-count and C(g) models must be set");
  }
  for (std::size_t k = 0; k < params.genera.size(); ++k) {
    if (params.genera[k] < 2) throw ParameterError("every genus must be at least 2");
    if (k > 0 && params.genera[k] <= params.genera[k - 1]) {
      throw ParameterError("genus list must be strictly increasing");
    }
  }
  const PipelineConstants& c = params.constants;
  for (const auto& name : PipelineConstants::names()) {
    if (!(c.at(name) > 0.0)) throw ParameterError("constant '" + name + "' must be positive");
  }

  FreedomReport report;
  for (std::int64_t g : params.genera) {
    const double gd = static_cast<double>(g);
    ReportRow row;
    row.g = g;
    row.n = params.twist_count_model(g);
    if (row.n < 1) throw ParameterError("twist-count model must return at least 1");
    const double cg = params.c_model(g);
    const EpsilonDelta ed = epsilon_rule(g, cg);
    row.eps = ed.eps;
    row.delta = ed.delta;
    row.loop_length_bound = cg;
    row.levels_valid = SurgeryPlan{row.n, g, ed.eps, ed.delta, cg}.valid();

    row.chain_sys1 = sys1_lower(gd, c.c_prime, c.c_sub);
    row.chain_sys2 = sys2_lower(gd, c.cover_sys2);
    row.chain_vol = vol_upper(gd, c.cover_vol);
    row.asymptotic = row.chain_sys1 > 0.0;

    row.sys1_lb = c.s1 * std::sqrt(std::log(gd));
    row.sys2_lb = c.s2 * gd;
    row.vol_ub = c.s3 * gd;
    row.ratio_ub = row.vol_ub / (row.sys1_lb * row.sys2_lb);

    row.substitution_bound = surgery::substitution_length_bound(ed.eps, ed.delta, row.n, g);
    row.order_lb = order_lower_bound(gd, c.c2);
    report.rows.push_back(row);
  }
  return report;
}

double log_genus_threshold(const PipelineConstants& constants, double target) {
  if (!(target > 0.0)) throw ParameterError("target ratio must be positive");
  const double root = constants.s3 / (constants.s1 * constants.s2 * target);
  return root * root;
}

}  // namespace sysfree::pipeline
