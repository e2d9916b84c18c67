#pragma once

// Bookkeeping for the surgered metrics: where the surgeries sit, how small the
// tubes are, and the growth rates of the two systole lower bounds and the
// volume upper bound. None of the constants are known numerically, so every
// one is a configuration input; the pipeline checks rates, monotonicity and the
// vanishing of the ratio, never absolute magnitudes.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sysfree::pipeline {

// Twist surgeries sit at 1/2 + (i - 1)/(3n), i = 1..n; homology surgeries at
// 5/6 + (j - 1)/(12g), j = 1..2g.
double twist_level(std::int64_t i, std::int64_t n);
double homology_level(std::int64_t j, std::int64_t g);

struct SurgeryLevels {
  std::vector<double> twist_levels;
  std::vector<double> homology_levels;
};

SurgeryLevels surgery_levels(std::int64_t n, std::int64_t g);

// Streams the level sequences without materialising them: all in (0, 1),
// pairwise distinct, twists below 5/6, homology levels at or above 5/6.
bool level_invariants_hold(std::int64_t n, std::int64_t g);

struct EpsilonDelta {
  double eps = 0.0;
  double delta = 0.0;
};

// eps = 1 / (g C(g)), delta = eps / 4.
EpsilonDelta epsilon_rule(std::int64_t g, double c_of_g);

// max(0, (C'/2) sqrt(ln g) - C): half the mapping-torus systole bound, less
// the length lost to pushing loops off the surgery tori.
double sys1_lower(double g, double c_prime, double c);
// (C/2) g: half the area bound for nonseparating surfaces in the double cover.
double sys2_lower(double g, double c);
// (C/2) g: the quotient has half the volume of its double cover.
double vol_upper(double g, double c);

// s3 / (s1 s2 sqrt(ln g)).
double freedom_ratio(double g, double s1, double s2, double s3);

// A loop in the quotient lifts to a loop or to half of one, so the quotient
// systole is at least half the cover systole.
double semibundle_sys_bound(double cover_systole);

// c2 sqrt(ln g).
double order_lower_bound(double g, double c2);

struct SurgeryPlan {
  std::int64_t twist_count = 0;
  std::int64_t genus = 0;
  double eps = 0.0;
  double delta = 0.0;
  double loop_length_bound = 0.0;

  SurgeryLevels levels() const { return surgery_levels(twist_count, genus); }
  // Level invariants plus delta == eps / 4.
  bool valid() const;
};

struct PipelineConstants {
  double c_prime = 1.0;    // mapping-torus systole constant
  double c_sub = 1.0;      // length lost in the substitution argument
  double s1 = 1.0;
  double s2 = 1.0;
  double s3 = 1.0;
  double c2 = 1.0;         // isometry order constant
  double cover_sys2 = 1.0; // cover 2-systole constant
  double cover_vol = 1.0;  // cover volume constant

  static const std::vector<std::string>& names();
  double& at(const std::string& name);  // throws ParameterError on unknown names
  double at(const std::string& name) const;
};

struct ConstructionParams {
  std::vector<std::int64_t> genera;
  std::function<std::int64_t(std::int64_t)> twist_count_model;
  std::function<double(std::int64_t)> c_model;
  PipelineConstants constants;

  // Twist count 2g + 1, C(g) = g.
  static ConstructionParams with_defaults(std::vector<std::int64_t> genera);
};

struct ReportRow {
  std::int64_t g = 0;
  std::int64_t n = 0;
  double eps = 0.0;
  double delta = 0.0;
  double sys1_lb = 0.0;  // s1 sqrt(ln g)
  double sys2_lb = 0.0;  // s2 g
  double vol_ub = 0.0;   // s3 g
  double ratio_ub = 0.0;
  bool asymptotic = false;    // chain_sys1 > 0
  bool levels_valid = false;
  double chain_sys1 = 0.0;    // sys1_lower(g, C', C)
  double chain_sys2 = 0.0;    // sys2_lower(g, cover_sys2)
  double chain_vol = 0.0;     // vol_upper(g, cover_vol)
  double substitution_bound = 0.0;
  double order_lb = 0.0;
  double loop_length_bound = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct FreedomReport {
  std::vector<ReportRow> rows;

  // Over asymptotic rows only.
  bool ratio_strictly_decreasing() const;
  // Largest relative spread of ratio_ub * sqrt(ln g) over asymptotic rows.
  double ratio_scale_spread() const;

  friend bool operator==(const FreedomReport&, const FreedomReport&) = default;
};

FreedomReport run_pipeline(const ConstructionParams& params);

// ln g beyond which the ratio falls below `target`: (s3 / (s1 s2 target))^2.
double log_genus_threshold(const PipelineConstants& constants, double target);

}  // namespace sysfree::pipeline
