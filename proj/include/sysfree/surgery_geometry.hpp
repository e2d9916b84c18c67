#pragma once

// Chart-level model of one Dehn surgery with a smoothed metric.
//
// Coordinates are cylindrical (r, theta, t) around a closed geodesic. The
// filled-in solid torus carries the flat metric dr^2 + r^2 dtheta^2 + dt^2 on
// 0 <= r <= L/2pi + delta, 0 <= t <= 2 pi eps, optionally twisted by a
// half-turn about its middle disc. Its outer annulus product is glued onto the
// collar eps <= r' <= eps + delta of the removed tube, swapping the meridian
// and longitude directions, and a radial cutoff blends the two metrics across
// the collar.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace sysfree::surgery {

using ChartPoint = std::array<double, 3>;  // (r, theta, t)
using Tensor3 = std::array<std::array<double, 3>, 3>;

using MetricField = std::function<Tensor3(const ChartPoint&)>;

Tensor3 identity_tensor();
Tensor3 diagonal_tensor(double a, double b, double c);
Tensor3 transpose(const Tensor3& m);
Tensor3 matmul(const Tensor3& x, const Tensor3& y);
Tensor3 add_scaled(const Tensor3& x, double sx, const Tensor3& y, double sy);
double determinant(const Tensor3& m);
// Largest entry of |x - y| over the largest entry of |y| (or 1 if y is zero).
double relative_mismatch(const Tensor3& x, const Tensor3& y);

// A map between charts. `jacobian` may be empty, in which case pullbacks fall
// back to central finite differences.
struct CoordinateMap {
  std::string name;
  std::function<ChartPoint(const ChartPoint&)> forward;
  std::function<Tensor3(const ChartPoint&)> jacobian;

  ChartPoint operator()(const ChartPoint& x) const { return forward(x); }
  bool has_jacobian() const { return static_cast<bool>(jacobian); }
};

CoordinateMap identity_map();

// Chain rule composition: outer after inner.
CoordinateMap compose(const CoordinateMap& outer, const CoordinateMap& inner);

// Relative step: h_k = step * max(1, |x_k|).
Tensor3 finite_difference_jacobian(const CoordinateMap& map, const ChartPoint& x,
                                   double step = 1e-6);

// Monotone profile on [0, 1] with p(0) = 0, p(1) = 1, p'(0) = p'(1) = 0 and
// p(1 - s) = 1 - p(s). Fixed to the cubic smoothstep s^2 (3 - 2s) so that
// results are reproducible bit-for-bit; p(1/2) is exactly 1/2.
class SmoothProfile {
 public:
  double operator()(double s) const;  // clamps s to [0, 1]
  double derivative(double s) const;
};

struct SolidTorusChart {
  double r_max;
  double t_period;

  SolidTorusChart(double r_max, double t_period);
};

// Geometry of one surgery: geodesic length L, tube radius eps, collar width
// delta. The filled torus has core radius L / 2pi and period 2 pi eps.
struct CollarGeometry {
  double loop_length;
  double eps;
  double delta;

  CollarGeometry(double loop_length, double eps, double delta);
  static CollarGeometry with_quarter_collar(double loop_length, double eps);

  double inner_radius() const;            // L / 2pi
  double filled_period() const;           // 2 pi eps
  SolidTorusChart filled_chart() const;   // radius L/2pi + delta
};

// The annulus twist (theta, t) -> (theta + 2 pi t mod 2pi, t), t in [0, 1].
std::pair<double, double> annulus_twist(double theta, double t);

// dr^2 + r^2 dtheta^2 + dt^2; throws CoordinateSingularityError for r <= 0.
Tensor3 euclidean_torus_metric(const ChartPoint& x);

// Fermi coordinates of H^2 x R about a geodesic lying in a slice H^2 x {s}:
// the normal disc is spanned by the in-slice distance u = r cos(theta) and
// the R-coordinate s = r sin(theta), giving
// dr^2 + r^2 dtheta^2 + cosh^2(r cos theta) dt^2.
Tensor3 product_tube_metric(const ChartPoint& x);

// Rotation of the filled torus by alpha(t): alpha vanishes for
// |t - pi eps| >= half_width, equals pi at t = pi eps and follows the profile
// in between. Angles are not reduced mod 2pi.
class TwistMap {
 public:
  TwistMap(double eps, double half_width, SmoothProfile profile = {});
  static TwistMap with_default_width(double eps);

  double eps() const { return eps_; }
  double half_width() const { return half_width_; }
  double angle(double t) const;
  double angle_derivative(double t) const;

  ChartPoint apply(const ChartPoint& x) const;
  ChartPoint invert(const ChartPoint& x) const;
  CoordinateMap forward_map() const;
  CoordinateMap inverse_map() const;

 private:
  double eps_;
  double half_width_;
  SmoothProfile profile_;
};

// Free-function form of TwistMap::apply.
ChartPoint beta_twist(const ChartPoint& x, double eps, const SmoothProfile& profile,
                      double half_width);

// (r, theta, t) -> (r - L/2pi + eps, t / eps, L theta / 2pi), defined on the
// annulus product L/2pi <= r <= L/2pi + delta, 0 <= theta <= 2pi,
// 0 <= t <= 2 pi eps. Throws DomainError outside it.
ChartPoint gluing_map(const ChartPoint& x, const CollarGeometry& geometry);
ChartPoint gluing_map_inverse(const ChartPoint& y, const CollarGeometry& geometry);
CoordinateMap gluing_coordinate_map(const CollarGeometry& geometry);
CoordinateMap gluing_inverse_coordinate_map(const CollarGeometry& geometry);

enum class JacobianSource { kAnalyticIfAvailable, kFiniteDifference };

// J^T g(map(x)) J. Throws DegenerateMapError when J is singular.
Tensor3 pullback_metric(const CoordinateMap& map, const MetricField& metric,
                        const ChartPoint& x,
                        JacobianSource source = JacobianSource::kAnalyticIfAvailable);

MetricField pullback_field(CoordinateMap map, MetricField metric);

// 1 for r <= eps, 0 for r >= eps + delta, profile-interpolated across the
// collar about its midline r = eps + delta/2, where it is exactly 1/2.
double cutoff_phi(const ChartPoint& x, double eps, double delta,
                  const SmoothProfile& profile = {});

// phi * inner + (1 - phi) * outer.
Tensor3 blended_metric(const ChartPoint& x, const MetricField& inner,
                       const MetricField& outer, double phi);

// All leading principal minors exceed tol. Throws ParameterError when the
// tensor is not symmetric.
bool positive_definite_check(const Tensor3& m, double tol = 1e-12);

// Smallest pivot of the LDL^T factorisation; positive iff m is positive
// definite. Used as a cheap stand-in for the smallest eigenvalue.
double min_pivot(const Tensor3& m);

struct ChartBox {
  ChartPoint lower;
  ChartPoint upper;
  bool contains(const ChartPoint& x, double tol = 1e-12) const;
};

struct VolumeResult {
  double volume = 0.0;
  std::array<int, 3> resolution{};
};

// Composite midpoint rule for the integral of sqrt(det g) over the box.
// Throws IntegrationError naming the first cell centre where g is not
// positive definite.
VolumeResult chart_volume(const MetricField& metric, const ChartBox& box,
                          std::array<int, 3> resolution);

// Volume of the flat solid torus of radius r_max: the box r_floor <= r <=
// r_max is integrated numerically, the core cylinder r < r_floor is added in
// closed form. r_floor defaults to 1e-6 r_max.
VolumeResult euclidean_solid_torus_volume(const SolidTorusChart& chart,
                                          std::array<int, 3> resolution,
                                          double r_floor_fraction = 1e-6);

// Sum over segments of sqrt(dx^T g(midpoint) dx). When `domain` is given every
// sample must lie inside it.
double curve_length(const MetricField& metric, std::span<const ChartPoint> samples,
                    const ChartBox* domain = nullptr);

// 2 pi (eps + delta) (n + 2g): total length added when a loop is pushed off
// every filled torus onto its boundary.
double substitution_length_bound(double eps, double delta, std::int64_t twist_count,
                                 std::int64_t genus);

// The surgered metric on the outer collar chart (r', theta', t'), assembled
// from the three regions: the pulled-back filled-torus metric for r' <= eps,
// the cutoff blend on the collar, the outer metric for r' >= eps + delta.
class SurgeredCollarMetric {
 public:
  SurgeredCollarMetric(CollarGeometry geometry, MetricField outer,
                       std::optional<TwistMap> twist, SmoothProfile profile = {});

  const CollarGeometry& geometry() const { return geometry_; }

  // Flat (possibly twisted) filled-torus metric in its own coordinates.
  Tensor3 filled_metric(const ChartPoint& x) const;
  // Filled-torus metric carried to the collar chart through the gluing map.
  Tensor3 inner_metric(const ChartPoint& y) const;
  Tensor3 outer_metric(const ChartPoint& y) const { return outer_(y); }
  double phi(const ChartPoint& y) const;
  Tensor3 operator()(const ChartPoint& y) const;

  ChartBox collar_box() const;
  MetricField as_field() const;

 private:
  CollarGeometry geometry_;
  MetricField outer_;
  std::optional<TwistMap> twist_;
  SmoothProfile profile_;
  CoordinateMap to_filled_;  // gluing inverse, then untwist
};

struct VerificationReport {
  std::string chart;
  std::int64_t samples = 0;
  std::int64_t non_positive_samples = 0;
  double min_eigenvalue_proxy = 0.0;
  double interface_max_mismatch = 0.0;
  double derivative_max_mismatch = 0.0;
  double phi_at_midline = 0.0;
  double corner_max_error = 0.0;
  double volume = 0.0;
  std::array<int, 3> resolution{};
};

struct VerificationOptions {
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  std::array<int, 3> resolution{32, 64, 64};
  double interface_step = 1e-9;  // relative to delta
};

// Sampling campaign over the collar: positive-definiteness, value and first
// difference continuity at both collar boundaries, the cutoff midline value,
// gluing-map corner correspondence and the collar volume.
VerificationReport verify_surgery_chart(const SurgeredCollarMetric& metric,
                                        const std::string& chart_name,
                                        const VerificationOptions& options);

}  // namespace sysfree::surgery
