#include "sysfree/surgery_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "sysfree/errors.hpp"

namespace sysfree::surgery {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string describe(const ChartPoint& x) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ")";
  return os.str();
}

double max_abs(const Tensor3& m) {
  double out = 0.0;
  for (const auto& row : m) {
    for (double v : row) out = std::max(out, std::abs(v));
  }
  return out;
}

Tensor3 symmetrize(const Tensor3& m) {
  Tensor3 out = m;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double avg = 0.5 * (m[i][j] + m[j][i]);
      out[i][j] = avg;
      out[j][i] = avg;
    }
  }
  return out;
}

bool within(double v, double lo, double hi, double tol) {
  const double slack = tol * std::max({1.0, std::abs(lo), std::abs(hi)});
  return v >= lo - slack && v <= hi + slack;
}

}  // namespace

Tensor3 identity_tensor() { return diagonal_tensor(1.0, 1.0, 1.0); }

Tensor3 diagonal_tensor(double a, double b, double c) {
  return {{{a, 0.0, 0.0}, {0.0, b, 0.0}, {0.0, 0.0, c}}};
}

Tensor3 transpose(const Tensor3& m) {
  Tensor3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out[i][j] = m[j][i];
  }
  return out;
}

Tensor3 matmul(const Tensor3& x, const Tensor3& y) {
  Tensor3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += x[i][k] * y[k][j];
      out[i][j] = s;
    }
  }
  return out;
}

Tensor3 add_scaled(const Tensor3& x, double sx, const Tensor3& y, double sy) {
  Tensor3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out[i][j] = sx * x[i][j] + sy * y[i][j];
  }
  return out;
}

double determinant(const Tensor3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double relative_mismatch(const Tensor3& x, const Tensor3& y) {
  const double scale = max_abs(y);
  return max_abs(add_scaled(x, 1.0, y, -1.0)) / (scale > 0.0 ? scale : 1.0);
}

CoordinateMap identity_map() {
  return {"identity", [](const ChartPoint& x) { return x; },
          [](const ChartPoint&) { return identity_tensor(); }};
}

CoordinateMap compose(const CoordinateMap& outer, const CoordinateMap& inner) {
  CoordinateMap out;
  out.name = outer.name + " o " + inner.name;
  out.forward = [outer, inner](const ChartPoint& x) { return outer(inner(x)); };
  if (outer.has_jacobian() && inner.has_jacobian()) {
    out.jacobian = [outer, inner](const ChartPoint& x) {
      return matmul(outer.jacobian(inner(x)), inner.jacobian(x));
    };
  }
  return out;
}

Tensor3 finite_difference_jacobian(const CoordinateMap& map, const ChartPoint& x,
                                   double step) {
  Tensor3 jac{};
  for (int k = 0; k < 3; ++k) {
    const double h = step * std::max(1.0, std::abs(x[k]));
    ChartPoint plus = x;
    ChartPoint minus = x;
    plus[k] += h;
    minus[k] -= h;
    const ChartPoint fp = map(plus);
    const ChartPoint fm = map(minus);
    const double width = plus[k] - minus[k];
    for (int i = 0; i < 3; ++i) jac[i][k] = (fp[i] - fm[i]) / width;
  }
  return jac;
}

double SmoothProfile::operator()(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

double SmoothProfile::derivative(double s) const {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 6.0 * s * (1.0 - s);
}

SolidTorusChart::SolidTorusChart(double r_max_, double t_period_)
    : r_max(r_max_), t_period(t_period_) {
  if (!(r_max > 0.0) || !(t_period > 0.0)) {
    throw ParameterError("solid torus radius and period must be positive");
  }
}

CollarGeometry::CollarGeometry(double loop_length_, double eps_, double delta_)
    : loop_length(loop_length_), eps(eps_), delta(delta_) {
  if (!(loop_length > 0.0) || !(eps > 0.0) || !(delta > 0.0)) {
    throw ParameterError("loop length, eps and delta must be positive");
  }
}

CollarGeometry CollarGeometry::with_quarter_collar(double loop_length, double eps) {
  return {loop_length, eps, eps / 4.0};
}

double CollarGeometry::inner_radius() const { return loop_length / kTwoPi; }

double CollarGeometry::filled_period() const { return kTwoPi * eps; }

SolidTorusChart CollarGeometry::filled_chart() const {
  return {inner_radius() + delta, filled_period()};
}

std::pair<double, double> annulus_twist(double theta, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("annulus twist needs t in [0, 1]");
  }
  double out = std::fmod(theta + kTwoPi * t, kTwoPi);
  if (out < 0.0) out += kTwoPi;
  return {out, t};
}

Tensor3 euclidean_torus_metric(const ChartPoint& x) {
  if (!(x[0] > 0.0)) {
    throw CoordinateSingularityError("polar chart is singular at r = " +
                                     std::to_string(x[0]));
  }
  return diagonal_tensor(1.0, x[0] * x[0], 1.0);
}

Tensor3 product_tube_metric(const ChartPoint& x) {
  if (!(x[0] > 0.0)) {
    throw CoordinateSingularityError("polar chart is singular at r = " +
                                     std::to_string(x[0]));
  }
  const double ch = std::cosh(x[0] * std::cos(x[1]));
  return diagonal_tensor(1.0, x[0] * x[0], ch * ch);
}

TwistMap::TwistMap(double eps, double half_width, SmoothProfile profile)
    : eps_(eps), half_width_(half_width), profile_(profile) {
  if (!(eps > 0.0)) throw ParameterError("twist radius eps must be positive");
  if (!(half_width > 0.0 && half_width < kPi * eps)) {
    throw ParameterError("twist half-width must lie in (0, pi eps)");
  }
}

TwistMap TwistMap::with_default_width(double eps) { return {eps, 0.5 * kPi * eps}; }

double TwistMap::angle(double t) const {
  const double dist = std::abs(t - kPi * eps_);
  if (dist >= half_width_) return 0.0;
  return kPi * profile_(1.0 - dist / half_width_);
}

double TwistMap::angle_derivative(double t) const {
  const double offset = t - kPi * eps_;
  const double dist = std::abs(offset);
  if (dist >= half_width_) return 0.0;
  const double sign = offset < 0.0 ? -1.0 : 1.0;
  return -kPi * profile_.derivative(1.0 - dist / half_width_) * sign / half_width_;
}

ChartPoint TwistMap::apply(const ChartPoint& x) const {
  return {x[0], x[1] + angle(x[2]), x[2]};
}

ChartPoint TwistMap::invert(const ChartPoint& x) const {
  return {x[0], x[1] - angle(x[2]), x[2]};
}

CoordinateMap TwistMap::forward_map() const {
  TwistMap self = *this;
  return {"twist", [self](const ChartPoint& x) { return self.apply(x); },
          [self](const ChartPoint& x) {
            Tensor3 j = identity_tensor();
            j[1][2] = self.angle_derivative(x[2]);
            return j;
          }};
}

CoordinateMap TwistMap::inverse_map() const {
  TwistMap self = *this;
  return {"twist^-1", [self](const ChartPoint& x) { return self.invert(x); },
          [self](const ChartPoint& x) {
            Tensor3 j = identity_tensor();
            j[1][2] = -self.angle_derivative(x[2]);
            return j;
          }};
}

ChartPoint beta_twist(const ChartPoint& x, double eps, const SmoothProfile& profile,
                      double half_width) {
  return TwistMap(eps, half_width, profile).apply(x);
}

namespace {

ChartPoint glue(const ChartPoint& x, const CollarGeometry& g) {
  return {x[0] - g.inner_radius() + g.eps, x[2] / g.eps, g.loop_length * x[1] / kTwoPi};
}

ChartPoint unglue(const ChartPoint& y, const CollarGeometry& g) {
  return {y[0] + g.inner_radius() - g.eps, kTwoPi * y[2] / g.loop_length, g.eps * y[1]};
}

Tensor3 glue_jacobian(const CollarGeometry& g) {
  Tensor3 j{};
  j[0][0] = 1.0;
  j[1][2] = 1.0 / g.eps;
  j[2][1] = g.loop_length / kTwoPi;
  return j;
}

Tensor3 unglue_jacobian(const CollarGeometry& g) {
  Tensor3 j{};
  j[0][0] = 1.0;
  j[1][2] = kTwoPi / g.loop_length;
  j[2][1] = g.eps;
  return j;
}

}  // namespace

ChartPoint gluing_map(const ChartPoint& x, const CollarGeometry& geometry) {
  const double r0 = geometry.inner_radius();
  if (!within(x[0], r0, r0 + geometry.delta, 1e-12) || !within(x[1], 0.0, kTwoPi, 1e-12) ||
      !within(x[2], 0.0, geometry.filled_period(), 1e-12)) {
    throw DomainError("point " + describe(x) + " is outside the filled annulus product");
  }
  return glue(x, geometry);
}

ChartPoint gluing_map_inverse(const ChartPoint& y, const CollarGeometry& geometry) {
  if (!within(y[0], geometry.eps, geometry.eps + geometry.delta, 1e-12) ||
      !within(y[1], 0.0, kTwoPi, 1e-12) || !within(y[2], 0.0, geometry.loop_length, 1e-12)) {
    throw DomainError("point " + describe(y) + " is outside the collar");
  }
  return unglue(y, geometry);
}

CoordinateMap gluing_coordinate_map(const CollarGeometry& geometry) {
  return {"glue", [geometry](const ChartPoint& x) { return glue(x, geometry); },
          [geometry](const ChartPoint&) { return glue_jacobian(geometry); }};
}

CoordinateMap gluing_inverse_coordinate_map(const CollarGeometry& geometry) {
  return {"glue^-1", [geometry](const ChartPoint& y) { return unglue(y, geometry); },
          [geometry](const ChartPoint&) { return unglue_jacobian(geometry); }};
}

Tensor3 pullback_metric(const CoordinateMap& map, const MetricField& metric,
                        const ChartPoint& x, JacobianSource source) {
  const Tensor3 jac = (source == JacobianSource::kAnalyticIfAvailable && map.has_jacobian())
                          ? map.jacobian(x)
                          : finite_difference_jacobian(map, x);
  const double det = determinant(jac);
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * std::pow(std::max(max_abs(jac), 1e-300), 3)) {
    throw DegenerateMapError("Jacobian of " + map.name + " is singular at " + describe(x));
  }
  return symmetrize(matmul(transpose(jac), matmul(metric(map(x)), jac)));
}

MetricField pullback_field(CoordinateMap map, MetricField metric) {
  return [map = std::move(map), metric = std::move(metric)](const ChartPoint& x) {
    return pullback_metric(map, metric, x);
  };
}

double cutoff_phi(const ChartPoint& x, double eps, double delta,
                  const SmoothProfile& profile) {
  const double r = x[0];
  if (r <= eps) return 1.0;
  if (r >= eps + delta) return 0.0;
  const double midline = eps + delta / 2.0;
  return profile(0.5 - (r - midline) / delta);
}

Tensor3 blended_metric(const ChartPoint& x, const MetricField& inner,
                       const MetricField& outer, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw ParameterError("cutoff value outside [0, 1]");
  if (phi == 1.0) return inner(x);
  if (phi == 0.0) return outer(x);
  return add_scaled(inner(x), phi, outer(x), 1.0 - phi);
}

bool positive_definite_check(const Tensor3& m, double tol) {
  const double sym_tol = 1e-12 * std::max(1.0, max_abs(m));
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(m[i][j] - m[j][i]) > sym_tol) {
        throw ParameterError("tensor is not symmetric");
      }
    }
  }
  const double minor1 = m[0][0];
  const double minor2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return minor1 > tol && minor2 > tol && determinant(m) > tol;
}

double min_pivot(const Tensor3& m) {
  const double d0 = m[0][0];
  if (!(d0 > 0.0)) return d0;
  const double d1 = m[1][1] - m[0][1] * m[0][1] / d0;
  if (!(d1 > 0.0)) return d1;
  const double l20 = m[2][0] / d0;
  const double l21 = (m[2][1] - l20 * m[1][0]) / d1;
  const double d2 = m[2][2] - l20 * l20 * d0 - l21 * l21 * d1;
  return std::min({d0, d1, d2});
}

bool ChartBox::contains(const ChartPoint& x, double tol) const {
  for (int k = 0; k < 3; ++k) {
    if (!within(x[k], lower[k], upper[k], tol)) return false;
  }
  return true;
}

VolumeResult chart_volume(const MetricField& metric, const ChartBox& box,
                          std::array<int, 3> resolution) {
  for (int k = 0; k < 3; ++k) {
    if (resolution[k] < 1) throw ParameterError("quadrature resolution must be positive");
    if (!(box.upper[k] > box.lower[k])) throw ParameterError("empty integration box");
  }
  const std::array<double, 3> step{(box.upper[0] - box.lower[0]) / resolution[0],
                                   (box.upper[1] - box.lower[1]) / resolution[1],
                                   (box.upper[2] - box.lower[2]) / resolution[2]};
  // One task per slab of the first coordinate; partial sums are added back in
  // slab order so the result does not depend on scheduling.
  auto slab = [&](int i) {
    double sum = 0.0;
    ChartPoint x{box.lower[0] + (i + 0.5) * step[0], 0.0, 0.0};
    for (int j = 0; j < resolution[1]; ++j) {
      x[1] = box.lower[1] + (j + 0.5) * step[1];
      for (int k = 0; k < resolution[2]; ++k) {
        x[2] = box.lower[2] + (k + 0.5) * step[2];
        const Tensor3 g = metric(x);
        const double det = determinant(g);
        if (!(min_pivot(g) > 0.0) || !(det > 0.0)) {
          throw IntegrationError("metric is not positive definite at " + describe(x));
        }
        sum += std::sqrt(det);
      }
    }
    return sum;
  };
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<double> partial(static_cast<std::size_t>(resolution[0]), 0.0);
  std::vector<std::future<void>> tasks;
  for (unsigned w = 0; w < workers && w < static_cast<unsigned>(resolution[0]); ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (int i = static_cast<int>(w); i < resolution[0]; i += static_cast<int>(workers)) {
        partial[static_cast<std::size_t>(i)] = slab(i);
      }
    }));
  }
  for (auto& t : tasks) t.get();
  double total = 0.0;
  for (double s : partial) total += s;
  return {total * step[0] * step[1] * step[2], resolution};
}

VolumeResult euclidean_solid_torus_volume(const SolidTorusChart& chart,
                                          std::array<int, 3> resolution,
                                          double r_floor_fraction) {
  const double r_floor = r_floor_fraction * chart.r_max;
  VolumeResult shell = chart_volume(euclidean_torus_metric,
                                    {{r_floor, 0.0, 0.0}, {chart.r_max, kTwoPi, chart.t_period}},
                                    resolution);
  shell.volume += kPi * r_floor * r_floor * chart.t_period;
  return shell;
}

double curve_length(const MetricField& metric, std::span<const ChartPoint> samples,
                    const ChartBox* domain) {
  if (samples.size() < 2) throw ParameterError("a curve needs at least two samples");
  if (domain != nullptr) {
    for (const auto& x : samples) {
      if (!domain->contains(x)) throw DomainError("curve sample " + describe(x) + " outside domain");
    }
  }
  double length = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const ChartPoint& a = samples[i - 1];
    const ChartPoint& b = samples[i];
    const ChartPoint mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
    const std::array<double, 3> dx{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Tensor3 g = metric(mid);
    double q = 0.0;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) q += dx[r] * g[r][c] * dx[c];
    }
    length += std::sqrt(std::max(q, 0.0));
  }
  return length;
}

double substitution_length_bound(double eps, double delta, std::int64_t twist_count,
                                 std::int64_t genus) {
  if (!(eps > 0.0) || !(delta > 0.0)) throw ParameterError("eps and delta must be positive");
  if (twist_count < 0 || genus < 0) throw ParameterError("counts must be non-negative");
  return kTwoPi * (eps + delta) * static_cast<double>(twist_count + 2 * genus);
}

SurgeredCollarMetric::SurgeredCollarMetric(CollarGeometry geometry, MetricField outer,
                                           std::optional<TwistMap> twist,
                                           SmoothProfile profile)
    : geometry_(geometry),
      outer_(std::move(outer)),
      twist_(std::move(twist)),
      profile_(profile),
      to_filled_(gluing_inverse_coordinate_map(geometry)) {
  if (twist_) {
    if (twist_->eps() != geometry_.eps) {
      throw ParameterError("twist and collar must share the same eps");
    }
    to_filled_ = compose(twist_->inverse_map(), to_filled_);
  }
}

Tensor3 SurgeredCollarMetric::filled_metric(const ChartPoint& x) const {
  if (!twist_) return euclidean_torus_metric(x);
  return pullback_metric(twist_->inverse_map(), euclidean_torus_metric, x);
}

Tensor3 SurgeredCollarMetric::inner_metric(const ChartPoint& y) const {
  return pullback_metric(to_filled_, euclidean_torus_metric, y);
}

double SurgeredCollarMetric::phi(const ChartPoint& y) const {
  return cutoff_phi(y, geometry_.eps, geometry_.delta, profile_);
}

Tensor3 SurgeredCollarMetric::operator()(const ChartPoint& y) const {
  if (y[0] <= geometry_.eps) return inner_metric(y);
  if (y[0] >= geometry_.eps + geometry_.delta) return outer_(y);
  const double w = phi(y);
  return add_scaled(inner_metric(y), w, outer_(y), 1.0 - w);
}

ChartBox SurgeredCollarMetric::collar_box() const {
  return {{geometry_.eps, 0.0, 0.0},
          {geometry_.eps + geometry_.delta, kTwoPi, geometry_.loop_length}};
}

MetricField SurgeredCollarMetric::as_field() const {
  auto self = *this;
  return [self](const ChartPoint& y) { return self(y); };
}

VerificationReport verify_surgery_chart(const SurgeredCollarMetric& metric,
                                        const std::string& chart_name,
                                        const VerificationOptions& options) {
  if (options.samples < 1) throw ParameterError("need at least one sample");
  const CollarGeometry& geo = metric.geometry();
  const ChartBox box = metric.collar_box();
  VerificationReport report;
  report.chart = chart_name;
  report.samples = options.samples;
  report.min_eigenvalue_proxy = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_point = [&] {
    ChartPoint y;
    for (int k = 0; k < 3; ++k) y[k] = box.lower[k] + unit(rng) * (box.upper[k] - box.lower[k]);
    return y;
  };

  for (std::int64_t s = 0; s < options.samples; ++s) {
    const Tensor3 g = metric(random_point());
    if (!positive_definite_check(g)) ++report.non_positive_samples;
    report.min_eigenvalue_proxy = std::min(report.min_eigenvalue_proxy, min_pivot(g));
  }

  // One-sided limits across r' = eps and r' = eps + delta.
  const double h = options.interface_step * geo.delta;
  const double hd = 1e-7 * geo.delta;
  const std::int64_t interface_samples = std::min<std::int64_t>(options.samples, 500);
  for (std::int64_t s = 0; s < interface_samples; ++s) {
    ChartPoint y = random_point();
    for (double r : {geo.eps, geo.eps + geo.delta}) {
      ChartPoint lo = y, hi = y, at = y;
      lo[0] = r - h;
      hi[0] = r + h;
      at[0] = r;
      report.interface_max_mismatch =
          std::max(report.interface_max_mismatch, relative_mismatch(metric(lo), metric(hi)));
      ChartPoint lo2 = y, hi2 = y;
      lo2[0] = r - hd;
      hi2[0] = r + hd;
      const Tensor3 g0 = metric(at);
      const Tensor3 left = add_scaled(g0, 1.0 / hd, metric(lo2), -1.0 / hd);
      const Tensor3 right = add_scaled(metric(hi2), 1.0 / hd, g0, -1.0 / hd);
      const double scale = std::max({1.0, max_abs(left), max_abs(right)});
      report.derivative_max_mismatch = std::max(
          report.derivative_max_mismatch, max_abs(add_scaled(left, 1.0, right, -1.0)) / scale);
    }
  }

  report.phi_at_midline = metric.phi({geo.eps + geo.delta / 2.0, 0.0, 0.0});

  const double r0 = geo.inner_radius();
  for (double r : {r0, r0 + geo.delta}) {
    for (double theta : {0.0, kTwoPi}) {
      for (double t : {0.0, geo.filled_period()}) {
        const ChartPoint image = gluing_map({r, theta, t}, geo);
        const ChartPoint expected{r == r0 ? geo.eps : geo.eps + geo.delta,
                                  t == 0.0 ? 0.0 : kTwoPi,
                                  theta == 0.0 ? 0.0 : geo.loop_length};
        for (int k = 0; k < 3; ++k) {
          report.corner_max_error = std::max(report.corner_max_error, std::abs(image[k] - expected[k]));
        }
      }
    }
  }

  const VolumeResult vol = chart_volume(metric.as_field(), box, options.resolution);
  report.volume = vol.volume;
  report.resolution = vol.resolution;
  return report;
}

}  // namespace sysfree::surgery
