#include "sysfree/classical_baselines.hpp"

#include <algorithm>
#include <cmath>

#include "sysfree/errors.hpp"

namespace sysfree::baselines {

namespace {

double norm2(Vec2 u) { return dot(u, u); }

Vec2 sub(Vec2 u, Vec2 v, double m) { return {u.x - m * v.x, u.y - m * v.y}; }

}  // namespace

Lattice2D::Lattice2D(Vec2 u, Vec2 v) : u_(u), v_(v) {
  const double scale = std::sqrt(norm2(u) * norm2(v));
  if (!std::isfinite(scale) || scale == 0.0 || std::abs(covolume()) <= 1e-14 * scale) {
    throw ParameterError("lattice basis is degenerate");
  }
}

Lattice2D Lattice2D::hexagonal(double scale) {
  return {{scale, 0.0}, {0.5 * scale, 0.5 * std::sqrt(3.0) * scale}};
}

double Lattice2D::covolume() const { return std::abs(u_.x * v_.y - u_.y * v_.x); }

RoundProjectivePlane::RoundProjectivePlane(double radius) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ParameterError("projective plane radius must be positive");
  }
}

double RoundProjectivePlane::systole() const { return std::numbers::pi * radius_; }

double RoundProjectivePlane::area() const {
  return 2.0 * std::numbers::pi * radius_ * radius_;
}

std::pair<Vec2, Vec2> gauss_reduce(const Lattice2D& lattice) {
  Vec2 u = lattice.u();
  Vec2 v = lattice.v();
  if (norm2(v) < norm2(u)) std::swap(u, v);
  // Each pass strictly shortens v below |u| or stops.
  for (;;) {
    const double m = std::round(dot(u, v) / norm2(u));
    v = sub(v, u, m);
    if (norm2(v) >= norm2(u)) break;
    std::swap(u, v);
  }
  return {u, v};
}

double lattice_systole(const Lattice2D& lattice) {
  const auto [u, v] = gauss_reduce(lattice);
  // Rounding can leave the reduction one step short; the neighbours cover it.
  const double shortest = std::min({norm2(u), norm2(v), norm2(sub(v, u, 1.0)),
                                    norm2(sub(v, u, -1.0))});
  return std::sqrt(shortest);
}

double loewner_ratio(const Lattice2D& lattice) {
  const double s = lattice_systole(lattice);
  return s * s / lattice.covolume();
}

double pu_ratio(const RoundProjectivePlane& plane) {
  const double s = plane.systole();
  return s * s / plane.area();
}

}  // namespace sysfree::baselines
