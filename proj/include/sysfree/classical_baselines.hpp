#pragma once

// Closed-form systolic ratios for flat tori and round projective planes. These
// are the two metrics where the classical torus and RP^2 inequalities are
// known to be sharp, so they serve as regression anchors for the ratio code.

#include <numbers>
#include <utility>

namespace sysfree::baselines {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(Vec2 u, Vec2 v) { return u.x * v.x + u.y * v.y; }

class Lattice2D {
 public:
  // Throws ParameterError when the basis is (numerically) degenerate.
  Lattice2D(Vec2 u, Vec2 v);

  static Lattice2D hexagonal(double scale = 1.0);

  Vec2 u() const { return u_; }
  Vec2 v() const { return v_; }
  double covolume() const;

 private:
  Vec2 u_;
  Vec2 v_;
};

class RoundProjectivePlane {
 public:
  explicit RoundProjectivePlane(double radius);
  double radius() const { return radius_; }

  // Antipodal quotient of the round sphere: half a great circle, half the area.
  double systole() const;
  double area() const;

 private:
  double radius_;
};

// Lagrange-Gauss reduction: returns a basis with |u| <= |v| and
// |u.v| <= |u|^2 / 2.
std::pair<Vec2, Vec2> gauss_reduce(const Lattice2D& lattice);

double lattice_systole(const Lattice2D& lattice);

// systole^2 / area. Never exceeds kLoewnerBound.
double loewner_ratio(const Lattice2D& lattice);

double pu_ratio(const RoundProjectivePlane& plane);

inline constexpr double kLoewnerBound = 2.0 * std::numbers::inv_sqrt3;
inline constexpr double kPuBound = std::numbers::pi / 2.0;

}  // namespace sysfree::baselines
