#pragma once

// Exact arithmetic in the unit group of the quaternion order Z<1, i, j, ij>,
// i^2 = -1, j^2 = p, realised as the 2x2 matrices
//
//     | a + b*sqrt(p)   -c + d*sqrt(p) |
//     | c + d*sqrt(p)    a - b*sqrt(p) |
//
// with a^2 - p b^2 + c^2 - p d^2 = 1, taken modulo +-I. Elements of the level-N
// congruence subgroup are those congruent to +-I modulo N. The quotient of the
// hyperbolic plane by a level-N subgroup is a closed hyperbolic surface; the
// systole of that surface is the shortest translation length of a hyperbolic
// element, which is what the enumeration below certifies.

#include <array>
#include <cstdint>
#include <vector>

namespace sysfree::arith {

// p must be a prime congruent to 3 modulo 4.
class FuchsianParams {
 public:
  explicit FuchsianParams(std::int64_t p);
  std::int64_t p() const { return p_; }

 private:
  std::int64_t p_;
};

bool is_prime(std::int64_t n);

class CongruenceLevel {
 public:
  explicit CongruenceLevel(std::int64_t n);
  std::int64_t N() const { return n_; }

 private:
  std::int64_t n_;
};

// a^2 - p b^2 + c^2 - p d^2, evaluated without overflow.
__int128 reduced_norm(std::int64_t a, std::int64_t b, std::int64_t c,
                      std::int64_t d, std::int64_t p);

// Canonical representative modulo +-I: a > 0, or a == 0 and the first nonzero
// of (b, c, d) positive.
class GroupElement {
 public:
  // Throws ParameterError unless the tuple has reduced norm 1.
  GroupElement(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
               std::int64_t p);

  static GroupElement identity(std::int64_t p) { return {1, 0, 0, 0, p}; }

  std::int64_t a() const { return v_[0]; }
  std::int64_t b() const { return v_[1]; }
  std::int64_t c() const { return v_[2]; }
  std::int64_t d() const { return v_[3]; }
  std::int64_t p() const { return p_; }
  const std::array<std::int64_t, 4>& tuple() const { return v_; }

  // Trace of the underlying matrix in absolute value, i.e. 2|a|.
  std::int64_t abs_trace() const;
  bool is_identity() const { return v_ == std::array<std::int64_t, 4>{1, 0, 0, 0}; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  std::array<std::int64_t, 4> v_;
  std::int64_t p_;
};

GroupElement multiply(const GroupElement& lhs, const GroupElement& rhs);
GroupElement inverse(const GroupElement& e);

bool is_in_level(const GroupElement& e, CongruenceLevel level);

// 2 arccosh(|a|); throws NonHyperbolicError when |a| <= 1.
double translation_length(const GroupElement& e);

// Length of the closed geodesic of a hyperbolic element with the given |trace|.
double length_from_trace(std::int64_t abs_trace);

struct SpectrumEntry {
  std::int64_t abs_trace = 0;
  double length = 0.0;
  // Ordered by the L1 norm of (b, c, d), ties broken lexicographically
  // descending; witnesses.front() is the representative.
  std::vector<GroupElement> witnesses;

  std::size_t witness_count() const { return witnesses.size(); }
  friend bool operator==(const SpectrumEntry&, const SpectrumEntry&) = default;
};

struct LengthSpectrum {
  std::int64_t p = 0;
  std::int64_t N = 0;
  std::int64_t trace_bound = 0;
  std::int64_t box_bound = 0;
  std::vector<SpectrumEntry> entries;  // ascending abs_trace

  friend bool operator==(const LengthSpectrum&, const LengthSpectrum&) = default;
};

// Every hyperbolic level-N element with 2|a| <= trace_bound and |b|, |d| <=
// box_bound. c is solved for from the norm equation, so it is unbounded.
// threads == 0 picks the hardware concurrency.
LengthSpectrum enumerate_level_elements(const FuchsianParams& params,
                                        CongruenceLevel level,
                                        std::int64_t trace_bound,
                                        std::int64_t box_bound,
                                        unsigned threads = 0);

struct SystoleCertificate {
  double length = 0.0;
  std::int64_t abs_trace = 0;
  GroupElement witness = GroupElement::identity(3);
};

// Upper bound on the systole of H^2 / Gamma(N): the shortest element found in
// the search box. Throws NoCertificateError when the box holds none.
SystoleCertificate systole_certificate(const FuchsianParams& params,
                                       CongruenceLevel level,
                                       std::int64_t trace_bound,
                                       std::int64_t box_bound,
                                       unsigned threads = 0);

SystoleCertificate certificate_from_spectrum(const LengthSpectrum& spectrum);

struct StableCertificate {
  SystoleCertificate certificate;
  SystoleCertificate doubled;  // same search with box_bound doubled
  bool stable = false;         // both searches agree on the minimal trace
};

// The certificate is reported as the systole only when `stable` holds.
StableCertificate certify_systole(const FuchsianParams& params,
                                  CongruenceLevel level,
                                  std::int64_t trace_bound,
                                  std::int64_t box_bound,
                                  unsigned threads = 0);

// Order of the residue group {x mod N : nrd(x) = 1 mod N} / {+-I}. The halving
// applies only for N > 2, where -I and I differ mod N.
std::int64_t residue_group_order(const FuchsianParams& params,
                                 CongruenceLevel level);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Base orbifold Euler characteristic used when none is configured. With it the
// level-2 cover (index 8 for p = 3) has genus 2.
inline constexpr Rational kDefaultChi0{-1, 4};

// 1 - index * chi0 / 2; not rounded, a fractional result means chi0 does not
// fit the index model.
double genus_estimate(std::int64_t index, Rational chi0);

// c_iso * ln(4 pi (genus - 1) / seed_area): the radius at which a disc whose
// area grows at least like exp(t / c_iso) from seed_area fills the whole
// surface.
double diameter_upper_bound(std::int64_t genus, double c_iso, double seed_area);

}  // namespace sysfree::arith
