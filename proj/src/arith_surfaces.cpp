#include "sysfree/arith_surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "sysfree/errors.hpp"

namespace sysfree::arith {

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw ArithmeticOverflowError("group element coefficient exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

std::array<std::int64_t, 4> canonical(std::array<std::int64_t, 4> v) {
  bool flip = v[0] < 0;
  if (v[0] == 0) {
    for (int k = 1; k < 4; ++k) {
      if (v[k] != 0) {
        flip = v[k] < 0;
        break;
      }
    }
  }
  if (flip) {
    for (auto& x : v) x = -x;
  }
  return v;
}

std::int64_t mod(std::int64_t x, std::int64_t n) {
  std::int64_t r = x % n;
  return r < 0 ? r + n : r;
}

// Floor square root of a non-negative 64-bit value, or -1 if not a square.
std::int64_t exact_sqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && static_cast<__int128>(r) * r > v) --r;
  while (static_cast<__int128>(r + 1) * (r + 1) <= v) ++r;
  return static_cast<__int128>(r) * r == v ? r : -1;
}

bool witness_order(const GroupElement& x, const GroupElement& y) {
  auto l1 = [](const GroupElement& e) {
    return std::llabs(e.b()) + std::llabs(e.c()) + std::llabs(e.d());
  };
  if (l1(x) != l1(y)) return l1(x) < l1(y);
  return std::tie(x.tuple()[1], x.tuple()[2], x.tuple()[3]) >
         std::tie(y.tuple()[1], y.tuple()[2], y.tuple()[3]);
}

std::vector<SpectrumEntry> scan_traces(std::int64_t p, std::int64_t n,
                                       std::int64_t a_lo, std::int64_t a_hi,
                                       std::int64_t box) {
  std::vector<SpectrumEntry> out;
  const std::int64_t start = -(box / n) * n;
  for (std::int64_t a = a_lo; a <= a_hi; ++a) {
    const std::int64_t r = mod(a, n);
    if (r != mod(1, n) && r != mod(-1, n)) continue;
    SpectrumEntry entry;
    entry.abs_trace = 2 * a;
    entry.length = length_from_trace(entry.abs_trace);
    for (std::int64_t b = start; b <= box; b += n) {
      for (std::int64_t d = start; d <= box; d += n) {
        const std::int64_t c2 = p * (b * b + d * d) - a * a + 1;
        if (c2 < 0) continue;
        const std::int64_t c = exact_sqrt(c2);
        if (c < 0 || c % n != 0) continue;
        entry.witnesses.emplace_back(a, b, c, d, p);
        if (c != 0) entry.witnesses.emplace_back(a, b, -c, d, p);
      }
    }
    if (!entry.witnesses.empty()) {
      std::sort(entry.witnesses.begin(), entry.witnesses.end(), witness_order);
      out.push_back(std::move(entry));
    }
  }
  return out;
}

}  // namespace

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t k = 2; k * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

FuchsianParams::FuchsianParams(std::int64_t p) : p_(p) {
  if (!is_prime(p) || p % 4 != 3) {
    throw ParameterError("p must be a prime congruent to 3 mod 4, got " +
                         std::to_string(p));
  }
}

CongruenceLevel::CongruenceLevel(std::int64_t n) : n_(n) {
  if (n < 2) {
    throw ParameterError("congruence level must be at least 2, got " + std::to_string(n));
  }
}

__int128 reduced_norm(std::int64_t a, std::int64_t b, std::int64_t c,
                      std::int64_t d, std::int64_t p) {
  const __int128 A = a, B = b, C = c, D = d, P = p;
  return A * A - P * B * B + C * C - P * D * D;
}

GroupElement::GroupElement(std::int64_t a, std::int64_t b, std::int64_t c,
                           std::int64_t d, std::int64_t p)
    : v_(canonical({a, b, c, d})), p_(p) {
  if (reduced_norm(a, b, c, d, p) != 1) {
    throw ParameterError("tuple (" + std::to_string(a) + "," + std::to_string(b) + "," +
                         std::to_string(c) + "," + std::to_string(d) +
                         ") does not satisfy a^2 - p b^2 + c^2 - p d^2 = 1");
  }
}

std::int64_t GroupElement::abs_trace() const { return 2 * std::llabs(v_[0]); }

GroupElement multiply(const GroupElement& lhs, const GroupElement& rhs) {
  if (lhs.p() != rhs.p()) {
    throw ParameterError("cannot multiply elements with different p");
  }
  const __int128 p = lhs.p();
  const __int128 a1 = lhs.a(), b1 = lhs.b(), c1 = lhs.c(), d1 = lhs.d();
  const __int128 a2 = rhs.a(), b2 = rhs.b(), c2 = rhs.c(), d2 = rhs.d();
  // Quaternion product in the basis 1, j, i, ij with i^2 = -1, j^2 = p.
  const __int128 a = a1 * a2 + p * b1 * b2 - c1 * c2 + p * d1 * d2;
  const __int128 b = a1 * b2 + b1 * a2 - c1 * d2 + d1 * c2;
  const __int128 c = a1 * c2 + c1 * a2 + p * d1 * b2 - p * b1 * d2;
  const __int128 d = a1 * d2 + d1 * a2 + c1 * b2 - b1 * c2;
  return {narrow(a), narrow(b), narrow(c), narrow(d), lhs.p()};
}

GroupElement inverse(const GroupElement& e) {
  return {e.a(), -e.b(), -e.c(), -e.d(), e.p()};
}

bool is_in_level(const GroupElement& e, CongruenceLevel level) {
  const std::int64_t n = level.N();
  if (mod(e.b(), n) != 0 || mod(e.c(), n) != 0 || mod(e.d(), n) != 0) return false;
  const std::int64_t r = mod(e.a(), n);
  return r == mod(1, n) || r == mod(-1, n);
}

double length_from_trace(std::int64_t abs_trace) {
  if (abs_trace <= 2) {
    throw NonHyperbolicError("|trace| = " + std::to_string(abs_trace) +
                             " is not hyperbolic");
  }
  return 2.0 * std::acosh(static_cast<double>(abs_trace) / 2.0);
}

double translation_length(const GroupElement& e) {
  if (std::llabs(e.a()) <= 1) {
    throw NonHyperbolicError(e.is_identity() ? "identity has no translation length"
                                             : "element with |a| <= 1 is not hyperbolic");
  }
  return 2.0 * std::acosh(static_cast<double>(std::llabs(e.a())));
}

LengthSpectrum enumerate_level_elements(const FuchsianParams& params,
                                        CongruenceLevel level,
                                        std::int64_t trace_bound,
                                        std::int64_t box_bound, unsigned threads) {
  if (trace_bound <= 2) throw ParameterError("trace bound must exceed 2");
  if (box_bound < 1) throw ParameterError("box bound must be at least 1");
  const std::int64_t p = params.p();
  const std::int64_t a_max = trace_bound / 2;
  constexpr double kLimit = 4.0e18;
  if (2.0 * p * static_cast<double>(box_bound) * static_cast<double>(box_bound) > kLimit ||
      static_cast<double>(a_max) * static_cast<double>(a_max) > kLimit) {
    throw ParameterError("search bounds overflow 64-bit arithmetic");
  }

  LengthSpectrum out;
  out.p = p;
  out.N = level.N();
  out.trace_bound = trace_bound;
  out.box_bound = box_bound;
  if (a_max < 2) return out;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::int64_t count = a_max - 1;
  const std::int64_t chunks = std::min<std::int64_t>(threads, count);
  std::vector<std::future<std::vector<SpectrumEntry>>> parts;
  for (std::int64_t k = 0; k < chunks; ++k) {
    const std::int64_t lo = 2 + count * k / chunks;
    const std::int64_t hi = 1 + count * (k + 1) / chunks;
    parts.push_back(std::async(std::launch::async, scan_traces, p, level.N(), lo, hi,
                               box_bound));
  }
  // Chunks cover ascending disjoint a-ranges, so concatenation stays sorted.
  for (auto& part : parts) {
    auto entries = part.get();
    std::move(entries.begin(), entries.end(), std::back_inserter(out.entries));
  }
  return out;
}

SystoleCertificate certificate_from_spectrum(const LengthSpectrum& spectrum) {
  if (spectrum.entries.empty()) {
    throw NoCertificateError("no hyperbolic level-" + std::to_string(spectrum.N) +
                             " element within trace bound " +
                             std::to_string(spectrum.trace_bound) + " and box " +
                             std::to_string(spectrum.box_bound));
  }
  const SpectrumEntry& first = spectrum.entries.front();
  return {first.length, first.abs_trace, first.witnesses.front()};
}

SystoleCertificate systole_certificate(const FuchsianParams& params,
                                       CongruenceLevel level, std::int64_t trace_bound,
                                       std::int64_t box_bound, unsigned threads) {
  return certificate_from_spectrum(
      enumerate_level_elements(params, level, trace_bound, box_bound, threads));
}

StableCertificate certify_systole(const FuchsianParams& params, CongruenceLevel level,
                                  std::int64_t trace_bound, std::int64_t box_bound,
                                  unsigned threads) {
  StableCertificate out;
  out.certificate = systole_certificate(params, level, trace_bound, box_bound, threads);
  out.doubled = systole_certificate(params, level, trace_bound, 2 * box_bound, threads);
  out.stable = out.certificate.abs_trace == out.doubled.abs_trace;
  return out;
}

std::int64_t residue_group_order(const FuchsianParams& params, CongruenceLevel level) {
  const std::int64_t n = level.N();
  const std::int64_t p = mod(params.p(), n);
  // The norm splits as (a^2 - p b^2) + (c^2 - p d^2); both halves share one
  // value histogram over Z/N.
  std::vector<std::int64_t> hist(static_cast<std::size_t>(n), 0);
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t y = 0; y < n; ++y) {
      const std::int64_t v = mod((x * x) % n - (p * ((y * y) % n)) % n, n);
      ++hist[static_cast<std::size_t>(v)];
    }
  }
  std::int64_t count = 0;
  for (std::int64_t v = 0; v < n; ++v) {
    count += hist[static_cast<std::size_t>(v)] * hist[static_cast<std::size_t>(mod(1 - v, n))];
  }
  return n > 2 ? count / 2 : count;
}

double genus_estimate(std::int64_t index, Rational chi0) {
  if (index < 1) throw ParameterError("index must be at least 1");
  if (chi0.den == 0) throw ParameterError("chi0 has zero denominator");
  if (chi0.value() >= 0.0) {
    throw ParameterError("base Euler characteristic must be negative");
  }
  return 1.0 - static_cast<double>(index) * chi0.value() / 2.0;
}

double diameter_upper_bound(std::int64_t genus, double c_iso, double seed_area) {
  if (genus < 2) throw ParameterError("genus must be at least 2");
  if (!(c_iso > 0.0)) throw ParameterError("isoperimetric constant must be positive");
  if (!(seed_area > 0.0)) throw ParameterError("seed area must be positive");
  const double total = 4.0 * std::numbers::pi * static_cast<double>(genus - 1);
  if (seed_area >= total) {
    throw DegenerateInputError("seed area must be smaller than the total area 4 pi (g - 1)");
  }
  return c_iso * std::log(total / seed_area);
}

}  // namespace sysfree::arith
