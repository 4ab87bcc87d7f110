#pragma once

// Points of the Riemann sphere in homogeneous coordinates and the family of
// quadratic rational maps with critical points 0 and infinity.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "mating/errors.hpp"

namespace mating {

using Complex = std::complex<double>;

// [z : w], scaled so the larger coordinate has modulus 1.
class SpherePoint {
 public:
  SpherePoint() : z_(0.0), w_(1.0) {}
  SpherePoint(Complex z, Complex w) : z_(z), w_(w) { normalize(); }

  static SpherePoint finite(Complex z) { return SpherePoint(z, 1.0); }
  static SpherePoint infinity() { return SpherePoint(1.0, 0.0); }

  const Complex& z() const { return z_; }
  const Complex& w() const { return w_; }

  bool is_infinite() const { return w_ == Complex(0.0); }
  // Affine value z / w; infinite for the point at infinity.
  Complex value() const {
    if (is_infinite()) return {std::numeric_limits<double>::infinity(), 0.0};
    return z_ / w_;
  }

  bool is_finite_number() const {
    return std::isfinite(z_.real()) && std::isfinite(z_.imag()) && std::isfinite(w_.real()) &&
           std::isfinite(w_.imag()) && (z_ != Complex(0.0) || w_ != Complex(0.0));
  }

 private:
  void normalize() {
    const double s = std::max(std::abs(z_), std::abs(w_));
    if (s > 0 && std::isfinite(s)) {
      z_ /= s;
      w_ /= s;
    }
  }

  Complex z_, w_;
};

// Chordal distance |z1 w2 - z2 w1| / (|(z1, w1)| |(z2, w2)|), at most 1.
inline double chordal(const SpherePoint& a, const SpherePoint& b) {
  const double na = std::hypot(std::abs(a.z()), std::abs(a.w()));
  const double nb = std::hypot(std::abs(b.z()), std::abs(b.w()));
  return std::abs(a.z() * b.w() - b.z() * a.w()) / (na * nb);
}

// R([z : w]) = [alpha z^2 + beta w^2 : gamma z^2 + delta w^2].
struct QuadraticMap {
  Complex alpha{1.0}, beta{0.0}, gamma{0.0}, delta{1.0};

  static QuadraticMap square() { return {}; }

  SpherePoint operator()(const SpherePoint& p) const {
    const Complex z2 = p.z() * p.z();
    const Complex w2 = p.w() * p.w();
    return SpherePoint(alpha * z2 + beta * w2, gamma * z2 + delta * w2);
  }

  Complex resultant() const { return alpha * delta - beta * gamma; }

  double coefficient_norm2() const {
    return std::norm(alpha) + std::norm(beta) + std::norm(gamma) + std::norm(delta);
  }

  // |resultant| / |coefficients|^2, invariant under rescaling; zero exactly
  // when the map drops degree.
  double normalized_resultant() const { return std::abs(resultant()) / coefficient_norm2(); }

  SpherePoint critical_value_white() const { return (*this)(SpherePoint::finite(0.0)); }
  SpherePoint critical_value_black() const { return (*this)(SpherePoint::infinity()); }

  // The two preimages of y, +u and -u. Returns u.
  SpherePoint preimage(const SpherePoint& y) const {
    const Complex a = delta * y.z() - beta * y.w();   // z^2 coefficient target
    const Complex b = alpha * y.w() - gamma * y.z();  // w^2 coefficient target
    if (a == Complex(0.0) && b == Complex(0.0)) throw DegenerateMap("preimage of a point under a degenerate map");
    if (std::abs(a) <= std::abs(b)) return SpherePoint(std::sqrt(a / b), 1.0);
    return SpherePoint(1.0, std::sqrt(b / a));
  }
};

// The map with critical points 0 and infinity, R(0) = v_w, R(infinity) = v_b and
// R(1) = 1. Writing v_w = [a0 : a1] and v_b = [b0 : b1]:
//   alpha = (a1 - a0) b0, beta = (b0 - b1) a0, gamma = (a1 - a0) b1, delta = (b0 - b1) a1,
// whose resultant (a1 - a0)(b0 - b1)(b0 a1 - b1 a0) vanishes iff v_w = 1, v_b = 1
// or v_w = v_b.
inline QuadraticMap map_from_critical_values(const SpherePoint& vw, const SpherePoint& vb) {
  const Complex a0 = vw.z(), a1 = vw.w(), b0 = vb.z(), b1 = vb.w();
  QuadraticMap r{(a1 - a0) * b0, (b0 - b1) * a0, (a1 - a0) * b1, (b0 - b1) * a1};
  if (r.resultant() == Complex(0.0)) {
    if (chordal(vw, vb) == 0.0) throw DegenerateMap("critical values collide");
    throw DegenerateMap("a critical value sits at the fixed point 1");
  }
  return r;
}

inline QuadraticMap map_from_critical_values(Complex vw, Complex vb) {
  return map_from_critical_values(SpherePoint::finite(vw), SpherePoint::finite(vb));
}

// Sample points of a latitude/longitude grid on the sphere.
inline std::vector<SpherePoint> sphere_grid(std::size_t rows, std::size_t cols) {
  std::vector<SpherePoint> pts;
  pts.reserve(rows * cols);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double theta = pi * (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
    for (std::size_t j = 0; j < cols; ++j) {
      const double phi = 2 * pi * static_cast<double>(j) / static_cast<double>(cols);
      pts.emplace_back(std::sin(theta / 2) * std::polar(1.0, phi), Complex(std::cos(theta / 2)));
    }
  }
  return pts;
}

// Spherical sup-distance between two maps over a rows x cols grid.
inline double sup_distance(const QuadraticMap& f, const QuadraticMap& g, std::size_t rows = 64,
                           std::size_t cols = 64) {
  double best = 0;
  for (const auto& p : sphere_grid(rows, cols)) best = std::max(best, chordal(f(p), g(p)));
  return best;
}

inline std::string format_complex(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
  return buf;
}

inline std::string format_point(const SpherePoint& p) {
  if (p.is_infinite()) return "inf";
  return format_complex(p.value());
}

}  // namespace mating
