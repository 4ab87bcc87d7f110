#pragma once

// Green's function and Boettcher coordinates of P(z) = z^2 + c outside the
// filled Julia set, and the gluing of two basins of infinity at level lambda.
//
// phi maps the exterior of the unit disk onto the basin of infinity with
// phi(w) ~ w, and phi^{-1}(z) = lim (P^n(z))^(1/2^n). Near infinity
// psi = phi has the Laurent expansion w * sum_k a_k w^(-2k), a_0 = 1, obtained
// from psi(w)^2 + c = psi(w^2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "mating/errors.hpp"
#include "mating/sphere.hpp"

namespace mating {

struct GreenValue {
  double value = 0;       // G(z), 0 when the orbit stayed bounded
  bool escaped = false;
  std::size_t iterations = 0;
};

class Boettcher {
 public:
  static constexpr std::size_t kIterationBudget = 1000;
  static constexpr double kLargeRadius = 1e10;

  explicit Boettcher(Complex c) : c_(c), escape_radius_(std::max(4.0, std::abs(c) + 2.0)) {}

  const Complex& parameter() const { return c_; }
  double escape_radius() const { return escape_radius_; }

  GreenValue green(Complex z) const {
    GreenValue g;
    std::size_t n = 0;
    while (std::abs(z) <= escape_radius_) {
      if (n >= kIterationBudget) {
        g.iterations = n;
        return g;
      }
      z = z * z + c_;
      ++n;
    }
    // Past the escape radius, keep going until the tail term is negligible.
    while (std::abs(z) < kLargeRadius) {
      z = z * z + c_;
      ++n;
    }
    g.escaped = true;
    g.iterations = n;
    g.value = std::ldexp(std::log(std::abs(z)) + 0.5 * std::log(std::abs(1.0 + c_ / (z * z))), -static_cast<int>(n));
    return g;
  }

  // phi^{-1}(z) for z outside the filled Julia set.
  Complex inverse(Complex z) const { return inverse_with_derivative(z).first; }

  // phi^{-1}(z) and its complex derivative.
  std::pair<Complex, Complex> inverse_with_derivative(Complex z) const {
    if (c_ == Complex(0.0)) {
      if (std::abs(z) <= 1.0) throw DomainError("point lies in the filled Julia set");
      return {z, 1.0};
    }
    std::vector<Complex> orbit{z};
    while (std::abs(orbit.back()) < 1e12) {
      if (orbit.size() > kIterationBudget) throw DomainError("point lies in the filled Julia set");
      const Complex& x = orbit.back();
      orbit.push_back(x * x + c_);
    }
    // d/dz log phi^{-1} = prod_{k<N} z_k / z_N, accumulated as E_n = E_{n-1} z_{n-1}^2 / z_n.
    Complex e = 1.0 / orbit[0];
    for (std::size_t n = 1; n < orbit.size(); ++n) e = e * orbit[n - 1] * orbit[n - 1] / orbit[n];
    Complex w = orbit.back();
    for (std::size_t n = orbit.size() - 1; n-- > 0;) {
      Complex r = std::sqrt(w);
      w = choose_root(r, orbit[n]);
    }
    return {w, w * e};
  }

  // phi(w) for |w| > 1 + margin.
  Complex forward(Complex w, double margin = 1e-3) const {
    if (c_ == Complex(0.0)) {
      if (std::abs(w) < 1.0) throw DomainError("|w| must exceed 1");
      return w;
    }
    if (!(std::abs(w) > 1.0 + margin)) throw DomainError("|w| must exceed 1 + margin");
    Complex z = series(w, terms_for(std::abs(w), 1e-8));
    double residual = 0;
    for (int it = 0; it < 100; ++it) {
      std::pair<Complex, Complex> fd;
      try {
        fd = inverse_with_derivative(z);
      } catch (const DomainError&) {
        throw NumericError("Boettcher inversion left the basin of infinity");
      }
      residual = std::abs(fd.first - w);
      if (residual <= 1e-15 * std::abs(w)) return z;
      // Newton step, halved until the residual drops and the iterate stays
      // in the basin of infinity.
      Complex step = (fd.first - w) / fd.second;
      bool moved = false;
      for (int k = 0; k < 40 && !moved; ++k, step *= 0.5) {
        try {
          const Complex trial = z - step;
          if (std::abs(inverse(trial) - w) < residual) {
            z = trial;
            moved = true;
          }
        } catch (const DomainError&) {
        }
      }
      if (!moved) break;
    }
    if (residual <= 1e-9 * std::abs(w)) return z;
    throw NumericError("Newton inversion of the Boettcher map did not converge (residual " +
                       std::to_string(residual) + ")");
  }

  // Partial sum of the Laurent series of phi with the given number of terms.
  Complex series(Complex w, std::size_t terms) const {
    std::lock_guard lock(mutex_);
    ensure_coefficients(terms);
    const Complex u = 1.0 / (w * w);
    Complex acc = 0;
    for (std::size_t k = terms; k-- > 0;) acc = acc * u + coeffs_[k];
    return w * acc;
  }

  std::vector<Complex> coefficients(std::size_t terms) const {
    std::lock_guard lock(mutex_);
    ensure_coefficients(terms);
    return {coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(terms)};
  }

 private:
  static constexpr std::size_t kMaxTerms = 4096;

  // Terms needed for a tail below tol |w|, using |a_k| <= 1 / sqrt(2k - 1).
  static std::size_t terms_for(double modulus, double tol) {
    const double rho = 1.0 / (modulus * modulus);
    double tail = rho / (1.0 - rho);
    std::size_t k = 1;
    while (k < kMaxTerms && tail / std::sqrt(2.0 * static_cast<double>(k) + 1.0) > tol) {
      tail *= rho;
      ++k;
    }
    return k + 1;
  }

  // Caller holds mutex_.
  void ensure_coefficients(std::size_t terms) const {
    if (coeffs_.empty()) coeffs_.push_back(1.0);
    while (coeffs_.size() < terms) {
      const std::size_t n = coeffs_.size();
      Complex s = 0;
      for (std::size_t i = 1; i < n; ++i) s += coeffs_[i] * coeffs_[n - i];
      Complex v = -s;
      if (n % 2 == 0) v += coeffs_[n / 2];
      if (n == 1) v -= c_;
      coeffs_.push_back(0.5 * v);
    }
  }

  // Of the two square roots +-r of phi^{-1}(z_{n+1}), the one that is
  // phi^{-1}(z_n). Far from the unit circle phi is close to the identity
  // (|phi(w) - w| <= sqrt(-log(1 - |w|^-2)) < |w| once |w| >= 1.2), so the root
  // nearest z_n is right; closer in, compare z_n with the Laurent series.
  Complex choose_root(Complex r, Complex zn) const {
    const double m = std::abs(r);
    if (m >= 1.2) return std::abs(r - zn) <= std::abs(r + zn) ? r : -r;
    const std::size_t terms = terms_for(m, 1e-3 * std::min(1.0, std::abs(zn)) / m);
    const Complex psi = series(r, terms);
    const double dp = std::abs(psi - zn), dm = std::abs(psi + zn);
    if (std::abs(dp - dm) < 1e-6 * std::abs(zn)) throw NumericError("cannot resolve the Boettcher branch near the Julia set");
    return dp <= dm ? r : -r;
  }

  Complex c_;
  double escape_radius_;
  mutable std::mutex mutex_;
  mutable std::vector<Complex> coeffs_;
};

inline double green_potential(Complex c, Complex z) { return Boettcher(c).green(z).value; }

inline Complex boettcher_inverse(Complex c, Complex z) { return Boettcher(c).inverse(z); }

inline Complex boettcher_forward(Complex c, Complex w, double margin = 1e-3) { return Boettcher(c).forward(w, margin); }

// The point z_b glued to z_w at level lambda: phi_w^{-1}(z_w) phi_b^{-1}(z_b) = lambda^2.
inline Complex glue_point(const Boettcher& white, const Boettcher& black, Complex lambda, Complex z_w) {
  const double t = std::log(std::abs(lambda));
  if (!(t > 0)) throw DomainError("gluing needs |lambda| > 1");
  const GreenValue g = white.green(z_w);
  if (!g.escaped || !(g.value > 0) || g.value > 2 * t * (1 + 1e-12) + 1e-14) {
    throw DomainError("z_w must satisfy 0 < G_w(z_w) <= 2 log|lambda|");
  }
  return black.forward(lambda * lambda / white.inverse(z_w));
}

inline Complex glue_point(Complex c_w, Complex c_b, Complex lambda, Complex z_w) {
  return glue_point(Boettcher(c_w), Boettcher(c_b), lambda, z_w);
}

}  // namespace mating
