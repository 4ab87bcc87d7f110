#pragma once

// Slow mating: the normalized quadratic rational maps R_lambda gluing the
// equipotential neighbourhoods of two PCF quadratics, followed as lambda
// decreases to 1.
//
// A frame at L = log(lambda) stores the positions of the marked critical-orbit
// points on the sphere, normalized so the white critical point is 0, the black
// critical point is infinity and R(1) = 1. R_lambda sends the frame at lambda to
// the frame at lambda^2, so its critical values are positions in the parent
// frame and R_lambda = map_from_critical_values(parent v_w, parent v_b). The
// remaining positions are pulled back through R_lambda.
//
// Frames are seeded at large lambda from the embedding z -> z / lambda on the
// white side and z -> lambda / z on the black side.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mating/errors.hpp"
#include "mating/sphere.hpp"

namespace mating {

enum class Side { White, Black };

// z^2 + c together with the marked critical orbit 0 = z_0 -> z_1 = c -> ...
struct PolySpec {
  Complex c{0.0};
  Side side = Side::White;
  std::vector<Complex> marked_orbit;
  std::vector<std::size_t> next;  // index of P(z_i)
  std::size_t preperiod = 0;
  std::size_t period = 1;

  std::size_t critical_value_index() const { return next.at(0); }

  // Lists the critical orbit of a post-critically finite parameter. A c whose
  // orbit only closes up to 1e-4 is first snapped to the nearby PCF parameter
  // by Newton's method, so rounded inputs such as -0.1226,0.7449 work.
  static PolySpec pcf(Complex c, Side side = Side::White, std::size_t max_points = 64) {
    auto orbit_type = [&](Complex cc, double tol) -> std::optional<std::pair<std::size_t, std::size_t>> {
      std::vector<Complex> pts{0.0};
      for (std::size_t i = 0; i < max_points; ++i) {
        const Complex z = pts.back() * pts.back() + cc;
        if (!(std::abs(z) < 1e3)) return std::nullopt;
        for (std::size_t j = 0; j < pts.size(); ++j) {
          if (std::abs(z - pts[j]) <= tol * std::max(1.0, std::abs(z))) return std::make_pair(j, pts.size() - j);
        }
        pts.push_back(z);
      }
      return std::nullopt;
    };
    // The first near-return fixes the orbit type; a superattracting orbit
    // would otherwise pass a tight test at a later return.
    const auto loose = orbit_type(c, 1e-4);
    if (!loose) {
      throw UnsupportedParameter("critical orbit of c = " + format_complex(c) + " is not finite within " +
                                 std::to_string(max_points) + " points");
    }
    // A near-return can hide a shorter exact one (z_3 = 1e-4 for a rounded
    // rabbit makes z_4 return to z_1), so try the shorter types first.
    std::optional<std::pair<std::size_t, std::size_t>> type;
    for (std::size_t total = 1; total <= loose->first + loose->second && !type; ++total) {
      for (std::size_t k = 0; k <= loose->first && k < total && !type; ++k) {
        const std::size_t p = total - k;
        if (loose->second % p != 0) continue;
        const Complex snapped = snap(c, k, p);
        const auto t = orbit_type(snapped, 1e-9);
        if (std::abs(snapped - c) <= 1e-3 && t && t->first == k && t->second == p) {
          c = snapped;
          type = t;
        }
      }
    }
    if (!type) {
      throw UnsupportedParameter("c = " + format_complex(c) + " is not close to a post-critically finite parameter");
    }
    PolySpec spec;
    spec.c = c;
    spec.side = side;
    spec.preperiod = type->first;
    spec.period = type->second;
    const std::size_t n = spec.preperiod + spec.period;
    Complex z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      spec.marked_orbit.push_back(z);
      spec.next.push_back(i + 1 < n ? i + 1 : spec.preperiod);
      z = z * z + c;
    }
    return spec;
  }

 private:
  // Newton on F(c) = P_c^{k+p}(0) - P_c^k(0).
  static Complex snap(Complex c, std::size_t k, std::size_t p) {
    for (int it = 0; it < 60; ++it) {
      Complex z = 0.0, dz = 0.0, zk = 0.0, dzk = 0.0;
      for (std::size_t n = 0; n < k + p; ++n) {
        if (n == k) {
          zk = z;
          dzk = dz;
        }
        dz = 2.0 * z * dz + 1.0;
        z = z * z + c;
      }
      if (k == k + p) {
        zk = z;
        dzk = dz;
      }
      const Complex f = z - zk, fd = dz - dzk;
      if (fd == Complex(0.0)) break;
      const Complex step = f / fd;
      c -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(c))) break;
    }
    return c;
  }
};

struct SlowMateConfig {
  double min_t0 = 2.0;               // smallest accepted starting level
  double contract_factor = 10.0;     // initial map within contract_factor e^{-t0} of z^2
  double collision_threshold = 1e-8; // chordal distance of the critical values
  double blowup_threshold = 1e10;    // |coefficients|^2 / |resultant|
  double trend_level = 1e-2;         // normalized resultant below this ...
  double trend_ratio = 0.75;         // ... shrinking at least this fast per halving of t ...
  std::size_t trend_window = 6;      // ... over this many consecutive frames
  double converge_tolerance = 1e-5;  // sup distance between the last two maps
  double branch_cos_min = 0.5;       // below this the square-root branch is ambiguous
  std::size_t max_refinements = 4;   // intermediate reference frames tried
  std::size_t substeps = 1;          // frames per halving of t
  std::size_t max_frames = 2000;
};

struct Frame {
  Complex log_lambda{0.0};
  std::size_t depth = 0;              // pullback steps from the asymptotic seed
  std::vector<SpherePoint> white;     // positions of the white marked orbit
  std::vector<SpherePoint> black;     // positions of the black marked orbit
  QuadraticMap map;                   // R_lambda: this frame -> parent frame
  SpherePoint v_w, v_b;               // critical values R(0), R(infinity)
  double semiconjugacy_residual = 0;  // max chordal |R(pos(p)) - parent pos(P(p))|
  double branch_margin = 1;           // smallest |cos| of an accepted branch choice
  std::size_t refinements = 0;        // intermediate reference frames used
  bool branch_failure = false;
  double collision_distance = 1;      // chordal(v_w, v_b)
  double normalized_resultant = 1;

  Complex lambda() const { return std::exp(log_lambda); }
  double t() const { return log_lambda.real(); }
};

namespace detail {

inline void finish_diagnostics(Frame& f) {
  f.v_w = f.map.critical_value_white();
  f.v_b = f.map.critical_value_black();
  f.collision_distance = chordal(f.v_w, f.v_b);
  f.normalized_resultant = f.map.normalized_resultant();
}

// Cosine of the angle between the affine values of u and ref, computed in
// homogeneous coordinates. Returns nullopt when undefined.
inline std::optional<double> branch_cosine(const SpherePoint& u, const SpherePoint& ref) {
  const Complex s = u.z() * std::conj(u.w()) * std::conj(ref.z()) * ref.w();
  if (s == Complex(0.0)) return std::nullopt;
  return s.real() / std::abs(s);
}

inline bool on_axis(const SpherePoint& u) { return u.z() == Complex(0.0) || u.w() == Complex(0.0); }

inline SpherePoint negate(const SpherePoint& u) { return SpherePoint(-u.z(), u.w()); }

}  // namespace detail

class FrameEngine {
 public:
  FrameEngine(PolySpec white, PolySpec black, SlowMateConfig cfg = {})
      : white_(std::move(white)), black_(std::move(black)), cfg_(cfg) {}

  const PolySpec& white() const { return white_; }
  const PolySpec& black() const { return black_; }
  const SlowMateConfig& config() const { return cfg_; }

  Frame asymptotic(Complex L) const {
    Frame f;
    f.log_lambda = L;
    const Complex inv = std::exp(-L);
    const Complex inv2 = inv * inv;
    for (const auto& z : white_.marked_orbit) f.white.emplace_back(z * inv, 1.0);
    for (const auto& z : black_.marked_orbit) f.black.emplace_back(1.0, z * inv);
    const SpherePoint vw(white_.marked_orbit[white_.critical_value_index()] * inv2, 1.0);
    const SpherePoint vb(1.0, black_.marked_orbit[black_.critical_value_index()] * inv2);
    f.map = map_from_critical_values(vw, vb);
    double res = 0;
    for (std::size_t i = 0; i < f.white.size(); ++i) {
      const SpherePoint target(white_.marked_orbit[white_.next[i]] * inv2, 1.0);
      res = std::max(res, chordal(f.map(f.white[i]), target));
    }
    for (std::size_t i = 0; i < f.black.size(); ++i) {
      const SpherePoint target(1.0, black_.marked_orbit[black_.next[i]] * inv2);
      res = std::max(res, chordal(f.map(f.black[i]), target));
    }
    f.semiconjugacy_residual = res;
    detail::finish_diagnostics(f);
    return f;
  }

  // The frame at L reached by `depth` pullbacks from the seed at 2^depth L.
  // Fixed depth keeps positions holomorphic in L.
  const Frame& frame(Complex L, std::size_t depth) { return frame_impl(L, depth, true); }

  // One pullback of `parent` to L = parent L / 2, using only the parent as
  // branch reference.
  Frame step(const Frame& parent) const {
    return pull_back(parent, parent.log_lambda / 2.0, parent.depth + 1, nullptr);
  }

 private:
  using Key = std::tuple<double, double, std::size_t, bool>;

  const Frame& frame_impl(Complex L, std::size_t depth, bool refine) {
    const Key key{L.real(), L.imag(), depth, refine};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Frame f;
    if (depth == 0) {
      f = asymptotic(L);
    } else {
      const Frame& parent = frame_impl(2.0 * L, depth - 1, refine);
      f = pull_back(parent, L, depth, refine ? this : nullptr);
    }
    return memo_.emplace(key, std::move(f)).first->second;
  }

  // Reference positions for the r-th refinement: the frame at L (1 + 2^-r).
  const Frame& reference(Complex L, std::size_t depth, std::size_t r) {
    return frame_impl(L * (1.0 + std::ldexp(1.0, -static_cast<int>(r))), depth, false);
  }

  Frame pull_back(const Frame& parent, Complex L, std::size_t depth, FrameEngine* refiner) const {
    Frame f;
    f.log_lambda = L;
    f.depth = depth;
    f.map = map_from_critical_values(parent.white[white_.critical_value_index()],
                                     parent.black[black_.critical_value_index()]);
    auto pull_side = [&](const PolySpec& spec, const std::vector<SpherePoint>& parent_pos,
                         std::vector<SpherePoint>& out, bool white_side) {
      out.resize(spec.marked_orbit.size());
      out[0] = white_side ? SpherePoint::finite(0.0) : SpherePoint::infinity();
      for (std::size_t i = 1; i < out.size(); ++i) {
        SpherePoint u = f.map.preimage(parent_pos[spec.next[i]]);
        if (detail::on_axis(u)) {
          out[i] = u;
          continue;
        }
        auto decide = [&](const SpherePoint& ref) -> std::optional<double> {
          return detail::branch_cosine(u, ref);
        };
        std::optional<double> cos = decide(parent_pos[i]);
        std::size_t r = 0;
        while ((!cos || std::abs(*cos) < cfg_.branch_cos_min) && refiner && r < cfg_.max_refinements) {
          ++r;
          const Frame& ref = refiner->reference(L, depth, r);
          cos = decide(white_side ? ref.white[i] : ref.black[i]);
        }
        f.refinements = std::max(f.refinements, r);
        if (!cos || std::abs(*cos) < cfg_.branch_cos_min) f.branch_failure = true;
        const double c = cos.value_or(1.0);
        f.branch_margin = std::min(f.branch_margin, std::abs(c));
        out[i] = c < 0 ? detail::negate(u) : u;
      }
    };
    pull_side(white_, parent.white, f.white, true);
    pull_side(black_, parent.black, f.black, false);
    double res = 0;
    for (std::size_t i = 0; i < f.white.size(); ++i) {
      res = std::max(res, chordal(f.map(f.white[i]), parent.white[white_.next[i]]));
    }
    for (std::size_t i = 0; i < f.black.size(); ++i) {
      res = std::max(res, chordal(f.map(f.black[i]), parent.black[black_.next[i]]));
    }
    f.semiconjugacy_residual = res;
    detail::finish_diagnostics(f);
    return f;
  }

  PolySpec white_, black_;
  SlowMateConfig cfg_;
  std::map<Key, Frame> memo_;
};

inline double distance_to_square(const QuadraticMap& map) { return sup_distance(map, QuadraticMap::square()); }

// The asymptotic frame at t0, with the runtime check that its map is within
// contract_factor e^{-t0} of z^2 on a 64 x 64 sphere grid.
inline Frame initial_frame(const PolySpec& white, const PolySpec& black, double t0, const SlowMateConfig& cfg = {}) {
  if (!(t0 >= cfg.min_t0)) {
    throw InvalidArgument("t0 must be at least " + std::to_string(cfg.min_t0));
  }
  FrameEngine engine(white, black, cfg);
  Frame f = engine.asymptotic(t0);
  const double eps = cfg.contract_factor * std::exp(-t0);
  const double d = distance_to_square(f.map);
  if (!(d < eps)) {
    throw NumericError("initial map is " + std::to_string(d) + " from z^2, above " + std::to_string(eps) +
                       "; use a larger t0");
  }
  return f;
}

inline Frame initial_frame(Complex c_w, Complex c_b, double t0, const SlowMateConfig& cfg = {}) {
  return initial_frame(PolySpec::pcf(c_w, Side::White), PolySpec::pcf(c_b, Side::Black), t0, cfg);
}

// Frame at sqrt(lambda) from the frame at lambda.
inline Frame step_frame(const Frame& prev, const PolySpec& white, const PolySpec& black,
                        const SlowMateConfig& cfg = {}) {
  if (prev.normalized_resultant == 0) throw DegenerateMap("previous frame is degenerate");
  FrameEngine engine(white, black, cfg);
  Frame f = engine.step(prev);
  if (f.branch_failure) throw NumericError("ambiguous square-root branch; refine the schedule");
  return f;
}

struct MovieVerdict {
  enum class Kind { Converged, Degenerated, BudgetExhausted };
  enum class Reason { None, CriticalValueCollision, CoefficientBlowUp, BranchFailure };
  Kind kind = Kind::BudgetExhausted;
  Reason reason = Reason::None;
  std::size_t frame_index = 0;
  std::string detail;
  std::optional<QuadraticMap> limit;
  double last_step_distance = 0;  // sup distance between the last two maps
};

inline std::string to_string(MovieVerdict::Kind k) {
  switch (k) {
    case MovieVerdict::Kind::Converged: return "Converged";
    case MovieVerdict::Kind::Degenerated: return "Degenerated";
    case MovieVerdict::Kind::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

inline std::string to_string(MovieVerdict::Reason r) {
  switch (r) {
    case MovieVerdict::Reason::None: return "none";
    case MovieVerdict::Reason::CriticalValueCollision: return "critical-value-collision";
    case MovieVerdict::Reason::CoefficientBlowUp: return "coefficient-blow-up";
    case MovieVerdict::Reason::BranchFailure: return "branch-failure";
  }
  return "?";
}

struct Movie {
  PolySpec white, black;
  double t0 = 0, t_min = 0;
  std::vector<Frame> frames;
  MovieVerdict verdict;
};

// Frames at t_n = t0 2^{-n / substeps} until t <= t_min. Frame n is reached by
// ceil(n / substeps) pullbacks from a seed at level between t0 and 2 t0.
inline Movie run_movie(const PolySpec& white, const PolySpec& black, double t0, double t_min,
                       const SlowMateConfig& cfg = {}) {
  if (!(t_min > 0) || !(t0 > t_min)) throw InvalidArgument("need t0 > t_min > 0");
  if (!(t0 >= cfg.min_t0)) throw InvalidArgument("t0 must be at least " + std::to_string(cfg.min_t0));
  if (cfg.substeps < 1) throw InvalidArgument("substeps must be at least 1");
  Movie movie{white, black, t0, t_min, {}, {}};
  initial_frame(white, black, t0, cfg);  // contract check
  FrameEngine engine(white, black, cfg);
  const std::size_t m = cfg.substeps;
  const double window_ratio = std::pow(cfg.trend_ratio, 1.0 / static_cast<double>(m));
  auto degenerate = [&](MovieVerdict::Reason reason, std::string detail) {
    movie.verdict.kind = MovieVerdict::Kind::Degenerated;
    movie.verdict.reason = reason;
    movie.verdict.frame_index = movie.frames.empty() ? 0 : movie.frames.size() - 1;
    movie.verdict.detail = std::move(detail);
    return movie;
  };
  for (std::size_t n = 0;; ++n) {
    if (n >= cfg.max_frames) {
      movie.verdict.kind = MovieVerdict::Kind::BudgetExhausted;
      movie.verdict.detail = "frame budget reached before t_min";
      return movie;
    }
    const double t = t0 * std::exp2(-static_cast<double>(n) / static_cast<double>(m));
    const std::size_t depth = (n + m - 1) / m;
    try {
      movie.frames.push_back(engine.frame(Complex(t, 0.0), depth));
    } catch (const DegenerateMap& e) {
      return degenerate(MovieVerdict::Reason::CriticalValueCollision, e.what());
    }
    const Frame& f = movie.frames.back();
    if (f.collision_distance < cfg.collision_threshold) {
      return degenerate(MovieVerdict::Reason::CriticalValueCollision,
                        "critical values within " + std::to_string(f.collision_distance));
    }
    if (1.0 / f.normalized_resultant > cfg.blowup_threshold) {
      return degenerate(MovieVerdict::Reason::CoefficientBlowUp,
                        "coefficient ratio " + std::to_string(1.0 / f.normalized_resultant));
    }
    if (f.branch_failure && movie.frames.size() >= 2 && movie.frames[movie.frames.size() - 2].branch_failure) {
      return degenerate(MovieVerdict::Reason::BranchFailure, "square-root branch ambiguous after refinement");
    }
    // Geometric collapse of the resultant: the coefficient ratio is on its way
    // to infinity long before it crosses the absolute threshold.
    const std::size_t k = cfg.trend_window;
    if (k >= 1 && movie.frames.size() > k) {
      bool collapsing = true;
      for (std::size_t j = movie.frames.size() - k; j < movie.frames.size() && collapsing; ++j) {
        const double cur = movie.frames[j].normalized_resultant;
        const double prev = movie.frames[j - 1].normalized_resultant;
        collapsing = cur < cfg.trend_level && cur <= window_ratio * prev;
      }
      if (collapsing) {
        return degenerate(MovieVerdict::Reason::CoefficientBlowUp,
                          "normalized resultant " + std::to_string(f.normalized_resultant) + " shrinking by at least " +
                              std::to_string(cfg.trend_ratio) + " per halving over " + std::to_string(k) + " frames");
      }
    }
    if (t <= t_min) break;
  }
  const auto& frames = movie.frames;
  if (frames.size() >= 2) {
    const double d = sup_distance(frames.back().map, frames[frames.size() - 2].map);
    movie.verdict.last_step_distance = d;
    movie.verdict.frame_index = frames.size() - 1;
    if (d < cfg.converge_tolerance) {
      movie.verdict.kind = MovieVerdict::Kind::Converged;
      movie.verdict.limit = frames.back().map;
      return movie;
    }
  }
  movie.verdict.kind = MovieVerdict::Kind::BudgetExhausted;
  movie.verdict.detail = "maps still moving at t_min";
  return movie;
}

inline Movie run_movie(Complex c_w, Complex c_b, double t0, double t_min, const SlowMateConfig& cfg = {}) {
  return run_movie(PolySpec::pcf(c_w, Side::White), PolySpec::pcf(c_b, Side::Black), t0, t_min, cfg);
}

// --- stretching ---------------------------------------------------------------

// zeta_Lambda(z) = z |z|^(Lambda - 1), with 0 -> 0.
inline Complex zeta_map(Complex Lambda, Complex z) {
  if (z == Complex(0.0)) return 0.0;
  return z * std::exp((Lambda - 1.0) * std::log(std::abs(z)));
}

// Beltrami coefficient of zeta_Lambda: (Lambda - 1) / (Lambda + 1) * z / conj(z).
inline Complex beltrami_mu(Complex Lambda, Complex z) {
  if (z == Complex(0.0)) throw DomainError("Beltrami coefficient is undefined at 0");
  return (Lambda - 1.0) / (Lambda + 1.0) * (z / std::conj(z));
}

}  // namespace mating
