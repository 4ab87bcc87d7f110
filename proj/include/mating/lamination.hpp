#pragma once

// Co-landing classes of rational external angles for post-critically finite
// quadratic polynomials z^2 + c, where c is named by an external angle theta.
//
// Two rational angles co-land iff they have the same orbit type under
// doubling and the same itinerary with respect to a finite partition of the
// circle that depends only on theta. The partition is:
//
//   theta = 0          all classes are singletons (c = 0);
//   theta periodic     the two major leaves {a/2, b/2 + 1/2}, {a/2 + 1/2, b/2}
//                      of the characteristic leaf {a, b} = {theta, theta'},
//                      where theta' is the companion angle landing with theta
//                      at the root of the hyperbolic component;
//   theta preperiodic  the critical class: all preimages of the parameter
//                      angles that land together with theta at c.
//
// Itineraries are compared over preperiod + period + 1 steps, which is exact
// because both angles are eventually periodic with the same orbit type.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mating/angle.hpp"
#include "mating/eqrel.hpp"
#include "mating/errors.hpp"
#include "mating/parallel.hpp"

namespace mating {

inline constexpr std::size_t kDefaultEnumerationBudget = std::size_t{1} << 22;

struct CoLandClass {
  std::vector<Angle> angles;  // sorted, nonempty

  std::size_t size() const { return angles.size(); }
  bool contains(const Angle& x) const { return std::binary_search(angles.begin(), angles.end(), x); }
  const Angle& front() const { return angles.front(); }

  friend bool operator==(const CoLandClass&, const CoLandClass&) = default;
};

inline CoLandClass conjugate(const CoLandClass& cls) {
  CoLandClass out;
  out.angles.reserve(cls.size());
  for (const auto& a : cls.angles) out.angles.push_back(conjugate(a));
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

inline std::string to_string(const CoLandClass& cls) {
  std::string s = "{";
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (i) s += ", ";
    s += cls.angles[i].str();
  }
  return s + "}";
}

inline BigInt pow2(std::size_t k) { return BigInt(1) << k; }

// 2^p - 1, refusing sizes above `budget`.
inline BigInt periodic_denominator(std::size_t p, std::size_t budget) {
  if (p >= 63 || (std::size_t{1} << p) - 1 > budget) {
    throw BudgetExceeded("enumerating angles of period " + std::to_string(p) + " exceeds the budget");
  }
  return pow2(p) - 1;
}

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

// Closed arc from `start` counterclockwise, 0 <= start < 1, 0 <= length <= 1.
struct Arc {
  Rational start;
  Rational length;
};

inline Rational frac(const Rational& r) {
  Rational f = r - Rational(numerator(r) / denominator(r));
  if (f < 0) f += 1;
  return f;
}

inline Rational to_rational(const Angle& a) { return Rational(a.numerator()) / Rational(a.denominator()); }

// Appends the part of piece mapping into target under doubling. The piece
// must have length at most 1/2 so doubling is injective on its interior.
inline void pull_into(const Arc& piece, const Arc& target, std::vector<Arc>& out) {
  const Rational image_len = 2 * piece.length;
  const Rational s = frac(target.start - 2 * piece.start);
  auto emit = [&](const Rational& a, const Rational& b) {
    const Rational lo = std::max(a, Rational(0)), hi = std::min(b, image_len);
    if (lo <= hi) out.push_back({frac(piece.start + lo / 2), (hi - lo) / 2});
  };
  // The image arc has length at most 1, so the target can meet it at offsets
  // shifted by -1, 0 or +1 (the shifted copies catch wrap-around endpoints).
  for (int k = -1; k <= 1; ++k) emit(s + k, s + k + target.length);
}

// Sorted, with overlapping arcs that do not wrap past 0 merged.
inline std::vector<Arc> merge_arcs(std::vector<Arc> arcs) {
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.start < b.start || (a.start == b.start && a.length > b.length);
  });
  std::vector<Arc> out;
  for (auto& a : arcs) {
    if (!out.empty() && out.back().start + out.back().length <= 1 && a.start <= out.back().start + out.back().length) {
      Arc& b = out.back();
      b.length = std::max(b.start + b.length, a.start + a.length) - b.start;
      continue;
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace detail

// The circle cut at finitely many angles. Each cut point and each open arc
// between consecutive cut points carries a symbol.
class CircleCoding {
 public:
  CircleCoding() = default;

  CircleCoding(std::vector<Angle> cuts, std::vector<char> cut_symbols, std::vector<char> arc_symbols)
      : cuts_(std::move(cuts)), cut_symbols_(std::move(cut_symbols)), arc_symbols_(std::move(arc_symbols)) {
    if (cuts_.empty() || cut_symbols_.size() != cuts_.size() || arc_symbols_.size() != cuts_.size()) {
      throw InvalidArgument("circle coding needs one symbol per cut point and per arc");
    }
    for (std::size_t i = 1; i < cuts_.size(); ++i) {
      if (!(cuts_[i - 1] < cuts_[i])) throw InvalidArgument("cut points must be strictly increasing");
    }
  }

  // Symbol of the angle m/den (not necessarily reduced, 0 <= m < den).
  char symbol(const BigInt& m, const BigInt& den) const {
    // First cut strictly greater than m/den.
    std::size_t lo = 0, hi = cuts_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      const Angle& c = cuts_[mid];
      if (c.numerator() * den > m * c.denominator()) hi = mid;
      else lo = mid + 1;
    }
    if (lo > 0) {
      const Angle& c = cuts_[lo - 1];
      if (c.numerator() * den == m * c.denominator()) return cut_symbols_[lo - 1];
      return arc_symbols_[lo - 1];
    }
    return arc_symbols_.back();
  }

  char symbol(const Angle& x) const { return symbol(x.numerator(), x.denominator()); }

  std::string itinerary(const Angle& x, std::size_t steps) const {
    std::string out;
    out.reserve(steps);
    BigInt m = x.numerator();
    const BigInt& den = x.denominator();
    for (std::size_t i = 0; i < steps; ++i) {
      out.push_back(symbol(m, den));
      m <<= 1;
      if (m >= den) m -= den;
    }
    return out;
  }

  const std::vector<Angle>& cuts() const { return cuts_; }

  // Closed arcs of length at most 1/2 covering every angle with symbol s.
  std::vector<detail::Arc> pieces(char s) const {
    std::vector<detail::Arc> out;
    const Rational half(1, 2);
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
      const Rational a = detail::to_rational(cuts_[i]);
      if (cut_symbols_[i] == s) out.push_back({a, Rational(0)});
      if (arc_symbols_[i] != s) continue;
      const Rational b = i + 1 < cuts_.size() ? detail::to_rational(cuts_[i + 1]) : detail::to_rational(cuts_[0]) + 1;
      Rational len = b - a;
      Rational start = a;
      while (len > half) {
        out.push_back({detail::frac(start), half});
        start += half;
        len -= half;
      }
      out.push_back({detail::frac(start), len});
    }
    return out;
  }

 private:
  std::vector<Angle> cuts_;
  std::vector<char> cut_symbols_;
  std::vector<char> arc_symbols_;
};

namespace detail {

inline bool leaves_cross(const std::pair<Angle, Angle>& u, const std::pair<Angle, Angle>& v) {
  return chords_cross(u.first, u.second, v.first, v.second);
}

// Whether {theta, x} is an admissible characteristic leaf of period p: its
// forward images and the two major leaves are pairwise unlinked, no image is
// shorter than the leaf itself, and no image has an endpoint under it.
inline bool admissible_minor(const Angle& theta, const Angle& x, std::size_t p) {
  const Angle len = chord_length(theta, x);
  std::vector<std::pair<Angle, Angle>> leaves;
  leaves.reserve(p + 2);
  Angle s = theta, t = x;
  for (std::size_t j = 0; j < p; ++j) {
    leaves.emplace_back(s, t);
    s = times_d(s, 2);
    t = times_d(t, 2);
  }
  const Angle half(1, 2);
  const Angle& a = std::min(theta, x);
  const Angle& b = std::max(theta, x);
  const Angle a2(a.numerator(), a.denominator() * 2);
  const Angle b2(b.numerator(), b.denominator() * 2);
  leaves.emplace_back(a2, b2 + half);
  leaves.emplace_back(a2 + half, b2);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      if (leaves_cross(leaves[i], leaves[j])) return false;
    }
  }
  for (std::size_t j = 1; j < p; ++j) {
    if (chord_length(leaves[j].first, leaves[j].second) < len) return false;
  }
  const bool short_ab = arc_length(a, b) <= half;
  const Angle& lo = short_ab ? a : b;
  const Angle& hi = short_ab ? b : a;
  for (std::size_t j = 1; j < p; ++j) {
    if (in_open_arc(leaves[j].first, lo, hi) || in_open_arc(leaves[j].second, lo, hi)) return false;
  }
  return true;
}

// Angles of exact orbit type t, in increasing order.
inline std::vector<Angle> angles_of_type(const OrbitType& t, std::size_t budget) {
  BigInt den = pow2(t.preperiod) * periodic_denominator(t.period, budget);
  if (den > budget) throw BudgetExceeded("angle enumeration exceeds the budget");
  std::vector<Angle> out;
  const auto n = den.convert_to<std::size_t>();
  for (std::size_t m = 0; m < n; ++m) {
    Angle x(BigInt(m), den);
    if (orbit_type(x) == t) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace detail

// The angle theta' with {theta, theta'} the characteristic leaf of the
// hyperbolic component of period p = period(theta): the shortest admissible
// leaf joining theta to another angle of period p.
inline Angle companion_angle(const Angle& theta, std::size_t budget = kDefaultEnumerationBudget) {
  const OrbitType t = orbit_type(theta);
  if (t.preperiod != 0) throw UnsupportedParameter("companion angles exist only for periodic angles");
  if (theta.is_zero()) return theta;
  std::vector<std::pair<Angle, Angle>> candidates;
  for (auto& x : detail::angles_of_type(OrbitType{0, t.period}, budget)) {
    if (x == theta) continue;
    Angle len = chord_length(theta, x);
    candidates.emplace_back(std::move(len), std::move(x));
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& [len, x] : candidates) {
    if (detail::admissible_minor(theta, x, t.period)) return x;
  }
  throw Error("no admissible characteristic leaf found for " + theta.str());
}

class LandingModel {
 public:
  enum class Kind { Trivial, Periodic, Misiurewicz };

  explicit LandingModel(const Angle& theta, std::size_t budget = kDefaultEnumerationBudget)
      : theta_(theta), type_(orbit_type(theta)), budget_(budget) {
    if (theta.is_zero()) {
      kind_ = Kind::Trivial;
    } else if (type_.preperiod == 0) {
      kind_ = Kind::Periodic;
      init_periodic();
    } else {
      kind_ = Kind::Misiurewicz;
      init_misiurewicz();
    }
  }

  const Angle& parameter() const { return theta_; }
  Kind kind() const { return kind_; }
  const std::optional<Angle>& companion() const { return companion_; }
  // Cut points of the partition used for itineraries (empty when trivial).
  const std::vector<Angle>& cuts() const { return coding_.cuts(); }

  std::string itinerary(const Angle& x) const {
    if (kind_ == Kind::Trivial) return x.str();
    OrbitType t = orbit_type(x);
    return coding_.itinerary(x, t.preperiod + t.period + 1);
  }

  bool colands(const Angle& a, const Angle& b) const {
    if (a == b) return true;
    if (kind_ == Kind::Trivial) return false;
    OrbitType ta = orbit_type(a);
    if (ta != orbit_type(b)) return false;
    std::size_t steps = ta.preperiod + ta.period + 1;
    return coding_.itinerary(a, steps) == coding_.itinerary(b, steps);
  }

  // All rational angles landing together with x. Results are cached, and the
  // object may be shared between threads.
  CoLandClass class_of(const Angle& x) const {
    if (kind_ == Kind::Trivial) return CoLandClass{{x}};
    const OrbitType t = orbit_type(x);
    const std::size_t steps = t.preperiod + t.period + 1;
    Key key{t.preperiod, t.period, coding_.itinerary(x, steps)};
    if (auto hit = lookup(key)) return *hit;
    CoLandClass cls = search(x, t, std::get<2>(key));
    store(key, cls);
    return cls;
  }

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::string>;

  void init_periodic() {
    companion_ = companion_angle(theta_, budget_);
    const Angle& a = std::min(theta_, *companion_);
    const Angle& b = std::max(theta_, *companion_);
    const Angle half(1, 2);
    const Angle a2(a.numerator(), a.denominator() * 2);
    const Angle b2(b.numerator(), b.denominator() * 2);
    // Sorted cuts a/2 < b/2 < a/2 + 1/2 < b/2 + 1/2. Symbol 0 is the closed arc
    // [b/2, a/2 + 1/2], 1 the closed arc [b/2 + 1/2, a/2], and 2, 3 the two
    // open arcs under the majors.
    coding_ = CircleCoding({a2, b2, a2 + half, b2 + half}, {'1', '0', '0', '1'}, {'2', '0', '3', '1'});
  }

  void init_misiurewicz() {
    // Parameter angles of c: the angles of theta's orbit type that share its
    // itinerary relative to the diameter {theta/2, theta/2 + 1/2}.
    const Angle half(1, 2);
    const Angle d0(theta_.numerator(), theta_.denominator() * 2);
    const Angle d1 = d0 + half;
    const CircleCoding diameter({d0, d1}, {'*', '*'}, {'A', 'B'});
    const std::size_t steps = type_.preperiod + type_.period + 1;
    const std::string ref = diameter.itinerary(theta_, steps);
    std::vector<Angle> critical;
    for (const auto& v : detail::angles_of_type(type_, budget_)) {
      if (diameter.itinerary(v, steps) != ref) continue;
      for (auto& z : preimages(v, 2)) critical.push_back(std::move(z));
    }
    std::sort(critical.begin(), critical.end());
    if (critical.size() > 200) throw UnsupportedParameter("critical class of " + theta_.str() + " is too large");
    // Arcs are labelled by small integers; '*' marks the cut points.
    std::vector<char> arcs(critical.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) arcs[i] = static_cast<char>(i + 1);
    std::vector<char> points(critical.size(), '*');
    coding_ = CircleCoding(std::move(critical), std::move(points), std::move(arcs));
  }

  std::shared_ptr<const CoLandClass> lookup(const Key& key) const {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    return it == cache_.end() ? nullptr : it->second;
  }

  void store(const Key& key, CoLandClass cls) const {
    std::lock_guard lock(mutex_);
    cache_.emplace(key, std::make_shared<const CoLandClass>(std::move(cls)));
  }

  // Angles of type t with the given itinerary: pull arcs back along the
  // itinerary, from the last symbol to the first. Each step halves the arc
  // lengths, so every final arc holds at most one angle of the right
  // denominator, which is then checked exactly.
  CoLandClass search(const Angle& x, const OrbitType& t, const std::string& itin) const {
    std::vector<detail::Arc> arcs = coding_.pieces(itin.back());
    for (std::size_t j = itin.size() - 1; j-- > 0;) {
      std::vector<detail::Arc> next;
      for (const auto& piece : coding_.pieces(itin[j])) {
        for (const auto& target : arcs) detail::pull_into(piece, target, next);
      }
      arcs = detail::merge_arcs(std::move(next));
      if (arcs.size() > kMaxArcs) throw BudgetExceeded("co-landing search for " + x.str() + " branches too much");
    }
    const BigInt den = pow2(t.preperiod) * (pow2(t.period) - 1);
    const Rational rden(den);
    CoLandClass cls;
    for (const auto& arc : arcs) {
      const Rational lo = arc.start * rden, hi = (arc.start + arc.length) * rden;
      BigInt m = numerator(lo) / denominator(lo);
      if (m * denominator(lo) < numerator(lo)) ++m;
      const BigInt last = numerator(hi) / denominator(hi);
      if (last - m > BigInt(kMaxArcs)) throw BudgetExceeded("co-landing search for " + x.str() + " is too coarse");
      for (; m <= last; ++m) {
        Angle y(m % den, den);
        if (orbit_type(y) == t && colands(x, y)) cls.angles.push_back(std::move(y));
      }
    }
    std::sort(cls.angles.begin(), cls.angles.end());
    cls.angles.erase(std::unique(cls.angles.begin(), cls.angles.end()), cls.angles.end());
    if (!cls.contains(x)) throw Error("co-landing search lost " + x.str());
    return cls;
  }

  static constexpr std::size_t kMaxArcs = 4096;

  Angle theta_;
  OrbitType type_;
  std::size_t budget_;
  Kind kind_ = Kind::Trivial;
  std::optional<Angle> companion_;
  CircleCoding coding_;
  mutable std::mutex mutex_;
  mutable std::map<Key, std::shared_ptr<const CoLandClass>> cache_;
};

inline CoLandClass colanding_class(const Angle& query, const Angle& theta) {
  return LandingModel(theta).class_of(query);
}

// A depth-truncated lamination: the co-landing classes of every angle m/D,
// D = 2^depth (2^p - 1) with p the period of the parameter angle.
struct QuadraticLamination {
  Angle char_angle;
  std::size_t depth = 0;
  BigInt denominator;
  std::vector<CoLandClass> classes;  // ordered by least element
  eqrel::Partition partition;        // on universe indices m

  std::size_t universe_size() const { return partition.size(); }
  Angle universe_angle(std::size_t m) const { return Angle(BigInt(m), denominator); }
};

inline QuadraticLamination lamination_to_depth(const Angle& theta, std::size_t depth,
                                               std::size_t budget = std::size_t{1} << 20) {
  const OrbitType t = orbit_type(theta);
  if (depth >= 62 || t.period >= 62) throw BudgetExceeded("lamination universe exceeds the budget");
  BigInt den = pow2(depth) * (pow2(t.period) - 1);
  if (den > budget) {
    throw BudgetExceeded("lamination universe of size " + den.str() + " exceeds the budget of " +
                         std::to_string(budget));
  }
  LandingModel model(theta);
  const auto n = den.convert_to<std::size_t>();
  std::vector<std::string> keys(n);
  parallel_for(n, [&](std::size_t m) {
    Angle x(BigInt(m), den);
    OrbitType tx = orbit_type(x);
    keys[m] = std::to_string(tx.preperiod) + ":" + std::to_string(tx.period) + ":" + model.itinerary(x);
  });
  std::map<std::string, std::size_t> first;
  std::vector<eqrel::Pair> pairs;
  for (std::size_t m = 0; m < n; ++m) {
    auto [it, fresh] = first.emplace(keys[m], m);
    if (!fresh) {
      pairs.emplace_back(it->second, m);
      it->second = m;
    }
  }
  QuadraticLamination lam;
  lam.char_angle = theta;
  lam.depth = depth;
  lam.denominator = den;
  lam.partition = eqrel::generate(n, pairs);
  for (const auto& cls : lam.partition.classes()) {
    auto& out = lam.classes.emplace_back();
    for (std::size_t m : cls) out.angles.push_back(lam.universe_angle(m));
  }
  return lam;
}

struct Crossing {
  std::size_t class_a = 0, class_b = 0;  // indices into the input
  Angle a0, a1;                          // chord of class_a
  Angle b0, b1;                          // chord of class_b crossing it
};

struct LinkReport {
  bool unlinked = true;
  std::optional<Crossing> witness;
};

// Non-crossing test in one sweep around the circle: a class that reappears
// must be the most recently opened class still waiting for points.
inline LinkReport is_unlinked(const std::vector<CoLandClass>& classes) {
  struct Point {
    const Angle* angle;
    std::size_t cls;
  };
  std::vector<Point> points;
  std::vector<std::vector<Angle>> sorted(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    sorted[c] = classes[c].angles;
    std::sort(sorted[c].begin(), sorted[c].end());
    if (sorted[c].size() < 2) continue;
    for (const auto& a : sorted[c]) points.push_back({&a, c});
  }
  std::sort(points.begin(), points.end(), [](const Point& x, const Point& y) { return *x.angle < *y.angle; });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (*points[i].angle == *points[i - 1].angle) {
      throw ValidationError("classes are not disjoint: " + points[i].angle->str() + " repeats");
    }
  }
  std::vector<std::size_t> seen(classes.size(), 0);
  std::vector<std::size_t> stack;
  for (const auto& pt : points) {
    const std::size_t c = pt.cls;
    if (seen[c] == 0) {
      stack.push_back(c);
      seen[c] = 1;
      continue;
    }
    if (stack.back() != c) {
      const std::size_t top = stack.back();
      Crossing w;
      w.class_a = c;
      w.class_b = top;
      w.a0 = sorted[c][seen[c] - 1];
      w.a1 = *pt.angle;
      w.b0 = sorted[top][seen[top] - 1];
      w.b1 = sorted[top][seen[top]];
      return LinkReport{false, std::move(w)};
    }
    if (++seen[c] == sorted[c].size()) stack.pop_back();
  }
  return {};
}

struct InvarianceReport {
  bool invariant = true;
  std::optional<CoLandClass> violating;
};

inline InvarianceReport check_invariance(const QuadraticLamination& lam) {
  const std::size_t n = lam.universe_size();
  std::vector<std::size_t> f(n);
  for (std::size_t m = 0; m < n; ++m) f[m] = (2 * m) % n;
  auto w = eqrel::invariance_witness(lam.partition, f);
  if (!w) return {};
  return InvarianceReport{false, lam.classes[lam.partition.label(w->first)]};
}

// Same check for hand-built classes. The union of the classes must be closed
// under doubling.
inline InvarianceReport check_invariance(const std::vector<CoLandClass>& classes) {
  std::vector<Angle> universe;
  for (const auto& c : classes) universe.insert(universe.end(), c.angles.begin(), c.angles.end());
  std::sort(universe.begin(), universe.end());
  if (std::adjacent_find(universe.begin(), universe.end()) != universe.end()) {
    throw ValidationError("classes are not disjoint");
  }
  auto index = [&](const Angle& a) {
    auto it = std::lower_bound(universe.begin(), universe.end(), a);
    if (it == universe.end() || *it != a) throw ValidationError("doubling leaves the angle universe at " + a.str());
    return static_cast<std::size_t>(it - universe.begin());
  };
  std::vector<eqrel::Pair> pairs;
  for (const auto& c : classes) {
    for (std::size_t i = 1; i < c.size(); ++i) pairs.emplace_back(index(c.angles[0]), index(c.angles[i]));
  }
  auto p = eqrel::generate(universe.size(), pairs);
  std::vector<std::size_t> f(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) f[i] = index(times_d(universe[i], 2));
  auto w = eqrel::invariance_witness(p, f);
  if (!w) return {};
  for (const auto& c : classes) {
    if (c.contains(universe[w->first])) return InvarianceReport{false, c};
  }
  return InvarianceReport{false, CoLandClass{{universe[w->first]}}};
}

}  // namespace mating
