#pragma once

// Ray-equivalence classes of the formal mating of two PCF quadratics.
//
// Every rational angle z is an edge joining the white landing class of z to
// the black landing class of conj(z). A ray class is the connected graph
// obtained by closing under both relations; it is a tree or contains a cycle.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mating/angle.hpp"
#include "mating/errors.hpp"
#include "mating/lamination.hpp"

namespace mating {

// Both landing models of a mating, shared by every class exploration so the
// per-parameter caches are reused.
struct MatingModel {
  LandingModel white;
  LandingModel black;

  MatingModel(const Angle& theta_w, const Angle& theta_b) : white(theta_w), black(theta_b) {}
};

struct RayClassGraph {
  std::vector<Angle> edges;                                 // sorted
  std::vector<CoLandClass> white;                           // classes of the white relation
  std::vector<CoLandClass> black;                           // black classes, in black angles
  std::vector<std::pair<std::size_t, std::size_t>> incidence;  // per edge: (white, black) vertex
  bool truncated = false;

  std::size_t vertex_count() const { return white.size() + black.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

inline RayClassGraph ray_class(const Angle& start, const MatingModel& model, std::size_t size_budget) {
  if (size_budget < 1) throw InvalidArgument("size budget must be at least 1");
  RayClassGraph g;
  std::map<Angle, std::size_t> white_of;  // edge angle -> white vertex
  std::map<Angle, std::size_t> black_of;  // edge angle -> black vertex
  std::map<Angle, bool> known;            // edges discovered so far
  std::deque<Angle> queue;
  auto discover = [&](const Angle& z) {
    if (known.emplace(z, true).second) queue.push_back(z);
  };
  discover(start);
  while (!queue.empty()) {
    if (known.size() > size_budget) {
      g.truncated = true;
      break;
    }
    Angle z = queue.front();
    queue.pop_front();
    if (!white_of.contains(z)) {
      CoLandClass w = model.white.class_of(z);
      const std::size_t idx = g.white.size();
      for (const auto& a : w.angles) {
        white_of.emplace(a, idx);
        discover(a);
      }
      g.white.push_back(std::move(w));
    }
    if (!black_of.contains(z)) {
      CoLandClass b = model.black.class_of(conjugate(z));
      const std::size_t idx = g.black.size();
      for (const auto& a : b.angles) {
        Angle e = conjugate(a);
        black_of.emplace(e, idx);
        discover(e);
      }
      g.black.push_back(std::move(b));
    }
  }
  if (known.size() > size_budget) g.truncated = true;
  for (const auto& [z, _] : known) g.edges.push_back(z);
  for (const auto& z : g.edges) {
    auto w = white_of.find(z);
    auto b = black_of.find(z);
    g.incidence.emplace_back(w == white_of.end() ? SIZE_MAX : w->second, b == black_of.end() ? SIZE_MAX : b->second);
  }
  return g;
}

inline RayClassGraph ray_class(const Angle& start, const Angle& theta_w, const Angle& theta_b,
                               std::size_t size_budget) {
  return ray_class(start, MatingModel(theta_w, theta_b), size_budget);
}

struct ClassShape {
  enum class Kind { Tree, Cyclic, TruncatedUnknown };
  Kind kind = Kind::Tree;
  std::size_t diameter = 0;  // meaningful for trees

  friend bool operator==(const ClassShape&, const ClassShape&) = default;
};

inline std::string to_string(ClassShape::Kind k) {
  switch (k) {
    case ClassShape::Kind::Tree: return "Tree";
    case ClassShape::Kind::Cyclic: return "Cyclic";
    case ClassShape::Kind::TruncatedUnknown: return "TruncatedUnknown";
  }
  return "?";
}

// Vertices are numbered white first, then black.
inline std::vector<std::vector<std::size_t>> adjacency(const RayClassGraph& g) {
  std::vector<std::vector<std::size_t>> adj(g.vertex_count());
  for (const auto& [w, b] : g.incidence) {
    if (w == SIZE_MAX || b == SIZE_MAX) continue;
    adj[w].push_back(g.white.size() + b);
    adj[g.white.size() + b].push_back(w);
  }
  return adj;
}

inline std::size_t graph_diameter(const RayClassGraph& g) {
  const auto adj = adjacency(g);
  std::size_t best = 0;
  std::vector<std::size_t> dist(adj.size());
  for (std::size_t s = 0; s < adj.size(); ++s) {
    std::fill(dist.begin(), dist.end(), SIZE_MAX);
    std::deque<std::size_t> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop_front();
      best = std::max(best, dist[v]);
      for (std::size_t u : adj[v]) {
        if (dist[u] == SIZE_MAX) {
          dist[u] = dist[v] + 1;
          q.push_back(u);
        }
      }
    }
  }
  return best;
}

inline ClassShape classify_class(const RayClassGraph& g) {
  if (g.truncated) return {ClassShape::Kind::TruncatedUnknown, 0};
  if (g.edge_count() + 1 > g.vertex_count()) return {ClassShape::Kind::Cyclic, 0};
  return {ClassShape::Kind::Tree, graph_diameter(g)};
}

// --- limbs -----------------------------------------------------------------

// The doubling orbit of period q whose points, listed in increasing order,
// are rotated by p places: x_i -> x_{i+p mod q}.
inline std::vector<Angle> rotation_cycle(std::size_t p, std::size_t q) {
  if (q < 2 || p < 1 || p >= q) throw InvalidArgument("rotation number must lie strictly between 0 and 1");
  if (std::gcd(p, q) != 1) throw InvalidArgument("rotation number must be in lowest terms");
  // The q - p smallest points lie in [0, 1/2) and the p largest in [1/2, 1),
  // so the j-th binary digit of x_i is 1 iff (i + j p) mod q >= q - p.
  const BigInt den = pow2(q) - 1;
  std::vector<Angle> cycle;
  for (std::size_t i = 0; i < q; ++i) {
    BigInt num = 0;
    for (std::size_t j = 0; j < q; ++j) {
      num <<= 1;
      if ((i + j * p) % q >= q - p) num += 1;
    }
    cycle.emplace_back(num, den);
  }
  return cycle;
}

struct Limb {
  Angle rotation;        // p/q
  Angle lower, upper;    // closed characteristic arc [lower, upper]
};

// Rotation number of the limb of the Mandelbrot set containing the parameter
// with external angle theta.
inline Limb limb_of_angle(const Angle& theta) {
  if (theta.is_zero()) throw MainCardioid();
  const OrbitType t = orbit_type(theta);
  if (t.preperiod != 0) throw UnsupportedParameter("limb lookup needs a periodic angle");
  for (std::size_t q = 2; q <= t.period; ++q) {
    for (std::size_t p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      auto cycle = rotation_cycle(p, q);
      // The characteristic arc is the shortest gap between consecutive points.
      std::size_t best = 0;
      Angle best_len = arc_length(cycle[0], cycle[1 % q]);
      for (std::size_t i = 1; i < q; ++i) {
        Angle len = arc_length(cycle[i], cycle[(i + 1) % q]);
        if (len < best_len) {
          best_len = len;
          best = i;
        }
      }
      const Angle& lo = cycle[best];
      const Angle& hi = cycle[(best + 1) % q];
      if (in_closed_arc(theta, lo, hi)) return Limb{Angle(BigInt(p), BigInt(q)), lo, hi};
    }
  }
  throw Error("no limb found for " + theta.str());
}

inline bool conjugate_limbs(const Angle& theta_w, const Angle& theta_b) {
  if (theta_w.is_zero() || theta_b.is_zero()) return false;
  return (limb_of_angle(theta_w).rotation + limb_of_angle(theta_b).rotation).is_zero();
}

// --- scans -------------------------------------------------------------------

struct PeriodGrowth {
  std::size_t period = 0;
  std::size_t classes = 0;
  std::size_t max_diameter = 0;
  std::size_t max_edges = 0;
};

// Finite-model shadow of the Moore-type conditions for the scanned classes.
struct MooreAudit {
  bool all_finite = true;       // no class hit the budget
  bool connected = true;        // classes are connected by construction
  bool non_separating = true;   // every class is a tree
  bool nontrivial = true;       // at least two classes
};

struct ScanReport {
  enum class Verdict { MooreObstructed, Inconclusive, NoObstructionFound };
  Verdict verdict = Verdict::NoObstructionFound;
  std::optional<RayClassGraph> witness;  // first cyclic class
  std::vector<Angle> truncated_starts;
  std::size_t max_diameter = 0;
  std::size_t class_count = 0;
  std::size_t angles_scanned = 0;
  std::vector<PeriodGrowth> growth;
  MooreAudit audit;
};

inline std::string to_string(ScanReport::Verdict v) {
  switch (v) {
    case ScanReport::Verdict::MooreObstructed: return "MooreObstructed";
    case ScanReport::Verdict::Inconclusive: return "Inconclusive";
    case ScanReport::Verdict::NoObstructionFound: return "NoObstructionFound";
  }
  return "?";
}

struct ScanOptions {
  std::size_t preimage_levels = 1;  // also scan angles of preperiod up to this
  bool stop_at_first_cycle = true;
};

// Explores the ray class of every angle with denominator 2^l (2^p - 1),
// p <= max_period, l <= preimage_levels, in order of period, then preperiod,
// then angle.
inline ScanReport scan_verdict(const Angle& theta_w, const Angle& theta_b, std::size_t max_period,
                               std::size_t size_budget, const ScanOptions& opts = {}) {
  if (max_period < 1) throw InvalidArgument("max period must be at least 1");
  MatingModel model(theta_w, theta_b);
  ScanReport report;
  std::map<Angle, bool> covered;
  for (std::size_t p = 1; p <= max_period; ++p) {
    PeriodGrowth growth;
    growth.period = p;
    for (std::size_t l = 0; l <= opts.preimage_levels; ++l) {
      for (const auto& start : detail::angles_of_type(OrbitType{l, p}, kDefaultEnumerationBudget)) {
        ++report.angles_scanned;
        if (covered.contains(start)) continue;
        RayClassGraph g = ray_class(start, model, size_budget);
        for (const auto& e : g.edges) covered.emplace(e, true);
        ClassShape shape = classify_class(g);
        ++report.class_count;
        ++growth.classes;
        growth.max_edges = std::max(growth.max_edges, g.edge_count());
        switch (shape.kind) {
          case ClassShape::Kind::Tree:
            growth.max_diameter = std::max(growth.max_diameter, shape.diameter);
            report.max_diameter = std::max(report.max_diameter, shape.diameter);
            break;
          case ClassShape::Kind::Cyclic:
            report.audit.non_separating = false;
            if (!report.witness) report.witness = std::move(g);
            break;
          case ClassShape::Kind::TruncatedUnknown:
            report.audit.all_finite = false;
            report.truncated_starts.push_back(start);
            break;
        }
        if (report.witness && opts.stop_at_first_cycle) break;
      }
      if (report.witness && opts.stop_at_first_cycle) break;
    }
    report.growth.push_back(growth);
    if (report.witness && opts.stop_at_first_cycle) break;
  }
  report.audit.nontrivial = report.class_count >= 2;
  if (report.witness) report.verdict = ScanReport::Verdict::MooreObstructed;
  else if (!report.truncated_starts.empty()) report.verdict = ScanReport::Verdict::Inconclusive;
  else report.verdict = ScanReport::Verdict::NoObstructionFound;
  return report;
}

}  // namespace mating
