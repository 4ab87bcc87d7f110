#pragma once

// Equivalence relations on the finite ground set {0, ..., n-1}.
//
// A Partition is stored as canonical class labels: the class of element i is
// labels()[i], and labels are numbered in order of first appearance. Two
// partitions are equal iff their label vectors are equal.
//
// On a finite ground set every equivalence relation is closed in the discrete
// topology, so taking the closure of a relation is the identity here.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "mating/errors.hpp"

namespace mating::eqrel {

// Union-find with path compression and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

class Partition {
 public:
  Partition() = default;

  // Any labelling works; it is renumbered canonically.
  static Partition from_labels(const std::vector<std::size_t>& raw) {
    Partition p;
    p.labels_.resize(raw.size());
    std::map<std::size_t, std::size_t> renumber;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto [it, fresh] = renumber.emplace(raw[i], renumber.size());
      p.labels_[i] = it->second;
    }
    p.count_ = renumber.size();
    return p;
  }

  static Partition from_sets(DisjointSets& sets) {
    std::vector<std::size_t> raw(sets.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = sets.find(i);
    return from_labels(raw);
  }

  static Partition discrete(std::size_t n) {
    std::vector<std::size_t> raw(n);
    std::iota(raw.begin(), raw.end(), std::size_t{0});
    return from_labels(raw);
  }

  static Partition indiscrete(std::size_t n) { return from_labels(std::vector<std::size_t>(n, 0)); }

  std::size_t size() const { return labels_.size(); }
  std::size_t class_count() const { return count_; }
  std::size_t label(std::size_t x) const { return labels_.at(x); }
  const std::vector<std::size_t>& labels() const { return labels_; }
  bool same(std::size_t x, std::size_t y) const { return labels_.at(x) == labels_.at(y); }

  // Classes indexed by label; each class is sorted.
  std::vector<std::vector<std::size_t>> classes() const {
    std::vector<std::vector<std::size_t>> out(count_);
    for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
    return out;
  }

  // Every class of *this lies inside a class of coarser.
  bool refines(const Partition& coarser) const {
    if (size() != coarser.size()) throw GroundMismatch();
    std::vector<std::size_t> image(count_, SIZE_MAX);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      std::size_t& slot = image[labels_[i]];
      if (slot == SIZE_MAX) slot = coarser.labels_[i];
      else if (slot != coarser.labels_[i]) return false;
    }
    return true;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::size_t> labels_;
  std::size_t count_ = 0;
};

using Pair = std::pair<std::size_t, std::size_t>;

// Finest partition of {0..n-1} putting each pair in one class.
inline Partition generate(std::size_t n, const std::vector<Pair>& pairs) {
  DisjointSets sets(n);
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n) {
      throw UnknownElement("element " + std::to_string(a >= n ? a : b) + " is not in the ground set");
    }
    sets.unite(a, b);
  }
  return Partition::from_sets(sets);
}

// Same, for a ground set of arbitrary ordered values. Elements are indexed by
// their position in `ground`.
template <class T>
Partition generate(const std::vector<T>& ground, const std::vector<std::pair<T, T>>& pairs) {
  std::map<T, std::size_t> index;
  for (std::size_t i = 0; i < ground.size(); ++i) index.emplace(ground[i], i);
  auto lookup = [&](const T& x) {
    auto it = index.find(x);
    if (it == index.end()) throw UnknownElement("pair element is not in the ground set");
    return it->second;
  };
  std::vector<Pair> indexed;
  indexed.reserve(pairs.size());
  for (const auto& [a, b] : pairs) indexed.emplace_back(lookup(a), lookup(b));
  return generate(ground.size(), indexed);
}

// Translate classes back to ground values.
template <class T>
std::vector<std::vector<T>> classes_of(const std::vector<T>& ground, const Partition& p) {
  if (ground.size() != p.size()) throw GroundMismatch();
  std::vector<std::vector<T>> out;
  for (const auto& cls : p.classes()) {
    auto& dst = out.emplace_back();
    for (std::size_t i : cls) dst.push_back(ground[i]);
  }
  return out;
}

inline Partition join(const Partition& p, const Partition& q) {
  if (p.size() != q.size()) throw GroundMismatch();
  DisjointSets sets(p.size());
  std::vector<std::size_t> first_p(p.class_count(), SIZE_MAX);
  std::vector<std::size_t> first_q(q.class_count(), SIZE_MAX);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t& fp = first_p[p.label(i)];
    if (fp == SIZE_MAX) fp = i;
    else sets.unite(fp, i);
    std::size_t& fq = first_q[q.label(i)];
    if (fq == SIZE_MAX) fq = i;
    else sets.unite(fq, i);
  }
  return Partition::from_sets(sets);
}

inline Partition meet(const Partition& p, const Partition& q) {
  if (p.size() != q.size()) throw GroundMismatch();
  std::map<Pair, std::size_t> combined;
  std::vector<std::size_t> raw(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto [it, fresh] = combined.emplace(Pair{p.label(i), q.label(i)}, combined.size());
    raw[i] = it->second;
  }
  return Partition::from_labels(raw);
}

struct Saturation {
  std::vector<std::size_t> saturation;  // union of classes meeting A
  std::vector<std::size_t> interior;    // union of classes contained in A
};

inline Saturation saturate(const Partition& p, const std::vector<std::size_t>& subset) {
  std::vector<char> in_a(p.size(), 0);
  for (std::size_t x : subset) {
    if (x >= p.size()) throw UnknownElement("element " + std::to_string(x) + " is not in the ground set");
    in_a[x] = 1;
  }
  std::vector<char> meets(p.class_count(), 0);
  std::vector<char> inside(p.class_count(), 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (in_a[i]) meets[p.label(i)] = 1;
    else inside[p.label(i)] = 0;
  }
  Saturation out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (meets[p.label(i)]) out.saturation.push_back(i);
    if (inside[p.label(i)]) out.interior.push_back(i);
  }
  return out;
}

inline void check_map(const Partition& p, const std::vector<std::size_t>& f) {
  if (f.size() != p.size()) throw ValidationError("map must be defined on every element of the ground set");
  for (std::size_t y : f) {
    if (y >= p.size()) throw ValidationError("map leaves the ground set");
  }
}

// A pair x ~ y with f(x), f(y) in different classes, if one exists.
inline std::optional<Pair> invariance_witness(const Partition& p, const std::vector<std::size_t>& f) {
  check_map(p, f);
  std::vector<std::size_t> rep(p.class_count(), SIZE_MAX);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t& r = rep[p.label(i)];
    if (r == SIZE_MAX) r = i;
    else if (!p.same(f[r], f[i])) return Pair{r, i};
  }
  return std::nullopt;
}

inline bool is_invariant(const Partition& p, const std::vector<std::size_t>& f) {
  return !invariance_witness(p, f).has_value();
}

// The induced map on class labels, F([x]) = [f(x)].
inline std::vector<std::size_t> quotient_dynamics(const Partition& p, const std::vector<std::size_t>& f) {
  if (auto w = invariance_witness(p, f)) throw InvarianceViolation(w->first, w->second);
  std::vector<std::size_t> induced(p.class_count());
  for (std::size_t i = 0; i < p.size(); ++i) induced[p.label(i)] = p.label(f[i]);
  return induced;
}

}  // namespace mating::eqrel
