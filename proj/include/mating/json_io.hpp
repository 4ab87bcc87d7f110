#pragma once

// JSON documents written and read by the command line tool. Output is
// deterministic: keys keep insertion order and doubles print with 17
// significant digits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mating/angle.hpp"
#include "mating/errors.hpp"
#include "mating/lamination.hpp"
#include "mating/mating_graph.hpp"
#include "mating/slowmate.hpp"
#include "mating/sphere.hpp"
#include "mating/thurston.hpp"

namespace mating::json_io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLaminationSchema = "mating-forge/lamination/1";
inline constexpr const char* kMateCheckSchema = "mating-forge/mate-check/1";
inline constexpr const char* kRayClassesSchema = "mating-forge/ray-classes/1";
inline constexpr const char* kThurstonSchema = "mating-forge/thurston-matrix/1";
inline constexpr const char* kOrbifoldSchema = "mating-forge/orbifold/1";
inline constexpr const char* kMovieSchema = "mating-forge/slow-mate/1";

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void dump_into(std::string& out, const Json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(k).dump();
        out += indent > 0 ? ": " : ":";
        dump_into(out, v, indent, level + 1);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      if (std::none_of(j.begin(), j.end(), [](const Json& v) { return v.is_structured(); })) {
        out += "[";
        bool first = true;
        for (const auto& v : j) {
          if (!first) out += indent > 0 ? ", " : ",";
          first = false;
          dump_into(out, v, indent, level + 1);
        }
        out += "]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        dump_into(out, v, indent, level + 1);
      }
      out += nl;
      out += close_pad;
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_into(out, j, indent, 0);
  out += "\n";
  return out;
}

inline Json angles_json(const std::vector<Angle>& angles) {
  Json a = Json::array();
  for (const auto& x : angles) a.push_back(x.str());
  return a;
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// Finite points as [re, im]; the point at infinity as the string "inf".
inline Json point_json(const SpherePoint& p) {
  if (p.is_infinite()) return "inf";
  return complex_json(p.value());
}

inline Json lamination_json(const QuadraticLamination& lam) {
  Json j;
  j["schema"] = kLaminationSchema;
  j["theta"] = lam.char_angle.str();
  j["depth"] = lam.depth;
  j["denominator"] = lam.denominator.str();
  j["universe_size"] = lam.universe_size();
  Json classes = Json::array();
  for (const auto& c : lam.classes) classes.push_back(angles_json(c.angles));
  j["classes"] = std::move(classes);
  return j;
}

// Vertices are "w<i>" and "b<i>"; black vertices list black angles.
inline Json graph_json(const RayClassGraph& g) {
  Json j;
  const ClassShape shape = classify_class(g);
  j["shape"] = to_string(shape.kind);
  if (shape.kind == ClassShape::Kind::Tree) j["diameter"] = shape.diameter;
  j["truncated"] = g.truncated;
  j["edges"] = angles_json(g.edges);
  Json vertices = Json::array();
  for (std::size_t i = 0; i < g.white.size(); ++i) {
    Json v;
    v["id"] = "w" + std::to_string(i);
    v["side"] = "white";
    v["angles"] = angles_json(g.white[i].angles);
    vertices.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < g.black.size(); ++i) {
    Json v;
    v["id"] = "b" + std::to_string(i);
    v["side"] = "black";
    v["angles"] = angles_json(g.black[i].angles);
    vertices.push_back(std::move(v));
  }
  j["vertices"] = std::move(vertices);
  Json adj;
  const auto lists = adjacency(g);
  for (std::size_t v = 0; v < lists.size(); ++v) {
    auto name = [&](std::size_t u) {
      return u < g.white.size() ? "w" + std::to_string(u) : "b" + std::to_string(u - g.white.size());
    };
    Json row = Json::array();
    for (std::size_t u : lists[v]) row.push_back(name(u));
    adj[name(v)] = std::move(row);
  }
  j["adjacency"] = std::move(adj);
  Json incidence = Json::array();
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    Json row;
    row["angle"] = g.edges[e].str();
    const auto& [w, b] = g.incidence[e];
    row["white"] = w == SIZE_MAX ? Json(nullptr) : Json("w" + std::to_string(w));
    row["black"] = b == SIZE_MAX ? Json(nullptr) : Json("b" + std::to_string(b));
    incidence.push_back(std::move(row));
  }
  j["incidence"] = std::move(incidence);
  return j;
}

inline Json limb_json(const Angle& theta) {
  try {
    const Limb l = limb_of_angle(theta);
    Json j;
    j["rotation"] = l.rotation.str();
    j["arc"] = Json::array({l.lower.str(), l.upper.str()});
    return j;
  } catch (const InvalidArgument&) {
    return nullptr;
  }
}

inline Json scan_json(const Angle& theta_w, const Angle& theta_b, std::size_t max_period, std::size_t budget,
                      const ScanOptions& opts, const ScanReport& r) {
  Json j;
  j["schema"] = kMateCheckSchema;
  j["theta_w"] = theta_w.str();
  j["theta_b"] = theta_b.str();
  j["max_period"] = max_period;
  j["budget"] = budget;
  j["preimage_levels"] = opts.preimage_levels;
  j["verdict"] = to_string(r.verdict);
  Json limbs;
  limbs["white"] = limb_json(theta_w);
  limbs["black"] = limb_json(theta_b);
  j["limbs"] = std::move(limbs);
  bool conj = false;
  try {
    conj = conjugate_limbs(theta_w, theta_b);
  } catch (const InvalidArgument&) {
  }
  j["conjugate_limbs"] = conj;
  j["witness"] = r.witness ? graph_json(*r.witness) : Json(nullptr);
  j["truncated_starts"] = angles_json(r.truncated_starts);
  j["max_diameter"] = r.max_diameter;
  j["class_count"] = r.class_count;
  j["angles_scanned"] = r.angles_scanned;
  Json growth = Json::array();
  for (const auto& g : r.growth) {
    Json row;
    row["period"] = g.period;
    row["classes"] = g.classes;
    row["max_diameter"] = g.max_diameter;
    row["max_edges"] = g.max_edges;
    growth.push_back(std::move(row));
  }
  j["growth"] = std::move(growth);
  Json audit;
  audit["all_finite"] = r.audit.all_finite;
  audit["connected"] = r.audit.connected;
  audit["non_separating"] = r.audit.non_separating;
  audit["nontrivial"] = r.audit.nontrivial;
  j["moore_audit"] = std::move(audit);
  return j;
}

inline std::string rational_str(const thurston::Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

inline Json matrix_json(const thurston::ThurstonMatrix& a, const thurston::EigenResult& e) {
  Json j;
  j["schema"] = kThurstonSchema;
  j["n"] = a.n;
  Json rows = Json::array();
  for (std::size_t i = 0; i < a.n; ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < a.n; ++k) row.push_back(rational_str(a.at(i, k)));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["leading_eigenvalue"] = e.value;
  j["bracket"] = Json::array({e.lower, e.upper});
  j["method"] = e.method;
  j["obstructed"] = e.obstructed;
  return j;
}

inline Json orbifold_json(const thurston::Portrait& p, const thurston::OrbifoldData& d) {
  Json j;
  j["schema"] = kOrbifoldSchema;
  Json points = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    Json row;
    row["name"] = p.names[i];
    row["next"] = p.names[p.next[i]];
    row["local_degree"] = p.local_degree[i];
    row["postcritical"] = static_cast<bool>(d.postcritical[i]);
    row["weight"] = d.weights[i].infinite ? Json("inf") : Json(d.weights[i].value);
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  j["chi"] = rational_str(d.chi);
  j["warnings"] = d.warnings;
  return j;
}

// {"curves": [{"components": [{"target": 0, "degree": 2}, {"target": null, "degree": 1}]}]}
inline thurston::Pullback parse_pullback(const Json& j) {
  try {
    thurston::Pullback out;
    for (const auto& curve : j.at("curves")) {
      auto& comps = out.emplace_back();
      for (const auto& c : curve.at("components")) {
        thurston::PreimageComponent pc;
        const auto& target = c.at("target");
        if (!target.is_null()) {
          if (!target.is_number_integer() || target.get<long long>() < 0) {
            throw ValidationError("component target must be a curve index or null");
          }
          pc.target = target.get<std::size_t>();
        }
        const auto& degree = c.at("degree");
        if (!degree.is_number_integer() || degree.get<long long>() < 1) {
          throw ValidationError("component degree must be a positive integer");
        }
        pc.degree = degree.get<std::uint64_t>();
        comps.push_back(pc);
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed pullback document: ") + e.what());
  }
}

// {"degree": 2, "points": [{"name": "0", "next": "-1", "local_degree": 2}, ...]}
inline thurston::Portrait parse_portrait(const Json& j) {
  try {
    thurston::Portrait p;
    p.degree = j.value("degree", std::uint64_t{2});
    const auto& pts = j.at("points");
    for (const auto& pt : pts) p.names.push_back(pt.at("name").get<std::string>());
    for (const auto& pt : pts) {
      const std::string target = pt.at("next").get<std::string>();
      auto it = std::find(p.names.begin(), p.names.end(), target);
      if (it == p.names.end()) {
        throw ValidationError("portrait is not post-critically closed: " + target + " is not a marked point");
      }
      p.next.push_back(static_cast<std::size_t>(it - p.names.begin()));
      p.local_degree.push_back(pt.value("local_degree", std::uint64_t{1}));
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed portrait document: ") + e.what());
  }
}

inline Json frame_json(const Frame& f) {
  Json j;
  j["t"] = f.t();
  j["lambda"] = complex_json(f.lambda());
  j["depth"] = f.depth;
  j["v_w"] = point_json(f.v_w);
  j["v_b"] = point_json(f.v_b);
  Json coeffs;
  coeffs["alpha"] = complex_json(f.map.alpha);
  coeffs["beta"] = complex_json(f.map.beta);
  coeffs["gamma"] = complex_json(f.map.gamma);
  coeffs["delta"] = complex_json(f.map.delta);
  j["coefficients"] = std::move(coeffs);
  j["semiconjugacy_residual"] = f.semiconjugacy_residual;
  j["branch_margin"] = f.branch_margin;
  j["refinements"] = f.refinements;
  j["branch_failure"] = f.branch_failure;
  j["collision_distance"] = f.collision_distance;
  j["normalized_resultant"] = f.normalized_resultant;
  Json white = Json::array(), black = Json::array();
  for (const auto& p : f.white) white.push_back(point_json(p));
  for (const auto& p : f.black) black.push_back(point_json(p));
  j["white_positions"] = std::move(white);
  j["black_positions"] = std::move(black);
  return j;
}

inline Json movie_json(const Movie& m, const std::vector<std::string>& images = {}) {
  Json j;
  j["schema"] = kMovieSchema;
  j["c_w"] = complex_json(m.white.c);
  j["c_b"] = complex_json(m.black.c);
  j["t0"] = m.t0;
  j["t_min"] = m.t_min;
  Json verdict;
  verdict["kind"] = to_string(m.verdict.kind);
  verdict["reason"] = to_string(m.verdict.reason);
  verdict["frame_index"] = m.verdict.frame_index;
  verdict["detail"] = m.verdict.detail;
  verdict["last_step_distance"] = m.verdict.last_step_distance;
  if (m.verdict.limit) {
    Json lim;
    lim["alpha"] = complex_json(m.verdict.limit->alpha);
    lim["beta"] = complex_json(m.verdict.limit->beta);
    lim["gamma"] = complex_json(m.verdict.limit->gamma);
    lim["delta"] = complex_json(m.verdict.limit->delta);
    verdict["limit"] = std::move(lim);
  } else {
    verdict["limit"] = nullptr;
  }
  j["verdict"] = std::move(verdict);
  Json frames = Json::array();
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    Json f = frame_json(m.frames[i]);
    if (i < images.size()) f["image"] = images[i];
    frames.push_back(std::move(f));
  }
  j["frames"] = std::move(frames);
  return j;
}

}  // namespace mating::json_io
