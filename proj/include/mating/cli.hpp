#pragma once

// Command line front end. run() never calls exit(), so it can be driven from
// tests with string streams.
//
// Exit codes: 0 success, 1 obstructed or degenerated verdict under --strict,
// 2 usage or input error, 3 numeric failure.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mating/angle.hpp"
#include "mating/errors.hpp"
#include "mating/json_io.hpp"
#include "mating/lamination.hpp"
#include "mating/mating_graph.hpp"
#include "mating/render.hpp"
#include "mating/slowmate.hpp"
#include "mating/thurston.hpp"

namespace mating::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// "re,im" or a bare real number.
inline Complex parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ParseError("expected a complex number re,im but got '" + text + "'");
    }
    if (used != s.size()) throw ParseError("expected a complex number re,im but got '" + text + "'");
    return v;
  };
  if (comma == std::string::npos) return {number(text), 0.0};
  return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
}

namespace detail {

// Values of --cw/--cb may start with '-'; glue them to their flag so the
// parser does not take them for options.
inline std::vector<std::string> glue_complex_values(std::vector<std::string> args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if ((args[i] == "--cw" || args[i] == "--cb") && i + 1 < args.size()) {
      out.push_back(args[i] + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

inline void emit(const json_io::Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = json_io::dump(doc);
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path);
}

inline json_io::Json load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path);
  try {
    return json_io::Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace detail

inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Combinatorics and slow mating of post-critically finite quadratic polynomials", "mating-forge"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  int exit_code = kExitOk;

  // lamination
  auto* lam = app.add_subcommand("lamination", "Co-landing classes of all angles m / (2^depth (2^p - 1))");
  std::string lam_theta, lam_out;
  std::size_t lam_depth = 8, lam_universe = std::size_t{1} << 20;
  lam->add_option("--theta", lam_theta, "Characteristic angle num/den")->required();
  lam->add_option("--depth", lam_depth, "Preimage depth")->capture_default_str();
  lam->add_option("--max-universe", lam_universe, "Largest universe size")->check(CLI::PositiveNumber)->capture_default_str();
  lam->add_option("--out", lam_out, "Output file (default: stdout)");
  lam->callback([&] {
    const Angle theta = Angle::parse(lam_theta);
    detail::emit(json_io::lamination_json(lamination_to_depth(theta, lam_depth, lam_universe)), lam_out, out);
  });

  // mate-check
  auto* mc = app.add_subcommand("mate-check", "Search the ray-equivalence classes of a mating for cycles");
  std::string mc_w, mc_b, mc_out;
  std::size_t mc_period = 8, mc_budget = 10000;
  ScanOptions mc_opts;
  bool mc_all = false, mc_strict = false;
  mc->add_option("--theta-w", mc_w, "White characteristic angle")->required();
  mc->add_option("--theta-b", mc_b, "Black characteristic angle")->required();
  mc->add_option("--max-period", mc_period, "Largest period scanned")->check(CLI::PositiveNumber)->capture_default_str();
  mc->add_option("--budget", mc_budget, "Edge budget per class")->check(CLI::PositiveNumber)->capture_default_str();
  mc->add_option("--preimage-levels", mc_opts.preimage_levels, "Also scan preperiodic angles up to this preperiod")
      ->capture_default_str();
  mc->add_flag("--all-classes", mc_all, "Keep scanning after the first cycle");
  mc->add_option("--out", mc_out, "Output file (default: stdout)");
  mc->add_flag("--strict", mc_strict, "Exit 1 when the mating is obstructed");
  mc->callback([&] {
    const Angle w = Angle::parse(mc_w), b = Angle::parse(mc_b);
    mc_opts.stop_at_first_cycle = !mc_all;
    const ScanReport r = scan_verdict(w, b, mc_period, mc_budget, mc_opts);
    detail::emit(json_io::scan_json(w, b, mc_period, mc_budget, mc_opts, r), mc_out, out);
    if (mc_strict && r.verdict == ScanReport::Verdict::MooreObstructed) exit_code = kExitVerdict;
  });

  // ray-classes
  auto* rc = app.add_subcommand("ray-classes", "Ray-equivalence classes of given angles");
  std::string rc_w, rc_b, rc_out;
  std::vector<std::string> rc_start;
  std::size_t rc_budget = 10000;
  rc->add_option("--theta-w", rc_w, "White characteristic angle")->required();
  rc->add_option("--theta-b", rc_b, "Black characteristic angle")->required();
  rc->add_option("--start", rc_start, "Angles whose classes are explored")->required();
  rc->add_option("--budget", rc_budget, "Edge budget per class")->check(CLI::PositiveNumber)->capture_default_str();
  rc->add_option("--out", rc_out, "Output file (default: stdout)");
  rc->callback([&] {
    const Angle w = Angle::parse(rc_w), b = Angle::parse(rc_b);
    const MatingModel model(w, b);
    json_io::Json doc;
    doc["schema"] = json_io::kRayClassesSchema;
    doc["theta_w"] = w.str();
    doc["theta_b"] = b.str();
    doc["budget"] = rc_budget;
    json_io::Json classes = json_io::Json::array();
    for (const auto& s : rc_start) {
      const Angle start = Angle::parse(s);
      json_io::Json g = json_io::graph_json(ray_class(start, model, rc_budget));
      json_io::Json entry;
      entry["start"] = start.str();
      for (auto& [k, v] : g.items()) entry[k] = v;
      classes.push_back(std::move(entry));
    }
    doc["classes"] = std::move(classes);
    detail::emit(doc, rc_out, out);
  });

  // thurston-matrix
  auto* tm = app.add_subcommand("thurston-matrix", "Thurston matrix and leading eigenvalue of a multicurve pullback");
  std::string tm_in, tm_out;
  bool tm_strict = false;
  tm->add_option("--pullback", tm_in, "Pullback JSON file")->required();
  tm->add_option("--out", tm_out, "Output file (default: stdout)");
  tm->add_flag("--strict", tm_strict, "Exit 1 when the multicurve is an obstruction");
  tm->callback([&] {
    const auto a = thurston::thurston_matrix(json_io::parse_pullback(detail::load(tm_in)));
    const auto e = thurston::leading_eigenvalue(a);
    detail::emit(json_io::matrix_json(a, e), tm_out, out);
    if (tm_strict && e.obstructed) exit_code = kExitVerdict;
  });

  // orbifold
  auto* ob = app.add_subcommand("orbifold", "Orbifold weights and Euler characteristic of a portrait");
  std::string ob_in, ob_preset, ob_out;
  auto* ob_file = ob->add_option("--portrait", ob_in, "Portrait JSON file");
  ob->add_option("--preset", ob_preset, "Built-in portrait")
      ->check(CLI::IsMember({"z2", "basilica", "rabbit", "airplane"}))
      ->excludes(ob_file);
  ob->add_option("--out", ob_out, "Output file (default: stdout)");
  ob->callback([&] {
    thurston::Portrait p;
    if (!ob_in.empty()) {
      p = json_io::parse_portrait(detail::load(ob_in));
    } else if (ob_preset == "z2") {
      p = thurston::Portrait::quadratic(0, 1);
    } else if (ob_preset == "basilica") {
      p = thurston::Portrait::quadratic(0, 2);
    } else if (ob_preset == "rabbit" || ob_preset == "airplane") {
      p = thurston::Portrait::quadratic(0, 3);
    } else {
      throw InvalidArgument("orbifold needs --portrait or --preset");
    }
    detail::emit(json_io::orbifold_json(p, thurston::orbifold_data(p)), ob_out, out);
  });

  // slow-mate
  auto* sm = app.add_subcommand("slow-mate", "Follow the slow mating maps as lambda decreases to 1");
  std::string sm_cw = "0,0", sm_cb = "0,0", sm_frames, sm_report;
  double sm_t0 = 8, sm_tmin = 1e-6, sm_radius = 2;
  std::size_t sm_width = 256, sm_height = 256;
  SlowMateConfig sm_cfg;
  bool sm_strict = false;
  sm->add_option("--cw", sm_cw, "White parameter re,im")->capture_default_str();
  sm->add_option("--cb", sm_cb, "Black parameter re,im")->capture_default_str();
  sm->add_option("--t0", sm_t0, "Starting level log(lambda)")->check(CLI::PositiveNumber)->capture_default_str();
  sm->add_option("--tmin", sm_tmin, "Stop once log(lambda) is at most this")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sm->add_option("--substeps", sm_cfg.substeps, "Frames per halving of log(lambda)")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sm->add_option("--max-frames", sm_cfg.max_frames, "Frame budget")->check(CLI::PositiveNumber)->capture_default_str();
  sm->add_option("--min-t0", sm_cfg.min_t0, "Smallest accepted t0")->check(CLI::PositiveNumber)->capture_default_str();
  sm->add_option("--frames", sm_frames, "Directory for PPM frames");
  sm->add_option("--width", sm_width, "Frame width in pixels")->check(CLI::PositiveNumber)->capture_default_str();
  sm->add_option("--height", sm_height, "Frame height in pixels")->check(CLI::PositiveNumber)->capture_default_str();
  sm->add_option("--radius", sm_radius, "Half-width of the rendered region")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sm->add_option("--report", sm_report, "Movie JSON file (default: stdout)");
  sm->add_flag("--strict", sm_strict, "Exit 1 when the movie degenerates");
  sm->callback([&] {
    const Complex cw = parse_complex(sm_cw), cb = parse_complex(sm_cb);
    const Movie movie = run_movie(PolySpec::pcf(cw, Side::White), PolySpec::pcf(cb, Side::Black), sm_t0, sm_tmin,
                                  sm_cfg);
    std::vector<std::string> images;
    if (!sm_frames.empty()) {
      std::filesystem::create_directories(sm_frames);
      for (std::size_t i = 0; i < movie.frames.size(); ++i) {
        if (movie.frames[i].normalized_resultant == 0) break;
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.ppm", i);
        const std::string path = (std::filesystem::path(sm_frames) / name).string();
        write_ppm(path, render_frame(movie.frames[i], sm_width, sm_height, Viewport{0.0, sm_radius}));
        images.push_back(name);
      }
    }
    detail::emit(json_io::movie_json(movie, images), sm_report, out);
    if (sm_strict && movie.verdict.kind == MovieVerdict::Kind::Degenerated) exit_code = kExitVerdict;
  });

  std::vector<std::string> args = detail::glue_complex_values(raw_args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return exit_code;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, out, err);
}

}  // namespace mating::cli
