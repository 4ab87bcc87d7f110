#pragma once

// Pictures of a slow-mating frame: each pixel is iterated under R and colored
// by the critical orbit it is attracted to.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mating/errors.hpp"
#include "mating/parallel.hpp"
#include "mating/slowmate.hpp"
#include "mating/sphere.hpp"

namespace mating {

struct Viewport {
  Complex center{0.0};
  double radius = 2.0;  // half-width of the shorter image side
};

struct RenderOptions {
  std::size_t max_iterations = 256;
  double capture_distance = 1e-3;  // chordal
  std::size_t orbit_samples = 16;
};

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  std::array<std::uint8_t, 3> pixel(std::size_t x, std::size_t y) const {
    const std::size_t k = 3 * (y * width + x);
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
  }
};

inline constexpr std::array<std::uint8_t, 3> kWhiteBasin{235, 235, 225};
inline constexpr std::array<std::uint8_t, 3> kBlackBasin{25, 25, 35};
inline constexpr std::array<std::uint8_t, 3> kOther{190, 60, 50};

inline Complex pixel_center(std::size_t x, std::size_t y, std::size_t width, std::size_t height, const Viewport& view) {
  const double scale = 2.0 * view.radius / static_cast<double>(std::min(width, height));
  const double re = (static_cast<double>(x) + 0.5 - 0.5 * static_cast<double>(width)) * scale;
  const double im = (0.5 * static_cast<double>(height) - static_cast<double>(y) - 0.5) * scale;
  return view.center + Complex(re, im);
}

namespace detail {

// Points near the attracting cycle reached by the orbit of `start`: the first
// and the last few points of a long orbit.
inline std::vector<SpherePoint> orbit_targets(const QuadraticMap& map, SpherePoint start, const RenderOptions& opt) {
  std::vector<SpherePoint> orbit{start};
  for (std::size_t i = 1; i < opt.max_iterations; ++i) orbit.push_back(map(orbit.back()));
  std::vector<SpherePoint> targets;
  const std::size_t k = std::min(opt.orbit_samples, orbit.size());
  targets.insert(targets.end(), orbit.begin(), orbit.begin() + static_cast<std::ptrdiff_t>(k));
  targets.insert(targets.end(), orbit.end() - static_cast<std::ptrdiff_t>(k), orbit.end());
  return targets;
}

}  // namespace detail

inline Image render_frame(const Frame& frame, std::size_t width, std::size_t height, const Viewport& view = {},
                          const RenderOptions& opt = {}) {
  if (width == 0 || height == 0) throw InvalidArgument("image dimensions must be positive");
  if (!(view.radius > 0)) throw InvalidArgument("viewport radius must be positive");
  if (frame.normalized_resultant == 0) throw DegenerateMap("cannot render a degenerate frame");
  const QuadraticMap& map = frame.map;
  const auto white = detail::orbit_targets(map, SpherePoint::finite(0.0), opt);
  const auto black = detail::orbit_targets(map, SpherePoint::infinity(), opt);
  auto near = [&](const SpherePoint& p, const std::vector<SpherePoint>& ts) {
    for (const auto& t : ts) {
      if (chordal(p, t) < opt.capture_distance) return true;
    }
    return false;
  };
  Image img{width, height, std::vector<std::uint8_t>(3 * width * height)};
  parallel_for(
      height,
      [&](std::size_t y) {
        for (std::size_t x = 0; x < width; ++x) {
          SpherePoint p = SpherePoint::finite(pixel_center(x, y, width, height, view));
          auto color = kOther;
          for (std::size_t it = 0; it < opt.max_iterations; ++it) {
            if (near(p, white)) {
              color = kWhiteBasin;
              break;
            }
            if (near(p, black)) {
              color = kBlackBasin;
              break;
            }
            p = map(p);
          }
          const std::size_t k = 3 * (y * width + x);
          img.rgb[k] = color[0];
          img.rgb[k + 1] = color[1];
          img.rgb[k + 2] = color[2];
        }
      },
      1);
  return img;
}

inline std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

inline void write_ppm(const std::string& path, const Image& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  const std::string data = encode_ppm(img);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw Error("failed writing " + path);
}

}  // namespace mating
