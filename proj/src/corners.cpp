#include <algorithm>
#include <array>
#include <cmath>

#include "sketchref/complexity.hpp"
#include "sketchref/error.hpp"

namespace sketchref {

namespace {

// Reflect-101 border: -1 -> 1, n -> n - 2.
int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  Plane(int width, int height) : w(width), h(height), v(static_cast<std::size_t>(width) * height, 0.0) {}
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  double clamped(int x, int y) const { return at(reflect(x, w), reflect(y, h)); }
};

Plane gaussian_blur(const Plane& in, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  Plane tmp(in.w, in.h), out(in.w, in.h);
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * in.clamped(x + i, y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.clamped(x, y + i);
      out.at(x, y) = acc;
    }
  return out;
}

// 3x3 non-maximum suppression with a deterministic tie rule: a pixel survives
// if it is >= every neighbour and strictly > the neighbours that precede it in
// raster order, so a plateau keeps exactly its first pixel.
std::vector<Corner> suppress(const Plane& score, const std::vector<Corner>& candidates) {
  std::vector<Corner> kept;
  for (const auto& c : candidates) {
    bool keep = true;
    for (int dy = -1; dy <= 1 && keep; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = c.x + dx, ny = c.y + dy;
        if (nx < 0 || ny < 0 || nx >= score.w || ny >= score.h) continue;
        const double s = score.at(nx, ny);
        const bool precedes = dy < 0 || (dy == 0 && dx < 0);
        if (s > c.response || (precedes && s == c.response)) {
          keep = false;
          break;
        }
      }
    }
    if (keep) kept.push_back(c);
  }
  return kept;
}

}  // namespace

std::vector<Corner> detect_harris(const ImageRecord& img, const HarrisParams& params) {
  validate_image(img);
  const int w = img.width, h = img.height;
  Plane src(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) src.at(x, y) = img.at(x, y) / 255.0;

  Plane ixx(w, h), iyy(w, h), ixy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (src.clamped(x + 1, y - 1) + 2 * src.clamped(x + 1, y) + src.clamped(x + 1, y + 1)) -
                        (src.clamped(x - 1, y - 1) + 2 * src.clamped(x - 1, y) + src.clamped(x - 1, y + 1));
      const double gy = (src.clamped(x - 1, y + 1) + 2 * src.clamped(x, y + 1) + src.clamped(x + 1, y + 1)) -
                        (src.clamped(x - 1, y - 1) + 2 * src.clamped(x, y - 1) + src.clamped(x + 1, y - 1));
      ixx.at(x, y) = gx * gx;
      iyy.at(x, y) = gy * gy;
      ixy.at(x, y) = gx * gy;
    }
  }
  const Plane a = gaussian_blur(ixx, params.sigma);
  const Plane b = gaussian_blur(iyy, params.sigma);
  const Plane c = gaussian_blur(ixy, params.sigma);

  Plane response(w, h);
  double max_r = 0.0;
  for (std::size_t i = 0; i < response.v.size(); ++i) {
    const double tr = a.v[i] + b.v[i];
    response.v[i] = a.v[i] * b.v[i] - c.v[i] * c.v[i] - params.k * tr * tr;
    max_r = std::max(max_r, response.v[i]);
  }
  if (!(max_r > 0.0)) return {};

  // Floating-point residue on flat regions is far below any real corner.
  const double threshold = std::max(params.rel_threshold * max_r, 1e-12);
  std::vector<Corner> candidates;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (response.at(x, y) > threshold) candidates.push_back({x, y, response.at(x, y)});
  return suppress(response, candidates);
}

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr std::array<std::array<int, 2>, 16> kCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};

// Longest circular run of `true` in a 16-element ring.
int longest_arc(const std::array<bool, 16>& flags) {
  int best = 0, run = 0;
  for (int i = 0; i < 32; ++i) {
    if (flags[i % 16]) {
      run = std::min(run + 1, 16);
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best;
}

}  // namespace

std::vector<Corner> detect_fast(const ImageRecord& img, const FastParams& params) {
  validate_image(img);
  const int w = img.width, h = img.height;
  Plane score(w, h);
  std::vector<Corner> candidates;
  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const int p = img.at(x, y);
      std::array<bool, 16> brighter{}, darker{};
      int sad_bright = 0, sad_dark = 0;
      for (std::size_t i = 0; i < 16; ++i) {
        const int v = img.at(x + kCircle[i][0], y + kCircle[i][1]);
        if (v > p + params.threshold) {
          brighter[i] = true;
          sad_bright += v - p - params.threshold;
        } else if (v < p - params.threshold) {
          darker[i] = true;
          sad_dark += p - v - params.threshold;
        }
      }
      const bool is_corner = longest_arc(brighter) >= params.arc_length || longest_arc(darker) >= params.arc_length;
      if (!is_corner) continue;
      // Rosten's SAD score, used only to rank neighbouring detections.
      const double s = std::max(sad_bright, sad_dark);
      score.at(x, y) = s;
      candidates.push_back({x, y, s});
    }
  }
  if (!params.nonmax) return candidates;
  return suppress(score, candidates);
}

}  // namespace sketchref
