#include "sketchref/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sketchref/error.hpp"

namespace sketchref::synthetic {

const std::vector<std::pair<int, int>> kCocoSkeleton = {
    {15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12}, {5, 6}, {5, 7}, {6, 8},
    {7, 9},   {8, 10},  {1, 2},   {0, 1},   {0, 2},   {1, 3},  {2, 4},  {3, 5}, {4, 6}};

namespace {

// x, y per COCO joint on a 224x224 canvas.
constexpr std::array<std::array<double, 2>, 17> kJoints = {{
    {112, 40},   // nose
    {122, 30},   // left eye
    {102, 30},   // right eye
    {134, 40},   // left ear
    {90, 40},    // right ear
    {142, 70},   // left shoulder
    {82, 70},    // right shoulder
    {162, 105},  // left elbow
    {62, 105},   // right elbow
    {172, 140},  // left wrist
    {52, 140},   // right wrist
    {130, 130},  // left hip
    {94, 130},   // right hip
    {136, 165},  // left knee
    {88, 165},   // right knee
    {140, 200},  // left ankle
    {84, 200},   // right ankle
}};

void stamp_disk(ImageRecord& img, double cx, double cy, double radius, std::uint8_t value) {
  const int x0 = static_cast<int>(std::floor(cx - radius)), x1 = static_cast<int>(std::ceil(cx + radius));
  const int y0 = static_cast<int>(std::floor(cy - radius)), y1 = static_cast<int>(std::ceil(cy + radius));
  for (int y = std::max(y0, 0); y <= std::min(y1, img.height - 1); ++y)
    for (int x = std::max(x0, 0); x <= std::min(x1, img.width - 1); ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= radius * radius) img.at(x, y) = value;
    }
}

}  // namespace

void draw_line(ImageRecord& img, double x0, double y0, double x1, double y1, double radius, std::uint8_t value) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    stamp_disk(img, x0 + t * (x1 - x0), y0 + t * (y1 - y0), radius, value);
  }
}

ImageRecord noise_image(int width, int height, std::uint64_t seed) {
  ImageRecord img = make_image(width, height, 0, "noise");
  std::mt19937_64 gen(seed);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(gen() >> 56);
  return img;
}

ImageRecord checkerboard(int width, int height, int cell) {
  ImageRecord img = make_image(width, height, 0, "checkerboard");
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? 255 : 0;
  return img;
}

ImageRecord square_image(int width, int height, int x0, int y0, int side, std::uint8_t bg, std::uint8_t fg) {
  ImageRecord img = make_image(width, height, bg, "square");
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x) img.at(x, y) = fg;
  return img;
}

StickFigure make_stick_figure(std::uint64_t texture_seed) {
  constexpr int kSize = 224;
  StickFigure fig;

  fig.reference = make_image(kSize, kSize, 235, "stick:ref");
  std::mt19937_64 gen(texture_seed);
  for (auto& p : fig.reference.pixels) p = static_cast<std::uint8_t>(215 + (gen() >> 59));  // 215..246
  for (const auto& [a, b] : kCocoSkeleton) {
    draw_line(fig.reference, kJoints[a][0], kJoints[a][1], kJoints[b][0], kJoints[b][1], 4.0, 70);
  }
  stamp_disk(fig.reference, 112, 36, 14.0, 90);
  for (const auto& j : kJoints) stamp_disk(fig.reference, j[0], j[1], 2.0, 30);

  fig.sketch = make_image(kSize, kSize, 255, "stick:sketch");
  for (const auto& [a, b] : kCocoSkeleton) {
    draw_line(fig.sketch, kJoints[a][0], kJoints[a][1], kJoints[b][0], kJoints[b][1], 1.0, 0);
  }

  TargetKeypoints target;
  double min_x = kSize, min_y = kSize, max_x = 0, max_y = 0;
  for (const auto& j : kJoints) {
    target.points.push_back({j[0], j[1], 1.0});
    min_x = std::min(min_x, j[0]);
    min_y = std::min(min_y, j[1]);
    max_x = std::max(max_x, j[0]);
    max_y = std::max(max_y, j[1]);
  }
  constexpr double kMargin = 10.0;
  target.bbox = {min_x - kMargin, min_y - kMargin, max_x - min_x + 2 * kMargin, max_y - min_y + 2 * kMargin};
  target.score = 1.0;
  fig.ref_preds = PredictionFile{"stick:ref", "coco17", {std::move(target)}};
  return fig;
}

PredictionFile MockJointPredictor::predict(const ImageRecord& img, const PredictionFile& reference) const {
  validate_image(img);
  PredictionFile out{img.id, reference.schema, {}};
  for (const auto& ref_target : reference.targets) {
    TargetKeypoints t;
    t.bbox = ref_target.bbox;
    const double fallback_x = t.bbox[0] + t.bbox[2] / 2.0;
    const double fallback_y = t.bbox[1] + t.bbox[3] / 2.0;
    double conf_sum = 0.0;
    for (const auto& hint : ref_target.points) {
      const int cx = static_cast<int>(std::floor(hint.x)), cy = static_cast<int>(std::floor(hint.y));
      double sx = 0.0, sy = 0.0;
      int ink = 0;
      for (int y = std::max(cy - radius_, 0); y <= std::min(cy + radius_, img.height - 1); ++y)
        for (int x = std::max(cx - radius_, 0); x <= std::min(cx + radius_, img.width - 1); ++x)
          if (img.at(x, y) < ink_threshold_) {
            sx += x;
            sy += y;
            ++ink;
          }
      if (ink > 0) {
        const double side = 2.0 * radius_ + 1.0;
        const double conf = std::min(1.0, ink / side);
        t.points.push_back({sx / ink, sy / ink, conf});
        conf_sum += conf;
      } else {
        t.points.push_back({fallback_x, fallback_y, 0.0});
      }
    }
    t.score = ref_target.points.empty() ? 0.0 : conf_sum / static_cast<double>(ref_target.points.size());
    out.targets.push_back(std::move(t));
  }
  return out;
}

}  // namespace sketchref::synthetic
