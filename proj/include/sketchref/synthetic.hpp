#ifndef SKETCHREF_SYNTHETIC_HPP_
#define SKETCHREF_SYNTHETIC_HPP_

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "sketchref/core.hpp"
#include "sketchref/erasure.hpp"

namespace sketchref::synthetic {

// COCO-17 limb connections (0-based joint indices).
extern const std::vector<std::pair<int, int>> kCocoSkeleton;

struct StickFigure {
  ImageRecord reference;     // textured "photo" with thick limbs
  ImageRecord sketch;        // thin dark strokes on white
  PredictionFile ref_preds;  // one coco17 target at the drawn joint positions
};

// Deterministic 224x224 human stick figure. The joints are spread so that
// no 10x10 erasure window reaches another joint's 7x7 neighbourhood.
StickFigure make_stick_figure(std::uint64_t texture_seed = 7);

// Draws a line with a round brush of the given radius.
void draw_line(ImageRecord& img, double x0, double y0, double x1, double y1, double radius, std::uint8_t value);

ImageRecord noise_image(int width, int height, std::uint64_t seed);
ImageRecord checkerboard(int width, int height, int cell = 1);
// Filled axis-aligned square [x0, x0 + side) x [y0, y0 + side).
ImageRecord square_image(int width, int height, int x0, int y0, int side, std::uint8_t bg, std::uint8_t fg);

// Stand-in for a top-down pose model on line drawings: for every reference
// joint it looks for dark pixels in a (2r+1)^2 window around the reference
// location and reports their centroid. When no ink is found the joint is
// reported at the box centre with zero confidence.
class MockJointPredictor : public KeypointPredictor {
 public:
  explicit MockJointPredictor(int search_radius = 3, std::uint8_t ink_threshold = 128)
      : radius_(search_radius), ink_threshold_(ink_threshold) {}

  PredictionFile predict(const ImageRecord& img, const PredictionFile& reference) const override;

 private:
  int radius_;
  std::uint8_t ink_threshold_;
};

}  // namespace sketchref::synthetic

#endif  // SKETCHREF_SYNTHETIC_HPP_
