#ifndef SKETCHREF_ERASURE_HPP_
#define SKETCHREF_ERASURE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sketchref/core.hpp"
#include "sketchref/recognizability.hpp"

namespace sketchref {

struct ErasureSpec {
  int region_size = 10;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::uint8_t fill_value = 255;
};

// Order in which keypoints are erased for a given seed: a Fisher-Yates
// shuffle of [0, n) driven by std::mt19937_64, with bounded draws taken by
// rejection sampling (no std::uniform_int_distribution, whose output is
// implementation-defined). The first k entries are the k erased keypoints, so
// region sets are nested across k.
std::vector<std::size_t> erasure_order(std::size_t n, std::uint64_t seed);

// Inclusive pixel window, already clipped to the image.
struct PixelWindow {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
};

// Window around pixel (cx, cy) covering [c - floor(s/2), c + ceil(s/2) - 1] on
// each axis. Keypoint coordinates map to the pixel that contains them.
PixelWindow erasure_window(double x, double y, int region_size, int width, int height);

std::vector<PixelWindow> erasure_windows(const ImageRecord& img, const TargetKeypoints& keypoints,
                                         const ErasureSpec& spec);

// Returns a copy of `img` with `spec.count` seeded keypoint windows set to
// `spec.fill_value`.
ImageRecord erase_regions(const ImageRecord& img, const TargetKeypoints& keypoints, const ErasureSpec& spec);

// Scores a (possibly erased) sketch of `item`.
struct MetricEvaluator {
  std::string name;
  std::function<double(const EvalItem& item, const ImageRecord& sketch)> score;
};

struct SweepResult {
  std::map<std::size_t, std::map<std::string, double>> per_k;  // k -> metric -> score(k) - score(0)
  std::map<std::string, double> baseline;                     // metric -> score(0)
};

// Erases k = each entry of `ks` regions (spec.count is ignored) and records
// the change of every metric relative to the unerased sketch. `ks` must
// contain 0.
SweepResult erasure_sweep(const EvalItem& item, const TargetKeypoints& keypoints, std::span<const std::size_t> ks,
                          std::span<const MetricEvaluator> metrics, const ErasureSpec& spec);

Json sweep_to_json(const SweepResult& result);
// Long-format plot data: k,metric,delta
std::string sweep_to_csv(const SweepResult& result);

// Averages deltas and baselines over several per-item sweeps sharing the same
// k levels and metric names.
SweepResult mean_sweep(std::span<const SweepResult> sweeps);

// Produces keypoints for an image given the reference regions (top-down
// protocol: boxes come from the reference, points from the image).
class KeypointPredictor {
 public:
  virtual ~KeypointPredictor() = default;
  virtual PredictionFile predict(const ImageRecord& img, const PredictionFile& reference) const = 0;
};

// R_s of the erased sketch against fixed reference predictions.
MetricEvaluator make_structure_evaluator(PredictionFile ref_preds, std::shared_ptr<const KeypointPredictor> predictor,
                                         OksParams params);

// 1 - mean |ref - sketch| / 255, a pixel-level comparator.
MetricEvaluator make_pixel_similarity_evaluator();

}  // namespace sketchref

#endif  // SKETCHREF_ERASURE_HPP_
