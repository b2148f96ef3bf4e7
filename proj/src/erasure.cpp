#include "sketchref/erasure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sketchref/aggregation.hpp"
#include "sketchref/error.hpp"

namespace sketchref {

namespace {

// Unbiased draw in [0, bound) from a 64-bit engine.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t threshold = (std::numeric_limits<std::uint64_t>::max() - bound + 1) % bound;
  while (true) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

void check_in_bounds(const ImageRecord& img, const TargetKeypoints& keypoints) {
  for (std::size_t i = 0; i < keypoints.points.size(); ++i) {
    const auto& p = keypoints.points[i];
    if (!(p.x >= 0.0) || !(p.y >= 0.0) || p.x >= img.width || p.y >= img.height) {
      throw Error(ErrorCode::kValidation, "keypoint #" + std::to_string(i) + " lies outside the image");
    }
  }
}

}  // namespace

std::vector<std::size_t> erasure_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(gen, n - i));
    std::swap(order[i], order[j]);
  }
  return order;
}

PixelWindow erasure_window(double x, double y, int region_size, int width, int height) {
  const int cx = static_cast<int>(std::floor(x));
  const int cy = static_cast<int>(std::floor(y));
  const int before = region_size / 2;
  const int after = (region_size + 1) / 2 - 1;
  return {std::max(cx - before, 0), std::max(cy - before, 0), std::min(cx + after, width - 1),
          std::min(cy + after, height - 1)};
}

std::vector<PixelWindow> erasure_windows(const ImageRecord& img, const TargetKeypoints& keypoints,
                                         const ErasureSpec& spec) {
  validate_image(img);
  if (spec.region_size <= 0) throw Error(ErrorCode::kInvalidArgument, "erasure region size must be positive");
  if (spec.count > keypoints.points.size()) {
    throw Error(ErrorCode::kInvalidArgument, "erasure count " + std::to_string(spec.count) + " exceeds " +
                                                 std::to_string(keypoints.points.size()) + " keypoints");
  }
  check_in_bounds(img, keypoints);
  const auto order = erasure_order(keypoints.points.size(), spec.seed);
  std::vector<PixelWindow> windows;
  for (std::size_t i = 0; i < spec.count; ++i) {
    const auto& p = keypoints.points[order[i]];
    windows.push_back(erasure_window(p.x, p.y, spec.region_size, img.width, img.height));
  }
  return windows;
}

ImageRecord erase_regions(const ImageRecord& img, const TargetKeypoints& keypoints, const ErasureSpec& spec) {
  ImageRecord out = img;
  for (const auto& w : erasure_windows(img, keypoints, spec)) {
    for (int y = w.y0; y <= w.y1; ++y)
      for (int x = w.x0; x <= w.x1; ++x) out.at(x, y) = spec.fill_value;
  }
  return out;
}

SweepResult erasure_sweep(const EvalItem& item, const TargetKeypoints& keypoints, std::span<const std::size_t> ks,
                          std::span<const MetricEvaluator> metrics, const ErasureSpec& spec) {
  if (!item.sketch) throw Error(ErrorCode::kInvalidArgument, "erasure sweep: item has no sketch image");
  std::set<std::size_t> levels(ks.begin(), ks.end());
  if (!levels.contains(0)) throw Error(ErrorCode::kInvalidArgument, "erasure sweep: k levels must include 0");
  if (*levels.rbegin() > keypoints.points.size()) {
    throw Error(ErrorCode::kInvalidArgument, "erasure sweep: max k exceeds keypoint count");
  }
  if (metrics.empty()) throw Error(ErrorCode::kInvalidArgument, "erasure sweep: no metrics");

  SweepResult result;
  // Levels are visited in ascending order; one seed gives nested region sets.
  for (std::size_t k : levels) {
    ErasureSpec level = spec;
    level.count = k;
    const ImageRecord erased = erase_regions(*item.sketch, keypoints, level);
    for (const auto& m : metrics) {
      const double s = m.score(item, erased);
      if (k == 0) result.baseline[m.name] = s;
      result.per_k[k][m.name] = s - result.baseline.at(m.name);
    }
  }
  return result;
}

Json sweep_to_json(const SweepResult& result) {
  Json per_k = Json::array();
  for (const auto& [k, deltas] : result.per_k) per_k.push_back({{"k", k}, {"delta", deltas}});
  return Json{{"baseline", result.baseline}, {"per_k", std::move(per_k)}};
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "k,metric,delta\n";
  for (const auto& [k, deltas] : result.per_k)
    for (const auto& [name, d] : deltas) os << k << ',' << name << ',' << format_alpha(d) << '\n';
  return os.str();
}

SweepResult mean_sweep(std::span<const SweepResult> sweeps) {
  if (sweeps.empty()) throw Error(ErrorCode::kInvalidArgument, "mean sweep: no sweeps");
  SweepResult out;
  const double n = static_cast<double>(sweeps.size());
  for (const auto& s : sweeps) {
    if (s.per_k.size() != sweeps.front().per_k.size()) {
      throw Error(ErrorCode::kInvalidArgument, "mean sweep: sweeps use different k levels");
    }
    for (const auto& [name, v] : s.baseline) out.baseline[name] += v / n;
    for (const auto& [k, deltas] : s.per_k)
      for (const auto& [name, d] : deltas) out.per_k[k][name] += d / n;
  }
  return out;
}

MetricEvaluator make_structure_evaluator(PredictionFile ref_preds, std::shared_ptr<const KeypointPredictor> predictor,
                                         OksParams params) {
  return {"R_s", [ref = std::move(ref_preds), predictor = std::move(predictor), params = std::move(params)](
                     const EvalItem&, const ImageRecord& sketch) {
            return structure_recognizability(ref, predictor->predict(sketch, ref), params).r_s;
          }};
}

MetricEvaluator make_pixel_similarity_evaluator() {
  return {"pixel_similarity", [](const EvalItem& item, const ImageRecord& sketch) {
            if (!item.ref) throw Error(ErrorCode::kInvalidArgument, "pixel similarity: item has no reference");
            const auto& ref = *item.ref;
            if (ref.width != sketch.width || ref.height != sketch.height) {
              throw Error(ErrorCode::kDimMismatch, "pixel similarity: reference and sketch sizes differ");
            }
            std::uint64_t total = 0;
            for (std::size_t i = 0; i < ref.size(); ++i) {
              total += static_cast<std::uint64_t>(std::abs(int{ref.pixels[i]} - int{sketch.pixels[i]}));
            }
            return 1.0 - static_cast<double>(total) / (255.0 * static_cast<double>(ref.size()));
          }};
}

}  // namespace sketchref
