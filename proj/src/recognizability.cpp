#include "sketchref/recognizability.hpp"

#include <algorithm>
#include <cmath>

#include "sketchref/error.hpp"

namespace sketchref {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimMismatch, "cosine: dimensions differ (" + std::to_string(a.size()) + " vs " +
                                             std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error(ErrorCode::kDimMismatch, "cosine: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine: zero-norm vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

double cosine_similarity(const EmbeddingRecord& a, const EmbeddingRecord& b) {
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

double category_recognizability(const EmbeddingRecord& sketch_emb, const EmbeddingRecord& class_emb) {
  if (sketch_emb.kind != EmbeddingKind::kImage) {
    throw Error(ErrorCode::kKindMismatch, "sketch embedding '" + sketch_emb.key + "' is not an image embedding");
  }
  if (class_emb.kind != EmbeddingKind::kText) {
    throw Error(ErrorCode::kKindMismatch, "class embedding '" + class_emb.key + "' is not a text embedding");
  }
  return cosine_similarity(sketch_emb, class_emb);
}

std::string_view to_string(VisibilityRule r) {
  return r == VisibilityRule::kGtVisibleOnly ? "gt_visible_only" : "all_points";
}

VisibilityRule parse_visibility_rule(std::string_view s) {
  if (s == "gt_visible_only") return VisibilityRule::kGtVisibleOnly;
  if (s == "all_points") return VisibilityRule::kAllPoints;
  throw Error(ErrorCode::kInvalidArgument, "unknown visibility rule '" + std::string(s) + "'");
}

double oks_single_target(const TargetKeypoints& gt, const TargetKeypoints& pred, const OksParams& params) {
  const auto& schema = params.schema;
  if (gt.points.size() != schema.point_count || pred.points.size() != schema.point_count) {
    throw Error(ErrorCode::kSchemaMismatch, "OKS: target point count does not match schema " + schema.name);
  }
  if (schema.sigmas.size() != schema.point_count) {
    throw Error(ErrorCode::kValidation, "OKS: schema " + schema.name + " sigma count != point count");
  }
  const double area = gt.area();
  if (!(area > 0.0)) throw Error(ErrorCode::kDegenerate, "OKS: reference box has zero area");

  const bool use_vis = params.visibility_rule == VisibilityRule::kGtVisibleOnly;
  if (use_vis && !gt.visibility) {
    throw Error(ErrorCode::kValidation, "OKS: gt_visible_only requires visibility flags on the reference target");
  }

  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < schema.point_count; ++i) {
    if (use_vis && (*gt.visibility)[i] == 0) continue;
    const double dx = gt.points[i].x - pred.points[i].x;
    const double dy = gt.points[i].y - pred.points[i].y;
    const double k = schema.sigmas[i];
    sum += std::exp(-(dx * dx + dy * dy) / (2.0 * area * k * k));
    ++counted;
  }
  if (counted == 0) throw Error(ErrorCode::kDegenerate, "OKS: no keypoints pass the visibility rule");
  return sum / static_cast<double>(counted);
}

StructureScore structure_recognizability(const PredictionFile& ref_preds, const PredictionFile& sketch_preds,
                                         const OksParams& params) {
  const std::size_t n = ref_preds.targets.size();
  if (n == 0) throw Error(ErrorCode::kNoTargets, "no detected targets in reference predictions");
  if (sketch_preds.targets.size() != n) {
    throw Error(ErrorCode::kPairing, "reference has " + std::to_string(n) + " targets but sketch has " +
                                         std::to_string(sketch_preds.targets.size()));
  }
  StructureScore score;
  score.n_targets = n;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double oks = oks_single_target(ref_preds.targets[i], sketch_preds.targets[i], params);
    score.per_target.emplace_back(i, oks);
    sum += oks;
  }
  score.r_s = sum / static_cast<double>(n);
  return score;
}

Json structure_score_to_json(const StructureScore& s) {
  Json per = Json::array();
  for (const auto& [idx, oks] : s.per_target) per.push_back({{"index", idx}, {"oks", oks}});
  return Json{{"r_s", s.r_s}, {"n_targets", s.n_targets}, {"per_target", std::move(per)}};
}

}  // namespace sketchref
