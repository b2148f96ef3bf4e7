#ifndef SKETCHREF_RECOGNIZABILITY_HPP_
#define SKETCHREF_RECOGNIZABILITY_HPP_

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sketchref/core.hpp"

namespace sketchref {

double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingRecord& a, const EmbeddingRecord& b);

// Category-level recognizability: cosine between the sketch's image embedding
// and the class name's text embedding. Raw value in [-1, 1].
double category_recognizability(const EmbeddingRecord& sketch_emb, const EmbeddingRecord& class_emb);

enum class VisibilityRule {
  kGtVisibleOnly,  // skip points whose reference visibility flag is 0
  kAllPoints,
};

std::string_view to_string(VisibilityRule r);
VisibilityRule parse_visibility_rule(std::string_view s);

struct OksParams {
  KeypointSchema schema;
  VisibilityRule visibility_rule = VisibilityRule::kAllPoints;
};

// Object keypoint similarity of one target:
//   mean over counted points of exp(-d_i^2 / (2 s^2 k_i^2)),
// with s^2 the area of the reference (gt) box and k_i the schema constant.
double oks_single_target(const TargetKeypoints& gt, const TargetKeypoints& pred, const OksParams& params);

struct StructureScore {
  double r_s = 0.0;
  std::vector<std::pair<std::size_t, double>> per_target;  // (index, oks)
  std::size_t n_targets = 0;
};

// Structure-level recognizability: targets are paired by position (the i-th
// reference detection with the i-th sketch prediction) and their OKS values
// averaged.
StructureScore structure_recognizability(const PredictionFile& ref_preds, const PredictionFile& sketch_preds,
                                         const OksParams& params);

Json structure_score_to_json(const StructureScore& s);

}  // namespace sketchref

#endif  // SKETCHREF_RECOGNIZABILITY_HPP_
