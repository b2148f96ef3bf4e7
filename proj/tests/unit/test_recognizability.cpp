#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sketchref/error.hpp"
#include "sketchref/recognizability.hpp"
#include "test_util.hpp"

using namespace sketchref;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sketchref::Error");
  return ErrorCode::kInvalidArgument;
}

EmbeddingRecord emb(std::vector<double> v, EmbeddingKind kind = EmbeddingKind::kImage) {
  return EmbeddingRecord{"k", kind, "m", std::move(v)};
}

TargetKeypoints target_at(const KeypointSchema& s, double x0, double y0, double w = 100, double h = 100) {
  TargetKeypoints t;
  t.bbox = {x0, y0, w, h};
  for (std::size_t i = 0; i < s.point_count; ++i) t.points.push_back({x0 + 3.0 * i, y0 + 2.0 * i, 1.0});
  return t;
}

}  // namespace

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(emb({0.3, -0.2, 0.9}), emb({0.3, -0.2, 0.9})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(emb({1, 0}), emb({0, 1})) == 0.0);
  CHECK(std::abs(cosine_similarity(emb({1, 0}), emb({1, 1})) - std::sqrt(2.0) / 2.0) < 1e-12);
  CHECK(cosine_similarity(emb({1, 0}), emb({-2, 0})) == -1.0);
  CHECK(code_of([] { cosine_similarity(emb({1, 0}), emb({1, 0, 0})); }) == ErrorCode::kDimMismatch);
  CHECK(code_of([] { cosine_similarity(emb({1, 0}), emb({0, 0})); }) == ErrorCode::kZeroVector);
}

TEST_CASE("category recognizability") {
  const auto text = emb({0.5, 0.1, -0.3}, EmbeddingKind::kText);
  CHECK(category_recognizability(emb({0.5, 0.1, -0.3}), text) == doctest::Approx(1.0));
  CHECK(code_of([&] { category_recognizability(text, text); }) == ErrorCode::kKindMismatch);
  CHECK(code_of([&] { category_recognizability(emb({1, 2, 3}), emb({1, 2, 3})); }) == ErrorCode::kKindMismatch);

  // bundled fixture embeddings vs a scalar-loop oracle
  const auto dir = testing::fixture_dir() / "embeddings";
  for (const auto& [item, label] : {std::pair{"a101", "dog"}, {"t001", "bag"}, {"t002", "car"}}) {
    const auto s = load_embedding(dir / (std::string(item) + ".sketch.json"));
    const auto c = load_embedding(dir / ("class." + std::string(label) + ".json"));
    CHECK(std::abs(category_recognizability(s, c) - oracle::dot_cosine(s.values, c.values)) < 1e-9);
  }
}

TEST_CASE("oks_single_target analytics") {
  const auto coco = builtin_schema("coco17");
  const OksParams all{coco, VisibilityRule::kAllPoints};
  const TargetKeypoints gt = target_at(coco, 10, 20, 80, 120);

  CHECK(oks_single_target(gt, gt, all) == 1.0);

  SUBCASE("single counted point at d^2 = 2 s^2 k^2 gives e^-1") {
    TargetKeypoints g = gt;
    g.visibility = std::vector<int>(17, 0);
    (*g.visibility)[5] = 2;
    TargetKeypoints pred = g;
    const double d = std::sqrt(2.0 * g.area()) * coco.sigmas[5];
    pred.points[5].x += d * 0.6;
    pred.points[5].y += d * 0.8;
    const double v = oks_single_target(g, pred, {coco, VisibilityRule::kGtVisibleOnly});
    CHECK(std::abs(v - 0.36787944117144233) < 1e-9);
  }
  SUBCASE("all reference points invisible") {
    TargetKeypoints g = gt;
    g.visibility = std::vector<int>(17, 0);
    CHECK(code_of([&] { oks_single_target(g, g, {coco, VisibilityRule::kGtVisibleOnly}); }) ==
          ErrorCode::kDegenerate);
    // all_points ignores the flags
    CHECK(oks_single_target(g, g, all) == 1.0);
  }
  SUBCASE("gt_visible_only without flags") {
    CHECK(code_of([&] { oks_single_target(gt, gt, {coco, VisibilityRule::kGtVisibleOnly}); }) ==
          ErrorCode::kValidation);
  }
  SUBCASE("point-count mismatch") {
    TargetKeypoints short_pred = gt;
    short_pred.points.pop_back();
    CHECK(code_of([&] { oks_single_target(gt, short_pred, all); }) == ErrorCode::kSchemaMismatch);
  }
}

TEST_CASE("property: OKS is monotone, translation invariant and bounded") {
  std::mt19937_64 gen(17);
  const auto schema = builtin_schema("animal20");
  const OksParams params{schema, VisibilityRule::kAllPoints};
  for (int trial = 0; trial < 100; ++trial) {
    TargetKeypoints gt = target_at(schema, testing::uniform(gen, 0, 50), testing::uniform(gen, 0, 50),
                                   testing::uniform(gen, 10, 150), testing::uniform(gen, 10, 150));
    TargetKeypoints pred = gt;
    for (auto& p : pred.points) {
      p.x += testing::uniform(gen, -8, 8);
      p.y += testing::uniform(gen, -8, 8);
    }
    const double base = oks_single_target(gt, pred, params);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);

    // translation
    const double tx = testing::uniform(gen, -40, 40), ty = testing::uniform(gen, -40, 40);
    TargetKeypoints gt2 = gt, pred2 = pred;
    gt2.bbox[0] += tx;
    gt2.bbox[1] += ty;
    for (auto* t : {&gt2, &pred2})
      for (auto& p : t->points) {
        p.x += tx;
        p.y += ty;
      }
    CHECK(std::abs(oks_single_target(gt2, pred2, params) - base) < 1e-9);

    // pushing one point farther never helps
    const std::size_t i = gen() % schema.point_count;
    const double ux = pred.points[i].x - gt.points[i].x, uy = pred.points[i].y - gt.points[i].y;
    double prev = base;
    for (int step = 1; step <= 10; ++step) {
      TargetKeypoints far = pred;
      far.points[i].x = gt.points[i].x + ux * (1.0 + step);
      far.points[i].y = gt.points[i].y + uy * (1.0 + step);
      const double v = oks_single_target(gt, far, params);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("structure recognizability") {
  const auto coco = builtin_schema("coco17");
  const OksParams params{coco, VisibilityRule::kAllPoints};
  const TargetKeypoints a = target_at(coco, 0, 0, 100, 100);
  const TargetKeypoints b = target_at(coco, 120, 0, 100, 100);

  SUBCASE("identical predictions") {
    const PredictionFile ref{"r", "coco17", {a, b}};
    const auto s = structure_recognizability(ref, ref, params);
    CHECK(s.r_s == 1.0);
    CHECK(s.n_targets == 2);
    CHECK(s.per_target.size() == 2);
  }
  SUBCASE("mean of per-target values 1.0 and 0.5") {
    // Displace every point of the second target so each term equals 0.5:
    // d^2 = 2 s^2 k^2 ln 2.
    TargetKeypoints moved = b;
    for (std::size_t i = 0; i < coco.point_count; ++i) {
      moved.points[i].x += std::sqrt(2.0 * b.area() * std::log(2.0)) * coco.sigmas[i];
    }
    const PredictionFile ref{"r", "coco17", {a, b}};
    const PredictionFile sk{"s", "coco17", {a, moved}};
    const auto s = structure_recognizability(ref, sk, params);
    CHECK(std::abs(s.per_target[1].second - 0.5) < 1e-12);
    CHECK(std::abs(s.r_s - 0.75) < 1e-12);
  }
  SUBCASE("target count mismatch") {
    const PredictionFile ref{"r", "coco17", {a, b}};
    const PredictionFile sk{"s", "coco17", {a}};
    CHECK(code_of([&] { structure_recognizability(ref, sk, params); }) == ErrorCode::kPairing);
  }
  SUBCASE("no detected targets") {
    const PredictionFile empty{"r", "coco17", {}};
    CHECK(code_of([&] { structure_recognizability(empty, empty, params); }) == ErrorCode::kNoTargets);
  }
}

TEST_CASE("property: structure score matches oracle and is permutation covariant") {
  std::mt19937_64 gen(23);
  const auto schema = builtin_schema("animal20");
  const OksParams params{schema, VisibilityRule::kAllPoints};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 5;
    PredictionFile ref{"r", "animal20", {}}, sk{"s", "animal20", {}};
    for (std::size_t t = 0; t < n; ++t) {
      TargetKeypoints g = target_at(schema, testing::uniform(gen, 0, 100), testing::uniform(gen, 0, 100),
                                    testing::uniform(gen, 5, 120), testing::uniform(gen, 5, 120));
      TargetKeypoints p = g;
      for (auto& pt : p.points) {
        pt.x += testing::uniform(gen, -10, 10);
        pt.y += testing::uniform(gen, -10, 10);
      }
      ref.targets.push_back(g);
      sk.targets.push_back(p);
    }
    const auto s = structure_recognizability(ref, sk, params);
    double sum = 0.0;
    for (const auto& [i, v] : s.per_target) sum += v;
    CHECK(std::abs(s.r_s - sum / static_cast<double>(n)) < 1e-12);
    CHECK(s.r_s >= 0.0);
    CHECK(s.r_s <= 1.0);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    PredictionFile ref2{"r", "animal20", {}}, sk2{"s", "animal20", {}};
    for (std::size_t i : perm) {
      ref2.targets.push_back(ref.targets[i]);
      sk2.targets.push_back(sk.targets[i]);
    }
    CHECK(std::abs(structure_recognizability(ref2, sk2, params).r_s - s.r_s) < 1e-12);
  }
}

TEST_CASE("structure score JSON shape") {
  StructureScore s{0.75, {{0, 1.0}, {1, 0.5}}, 2};
  const Json j = structure_score_to_json(s);
  CHECK(j["r_s"] == 0.75);
  CHECK(j["n_targets"] == 2);
  CHECK(j["per_target"][1]["oks"] == 0.5);
}
