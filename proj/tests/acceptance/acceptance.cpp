// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Tolerances are fixed here and never relaxed at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numeric>
#include <random>
#include <string>

#include "oracles.hpp"
#include "sketchref/aggregation.hpp"
#include "sketchref/complexity.hpp"
#include "sketchref/erasure.hpp"
#include "sketchref/humanstudy.hpp"
#include "sketchref/recognizability.hpp"
#include "sketchref/runner.hpp"
#include "sketchref/synthetic.hpp"
#include "test_util.hpp"

using namespace sketchref;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the first failure reason of a criterion.
struct Check {
  std::string why;
  void expect(bool ok, const std::string& what) {
    if (!ok && why.empty()) why = what;
  }
  bool ok() const { return why.empty(); }
};

int failures = 0;

void report(const char* id, const char* title, const Check& c, const std::string& detail) {
  std::printf("%s %s: %s (%s)\n", c.ok() ? "PASS" : "FAIL", id, title, c.ok() ? detail.c_str() : c.why.c_str());
  if (!c.ok()) ++failures;
}

template <class Fn>
void run(const char* id, const char* title, Fn&& fn) {
  Check c;
  std::string detail;
  try {
    detail = fn(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  report(id, title, c, detail);
}

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

TargetKeypoints random_target(std::mt19937_64& gen, std::size_t points, bool with_vis) {
  TargetKeypoints t;
  const double x0 = testing::uniform(gen, 0, 300), y0 = testing::uniform(gen, 0, 300);
  t.bbox = {x0, y0, testing::uniform(gen, 4, 200), testing::uniform(gen, 4, 200)};
  for (std::size_t i = 0; i < points; ++i) {
    t.points.push_back({x0 + testing::uniform(gen, 0, t.bbox[2]), y0 + testing::uniform(gen, 0, t.bbox[3]), 1.0});
  }
  if (with_vis) {
    t.visibility.emplace();
    for (std::size_t i = 0; i < points; ++i) t.visibility->push_back(static_cast<int>(gen() % 3));
    (*t.visibility)[gen() % points] = 2;  // keep at least one counted point
  }
  return t;
}

std::string p1(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    KeypointSchema schema{"rand", 1 + gen() % 20, {}};
    for (std::size_t i = 0; i < schema.point_count; ++i) schema.sigmas.push_back(testing::uniform(gen, 0.02, 0.2));
    const bool with_vis = gen() % 2 == 0;
    const auto rule = with_vis ? VisibilityRule::kGtVisibleOnly : VisibilityRule::kAllPoints;
    const std::size_t n = 1 + gen() % 5;

    PredictionFile ref{"r", schema.name, {}}, sk{"s", schema.name, {}};
    double oracle_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      TargetKeypoints g = random_target(gen, schema.point_count, with_vis);
      TargetKeypoints p = g;
      p.visibility.reset();
      for (auto& pt : p.points) {
        pt.x += testing::uniform(gen, -15, 15);
        pt.y += testing::uniform(gen, -15, 15);
      }
      std::vector<oracle::Pt> gp, pp;
      std::vector<bool> counted;
      for (std::size_t i = 0; i < schema.point_count; ++i) {
        gp.push_back({g.points[i].x, g.points[i].y});
        pp.push_back({p.points[i].x, p.points[i].y});
        counted.push_back(!with_vis || (*g.visibility)[i] > 0);
      }
      oracle_sum += oracle::oks(gp, pp, g.bbox[2], g.bbox[3], schema.sigmas, counted);
      ref.targets.push_back(std::move(g));
      sk.targets.push_back(std::move(p));
    }
    const double got = structure_recognizability(ref, sk, {schema, rule}).r_s;
    const double err = std::abs(got - oracle_sum / static_cast<double>(n));
    worst = std::max(worst, err);
    c.expect(err <= 1e-9, "instance " + std::to_string(inst) + " differs by " + fmt("%.3g", err));
  }
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, fmt("runtime %.3f s >= 1 s", dt));
  return fmt("100 instances, max |diff| %.3g", worst) + fmt(", %.3f s", dt);
}

std::string p2(Check& c) {
  const auto coco = builtin_schema("coco17");
  TargetKeypoints g;
  g.bbox = {40, 30, 90, 160};
  for (int i = 0; i < 17; ++i) g.points.push_back({50.0 + 4 * i, 40.0 + 9 * i, 1.0});
  const OksParams all{coco, VisibilityRule::kAllPoints};
  const double identity = oks_single_target(g, g, all);
  c.expect(identity == 1.0, fmt("identity gave %.17g", identity));

  TargetKeypoints gv = g;
  gv.visibility = std::vector<int>(17, 0);
  (*gv.visibility)[9] = 2;
  TargetKeypoints moved = gv;
  const double d = std::sqrt(2.0 * gv.area()) * coco.sigmas[9];
  moved.points[9].x += d;
  const double e1 = oks_single_target(gv, moved, {coco, VisibilityRule::kGtVisibleOnly});
  c.expect(std::abs(e1 - std::exp(-1.0)) <= 1e-9, fmt("d^2 = 2 s^2 k^2 gave %.17g", e1));

  double prev = 1.0;
  for (int step = 1; step <= 50; ++step) {
    TargetKeypoints p = g;
    for (auto& pt : p.points) {
      pt.x += 0.7 * step;
      pt.y -= 0.4 * step;
    }
    const double v = oks_single_target(g, p, all);
    c.expect(v <= prev, "sweep increased at step " + std::to_string(step));
    prev = v;
  }
  return fmt("e^-1 case %.15f", e1);
}

std::string p3(Check& c) {
  std::mt19937_64 gen(31337);
  const double alphas[] = {0.0, 0.5, 1.0, 1.5, 2.0};
  for (int set = 0; set < 1000; ++set) {
    std::vector<MetricRecord> rs;
    const std::size_t n = 1 + gen() % 50;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = testing::uniform(gen, 0, 1);
      rs.push_back({"i" + std::to_string(i), "m", Domain::kHuman, Task::kStructure, r,
                    testing::uniform(gen, 0.01, 3.0), "compression_ratio"});
      mean += r;
    }
    mean /= static_cast<double>(n);
    double prev = 2.0;
    for (double a : alphas) {
      const double v = mrs_at_alpha(rs, a);
      c.expect(v <= prev, "set " + std::to_string(set) + " not monotone");
      prev = v;
    }
    c.expect(std::abs(mrs_at_alpha(rs, 0.0) - mean) <= 1e-12, "set " + std::to_string(set) + ": mRS@0 != mean(r)");
  }
  std::vector<MetricRecord> above;
  for (int i = 0; i < 20; ++i) {
    above.push_back({"x" + std::to_string(i), "m", Domain::kHuman, Task::kStructure, 0.8 + 0.005 * i,
                     1.5 + 0.1 * (i + 1), "compression_ratio"});
  }
  const double a0 = mrs_at_alpha(above, 0.0), a15 = mrs_at_alpha(above, 1.5);
  c.expect(a0 == a15, "all sr > 1.5 but mRS@1.5 != mRS@0");
  return fmt("1000 sets; flat case %.4f at both thresholds", 100.0 * a0);
}

std::string p4(Check& c) {
  const auto t0 = Clock::now();
  std::vector<double> base(6);
  std::iota(base.begin(), base.end(), 1.0);
  std::vector<double> perm = base;
  int count = 0;
  do {
    ++count;
    const double rho = spearman_rho(base, perm), tau = kendall_tau(base, perm);
    c.expect(std::abs(rho - oracle::spearman_distinct(base, perm)) <= 1e-12, "spearman mismatch");
    c.expect(std::abs(tau - oracle::kendall_pairs(base, perm)) <= 1e-12, "kendall mismatch");
  } while (std::next_permutation(perm.begin(), perm.end()));
  c.expect(count == 720, "expected 720 permutations");

  const std::vector<double> x{1, 2, 3, 4, 5}, y{1, 3, 2, 5, 4};
  const double rho = spearman_rho(x, y), tau = kendall_tau(x, y);
  c.expect(std::abs(rho - 0.8) <= 1e-12, fmt("rho = %.17g", rho));
  c.expect(std::abs(tau - 0.6) <= 1e-12, fmt("tau = %.17g", tau));
  const double dt = seconds_since(t0);
  c.expect(dt < 1.0, fmt("runtime %.3f s >= 1 s", dt));
  return "720 permutations, fixture (" + fmt("%.2f", rho) + ", " + fmt("%.2f", tau) + ")" + fmt(", %.3f s", dt);
}

std::string p5(Check& c) {
  const ImageRecord a = synthetic::noise_image(96, 96, 1);
  ImageRecord b = synthetic::noise_image(96, 96, 2);
  synthetic::draw_line(b, 10, 10, 80, 70, 6, 0);
  for (const char* name : {"compression_ratio", "entropy_1d", "entropy_2d", "harris_density", "fast_density"}) {
    const auto m = ComplexityMethod::parse(name);
    const double self = simplicity_ratio(a, a, m).sr;
    c.expect(std::abs(self - 1.0) <= 1e-12, std::string(name) + fmt(": SR(a,a) = %.17g", self));
    const double prod = simplicity_ratio(a, b, m).sr * simplicity_ratio(b, a, m).sr;
    c.expect(std::abs(prod - 1.0) <= 1e-9, std::string(name) + fmt(": SR(a,b)SR(b,a) = %.17g", prod));
  }
  const ImageRecord ref = synthetic::noise_image(224, 224, 7);
  const ImageRecord white = make_image(224, 224, 255);
  const double sr = simplicity_ratio(ref, white, ComplexityMethod::parse("compression_ratio")).sr;
  c.expect(sr > 10.0, fmt("noise vs white SR = %.3f", sr));
  return fmt("noise vs white SR %.1f", sr);
}

std::string p6(Check& c) {
  const ImageRecord flat = make_image(64, 64, 137);
  c.expect(entropy_1d(flat) == 0.0, "constant entropy_1d != 0");
  c.expect(entropy_2d(flat) == 0.0, "constant entropy_2d != 0");
  c.expect(corner_density(flat, CornerDetector::kHarris) == 0.0, "constant Harris density != 0");
  c.expect(corner_density(flat, CornerDetector::kFast) == 0.0, "constant FAST density != 0");
  const double cr_flat = complexity_cr(flat);
  c.expect(cr_flat < 0.05, fmt("constant CR = %.4f", cr_flat));
  const double cr_noise = complexity_cr(synthetic::noise_image(224, 224, 3));
  c.expect(cr_noise > 0.9, fmt("noise CR = %.4f", cr_noise));
  ImageRecord half = make_image(64, 64, 0);
  for (int y = 0; y < 64; ++y)
    for (int x = 32; x < 64; ++x) half.pixels[static_cast<std::size_t>(y) * 64 + x] = 255;
  const double e = entropy_1d(half);
  c.expect(std::abs(e - 1.0) <= 1e-9, fmt("bilevel entropy_1d = %.17g", e));
  return fmt("CR flat %.4f", cr_flat) + fmt(", noise %.4f", cr_noise);
}

std::string p7(Check& c) {
  const auto t0 = Clock::now();
  const auto fig = synthetic::make_stick_figure();
  EvalItem item;
  item.id = "stick";
  item.ref = std::make_shared<ImageRecord>(fig.reference);
  item.sketch = std::make_shared<ImageRecord>(fig.sketch);
  const std::vector<MetricEvaluator> metrics{
      make_structure_evaluator(fig.ref_preds, std::make_shared<synthetic::MockJointPredictor>(),
                               {builtin_schema("coco17"), VisibilityRule::kAllPoints})};
  const std::vector<std::size_t> ks{0, 1, 2, 3, 4, 5};
  const ErasureSpec spec{10, 0, 2024, 255};
  const auto first = erasure_sweep(item, fig.ref_preds.targets.at(0), ks, metrics, spec);
  const auto second = erasure_sweep(item, fig.ref_preds.targets.at(0), ks, metrics, spec);
  double prev = 0.0;
  for (std::size_t k : ks) {
    const double d = first.per_k.at(k).at("R_s");
    c.expect(d <= prev, "delta increased at k = " + std::to_string(k));
    prev = d;
  }
  const double d5 = first.per_k.at(5).at("R_s");
  c.expect(d5 < 0.0, "delta at k = 5 is not negative");
  c.expect(sweep_to_json(first).dump() == sweep_to_json(second).dump(), "sweep JSON differs between runs");
  const double dt = seconds_since(t0);
  c.expect(dt < 10.0, fmt("runtime %.3f s >= 10 s", dt));
  return fmt("delta R_s at k=5 %.4f", d5) + fmt(", %.3f s", dt);
}

std::string p8(Check& c) {
  testing::TempDir tmp;
  const fs::path root = testing::fixture_dir();
  for (std::size_t jobs : {1u, 8u}) {
    EvalConfig cfg;
    cfg.manifest_path = root / "manifest.json";
    cfg.predictions_dir = root / "predictions";
    cfg.embeddings_dir = root / "embeddings";
    cfg.jobs = jobs;
    const auto out = run_evaluate(cfg);
    c.expect(out.records.size() == 6 && out.ledger.empty(), "mini fixture did not score all 6 items");
    write_outcome(out, tmp / ("j" + std::to_string(jobs)));
  }
  for (const char* f : {"metrics.jsonl", "errors.jsonl", "report.json", "report.md"}) {
    c.expect(testing::slurp(tmp / "j1" / f) == testing::slurp(tmp / "j8" / f), std::string(f) + " differs");
  }
  auto ranks = [](std::initializer_list<int> ps) {
    std::vector<HumanResponse> v;
    for (int p : ps) v.push_back({"s", ResponseMode::kRanking, p});
    return v;
  };
  const double all_first = average_rank_score(ranks({1, 1, 1}));
  const double mixed = average_rank_score(ranks({1, 1, 3}));
  c.expect(all_first == 5.0, fmt("all-first ARS = %.17g", all_first));
  c.expect(std::abs(mixed - 13.0 / 3.0) <= 1e-12, fmt("2x first + 1x third ARS = %.17g", mixed));
  return "jobs 1 vs 8 byte-identical; ARS " + fmt("%.1f", all_first) + fmt(" / %.12f", mixed);
}

}  // namespace

int main() {
  run("P1", "OKS oracle equivalence", p1);
  run("P2", "OKS analytics", p2);
  run("P3", "mRS law", p3);
  run("P4", "correlation oracle", p4);
  run("P5", "SR laws", p5);
  run("P6", "complexity analytics", p6);
  run("P7", "erasure sensitivity", p7);
  run("P8", "pipeline determinism", p8);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
