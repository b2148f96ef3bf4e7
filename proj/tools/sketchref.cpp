// sketchref: command-line front end for the sketch evaluation engine.
//
// Exit codes: 0 success, 1 some items failed (see errors.jsonl), 2 invalid
// invocation or inputs.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sketchref/aggregation.hpp"
#include "sketchref/complexity.hpp"
#include "sketchref/core.hpp"
#include "sketchref/erasure.hpp"
#include "sketchref/error.hpp"
#include "sketchref/humanstudy.hpp"
#include "sketchref/recognizability.hpp"
#include "sketchref/runner.hpp"
#include "sketchref/synthetic.hpp"

namespace {

using namespace sketchref;

constexpr int kExitOk = 0;
constexpr int kExitItemFailures = 1;
constexpr int kExitInvalid = 2;

struct GlobalOptions {
  std::string config;
  std::size_t jobs = 0;  // 0: not given
  std::string out;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

void emit_json(const Json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  for (double v : parse_number_list(text)) {
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error(ErrorCode::kInvalidArgument, "k levels must be non-negative integers");
    }
    ks.push_back(static_cast<std::size_t>(v));
  }
  return ks;
}

TargetKeypoints merge_targets(const PredictionFile& preds) {
  TargetKeypoints all;
  for (const auto& t : preds.targets) all.points.insert(all.points.end(), t.points.begin(), t.points.end());
  if (!preds.targets.empty()) all.bbox = preds.targets.front().bbox;
  return all;
}

// ---- evaluate -------------------------------------------------------------------

struct EvaluateArgs {
  std::string manifest, predictions, embeddings, method, alphas, visibility, schemas;
};

int cmd_evaluate(const EvaluateArgs& a, const GlobalOptions& g) {
  EvalConfig config;
  if (!g.config.empty()) config = EvalConfig::from_json(read_json_file(g.config));
  if (!a.manifest.empty()) config.manifest_path = a.manifest;
  if (!a.predictions.empty()) config.predictions_dir = a.predictions;
  if (!a.embeddings.empty()) config.embeddings_dir = a.embeddings;
  if (!a.method.empty()) config.complexity_method = a.method;
  if (!a.alphas.empty()) config.alphas = parse_number_list(a.alphas);
  if (!a.visibility.empty()) config.visibility_rule = a.visibility;
  if (!a.schemas.empty()) config.schema_overrides = a.schemas;
  if (g.jobs > 0) config.jobs = g.jobs;
  if (!g.out.empty()) config.out_dir = g.out;
  if (config.out_dir.empty()) config.out_dir = "sketchref_out";

  const EvalOutcome outcome = run_evaluate(config);
  write_outcome(outcome, config.out_dir);
  std::cerr << "evaluated " << outcome.records.size() << " items, " << outcome.ledger.size() << " failed -> "
            << config.out_dir.string() << "\n";
  for (const auto& e : outcome.ledger) std::cerr << "  " << e.item_id << " [" << e.code << "] " << e.message << "\n";
  return outcome.exit_code() == 0 ? kExitOk : kExitItemFailures;
}

// ---- report ---------------------------------------------------------------------

int cmd_report(const std::string& metrics, const std::string& alphas, const std::string& format,
               const GlobalOptions& g) {
  const auto records = load_metrics_jsonl(metrics);
  const BenchmarkReport report = build_report(records, parse_number_list(alphas));
  if (format == "json") {
    emit_json(report_to_json(report), g.out);
  } else if (format == "csv") {
    emit(render_csv(report), g.out);
  } else {
    emit(render_markdown(report), g.out);
  }
  return kExitOk;
}

// ---- single-shot metrics ----------------------------------------------------------

int cmd_complexity(const std::string& image, const std::string& method, const GlobalOptions& g) {
  const auto m = ComplexityMethod::parse(method);
  const double v = complexity(load_image(image, image), m);
  emit_json(Json{{"method", m.name()}, {"value", v}}, g.out);
  return kExitOk;
}

int cmd_sr(const std::string& ref, const std::string& sketch, const std::string& method, const GlobalOptions& g) {
  const auto r = simplicity_ratio(load_image(ref, "ref"), load_image(sketch, "sketch"), ComplexityMethod::parse(method));
  emit_json(Json{{"method", r.method}, {"sr", r.sr}, {"c_ref", r.c_ref}, {"c_sketch", r.c_sketch}}, g.out);
  return kExitOk;
}

int cmd_oks(const std::string& ref, const std::string& sketch, const std::string& schema_name,
            const std::string& visibility, const std::string& schemas, const GlobalOptions& g) {
  const SchemaRegistry reg = schemas.empty() ? SchemaRegistry() : SchemaRegistry::from_file(schemas);
  const std::string name = schema_name.empty() ? read_json_file(ref).value("schema", std::string()) : schema_name;
  const KeypointSchema& schema = reg.get(name);
  const auto ref_preds = load_predictions(ref, schema);
  const auto sketch_preds = load_predictions(sketch, schema);
  const auto score = structure_recognizability(ref_preds, sketch_preds, resolve_oks_params(ref_preds, schema, visibility));
  emit_json(structure_score_to_json(score), g.out);
  return kExitOk;
}

int cmd_rc(const std::string& sketch_emb, const std::string& class_emb, const GlobalOptions& g) {
  const double v = category_recognizability(load_embedding(sketch_emb), load_embedding(class_emb));
  emit_json(Json{{"r_c", v}}, g.out);
  return kExitOk;
}

int cmd_correlate(const std::string& metric, const std::string& human, std::size_t min_responses,
                  const GlobalOptions& g) {
  const auto r = correlate(load_score_csv(metric), load_human_scores(human, min_responses));
  emit_json(Json{{"rho", r.rho}, {"tau", r.tau}, {"n", r.n}}, g.out);
  return kExitOk;
}

// ---- erasure --------------------------------------------------------------------

struct EraseArgs {
  std::string sketch, keypoints, schema;
  std::size_t count = 0;
  std::uint64_t seed = 42;
  int size = 10;
  int fill = 255;
};

int cmd_erase(const EraseArgs& a, const GlobalOptions& g) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "erase: --out is required");
  if (a.fill < 0 || a.fill > 255) throw Error(ErrorCode::kInvalidArgument, "erase: --fill must be in [0, 255]");
  std::string schema_name = a.schema;
  if (schema_name.empty()) schema_name = read_json_file(a.keypoints).value("schema", std::string());
  const auto preds = load_predictions(a.keypoints, builtin_schema(schema_name));
  const ImageRecord sketch = load_image(a.sketch, "sketch");
  ErasureSpec spec{a.size, a.count, a.seed, static_cast<std::uint8_t>(a.fill)};
  save_png(erase_regions(sketch, merge_targets(preds), spec), g.out);
  return kExitOk;
}

struct SweepArgs {
  std::string manifest, predictions, ks = "0,1,2,3,4,5", csv, emit_dir, schemas, visibility = "auto";
  std::uint64_t seed = 42;
  int size = 10;
};

int cmd_erase_sweep(const SweepArgs& a, const GlobalOptions& g) {
  if (g.out.empty()) throw Error(ErrorCode::kInvalidArgument, "erase-sweep: --out is required");
  const auto ks = parse_ks(a.ks);
  const auto items = load_manifest(a.manifest);
  const SchemaRegistry reg = a.schemas.empty() ? SchemaRegistry() : SchemaRegistry::from_file(a.schemas);
  auto predictor = std::make_shared<const synthetic::MockJointPredictor>();

  std::vector<SweepResult> sweeps;
  Json per_item = Json::array();
  Json failures = Json::array();
  for (const auto& item : items) {
    if (item.task != Task::kStructure) continue;
    try {
      const KeypointSchema& schema = reg.for_domain(item.domain);
      const auto ref_preds = load_predictions(ref_predictions_path(a.predictions, item.id), schema);
      const std::vector<MetricEvaluator> metrics = {
          make_structure_evaluator(ref_preds, predictor, resolve_oks_params(ref_preds, schema, a.visibility)),
          make_pixel_similarity_evaluator()};
      ErasureSpec spec{a.size, 0, a.seed, 255};
      const TargetKeypoints kps = merge_targets(ref_preds);
      SweepResult r = erasure_sweep(item, kps, ks, metrics, spec);
      if (!a.emit_dir.empty()) {
        for (std::size_t k : ks) {
          spec.count = k;
          std::filesystem::create_directories(a.emit_dir);
          save_png(erase_regions(*item.sketch, kps, spec),
                   std::filesystem::path(a.emit_dir) / (item.id + ".k" + std::to_string(k) + ".png"));
        }
      }
      Json j = sweep_to_json(r);
      j["item_id"] = item.id;
      per_item.push_back(std::move(j));
      sweeps.push_back(std::move(r));
    } catch (const Error& e) {
      failures.push_back({{"item_id", item.id}, {"code", to_string(e.code())}, {"message", e.what()}});
    }
  }
  if (sweeps.empty()) throw Error(ErrorCode::kInvalidArgument, "erase-sweep: no Structure item could be swept");
  const SweepResult mean = mean_sweep(sweeps);
  Json out = sweep_to_json(mean);
  out["seed"] = a.seed;
  out["region_size"] = a.size;
  out["n_items"] = sweeps.size();
  out["items"] = std::move(per_item);
  out["errors"] = failures;
  write_text_file(g.out, out.dump(2) + "\n");
  if (!a.csv.empty()) write_text_file(a.csv, sweep_to_csv(mean));
  return failures.empty() ? kExitOk : kExitItemFailures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sketchref: recognizability / simplicity evaluation for synthesized sketches"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON configuration file (evaluate)");
  app.add_option("--jobs", g.jobs, "Worker count")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (file or directory depending on command)");

  int rc = kExitOk;
  std::function<int()> action;

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score every manifest item and build the benchmark report");
  evaluate->add_option("--manifest", ev.manifest, "Manifest JSON");
  evaluate->add_option("--predictions", ev.predictions, "Directory with <id>.ref.json / <id>.sketch.json");
  evaluate->add_option("--embeddings", ev.embeddings, "Directory with <id>.sketch.json / class.<label>.json");
  evaluate->add_option("--method", ev.method, "Complexity method for SR");
  evaluate->add_option("--alphas", ev.alphas, "Comma-separated simplification thresholds");
  evaluate->add_option("--visibility", ev.visibility, "auto | all_points | gt_visible_only");
  evaluate->add_option("--schemas", ev.schemas, "Keypoint sigma override JSON");
  evaluate->callback([&] { action = [&] { return cmd_evaluate(ev, g); }; });

  std::string metrics, alphas = "0,1.5", format = "md";
  auto* report = app.add_subcommand("report", "Render mRS@alpha tables from a metrics file");
  report->add_option("--metrics", metrics, "metrics.jsonl")->required();
  report->add_option("--alphas", alphas, "Comma-separated thresholds");
  report->add_option("--format", format, "md | csv | json")->check(CLI::IsMember({"md", "csv", "json"}));
  report->callback([&] { action = [&] { return cmd_report(metrics, alphas, format, g); }; });

  std::string image, method = "compression_ratio";
  auto* cx = app.add_subcommand("complexity", "Complexity C(image)");
  cx->add_option("--image", image)->required();
  cx->add_option("--method", method);
  cx->callback([&] { action = [&] { return cmd_complexity(image, method, g); }; });

  std::string ref, sketch;
  auto* sr = app.add_subcommand("sr", "Simplicity ratio C(ref) / C(sketch)");
  sr->add_option("--ref", ref)->required();
  sr->add_option("--sketch", sketch)->required();
  sr->add_option("--method", method);
  sr->callback([&] { action = [&] { return cmd_sr(ref, sketch, method, g); }; });

  std::string ref_kpts, sketch_kpts, schema, visibility = "auto", schemas;
  auto* oks = app.add_subcommand("oks", "Structure-level recognizability from two keypoint files");
  oks->add_option("--ref-kpts", ref_kpts)->required();
  oks->add_option("--sketch-kpts", sketch_kpts)->required();
  oks->add_option("--schema", schema, "Defaults to the schema declared in the reference file");
  oks->add_option("--visibility", visibility, "auto | all_points | gt_visible_only");
  oks->add_option("--schemas", schemas, "Keypoint sigma override JSON");
  oks->callback([&] { action = [&] { return cmd_oks(ref_kpts, sketch_kpts, schema, visibility, schemas, g); }; });

  std::string sketch_emb, class_emb;
  auto* rcmd = app.add_subcommand("rc", "Category-level recognizability from two embedding files");
  rcmd->add_option("--sketch-emb", sketch_emb)->required();
  rcmd->add_option("--class-emb", class_emb)->required();
  rcmd->callback([&] { action = [&] { return cmd_rc(sketch_emb, class_emb, g); }; });

  std::string metric_csv, human_csv;
  std::size_t min_responses = 3;
  auto* corr = app.add_subcommand("correlate", "Spearman rho / Kendall tau between metric and human scores");
  corr->add_option("--metric", metric_csv, "CSV sketch_id,score")->required();
  corr->add_option("--human", human_csv, "CSV sketch_id,score or sketch_id,mode,value")->required();
  corr->add_option("--min-responses", min_responses);
  corr->callback([&] { action = [&] { return cmd_correlate(metric_csv, human_csv, min_responses, g); }; });

  EraseArgs er;
  auto* erase = app.add_subcommand("erase", "Erase seeded regions around keypoints");
  erase->add_option("--sketch", er.sketch)->required();
  erase->add_option("--keypoints", er.keypoints, "Prediction file")->required();
  erase->add_option("--count", er.count)->required();
  erase->add_option("--seed", er.seed);
  erase->add_option("--size", er.size);
  erase->add_option("--fill", er.fill);
  erase->add_option("--schema", er.schema, "Defaults to the schema declared in the file");
  erase->callback([&] { action = [&] { return cmd_erase(er, g); }; });

  SweepArgs sw;
  auto* sweep = app.add_subcommand("erase-sweep", "Metric deltas as essential regions are erased");
  sweep->add_option("--manifest", sw.manifest)->required();
  sweep->add_option("--predictions", sw.predictions, "Directory with <id>.ref.json")->required();
  sweep->add_option("--ks", sw.ks);
  sweep->add_option("--seed", sw.seed);
  sweep->add_option("--size", sw.size);
  sweep->add_option("--csv", sw.csv, "Plot data: k,metric,delta");
  sweep->add_option("--emit-dir", sw.emit_dir, "Write erased sketches here");
  sweep->add_option("--visibility", sw.visibility);
  sweep->add_option("--schemas", sw.schemas);
  sweep->callback([&] { action = [&] { return cmd_erase_sweep(sw, g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    rc = action ? action() : kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return rc;
}
