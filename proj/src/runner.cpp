#include "sketchref/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "sketchref/error.hpp"

namespace sketchref {

std::filesystem::path ref_predictions_path(const std::filesystem::path& dir, const std::string& item_id) {
  return dir / (item_id + ".ref.json");
}

std::filesystem::path sketch_predictions_path(const std::filesystem::path& dir, const std::string& item_id) {
  return dir / (item_id + ".sketch.json");
}

std::filesystem::path sketch_embedding_path(const std::filesystem::path& dir, const std::string& item_id) {
  return dir / (item_id + ".sketch.json");
}

std::filesystem::path class_embedding_path(const std::filesystem::path& dir, const std::string& label) {
  std::string safe = label;
  std::replace(safe.begin(), safe.end(), '/', '_');
  return dir / ("class." + safe + ".json");
}

void EvalConfig::validate() const {
  if (manifest_path.empty()) throw Error(ErrorCode::kInvalidArgument, "config: manifest path is required");
  if (alphas.empty()) throw Error(ErrorCode::kInvalidArgument, "config: at least one alpha is required");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::kInvalidArgument, "config: alphas must be >= 0");
  }
  if (jobs < 1) throw Error(ErrorCode::kInvalidArgument, "config: jobs must be >= 1");
  if (visibility_rule != "auto") parse_visibility_rule(visibility_rule);
  ComplexityMethod::parse(complexity_method).validate();
}

Json EvalConfig::to_json() const {
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return Json{{"manifest", manifest_path.string()},
              {"predictions_dir", predictions_dir.string()},
              {"embeddings_dir", embeddings_dir.string()},
              {"complexity_method", ComplexityMethod::parse(complexity_method).name()},
              {"alphas", sorted},
              {"visibility_rule", visibility_rule},
              {"schema_overrides", schema_overrides.string()}};
}

EvalConfig EvalConfig::from_json(const Json& doc) {
  const Json* j = &doc;
  if (doc.contains("metadata") && doc["metadata"].contains("config")) j = &doc["metadata"]["config"];
  if (!j->is_object()) throw Error(ErrorCode::kParse, "config must be a JSON object");
  EvalConfig c;
  try {
    c.manifest_path = j->value("manifest", std::string());
    c.predictions_dir = j->value("predictions_dir", std::string());
    c.embeddings_dir = j->value("embeddings_dir", std::string());
    c.complexity_method = j->value("complexity_method", c.complexity_method);
    if (j->contains("alphas")) c.alphas = (*j)["alphas"].get<std::vector<double>>();
    c.visibility_rule = j->value("visibility_rule", c.visibility_rule);
    c.schema_overrides = j->value("schema_overrides", std::string());
    c.jobs = j->value("jobs", c.jobs);
    c.out_dir = j->value("out", std::string());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  return c;
}

EvalContext make_context(const EvalConfig& config) {
  config.validate();
  EvalContext ctx{config, ComplexityMethod::parse(config.complexity_method), SchemaRegistry()};
  if (!config.schema_overrides.empty()) ctx.schemas = SchemaRegistry::from_file(config.schema_overrides);
  return ctx;
}

OksParams resolve_oks_params(const PredictionFile& ref_preds, const KeypointSchema& schema,
                             std::string_view visibility_rule) {
  OksParams params{schema, VisibilityRule::kAllPoints};
  if (visibility_rule == "auto") {
    const bool all_flagged = !ref_preds.targets.empty() &&
                             std::all_of(ref_preds.targets.begin(), ref_preds.targets.end(),
                                         [](const TargetKeypoints& t) { return t.visibility.has_value(); });
    params.visibility_rule = all_flagged ? VisibilityRule::kGtVisibleOnly : VisibilityRule::kAllPoints;
  } else {
    params.visibility_rule = parse_visibility_rule(visibility_rule);
  }
  return params;
}

MetricRecord evaluate_item(const EvalItem& item, const EvalContext& ctx) {
  validate_item(item);
  if (!item.ref || !item.sketch) throw Error(ErrorCode::kInvalidArgument, "item '" + item.id + "' has no images");
  MetricRecord rec;
  rec.item_id = item.id;
  rec.method = item.method;
  rec.domain = item.domain;
  rec.task = item.task;
  rec.complexity_method = ctx.complexity.name();
  rec.sr = simplicity_ratio(*item.ref, *item.sketch, ctx.complexity).sr;

  if (item.task == Task::kStructure) {
    const KeypointSchema& schema = ctx.schemas.for_domain(item.domain);
    const auto ref = load_predictions(ref_predictions_path(ctx.config.predictions_dir, item.id), schema);
    const auto sketch = load_predictions(sketch_predictions_path(ctx.config.predictions_dir, item.id), schema);
    rec.r = structure_recognizability(ref, sketch, resolve_oks_params(ref, schema, ctx.config.visibility_rule)).r_s;
  } else {
    const auto sketch_emb = load_embedding(sketch_embedding_path(ctx.config.embeddings_dir, item.id));
    const auto class_emb = load_embedding(class_embedding_path(ctx.config.embeddings_dir, item.class_label));
    rec.r = category_recognizability(sketch_emb, class_emb);
  }
  validate_record(rec);
  return rec;
}

namespace {

struct ItemResult {
  std::optional<MetricRecord> record;
  std::optional<LedgerEntry> error;
};

void check_input_dirs(const EvalConfig& config, const std::vector<EvalItem>& items) {
  const bool needs_preds = std::any_of(items.begin(), items.end(), [](const EvalItem& i) { return i.task == Task::kStructure; });
  const bool needs_embs = std::any_of(items.begin(), items.end(), [](const EvalItem& i) { return i.task == Task::kCategory; });
  if (needs_preds && !std::filesystem::is_directory(config.predictions_dir)) {
    throw Error(ErrorCode::kIo, "predictions directory '" + config.predictions_dir.string() + "' does not exist");
  }
  if (needs_embs && !std::filesystem::is_directory(config.embeddings_dir)) {
    throw Error(ErrorCode::kIo, "embeddings directory '" + config.embeddings_dir.string() + "' does not exist");
  }
}

}  // namespace

EvalOutcome run_evaluate(const EvalConfig& config) {
  config.validate();
  const auto items = load_manifest(config.manifest_path);
  return run_evaluate(config, items);
}

EvalOutcome run_evaluate(const EvalConfig& config, const std::vector<EvalItem>& items) {
  const EvalContext ctx = make_context(config);
  check_input_dirs(config, items);

  std::vector<ItemResult> results(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
      try {
        results[i].record = evaluate_item(items[i], ctx);
      } catch (const Error& e) {
        results[i].error = LedgerEntry{items[i].id, std::string(to_string(e.code())), e.what()};
      } catch (const std::exception& e) {
        results[i].error = LedgerEntry{items[i].id, "internal", e.what()};
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.jobs, items.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  EvalOutcome outcome;
  for (auto& r : results) {
    if (r.record) outcome.records.push_back(std::move(*r.record));
    if (r.error) outcome.ledger.push_back(std::move(*r.error));
  }
  std::sort(outcome.records.begin(), outcome.records.end(),
            [](const MetricRecord& a, const MetricRecord& b) { return a.item_id < b.item_id; });
  std::sort(outcome.ledger.begin(), outcome.ledger.end(),
            [](const LedgerEntry& a, const LedgerEntry& b) { return a.item_id < b.item_id; });
  if (!outcome.records.empty()) {
    Json meta = {{"config", config.to_json()}, {"n_failed", outcome.ledger.size()}};
    outcome.report = build_report(outcome.records, config.alphas, std::move(meta));
  }
  return outcome;
}

void write_outcome(const EvalOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "metrics.jsonl", records_to_jsonl(outcome.records));
  std::string ledger;
  for (const auto& e : outcome.ledger) {
    ledger += Json{{"item_id", e.item_id}, {"code", e.code}, {"message", e.message}}.dump();
    ledger += '\n';
  }
  write_text_file(dir / "errors.jsonl", ledger);
  if (outcome.report) {
    write_text_file(dir / "report.json", report_to_json(*outcome.report).dump(2) + "\n");
    write_text_file(dir / "report.md", render_markdown(*outcome.report));
  }
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorCode::kInvalidArgument, "'" + std::string(tok) + "' is not a number");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace sketchref
