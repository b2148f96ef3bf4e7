#include "sketchref/aggregation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "sketchref/error.hpp"

namespace sketchref {

void validate_record(const MetricRecord& rec) {
  const std::string where = "metric record '" + rec.item_id + "'";
  if (!std::isfinite(rec.r)) throw Error(ErrorCode::kValidation, where + ": r is not finite");
  if (!(rec.sr > 0.0) || !std::isfinite(rec.sr)) throw Error(ErrorCode::kValidation, where + ": sr must be positive");
  if (rec.task == Task::kStructure && (rec.r < 0.0 || rec.r > 1.0)) {
    throw Error(ErrorCode::kValidation, where + ": structure r must lie in [0, 1]");
  }
  if (rec.task == Task::kCategory && (rec.r < -1.0 || rec.r > 1.0)) {
    throw Error(ErrorCode::kValidation, where + ": category r must lie in [-1, 1]");
  }
}

Json record_to_json(const MetricRecord& rec) {
  return Json{{"item_id", rec.item_id}, {"method", rec.method},
              {"domain", to_string(rec.domain)}, {"task", to_string(rec.task)},
              {"r", rec.r},  {"sr", rec.sr},
              {"complexity_method", rec.complexity_method}};
}

MetricRecord record_from_json(const Json& j) {
  try {
    MetricRecord rec;
    rec.item_id = j.at("item_id").get<std::string>();
    rec.method = j.at("method").get<std::string>();
    rec.domain = parse_domain(j.at("domain").get<std::string>());
    rec.task = parse_task(j.at("task").get<std::string>());
    rec.r = j.at("r").get<double>();
    rec.sr = j.at("sr").get<double>();
    rec.complexity_method = j.value("complexity_method", std::string());
    validate_record(rec);
    return rec;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("metric record: ") + e.what());
  }
}

std::string records_to_jsonl(std::span<const MetricRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<MetricRecord> parse_metrics_jsonl(std::string_view text) {
  std::vector<MetricRecord> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(record_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParse, "metrics line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "metrics line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MetricRecord> load_metrics_jsonl(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_metrics_jsonl(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

namespace {

std::vector<const MetricRecord*> fold_order(std::span<const MetricRecord> records) {
  std::vector<const MetricRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const MetricRecord* a, const MetricRecord* b) {
    if (a->item_id != b->item_id) return a->item_id < b->item_id;
    if (a->r != b->r) return a->r < b->r;
    return a->sr < b->sr;
  });
  return order;
}

}  // namespace

double mrs_at_alpha(std::span<const MetricRecord> records, double alpha) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "mRS: empty record list");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "mRS: alpha must be >= 0");
  const auto& first = records.front();
  double sum = 0.0;
  for (const MetricRecord* rec : fold_order(records)) {
    if (rec->method != first.method || rec->task != first.task || rec->domain != first.domain) {
      throw Error(ErrorCode::kInvalidArgument, "mRS: records mix (method, task, domain) cells");
    }
    if (rec->sr > alpha) sum += rec->r;
  }
  return sum / static_cast<double>(records.size());
}

int CellKey::column() const {
  if (task == Task::kStructure) {
    switch (domain) {
      case Domain::kHuman: return 0;
      case Domain::kFace: return 1;
      case Domain::kAnimal: return 2;
      case Domain::kThings: return 5;  // not a benchmark task; sorts last
    }
  }
  return domain == Domain::kAnimal ? 3 : domain == Domain::kThings ? 4 : 6 + static_cast<int>(domain);
}

BenchmarkReport build_report(std::span<const MetricRecord> records, std::vector<double> alphas, Json metadata) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "report: no metric records");
  if (alphas.empty()) throw Error(ErrorCode::kInvalidArgument, "report: no alpha thresholds");
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::kInvalidArgument, "report: alphas must be finite and >= 0");
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  std::map<std::string, std::map<CellKey, std::vector<MetricRecord>>> groups;
  for (const auto& r : records) groups[r.method][CellKey{r.task, r.domain}].push_back(r);

  BenchmarkReport report;
  report.alphas = alphas;
  for (auto& [method, cells] : groups) {
    MethodRow row;
    row.method = method;
    for (auto& [key, recs] : cells) {
      ReportCell cell;
      cell.n = recs.size();
      for (double a : alphas) cell.mrs[a] = 100.0 * mrs_at_alpha(recs, a);
      row.cells.emplace(key, std::move(cell));
    }
    for (double a : alphas) {
      double sum = 0.0;
      for (const auto& [key, cell] : row.cells) sum += cell.mrs.at(a);
      row.average[a] = sum / static_cast<double>(row.cells.size());
    }
    report.rows.push_back(std::move(row));
  }
  const double first_alpha = alphas.front();
  std::stable_sort(report.rows.begin(), report.rows.end(), [first_alpha](const MethodRow& a, const MethodRow& b) {
    const double va = a.average.at(first_alpha), vb = b.average.at(first_alpha);
    if (va != vb) return va > vb;
    return a.method < b.method;
  });

  if (!metadata.is_object()) metadata = Json::object();
  metadata["average_weighting"] = "equal_per_task_cell";
  metadata["filter"] = "sr > alpha";
  metadata["n_records"] = records.size();
  report.metadata = std::move(metadata);
  return report;
}

std::string format_alpha(double alpha) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, alpha);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<CellKey> present_columns(const BenchmarkReport& report) {
  std::set<CellKey> cols;
  for (const auto& row : report.rows)
    for (const auto& [key, cell] : row.cells) cols.insert(key);
  return {cols.begin(), cols.end()};
}

std::string cell_text(double pct) {
  if (pct == 0.0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", pct);
  return buf;
}

}  // namespace

Json report_to_json(const BenchmarkReport& report) {
  Json alphas = Json::array();
  for (double a : report.alphas) alphas.push_back(a);
  Json columns = Json::array();
  for (const auto& key : present_columns(report)) {
    columns.push_back({{"task", to_string(key.task)}, {"domain", to_string(key.domain)}});
  }
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json cells = Json::array();
    for (const auto& [key, cell] : row.cells) {
      Json mrs = Json::object();
      for (const auto& [a, v] : cell.mrs) mrs[format_alpha(a)] = v;
      cells.push_back({{"task", to_string(key.task)}, {"domain", to_string(key.domain)}, {"n", cell.n},
                       {"mrs", std::move(mrs)}});
    }
    Json avg = Json::object();
    for (const auto& [a, v] : row.average) avg[format_alpha(a)] = v;
    rows.push_back({{"method", row.method}, {"cells", std::move(cells)}, {"average", std::move(avg)}});
  }
  return Json{{"alphas", std::move(alphas)},
              {"columns", std::move(columns)},
              {"rows", std::move(rows)},
              {"metadata", report.metadata}};
}

std::string render_markdown(const BenchmarkReport& report) {
  const auto cols = present_columns(report);
  std::ostringstream os;
  os << "| Method |";
  for (const auto& key : cols) {
    for (double a : report.alphas) {
      os << ' ' << to_string(key.domain) << " (" << (key.task == Task::kStructure ? "S" : "C") << ") @"
         << format_alpha(a) << " |";
    }
  }
  for (double a : report.alphas) os << " Average @" << format_alpha(a) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < (cols.size() + 1) * report.alphas.size(); ++i) os << "---:|";
  os << '\n';
  for (const auto& row : report.rows) {
    os << "| " << row.method << " |";
    for (const auto& key : cols) {
      auto it = row.cells.find(key);
      for (double a : report.alphas) {
        os << ' ' << (it == row.cells.end() ? std::string() : cell_text(it->second.mrs.at(a))) << " |";
      }
    }
    for (double a : report.alphas) os << ' ' << cell_text(row.average.at(a)) << " |";
    os << '\n';
  }
  return os.str();
}

std::string render_csv(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "method,task,domain,alpha,n,mrs\n";
  for (const auto& row : report.rows) {
    for (const auto& [key, cell] : row.cells) {
      for (const auto& [a, v] : cell.mrs) {
        os << row.method << ',' << to_string(key.task) << ',' << to_string(key.domain) << ',' << format_alpha(a)
           << ',' << cell.n << ',' << format_alpha(v) << '\n';
      }
    }
    for (const auto& [a, v] : row.average) {
      os << row.method << ",Average,," << format_alpha(a) << ",," << format_alpha(v) << '\n';
    }
  }
  return os.str();
}

}  // namespace sketchref
