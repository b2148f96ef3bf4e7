#include "sketchref/humanstudy.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sketchref/error.hpp"

namespace sketchref {

void validate_response(const HumanResponse& r) {
  if (r.sketch_id.empty()) throw Error(ErrorCode::kValidation, "human response with empty sketch_id");
  if (r.value < 1 || r.value > 5) {
    throw Error(ErrorCode::kValidation, "human response for '" + r.sketch_id + "': value must be in [1, 5]");
  }
}

double average_rank_score(std::span<const HumanResponse> responses) {
  if (responses.empty()) throw Error(ErrorCode::kInvalidArgument, "average rank score: no responses");
  std::array<std::size_t, 6> freq{};
  for (const auto& r : responses) {
    validate_response(r);
    if (r.mode != ResponseMode::kRanking) {
      throw Error(ErrorCode::kInvalidArgument, "average rank score: response for '" + r.sketch_id + "' is not a ranking");
    }
    if (r.sketch_id != responses.front().sketch_id) {
      throw Error(ErrorCode::kInvalidArgument, "average rank score: responses cover more than one sketch");
    }
    ++freq[static_cast<std::size_t>(r.value)];
  }
  double weighted = 0.0;
  for (int p = 1; p <= 5; ++p) weighted += static_cast<double>(freq[p]) * (6 - p);
  return weighted / static_cast<double>(responses.size());
}

double mean_rating(std::span<const HumanResponse> responses) {
  if (responses.empty()) throw Error(ErrorCode::kInvalidArgument, "mean rating: no responses");
  long sum = 0;
  for (const auto& r : responses) {
    validate_response(r);
    if (r.mode != ResponseMode::kRating) {
      throw Error(ErrorCode::kInvalidArgument, "mean rating: response for '" + r.sketch_id + "' is not a rating");
    }
    sum += r.value;
  }
  return static_cast<double>(sum) / static_cast<double>(responses.size());
}

std::map<std::string, double> aggregate_human_scores(std::span<const HumanResponse> responses,
                                                     std::size_t min_responses) {
  std::map<std::string, std::vector<HumanResponse>> by_sketch;
  for (const auto& r : responses) by_sketch[r.sketch_id].push_back(r);
  std::map<std::string, double> out;
  for (const auto& [id, rs] : by_sketch) {
    if (rs.size() < min_responses) {
      throw Error(ErrorCode::kValidation, "sketch '" + id + "' has " + std::to_string(rs.size()) +
                                              " responses, at least " + std::to_string(min_responses) + " required");
    }
    const ResponseMode mode = rs.front().mode;
    for (const auto& r : rs) {
      if (r.mode != mode) throw Error(ErrorCode::kValidation, "sketch '" + id + "' mixes rating and ranking responses");
    }
    out[id] = mode == ResponseMode::kRanking ? average_rank_score(rs) : mean_rating(rs);
  }
  return out;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimMismatch, std::string(what) + ": length mismatch (" + std::to_string(x.size()) +
                                             " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw Error(ErrorCode::kInvalidArgument, std::string(what) + ": need at least 2 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kValidation, std::string(what) + ": non-finite sample");
    }
  }
}

// Number of tied pairs, sum over runs of t(t-1)/2, in an already grouped order.
template <typename Eq>
std::int64_t tied_pairs(const std::vector<std::size_t>& order, Eq equal) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    if (i < order.size() && equal(order[i - 1], order[i])) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Sorts `idx` by key and returns the number of strict inversions removed.
std::int64_t merge_count(std::vector<std::size_t>& idx, std::vector<std::size_t>& buf, std::size_t lo,
                         std::size_t hi, std::span<const double> key) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(idx, buf, lo, mid, key) + merge_count(idx, buf, mid, hi, key);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (key[idx[j]] < key[idx[i]]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = idx[j++];
    } else {
      buf[k++] = idx[i++];
    }
  }
  while (i < mid) buf[k++] = idx[i++];
  while (j < hi) buf[k++] = idx[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            idx.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i+1 .. j share their mean
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // mean of any average-rank vector
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kDegenerate, "spearman: zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, "kendall");
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t ties_x = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::int64_t ties_xy =
      tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

  std::vector<std::size_t> buf(n);
  const std::int64_t swaps = merge_count(idx, buf, 0, n, y);
  const std::int64_t ties_y = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });

  const std::int64_t px = n0 - ties_x, py = n0 - ties_y;
  if (px == 0 || py == 0) throw Error(ErrorCode::kDegenerate, "kendall: all values tied in one input");
  // concordant - discordant
  const std::int64_t s = n0 - ties_x - ties_y + ties_xy - 2 * swaps;
  const double tau = static_cast<double>(s) / std::sqrt(static_cast<double>(px) * static_cast<double>(py));
  return std::clamp(tau, -1.0, 1.0);
}

CorrelationResult correlate(const std::map<std::string, double>& metric_scores,
                            const std::map<std::string, double>& human_scores) {
  std::vector<double> xs, ys;
  for (const auto& [id, m] : metric_scores) {
    if (auto it = human_scores.find(id); it != human_scores.end()) {
      xs.push_back(m);
      ys.push_back(it->second);
    }
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "correlate: need at least 2 shared sketch ids, found " + std::to_string(xs.size()));
  }
  return {spearman_rho(xs, ys), kendall_tau(xs, ys), xs.size()};
}

// ---- CSV ----------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(std::string_view(line).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (t.header.empty()) throw Error(ErrorCode::kParse, path.string() + ": empty CSV");
  return t;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParse, where + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace

std::map<std::string, double> load_score_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header != std::vector<std::string>{"sketch_id", "score"}) {
    throw Error(ErrorCode::kParse, path.string() + ": header must be 'sketch_id,score'");
  }
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(t.line_numbers[i]);
    const auto& row = t.rows[i];
    if (row[0].empty()) throw Error(ErrorCode::kParse, where + ": empty sketch_id");
    if (!out.emplace(row[0], parse_double(row[1], where)).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate sketch_id '" + row[0] + "'");
    }
  }
  return out;
}

std::vector<HumanResponse> load_response_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header != std::vector<std::string>{"sketch_id", "mode", "value"}) {
    throw Error(ErrorCode::kParse, path.string() + ": header must be 'sketch_id,mode,value'");
  }
  std::vector<HumanResponse> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string where = path.string() + ":" + std::to_string(t.line_numbers[i]);
    const auto& row = t.rows[i];
    HumanResponse r;
    r.sketch_id = row[0];
    if (row[1] == "rating") {
      r.mode = ResponseMode::kRating;
    } else if (row[1] == "ranking") {
      r.mode = ResponseMode::kRanking;
    } else {
      throw Error(ErrorCode::kParse, where + ": mode must be 'rating' or 'ranking'");
    }
    const double v = parse_double(row[2], where);
    if (v != std::floor(v)) throw Error(ErrorCode::kParse, where + ": value must be an integer");
    r.value = static_cast<int>(v);
    try {
      validate_response(r);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, double> load_human_scores(const std::filesystem::path& path, std::size_t min_responses) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  if (split_csv_line(header) == std::vector<std::string>{"sketch_id", "mode", "value"}) {
    const auto responses = load_response_csv(path);
    return aggregate_human_scores(responses, min_responses);
  }
  return load_score_csv(path);
}

}  // namespace sketchref
