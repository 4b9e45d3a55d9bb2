#include "msi/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include <json.hpp>

#include "msi/common.hpp"
#include "msi/io.hpp"

namespace msi::ingest {

namespace {

FileFormat detect_format(const std::string& path, FileFormat requested) {
  if (requested != FileFormat::auto_detect) return requested;
  auto ends_with = [&](const char* suf) {
    size_t n = std::strlen(suf);
    return path.size() >= n && path.compare(path.size() - n, n, suf) == 0;
  };
  if (ends_with(".jsonl") || ends_with(".ndjson")) return FileFormat::jsonl;
  return FileFormat::csv;
}

[[noreturn]] void malformed(const std::string& path, size_t line_no,
                            const std::string& why) {
  throw DataError(path + ":" + std::to_string(line_no) +
                  ": malformed line (" + why + ")");
}

class SkipCounter {
public:
  SkipCounter(const std::string& path, bool strict, ParseStats* stats)
      : path_(path), strict_(strict), stats_(stats) {}

  void skip(size_t line_no, const std::string& why) {
    if (strict_) malformed(path_, line_no, why);
    ++skipped_;
    if (skipped_ <= 5)
      std::fprintf(stderr, "warning: %s:%zu skipped (%s)\n", path_.c_str(),
                   line_no, why.c_str());
  }

  void finish(size_t parsed) {
    if (skipped_ > 5)
      std::fprintf(stderr, "warning: %s: %zu malformed lines skipped in total\n",
                   path_.c_str(), skipped_);
    if (stats_) {
      stats_->parsed = parsed;
      stats_->skipped = skipped_;
    }
  }

private:
  std::string path_;
  bool strict_;
  ParseStats* stats_;
  size_t skipped_ = 0;
};

// Shared CSV walk: validates the header, hands data lines to `row`.
// `row` returns an error description or empty on success.
template <typename RowFn>
void walk_csv(const std::string& path, const char* header, bool strict,
              ParseStats* stats, RowFn row) {
  SkipCounter skips(path, strict, stats);
  size_t parsed = 0;
  bool saw_header = false;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != header)
        throw DataError(path + ": expected header '" + header + "', got '" +
                        std::string(line) + "'");
      saw_header = true;
      return;
    }
    if (line.empty()) return;
    std::string err = row(line);
    if (err.empty())
      ++parsed;
    else
      skips.skip(line_no, err);
  });
  skips.finish(parsed);
}

template <typename RowFn>
void walk_jsonl(const std::string& path, bool strict, ParseStats* stats,
                RowFn row) {
  SkipCounter skips(path, strict, stats);
  size_t parsed = 0;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    if (line.empty()) return;
    std::string err = row(line);
    if (err.empty())
      ++parsed;
    else
      skips.skip(line_no, err);
  });
  skips.finish(parsed);
}

std::optional<bool> parse_bool_field(std::string_view s) {
  if (s == "0" || s == "false") return false;
  if (s == "1" || s == "true") return true;
  return std::nullopt;
}

}  // namespace

std::vector<ShareEvent> parse_shares(const std::string& path,
                                     const ParseOptions& opts,
                                     ParseStats* stats) {
  std::vector<ShareEvent> events;
  FileFormat fmt = detect_format(path, opts.format);

  if (fmt == FileFormat::jsonl) {
    walk_jsonl(path, opts.strict, stats, [&](std::string_view line) -> std::string {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) return "invalid JSON object";
      if (!j.contains("user_id") || !j["user_id"].is_string())
        return "missing string user_id";
      if (!j.contains("outlet_id") || !j["outlet_id"].is_string())
        return "missing string outlet_id";
      if (!j.contains("timestamp") || !j["timestamp"].is_number_integer())
        return "missing integer timestamp";
      ShareEvent ev{j["user_id"].get<std::string>(),
                    j["outlet_id"].get<std::string>(),
                    j["timestamp"].get<int64_t>()};
      if (ev.user_id.empty()) return "empty user_id";
      if (ev.outlet_id.empty()) return "empty outlet_id";
      if (ev.timestamp < 0) return "negative timestamp";
      events.push_back(std::move(ev));
      return {};
    });
    return events;
  }

  std::vector<std::string_view> f;
  walk_csv(path, "user_id,outlet_id,timestamp", opts.strict, stats,
           [&](std::string_view line) -> std::string {
             if (!split_fields(line, 3, f)) return "expected 3 fields";
             if (f[0].empty()) return "empty user_id";
             if (f[1].empty()) return "empty outlet_id";
             auto ts = parse_int(f[2]);
             if (!ts || *ts < 0) return "bad timestamp";
             events.push_back(
                 ShareEvent{std::string(f[0]), std::string(f[1]), *ts});
             return {};
           });
  return events;
}

std::vector<RetweetEvent> parse_retweets(const std::string& path,
                                         const ParseOptions& opts,
                                         ParseStats* stats) {
  if (detect_format(path, opts.format) == FileFormat::jsonl)
    throw DataError(path + ": retweet files must be CSV");
  std::vector<RetweetEvent> events;
  std::vector<std::string_view> f;
  walk_csv(path, "retweeted_user,retweeting_user,timestamp,has_news_link",
           opts.strict, stats, [&](std::string_view line) -> std::string {
             if (!split_fields(line, 4, f)) return "expected 4 fields";
             if (f[0].empty()) return "empty retweeted_user";
             if (f[1].empty()) return "empty retweeting_user";
             auto ts = parse_int(f[2]);
             if (!ts || *ts < 0) return "bad timestamp";
             auto link = parse_bool_field(f[3]);
             if (!link) return "has_news_link must be 0,1,true,false";
             events.push_back(RetweetEvent{std::string(f[0]), std::string(f[1]),
                                           *ts, *link});
             return {};
           });
  return events;
}

std::vector<LabelInterval> parse_labels(const std::string& path,
                                        const ParseOptions& opts,
                                        ParseStats* stats) {
  if (detect_format(path, opts.format) == FileFormat::jsonl)
    throw DataError(path + ": label files must be CSV");
  std::vector<LabelInterval> intervals;
  std::vector<std::string_view> f;
  walk_csv(path, "user_id,start,end,label", opts.strict, stats,
           [&](std::string_view line) -> std::string {
             if (!split_fields(line, 4, f)) return "expected 4 fields";
             if (f[0].empty()) return "empty user_id";
             auto start = parse_int(f[1]);
             auto end = parse_int(f[2]);
             if (!start || !end) return "bad interval bounds";
             if (*start >= *end) return "start must be < end";
             Label label;
             if (f[3] == "CL")
               label = Label::CL;
             else if (f[3] == "CR")
               label = Label::CR;
             else
               return "label must be CL or CR";
             intervals.push_back(
                 LabelInterval{std::string(f[0]), *start, *end, label});
             return {};
           });
  return intervals;
}

std::vector<std::string> select_top_outlets(
    std::span<const ShareEvent> events, size_t k,
    const std::set<std::string>* allowlist) {
  if (k < 1) throw DataError("select_top_outlets: k must be >= 1");

  std::unordered_map<std::string, uint64_t> totals;
  for (const auto& ev : events) ++totals[ev.outlet_id];

  std::vector<std::pair<std::string, uint64_t>> ranked(totals.begin(),
                                                       totals.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> out;
  for (auto& [outlet, count] : ranked) {
    if (allowlist && allowlist->count(outlet) == 0) continue;
    out.push_back(outlet);
    if (out.size() == k) break;
  }
  if (out.size() < k)
    std::fprintf(stderr,
                 "warning: requested top %zu outlets but only %zu available\n",
                 k, out.size());
  return out;
}

std::vector<uint64_t> BipartiteCounts::row_sums() const {
  std::vector<uint64_t> sums(rows(), 0);
  for (size_t i = 0; i < rows(); ++i)
    for (size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) sums[i] += counts[p];
  return sums;
}

std::vector<uint64_t> BipartiteCounts::col_sums() const {
  std::vector<uint64_t> sums(cols(), 0);
  for (size_t p = 0; p < col_idx.size(); ++p) sums[col_idx[p]] += counts[p];
  return sums;
}

BipartiteCounts build_counts(std::span<const ShareEvent> events,
                             const std::vector<std::string>& outlets) {
  if (outlets.empty()) throw DataError("build_counts: outlet set is empty");

  std::unordered_map<std::string, uint32_t> outlet_pos;
  for (size_t j = 0; j < outlets.size(); ++j) {
    if (!outlet_pos.emplace(outlets[j], uint32_t(j)).second)
      throw DataError("build_counts: duplicate outlet id: " + outlets[j]);
  }

  BipartiteCounts bc;
  std::vector<std::pair<uint32_t, uint32_t>> cells;  // (row, provisional col)
  cells.reserve(events.size());
  for (const auto& ev : events) {
    auto it = outlet_pos.find(ev.outlet_id);
    if (it == outlet_pos.end()) continue;
    auto [uit, inserted] =
        bc.user_index.emplace(ev.user_id, uint32_t(bc.user_ids.size()));
    if (inserted) bc.user_ids.push_back(ev.user_id);
    cells.emplace_back(uit->second, it->second);
  }
  if (cells.empty())
    throw DataError("build_counts: no share events match the outlet set");

  // Drop all-zero columns, keeping the caller's outlet order.
  std::vector<uint64_t> col_totals(outlets.size(), 0);
  for (auto& [r, c] : cells) ++col_totals[c];
  std::vector<uint32_t> remap(outlets.size(), UINT32_MAX);
  for (size_t j = 0; j < outlets.size(); ++j) {
    if (col_totals[j] == 0) {
      ++bc.dropped_columns;
      std::fprintf(stderr, "warning: outlet '%s' has no shares, dropped\n",
                   outlets[j].c_str());
      continue;
    }
    remap[j] = uint32_t(bc.outlet_ids.size());
    bc.outlet_index.emplace(outlets[j], remap[j]);
    bc.outlet_ids.push_back(outlets[j]);
  }
  for (auto& [r, c] : cells) c = remap[c];

  std::sort(cells.begin(), cells.end());
  bc.row_ptr.assign(bc.user_ids.size() + 1, 0);
  for (size_t p = 0; p < cells.size();) {
    size_t q = p;
    while (q < cells.size() && cells[q] == cells[p]) ++q;
    bc.col_idx.push_back(cells[p].second);
    bc.counts.push_back(uint32_t(q - p));
    ++bc.row_ptr[cells[p].first + 1];
    p = q;
  }
  for (size_t i = 1; i <= bc.user_ids.size(); ++i)
    bc.row_ptr[i] += bc.row_ptr[i - 1];
  bc.grand_total = cells.size();
  return bc;
}

double RetweetGraph::total_weight() const {
  double w = 0.0;
  for (double x : weights) w += x;
  return w;
}

RetweetGraph build_retweet_graph(std::span<const RetweetEvent> events,
                                 bool exclude_news_links) {
  RetweetGraph g;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(events.size());

  auto node_of = [&](const std::string& id) {
    auto [it, inserted] = g.node_index.emplace(id, uint32_t(g.node_ids.size()));
    if (inserted) g.node_ids.push_back(id);
    return it->second;
  };

  for (const auto& ev : events) {
    if (exclude_news_links && ev.has_news_link) continue;
    if (ev.retweeted_user == ev.retweeting_user) continue;  // self-loop
    uint32_t tail = node_of(ev.retweeted_user);
    uint32_t head = node_of(ev.retweeting_user);
    edges.emplace_back(tail, head);
  }
  if (edges.empty())
    throw DataError("build_retweet_graph: no retweet events survive filtering");

  std::sort(edges.begin(), edges.end());
  g.offsets.assign(g.node_ids.size() + 1, 0);
  for (size_t p = 0; p < edges.size();) {
    size_t q = p;
    while (q < edges.size() && edges[q] == edges[p]) ++q;
    g.targets.push_back(edges[p].second);
    g.weights.push_back(double(q - p));
    ++g.offsets[edges[p].first + 1];
    p = q;
  }
  for (size_t i = 1; i <= g.node_ids.size(); ++i) g.offsets[i] += g.offsets[i - 1];
  return g;
}

}  // namespace msi::ingest
