#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace msi::ingest {

struct ShareEvent {
  std::string user_id;
  std::string outlet_id;
  int64_t timestamp = 0;
};

struct RetweetEvent {
  std::string retweeted_user;   // information source: edge tail
  std::string retweeting_user;  // edge head
  int64_t timestamp = 0;
  bool has_news_link = false;
};

enum class Label : uint8_t { CL, CR };

inline const char* label_name(Label l) { return l == Label::CL ? "CL" : "CR"; }

struct LabelInterval {
  std::string user_id;
  int64_t start = 0;  // inclusive
  int64_t end = 0;    // exclusive
  Label label = Label::CL;
};

enum class FileFormat { auto_detect, csv, jsonl };

struct ParseOptions {
  bool strict = false;  // malformed line: strict -> throw, else skip + count
  FileFormat format = FileFormat::auto_detect;
};

struct ParseStats {
  size_t parsed = 0;
  size_t skipped = 0;
};

std::vector<ShareEvent> parse_shares(const std::string& path,
                                     const ParseOptions& opts = {},
                                     ParseStats* stats = nullptr);
std::vector<RetweetEvent> parse_retweets(const std::string& path,
                                         const ParseOptions& opts = {},
                                         ParseStats* stats = nullptr);
std::vector<LabelInterval> parse_labels(const std::string& path,
                                        const ParseOptions& opts = {},
                                        ParseStats* stats = nullptr);

// Outlets ranked by descending total share count (ties lexicographic),
// intersected with `allowlist` when given, truncated to k. Fewer than k
// distinct outlets is not an error: all are returned.
std::vector<std::string> select_top_outlets(
    std::span<const ShareEvent> events, size_t k,
    const std::set<std::string>* allowlist = nullptr);

// Sparse user x outlet count matrix. Rows are users in order of first
// appearance among retained events; columns follow the outlet ranking
// passed to build_counts. Every row and column has at least one nonzero.
struct BipartiteCounts {
  std::vector<std::string> user_ids;    // row ordinal -> id
  std::vector<std::string> outlet_ids;  // col ordinal -> id
  std::unordered_map<std::string, uint32_t> user_index;
  std::unordered_map<std::string, uint32_t> outlet_index;

  // CSR by row, column indices ascending within a row.
  std::vector<size_t> row_ptr;
  std::vector<uint32_t> col_idx;
  std::vector<uint32_t> counts;
  uint64_t grand_total = 0;
  size_t dropped_columns = 0;  // requested outlets that received no share

  size_t rows() const { return user_ids.size(); }
  size_t cols() const { return outlet_ids.size(); }
  size_t nnz() const { return col_idx.size(); }

  std::vector<uint64_t> row_sums() const;
  std::vector<uint64_t> col_sums() const;
};

BipartiteCounts build_counts(std::span<const ShareEvent> events,
                             const std::vector<std::string>& outlets);

// Directed weighted retweet graph; edge tail = retweeted user, weight =
// number of retweets. Self-loops dropped, isolated users absent.
struct RetweetGraph {
  std::vector<std::string> node_ids;
  std::unordered_map<std::string, uint32_t> node_index;
  std::vector<size_t> offsets;  // CSR out-edges
  std::vector<uint32_t> targets;
  std::vector<double> weights;

  size_t node_count() const { return node_ids.size(); }
  size_t edge_count() const { return targets.size(); }
  double total_weight() const;
};

RetweetGraph build_retweet_graph(std::span<const RetweetEvent> events,
                                 bool exclude_news_links);

}  // namespace msi::ingest
