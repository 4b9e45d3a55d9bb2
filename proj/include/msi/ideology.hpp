#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "msi/ingest.hpp"

namespace msi::ideology {

struct IvScore {
  std::string user_id;
  uint64_t cr_count = 0;
  uint64_t cl_count = 0;
  double iv = 0.0;  // (cr - cl) / (cr + cl), in [-1, 1]
};

// Non-overlapping [start, end) label intervals for one user, sorted by start.
class LabelTimeline {
public:
  void add(const ingest::LabelInterval& interval);  // unsorted ok
  void finalize(const std::string& user_id);        // sorts, rejects overlap
  std::optional<ingest::Label> label_at(int64_t t) const;
  size_t size() const { return intervals_.size(); }

private:
  struct Span {
    int64_t start, end;
    ingest::Label label;
  };
  std::vector<Span> intervals_;
};

using Timelines = std::unordered_map<std::string, LabelTimeline>;

// Groups intervals per user and validates them. Overlap is fatal.
Timelines build_timelines(std::span<const ingest::LabelInterval> intervals);

// Per-user ideology valence over the label active at each share's timestamp.
// Shares outside every interval are ignored; users with no labeled share are
// absent. Output ordered by first appearance in the share stream.
std::vector<IvScore> ideology_valence(std::span<const ingest::ShareEvent> shares,
                                      const Timelines& timelines);

}  // namespace msi::ideology
