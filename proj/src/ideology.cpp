#include "msi/ideology.hpp"

#include <algorithm>

#include "msi/common.hpp"

namespace msi::ideology {

void LabelTimeline::add(const ingest::LabelInterval& interval) {
  intervals_.push_back(Span{interval.start, interval.end, interval.label});
}

void LabelTimeline::finalize(const std::string& user_id) {
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  for (size_t i = 1; i < intervals_.size(); ++i) {
    if (intervals_[i].start < intervals_[i - 1].end)
      throw DataError("overlapping label intervals for user " + user_id);
  }
}

std::optional<ingest::Label> LabelTimeline::label_at(int64_t t) const {
  // first interval with start > t, then check its predecessor
  size_t lo = 0, hi = intervals_.size();
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (intervals_[mid].start <= t)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == 0) return std::nullopt;
  const Span& s = intervals_[lo - 1];
  if (t < s.end) return s.label;
  return std::nullopt;
}

Timelines build_timelines(std::span<const ingest::LabelInterval> intervals) {
  Timelines out;
  for (const auto& iv : intervals) out[iv.user_id].add(iv);
  for (auto& [user, timeline] : out) timeline.finalize(user);
  return out;
}

std::vector<IvScore> ideology_valence(std::span<const ingest::ShareEvent> shares,
                                      const Timelines& timelines) {
  std::vector<IvScore> scores;
  std::unordered_map<std::string, size_t> index;
  for (const auto& ev : shares) {
    auto tl = timelines.find(ev.user_id);
    if (tl == timelines.end()) continue;
    auto label = tl->second.label_at(ev.timestamp);
    if (!label) continue;
    auto [it, inserted] = index.emplace(ev.user_id, scores.size());
    if (inserted) scores.push_back(IvScore{ev.user_id, 0, 0, 0.0});
    IvScore& s = scores[it->second];
    if (*label == ingest::Label::CR)
      ++s.cr_count;
    else
      ++s.cl_count;
  }
  for (IvScore& s : scores) {
    const double total = double(s.cr_count + s.cl_count);
    s.iv = (double(s.cr_count) - double(s.cl_count)) / total;
  }
  return scores;
}

}  // namespace msi::ideology
