#include "scriptdiar/segmentation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace scriptdiar {

namespace {

constexpr double kTimeEps = 1e-9;

}  // namespace

std::vector<SubSegment> subsegment(const std::vector<SpeechRegion>& regions, double length) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InputError("sub-segment length must be positive");
  }
  std::vector<SubSegment> out;
  double previous_end = 0.0;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& iv = regions[r].interval;
    TimeInterval::checked(iv.start, iv.end);
    if (r > 0 && iv.start < previous_end - kTimeEps) {
      throw InputError("speech regions overlap or are out of order at region " +
                       std::to_string(r));
    }
    previous_end = iv.end;

    const double dur = iv.duration();
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(dur / length - 1e-9)));
    for (std::size_t j = 0; j < count; ++j) {
      const double s = iv.start + static_cast<double>(j) * length;
      const double e = (j + 1 == count) ? iv.end : iv.start + static_cast<double>(j + 1) * length;
      out.push_back(SubSegment{TimeInterval{s, e}, r, out.size()});
    }
  }
  return out;
}

std::string normalize_speaker_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::toupper(uc)));
  }
  return out;
}

PseudoLabeling project_labels(const SpeakerTimeline& timeline,
                              const std::vector<SubSegment>& subsegments,
                              double min_overlap_fraction) {
  if (!(min_overlap_fraction > 0.0 && min_overlap_fraction <= 1.0)) {
    throw InputError("min_overlap_fraction must be in (0, 1]");
  }
  PseudoLabeling out;
  out.labels.assign(subsegments.size(), 0);
  if (timeline.empty()) return out;

  const SpeakerTimeline turns = timeline.sorted();
  std::vector<std::string> names;
  names.reserve(turns.turns.size());
  for (const auto& t : turns.turns) names.push_back(normalize_speaker_name(t.speaker));

  // Running max of turn ends lets the backward scan stop early.
  std::vector<double> max_end(turns.turns.size());
  double running = -1.0;
  for (std::size_t t = 0; t < turns.turns.size(); ++t) {
    running = std::max(running, turns.turns[t].interval.end);
    max_end[t] = running;
  }

  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < subsegments.size(); ++i) {
    const auto& seg = subsegments[i].interval;
    const auto ub = std::lower_bound(turns.turns.begin(), turns.turns.end(), seg.end,
                                     [](const Turn& t, double v) { return t.interval.start < v; });
    std::ptrdiff_t best = -1;
    double best_overlap = 0.0;
    for (auto idx = std::distance(turns.turns.begin(), ub) - 1; idx >= 0; --idx) {
      if (max_end[static_cast<std::size_t>(idx)] <= seg.start) break;
      const double ov = overlap(turns.turns[static_cast<std::size_t>(idx)].interval, seg);
      // Scanning backwards: >= keeps the earliest turn among equal overlaps.
      if (ov > 0.0 && ov >= best_overlap) {
        best_overlap = ov;
        best = idx;
      }
    }
    if (best < 0 || best_overlap < min_overlap_fraction * seg.duration() - 1e-12) continue;

    const std::string& name = names[static_cast<std::size_t>(best)];
    auto [it, inserted] = ids.try_emplace(name, static_cast<int>(out.names.size()) + 1);
    if (inserted) out.names.push_back(name);
    out.labels[i] = it->second;
  }
  return out;
}

SpeakerTimeline labels_to_timeline(const std::vector<SubSegment>& subsegments,
                                   const std::vector<int>& labels,
                                   const std::vector<std::string>& names) {
  if (labels.size() != subsegments.size()) {
    throw InputError("label count does not match sub-segment count");
  }
  SpeakerTimeline out;
  int current = 0;
  for (std::size_t i = 0; i < subsegments.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || static_cast<std::size_t>(label) > names.size()) {
      throw InputError("label " + std::to_string(label) + " has no name");
    }
    const auto& iv = subsegments[i].interval;
    if (!out.turns.empty() && label == current &&
        std::abs(iv.start - out.turns.back().interval.end) <= kTimeEps) {
      out.turns.back().interval.end = iv.end;
      continue;
    }
    out.turns.push_back(Turn{iv, names[static_cast<std::size_t>(label - 1)]});
    current = label;
  }
  return out;
}

}  // namespace scriptdiar
