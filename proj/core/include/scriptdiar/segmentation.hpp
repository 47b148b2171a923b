#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scriptdiar/types.hpp"

namespace scriptdiar {

/// Tiles every speech region with sub-segments of `length` seconds. The last
/// sub-segment of a region keeps whatever remainder is left, so it may be shorter.
/// Regions must be valid, sorted and non-overlapping.
std::vector<SubSegment> subsegment(const std::vector<SpeechRegion>& regions, double length);

/// Trims, collapses inner whitespace and uppercases a character name.
std::string normalize_speaker_name(std::string_view raw);

/// Gives each sub-segment the (normalized) speaker of the turn that overlaps it
/// most, provided that overlap covers at least `min_overlap_fraction` of the
/// sub-segment. Label ids follow first appearance in sub-segment order.
PseudoLabeling project_labels(const SpeakerTimeline& timeline,
                              const std::vector<SubSegment>& subsegments,
                              double min_overlap_fraction = 0.5);

/// Converts per-sub-segment cluster labels (1-based) to turns, merging
/// contiguous sub-segments that share a label. `names[j - 1]` names label j.
SpeakerTimeline labels_to_timeline(const std::vector<SubSegment>& subsegments,
                                   const std::vector<int>& labels,
                                   const std::vector<std::string>& names);

}  // namespace scriptdiar
