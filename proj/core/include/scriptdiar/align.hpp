#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptdiar/types.hpp"

namespace scriptdiar {

struct DialogueLine {
  std::size_t index = 0;
  std::string speaker_name;
  std::string text;
};

struct AsrWord {
  std::string token;
  TimeInterval interval;
};

/// One script line matched to the contiguous word span [first_word, last_word].
struct AlignmentLink {
  std::size_t line_index = 0;
  std::size_t first_word = 0;
  std::size_t last_word = 0;
  double cost = 0.0;

  std::size_t span() const { return last_word - first_word + 1; }
  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
};

struct Alignment {
  std::vector<AlignmentLink> links;
  std::vector<std::size_t> deleted_lines;
  std::vector<std::size_t> deleted_words;
  double line_deletion_penalty = 0.0;
  double word_deletion_penalty = 0.0;
  /// Sum of link costs plus deletion penalties.
  double total_cost = 0.0;
};

struct LabeledRange {
  TimeInterval interval;
  std::string speaker_name;
  double cost = 0.0;
};

/// Lowercase, drop punctuation, collapse whitespace. Bytes >= 0x80 are kept as-is.
std::string normalize_text(std::string_view raw);

/// Whitespace split of normalize_text(raw).
std::vector<std::string> tokenize(std::string_view raw);

/// 1 - 2 * LCS / (|a| + |b|) over tokens; 1 when either side is empty.
double token_lcs_cost(const std::vector<std::string>& a, const std::vector<std::string>& b);

double span_cost(const DialogueLine& line, const std::vector<AsrWord>& words);

struct AlignOptions {
  std::size_t max_span = 50;
  double deletion_percentile = 0.015;
  /// Words on either side of the diagonal searched per line once the full
  /// lattice exceeds `band_threshold_cells`. 0 picks max(500, 10% of the words).
  std::size_t band_words = 0;
  std::size_t band_threshold_cells = 1'000'000;
  /// Upper bound on span costs sampled to calibrate deletion penalties.
  std::size_t calibration_samples = 20'000;
  /// Fixed deletion penalty; bypasses percentile calibration when set.
  std::optional<double> deletion_penalty;
};

/// Minimum-cost monotone alignment of lines to word spans of 1..max_span
/// words, with line and word deletions. Ties prefer links, then shorter spans.
Alignment align(const std::vector<DialogueLine>& lines, const std::vector<AsrWord>& words,
                const AlignOptions& options = {});

/// Deletion penalty the aligner would calibrate for these inputs.
double calibrate_deletion_penalty(const std::vector<DialogueLine>& lines,
                                  const std::vector<AsrWord>& words, const AlignOptions& options);

/// Time ranges for links whose cost is at most `confidence_threshold`.
std::vector<LabeledRange> extract_ranges(const Alignment& alignment,
                                         const std::vector<DialogueLine>& lines,
                                         const std::vector<AsrWord>& words,
                                         double confidence_threshold = 0.3);

struct PseudoLabelAudit {
  double coverage = 0.0;
  /// Absent when the reference is empty.
  std::optional<double> accuracy;
};

/// Coverage is ranges / total_lines. Accuracy is the fraction of ranges whose
/// speaker equals the reference speaker with the largest overlap (names normalized).
PseudoLabelAudit audit_pseudo_labels(const std::vector<LabeledRange>& ranges,
                                     std::size_t total_lines, const SpeakerTimeline& reference);

/// Turns labeled ranges into a timeline, e.g. for project_labels.
SpeakerTimeline ranges_to_timeline(const std::vector<LabeledRange>& ranges);

}  // namespace scriptdiar
