#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scriptdiar/types.hpp"

namespace scriptdiar {

/// Hypothesis speaker -> reference speaker. std::nullopt marks an unmapped cluster.
using SpeakerMapping = std::map<std::string, std::optional<std::string>>;

struct DerBreakdown {
  double false_alarm = 0.0;
  double missed = 0.0;
  double speaker_error = 0.0;
  /// Scored reference speech; concurrent speakers each count.
  double total_reference = 0.0;
  double der = 0.0;
};

struct ScdScore {
  /// Absent when the hypothesis has no change points but the reference does.
  std::optional<double> precision;
  /// Absent when the reference has no change points but the hypothesis does.
  std::optional<double> recall;
  double f1 = 0.0;
  double tolerance = 0.0;
  std::size_t reference_changes = 0;
  std::size_t hypothesis_changes = 0;
  std::size_t matched = 0;
};

/// Seconds of co-occurring speech for each (reference, hypothesis) speaker pair,
/// outside the +-collar zones around reference turn boundaries. Rows follow
/// reference.speakers(), columns hypothesis.speakers().
std::vector<std::vector<double>> overlap_matrix(const SpeakerTimeline& reference,
                                                const SpeakerTimeline& hypothesis, double collar = 0.0);

/// Minimum-cost perfect assignment on a rectangular cost matrix (rows <= cols
/// not required). Returns, for every row, the assigned column or -1.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

/// One-to-one mapping maximizing total overlapped speech. Hypothesis speakers
/// that end up with no overlapping partner are unmapped.
SpeakerMapping hungarian_map(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis,
                             double collar = 0.0);

/// Diarization error with a +-collar around reference turn boundaries excluded.
/// Without a mapping, the optimal one over the scored region is used.
DerBreakdown der(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis, double collar = 0.0,
                 const std::optional<SpeakerMapping>& mapping = std::nullopt);

/// Instants inside continuous speech where the set of active speakers changes.
std::vector<double> change_points(const SpeakerTimeline& timeline);

/// Speaker-change F1 with optimal one-to-one matching inside +-tolerance (inclusive).
ScdScore scd_f1(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis, double tolerance = 0.1);

/// Two-sided p-value of the pooled-variance two-sample Student's t-test.
double corpus_significance(const std::vector<double>& scores_a, const std::vector<double>& scores_b);

}  // namespace scriptdiar
