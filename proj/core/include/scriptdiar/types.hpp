#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scriptdiar {

/// Raised for malformed or out-of-contract input. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open span of time in seconds.
struct TimeInterval {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }

  /// Builds an interval, rejecting non-finite bounds, negative start, or end <= start.
  static TimeInterval checked(double start, double end);

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Overlap length of two intervals (0 when disjoint).
double overlap(const TimeInterval& a, const TimeInterval& b);

struct SpeechRegion {
  TimeInterval interval;
};

/// Fixed-length unit of speech. `index` is the 0-based embedding row.
struct SubSegment {
  TimeInterval interval;
  std::size_t region_index = 0;
  std::size_t index = 0;

  friend bool operator==(const SubSegment&, const SubSegment&) = default;
};

/// One embedding row per sub-segment.
struct EmbeddingSet {
  Eigen::MatrixXd matrix;
  std::vector<SubSegment> subsegments;

  std::size_t size() const { return subsegments.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(matrix.cols()); }

  /// Throws InputError if the row count disagrees with the sub-segments or a row is zero.
  void validate() const;
};

struct Turn {
  TimeInterval interval;
  std::string speaker;

  friend bool operator==(const Turn&, const Turn&) = default;
};

/// Speaker turns. Reference timelines may overlap; hypotheses never do.
struct SpeakerTimeline {
  std::vector<Turn> turns;

  bool empty() const { return turns.empty(); }
  /// Sum of turn durations (overlapping turns counted once per turn).
  double total_speech() const;
  /// Sorted, de-duplicated speaker names.
  std::vector<std::string> speakers() const;
  /// Turns sorted by (start, end, speaker).
  SpeakerTimeline sorted() const;

  friend bool operator==(const SpeakerTimeline&, const SpeakerTimeline&) = default;
};

/// Per-sub-segment prior labels. 0 means unlabeled; label j >= 1 names `names[j - 1]`.
struct PseudoLabeling {
  std::vector<int> labels;
  std::vector<std::string> names;

  int k_prime() const { return static_cast<int>(names.size()); }
  std::size_t labeled_count() const;

  friend bool operator==(const PseudoLabeling&, const PseudoLabeling&) = default;
};

}  // namespace scriptdiar
