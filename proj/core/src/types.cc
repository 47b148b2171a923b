#include "scriptdiar/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace scriptdiar {

TimeInterval TimeInterval::checked(double start, double end) {
  if (!std::isfinite(start) || !std::isfinite(end)) {
    throw InputError("time interval has a non-finite bound");
  }
  if (start < 0.0) {
    std::ostringstream os;
    os << "time interval starts before zero: " << start;
    throw InputError(os.str());
  }
  if (!(end > start)) {
    std::ostringstream os;
    os << "time interval [" << start << ", " << end << "] has non-positive duration";
    throw InputError(os.str());
  }
  return TimeInterval{start, end};
}

double overlap(const TimeInterval& a, const TimeInterval& b) {
  return std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

void EmbeddingSet::validate() const {
  if (static_cast<std::size_t>(matrix.rows()) != subsegments.size()) {
    std::ostringstream os;
    os << "embedding matrix has " << matrix.rows() << " rows but there are "
       << subsegments.size() << " sub-segments";
    throw InputError(os.str());
  }
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    if (matrix.row(i).squaredNorm() == 0.0) {
      throw InputError("embedding row " + std::to_string(i) + " is the zero vector");
    }
  }
}

double SpeakerTimeline::total_speech() const {
  double total = 0.0;
  for (const auto& t : turns) total += t.interval.duration();
  return total;
}

std::vector<std::string> SpeakerTimeline::speakers() const {
  std::vector<std::string> names;
  names.reserve(turns.size());
  for (const auto& t : turns) names.push_back(t.speaker);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

SpeakerTimeline SpeakerTimeline::sorted() const {
  SpeakerTimeline out = *this;
  std::stable_sort(out.turns.begin(), out.turns.end(), [](const Turn& a, const Turn& b) {
    return std::tie(a.interval.start, a.interval.end, a.speaker) <
           std::tie(b.interval.start, b.interval.end, b.speaker);
  });
  return out;
}

std::size_t PseudoLabeling::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](int l) { return l != 0; }));
}

}  // namespace scriptdiar
