#include "scriptdiar/align.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

#include "quantile.hpp"
#include "scriptdiar/segmentation.hpp"

namespace scriptdiar {

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (uc < 0x80 && !std::isalnum(uc)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(uc < 0x80 ? std::tolower(uc) : uc));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::istringstream is(normalize_text(raw));
  std::string tok;
  while (is >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Token LCS over interned ids.
std::size_t lcs_length(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::size_t> prev(a.size() + 1, 0), cur(a.size() + 1, 0);
  for (int w : b) {
    for (std::size_t p = 1; p <= a.size(); ++p) {
      cur[p] = (a[p - 1] == w) ? prev[p - 1] + 1 : std::max(prev[p], cur[p - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[a.size()];
}

double cost_from_lcs(std::size_t lcs, std::size_t line_len, std::size_t span_len) {
  if (line_len == 0 || span_len == 0) return 1.0;
  return 1.0 - 2.0 * static_cast<double>(lcs) / static_cast<double>(line_len + span_len);
}

// Extends an LCS table one word at a time so every span length starting at a
// fixed word costs O(|line|).
class IncrementalLcs {
 public:
  explicit IncrementalLcs(const std::vector<int>& line)
      : line_(line), prev_(line.size() + 1, 0), cur_(line.size() + 1, 0) {}

  std::size_t push(int word) {
    for (std::size_t p = 1; p <= line_.size(); ++p) {
      cur_[p] = (line_[p - 1] == word) ? prev_[p - 1] + 1 : std::max(prev_[p], cur_[p - 1]);
    }
    std::swap(prev_, cur_);
    return prev_[line_.size()];
  }

 private:
  const std::vector<int>& line_;
  std::vector<std::size_t> prev_, cur_;
};

struct Interned {
  std::vector<std::vector<int>> lines;
  std::vector<int> words;
};

Interned intern(const std::vector<DialogueLine>& lines, const std::vector<AsrWord>& words) {
  std::unordered_map<std::string, int> ids;
  auto id_of = [&ids](const std::string& tok) {
    return ids.try_emplace(tok, static_cast<int>(ids.size())).first->second;
  };
  Interned out;
  out.lines.reserve(lines.size());
  for (const auto& line : lines) {
    std::vector<int> toks;
    for (const auto& t : tokenize(line.text)) toks.push_back(id_of(t));
    out.lines.push_back(std::move(toks));
  }
  out.words.reserve(words.size());
  for (const auto& w : words) {
    const auto toks = tokenize(w.token);
    std::string joined;
    for (const auto& t : toks) joined += t;
    // A word that normalizes to nothing never matches.
    out.words.push_back(joined.empty() ? -1 - static_cast<int>(out.words.size()) : id_of(joined));
  }
  return out;
}

struct Band {
  std::vector<std::size_t> lo, hi;  // inclusive word-count bounds per line count

  bool contains(std::size_t i, std::size_t j) const { return j >= lo[i] && j <= hi[i]; }
};

Band make_band(std::size_t n_lines, std::size_t n_words, const AlignOptions& options) {
  Band band;
  band.lo.assign(n_lines + 1, 0);
  band.hi.assign(n_lines + 1, n_words);
  const double cells = static_cast<double>(n_lines + 1) * static_cast<double>(n_words + 1);
  if (cells <= static_cast<double>(options.band_threshold_cells) || n_lines == 0) return band;

  std::size_t half = options.band_words;
  if (half == 0) half = std::max<std::size_t>(500, n_words / 10);
  for (std::size_t i = 0; i <= n_lines; ++i) {
    const auto center = static_cast<std::size_t>(
        std::llround(static_cast<double>(i) * static_cast<double>(n_words) /
                     static_cast<double>(n_lines)));
    band.lo[i] = center > half ? center - half : 0;
    band.hi[i] = std::min(n_words, center + half);
  }
  return band;
}

double calibrate(const Interned& in, const Band& band, const AlignOptions& options) {
  const std::size_t n_lines = in.lines.size();
  const std::size_t n_words = in.words.size();
  auto max_m = [&](std::size_t s) { return std::min(options.max_span, n_words - s); };

  std::size_t total = 0;
  for (std::size_t i = 1; i <= n_lines; ++i) {
    for (std::size_t s = band.lo[i - 1]; s <= band.hi[i - 1] && s < n_words; ++s) {
      total += max_m(s);
      if (total > options.calibration_samples) break;
    }
    if (total > options.calibration_samples) break;
  }

  std::vector<double> sample;
  if (total <= options.calibration_samples) {
    sample.reserve(total);
    for (std::size_t i = 1; i <= n_lines; ++i) {
      for (std::size_t s = band.lo[i - 1]; s <= band.hi[i - 1] && s < n_words; ++s) {
        IncrementalLcs lcs(in.lines[i - 1]);
        for (std::size_t m = 1; m <= max_m(s); ++m) {
          sample.push_back(cost_from_lcs(lcs.push(in.words[s + m - 1]), in.lines[i - 1].size(), m));
        }
      }
    }
  } else {
    std::mt19937_64 rng(0x5c41b7d1a2ULL);
    sample.reserve(options.calibration_samples);
    while (sample.size() < options.calibration_samples) {
      const std::size_t i = 1 + std::uniform_int_distribution<std::size_t>(0, n_lines - 1)(rng);
      const std::size_t hi = std::min(band.hi[i - 1], n_words - 1);
      if (band.lo[i - 1] > hi) continue;
      const std::size_t s = std::uniform_int_distribution<std::size_t>(band.lo[i - 1], hi)(rng);
      const std::size_t m = std::uniform_int_distribution<std::size_t>(1, max_m(s))(rng);
      const std::vector<int> span(in.words.begin() + static_cast<std::ptrdiff_t>(s),
                                  in.words.begin() + static_cast<std::ptrdiff_t>(s + m));
      sample.push_back(cost_from_lcs(lcs_length(in.lines[i - 1], span), in.lines[i - 1].size(), m));
    }
  }
  return detail::quantile(sample, options.deletion_percentile);
}

void check_options(const AlignOptions& options) {
  if (options.max_span < 1) throw InputError("max_span must be at least 1");
  if (!(options.deletion_percentile > 0.0 && options.deletion_percentile < 1.0)) {
    throw InputError("deletion_percentile must be in (0, 1)");
  }
  if (options.deletion_penalty && !(*options.deletion_penalty >= 0.0)) {
    throw InputError("deletion penalty must be non-negative");
  }
}

enum class Move : std::uint8_t { kNone, kLink, kDeleteLine, kDeleteWord };

// Path cost as an unevaluated sum hi + lo (double-double). Link costs and
// penalties are doubles of bounded exponent, so path totals are held exactly
// and equal-cost paths compare equal whatever order they were summed in.
struct Cost {
  double hi = kInf;
  double lo = 0.0;

  Cost plus(double x) const {
    const double s = hi + x;
    const double bb = s - hi;
    const double err = (hi - (s - bb)) + (x - bb) + lo;
    const double h = s + err;
    return Cost{h, err - (h - s)};
  }
  bool finite() const { return hi != kInf; }
  friend bool operator<(const Cost& a, const Cost& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
  friend bool operator==(const Cost& a, const Cost& b) { return a.hi == b.hi && a.lo == b.lo; }
};

struct Cell {
  Cost cost;
  Move move = Move::kNone;
  std::uint32_t span = 0;
};

}  // namespace

double token_lcs_cost(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 1.0;
  std::unordered_map<std::string, int> ids;
  auto to_ids = [&ids](const std::vector<std::string>& toks) {
    std::vector<int> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(ids.try_emplace(t, static_cast<int>(ids.size())).first->second);
    return out;
  };
  const auto ia = to_ids(a);
  const auto ib = to_ids(b);
  return cost_from_lcs(lcs_length(ia, ib), a.size(), b.size());
}

double span_cost(const DialogueLine& line, const std::vector<AsrWord>& words) {
  std::vector<std::string> span;
  for (const auto& w : words) {
    std::string joined;
    for (const auto& t : tokenize(w.token)) joined += t;
    if (!joined.empty()) span.push_back(std::move(joined));
  }
  const auto line_tokens = tokenize(line.text);
  if (line_tokens.empty() || words.empty()) return 1.0;
  // Words that normalize to nothing still count toward the span length.
  std::unordered_map<std::string, int> ids;
  std::vector<int> a, b;
  for (const auto& t : line_tokens) a.push_back(ids.try_emplace(t, static_cast<int>(ids.size())).first->second);
  for (const auto& t : span) b.push_back(ids.try_emplace(t, static_cast<int>(ids.size())).first->second);
  return cost_from_lcs(lcs_length(a, b), a.size(), words.size());
}

double calibrate_deletion_penalty(const std::vector<DialogueLine>& lines,
                                  const std::vector<AsrWord>& words, const AlignOptions& options) {
  check_options(options);
  if (options.deletion_penalty) return *options.deletion_penalty;
  if (lines.empty() || words.empty()) return 0.0;
  const Interned in = intern(lines, words);
  return calibrate(in, make_band(lines.size(), words.size(), options), options);
}

Alignment align(const std::vector<DialogueLine>& lines, const std::vector<AsrWord>& words,
                const AlignOptions& options) {
  check_options(options);
  Alignment result;
  const std::size_t n_lines = lines.size();
  const std::size_t n_words = words.size();
  if (n_lines == 0 || n_words == 0) {
    for (std::size_t i = 0; i < n_lines; ++i) result.deleted_lines.push_back(i);
    for (std::size_t j = 0; j < n_words; ++j) result.deleted_words.push_back(j);
    return result;
  }

  const Interned in = intern(lines, words);
  const Band band = make_band(n_lines, n_words, options);
  const double delta = options.deletion_penalty ? *options.deletion_penalty : calibrate(in, band, options);
  result.line_deletion_penalty = delta;
  result.word_deletion_penalty = delta;

  // rows[i][j - band.lo[i]] holds the best cost of consuming i lines and j words.
  std::vector<std::vector<Cell>> rows(n_lines + 1);
  for (std::size_t i = 0; i <= n_lines; ++i) rows[i].resize(band.hi[i] - band.lo[i] + 1);
  auto at = [&](std::size_t i, std::size_t j) -> Cell& { return rows[i][j - band.lo[i]]; };

  at(0, 0).cost = Cost{0.0, 0.0};
  for (std::size_t j = 1; j <= band.hi[0]; ++j) {
    at(0, j) = Cell{at(0, j - 1).cost.plus(delta), Move::kDeleteWord, 0};
  }

  for (std::size_t i = 1; i <= n_lines; ++i) {
    const auto& line = in.lines[i - 1];
    // Links into row i. Equal totals keep the shorter span.
    for (std::size_t s = band.lo[i - 1]; s <= band.hi[i - 1] && s < n_words; ++s) {
      const Cost base = at(i - 1, s).cost;
      if (!base.finite()) continue;
      IncrementalLcs lcs(line);
      const std::size_t max_m = std::min(options.max_span, n_words - s);
      for (std::size_t m = 1; m <= max_m; ++m) {
        const std::size_t lcs_len = lcs.push(in.words[s + m - 1]);
        const std::size_t j = s + m;
        if (j > band.hi[i]) break;
        if (j < band.lo[i]) continue;
        const Cost c = base.plus(cost_from_lcs(lcs_len, line.size(), m));
        Cell& cell = at(i, j);
        if (c < cell.cost || (c == cell.cost && cell.move == Move::kLink && m < cell.span)) {
          cell = Cell{c, Move::kLink, static_cast<std::uint32_t>(m)};
        }
      }
    }
    // Deletions only win when strictly cheaper than the best link.
    for (std::size_t j = band.lo[i]; j <= band.hi[i]; ++j) {
      Cell& cell = at(i, j);
      if (band.contains(i - 1, j)) {
        const Cost c = at(i - 1, j).cost.plus(delta);
        if (c < cell.cost) cell = Cell{c, Move::kDeleteLine, 0};
      }
      if (j > band.lo[i]) {
        const Cost c = at(i, j - 1).cost.plus(delta);
        if (c < cell.cost) cell = Cell{c, Move::kDeleteWord, 0};
      }
    }
  }

  if (!at(n_lines, n_words).cost.finite()) throw std::runtime_error("alignment band admits no path");
  result.total_cost = at(n_lines, n_words).cost.hi;

  std::size_t i = n_lines, j = n_words;
  while (i > 0 || j > 0) {
    const Cell& cell = at(i, j);
    switch (cell.move) {
      case Move::kLink: {
        const std::size_t first = j - cell.span;
        const std::vector<int> span(in.words.begin() + static_cast<std::ptrdiff_t>(first),
                                    in.words.begin() + static_cast<std::ptrdiff_t>(j));
        result.links.push_back(AlignmentLink{
            i - 1, first, j - 1, cost_from_lcs(lcs_length(in.lines[i - 1], span), in.lines[i - 1].size(), cell.span)});
        --i;
        j = first;
        break;
      }
      case Move::kDeleteLine:
        result.deleted_lines.push_back(--i);
        break;
      case Move::kDeleteWord:
        result.deleted_words.push_back(--j);
        break;
      case Move::kNone:
        throw std::logic_error("alignment backtrace reached an unset cell");
    }
  }
  std::reverse(result.links.begin(), result.links.end());
  std::reverse(result.deleted_lines.begin(), result.deleted_lines.end());
  std::reverse(result.deleted_words.begin(), result.deleted_words.end());

  return result;
}

std::vector<LabeledRange> extract_ranges(const Alignment& alignment,
                                         const std::vector<DialogueLine>& lines,
                                         const std::vector<AsrWord>& words,
                                         double confidence_threshold) {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw InputError("confidence_threshold must be in [0, 1]");
  }
  std::vector<LabeledRange> ranges;
  for (const auto& link : alignment.links) {
    if (link.cost > confidence_threshold) continue;
    if (link.line_index >= lines.size() || link.last_word >= words.size()) {
      throw InputError("alignment link refers past the end of its inputs");
    }
    TimeInterval iv{words[link.first_word].interval.start, words[link.last_word].interval.end};
    // Sloppy ASR timestamps can make neighbouring spans touch; clip to keep ranges disjoint.
    if (!ranges.empty()) iv.start = std::max(iv.start, ranges.back().interval.end);
    if (!(iv.end > iv.start)) continue;
    ranges.push_back(LabeledRange{iv, lines[link.line_index].speaker_name, link.cost});
  }
  return ranges;
}

PseudoLabelAudit audit_pseudo_labels(const std::vector<LabeledRange>& ranges,
                                     std::size_t total_lines, const SpeakerTimeline& reference) {
  PseudoLabelAudit audit;
  audit.coverage = total_lines == 0 ? 0.0 : static_cast<double>(ranges.size()) / static_cast<double>(total_lines);
  if (reference.empty()) return audit;

  std::size_t correct = 0;
  for (const auto& r : ranges) {
    const Turn* best = nullptr;
    double best_overlap = 0.0;
    for (const auto& t : reference.turns) {
      const double ov = overlap(t.interval, r.interval);
      if (ov > best_overlap) {
        best_overlap = ov;
        best = &t;
      }
    }
    if (best != nullptr && normalize_speaker_name(best->speaker) == normalize_speaker_name(r.speaker_name)) {
      ++correct;
    }
  }
  audit.accuracy = ranges.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(ranges.size());
  return audit;
}

SpeakerTimeline ranges_to_timeline(const std::vector<LabeledRange>& ranges) {
  SpeakerTimeline out;
  out.turns.reserve(ranges.size());
  for (const auto& r : ranges) out.turns.push_back(Turn{r.interval, r.speaker_name});
  return out;
}

}  // namespace scriptdiar
