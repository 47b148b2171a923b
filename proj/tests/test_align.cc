#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scriptdiar/align.hpp"

using namespace scriptdiar;

namespace {

std::vector<DialogueLine> make_lines(const std::vector<std::string>& texts) {
  std::vector<DialogueLine> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(DialogueLine{i, "S" + std::to_string(i), texts[i]});
  return out;
}

std::vector<AsrWord> make_words(const std::vector<std::string>& tokens, double step = 0.5) {
  std::vector<AsrWord> out;
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    const double s = static_cast<double>(j) * step;
    out.push_back(AsrWord{tokens[j], {s, s + step * 0.8}});
  }
  return out;
}

// Cost of an alignment recomputed with the oracle, summed line by line.
double oracle_cost(const Alignment& a, const std::vector<std::vector<std::string>>& lines,
                   const std::vector<std::string>& words) {
  std::vector<const AlignmentLink*> by_line(lines.size(), nullptr);
  std::size_t covered = 0;
  for (const auto& l : a.links) {
    by_line[l.line_index] = &l;
    covered += l.span();
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!by_line[i]) {
      cost += a.line_deletion_penalty;
      continue;
    }
    const auto* l = by_line[i];
    const std::vector<std::string> span(words.begin() + static_cast<long>(l->first_word),
                                        words.begin() + static_cast<long>(l->last_word) + 1);
    cost += oracle::link_cost(lines[i], span);
  }
  return cost + a.word_deletion_penalty * static_cast<double>(words.size() - covered);
}

void check_structure(const Alignment& a, std::size_t n_lines, std::size_t n_words, std::size_t max_span) {
  std::vector<int> line_seen(n_lines, 0), word_seen(n_words, 0);
  for (std::size_t k = 0; k < a.links.size(); ++k) {
    const auto& l = a.links[k];
    ASSERT_LE(l.first_word, l.last_word);
    EXPECT_GE(l.span(), 1u);
    EXPECT_LE(l.span(), max_span);
    if (k > 0) {
      EXPECT_LT(a.links[k - 1].line_index, l.line_index);
      EXPECT_LT(a.links[k - 1].last_word, l.first_word);
    }
    ++line_seen[l.line_index];
    for (std::size_t w = l.first_word; w <= l.last_word; ++w) ++word_seen[w];
  }
  for (auto i : a.deleted_lines) ++line_seen[i];
  for (auto j : a.deleted_words) ++word_seen[j];
  for (int c : line_seen) EXPECT_EQ(c, 1);
  for (int c : word_seen) EXPECT_EQ(c, 1);
}

}  // namespace

TEST(NormalizeText, Examples) {
  EXPECT_EQ(normalize_text("Hello, World!"), "hello world");
  EXPECT_EQ(normalize_text("  don't   stop "), "dont stop");
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(tokenize("A-b  c."), (std::vector<std::string>{"ab", "c"}));
}

TEST(LinkCost, Examples) {
  EXPECT_DOUBLE_EQ(token_lcs_cost({"hello", "world"}, {"hello", "world"}), 0.0);
  EXPECT_DOUBLE_EQ(token_lcs_cost({"hello", "world"}, {"goodbye", "moon"}), 1.0);
  EXPECT_NEAR(token_lcs_cost(tokenize("hello there world"), {"hello", "world"}), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(token_lcs_cost({}, {"a"}), 1.0);
  DialogueLine line{0, "A", "Hello there, world"};
  EXPECT_NEAR(span_cost(line, make_words({"Hello", "world"})), 0.2, 1e-15);
}

TEST(LinkCost, MatchesOracleOnRandomTokens) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> tok(0, 3), len(1, 7);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> a(len(rng)), b(len(rng));
    for (auto& s : a) s = std::string(1, static_cast<char>('a' + tok(rng)));
    for (auto& s : b) s = std::string(1, static_cast<char>('a' + tok(rng)));
    EXPECT_DOUBLE_EQ(token_lcs_cost(a, b), oracle::link_cost(a, b));
    EXPECT_GE(token_lcs_cost(a, b), 0.0);
    EXPECT_LE(token_lcs_cost(a, b), 1.0);
  }
}

TEST(Align, ExactTranscript) {
  const auto lines = make_lines({"a b", "c d"});
  const auto words = make_words({"a", "b", "c", "d"});
  const auto a = align(lines, words);
  ASSERT_EQ(a.links.size(), 2u);
  EXPECT_EQ(a.links[0], (AlignmentLink{0, 0, 1, 0.0}));
  EXPECT_EQ(a.links[1], (AlignmentLink{1, 2, 3, 0.0}));
  EXPECT_TRUE(a.deleted_lines.empty());
  EXPECT_TRUE(a.deleted_words.empty());
}

TEST(Align, UnmatchedLineDeleted) {
  const auto lines = make_lines({"a b", "X Y", "c d"});
  const auto words = make_words({"a", "b", "c", "d"});
  const auto a = align(lines, words);
  EXPECT_EQ(a.deleted_lines, std::vector<std::size_t>{1});
  ASSERT_EQ(a.links.size(), 2u);
  EXPECT_EQ(a.links[0].line_index, 0u);
  EXPECT_EQ(a.links[1].line_index, 2u);
  // The exhaustive oracle agrees on this instance.
  const std::vector<std::vector<std::string>> tl{{"a", "b"}, {"x", "y"}, {"c", "d"}};
  EXPECT_DOUBLE_EQ(a.total_cost, oracle::brute_force_alignment_cost(tl, {"a", "b", "c", "d"}, 50,
                                                                    a.line_deletion_penalty, a.word_deletion_penalty));
}

TEST(Align, LeadingWordDeleted) {
  const auto lines = make_lines({"a b"});
  const auto words = make_words({"z", "a", "b"});
  const auto a = align(lines, words);
  EXPECT_EQ(a.deleted_words, std::vector<std::size_t>{0});
  ASSERT_EQ(a.links.size(), 1u);
  EXPECT_EQ(a.links[0], (AlignmentLink{0, 1, 2, 0.0}));
  EXPECT_DOUBLE_EQ(a.total_cost, oracle::brute_force_alignment_cost({{"a", "b"}}, {"z", "a", "b"}, 50,
                                                                    a.line_deletion_penalty, a.word_deletion_penalty));
}

TEST(Align, FixedPenaltyAndSpanLimit) {
  AlignOptions opt;
  opt.deletion_penalty = 0.4;
  opt.max_span = 2;
  const auto lines = make_lines({"a b c"});
  const auto words = make_words({"a", "b", "c"});
  const auto a = align(lines, words, opt);
  // A three-word span is not allowed, so one word must be deleted.
  ASSERT_EQ(a.links.size(), 1u);
  EXPECT_EQ(a.links[0].span(), 2u);
  EXPECT_EQ(a.deleted_words.size(), 1u);
  EXPECT_NEAR(a.total_cost, 0.2 + 0.4, 1e-12);
}

TEST(Align, EmptyInputs) {
  const auto a = align(make_lines({"a"}), {});
  EXPECT_EQ(a.deleted_lines, std::vector<std::size_t>{0});
  const auto b = align({}, make_words({"a", "b"}));
  EXPECT_EQ(b.deleted_words.size(), 2u);
}

TEST(Align, RejectsBadOptions) {
  AlignOptions opt;
  opt.max_span = 0;
  EXPECT_THROW(align(make_lines({"a"}), make_words({"a"}), opt), InputError);
  opt = {};
  opt.deletion_percentile = 1.5;
  EXPECT_THROW(align(make_lines({"a"}), make_words({"a"}), opt), InputError);
}

TEST(Align, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> tok(0, 4), n_lines(1, 5), n_words(1, 10), line_len(1, 3);
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<std::vector<std::string>> lt(static_cast<std::size_t>(n_lines(rng)));
    std::vector<std::string> texts;
    for (auto& l : lt) {
      l.resize(static_cast<std::size_t>(line_len(rng)));
      std::string text;
      for (auto& t : l) {
        t = std::string(1, static_cast<char>('a' + tok(rng)));
        text += t + " ";
      }
      texts.push_back(text);
    }
    std::vector<std::string> wt(static_cast<std::size_t>(n_words(rng)));
    for (auto& w : wt) w = std::string(1, static_cast<char>('a' + tok(rng)));
    AlignOptions opt;
    opt.max_span = 1 + static_cast<std::size_t>(trial % 4);
    if (trial % 2) opt.deletion_penalty = 0.1 * (trial % 7);
    const auto lines = make_lines(texts);
    const auto words = make_words(wt);
    const auto a = align(lines, words, opt);
    check_structure(a, lines.size(), words.size(), opt.max_span);
    const double brute =
        oracle::brute_force_alignment_cost(lt, wt, opt.max_span, a.line_deletion_penalty, a.word_deletion_penalty);
    EXPECT_NEAR(oracle_cost(a, lt, wt), brute, 1e-12) << "trial " << trial;
    EXPECT_NEAR(a.total_cost, brute, 1e-12) << "trial " << trial;
    EXPECT_EQ(oracle::exact_alignment_cost(a, lt, wt),
              oracle::exact_brute_force_alignment_cost(lt, wt, opt.max_span, a.line_deletion_penalty,
                                                       a.word_deletion_penalty))
        << "trial " << trial;
  }
}

TEST(Align, SelfAlignmentIsFree) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> tok(0, 200), len(1, 12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> texts, concat;
    for (int i = 0; i < 40; ++i) {
      std::string text;
      for (int k = len(rng); k > 0; --k) {
        const std::string t = "w" + std::to_string(tok(rng));
        text += t + " ";
        concat.push_back(t);
      }
      texts.push_back(text);
    }
    const auto lines = make_lines(texts);
    const auto a = align(lines, make_words(concat));
    EXPECT_EQ(a.links.size(), lines.size());
    EXPECT_TRUE(a.deleted_lines.empty());
    EXPECT_TRUE(a.deleted_words.empty());
    for (const auto& l : a.links) EXPECT_EQ(l.cost, 0.0);
  }
}

TEST(Align, BandedLargeInputStaysMonotone) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> tok(0, 3000), len(3, 12);
  std::vector<std::string> texts, concat;
  for (int i = 0; i < 400; ++i) {
    std::string text;
    for (int k = len(rng); k > 0; --k) {
      const std::string t = "w" + std::to_string(tok(rng));
      text += t + " ";
      if (i % 10 != 3) concat.push_back(t);  // every tenth line missing from the audio
    }
    texts.push_back(text);
  }
  AlignOptions opt;
  opt.band_threshold_cells = 10'000;  // force the band
  const auto lines = make_lines(texts);
  const auto words = make_words(concat);
  const auto a = align(lines, words, opt);
  check_structure(a, lines.size(), words.size(), opt.max_span);
  EXPECT_GE(a.links.size(), 350u);
}

TEST(ExtractRanges, Examples) {
  const auto lines = make_lines({"a b", "c"});
  std::vector<AsrWord> words{{"a", {1.0, 1.3}}, {"b", {1.4, 1.9}}, {"c", {2.0, 2.5}}};
  Alignment a;
  a.links = {AlignmentLink{0, 0, 1, 0.0}, AlignmentLink{1, 2, 2, 0.9}};
  auto r = extract_ranges(a, lines, words, 0.3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].interval, (TimeInterval{1.0, 1.9}));
  EXPECT_EQ(r[0].speaker_name, "S0");
  a.links[1].cost = 0.1;
  r = extract_ranges(a, lines, words, 0.3);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].speaker_name, "S1");
  EXPECT_LE(r[0].interval.end, r[1].interval.start);
}

TEST(ExtractRanges, DisjointAndSortedOnRealAlignments) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> tok(0, 50), len(2, 8);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<std::string> texts;
  std::vector<AsrWord> words;
  double t = 0.0;
  for (int i = 0; i < 60; ++i) {
    std::string text;
    for (int k = len(rng); k > 0; --k) {
      const std::string tk = "w" + std::to_string(tok(rng));
      text += tk + " ";
      const double s = std::max(0.0, t + jitter(rng));
      words.push_back(AsrWord{tk, {s, s + 0.4}});
      t += 0.4;
    }
    texts.push_back(text);
  }
  std::sort(words.begin(), words.end(),
            [](const AsrWord& x, const AsrWord& y) { return x.interval.start < y.interval.start; });
  const auto lines = make_lines(texts);
  const auto ranges = extract_ranges(align(lines, words), lines, words, 0.3);
  ASSERT_FALSE(ranges.empty());
  for (std::size_t i = 1; i < ranges.size(); ++i) EXPECT_LE(ranges[i - 1].interval.end, ranges[i].interval.start);
}

TEST(Audit, CoverageAndAccuracy) {
  SpeakerTimeline ref{{Turn{{0.0, 2.0}, "ANNA"}, Turn{{2.0, 4.0}, "BEN"}}};
  std::vector<LabeledRange> exact{{{0.0, 2.0}, "anna", 0.0}, {{2.0, 4.0}, "BEN", 0.0}};
  auto audit = audit_pseudo_labels(exact, 4, ref);
  EXPECT_DOUBLE_EQ(audit.coverage, 0.5);
  EXPECT_DOUBLE_EQ(*audit.accuracy, 1.0);
  exact[1].speaker_name = "ANNA";
  EXPECT_DOUBLE_EQ(*audit_pseudo_labels(exact, 4, ref).accuracy, 0.5);
  EXPECT_DOUBLE_EQ(audit_pseudo_labels({}, 10, ref).coverage, 0.0);
  EXPECT_FALSE(audit_pseudo_labels(exact, 4, {}).accuracy.has_value());
}
