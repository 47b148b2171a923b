#include "scriptdiar/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "scriptdiar/segmentation.hpp"

namespace scriptdiar {

namespace {

// Stream tags for derive_seed so each part of an episode draws independently.
enum Stream : std::uint64_t { kTurns = 1, kCentroids, kEmbeddings, kScript, kAsr, kPseudo };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int draw_weighted(const std::vector<double>& weights, int exclude, std::mt19937_64& rng) {
  double total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (static_cast<int>(j) != exclude) total += weights[j];
  }
  const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (static_cast<int>(j) == exclude) continue;
    acc += weights[j];
    last = static_cast<int>(j);
    if (r < acc) return last;
  }
  return last;
}

std::vector<Eigen::VectorXd> speaker_directions(const SynthConfig& config) {
  std::mt19937_64 rng(derive_seed(config.seed, kCentroids));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double max_cos = std::cos(config.min_speaker_angle_deg * std::numbers::pi / 180.0);
  constexpr int kAttempts = 10000;

  std::vector<Eigen::VectorXd> dirs;
  while (static_cast<int>(dirs.size()) < config.n_speakers) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
      Eigen::VectorXd v(config.embedding_dim);
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
      const double norm = v.norm();
      if (norm == 0.0) continue;
      v /= norm;
      placed = std::all_of(dirs.begin(), dirs.end(), [&](const Eigen::VectorXd& u) { return u.dot(v) <= max_cos; });
      if (placed) dirs.push_back(std::move(v));
    }
    if (!placed) {
      throw InputError("cannot place " + std::to_string(config.n_speakers) + " speakers " +
                       std::to_string(config.min_speaker_angle_deg) + " degrees apart in " +
                       std::to_string(config.embedding_dim) + " dimensions");
    }
  }
  return dirs;
}

std::string vocabulary_word(int id) { return "w" + std::to_string(id); }

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::vector<std::string> random_tokens(std::size_t count, int vocabulary, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, vocabulary - 1);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(vocabulary_word(pick(rng)));
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::string synth_speaker_name(int j) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%03d", j + 1);
  return buf;
}

void SynthConfig::validate() const {
  auto fraction = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError(std::string(name) + " must be in [0, 1]");
  };
  if (n_speakers < 1) throw InputError("n_speakers must be at least 1");
  if (!(runtime > 0.0)) throw InputError("runtime must be positive");
  if (!(turn_mean > 0.0) || !(turn_sd >= 0.0)) throw InputError("turn length distribution is invalid");
  if (!(speaker_skew >= 0.0)) throw InputError("speaker_skew must be non-negative");
  if (embedding_dim < 1) throw InputError("embedding_dim must be at least 1");
  if (!(intra_speaker_noise >= 0.0)) throw InputError("intra_speaker_noise must be non-negative");
  if (!(min_speaker_angle_deg >= 0.0 && min_speaker_angle_deg <= 180.0)) {
    throw InputError("min_speaker_angle_deg must be in [0, 180]");
  }
  fraction(pseudo_coverage, "pseudo_coverage");
  fraction(pseudo_accuracy, "pseudo_accuracy");
  fraction(script_edit_rate, "script_edit_rate");
  fraction(asr_substitution_rate, "asr_substitution_rate");
  fraction(gap_probability, "gap_probability");
  if (!(subsegment_length > 0.0)) throw InputError("subsegment_length must be positive");
  if (!(gap_min > 0.0 && gap_max >= gap_min)) throw InputError("gap range is invalid");
  if (!(words_per_second > 0.0)) throw InputError("words_per_second must be positive");
  if (vocabulary_size < 2) throw InputError("vocabulary_size must be at least 2");
}

SynthEpisode generate_episode(const SynthConfig& config) {
  config.validate();
  const std::vector<Eigen::VectorXd> directions = speaker_directions(config);

  SynthEpisode ep;
  std::vector<int> turn_speaker;
  // Turns and speech regions.
  {
    std::mt19937_64 rng(derive_seed(config.seed, kTurns));
    std::vector<double> weights(static_cast<std::size_t>(config.n_speakers));
    for (int j = 0; j < config.n_speakers; ++j) weights[static_cast<std::size_t>(j)] = std::pow(j + 1.0, -config.speaker_skew);
    std::normal_distribution<double> length(config.turn_mean, config.turn_sd);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> gap(config.gap_min, config.gap_max);

    const double step = config.subsegment_length;
    double t = config.grid_aligned_turns ? step : gap(rng);
    double region_start = t;
    int previous = -1;
    while (t < config.runtime) {
      const int speaker = config.n_speakers == 1 ? 0 : draw_weighted(weights, previous, rng);
      double dur = std::max(0.3, length(rng));
      if (config.grid_aligned_turns) dur = std::max(1.0, std::round(dur / step)) * step;
      ep.reference.turns.push_back(Turn{TimeInterval{t, t + dur}, synth_speaker_name(speaker)});
      turn_speaker.push_back(speaker);
      t += dur;
      if (unit(rng) < config.gap_probability || t >= config.runtime) {
        ep.regions.push_back(SpeechRegion{TimeInterval{region_start, t}});
        double g = gap(rng);
        if (config.grid_aligned_turns) g = std::max(1.0, std::round(g / step)) * step;
        t += g;
        region_start = t;
        previous = -1;
      } else {
        previous = speaker;
      }
    }
  }

  // Sub-segment embeddings: overlap-weighted speaker directions plus noise.
  {
    std::mt19937_64 rng(derive_seed(config.seed, kEmbeddings));
    const double sd = config.intra_speaker_noise / std::sqrt(static_cast<double>(config.embedding_dim));
    std::normal_distribution<double> noise(0.0, 1.0);
    ep.embeddings.subsegments = subsegment(ep.regions, config.subsegment_length);
    ep.embeddings.matrix.resize(static_cast<Eigen::Index>(ep.embeddings.subsegments.size()), config.embedding_dim);
    std::size_t first_turn = 0;
    for (const auto& seg : ep.embeddings.subsegments) {
      while (first_turn < ep.reference.turns.size() &&
             ep.reference.turns[first_turn].interval.end <= seg.interval.start) {
        ++first_turn;
      }
      Eigen::VectorXd v = Eigen::VectorXd::Zero(config.embedding_dim);
      for (std::size_t k = first_turn; k < ep.reference.turns.size(); ++k) {
        const auto& turn = ep.reference.turns[k];
        if (turn.interval.start >= seg.interval.end) break;
        v += overlap(turn.interval, seg.interval) / seg.interval.duration() *
             directions[static_cast<std::size_t>(turn_speaker[k])];
      }
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += sd * noise(rng);
      const double norm = v.norm();
      ep.embeddings.matrix.row(static_cast<Eigen::Index>(seg.index)) = norm > 0.0 ? Eigen::VectorXd(v / norm) : v;
    }
  }

  // Spoken text per turn; the script and the ASR stream both derive from it.
  std::vector<std::vector<std::string>> spoken;
  {
    std::mt19937_64 rng(derive_seed(config.seed, kScript));
    for (const auto& turn : ep.reference.turns) {
      const auto count = static_cast<std::size_t>(
          std::clamp(std::lround(turn.interval.duration() * config.words_per_second), 1L, 40L));
      spoken.push_back(random_tokens(count, config.vocabulary_size, rng));
    }

    std::vector<DialogueLine> script;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> edit_kind(0, 2);
    for (std::size_t k = 0; k < spoken.size(); ++k) {
      DialogueLine line{0, ep.reference.turns[k].speaker, join(spoken[k])};
      if (unit(rng) < config.script_edit_rate) {
        switch (edit_kind(rng)) {
          case 0:  // cut from the final audio
            continue;
          case 1:  // rewritten during the shoot
            line.text = join(random_tokens(spoken[k].size(), config.vocabulary_size, rng));
            break;
          default:  // moved: swapped with the previous line
            if (!script.empty()) {
              script.push_back(line);
              std::swap(script[script.size() - 1], script[script.size() - 2]);
              continue;
            }
            break;
        }
      }
      script.push_back(std::move(line));
    }
    for (std::size_t i = 0; i < script.size(); ++i) script[i].index = i;
    ep.script = std::move(script);
  }

  {
    std::mt19937_64 rng(derive_seed(config.seed, kAsr));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, config.vocabulary_size - 1);
    for (std::size_t k = 0; k < spoken.size(); ++k) {
      const auto& iv = ep.reference.turns[k].interval;
      const double slot = iv.duration() / static_cast<double>(spoken[k].size());
      for (std::size_t w = 0; w < spoken[k].size(); ++w) {
        std::string token = spoken[k][w];
        if (unit(rng) < config.asr_substitution_rate) token = vocabulary_word(pick(rng));
        const double s = iv.start + static_cast<double>(w) * slot;
        ep.asr.push_back(AsrWord{std::move(token), TimeInterval{s, s + 0.9 * slot}});
      }
    }
  }
  return ep;
}

std::vector<LabeledRange> sample_pseudo_ranges(const SpeakerTimeline& reference, const SynthConfig& config) {
  config.validate();
  const SpeakerTimeline turns = reference.sorted();
  const std::vector<std::string> speakers = reference.speakers();
  const std::size_t n = turns.turns.size();

  std::mt19937_64 rng(derive_seed(config.seed, kPseudo));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
  }

  const auto take = static_cast<std::size_t>(std::llround(config.pseudo_coverage * static_cast<double>(n)));
  std::vector<std::pair<std::size_t, std::string>> picked;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    // Draws happen for every turn so the outcome of turn r is coverage independent.
    const double u = unit(rng);
    const std::size_t offset =
        speakers.size() > 1 ? std::uniform_int_distribution<std::size_t>(1, speakers.size() - 1)(rng) : 0;
    if (r >= take) continue;
    const Turn& turn = turns.turns[order[r]];
    std::string name = turn.speaker;
    if (u >= config.pseudo_accuracy && speakers.size() > 1) {
      const auto self = static_cast<std::size_t>(std::lower_bound(speakers.begin(), speakers.end(), name) - speakers.begin());
      name = speakers[(self + offset) % speakers.size()];
    }
    picked.emplace_back(order[r], std::move(name));
  }
  std::sort(picked.begin(), picked.end());

  std::vector<LabeledRange> ranges;
  for (auto& [idx, name] : picked) ranges.push_back(LabeledRange{turns.turns[idx].interval, std::move(name), 0.0});
  return ranges;
}

SynthConfig paper_regime(SynthConfig config) {
  config.script_edit_rate = 0.5;
  config.asr_substitution_rate = 0.5;
  return config;
}

PseudoLabeling generate_pseudo_labels(const SpeakerTimeline& reference, const SynthConfig& config,
                                      const std::vector<SubSegment>& subsegments) {
  return project_labels(ranges_to_timeline(sample_pseudo_ranges(reference, config)), subsegments, 0.5);
}

}  // namespace scriptdiar
