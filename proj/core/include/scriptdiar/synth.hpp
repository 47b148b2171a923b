#pragma once

#include <cstdint>
#include <vector>

#include "scriptdiar/align.hpp"
#include "scriptdiar/types.hpp"

namespace scriptdiar {

/// Knobs for a synthetic episode. Durations are in seconds.
struct SynthConfig {
  int n_speakers = 40;
  double runtime = 1800.0;
  double turn_mean = 4.0;
  double turn_sd = 2.5;
  /// Zipf exponent of per-turn speaker choice.
  double speaker_skew = 1.3;
  int embedding_dim = 512;
  /// Expected norm of the Gaussian noise added to a unit speaker direction.
  double intra_speaker_noise = 0.15;
  double min_speaker_angle_deg = 25.0;
  double pseudo_coverage = 0.109;
  double pseudo_accuracy = 0.745;
  double script_edit_rate = 0.1;
  double asr_substitution_rate = 0.1;
  double subsegment_length = 1.0;
  /// Chance that a turn is followed by silence (which starts a new region).
  double gap_probability = 0.3;
  double gap_min = 0.5;
  double gap_max = 2.0;
  double words_per_second = 2.5;
  int vocabulary_size = 5000;
  /// Round turn lengths to whole sub-segments so turn changes fall on the grid.
  bool grid_aligned_turns = true;
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range values.
  void validate() const;
};

struct SynthEpisode {
  std::vector<SpeechRegion> regions;
  EmbeddingSet embeddings;
  SpeakerTimeline reference;
  std::vector<DialogueLine> script;
  std::vector<AsrWord> asr;
};

/// Deterministic in `config` (including the seed).
SynthEpisode generate_episode(const SynthConfig& config);

/// Picks round(pseudo_coverage * turns) reference turns and labels each with
/// its true speaker with probability pseudo_accuracy, else with a uniformly
/// drawn wrong speaker. The turn order and per-turn draws depend only on the
/// seed, so raising the coverage only adds turns.
std::vector<LabeledRange> sample_pseudo_ranges(const SpeakerTimeline& reference, const SynthConfig& config);

/// sample_pseudo_ranges projected onto sub-segments.
PseudoLabeling generate_pseudo_labels(const SpeakerTimeline& reference, const SynthConfig& config,
                                      const std::vector<SubSegment>& subsegments);

/// `config` with script and ASR corruption raised until extract keeps roughly
/// 11% of lines (about 0.11 coverage at 40 speakers and 30 minutes).
SynthConfig paper_regime(SynthConfig config);

/// Independent seed for stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Speaker name used for synthetic speaker j (0-based).
std::string synth_speaker_name(int j);

}  // namespace scriptdiar
