#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scriptdiar/align.hpp"
#include "scriptdiar/cluster.hpp"
#include "scriptdiar/io.hpp"
#include "scriptdiar/metrics.hpp"
#include "scriptdiar/synth.hpp"

namespace scriptdiar {

namespace fs = std::filesystem;

/// Raised by extract when an episode has no script to mine.
class NoPseudoLabels : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitInvalidInput = 2, kExitNoPseudoLabels = 3 };

struct PipelineConfig {
  DiarizeParams diarize;
  AlignOptions align;
  double confidence_threshold = 0.3;
  double min_overlap_fraction = 0.5;
  double collar = 0.0;
  double scd_tolerance = 0.1;
  std::uint64_t seed = 0;
  /// Worker threads for corpus commands; 0 uses the hardware concurrency.
  int workers = 0;

  void validate() const;
};

/// Reads a JSON config; keys absent from the file keep their defaults.
PipelineConfig load_pipeline_config(const fs::path& path);
std::string pipeline_config_json(const PipelineConfig& config);

// --- extract ---------------------------------------------------------------

struct ExtractReport {
  std::size_t script_lines = 0;
  std::size_t asr_words = 0;
  std::size_t links = 0;
  std::size_t ranges = 0;
  double coverage = 0.0;
  std::optional<double> accuracy;
  std::size_t labeled_subsegments = 0;
  int k_prime = 0;
  double deletion_penalty = 0.0;

  std::string text() const;
  std::string json() const;
};

/// align -> extract_ranges -> project_labels. Writes ranges.json,
/// pseudo_labels.json and extract.json into `out_dir`.
ExtractReport run_extract(const io::Episode& episode, const fs::path& out_dir, const PipelineConfig& config);

// --- diarize ---------------------------------------------------------------

enum class Method { kUnsupervised, kUnsupervisedKPrime, kSemiSupervised };

Method parse_method(const std::string& name);
std::string method_name(Method method);

struct DiarizeReport {
  ClusterResult clusters;
  SpeakerTimeline hypothesis;
};

/// Writes hypothesis.rttm and clusters.json into `out_dir`. Pseudo labels are
/// read from `pseudo_path`, else from `out_dir`/pseudo_labels.json.
DiarizeReport run_diarize(const io::Episode& episode, Method method, const std::optional<fs::path>& pseudo_path,
                          const fs::path& out_dir, const PipelineConfig& config);

// --- score -----------------------------------------------------------------

struct ScoreReport {
  DerBreakdown der;
  ScdScore scd;
  double collar = 0.0;

  std::string text() const;
  std::string json() const;
};

ScoreReport run_score(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis, double collar,
                      double scd_tolerance);

// --- synth -----------------------------------------------------------------

struct CorpusOptions {
  int episodes = 1;
  /// When both are positive, each episode draws its speaker count uniformly from this range.
  int speakers_min = 0;
  int speakers_max = 0;
};

/// Per-episode config: seed and speaker count derived from the base config.
SynthConfig episode_config(const SynthConfig& base, const CorpusOptions& corpus, int episode_index);

/// Writes one episode directory (episode.json, embeddings.bin, script.tsv,
/// asr.json, reference.rttm, synth.json).
void write_synth_episode(const SynthConfig& config, const std::string& name, const fs::path& dir);

/// Writes a single episode into `out_dir`, or ep000, ep001, ... beneath it.
/// Returns the episode directories.
std::vector<fs::path> run_synth(const SynthConfig& base, const CorpusOptions& corpus, const fs::path& out_dir,
                                int workers = 1);

// --- sweep -----------------------------------------------------------------

struct SweepOptions {
  std::vector<double> fractions{0.01, 0.03, 0.10, 1.0};
  std::vector<std::uint64_t> seeds{0};
  double pseudo_accuracy = 0.745;
};

struct SweepRun {
  std::string episode;
  std::uint64_t seed = 0;
  int true_k = 0;
  int k_tilde = 0;
  double unsupervised_der = 0.0;
  double unsupervised_scd = 0.0;
  int unsupervised_k = 0;
  /// Indexed like SweepOptions::fractions.
  std::vector<double> semi_der, semi_scd, kprime_der, kprime_scd;
  std::vector<int> semi_k, k_prime;
};

struct SweepReport {
  SweepOptions options;
  std::vector<SweepRun> runs;

  double mean_unsupervised_der() const;
  double mean_unsupervised_scd() const;
  double mean_semi_der(std::size_t fraction) const;
  double mean_semi_scd(std::size_t fraction) const;
  double mean_kprime_der(std::size_t fraction) const;
  double mean_kprime_scd(std::size_t fraction) const;

  std::string text() const;
  std::string json() const;
  /// fraction, semi/unsupervised/k' means for plotting.
  std::string curve_csv() const;
  /// Per run: true k, k_tilde and the semi-supervised k at each fraction.
  std::string speaker_count_csv() const;
};

/// Evaluates a synthetic corpus directory (episodes with reference.rttm).
SweepReport run_sweep(const std::vector<io::Episode>& episodes, const SweepOptions& options,
                      const PipelineConfig& config);

/// Episodes under `corpus_dir`, sorted by directory name.
std::vector<io::Episode> list_corpus(const fs::path& corpus_dir);

/// Writes sweep.txt, sweep.json, sweep_curve.csv and speaker_counts.csv.
void write_sweep(const SweepReport& report, const fs::path& out_dir);

}  // namespace scriptdiar
