// Batch driver: extract, diarize, score, synth, sweep.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scriptdiar/io.hpp"
#include "scriptdiar/pipeline.hpp"

namespace sd = scriptdiar;
namespace fs = std::filesystem;

namespace {

// Flags that override fields of a config file. Unset flags leave the file (or default) value.
struct Overrides {
  std::optional<fs::path> config_path;
  std::optional<double> threshold_percentile, threshold_factor;
  std::optional<int> k_max, max_iters;
  std::optional<bool> normalize_rows;
  std::optional<int> max_span;
  std::optional<double> deletion_percentile, confidence_threshold, min_overlap_fraction;
  std::optional<double> collar, scd_tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  void add_clustering(CLI::App* app) {
    app->add_option("--threshold-percentile", threshold_percentile, "Row percentile for affinity thresholding");
    app->add_option("--threshold-factor", threshold_factor, "Multiplier for entries below the row percentile");
    app->add_option("--k-max", k_max, "Largest speaker count considered by the eigen-gap (0 = automatic)");
    app->add_option("--normalize-rows", normalize_rows, "Unit-normalize spectral embedding rows");
    app->add_option("--max-iters", max_iters, "Lloyd iteration cap");
  }
  void add_alignment(CLI::App* app) {
    app->add_option("--max-span", max_span, "Most ASR words one script line may absorb");
    app->add_option("--deletion-percentile", deletion_percentile, "Quantile of span costs used as deletion penalty");
    app->add_option("--confidence-threshold", confidence_threshold, "Highest link cost kept as a pseudo label");
    app->add_option("--min-overlap-fraction", min_overlap_fraction, "Sub-segment overlap needed to take a label");
  }
  void add_scoring(CLI::App* app) {
    app->add_option("--collar", collar, "No-score collar around reference boundaries (s)");
    app->add_option("--scd-tolerance", scd_tolerance, "Change-point matching radius (s)");
  }
  void add_common(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--workers", workers, "Worker threads for corpus commands (0 = all cores)");
  }

  sd::PipelineConfig resolve() const {
    sd::PipelineConfig c = config_path ? sd::load_pipeline_config(*config_path) : sd::PipelineConfig{};
    auto set = [](auto& field, const auto& value) {
      if (value) field = *value;
    };
    set(c.diarize.refine.threshold_percentile, threshold_percentile);
    set(c.diarize.refine.threshold_factor, threshold_factor);
    set(c.diarize.k_max, k_max);
    set(c.diarize.kmeans.max_iters, max_iters);
    set(c.diarize.normalize_rows, normalize_rows);
    set(c.align.max_span, max_span);
    set(c.align.deletion_percentile, deletion_percentile);
    set(c.confidence_threshold, confidence_threshold);
    set(c.min_overlap_fraction, min_overlap_fraction);
    set(c.collar, collar);
    set(c.scd_tolerance, scd_tolerance);
    set(c.seed, seed);
    set(c.workers, workers);
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Script-guided speaker diarization"};
  app.require_subcommand(1);
  Overrides ov;

  // extract
  fs::path episode_dir, out_dir;
  bool as_json = false;
  auto* extract = app.add_subcommand("extract", "Align the script to ASR and write pseudo labels");
  extract->add_option("--episode", episode_dir, "Episode directory or manifest")->required();
  extract->add_option("--out", out_dir, "Output directory")->required();
  extract->add_flag("--json", as_json, "Print the report as JSON");
  ov.add_alignment(extract);
  ov.add_common(extract);

  // diarize
  std::string method = "semi";
  std::optional<fs::path> pseudo_path;
  auto* diarize = app.add_subcommand("diarize", "Cluster sub-segment embeddings into speakers");
  diarize->add_option("--episode", episode_dir, "Episode directory or manifest")->required();
  diarize->add_option("--out", out_dir, "Output directory")->required();
  diarize->add_option("--method", method, "unsupervised | unsupervised-kprime | semi")
      ->check(CLI::IsMember({"unsupervised", "unsupervised-kprime", "semi"}));
  diarize->add_option("--pseudo-labels", pseudo_path, "Pseudo label file (default: <out>/pseudo_labels.json)");
  ov.add_clustering(diarize);
  ov.add_common(diarize);

  // score
  fs::path reference_path, hypothesis_path;
  std::optional<fs::path> report_dir;
  auto* score = app.add_subcommand("score", "Compute DER and SCD F1 for an RTTM pair");
  score->add_option("--reference", reference_path, "Reference RTTM")->required()->check(CLI::ExistingFile);
  score->add_option("--hypothesis", hypothesis_path, "Hypothesis RTTM")->required()->check(CLI::ExistingFile);
  score->add_option("--out", report_dir, "Write score.txt and score.json here");
  score->add_flag("--json", as_json, "Print the report as JSON");
  ov.add_scoring(score);
  ov.add_common(score);

  // synth
  sd::SynthConfig synth_config;
  sd::CorpusOptions corpus;
  auto* synth = app.add_subcommand("synth", "Generate synthetic episodes with ground truth");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--episodes", corpus.episodes, "Number of episodes (>1 writes ep000, ep001, ...)");
  synth->add_option("--speakers", synth_config.n_speakers, "Speakers per episode");
  synth->add_option("--speakers-min", corpus.speakers_min, "Draw speaker counts from [min, max]");
  synth->add_option("--speakers-max", corpus.speakers_max);
  synth->add_option("--runtime", synth_config.runtime, "Episode length (s)");
  synth->add_option("--turn-mean", synth_config.turn_mean, "Mean turn length (s)");
  synth->add_option("--turn-sd", synth_config.turn_sd, "Turn length sd (s)");
  synth->add_option("--speaker-skew", synth_config.speaker_skew, "Zipf exponent of speaker frequencies");
  synth->add_option("--dim", synth_config.embedding_dim, "Embedding dimension");
  synth->add_option("--noise", synth_config.intra_speaker_noise, "Expected noise norm per embedding");
  synth->add_option("--min-angle", synth_config.min_speaker_angle_deg, "Minimum angle between speakers (deg)");
  auto* edit_rate =
      synth->add_option("--script-edit-rate", synth_config.script_edit_rate, "Fraction of script lines edited");
  auto* asr_rate =
      synth->add_option("--asr-substitution-rate", synth_config.asr_substitution_rate, "ASR token error rate");
  bool paper_regime = false;
  synth->add_flag("--paper-regime", paper_regime,
                  "Script and ASR noise at which extract labels about 11% of lines (explicit rates still apply)");
  synth->add_option("--subsegment-length", synth_config.subsegment_length, "Sub-segment length (s)");
  synth->add_option("--seed", synth_config.seed, "Random seed");
  synth->add_option("--workers", ov.workers, "Worker threads (0 = all cores)");

  // sweep
  fs::path corpus_dir;
  sd::SweepOptions sweep_options;
  auto* sweep = app.add_subcommand("sweep", "Pseudo-label fraction ablation over a synthetic corpus");
  sweep->add_option("--corpus", corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--fractions", sweep_options.fractions, "Pseudo-label coverage fractions")->delimiter(',');
  sweep->add_option("--seeds", sweep_options.seeds, "Seeds")->delimiter(',');
  sweep->add_option("--pseudo-accuracy", sweep_options.pseudo_accuracy, "Accuracy of sampled pseudo labels");
  ov.add_clustering(sweep);
  ov.add_scoring(sweep);
  ov.add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sd::kExitOk : sd::kExitInvalidInput;
  }

  try {
    if (extract->parsed()) {
      const auto config = ov.resolve();
      const auto report = sd::run_extract(sd::io::read_episode(episode_dir), out_dir, config);
      std::cout << (as_json ? report.json() : report.text());
    } else if (diarize->parsed()) {
      const auto config = ov.resolve();
      const auto report =
          sd::run_diarize(sd::io::read_episode(episode_dir), sd::parse_method(method), pseudo_path, out_dir, config);
      std::cout << "k_tilde " << report.clusters.k_tilde << "  k' " << report.clusters.k_prime << "  k "
                << report.clusters.k << "  iterations " << report.clusters.iterations << "\n";
    } else if (score->parsed()) {
      const auto config = ov.resolve();
      const auto report = sd::run_score(sd::io::read_rttm(reference_path), sd::io::read_rttm(hypothesis_path),
                                        config.collar, config.scd_tolerance);
      if (report_dir) {
        sd::io::write_text(*report_dir / "score.txt", report.text());
        sd::io::write_text(*report_dir / "score.json", report.json());
      }
      std::cout << (as_json ? report.json() : report.text());
    } else if (synth->parsed()) {
      if (paper_regime) {
        const auto preset = sd::paper_regime(synth_config);
        if (edit_rate->count() == 0) synth_config.script_edit_rate = preset.script_edit_rate;
        if (asr_rate->count() == 0) synth_config.asr_substitution_rate = preset.asr_substitution_rate;
      }
      synth_config.validate();
      const auto dirs = sd::run_synth(synth_config, corpus, out_dir, ov.workers.value_or(0));
      for (const auto& d : dirs) std::cout << d.string() << "\n";
    } else if (sweep->parsed()) {
      const auto config = ov.resolve();
      const auto report = sd::run_sweep(sd::list_corpus(corpus_dir), sweep_options, config);
      sd::write_sweep(report, out_dir);
      std::cout << report.text();
    }
  } catch (const sd::NoPseudoLabels& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sd::kExitNoPseudoLabels;
  } catch (const sd::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sd::kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return sd::kExitInternal;
  }
  return sd::kExitOk;
}
