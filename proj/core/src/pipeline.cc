#include "scriptdiar/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "scriptdiar/segmentation.hpp"

namespace scriptdiar {

using nlohmann::json;

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Runs fn(i) for i in [0, count) on up to `workers` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const std::size_t threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(
                                       workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

double mean_of(const std::vector<SweepRun>& runs, auto&& get) {
  if (runs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : runs) total += get(r);
  return total / static_cast<double>(runs.size());
}

}  // namespace

// --- config ------------------------------------------------------------------

void PipelineConfig::validate() const {
  const auto& r = diarize.refine;
  if (!(r.threshold_percentile > 0.0 && r.threshold_percentile < 1.0)) {
    throw InputError("threshold_percentile must be in (0, 1)");
  }
  if (!(r.threshold_factor >= 0.0 && r.threshold_factor <= 1.0)) throw InputError("threshold_factor must be in [0, 1]");
  if (diarize.k_max < 0) throw InputError("k_max must be non-negative");
  if (diarize.kmeans.max_iters < 1) throw InputError("max_iters must be at least 1");
  if (align.max_span < 1) throw InputError("max_span must be at least 1");
  if (!(align.deletion_percentile > 0.0 && align.deletion_percentile < 1.0)) {
    throw InputError("deletion_percentile must be in (0, 1)");
  }
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw InputError("confidence_threshold must be in [0, 1]");
  }
  if (!(min_overlap_fraction > 0.0 && min_overlap_fraction <= 1.0)) {
    throw InputError("min_overlap_fraction must be in (0, 1]");
  }
  if (!(collar >= 0.0)) throw InputError("collar must be non-negative");
  if (!(scd_tolerance >= 0.0)) throw InputError("scd_tolerance must be non-negative");
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  PipelineConfig c;
  try {
    auto& r = c.diarize.refine;
    r.threshold_percentile = j.value("threshold_percentile", r.threshold_percentile);
    r.threshold_factor = j.value("threshold_factor", r.threshold_factor);
    r.row_threshold = j.value("refine_threshold", r.row_threshold);
    r.symmetrize = j.value("refine_symmetrize", r.symmetrize);
    r.diffuse = j.value("refine_diffuse", r.diffuse);
    r.row_max_normalize = j.value("refine_row_normalize", r.row_max_normalize);
    c.diarize.k_max = j.value("k_max", c.diarize.k_max);
    c.diarize.normalize_rows = j.value("normalize_rows", c.diarize.normalize_rows);
    c.diarize.kmeans.max_iters = j.value("max_iters", c.diarize.kmeans.max_iters);
    c.align.max_span = j.value("max_span", c.align.max_span);
    c.align.deletion_percentile = j.value("deletion_percentile", c.align.deletion_percentile);
    c.align.band_words = j.value("band_words", c.align.band_words);
    c.confidence_threshold = j.value("confidence_threshold", c.confidence_threshold);
    c.min_overlap_fraction = j.value("min_overlap_fraction", c.min_overlap_fraction);
    c.collar = j.value("collar", c.collar);
    c.scd_tolerance = j.value("scd_tolerance", c.scd_tolerance);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

std::string pipeline_config_json(const PipelineConfig& c) {
  const auto& r = c.diarize.refine;
  const json j = {{"threshold_percentile", r.threshold_percentile},
                  {"threshold_factor", r.threshold_factor},
                  {"refine_threshold", r.row_threshold},
                  {"refine_symmetrize", r.symmetrize},
                  {"refine_diffuse", r.diffuse},
                  {"refine_row_normalize", r.row_max_normalize},
                  {"k_max", c.diarize.k_max},
                  {"normalize_rows", c.diarize.normalize_rows},
                  {"max_iters", c.diarize.kmeans.max_iters},
                  {"max_span", c.align.max_span},
                  {"deletion_percentile", c.align.deletion_percentile},
                  {"band_words", c.align.band_words},
                  {"confidence_threshold", c.confidence_threshold},
                  {"min_overlap_fraction", c.min_overlap_fraction},
                  {"collar", c.collar},
                  {"scd_tolerance", c.scd_tolerance},
                  {"seed", c.seed},
                  {"workers", c.workers}};
  return j.dump(2) + "\n";
}

// --- extract -----------------------------------------------------------------

std::string ExtractReport::text() const {
  std::ostringstream os;
  os << "script lines         " << script_lines << "\n"
     << "asr words            " << asr_words << "\n"
     << "aligned lines        " << links << "\n"
     << "confident ranges     " << ranges << "\n"
     << "line coverage        " << fmt("%.4f", coverage) << "\n";
  if (accuracy) os << "label accuracy       " << fmt("%.4f", *accuracy) << "\n";
  os << "labeled sub-segments " << labeled_subsegments << "\n"
     << "known speakers (k')  " << k_prime << "\n";
  return os.str();
}

std::string ExtractReport::json() const {
  const nlohmann::json j = {{"script_lines", script_lines},
                            {"asr_words", asr_words},
                            {"links", links},
                            {"ranges", ranges},
                            {"coverage", coverage},
                            {"accuracy", optional_json(accuracy)},
                            {"labeled_subsegments", labeled_subsegments},
                            {"k_prime", k_prime},
                            {"deletion_penalty", deletion_penalty}};
  return j.dump(2) + "\n";
}

ExtractReport run_extract(const io::Episode& episode, const fs::path& out_dir, const PipelineConfig& config) {
  config.validate();
  if (!episode.script || !fs::exists(*episode.script)) {
    throw NoPseudoLabels("no pseudo labels available: episode " + episode.name + " has no script");
  }
  if (!episode.asr || !fs::exists(*episode.asr)) {
    throw InputError("episode " + episode.name + " has no ASR transcript");
  }
  const auto lines = io::read_script(*episode.script);
  const auto words = io::read_asr(*episode.asr);
  const Alignment alignment = align(lines, words, config.align);
  const auto ranges = extract_ranges(alignment, lines, words, config.confidence_threshold);
  const auto subsegments = subsegment(episode.regions, episode.subsegment_length);
  const PseudoLabeling pseudo = project_labels(ranges_to_timeline(ranges), subsegments, config.min_overlap_fraction);

  ExtractReport report;
  report.script_lines = lines.size();
  report.asr_words = words.size();
  report.links = alignment.links.size();
  report.ranges = ranges.size();
  report.labeled_subsegments = pseudo.labeled_count();
  report.k_prime = pseudo.k_prime();
  report.deletion_penalty = alignment.line_deletion_penalty;
  const SpeakerTimeline reference =
      (episode.reference && fs::exists(*episode.reference)) ? io::read_rttm(*episode.reference) : SpeakerTimeline{};
  const PseudoLabelAudit audit = audit_pseudo_labels(ranges, lines.size(), reference);
  report.coverage = audit.coverage;
  report.accuracy = audit.accuracy;

  io::write_ranges(out_dir / "ranges.json", ranges);
  io::write_pseudo_labels(out_dir / "pseudo_labels.json", pseudo);
  io::write_text(out_dir / "extract.json", report.json());
  return report;
}

// --- diarize -----------------------------------------------------------------

Method parse_method(const std::string& name) {
  if (name == "unsupervised") return Method::kUnsupervised;
  if (name == "unsupervised-kprime") return Method::kUnsupervisedKPrime;
  if (name == "semi") return Method::kSemiSupervised;
  throw InputError("unknown method '" + name + "' (expected unsupervised, unsupervised-kprime or semi)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kUnsupervised: return "unsupervised";
    case Method::kUnsupervisedKPrime: return "unsupervised-kprime";
    case Method::kSemiSupervised: return "semi";
  }
  return "unknown";
}

DiarizeReport run_diarize(const io::Episode& episode, Method method, const std::optional<fs::path>& pseudo_path,
                          const fs::path& out_dir, const PipelineConfig& config) {
  config.validate();
  const EmbeddingSet embeddings = io::load_embedding_set(episode);

  std::optional<PseudoLabeling> pseudo;
  if (method != Method::kUnsupervised) {
    const fs::path path = pseudo_path.value_or(out_dir / "pseudo_labels.json");
    if (!fs::exists(path)) {
      throw InputError("method " + method_name(method) + " needs pseudo labels; run `extract` first (looked for " +
                       path.string() + ")");
    }
    pseudo = io::read_pseudo_labels(path);
    if (pseudo->labels.size() != embeddings.size()) {
      throw InputError("pseudo labels cover " + std::to_string(pseudo->labels.size()) +
                       " sub-segments but the episode has " + std::to_string(embeddings.size()));
    }
  }

  Diarization result;
  switch (method) {
    case Method::kUnsupervised:
      result = diarize_unsupervised(embeddings, config.diarize, std::nullopt, config.seed);
      break;
    case Method::kUnsupervisedKPrime:
      if (pseudo->k_prime() < 1) throw InputError("k = k' needs at least one pseudo-labeled speaker");
      result = diarize_unsupervised(embeddings, config.diarize, pseudo->k_prime(), config.seed);
      result.clusters.k_prime = pseudo->k_prime();
      break;
    case Method::kSemiSupervised:
      result = diarize_semisupervised(embeddings, *pseudo, config.diarize, config.seed);
      break;
  }

  io::write_rttm(out_dir / "hypothesis.rttm", episode.name, result.timeline);
  io::write_text(out_dir / "clusters.json", io::cluster_summary_json(result.clusters));
  return DiarizeReport{std::move(result.clusters), std::move(result.timeline)};
}

// --- score -------------------------------------------------------------------

std::string ScoreReport::text() const {
  std::ostringstream os;
  auto pct = [](double v) { return fmt("%7.2f", 100.0 * v); };
  auto opt_pct = [&](const std::optional<double>& v) { return v ? pct(*v) : std::string("    n/a"); };
  os << "metric                 value\n"
     << "DER (%)              " << pct(der.der) << "\n"
     << "  false alarm (s)    " << fmt("%7.2f", der.false_alarm) << "\n"
     << "  missed (s)         " << fmt("%7.2f", der.missed) << "\n"
     << "  speaker error (s)  " << fmt("%7.2f", der.speaker_error) << "\n"
     << "  reference (s)      " << fmt("%7.2f", der.total_reference) << "\n"
     << "SCD precision (%)    " << opt_pct(scd.precision) << "\n"
     << "SCD recall (%)       " << opt_pct(scd.recall) << "\n"
     << "SCD F1 (%)           " << pct(scd.f1) << "\n"
     << "collar (s)           " << fmt("%7.3f", collar) << "\n"
     << "SCD tolerance (s)    " << fmt("%7.3f", scd.tolerance) << "\n";
  return os.str();
}

std::string ScoreReport::json() const {
  const nlohmann::json j = {{"der", der.der},
                            {"false_alarm", der.false_alarm},
                            {"missed", der.missed},
                            {"speaker_error", der.speaker_error},
                            {"total_reference", der.total_reference},
                            {"collar", collar},
                            {"scd_precision", optional_json(scd.precision)},
                            {"scd_recall", optional_json(scd.recall)},
                            {"scd_f1", scd.f1},
                            {"scd_tolerance", scd.tolerance},
                            {"reference_changes", scd.reference_changes},
                            {"hypothesis_changes", scd.hypothesis_changes},
                            {"matched_changes", scd.matched}};
  return j.dump(2) + "\n";
}

ScoreReport run_score(const SpeakerTimeline& reference, const SpeakerTimeline& hypothesis, double collar,
                      double scd_tolerance) {
  ScoreReport report;
  report.collar = collar;
  report.der = der(reference, hypothesis, collar);
  report.scd = scd_f1(reference, hypothesis, scd_tolerance);
  return report;
}

// --- synth -------------------------------------------------------------------

SynthConfig episode_config(const SynthConfig& base, const CorpusOptions& corpus, int episode_index) {
  SynthConfig c = base;
  if (corpus.episodes > 1) c.seed = derive_seed(base.seed, static_cast<std::uint64_t>(episode_index));
  if (corpus.speakers_min > 0 && corpus.speakers_max > 0) {
    if (corpus.speakers_max < corpus.speakers_min) throw InputError("speakers_max < speakers_min");
    const std::uint64_t span = static_cast<std::uint64_t>(corpus.speakers_max - corpus.speakers_min) + 1;
    c.n_speakers = corpus.speakers_min +
                   static_cast<int>(derive_seed(c.seed, 0xC0FFEEULL) % span);
  }
  return c;
}

void write_synth_episode(const SynthConfig& config, const std::string& name, const fs::path& dir) {
  const SynthEpisode ep = generate_episode(config);
  io::Episode manifest;
  manifest.name = name;
  manifest.directory = dir;
  manifest.subsegment_length = config.subsegment_length;
  manifest.regions = ep.regions;
  manifest.embeddings = dir / "embeddings.bin";
  manifest.script = dir / "script.tsv";
  manifest.asr = dir / "asr.json";
  manifest.reference = dir / "reference.rttm";

  fs::create_directories(dir);
  io::write_embeddings(manifest.embeddings, ep.embeddings.matrix);
  io::write_script(*manifest.script, ep.script);
  io::write_asr(*manifest.asr, ep.asr);
  io::write_rttm(*manifest.reference, name, ep.reference);
  io::write_episode(dir / "episode.json", manifest);

  const json j = {{"n_speakers", config.n_speakers},
                  {"runtime", config.runtime},
                  {"turn_mean", config.turn_mean},
                  {"turn_sd", config.turn_sd},
                  {"speaker_skew", config.speaker_skew},
                  {"embedding_dim", config.embedding_dim},
                  {"intra_speaker_noise", config.intra_speaker_noise},
                  {"min_speaker_angle_deg", config.min_speaker_angle_deg},
                  {"pseudo_coverage", config.pseudo_coverage},
                  {"pseudo_accuracy", config.pseudo_accuracy},
                  {"script_edit_rate", config.script_edit_rate},
                  {"asr_substitution_rate", config.asr_substitution_rate},
                  {"subsegment_length", config.subsegment_length},
                  {"grid_aligned_turns", config.grid_aligned_turns},
                  {"seed", config.seed}};
  io::write_text(dir / "synth.json", j.dump(2) + "\n");
}

std::vector<fs::path> run_synth(const SynthConfig& base, const CorpusOptions& corpus, const fs::path& out_dir,
                                int workers) {
  if (corpus.episodes < 1) throw InputError("episode count must be at least 1");
  base.validate();
  std::vector<fs::path> dirs;
  std::vector<std::string> names;
  for (int i = 0; i < corpus.episodes; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "ep%03d", i);
    names.emplace_back(corpus.episodes == 1 ? out_dir.filename().string() : name);
    dirs.push_back(corpus.episodes == 1 ? out_dir : out_dir / name);
  }
  parallel_for(dirs.size(), workers, [&](std::size_t i) {
    write_synth_episode(episode_config(base, corpus, static_cast<int>(i)), names[i], dirs[i]);
  });
  return dirs;
}

// --- sweep -------------------------------------------------------------------

std::vector<io::Episode> list_corpus(const fs::path& corpus_dir) {
  if (!fs::is_directory(corpus_dir)) throw InputError(corpus_dir.string() + " is not a directory");
  std::vector<fs::path> manifests;
  if (fs::exists(corpus_dir / "episode.json")) manifests.push_back(corpus_dir / "episode.json");
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "episode.json")) manifests.push_back(entry.path() / "episode.json");
  }
  std::sort(manifests.begin(), manifests.end());
  std::vector<io::Episode> episodes;
  for (const auto& m : manifests) episodes.push_back(io::read_episode(m));
  if (episodes.empty()) throw InputError("corpus " + corpus_dir.string() + " contains no episodes");
  return episodes;
}

SweepReport run_sweep(const std::vector<io::Episode>& episodes, const SweepOptions& options,
                      const PipelineConfig& config) {
  config.validate();
  if (episodes.empty()) throw InputError("sweep needs at least one episode");
  if (options.fractions.empty() || options.seeds.empty()) throw InputError("sweep needs fractions and seeds");
  for (double f : options.fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw InputError("pseudo-label fractions must be in [0, 1]");
  }

  const std::size_t per_episode = options.seeds.size();
  std::vector<SweepRun> runs(episodes.size() * per_episode);
  parallel_for(episodes.size(), config.workers, [&](std::size_t e) {
    const io::Episode& ep = episodes[e];
    if (!ep.reference) throw InputError("episode " + ep.name + " has no reference timeline");
    const EmbeddingSet embeddings = io::load_embedding_set(ep);
    const SpeakerTimeline reference = io::read_rttm(*ep.reference);
    const int true_k = static_cast<int>(reference.speakers().size());
    const SpectralFrontEnd front = spectral_front_end(embeddings, config.diarize, true_k);

    auto score = [&](const Diarization& d) {
      return std::pair{der(reference, d.timeline, config.collar).der,
                       scd_f1(reference, d.timeline, config.scd_tolerance).f1};
    };

    for (std::size_t s = 0; s < per_episode; ++s) {
      const std::uint64_t seed = options.seeds[s];
      SweepRun& run = runs[e * per_episode + s];
      run.episode = ep.name;
      run.seed = seed;
      run.true_k = true_k;
      run.k_tilde = front.k_tilde;

      const Diarization unsup = diarize_unsupervised(embeddings, front, config.diarize, std::nullopt, seed);
      std::tie(run.unsupervised_der, run.unsupervised_scd) = score(unsup);
      run.unsupervised_k = unsup.clusters.k;

      SynthConfig labels;
      labels.pseudo_accuracy = options.pseudo_accuracy;
      labels.seed = derive_seed(seed, e);
      for (double fraction : options.fractions) {
        labels.pseudo_coverage = fraction;
        const PseudoLabeling pseudo = generate_pseudo_labels(reference, labels, embeddings.subsegments);
        const Diarization semi = diarize_semisupervised(embeddings, front, pseudo, config.diarize, seed);
        const auto [sd, ss] = score(semi);
        run.semi_der.push_back(sd);
        run.semi_scd.push_back(ss);
        run.semi_k.push_back(semi.clusters.k);
        run.k_prime.push_back(pseudo.k_prime());
        if (pseudo.k_prime() > 0) {
          const auto [kd, ks] = score(diarize_unsupervised(embeddings, front, config.diarize, pseudo.k_prime(), seed));
          run.kprime_der.push_back(kd);
          run.kprime_scd.push_back(ks);
        } else {
          run.kprime_der.push_back(run.unsupervised_der);
          run.kprime_scd.push_back(run.unsupervised_scd);
        }
      }
    }
  });
  return SweepReport{options, std::move(runs)};
}

double SweepReport::mean_unsupervised_der() const {
  return mean_of(runs, [](const SweepRun& r) { return r.unsupervised_der; });
}
double SweepReport::mean_unsupervised_scd() const {
  return mean_of(runs, [](const SweepRun& r) { return r.unsupervised_scd; });
}
double SweepReport::mean_semi_der(std::size_t f) const {
  return mean_of(runs, [f](const SweepRun& r) { return r.semi_der[f]; });
}
double SweepReport::mean_semi_scd(std::size_t f) const {
  return mean_of(runs, [f](const SweepRun& r) { return r.semi_scd[f]; });
}
double SweepReport::mean_kprime_der(std::size_t f) const {
  return mean_of(runs, [f](const SweepRun& r) { return r.kprime_der[f]; });
}
double SweepReport::mean_kprime_scd(std::size_t f) const {
  return mean_of(runs, [f](const SweepRun& r) { return r.kprime_scd[f]; });
}

std::string SweepReport::text() const {
  std::ostringstream os;
  os << "episodes x seeds: " << runs.size() << "\n\n";
  os << "fraction   semi DER  semi SCD   k=k' DER  k=k' SCD\n";
  for (std::size_t f = 0; f < options.fractions.size(); ++f) {
    os << fmt("%8.3f", options.fractions[f]) << "  " << fmt("%8.2f", 100.0 * mean_semi_der(f)) << "  "
       << fmt("%8.2f", 100.0 * mean_semi_scd(f)) << "  " << fmt("%9.2f", 100.0 * mean_kprime_der(f)) << "  "
       << fmt("%8.2f", 100.0 * mean_kprime_scd(f)) << "\n";
  }
  os << "\nunsupervised  DER " << fmt("%.2f", 100.0 * mean_unsupervised_der()) << "  SCD "
     << fmt("%.2f", 100.0 * mean_unsupervised_scd()) << "\n";
  return os.str();
}

std::string SweepReport::json() const {
  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t f = 0; f < options.fractions.size(); ++f) {
    summary.push_back({{"fraction", options.fractions[f]},
                       {"semi_der", mean_semi_der(f)},
                       {"semi_scd", mean_semi_scd(f)},
                       {"kprime_der", mean_kprime_der(f)},
                       {"kprime_scd", mean_kprime_scd(f)}});
  }
  nlohmann::json per_run = nlohmann::json::array();
  for (const auto& r : runs) {
    per_run.push_back({{"episode", r.episode},
                       {"seed", r.seed},
                       {"true_k", r.true_k},
                       {"k_tilde", r.k_tilde},
                       {"unsupervised_k", r.unsupervised_k},
                       {"unsupervised_der", r.unsupervised_der},
                       {"unsupervised_scd", r.unsupervised_scd},
                       {"semi_der", r.semi_der},
                       {"semi_scd", r.semi_scd},
                       {"semi_k", r.semi_k},
                       {"k_prime", r.k_prime},
                       {"kprime_der", r.kprime_der},
                       {"kprime_scd", r.kprime_scd}});
  }
  std::vector<std::uint64_t> seeds = options.seeds;
  const nlohmann::json j = {{"fractions", options.fractions},
                            {"seeds", seeds},
                            {"pseudo_accuracy", options.pseudo_accuracy},
                            {"unsupervised_der", mean_unsupervised_der()},
                            {"unsupervised_scd", mean_unsupervised_scd()},
                            {"by_fraction", summary},
                            {"runs", per_run}};
  return j.dump(2) + "\n";
}

std::string SweepReport::curve_csv() const {
  std::ostringstream os;
  os << "fraction,semi_der,semi_scd,kprime_der,kprime_scd,unsupervised_der,unsupervised_scd\n";
  os.precision(10);
  for (std::size_t f = 0; f < options.fractions.size(); ++f) {
    os << options.fractions[f] << ',' << mean_semi_der(f) << ',' << mean_semi_scd(f) << ',' << mean_kprime_der(f)
       << ',' << mean_kprime_scd(f) << ',' << mean_unsupervised_der() << ',' << mean_unsupervised_scd() << '\n';
  }
  return os.str();
}

std::string SweepReport::speaker_count_csv() const {
  std::ostringstream os;
  os << "episode,seed,true_k,k_tilde";
  for (double f : options.fractions) os << ",semi_k@" << f;
  os << '\n';
  for (const auto& r : runs) {
    os << r.episode << ',' << r.seed << ',' << r.true_k << ',' << r.k_tilde;
    for (int k : r.semi_k) os << ',' << k;
    os << '\n';
  }
  return os.str();
}

void write_sweep(const SweepReport& report, const fs::path& out_dir) {
  io::write_text(out_dir / "sweep.txt", report.text());
  io::write_text(out_dir / "sweep.json", report.json());
  io::write_text(out_dir / "sweep_curve.csv", report.curve_csv());
  io::write_text(out_dir / "speaker_counts.csv", report.speaker_count_csv());
}

}  // namespace scriptdiar
