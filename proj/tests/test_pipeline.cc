#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "scriptdiar/pipeline.hpp"
#include "test_util.hpp"

using namespace scriptdiar;
using testutil::slurp;
using testutil::TempDir;

namespace {

SynthConfig tiny(std::uint64_t seed = 0) {
  SynthConfig c;
  c.n_speakers = 5;
  c.runtime = 240;
  c.embedding_dim = 24;
  c.intra_speaker_noise = 0.3;
  c.seed = seed;
  return c;
}

io::Episode make_episode(const fs::path& dir, std::uint64_t seed = 0) {
  write_synth_episode(tiny(seed), "ep", dir);
  return io::read_episode(dir);
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  const std::string cmd =
      std::string(SCRIPTDIAR_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(PipelineConfig{}.validate()); }

TEST(Config, FileOverridesOnlyGivenKeys) {
  TempDir tmp;
  std::ofstream(tmp / "c.json") << R"({"threshold_percentile": 0.9, "max_span": 20, "seed": 7})";
  const auto c = load_pipeline_config(tmp / "c.json");
  EXPECT_DOUBLE_EQ(c.diarize.refine.threshold_percentile, 0.9);
  EXPECT_EQ(c.align.max_span, 20u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_DOUBLE_EQ(c.collar, PipelineConfig{}.collar);
  const auto round = nlohmann::json::parse(pipeline_config_json(c));
  EXPECT_DOUBLE_EQ(round["threshold_percentile"].get<double>(), 0.9);
}

TEST(Config, RejectsBadValues) {
  TempDir tmp;
  std::ofstream(tmp / "bad.json") << R"({"threshold_percentile": 1.5})";
  EXPECT_THROW(load_pipeline_config(tmp / "bad.json"), InputError);
  std::ofstream(tmp / "garbage.json") << "{not json";
  EXPECT_THROW(load_pipeline_config(tmp / "garbage.json"), InputError);
}

TEST(Methods, ParseRoundTrip) {
  for (auto m : {Method::kUnsupervised, Method::kUnsupervisedKPrime, Method::kSemiSupervised}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_THROW(parse_method("bogus"), InputError);
}

TEST(Pipeline, ExtractThenDiarizeEachMethod) {
  TempDir tmp;
  const auto ep = make_episode(tmp / "ep");
  PipelineConfig cfg;
  const auto report = run_extract(ep, tmp / "out", cfg);
  EXPECT_GT(report.coverage, 0.0);
  EXPECT_LE(report.coverage, 1.0);
  ASSERT_TRUE(report.accuracy.has_value());
  EXPECT_TRUE(fs::exists(tmp / "out" / "pseudo_labels.json"));
  EXPECT_TRUE(fs::exists(tmp / "out" / "ranges.json"));
  EXPECT_TRUE(fs::exists(tmp / "out" / "extract.json"));

  const auto semi = run_diarize(ep, Method::kSemiSupervised, std::nullopt, tmp / "out", cfg);
  EXPECT_EQ(semi.clusters.k_prime, report.k_prime);
  EXPECT_GE(semi.clusters.k, report.k_prime);
  EXPECT_TRUE(fs::exists(tmp / "out" / "hypothesis.rttm"));

  EXPECT_THROW(run_diarize(ep, Method::kUnsupervisedKPrime, std::nullopt, tmp / "kp", cfg), InputError);
  const auto kp2 = run_diarize(ep, Method::kUnsupervisedKPrime, tmp / "out" / "pseudo_labels.json", tmp / "kp2", cfg);
  EXPECT_EQ(kp2.clusters.k, report.k_prime);

  const auto un = run_diarize(ep, Method::kUnsupervised, std::nullopt, tmp / "un", cfg);
  EXPECT_EQ(un.clusters.k, un.clusters.k_tilde);

  const auto ref = io::read_rttm(*ep.reference);
  const auto score = run_score(ref, io::read_rttm(tmp / "out" / "hypothesis.rttm"), 0.0, 0.1);
  EXPECT_GE(score.der.der, 0.0);
  EXPECT_TRUE(nlohmann::json::accept(score.json()));
}

TEST(Pipeline, PaperRegimeExtractCoverage) {
  TempDir tmp;
  double coverage = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SynthConfig c;
    c.n_speakers = 40;
    c.runtime = 1800;
    c.embedding_dim = 16;
    c.seed = seed;
    const auto dir = tmp / ("ep" + std::to_string(seed));
    write_synth_episode(paper_regime(c), "ep", dir);
    coverage += run_extract(io::read_episode(dir), dir / "out", PipelineConfig{}).coverage / 4.0;
  }
  EXPECT_NEAR(coverage, 0.109, 0.03);
}

TEST(Pipeline, CleanScriptGivesFullCoverage) {
  TempDir tmp;
  SynthConfig c = tiny(5);
  c.script_edit_rate = 0.0;
  c.asr_substitution_rate = 0.0;
  write_synth_episode(c, "ep", tmp / "ep");
  const auto r = run_extract(io::read_episode(tmp / "ep"), tmp / "out", PipelineConfig{});
  EXPECT_DOUBLE_EQ(r.coverage, 1.0);
  EXPECT_DOUBLE_EQ(*r.accuracy, 1.0);
}

TEST(Pipeline, MissingInputs) {
  TempDir tmp;
  auto ep = make_episode(tmp / "ep");
  auto no_script = ep;
  no_script.script.reset();
  EXPECT_THROW(run_extract(no_script, tmp / "a", PipelineConfig{}), NoPseudoLabels);
  auto no_asr = ep;
  no_asr.asr.reset();
  EXPECT_THROW(run_extract(no_asr, tmp / "b", PipelineConfig{}), InputError);
  try {
    run_diarize(ep, Method::kSemiSupervised, std::nullopt, tmp / "c", PipelineConfig{});
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("extract"), std::string::npos);
  }
}

TEST(Pipeline, DiarizeIsIdempotent) {
  TempDir tmp;
  const auto ep = make_episode(tmp / "ep", 3);
  PipelineConfig cfg;
  run_extract(ep, tmp / "a", cfg);
  run_extract(ep, tmp / "b", cfg);
  EXPECT_EQ(slurp(tmp / "a" / "pseudo_labels.json"), slurp(tmp / "b" / "pseudo_labels.json"));
  run_diarize(ep, Method::kSemiSupervised, std::nullopt, tmp / "a", cfg);
  run_diarize(ep, Method::kSemiSupervised, std::nullopt, tmp / "b", cfg);
  EXPECT_EQ(slurp(tmp / "a" / "hypothesis.rttm"), slurp(tmp / "b" / "hypothesis.rttm"));
  EXPECT_EQ(slurp(tmp / "a" / "clusters.json"), slurp(tmp / "b" / "clusters.json"));
}

TEST(SynthCorpus, LayoutAndSpeakerRange) {
  TempDir tmp;
  CorpusOptions corpus;
  corpus.episodes = 3;
  corpus.speakers_min = 3;
  corpus.speakers_max = 6;
  const auto dirs = run_synth(tiny(), corpus, tmp.path(), 2);
  ASSERT_EQ(dirs.size(), 3u);
  EXPECT_EQ(dirs[0].filename(), "ep000");
  for (int i = 0; i < 3; ++i) {
    const auto c = episode_config(tiny(), corpus, i);
    EXPECT_GE(c.n_speakers, 3);
    EXPECT_LE(c.n_speakers, 6);
  }
  EXPECT_NE(episode_config(tiny(), corpus, 0).seed, episode_config(tiny(), corpus, 1).seed);
  const auto eps = list_corpus(tmp.path());
  ASSERT_EQ(eps.size(), 3u);
  EXPECT_EQ(eps[1].name, "ep001");
}

TEST(Sweep, ZeroFractionMatchesUnsupervised) {
  TempDir tmp;
  CorpusOptions corpus;
  corpus.episodes = 2;
  run_synth(tiny(), corpus, tmp.path(), 1);
  SweepOptions opts;
  opts.fractions = {0.0, 1.0};
  opts.pseudo_accuracy = 1.0;
  const auto report = run_sweep(list_corpus(tmp.path()), opts, PipelineConfig{});
  ASSERT_EQ(report.runs.size(), 2u);
  for (const auto& r : report.runs) {
    EXPECT_DOUBLE_EQ(r.semi_der[0], r.unsupervised_der);
    EXPECT_DOUBLE_EQ(r.semi_scd[0], r.unsupervised_scd);
    EXPECT_EQ(r.k_prime[0], 0);
    // All turns labeled correctly leaves nothing to get wrong.
    EXPECT_EQ(r.k_prime[1], r.true_k);
    EXPECT_NEAR(r.semi_der[1], 0.0, 1e-12);
  }
  write_sweep(report, tmp / "sweep");
  for (const char* f : {"sweep.txt", "sweep.json", "sweep_curve.csv", "speaker_counts.csv"}) {
    EXPECT_TRUE(fs::exists(tmp / "sweep" / f)) << f;
  }
}

TEST(Cli, ExitCodes) {
  TempDir tmp;
  auto ep = make_episode(tmp / "ep");
  EXPECT_EQ(cli("--help", tmp.path()).code, 0);
  EXPECT_EQ(cli("extract --episode " + (tmp / "nowhere").string() + " --out " + (tmp / "x").string(), tmp.path()).code,
            2);
  EXPECT_EQ(cli("frobnicate", tmp.path()).code, 2);

  auto no_script = ep;
  no_script.script.reset();
  io::write_episode(tmp / "ep" / "noscript.json", no_script);
  EXPECT_EQ(cli("extract --episode " + (tmp / "ep" / "noscript.json").string() + " --out " + (tmp / "y").string(),
                tmp.path())
                .code,
            3);

  auto no_asr = ep;
  no_asr.asr.reset();
  io::write_episode(tmp / "ep" / "noasr.json", no_asr);
  EXPECT_EQ(
      cli("extract --episode " + (tmp / "ep" / "noasr.json").string() + " --out " + (tmp / "z").string(), tmp.path())
          .code,
      2);

  const auto semi = cli("diarize --method semi --episode " + (tmp / "ep").string() + " --out " + (tmp / "w").string(),
                        tmp.path());
  EXPECT_EQ(semi.code, 2);
  EXPECT_NE(semi.err.find("extract"), std::string::npos);
}

TEST(Cli, EndToEnd) {
  TempDir tmp;
  const auto t = tmp.path().string();
  ASSERT_EQ(cli("synth --out " + t + "/ep --speakers 4 --runtime 120 --dim 16 --seed 2", tmp.path()).code, 0);
  ASSERT_EQ(cli("extract --episode " + t + "/ep --out " + t + "/o --json", tmp.path()).code, 0);
  const auto extract = cli("extract --episode " + t + "/ep --out " + t + "/o --json", tmp.path());
  EXPECT_TRUE(nlohmann::json::accept(extract.out));
  ASSERT_EQ(cli("diarize --method semi --episode " + t + "/ep --out " + t + "/o --seed 4", tmp.path()).code, 0);
  const auto score =
      cli("score --reference " + t + "/ep/reference.rttm --hypothesis " + t + "/o/hypothesis.rttm --json", tmp.path());
  ASSERT_EQ(score.code, 0);
  const auto j = nlohmann::json::parse(score.out);
  EXPECT_GE(j["der"].get<double>(), 0.0);
}
