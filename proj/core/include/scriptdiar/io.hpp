#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scriptdiar/align.hpp"
#include "scriptdiar/cluster.hpp"
#include "scriptdiar/types.hpp"

namespace scriptdiar::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RTTM
//
//   SPEAKER <file> 1 <start> <dur> <NA> <NA> <speaker> <NA> <NA>
//
// Times are written with three decimals. Whitespace inside a speaker name is
// written as '_' so the line stays tokenizable.

void write_rttm(std::ostream& os, const std::string& file_id, const SpeakerTimeline& timeline);
void write_rttm(const fs::path& path, const std::string& file_id, const SpeakerTimeline& timeline);
SpeakerTimeline read_rttm(std::istream& is);
SpeakerTimeline read_rttm(const fs::path& path);

// ---------------------------------------------------------------------------
// Embedding matrices
//
// Binary layout (little endian):
//   bytes 0..7   magic "SDEMB001"
//   bytes 8..15  uint64 n (rows)
//   bytes 16..23 uint64 d (columns)
//   then n * d float64 values, row-major.
// The reader also accepts a text form: a first line "n d" followed by n lines
// of d whitespace-separated numbers.

void write_embeddings(const fs::path& path, const Eigen::MatrixXd& matrix);
void write_embeddings_text(const fs::path& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_embeddings(const fs::path& path);

// ---------------------------------------------------------------------------
// Episode manifest (episode.json)
//
//   {
//     "name": "ep000",
//     "subsegment_length": 1.0,
//     "regions": [[start, end], ...],
//     "embeddings": "embeddings.bin",
//     "script": "script.tsv",          (optional)
//     "asr": "asr.json",               (optional)
//     "reference": "reference.rttm"    (optional)
//   }
//
// Relative paths resolve against the manifest's directory.

struct Episode {
  std::string name;
  fs::path directory;
  double subsegment_length = 1.0;
  std::vector<SpeechRegion> regions;
  fs::path embeddings;
  std::optional<fs::path> script;
  std::optional<fs::path> asr;
  std::optional<fs::path> reference;
};

/// Accepts either the manifest file or the directory holding episode.json.
Episode read_episode(const fs::path& path);
void write_episode(const fs::path& manifest, const Episode& episode);

/// Loads regions and the embedding matrix and pairs rows with sub-segments.
EmbeddingSet load_embedding_set(const Episode& episode);

// ---------------------------------------------------------------------------
// Script and ASR
//
// Script: one "SPEAKER<TAB>text" record per line, or a JSON array of
// {"speaker", "text"} records. ASR: JSON array of {"word", "start", "end"}.

std::vector<DialogueLine> read_script(const fs::path& path);
void write_script(const fs::path& path, const std::vector<DialogueLine>& lines);
std::vector<AsrWord> read_asr(const fs::path& path);
void write_asr(const fs::path& path, const std::vector<AsrWord>& words);

// ---------------------------------------------------------------------------
// Pipeline artifacts (JSON)

/// Array of {"start", "end", "speaker", "cost"}.
void write_ranges(const fs::path& path, const std::vector<LabeledRange>& ranges);
std::vector<LabeledRange> read_ranges(const fs::path& path);

/// {"names": [...], "labels": [...]}
void write_pseudo_labels(const fs::path& path, const PseudoLabeling& pseudo);
PseudoLabeling read_pseudo_labels(const fs::path& path);

/// {"k_tilde", "k_prime", "k", "iterations", "cluster_sizes": [...]}
std::string cluster_summary_json(const ClusterResult& result);

/// Writes `text` to `path`, creating parent directories.
void write_text(const fs::path& path, const std::string& text);

}  // namespace scriptdiar::io
