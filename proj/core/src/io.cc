#include "scriptdiar/io.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scriptdiar/segmentation.hpp"

namespace scriptdiar::io {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "embedding files are little endian");

namespace {

constexpr char kMagic[8] = {'S', 'D', 'E', 'M', 'B', '0', '0', '1'};

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw InputError("cannot open " + path.string());
  return is;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

json read_json(const fs::path& path) {
  auto is = open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const fs::path& where) {
  if (!j.contains(key)) throw InputError(where.string() + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(where.string() + ": field '" + key + "': " + e.what());
  }
}

std::string rttm_speaker(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os << text;
}

void write_rttm(std::ostream& os, const std::string& file_id, const SpeakerTimeline& timeline) {
  char buf[64];
  for (const auto& t : timeline.turns) {
    os << "SPEAKER " << file_id << " 1 ";
    std::snprintf(buf, sizeof(buf), "%.3f %.3f", t.interval.start, t.interval.duration());
    os << buf << " <NA> <NA> " << rttm_speaker(t.speaker) << " <NA> <NA>\n";
  }
}

void write_rttm(const fs::path& path, const std::string& file_id, const SpeakerTimeline& timeline) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  write_rttm(os, file_id, timeline);
}

SpeakerTimeline read_rttm(std::istream& is) {
  SpeakerTimeline out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string f;
    while (ls >> f) fields.push_back(f);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (fields[0] != "SPEAKER") continue;
    if (fields.size() < 8) throw InputError("RTTM line " + std::to_string(line_no) + " has too few fields");
    double start = 0.0, dur = 0.0;
    try {
      start = std::stod(fields[3]);
      dur = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw InputError("RTTM line " + std::to_string(line_no) + " has a malformed time");
    }
    if (dur <= 0.0) continue;
    out.turns.push_back(Turn{TimeInterval::checked(start, start + dur), fields[7]});
  }
  return out;
}

SpeakerTimeline read_rttm(const fs::path& path) {
  auto is = open_in(path);
  return read_rttm(is);
}

void write_embeddings(const fs::path& path, const Eigen::MatrixXd& matrix) {
  auto os = open_out(path, std::ios::out | std::ios::binary);
  os.write(kMagic, sizeof(kMagic));
  const std::uint64_t header[2] = {static_cast<std::uint64_t>(matrix.rows()),
                                   static_cast<std::uint64_t>(matrix.cols())};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = matrix;
  os.write(reinterpret_cast<const char*>(rows.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows.size())));
}

void write_embeddings_text(const fs::path& path, const Eigen::MatrixXd& matrix) {
  auto os = open_out(path);
  os << matrix.rows() << ' ' << matrix.cols() << '\n';
  os.precision(17);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) os << (j ? " " : "") << matrix(i, j);
    os << '\n';
  }
}

Eigen::MatrixXd read_embeddings(const fs::path& path) {
  auto is = open_in(path, std::ios::in | std::ios::binary);
  char magic[8] = {};
  is.read(magic, sizeof(magic));
  if (is.gcount() == sizeof(magic) && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0) {
    std::uint64_t header[2] = {};
    is.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!is) throw InputError(path.string() + ": truncated embedding header");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
        static_cast<Eigen::Index>(header[0]), static_cast<Eigen::Index>(header[1]));
    is.read(reinterpret_cast<char*>(rows.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows.size())));
    if (!is) throw InputError(path.string() + ": truncated embedding data");
    return rows;
  }

  is.clear();
  is.seekg(0);
  long long n = -1, d = -1;
  if (!(is >> n >> d) || n < 0 || d < 1) throw InputError(path.string() + ": bad embedding header");
  Eigen::MatrixXd m(n, d);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < d; ++j) {
      if (!(is >> m(i, j))) throw InputError(path.string() + ": truncated embedding text");
    }
  }
  return m;
}

Episode read_episode(const fs::path& path) {
  const fs::path manifest = fs::is_directory(path) ? path / "episode.json" : path;
  const json j = read_json(manifest);
  Episode ep;
  ep.directory = manifest.parent_path();
  ep.name = j.value("name", ep.directory.filename().string());
  ep.subsegment_length = j.value("subsegment_length", 1.0);
  for (const auto& r : field<std::vector<std::vector<double>>>(j, "regions", manifest)) {
    if (r.size() != 2) throw InputError(manifest.string() + ": region must be [start, end]");
    ep.regions.push_back(SpeechRegion{TimeInterval::checked(r[0], r[1])});
  }
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : ep.directory / p; };
  ep.embeddings = resolve(field<std::string>(j, "embeddings", manifest));
  if (j.contains("script")) ep.script = resolve(j.at("script").get<std::string>());
  if (j.contains("asr")) ep.asr = resolve(j.at("asr").get<std::string>());
  if (j.contains("reference")) ep.reference = resolve(j.at("reference").get<std::string>());
  return ep;
}

void write_episode(const fs::path& manifest, const Episode& episode) {
  const fs::path base = manifest.parent_path();
  auto rel = [&](const fs::path& p) { return p.lexically_relative(base).generic_string(); };
  json j;
  j["name"] = episode.name;
  j["subsegment_length"] = episode.subsegment_length;
  json regions = json::array();
  for (const auto& r : episode.regions) regions.push_back({r.interval.start, r.interval.end});
  j["regions"] = std::move(regions);
  j["embeddings"] = rel(episode.embeddings);
  if (episode.script) j["script"] = rel(*episode.script);
  if (episode.asr) j["asr"] = rel(*episode.asr);
  if (episode.reference) j["reference"] = rel(*episode.reference);
  write_text(manifest, j.dump(2) + "\n");
}

EmbeddingSet load_embedding_set(const Episode& episode) {
  EmbeddingSet set;
  set.subsegments = subsegment(episode.regions, episode.subsegment_length);
  set.matrix = read_embeddings(episode.embeddings);
  set.validate();
  return set;
}

std::vector<DialogueLine> read_script(const fs::path& path) {
  auto is = open_in(path);
  std::vector<DialogueLine> lines;
  const int first = is.peek();
  if (first == '[' || path.extension() == ".json") {
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    for (const auto& rec : j) {
      lines.push_back(DialogueLine{lines.size(), field<std::string>(rec, "speaker", path),
                                   field<std::string>(rec, "text", path)});
    }
    return lines;
  }
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError(path.string() + ": script line " + std::to_string(lines.size() + 1) + " has no TAB");
    }
    lines.push_back(DialogueLine{lines.size(), line.substr(0, tab), line.substr(tab + 1)});
  }
  return lines;
}

void write_script(const fs::path& path, const std::vector<DialogueLine>& lines) {
  std::string text;
  for (const auto& l : lines) text += l.speaker_name + "\t" + l.text + "\n";
  write_text(path, text);
}

std::vector<AsrWord> read_asr(const fs::path& path) {
  const json j = read_json(path);
  std::vector<AsrWord> words;
  for (const auto& rec : j) {
    words.push_back(AsrWord{field<std::string>(rec, "word", path),
                            TimeInterval::checked(field<double>(rec, "start", path), field<double>(rec, "end", path))});
  }
  for (std::size_t i = 1; i < words.size(); ++i) {
    if (words[i].interval.start < words[i - 1].interval.start) {
      throw InputError(path.string() + ": ASR words are not in start order at word " + std::to_string(i));
    }
  }
  return words;
}

void write_asr(const fs::path& path, const std::vector<AsrWord>& words) {
  json j = json::array();
  for (const auto& w : words) j.push_back({{"word", w.token}, {"start", w.interval.start}, {"end", w.interval.end}});
  write_text(path, j.dump() + "\n");
}

void write_ranges(const fs::path& path, const std::vector<LabeledRange>& ranges) {
  json j = json::array();
  for (const auto& r : ranges) {
    j.push_back({{"start", r.interval.start}, {"end", r.interval.end}, {"speaker", r.speaker_name}, {"cost", r.cost}});
  }
  write_text(path, j.dump(1) + "\n");
}

std::vector<LabeledRange> read_ranges(const fs::path& path) {
  const json j = read_json(path);
  std::vector<LabeledRange> out;
  for (const auto& rec : j) {
    out.push_back(LabeledRange{
        TimeInterval::checked(field<double>(rec, "start", path), field<double>(rec, "end", path)),
        field<std::string>(rec, "speaker", path), rec.value("cost", 0.0)});
  }
  return out;
}

void write_pseudo_labels(const fs::path& path, const PseudoLabeling& pseudo) {
  const json j = {{"names", pseudo.names}, {"labels", pseudo.labels}};
  write_text(path, j.dump() + "\n");
}

PseudoLabeling read_pseudo_labels(const fs::path& path) {
  const json j = read_json(path);
  PseudoLabeling out;
  out.names = field<std::vector<std::string>>(j, "names", path);
  out.labels = field<std::vector<int>>(j, "labels", path);
  for (int l : out.labels) {
    if (l < 0 || l > out.k_prime()) throw InputError(path.string() + ": label " + std::to_string(l) + " has no name");
  }
  return out;
}

std::string cluster_summary_json(const ClusterResult& result) {
  const json j = {{"k_tilde", result.k_tilde},
                  {"k_prime", result.k_prime},
                  {"k", result.k},
                  {"iterations", result.iterations},
                  {"cluster_sizes", result.cluster_sizes()}};
  return j.dump(2) + "\n";
}

}  // namespace scriptdiar::io
