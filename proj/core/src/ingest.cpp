#include "pupilload/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pupilload/rng.hpp"

namespace pupilload {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& file, std::size_t line_no,
                    const char* what) {
  if (s.empty())
    throw ParseError(file.string() + ":" + std::to_string(line_no) + ": empty " + what + " field");
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw ParseError(file.string() + ":" + std::to_string(line_no) + ": bad " + what + " value '" +
                     s + "'");
  return v;
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

const char* class_name(CloadClass c) {
  switch (c) {
    case CloadClass::C1: return "C1";
    case CloadClass::C2: return "C2";
    case CloadClass::C3: return "C3";
  }
  return "?";
}

CloadClass bin_class(double mean_score) {
  if (!(mean_score >= 0.0 && mean_score <= 100.0))
    throw Error("mean TLX score " + std::to_string(mean_score) + " outside [0,100]");
  if (mean_score < 30.0) return CloadClass::C1;
  if (mean_score <= 50.0) return CloadClass::C2;
  return CloadClass::C3;
}

TlxLabel TlxLabel::from_subscores(const std::array<double, kTlxSubscores>& s) {
  TlxLabel label;
  label.subscores = s;
  double sum = 0.0;
  for (double v : s) {
    if (!(v >= 0.0 && v <= 100.0))
      throw Error("TLX subscore " + std::to_string(v) + " outside [0,100]");
    sum += v;
  }
  label.mean_score = sum / static_cast<double>(kTlxSubscores);
  label.cls = bin_class(label.mean_score);
  return label;
}

Recording load_recording(const std::filesystem::path& path, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open recording file: " + path.string());

  LoadStats local;
  Recording rec;
  rec.id = path.stem().string();

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      auto cols = split_csv_line(t);
      if (cols.size() != 3 || cols[0] != "t" || cols[1] != "diameter" || cols[2] != "confidence")
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": expected header 't,diameter,confidence'");
      saw_header = true;
      continue;
    }
    auto cols = split_csv_line(t);
    if (cols.size() != 3)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(cols.size()));
    PupilSample s;
    s.t = parse_double(cols[0], path, line_no, "t");
    s.diameter = parse_double(cols[1], path, line_no, "diameter");
    s.confidence = parse_double(cols[2], path, line_no, "confidence");
    ++local.rows_read;
    if (!std::isfinite(s.t) || s.t < 0.0)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": invalid timestamp");
    if (!std::isfinite(s.confidence) || s.confidence < 0.0 || s.confidence > 1.0)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": confidence outside [0,1]");
    if (!std::isfinite(s.diameter)) {
      ++local.dropped_nonfinite;
      continue;
    }
    if (s.diameter <= 0.0) {
      ++local.dropped_nonpositive;
      continue;
    }
    rec.samples.push_back(s);
  }
  if (!saw_header) throw ParseError(path.string() + ": missing header row");

  std::stable_sort(rec.samples.begin(), rec.samples.end(),
                   [](const PupilSample& a, const PupilSample& b) { return a.t < b.t; });
  // Enforce strictly increasing t: on duplicates keep the first occurrence.
  std::vector<PupilSample> unique;
  unique.reserve(rec.samples.size());
  for (const auto& s : rec.samples) {
    if (!unique.empty() && s.t == unique.back().t) {
      ++local.dropped_duplicate_t;
      continue;
    }
    unique.push_back(s);
  }
  rec.samples = std::move(unique);

  if (stats) *stats = local;
  if (rec.samples.empty())
    throw EmptyRecordingError(path.string() + ": no usable samples after cleaning");
  return rec;
}

void write_recording(const std::filesystem::path& path, const Recording& rec) {
  std::string out = "t,diameter,confidence\n";
  for (const auto& s : rec.samples) {
    format_double(out, s.t);
    out += ',';
    format_double(out, s.diameter);
    out += ',';
    format_double(out, s.confidence);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write recording file: " + path.string());
  f << out;
}

Recording filter_confidence(const Recording& rec, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error("confidence threshold must be in [0,1]");
  Recording out = rec;
  out.samples.clear();
  for (const auto& s : rec.samples)
    if (s.confidence >= threshold) out.samples.push_back(s);
  if (out.samples.empty())
    throw EmptyRecordingError("recording '" + rec.id + "': all samples below confidence " +
                              std::to_string(threshold));
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());

  static const char* kHeader =
      "path,subject,activity,mental,physical,temporal,performance,effort,frustration";

  std::vector<ManifestEntry> entries;
  std::set<std::string> seen_paths;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      if (t != kHeader)
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected header '" +
                         kHeader + "'");
      saw_header = true;
      continue;
    }
    auto cols = split_csv_line(t);
    if (cols.size() != 9)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 9 fields, got " +
                       std::to_string(cols.size()));
    ManifestEntry e;
    e.path = cols[0];
    e.subject_id = cols[1];
    e.activity_id = cols[2];
    for (std::size_t i = 0; i < kTlxSubscores; ++i) {
      double v = parse_double(cols[3 + i], path, line_no, "subscore");
      if (!(v >= 0.0 && v <= 100.0))
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": subscore " +
                         std::to_string(v) + " outside [0,100]");
      e.subscores[i] = v;
    }
    if (!seen_paths.insert(e.path.string()).second)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": duplicate path '" +
                       e.path.string() + "'");
    entries.push_back(std::move(e));
  }
  if (!saw_header) throw ParseError(path.string() + ": missing header row");
  return entries;
}

std::vector<Recording> load_dataset(const std::filesystem::path& manifest_path,
                                    const DatasetOptions& opts) {
  auto entries = load_manifest(manifest_path);
  auto base = manifest_path.parent_path();
  std::vector<Recording> dataset;
  dataset.reserve(entries.size());
  for (const auto& e : entries) {
    auto file = e.path.is_absolute() ? e.path : base / e.path;
    Recording rec = load_recording(file);
    rec.subject_id = e.subject_id;
    rec.activity_id = e.activity_id;
    rec.nominal_rate = opts.nominal_rate;
    rec.label = TlxLabel::from_subscores(e.subscores);
    if (opts.confidence_threshold > 0.0)
      rec = filter_confidence(rec, opts.confidence_threshold);
    dataset.push_back(std::move(rec));
  }
  return dataset;
}

std::pair<std::vector<Recording>, std::vector<Recording>> split_train_test(
    std::vector<Recording> dataset, double train_fraction, std::uint64_t seed) {
  if (dataset.size() < 2) throw Error("need at least 2 recordings to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error("train_fraction must be in (0,1)");

  const std::size_t n = dataset.size();
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x5917));
  rng.shuffle(order);

  std::pair<std::vector<Recording>, std::vector<Recording>> out;
  out.first.reserve(n_train);
  out.second.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = (i < n_train) ? out.first : out.second;
    dst.push_back(std::move(dataset[order[i]]));
  }
  return out;
}

}  // namespace pupilload
