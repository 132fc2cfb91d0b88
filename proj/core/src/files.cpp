#include "biosynth/files.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "biosynth/errors.hpp"

namespace biosynth {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

}  // namespace

ArtifactSource load_noise_recording(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open recording: " + path.string());

  ArtifactSource src;
  src.name = path.stem().string();

  std::string line;
  bool have_fs = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!have_fs) {
      // header line declares the sampling rate: "fs=360" or "fs,360"
      std::size_t pos = line.find("fs");
      if (pos != 0) throw IoError(path.string() + ": first line must declare fs (e.g. fs=250)");
      pos = line.find_first_of("=,", 2);
      if (pos == std::string::npos)
        throw IoError(path.string() + ": malformed fs header '" + line + "'");
      src.fs = std::strtod(line.c_str() + pos + 1, nullptr);
      if (!(src.fs > 0.0)) throw IoError(path.string() + ": fs must be > 0");
      have_fs = true;
      continue;
    }
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || (end && *end != '\0'))
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed sample '" + line + "'");
    src.samples.push_back(v);
  }
  if (!have_fs) throw IoError(path.string() + ": missing fs header");
  if (src.samples.empty()) throw IoError(path.string() + ": no samples");
  return src;
}

void save_noise_recording(const ArtifactSource& source, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write recording: " + path.string());
  char buf[64];
  std::snprintf(buf, sizeof(buf), "fs=%.9g\n", source.fs);
  out << buf;
  for (double v : source.samples) {
    std::snprintf(buf, sizeof(buf), "%.9g\n", v);
    out << buf;
  }
  out.close();
  if (!out) throw IoError("failed writing recording: " + path.string());
}

PsdSpec load_psd_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open PSD file: " + path.string());

  PsdSpec psd;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected freq_hz,power");
    char *e1 = nullptr, *e2 = nullptr;
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    const double f = std::strtod(a.c_str(), &e1);
    const double p = std::strtod(b.c_str(), &e2);
    if (e1 == a.c_str() || e2 == b.c_str()) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed row '" + line + "'");
    }
    first = false;
    psd.freqs.push_back(f);
    psd.powers.push_back(p);
  }
  if (psd.freqs.empty()) throw IoError(path.string() + ": empty PSD");
  psd.fs = 2.0 * psd.freqs.back();
  psd.provenance = PsdProvenance::estimated;
  psd.validate();
  return psd;
}

void save_psd_csv(const PsdSpec& psd, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write PSD file: " + path.string());
  out << "freq_hz,power\n";
  char buf[96];
  for (std::size_t i = 0; i < psd.freqs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", psd.freqs[i], psd.powers[i]);
    out << buf;
  }
  out.close();
  if (!out) throw IoError("failed writing PSD file: " + path.string());
}

void save_intervals_csv(const BeatIntervalSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write interval file: " + path.string());
  char buf[64];
  for (double v : series.intervals) {
    std::snprintf(buf, sizeof(buf), "%.12g\n", v);
    out << buf;
  }
  out.close();
  if (!out) throw IoError("failed writing interval file: " + path.string());
}

void save_samples_csv(std::span<const double> samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write samples file: " + path.string());
  char buf[64];
  for (double v : samples) {
    std::snprintf(buf, sizeof(buf), "%.12g\n", v);
    out << buf;
  }
  out.close();
  if (!out) throw IoError("failed writing samples file: " + path.string());
}

}  // namespace biosynth
