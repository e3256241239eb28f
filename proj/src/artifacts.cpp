#include "qflab/artifacts.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "qflab/errors.hpp"

namespace qflab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
  current_ = std::move(header);
  end_row();
  rows_ = 0;
}

CsvTable& CsvTable::cell(std::string_view s) {
  current_.push_back(csv_escape(s));
  return *this;
}

CsvTable& CsvTable::cell(double v) {
  current_.push_back(format_double(v));
  return *this;
}

CsvTable& CsvTable::cell(std::int64_t v) {
  current_.push_back(std::to_string(v));
  return *this;
}

CsvTable& CsvTable::cell(std::uint64_t v) {
  current_.push_back(std::to_string(v));
  return *this;
}

void CsvTable::end_row() {
  if (current_.size() != width_) throw Error("csv row width does not match header");
  for (std::size_t i = 0; i < current_.size(); ++i) {
    if (i) text_ += ',';
    text_ += current_[i];
  }
  text_ += "\r\n";
  current_.clear();
  ++rows_;
}

std::string CsvTable::str() const { return text_; }

ArtifactSet::ArtifactSet(std::filesystem::path root) : root_(std::move(root)) {}

void ArtifactSet::write(const std::string& relative, std::string_view content) {
  const auto path = root_ / relative;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write artifact " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing artifact " + path.string());
  if (std::find(files_.begin(), files_.end(), relative) == files_.end()) files_.push_back(relative);
}

}  // namespace qflab
