#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qflab {

// Shortest text that keeps the full double: printf %.17g.
std::string format_double(double v);

// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& cell(std::string_view s);
  CsvTable& cell(double v);
  CsvTable& cell(std::int64_t v);
  CsvTable& cell(std::uint64_t v);
  CsvTable& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvTable& cell(bool v) { return cell(static_cast<std::int64_t>(v ? 1 : 0)); }
  CsvTable& cell(const char* s) { return cell(std::string_view(s)); }
  // Finishes the current row; throws if its width differs from the header.
  void end_row();

  std::size_t rows() const { return rows_; }
  std::string str() const;

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::vector<std::string> current_;
  std::string text_;
};

// Collects the files an experiment writes below its output directory so the
// manifest can list every one of them.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& relative, std::string_view content);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

}  // namespace qflab
