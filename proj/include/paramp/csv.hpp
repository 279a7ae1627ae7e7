#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace paramp {

/// Shortest decimal that round-trips to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double v);

/// Header-first CSV writer. Fields are written verbatim; callers pass
/// pre-formatted numbers.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

}  // namespace paramp
