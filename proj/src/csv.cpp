#include "paramp/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace paramp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  row(header);
  rows_ = 0;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::logic_error("CsvWriter: row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  ++rows_;
}

}  // namespace paramp
