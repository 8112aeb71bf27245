#include "activelad/oracle.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "activelad/error.hpp"
#include "activelad/io.hpp"

namespace activelad {

double LabelOracle::query(std::size_t i) {
  if (i >= size()) {
    throw DimensionError("label query " + std::to_string(i) + " out of range (n = " +
                         std::to_string(size()) + ")");
  }
  const double y = fetch(i);
  log_.push_back(i);
  return y;
}

double VectorOracle::fetch(std::size_t i) { return labels_[i]; }

FileOracle::FileOracle(const std::string& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw DataError("cannot open label file '" + path + "'");
  // Index the start of every non-blank line without parsing anything.
  std::uint64_t pos = 0;
  std::uint64_t line_start = 0;
  std::size_t line_no = 1;
  bool blank = true;
  char buf[1 << 16];
  while (in_) {
    in_.read(buf, sizeof buf);
    const std::streamsize got = in_.gcount();
    for (std::streamsize k = 0; k < got; ++k, ++pos) {
      const char c = buf[k];
      if (c == '\n') {
        if (!blank) {
          offsets_.push_back(line_start);
          line_numbers_.push_back(line_no);
        }
        line_start = pos + 1;
        ++line_no;
        blank = true;
      } else if (c != '\r' && c != ' ' && c != '\t') {
        blank = false;
      }
    }
  }
  if (!blank) {
    offsets_.push_back(line_start);
    line_numbers_.push_back(line_no);
  }
  in_.clear();
}

double FileOracle::fetch(std::size_t i) {
  in_.seekg(static_cast<std::streamoff>(offsets_[i]));
  std::string line;
  std::getline(in_, line);
  ++lines_read_;
  return parse_label_line(line, path_, line_numbers_[i]);
}

}  // namespace activelad
