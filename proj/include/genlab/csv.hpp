#pragma once
// CSV output: header row, comma separators, LF line endings, floats at 9
// significant digits. Everything numeric funnels through g9() so reruns
// are byte-identical.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace genlab {

inline std::string g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) : width_(header.size()) {
    append_row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
      throw std::invalid_argument("csv row has " + std::to_string(cells.size()) +
                                  " cells, header has " + std::to_string(width_));
    append_row(cells);
  }

  const std::string& str() const { return buf_; }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(buf_.data(), std::streamsize(buf_.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
  }

 private:
  void append_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\n\"") != std::string::npos)
        throw std::invalid_argument("csv cell needs quoting, which this writer avoids: " +
                                    cells[i]);
      if (i) buf_ += ',';
      buf_ += cells[i];
    }
    buf_ += '\n';
  }

  size_t width_;
  std::string buf_;
};

}  // namespace genlab
