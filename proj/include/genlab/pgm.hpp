#pragma once
// Binary netpbm P5 images, the project's only image format. Writing is
// byte-deterministic: header "P5\n{w} {h}\n255\n" then row-major bytes,
// each pixel round(v * 255). Reading accepts general P5 whitespace and
// '#' comments but requires maxval 255 and rejects truncated or
// oversized payloads with the offending byte offset.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tensor.hpp"

namespace genlab {

inline std::string encode_pgm(const Tensor& img) {
  if (img.rank() != 3 || img.dims[0] != 1)
    throw std::invalid_argument("pgm wants a [1,H,W] tensor, got " + dims_to_string(img.dims));
  const int h = img.dims[1], w = img.dims[2];
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const float v = img(0, y, x);
      if (!(v >= 0.0f && v <= 1.0f))
        throw std::invalid_argument("pgm pixel (" + std::to_string(y) + "," + std::to_string(x) +
                                    ") = " + std::to_string(v) + " outside [0,1]");
      out.push_back(char(uint8_t(std::lround(v * 255.0f))));
    }
  return out;
}

inline void write_pgm(const Tensor& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string bytes = encode_pgm(img);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace detail {

struct PgmScanner {
  const std::string& buf;
  size_t pos = 0;
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("pgm malformed at byte " + std::to_string(pos) + ": " + what);
  }
  void skip_space() {
    while (pos < buf.size()) {
      const char c = buf[pos];
      if (c == '#') {
        while (pos < buf.size() && buf[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        return;
      }
    }
  }
  int number(const char* what) {
    skip_space();
    if (pos >= buf.size() || buf[pos] < '0' || buf[pos] > '9')
      fail(std::string("expected ") + what);
    int64_t v = 0;
    while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
      v = v * 10 + (buf[pos] - '0');
      if (v > 1 << 20) fail(std::string(what) + " out of range");
      ++pos;
    }
    return int(v);
  }
};

}  // namespace detail

inline Tensor decode_pgm(const std::string& buf) {
  detail::PgmScanner s{buf};
  if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') s.fail("expected magic P5");
  s.pos = 2;
  const int w = s.number("width");
  const int h = s.number("height");
  const int maxval = s.number("maxval");
  if (maxval != 255) s.fail("maxval " + std::to_string(maxval) + " unsupported, need 255");
  if (w < 1 || h < 1) s.fail("degenerate dimensions");
  // exactly one whitespace byte separates maxval from the raster
  if (s.pos >= buf.size() || !(buf[s.pos] == ' ' || buf[s.pos] == '\t' || buf[s.pos] == '\r' ||
                               buf[s.pos] == '\n'))
    s.fail("expected single whitespace before raster");
  ++s.pos;
  const size_t need = size_t(w) * size_t(h);
  if (buf.size() - s.pos < need)
    throw std::runtime_error("pgm truncated at byte " + std::to_string(buf.size()) + ": need " +
                             std::to_string(need) + " raster bytes starting at " +
                             std::to_string(s.pos));
  if (buf.size() - s.pos > need) s.fail("trailing bytes after raster");
  Tensor img({1, h, w});
  for (size_t i = 0; i < need; ++i) img.data[i] = float(uint8_t(buf[s.pos + i])) / 255.0f;
  return img;
}

inline Tensor read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_pgm(ss.str());
}

}  // namespace genlab
