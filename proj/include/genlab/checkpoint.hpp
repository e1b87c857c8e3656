#pragma once
// NNCK checkpoint files, written byte-for-byte deterministically.
//
// Layout: plain-text header of key=value lines terminated by one blank
// line, then binary: magic "NNCK", u8 version (=1), u32le tensor count;
// per tensor u16le name length, UTF-8 name, u8 rank, rank * u32le dims,
// then numel * 4-byte little-endian IEEE-754 floats.
//
// Model headers use: input_dims=C,H,W  seed=N  layer.N=<kind:args>, with
// layer kinds encoded as dense:in:out, conv2d:in:out:k:stride:pad,
// relu, maxpool2, softmax, lstm:input:hidden, embedding:vocab:dim.
// Extra key=value pairs (vocab tables, class names) ride along untouched.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"

namespace genlab {

using HeaderEntries = std::vector<std::pair<std::string, std::string>>;

struct NamedTensor {
  std::string name;
  Tensor value;
};

struct Checkpoint {
  HeaderEntries header;
  std::vector<NamedTensor> tensors;

  const std::string* find(const std::string& key) const {
    for (const auto& kv : header)
      if (kv.first == key) return &kv.second;
    return nullptr;
  }
  const Tensor* find_tensor(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return &t.value;
    return nullptr;
  }
};

namespace detail {

inline void put_u16le(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}
inline void put_u32le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  const std::string& buf;
  size_t pos = 0;
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("checkpoint truncated or corrupt at byte " + std::to_string(pos) +
                             ": " + what);
  }
  void need(size_t n, const char* what) const {
    if (pos + n > buf.size()) fail(std::string("expected ") + what);
  }
  uint8_t u8(const char* what) {
    need(1, what);
    return uint8_t(buf[pos++]);
  }
  uint32_t u16le(const char* what) {
    need(2, what);
    uint32_t v = uint8_t(buf[pos]) | (uint32_t(uint8_t(buf[pos + 1])) << 8);
    pos += 2;
    return v;
  }
  uint32_t u32le(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::string bytes(size_t n, const char* what) {
    need(n, what);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace detail

inline std::string encode_checkpoint(const Checkpoint& ck) {
  std::string out;
  for (const auto& kv : ck.header) {
    if (kv.first.find_first_of("=\n") != std::string::npos ||
        kv.second.find('\n') != std::string::npos)
      throw std::invalid_argument("header entry contains '=' in key or a newline: " + kv.first);
    out += kv.first;
    out += '=';
    out += kv.second;
    out += '\n';
  }
  out += '\n';
  out += "NNCK";
  out.push_back(char(1));  // version
  detail::put_u32le(out, uint32_t(ck.tensors.size()));
  for (const auto& t : ck.tensors) {
    if (t.name.size() > 0xffff) throw std::invalid_argument("tensor name too long: " + t.name);
    if (t.value.rank() > 255) throw std::invalid_argument("tensor rank too large");
    detail::put_u16le(out, uint32_t(t.name.size()));
    out += t.name;
    out.push_back(char(t.value.rank()));
    for (int d : t.value.dims) detail::put_u32le(out, uint32_t(d));
    for (float f : t.value.data) {
      uint32_t bits;
      std::memcpy(&bits, &f, 4);
      detail::put_u32le(out, bits);
    }
  }
  return out;
}

inline Checkpoint decode_checkpoint(const std::string& buf) {
  Checkpoint ck;
  size_t pos = 0;
  // header: key=value lines up to one blank line
  while (true) {
    size_t nl = buf.find('\n', pos);
    if (nl == std::string::npos)
      throw std::runtime_error("checkpoint truncated or corrupt at byte " + std::to_string(pos) +
                               ": header not terminated by a blank line");
    std::string line = buf.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) break;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("checkpoint header line without '=': " + line);
    ck.header.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  detail::ByteReader r{buf, pos};
  if (r.bytes(4, "magic") != "NNCK") {
    r.pos -= 4;
    r.fail("bad magic, expected NNCK");
  }
  const uint8_t ver = r.u8("version");
  if (ver != 1) throw std::runtime_error("unsupported checkpoint version " + std::to_string(ver));
  const uint32_t count = r.u32le("tensor count");
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor nt;
    const uint32_t nlen = r.u16le("name length");
    nt.name = r.bytes(nlen, "tensor name");
    const uint8_t rank = r.u8("rank");
    std::vector<int> dims;
    int64_t numel = 1;
    for (int d = 0; d < rank; ++d) {
      const uint32_t dim = r.u32le("dim");
      if (dim == 0 || dim > 0x7fffffff) r.fail("dimension out of range");
      dims.push_back(int(dim));
      numel *= dim;
      if (numel > (int64_t(1) << 31)) r.fail("tensor too large");
    }
    nt.value = Tensor(dims);
    for (int64_t k = 0; k < numel; ++k) {
      const uint32_t bits = r.u32le("float data");
      std::memcpy(&nt.value.data[size_t(k)], &bits, 4);
    }
    ck.tensors.push_back(std::move(nt));
  }
  if (r.pos != buf.size()) r.fail("trailing bytes after last tensor");
  return ck;
}

inline void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string bytes = encode_checkpoint(ck);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_checkpoint(ss.str());
}

// ------------------------------------------------------- model headers

inline std::string layer_to_string(const LayerSpec& s) {
  std::ostringstream o;
  switch (s.kind) {
    case LayerKind::kDense: o << "dense:" << s.in_features << ":" << s.out_features; break;
    case LayerKind::kConv2d:
      o << "conv2d:" << s.in_channels << ":" << s.out_channels << ":" << s.kernel << ":"
        << s.stride << ":" << s.pad;
      break;
    case LayerKind::kReLU: o << "relu"; break;
    case LayerKind::kMaxPool2: o << "maxpool2"; break;
    case LayerKind::kSoftmax: o << "softmax"; break;
    case LayerKind::kLSTMCell: o << "lstm:" << s.input_size << ":" << s.hidden_size; break;
    case LayerKind::kEmbeddingLookup:
      o << "embedding:" << s.vocab_size << ":" << s.embed_dim;
      break;
  }
  return o.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw std::runtime_error("bad integer '" + s + "' in " + what);
  }
}

}  // namespace detail

inline LayerSpec layer_from_string(const std::string& text) {
  const auto parts = detail::split(text, ':');
  const std::string& kind = parts[0];
  auto want = [&](size_t n) {
    if (parts.size() != n)
      throw std::runtime_error("layer spec '" + text + "' needs " + std::to_string(n - 1) +
                               " arguments");
  };
  auto arg = [&](size_t i) { return detail::parse_int(parts[i], "layer spec '" + text + "'"); };
  if (kind == "dense") {
    want(3);
    return LayerSpec::dense(arg(1), arg(2));
  }
  if (kind == "conv2d") {
    want(6);
    return LayerSpec::conv2d(arg(1), arg(2), arg(3), arg(4), arg(5));
  }
  if (kind == "relu") {
    want(1);
    return LayerSpec::relu();
  }
  if (kind == "maxpool2") {
    want(1);
    return LayerSpec::maxpool2();
  }
  if (kind == "softmax") {
    want(1);
    return LayerSpec::softmax();
  }
  if (kind == "lstm") {
    want(3);
    return LayerSpec::lstm_cell(arg(1), arg(2));
  }
  if (kind == "embedding") {
    want(3);
    return LayerSpec::embedding(arg(1), arg(2));
  }
  throw std::runtime_error("unknown layer kind '" + kind + "'");
}

// Persists spec + seed + every parameter; extras are appended after the
// model keys in the order given.
inline void save_model(const std::string& path, const Model& m, const HeaderEntries& extras = {}) {
  Checkpoint ck;
  {
    std::string dims;
    for (size_t i = 0; i < m.input_dims.size(); ++i) {
      if (i) dims += ',';
      dims += std::to_string(m.input_dims[i]);
    }
    ck.header.emplace_back("input_dims", dims);
  }
  ck.header.emplace_back("seed", std::to_string(m.seed));
  for (size_t i = 0; i < m.layers.size(); ++i)
    ck.header.emplace_back("layer." + std::to_string(i), layer_to_string(m.layers[i]));
  for (const auto& kv : extras) ck.header.push_back(kv);
  for (const auto& p : m.params) ck.tensors.push_back({p.name, p.value});
  write_checkpoint(path, ck);
}

// Rebuilds the model described by ck's header and installs its tensors.
inline Model model_from_checkpoint(const Checkpoint& ck) {
  const std::string* dims_text = ck.find("input_dims");
  if (!dims_text) throw std::runtime_error("checkpoint header missing input_dims");
  std::vector<int> input_dims;
  for (const auto& part : detail::split(*dims_text, ','))
    input_dims.push_back(detail::parse_int(part, "input_dims"));
  uint64_t seed = 0;
  if (const std::string* s = ck.find("seed")) seed = std::stoull(*s);
  std::vector<LayerSpec> layers;
  for (size_t i = 0;; ++i) {
    const std::string* l = ck.find("layer." + std::to_string(i));
    if (!l) break;
    layers.push_back(layer_from_string(*l));
  }
  if (layers.empty()) throw std::runtime_error("checkpoint header has no layer.N entries");
  Model m = build_model(std::move(layers), std::move(input_dims), seed);
  for (auto& p : m.params) {
    const Tensor* t = ck.find_tensor(p.name);
    if (!t) throw std::runtime_error("checkpoint missing tensor " + p.name);
    if (t->dims != p.value.dims)
      throw std::runtime_error("checkpoint tensor " + p.name + " has shape " +
                               dims_to_string(t->dims) + ", model expects " +
                               dims_to_string(p.value.dims));
    p.value = *t;
  }
  return m;
}

inline Model load_model(const std::string& path, Checkpoint* out_ck = nullptr) {
  Checkpoint ck = read_checkpoint(path);
  Model m = model_from_checkpoint(ck);
  if (out_ck) *out_ck = std::move(ck);
  return m;
}

}  // namespace genlab
