#pragma once
// Dense n-dimensional array, row-major, 32-bit floats by default. The
// template parameter exists so the gradient-check harness can rerun the
// same math in double precision; everything stored on disk is float.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace genlab {

inline std::string dims_to_string(const std::vector<int>& dims) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ',';
    os << dims[i];
  }
  os << ']';
  return os.str();
}

inline int64_t checked_numel(const std::vector<int>& dims) {
  if (dims.empty()) throw std::invalid_argument("tensor needs at least one dimension");
  int64_t n = 1;
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("tensor dims must be positive, got " + dims_to_string(dims));
    n *= d;
  }
  return n;
}

template <typename T>
struct TensorT {
  std::vector<int> dims;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> d) : dims(std::move(d)), data(size_t(checked_numel(dims)), T(0)) {}
  TensorT(std::vector<int> d, std::vector<T> values) : dims(std::move(d)), data(std::move(values)) {
    if (int64_t(data.size()) != checked_numel(dims))
      throw std::invalid_argument("tensor data length " + std::to_string(data.size()) +
                                  " does not match dims " + dims_to_string(dims));
  }

  static TensorT zeros(std::vector<int> d) { return TensorT(std::move(d)); }
  static TensorT full(std::vector<int> d, T v) {
    TensorT t(std::move(d));
    for (auto& x : t.data) x = v;
    return t;
  }

  int rank() const { return int(dims.size()); }
  int64_t numel() const { return int64_t(data.size()); }
  int size(int axis) const { return dims[size_t(axis)]; }

  bool same_dims(const TensorT& o) const { return dims == o.dims; }

  T& operator()(int i) { return data[size_t(i)]; }
  T operator()(int i) const { return data[size_t(i)]; }
  T& operator()(int i, int j) { return data[size_t(i) * dims[1] + j]; }
  T operator()(int i, int j) const { return data[size_t(i) * dims[1] + j]; }
  T& operator()(int i, int j, int k) { return data[(size_t(i) * dims[1] + j) * dims[2] + k]; }
  T operator()(int i, int j, int k) const { return data[(size_t(i) * dims[1] + j) * dims[2] + k]; }
  T& operator()(int i, int j, int k, int l) {
    return data[((size_t(i) * dims[1] + j) * dims[2] + k) * dims[3] + l];
  }
  T operator()(int i, int j, int k, int l) const {
    return data[((size_t(i) * dims[1] + j) * dims[2] + k) * dims[3] + l];
  }

  bool all_finite() const {
    for (T v : data)
      if (!std::isfinite(double(v))) return false;
    return true;
  }

  void fill(T v) {
    for (auto& x : data) x = v;
  }

  T min_value() const {
    T m = data.empty() ? T(0) : data[0];
    for (T v : data) m = v < m ? v : m;
    return m;
  }
  T max_value() const {
    T m = data.empty() ? T(0) : data[0];
    for (T v : data) m = v > m ? v : m;
    return m;
  }
};

using Tensor = TensorT<float>;

template <typename T>
inline void ensure_finite(const TensorT<T>& t, const std::string& where) {
  if (!t.all_finite()) throw std::runtime_error("non-finite values in " + where);
}

inline TensorT<double> to_double(const Tensor& t) {
  TensorT<double> r(t.dims);
  for (size_t i = 0; i < t.data.size(); ++i) r.data[i] = double(t.data[i]);
  return r;
}

inline Tensor to_float(const TensorT<double>& t) {
  Tensor r(t.dims);
  for (size_t i = 0; i < t.data.size(); ++i) r.data[i] = float(t.data[i]);
  return r;
}

}  // namespace genlab
