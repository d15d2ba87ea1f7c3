// Copyright 2026 The sclstm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal dense linear algebra and stochastic primitives. Everything is
// double precision and row-major; sizes here are tiny (hidden layers of
// ~80 units) so there is no attempt at being clever.

#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sclstm/error.hpp"

namespace sclstm::num {

using Vec = std::vector<double>;

struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows && c < cols);
    return a[r * cols + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows && c < cols);
    return a[r * cols + c];
  }
  double* row(std::size_t r) { return a.data() + r * cols; }
  const double* row(std::size_t r) const { return a.data() + r * cols; }
  std::size_t size() const { return a.size(); }
};

// xoshiro256** seeded through splitmix64. Integer-only state transitions,
// so streams are identical across platforms for the same seed.
struct Rng {
  std::uint64_t s[4];

  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& si : s) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      si = z ^ (z >> 31);
    }
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::size_t uniform_index(std::size_t n) {
    assert(n > 0);
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) %
           n;
  }

  // Derives an independent stream; the parent advances by one draw.
  Rng split() { return Rng(next() ^ 0xd1b54a32d192ed03ULL); }
};

inline Vec matvec(const Mat& m, const Vec& v) {
  if (m.cols != v.size())
    throw InputError("matvec: " + std::to_string(m.rows) + "x" +
                     std::to_string(m.cols) + " times vector of length " +
                     std::to_string(v.size()));
  Vec out(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * v[c];
    out[r] = s;
  }
  return out;
}

// out += M v
inline void matvec_acc(const Mat& m, const double* v, double* out) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * v[c];
    out[r] += s;
  }
}

// out += a * (M v)
inline void matvec_acc_scaled(const Mat& m, double a, const double* v,
                              double* out) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * v[c];
    out[r] += a * s;
  }
}

// out += M^T v
inline void matTvec_acc(const Mat& m, const double* v, double* out) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.row(r);
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * vr;
  }
}

// g += u v^T
inline void add_outer(Mat& g, const double* u, const double* v) {
  for (std::size_t r = 0; r < g.rows; ++r) {
    double* row = g.row(r);
    const double ur = u[r];
    if (ur == 0.0) continue;
    for (std::size_t c = 0; c < g.cols; ++c) row[c] += ur * v[c];
  }
}

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec sigmoid(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid_scalar(v[i]);
  return out;
}

inline Vec tanh_vec(const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

// Max-subtracted for stability; output sums to 1 up to rounding.
inline Vec softmax(const Vec& v) {
  assert(!v.empty());
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  Vec out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

// Draws an index from a probability vector. Rejects inputs that are not
// normalized; this catches callers passing raw logits.
inline std::size_t sample_categorical(const Vec& p, Rng& rng) {
  double sum = 0.0;
  for (double x : p) sum += x;
  if (std::abs(sum - 1.0) > 1e-6)
    throw InputError("sample_categorical: probabilities sum to " +
                     std::to_string(sum));
  const double u = rng.uniform01() * sum;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = i;
    cum += p[i];
    if (u < cum) return i;
  }
  return last_positive;  // u landed in the rounding tail
}

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

template <typename F>
void shuffle(std::vector<F>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng.uniform_index(i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace sclstm::num
