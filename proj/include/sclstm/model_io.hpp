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

// Versioned binary model files: network configuration, vocabulary, and
// every weight block by name. Doubles are stored raw so a save/load
// round trip is bit exact.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sclstm/delex.hpp"
#include "sclstm/net.hpp"

namespace sclstm::net {

namespace detail {

constexpr std::uint32_t kModelMagic = 0x4d4c4353;  // "SCLM"
constexpr std::uint32_t kModelVersion = 1;

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw InputError("model file truncated");
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i)
    b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw InputError("model file truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& is) {
  const std::uint32_t len = get_u32(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw InputError("model file truncated");
  return s;
}

}  // namespace detail

struct Model {
  NetConfig cfg;
  NetworkParams params;
  da::Vocab vocab;
};

inline void save_model(std::ostream& os, const NetConfig& cfg,
                       const NetworkParams& params, const da::Vocab& vocab) {
  using namespace detail;
  put_u32(os, kModelMagic);
  put_u32(os, kModelVersion);
  put_u32(os, static_cast<std::uint32_t>(cfg.hidden));
  put_u32(os, static_cast<std::uint32_t>(cfg.layers));
  put_u32(os, static_cast<std::uint32_t>(cfg.embed_dim()));
  put_u32(os, static_cast<std::uint32_t>(cfg.vocab));
  put_u32(os, static_cast<std::uint32_t>(cfg.da_dim));
  put_f64(os, cfg.dropout);
  put_u32(os, static_cast<std::uint32_t>(cfg.layers));
  for (std::size_t l = 0; l < cfg.layers; ++l) put_f64(os, cfg.alpha_of(l));
  put_string(os, gating_name(cfg.gating));
  put_u32(os, static_cast<std::uint32_t>(cfg.turnoff.size()));
  for (int v : cfg.turnoff)
    put_u32(os, static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));

  put_u32(os, static_cast<std::uint32_t>(vocab.size()));
  for (const auto& t : vocab.tokens) put_string(os, t);

  std::uint32_t nblocks = 0;
  params.for_each_block([&](const std::string&, const num::Mat&) { ++nblocks; });
  put_u32(os, nblocks);
  params.for_each_block([&](const std::string& name, const num::Mat& m) {
    put_string(os, name);
    put_u32(os, static_cast<std::uint32_t>(m.rows));
    put_u32(os, static_cast<std::uint32_t>(m.cols));
    for (double v : m.a) put_f64(os, v);
  });
}

inline void save_model_file(const std::string& path, const NetConfig& cfg,
                            const NetworkParams& params,
                            const da::Vocab& vocab) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write model file '" + path + "'");
  save_model(os, cfg, params, vocab);
  if (!os) throw InputError("short write to model file '" + path + "'");
}

inline Model load_model(std::istream& is) {
  using namespace detail;
  if (get_u32(is) != kModelMagic) throw InputError("not a model file");
  if (get_u32(is) != kModelVersion)
    throw InputError("unsupported model file version");
  Model m;
  m.cfg.hidden = get_u32(is);
  m.cfg.layers = get_u32(is);
  m.cfg.embed = get_u32(is);
  m.cfg.vocab = get_u32(is);
  m.cfg.da_dim = get_u32(is);
  m.cfg.dropout = get_f64(is);
  const std::uint32_t nalpha = get_u32(is);
  m.cfg.alpha.resize(nalpha);
  for (auto& a : m.cfg.alpha) a = get_f64(is);
  m.cfg.gating = gating_from_name(get_string(is));
  const std::uint32_t nturn = get_u32(is);
  m.cfg.turnoff.resize(nturn);
  for (auto& v : m.cfg.turnoff)
    v = static_cast<std::int32_t>(get_u32(is));

  const std::uint32_t nvocab = get_u32(is);
  m.vocab.tokens.resize(nvocab);
  for (auto& t : m.vocab.tokens) t = get_string(is);
  for (std::size_t i = 0; i < m.vocab.tokens.size(); ++i)
    m.vocab.index[m.vocab.tokens[i]] = i;

  m.params = NetworkParams::shaped(m.cfg);
  std::map<std::string, num::Mat*> by_name;
  m.params.for_each_block(
      [&](const std::string& name, num::Mat& mat) { by_name[name] = &mat; });
  const std::uint32_t nblocks = get_u32(is);
  if (nblocks != by_name.size())
    throw InputError("model file block count mismatch");
  for (std::uint32_t b = 0; b < nblocks; ++b) {
    const std::string name = get_string(is);
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw InputError("unexpected model block '" + name + "'");
    num::Mat& mat = *it->second;
    const std::uint32_t rows = get_u32(is);
    const std::uint32_t cols = get_u32(is);
    if (rows != mat.rows || cols != mat.cols)
      throw InputError("model block '" + name + "' has wrong shape");
    for (double& v : mat.a) v = get_f64(is);
  }
  return m;
}

inline Model load_model_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open model file '" + path + "'");
  return load_model(is);
}

// Optional pre-trained word vectors: plain text, one token per line,
// token followed by its embedding values. Tokens absent from the file
// keep their random initialisation.
inline std::size_t load_word_vectors(const std::string& path,
                                     const da::Vocab& vocab,
                                     NetworkParams& params) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open word-vector file '" + path + "'");
  std::string line;
  std::size_t loaded = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    auto it = vocab.index.find(tok);
    if (it == vocab.index.end()) continue;
    for (std::size_t k = 0; k < params.emb.cols; ++k) {
      double v;
      if (!(ls >> v))
        throw InputError("word-vector line for '" + tok + "' has fewer than " +
                         std::to_string(params.emb.cols) + " values");
      params.emb(it->second, k) = v;
    }
    ++loaded;
  }
  return loaded;
}

}  // namespace sclstm::net
