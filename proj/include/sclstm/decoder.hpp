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

// Decoding: over-generate candidates by sampling the forward generator,
// then rerank by combined forward/backward model cost plus a slot-error
// penalty.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "sclstm/delex.hpp"
#include "sclstm/dialogue_act.hpp"
#include "sclstm/net.hpp"
#include "sclstm/trainer.hpp"

namespace sclstm::decode {

struct DecodeConfig {
  std::size_t n_overgen = 20;
  std::size_t n_best = 5;
  double lambda = 100.0;
  std::size_t max_len = 60;  // body tokens before forced EOS
};

struct Candidate {
  da::DelexUtterance tokens;
  double f_cost = 0.0;
  double b_cost = 0.0;
  double err = 0.0;
  double score = 0.0;
  bool truncated = false;
};

// Samples one utterance token by token, feeding each drawn token back in,
// until EOS or the length cap. Dropout stays off.
inline Candidate sample_utterance(const net::NetworkParams& fwd,
                                  const net::NetConfig& cfg,
                                  const da::Vocab& vocab, const num::Vec& d0,
                                  num::Rng& rng, std::size_t max_len = 60) {
  Candidate cand;
  cand.tokens.tokens.push_back(da::kBos);
  net::State state = net::State::zeros(cfg);
  num::Vec d = d0;
  const net::StepMasks masks = net::StepMasks::ones(cfg);
  std::size_t token = vocab.bos();
  for (std::size_t emitted = 0;; ++emitted) {
    net::StepTrace tr;
    net::detail::step_core(fwd, cfg, token, state, d, masks, emitted, tr);
    const std::size_t next = num::sample_categorical(tr.p, rng);
    if (next == vocab.eos()) {
      cand.tokens.tokens.push_back(da::kEos);
      break;
    }
    if (emitted >= max_len) {
      cand.tokens.tokens.push_back(da::kEos);
      cand.truncated = true;
      break;
    }
    cand.tokens.tokens.push_back(vocab.token(next));
    token = next;
  }
  return cand;
}

// ERR = (missing + redundant slot tokens) / number of delexicalisable
// slots. Binary and dontcare bindings have no token and are excluded
// throughout; with no delexicalisable slot, every stray token counts 1.
inline double slot_error_rate(const da::DelexUtterance& cand,
                              const da::DialogueAct& act) {
  std::map<std::string, std::size_t> expected;
  for (const auto& [slot, v] : act.bindings)
    if (v.kind == da::ValueKind::categorical) expected[da::slot_token(slot)] = 1;

  std::map<std::string, std::size_t> found;
  for (const auto& tok : cand.tokens)
    if (da::is_slot_token(tok)) ++found[tok];

  std::size_t missing = 0, redundant = 0;
  for (const auto& [tok, want] : expected) {
    const std::size_t have = found.count(tok) ? found[tok] : 0;
    if (have < want) missing += want - have;
    if (have > want) redundant += have - want;
  }
  for (const auto& [tok, have] : found)
    if (!expected.count(tok)) redundant += have;

  const std::size_t n = expected.size();
  const double pq = static_cast<double>(missing + redundant);
  return n == 0 ? pq : pq / static_cast<double>(n);
}

// Teacher-forced model cost of a candidate under one network.
inline double candidate_cost(const net::NetworkParams& params,
                             const net::NetConfig& cfg, const da::Vocab& vocab,
                             const num::Vec& d0,
                             const std::vector<std::string>& tokens,
                             const net::CostParams& cp) {
  da::DelexUtterance u;
  u.tokens = tokens;
  const auto in = train::input_ids(u, vocab);
  const auto tgt = train::target_ids(u, vocab);
  return net::cost_terms(
             net::forward_sentence(params, cfg, in, d0, nullptr, false), tgt,
             cp)
      .total();
}

// Over-generates n_overgen candidates and keeps the n_best by score
// R = -(F_fwd + F_bwd + lambda * ERR). Ties go to the lower slot error,
// then the shorter utterance, then lexicographic token order.
inline std::vector<Candidate> rerank(const net::NetworkParams& fwd,
                                     const net::NetworkParams& bwd,
                                     const net::NetConfig& cfg,
                                     const da::Vocab& vocab,
                                     const num::Vec& d0,
                                     const da::DialogueAct& act,
                                     const DecodeConfig& dc, num::Rng& rng,
                                     const net::CostParams& cp = {}) {
  if (dc.n_best > dc.n_overgen)
    throw InputError("n_best exceeds n_overgen");
  std::vector<Candidate> cands;
  cands.reserve(dc.n_overgen);
  for (std::size_t k = 0; k < dc.n_overgen; ++k) {
    Candidate c = sample_utterance(fwd, cfg, vocab, d0, rng, dc.max_len);
    c.f_cost = candidate_cost(fwd, cfg, vocab, d0, c.tokens.tokens, cp);
    c.b_cost = candidate_cost(bwd, cfg, vocab, d0,
                              net::reverse_for_reranker(c.tokens.tokens), cp);
    c.err = slot_error_rate(c.tokens, act);
    c.score = -(c.f_cost + c.b_cost + dc.lambda * c.err);
    cands.push_back(std::move(c));
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.err != b.err) return a.err < b.err;
                     if (a.tokens.tokens.size() != b.tokens.tokens.size())
                       return a.tokens.tokens.size() < b.tokens.tokens.size();
                     return a.tokens.tokens < b.tokens.tokens;
                   });
  cands.resize(dc.n_best);
  return cands;
}

}  // namespace sclstm::decode
