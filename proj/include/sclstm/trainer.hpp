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

// Training: per-sentence SGD on the gate-regularised cost, alternating
// between the forward generator and the backward reranker with tied
// keyword-detector weights, plus the corpus plumbing around it (grouped
// 3:1:1 split, up-sampling, early stopping).

#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sclstm/delex.hpp"
#include "sclstm/dialogue_act.hpp"
#include "sclstm/net.hpp"

namespace sclstm::train {

using net::CostBreakdown;
using net::CostParams;
using net::NetConfig;
using net::NetworkParams;

struct TrainConfig {
  double learning_rate = 0.1;
  double lr_decay = 0.5;      // applied when validation stalls
  double eta = 1e-4;
  double xi = 100.0;
  double l2_coeff = 1e-5;
  std::size_t l2_every = 10;  // sentences
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  double clip = 5.0;          // elementwise gradient magnitude cap
  std::uint64_t seed = 1;
  bool upsample = true;

  CostParams cost() const { return CostParams{eta, xi}; }
};

struct Example {
  da::DialogueAct act;
  da::DelexUtterance utt;
  num::Vec d0;
};

struct SplitCorpus {
  std::vector<Example> train, valid, test;
  da::Vocab vocab;  // built over all three splits
};

// Input tokens for teacher forcing (everything but the trailing EOS) and
// the matching prediction targets.
inline std::vector<std::size_t> input_ids(const da::DelexUtterance& u,
                                          const da::Vocab& v) {
  std::vector<std::size_t> ids = v.ids(u.tokens);
  ids.pop_back();
  return ids;
}

inline std::vector<std::size_t> target_ids(const da::DelexUtterance& u,
                                           const da::Vocab& v) {
  std::vector<std::size_t> ids = v.ids(u.tokens);
  ids.erase(ids.begin());
  return ids;
}

// The modified per-sentence cost with its term breakdown.
inline CostBreakdown sentence_cost(const net::ForwardTrace& trace,
                                   const std::vector<std::size_t>& targets,
                                   const CostParams& cp = {}) {
  return net::cost_terms(trace, targets, cp);
}

// Partitions whole canonical-DA groups into train/valid/test at 3:1:1 so
// no delexicalised surface form leaks between splits.
inline SplitCorpus split_corpus(const std::vector<da::CorpusEntry>& corpus,
                                const da::Ontology& ont,
                                std::uint64_t split_seed) {
  std::map<std::string, std::vector<const da::CorpusEntry*>> groups;
  for (const auto& e : corpus) groups[da::canonical_da(e.act)].push_back(&e);

  std::vector<std::string> keys;
  keys.reserve(groups.size());
  for (const auto& [k, _] : groups) keys.push_back(k);
  num::Rng rng(split_seed);
  num::shuffle(keys, rng);

  const double share[3] = {3.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0};
  std::size_t counts[3] = {0, 0, 0};
  SplitCorpus out;
  std::vector<Example>* splits[3] = {&out.train, &out.valid, &out.test};
  for (const auto& k : keys) {
    // most underfilled split relative to its share takes the next group
    std::size_t best = 0;
    double best_ratio = 1e18;
    for (std::size_t s = 0; s < 3; ++s) {
      const double ratio = (counts[s] + 1e-9) / share[s];
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = s;
      }
    }
    for (const auto* e : groups[k]) {
      splits[best]->push_back(
          Example{e->act, e->delex, da::encode_da(e->act, ont)});
      ++counts[best];
    }
  }

  std::vector<da::CorpusEntry> all;
  all.reserve(corpus.size());
  for (const auto& e : corpus) all.push_back(e);
  out.vocab = da::Vocab::build(all);
  return out;
}

// Replicates examples of small canonical-DA groups until each reaches the
// median group size. Nothing is ever removed.
inline std::vector<Example> upsample(const std::vector<Example>& split) {
  std::map<std::string, std::vector<const Example*>> groups;
  for (const auto& e : split) groups[da::canonical_da(e.act)].push_back(&e);
  if (groups.empty()) return split;

  std::vector<std::size_t> sizes;
  for (const auto& [_, g] : groups) sizes.push_back(g.size());
  std::sort(sizes.begin(), sizes.end());
  double median;
  const std::size_t m = sizes.size();
  if (m % 2 == 1)
    median = static_cast<double>(sizes[m / 2]);
  else
    median = (static_cast<double>(sizes[m / 2 - 1]) +
              static_cast<double>(sizes[m / 2])) /
             2.0;
  const std::size_t target =
      static_cast<std::size_t>(std::llround(median));

  std::vector<Example> out = split;
  for (const auto& [_, g] : groups) {
    std::size_t have = g.size();
    std::size_t i = 0;
    while (have < target) {
      out.push_back(*g[i % g.size()]);
      ++i;
      ++have;
    }
  }
  return out;
}

struct EpochRecord {
  std::size_t epoch = 0;
  double train_cost = 0.0;
  double valid_cost = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  NetworkParams forward;
  NetworkParams backward;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_valid_cost = 0.0;
};

namespace detail {

inline void clip_and_apply(NetworkParams& params, net::Gradients& grads,
                           double lr, double clip) {
  std::vector<num::Mat*> gb;
  grads.for_each_block(
      [&](const std::string&, num::Mat& m) { gb.push_back(&m); });
  std::size_t i = 0;
  params.for_each_block([&](const std::string&, num::Mat& m) {
    num::Mat& g = *gb[i++];
    for (std::size_t k = 0; k < m.a.size(); ++k) {
      double gv = g.a[k];
      if (gv > clip) gv = clip;
      if (gv < -clip) gv = -clip;
      m.a[k] -= lr * gv;
    }
  });
}

inline void add_l2(net::Gradients& grads, const NetworkParams& params,
                   double lambda) {
  std::vector<const num::Mat*> pb;
  params.for_each_block(
      [&](const std::string&, const num::Mat& m) { pb.push_back(&m); });
  std::size_t i = 0;
  grads.for_each_block([&](const std::string&, num::Mat& g) {
    const num::Mat& p = *pb[i++];
    for (std::size_t k = 0; k < g.a.size(); ++k) g.a[k] += lambda * p.a[k];
  });
}

}  // namespace detail

// Trains the forward generator and the backward reranker by SGD, one
// sentence per update, alternating between the two networks. The keyword
// detector W_wr is kept identical in both parameter sets, so it absorbs
// updates from both losses. Returns the parameters from the best
// validation epoch.
inline TrainResult train(
    const SplitCorpus& corpus, NetConfig net_cfg, const TrainConfig& tc,
    const std::function<void(const EpochRecord&)>& on_epoch = nullptr,
    const std::function<void(NetworkParams&, NetworkParams&)>& after_init =
        nullptr) {
  if (corpus.train.empty() || corpus.valid.empty())
    throw InputError("train() needs non-empty train and valid splits");

  net_cfg.vocab = corpus.vocab.size();
  if (net_cfg.da_dim == 0) net_cfg.da_dim = corpus.train[0].d0.size();
  const CostParams cp = tc.cost();

  num::Rng rng(tc.seed);
  NetworkParams fwd = NetworkParams::init(net_cfg, rng);
  NetworkParams bwd = NetworkParams::init(net_cfg, rng);
  if (after_init) after_init(fwd, bwd);
  bwd.W_wr = fwd.W_wr;  // tied

  std::vector<Example> pool =
      tc.upsample ? upsample(corpus.train) : corpus.train;

  struct Prepared {
    std::vector<std::size_t> fwd_in, fwd_tgt, bwd_in, bwd_tgt;
  };
  auto encode_example = [&](const Example& e) -> Prepared {
    Prepared p;
    p.fwd_in = input_ids(e.utt, corpus.vocab);
    p.fwd_tgt = target_ids(e.utt, corpus.vocab);
    da::DelexUtterance rev;
    rev.tokens = net::reverse_for_reranker(e.utt.tokens);
    p.bwd_in = input_ids(rev, corpus.vocab);
    p.bwd_tgt = target_ids(rev, corpus.vocab);
    return p;
  };

  TrainResult result;
  result.forward = fwd;
  result.backward = bwd;
  result.best_valid_cost = std::numeric_limits<double>::infinity();

  double lr = tc.learning_rate;
  std::size_t stall = 0;
  std::size_t sentence_counter = 0;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    num::shuffle(pool, rng);
    double train_cost = 0.0;
    std::size_t sent_idx = 0;
    for (const auto& ex : pool) {
      ++sent_idx;
      Prepared p = encode_example(ex);
      const bool with_l2 =
          tc.l2_every > 0 && (++sentence_counter % tc.l2_every == 0);

      // forward network
      {
        net::ForwardTrace trace =
            net::forward_sentence(fwd, net_cfg, p.fwd_in, ex.d0, &rng, true);
        auto [grads, loss] =
            net::backprop_sentence(fwd, net_cfg, trace, p.fwd_tgt, cp);
        if (!std::isfinite(loss))
          throw NumericError("diverged at epoch " + std::to_string(epoch) +
                             ", sentence " + std::to_string(sent_idx));
        train_cost += loss;
        if (with_l2) detail::add_l2(grads, fwd, tc.l2_coeff);
        detail::clip_and_apply(fwd, grads, lr, tc.clip);
        bwd.W_wr = fwd.W_wr;
      }
      // backward network on the reversed sentence
      {
        net::ForwardTrace trace =
            net::forward_sentence(bwd, net_cfg, p.bwd_in, ex.d0, &rng, true);
        auto [grads, loss] =
            net::backprop_sentence(bwd, net_cfg, trace, p.bwd_tgt, cp);
        if (!std::isfinite(loss))
          throw NumericError("diverged (backward net) at epoch " +
                             std::to_string(epoch) + ", sentence " +
                             std::to_string(sent_idx));
        if (with_l2) detail::add_l2(grads, bwd, tc.l2_coeff);
        detail::clip_and_apply(bwd, grads, lr, tc.clip);
        fwd.W_wr = bwd.W_wr;
      }
    }

    double valid_cost = 0.0;
    for (const auto& ex : corpus.valid) {
      Prepared p = encode_example(ex);
      valid_cost += net::cost_terms(net::forward_sentence(fwd, net_cfg,
                                                          p.fwd_in, ex.d0,
                                                          nullptr, false),
                                    p.fwd_tgt, cp)
                        .total();
      valid_cost += net::cost_terms(net::forward_sentence(bwd, net_cfg,
                                                          p.bwd_in, ex.d0,
                                                          nullptr, false),
                                    p.bwd_tgt, cp)
                        .total();
    }
    if (!std::isfinite(valid_cost))
      throw NumericError("validation cost diverged at epoch " +
                         std::to_string(epoch));

    EpochRecord rec{epoch, train_cost / static_cast<double>(pool.size()),
                    valid_cost / static_cast<double>(corpus.valid.size()), lr};
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (valid_cost < result.best_valid_cost) {
      result.best_valid_cost = valid_cost;
      result.best_epoch = epoch;
      result.forward = fwd;
      result.backward = bwd;
      stall = 0;
    } else {
      ++stall;
      lr *= tc.lr_decay;
      if (stall > tc.patience) break;
    }
  }
  return result;
}

}  // namespace sclstm::train
