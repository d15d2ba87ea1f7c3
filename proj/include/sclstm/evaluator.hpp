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

// Corpus-level evaluation: multi-reference BLEU-4, corpus slot error
// rate over the reranked top realisations, and the nearest-neighbour
// baseline.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sclstm/decoder.hpp"
#include "sclstm/delex.hpp"
#include "sclstm/trainer.hpp"

namespace sclstm::eval {

using TokenSeq = std::vector<std::string>;
using RefSet = std::vector<TokenSeq>;

namespace detail {

inline std::string ngram_key(const TokenSeq& toks, std::size_t start,
                             std::size_t n) {
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    if (k) key += '\x1f';
    key += toks[start + k];
  }
  return key;
}

inline std::map<std::string, std::size_t> ngram_counts(const TokenSeq& toks,
                                                       std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (toks.size() >= n)
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
      ++counts[ngram_key(toks, i, n)];
  return counts;
}

}  // namespace detail

// Corpus BLEU-4: modified n-gram precisions clipped against each
// hypothesis's reference set, geometric mean with uniform weights, times
// the brevity penalty with the closest-reference-length convention (ties
// broken towards the shorter reference). With smoothing off, a zero
// precision at any order makes the score exactly 0; with smoothing on, a
// zero numerator is floored to 1/(denominator+1).
inline double bleu4(const std::vector<TokenSeq>& hyps,
                    const std::vector<RefSet>& refs, bool smoothing = false) {
  if (hyps.empty()) throw InputError("bleu4: empty hypothesis list");
  if (hyps.size() != refs.size())
    throw InputError("bleu4: hypothesis/reference count mismatch");

  double num[4] = {0, 0, 0, 0};
  double den[4] = {0, 0, 0, 0};
  std::size_t hyp_len = 0, ref_len = 0;

  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (refs[i].empty()) throw InputError("bleu4: empty reference set");
    const TokenSeq& hyp = hyps[i];
    hyp_len += hyp.size();

    std::size_t closest = refs[i][0].size();
    for (const auto& r : refs[i]) {
      const auto d = [&](std::size_t len) {
        return len > hyp.size() ? len - hyp.size() : hyp.size() - len;
      };
      if (d(r.size()) < d(closest) ||
          (d(r.size()) == d(closest) && r.size() < closest))
        closest = r.size();
    }
    ref_len += closest;

    for (std::size_t n = 1; n <= 4; ++n) {
      auto hyp_counts = detail::ngram_counts(hyp, n);
      std::map<std::string, std::size_t> max_ref;
      for (const auto& r : refs[i])
        for (const auto& [k, c] : detail::ngram_counts(r, n))
          max_ref[k] = std::max(max_ref[k], c);
      for (const auto& [k, c] : hyp_counts) {
        den[n - 1] += static_cast<double>(c);
        const auto it = max_ref.find(k);
        if (it != max_ref.end())
          num[n - 1] += static_cast<double>(std::min(c, it->second));
      }
    }
  }

  double log_prec = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double p;
    if (den[n] == 0.0) {
      p = 0.0;
    } else if (num[n] == 0.0) {
      p = smoothing ? 1.0 / (den[n] + 1.0) : 0.0;
    } else {
      p = num[n] / den[n];
    }
    if (p == 0.0) return 0.0;
    log_prec += 0.25 * std::log(p);
  }

  double bp = 1.0;
  if (hyp_len == 0) return 0.0;
  if (hyp_len < ref_len)
    bp = std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
  return bp * std::exp(log_prec);
}

// Corpus slot error rate in percent: the mean slot_error_rate over every
// listed realisation of every DA, times 100.
inline double corpus_err(
    const std::vector<std::vector<da::DelexUtterance>>& realisations,
    const std::vector<da::DialogueAct>& das) {
  if (realisations.size() != das.size())
    throw InputError("corpus_err: realisation/DA count mismatch");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < das.size(); ++i)
    for (const auto& r : realisations[i]) {
      total += decode::slot_error_rate(r, das[i]);
      ++count;
    }
  return count == 0 ? 0.0 : 100.0 * total / static_cast<double>(count);
}

inline double cosine(const num::Vec& a, const num::Vec& b) {
  const double na = num::norm2(a), nb = num::norm2(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num::dot(a, b) / (na * nb);
}

// Nearest-neighbour baseline: returns the training example whose DA
// vector has the highest cosine similarity with the test DA vector.
// Ties prefer the lexicographically smallest canonical DA, then surface.
inline const train::Example& knn_generate(
    const std::vector<train::Example>& trainset, const num::Vec& test_d0) {
  if (trainset.empty()) throw InputError("knn_generate: empty training set");
  const train::Example* best = nullptr;
  double best_sim = -2.0;
  std::string best_canon;
  for (const auto& e : trainset) {
    const double sim = cosine(e.d0, test_d0);
    if (best == nullptr || sim > best_sim) {
      best = &e;
      best_sim = sim;
      best_canon = da::canonical_da(e.act);
      continue;
    }
    if (sim == best_sim) {
      const std::string canon = da::canonical_da(e.act);
      if (canon < best_canon ||
          (canon == best_canon && e.utt.tokens < best->utt.tokens)) {
        best = &e;
        best_canon = canon;
      }
    }
  }
  return *best;
}

// For each evaluated DA, the reference set: every delexicalised surface
// form sharing its canonical DA anywhere in the corpus, lexicalised with
// the DA's own values. A DA with no group falls back to its own gold
// utterance and is flagged.
inline std::vector<RefSet> build_references(
    const std::vector<train::Example>& eval_set,
    const std::map<std::string, std::vector<da::DelexUtterance>>& groups,
    std::size_t* fallback_count = nullptr) {
  std::vector<RefSet> out;
  out.reserve(eval_set.size());
  std::size_t fallbacks = 0;
  for (const auto& e : eval_set) {
    RefSet refs;
    auto it = groups.find(da::canonical_da(e.act));
    if (it != groups.end()) {
      for (const auto& form : it->second)
        refs.push_back(da::tokenize(da::lexicalise(form, e.act)));
    } else {
      ++fallbacks;
      refs.push_back(da::tokenize(da::lexicalise(e.utt, e.act)));
    }
    out.push_back(std::move(refs));
  }
  if (fallback_count) *fallback_count = fallbacks;
  return out;
}

struct PerDaDetail {
  std::string da_string;
  std::string top_text;
  double mean_err = 0.0;
};

struct EvalReport {
  double bleu_top1 = 0.0;
  double bleu_top5_mean = 0.0;
  double err_percent = 0.0;
  std::size_t n_das = 0;
  std::size_t reference_fallbacks = 0;
  std::vector<PerDaDetail> details;
};

// Full protocol for one trained model: over-generate, keep the top
// realisations, score BLEU against the grouped references and the corpus
// slot error rate over all kept realisations.
inline EvalReport evaluate_model(
    const net::NetworkParams& fwd, const net::NetworkParams& bwd,
    const net::NetConfig& cfg, const da::Vocab& vocab,
    const da::Ontology& ont, const std::vector<train::Example>& eval_set,
    const std::map<std::string, std::vector<da::DelexUtterance>>& groups,
    const decode::DecodeConfig& dc, std::uint64_t seed,
    const net::CostParams& cp = {}) {
  EvalReport report;
  report.n_das = eval_set.size();
  if (eval_set.empty()) return report;

  std::vector<RefSet> refs =
      build_references(eval_set, groups, &report.reference_fallbacks);

  std::vector<std::vector<TokenSeq>> hyp_by_rank(
      dc.n_best, std::vector<TokenSeq>(eval_set.size()));
  std::vector<std::vector<da::DelexUtterance>> realisations(eval_set.size());
  std::vector<da::DialogueAct> das(eval_set.size());

  num::Rng base(seed);
  for (std::size_t i = 0; i < eval_set.size(); ++i) {
    const auto& e = eval_set[i];
    das[i] = e.act;
    num::Rng rng = base.split();
    auto top = decode::rerank(fwd, bwd, cfg, vocab, e.d0, e.act, dc, rng, cp);
    for (std::size_t r = 0; r < top.size(); ++r) {
      hyp_by_rank[r][i] = da::tokenize(da::lexicalise(top[r].tokens, e.act));
      realisations[i].push_back(top[r].tokens);
    }
    PerDaDetail det;
    det.da_string = da::render_da(e.act, ont);
    det.top_text = da::lexicalise(top[0].tokens, e.act);
    double errsum = 0.0;
    for (const auto& c : top) errsum += c.err;
    det.mean_err = errsum / static_cast<double>(top.size());
    report.details.push_back(std::move(det));
  }

  report.bleu_top1 = bleu4(hyp_by_rank[0], refs);
  double sum = 0.0;
  for (std::size_t r = 0; r < hyp_by_rank.size(); ++r)
    sum += bleu4(hyp_by_rank[r], refs);
  report.bleu_top5_mean = sum / static_cast<double>(hyp_by_rank.size());
  report.err_percent = corpus_err(realisations, das);
  return report;
}

// The same protocol for the kNN baseline: one retrieved realisation per
// DA, no training involved.
inline EvalReport evaluate_knn(
    const std::vector<train::Example>& trainset,
    const std::vector<train::Example>& eval_set, const da::Ontology& ont,
    const std::map<std::string, std::vector<da::DelexUtterance>>& groups) {
  EvalReport report;
  report.n_das = eval_set.size();
  if (eval_set.empty()) return report;

  std::vector<RefSet> refs =
      build_references(eval_set, groups, &report.reference_fallbacks);
  std::vector<TokenSeq> hyps(eval_set.size());
  std::vector<std::vector<da::DelexUtterance>> realisations(eval_set.size());
  std::vector<da::DialogueAct> das(eval_set.size());

  for (std::size_t i = 0; i < eval_set.size(); ++i) {
    const auto& e = eval_set[i];
    das[i] = e.act;
    const train::Example& nn = knn_generate(trainset, e.d0);
    hyps[i] = da::tokenize(da::lexicalise(nn.utt, e.act));
    realisations[i].push_back(nn.utt);
    PerDaDetail det;
    det.da_string = da::render_da(e.act, ont);
    det.top_text = da::lexicalise(nn.utt, e.act);
    det.mean_err = decode::slot_error_rate(nn.utt, e.act);
    report.details.push_back(std::move(det));
  }
  report.bleu_top1 = bleu4(hyps, refs);
  report.bleu_top5_mean = report.bleu_top1;
  report.err_percent = corpus_err(realisations, das);
  return report;
}

}  // namespace sclstm::eval
