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

// Test-only reference implementations, written independently of the
// library code they validate.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sclstm/dialogue_act.hpp"
#include "sclstm/net.hpp"

namespace oracles {

// --- plain LSTM (no DA conditioning, one layer) -----------------------

struct PlainLstmStep {
  std::vector<double> h, c, p;
};

// Direct transcription of the ungated cell equations, computed with bare
// loops over the same weight blocks the library uses.
inline std::vector<PlainLstmStep> plain_lstm_run(
    const sclstm::net::NetworkParams& P, std::size_t hidden,
    std::size_t embed, std::size_t vocab,
    const std::vector<std::size_t>& tokens) {
  std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
  std::vector<PlainLstmStep> out;
  for (std::size_t tok : tokens) {
    std::vector<double> x(embed);
    for (std::size_t k = 0; k < embed; ++k) x[k] = P.emb(tok, k);

    auto affine = [&](const sclstm::num::Mat& Wx, const sclstm::num::Mat& Wh,
                      std::size_t row) {
      double s = 0.0;
      for (std::size_t k = 0; k < embed; ++k) s += Wx(row, k) * x[k];
      for (std::size_t k = 0; k < hidden; ++k) s += Wh(row, k) * h[k];
      return s;
    };

    std::vector<double> hn(hidden), cn(hidden);
    const auto& L = P.layer[0];
    for (std::size_t k = 0; k < hidden; ++k) {
      const double ig = 1.0 / (1.0 + std::exp(-affine(L.W_wi, L.W_hi, k)));
      const double fg = 1.0 / (1.0 + std::exp(-affine(L.W_wf, L.W_hf, k)));
      const double og = 1.0 / (1.0 + std::exp(-affine(L.W_wo, L.W_ho_rec, k)));
      const double ch = std::tanh(affine(L.W_wc, L.W_hc, k));
      cn[k] = fg * c[k] + ig * ch;
      hn[k] = og * std::tanh(cn[k]);
    }
    h = hn;
    c = cn;

    std::vector<double> logits(vocab, 0.0);
    for (std::size_t v = 0; v < vocab; ++v)
      for (std::size_t k = 0; k < hidden; ++k)
        logits[v] += P.W_out(v, k) * h[k];
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    std::vector<double> p(vocab);
    for (std::size_t v = 0; v < vocab; ++v) {
      p[v] = std::exp(logits[v] - mx);
      sum += p[v];
    }
    for (double& v : p) v /= sum;
    out.push_back({h, c, p});
  }
  return out;
}

// --- brute-force corpus BLEU-4 ----------------------------------------

using Toks = std::vector<std::string>;

inline double bleu_oracle(const std::vector<Toks>& hyps,
                          const std::vector<std::vector<Toks>>& refs) {
  long double num[4] = {0, 0, 0, 0}, den[4] = {0, 0, 0, 0};
  long long hyp_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const Toks& hyp = hyps[i];
    hyp_len += static_cast<long long>(hyp.size());
    long long best_len = static_cast<long long>(refs[i][0].size());
    for (const auto& r : refs[i]) {
      const long long rl = static_cast<long long>(r.size());
      const long long hl = static_cast<long long>(hyp.size());
      if (std::llabs(rl - hl) < std::llabs(best_len - hl) ||
          (std::llabs(rl - hl) == std::llabs(best_len - hl) && rl < best_len))
        best_len = rl;
    }
    ref_len += best_len;
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<Toks, long long> hc;
      if (hyp.size() >= n)
        for (std::size_t s = 0; s + n <= hyp.size(); ++s)
          ++hc[Toks(hyp.begin() + s, hyp.begin() + s + n)];
      for (const auto& [gram, count] : hc) {
        den[n - 1] += count;
        long long best = 0;
        for (const auto& r : refs[i]) {
          long long rc = 0;
          if (r.size() >= n)
            for (std::size_t s = 0; s + n <= r.size(); ++s)
              if (std::equal(gram.begin(), gram.end(), r.begin() + s))
                ++rc;
          best = std::max(best, rc);
        }
        num[n - 1] += std::min(count, best);
      }
    }
  }
  long double logp = 0;
  for (int n = 0; n < 4; ++n) {
    if (den[n] == 0 || num[n] == 0) return 0.0;
    logp += 0.25L * std::log(num[n] / den[n]);
  }
  long double bp = 1;
  if (hyp_len == 0) return 0.0;
  if (hyp_len < ref_len) bp = std::exp(1.0L - (long double)ref_len / hyp_len);
  return static_cast<double>(bp * std::exp(logp));
}

// --- brute-force slot error rate ---------------------------------------

inline double err_oracle(const std::vector<std::string>& cand_tokens,
                         const sclstm::da::DialogueAct& act) {
  using namespace sclstm;
  std::size_t n_delex = 0;
  double p = 0, q = 0;
  std::vector<std::string> expected_tokens;
  for (const auto& [slot, v] : act.bindings)
    if (v.kind == da::ValueKind::categorical) {
      ++n_delex;
      expected_tokens.push_back(da::slot_token(slot));
    }
  for (const auto& want : expected_tokens) {
    long long count = 0;
    for (const auto& t : cand_tokens) count += t == want;
    if (count == 0) p += 1;
    if (count > 1) q += static_cast<double>(count - 1);
  }
  for (const auto& t : cand_tokens) {
    if (!da::is_slot_token(t)) continue;
    bool wanted = false;
    for (const auto& want : expected_tokens) wanted = wanted || t == want;
    if (!wanted) q += 1;
  }
  // unbound slot tokens are all redundant; bound ones beyond one are too
  const double total = p + q;
  return n_delex == 0 ? total : total / static_cast<double>(n_delex);
}

// --- one-sided sign test -------------------------------------------------

inline double sign_test_p(std::size_t wins, std::size_t losses) {
  const std::size_t n = wins + losses;
  if (n == 0) return 1.0;
  long double p = 0;
  for (std::size_t k = wins; k <= n; ++k) {
    long double logc = std::lgamma((long double)n + 1) -
                       std::lgamma((long double)k + 1) -
                       std::lgamma((long double)(n - k) + 1);
    p += std::exp(logc - (long double)n * std::log(2.0L));
  }
  return static_cast<double>(p);
}

}  // namespace oracles
