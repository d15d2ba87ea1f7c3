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

// The semantically controlled LSTM: a standard LSTM cell whose memory is
// additionally driven by a dialogue-act vector d, gated down step by step
// by a learned reading gate. Includes the deep (stacked, skip-connected)
// variant, heuristic-gate and no-gate ablations, hand-derived BPTT
// gradients for the gate-regularised cost, and a finite-difference
// checker.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sclstm/error.hpp"
#include "sclstm/numkit.hpp"

namespace sclstm::net {

using num::Mat;
using num::Vec;

enum class Gating { learned, heuristic, none };

inline std::string gating_name(Gating g) {
  switch (g) {
    case Gating::learned: return "learned";
    case Gating::heuristic: return "heuristic";
    case Gating::none: return "none";
  }
  return "?";
}

inline Gating gating_from_name(const std::string& s) {
  if (s == "learned") return Gating::learned;
  if (s == "heuristic") return Gating::heuristic;
  if (s == "none") return Gating::none;
  throw InputError("unknown gating mode '" + s + "'");
}

struct NetConfig {
  std::size_t hidden = 80;
  std::size_t layers = 1;
  std::size_t embed = 0;  // 0 means same as hidden
  std::size_t vocab = 0;
  std::size_t da_dim = 0;
  double dropout = 0.0;
  std::vector<double> alpha;  // per-layer reading-gate weights
  Gating gating = Gating::learned;
  // Heuristic mode: per vocabulary token, the DA feature switched off
  // once that token has been consumed, or -1.
  std::vector<int> turnoff;

  std::size_t embed_dim() const { return embed ? embed : hidden; }
  double alpha_of(std::size_t l) const {
    return l < alpha.size() ? alpha[l] : 0.5;
  }
  // Layers above the first see the embedded token next to the previous
  // layer's hidden state (input skip connections).
  std::size_t input_dim(std::size_t l) const {
    return l == 0 ? embed_dim() : embed_dim() + hidden;
  }
};

struct LayerParams {
  Mat W_wi, W_wf, W_wo, W_wc;          // input projections
  Mat W_hi, W_hf, W_ho_rec, W_hc;      // recurrent projections
  Mat W_hr;                            // phrase detector feeding the reading gate
};

struct NetworkParams {
  std::vector<LayerParams> layer;
  Mat W_wr;   // keyword detector (da_dim x embed)
  Mat W_dc;   // DA-to-cell (hidden x da_dim)
  Mat W_out;  // hidden(s)-to-vocabulary, reading all layers (vocab x layers*hidden)
  Mat emb;    // embedding table (vocab x embed)

  static NetworkParams shaped(const NetConfig& cfg) {
    NetworkParams p;
    p.layer.resize(cfg.layers);
    for (std::size_t l = 0; l < cfg.layers; ++l) {
      const std::size_t in = cfg.input_dim(l);
      const std::size_t n = cfg.hidden;
      auto& lp = p.layer[l];
      lp.W_wi = Mat(n, in);
      lp.W_wf = Mat(n, in);
      lp.W_wo = Mat(n, in);
      lp.W_wc = Mat(n, in);
      lp.W_hi = Mat(n, n);
      lp.W_hf = Mat(n, n);
      lp.W_ho_rec = Mat(n, n);
      lp.W_hc = Mat(n, n);
      lp.W_hr = Mat(cfg.da_dim, n);
    }
    p.W_wr = Mat(cfg.da_dim, cfg.embed_dim());
    p.W_dc = Mat(cfg.hidden, cfg.da_dim);
    p.W_out = Mat(cfg.vocab, cfg.layers * cfg.hidden);
    p.emb = Mat(cfg.vocab, cfg.embed_dim());
    return p;
  }

  static NetworkParams init(const NetConfig& cfg, num::Rng& rng) {
    NetworkParams p = shaped(cfg);
    p.for_each_block([&rng](const std::string&, Mat& m) {
      for (double& x : m.a) x = rng.uniform(-0.1, 0.1);
    });
    return p;
  }

  template <typename F>
  void for_each_block(F f) {
    for (std::size_t l = 0; l < layer.size(); ++l) {
      const std::string pre = "l" + std::to_string(l) + ".";
      f(pre + "W_wi", layer[l].W_wi);
      f(pre + "W_wf", layer[l].W_wf);
      f(pre + "W_wo", layer[l].W_wo);
      f(pre + "W_wc", layer[l].W_wc);
      f(pre + "W_hi", layer[l].W_hi);
      f(pre + "W_hf", layer[l].W_hf);
      f(pre + "W_ho_rec", layer[l].W_ho_rec);
      f(pre + "W_hc", layer[l].W_hc);
      f(pre + "W_hr", layer[l].W_hr);
    }
    f("W_wr", W_wr);
    f("W_dc", W_dc);
    f("W_out", W_out);
    f("emb", emb);
  }
  template <typename F>
  void for_each_block(F f) const {
    const_cast<NetworkParams*>(this)->for_each_block(
        [&f](const std::string& n, Mat& m) { f(n, const_cast<const Mat&>(m)); });
  }
};

// Gradients mirror the parameter shapes exactly.
using Gradients = NetworkParams;

inline Gradients zeros_like(const NetConfig& cfg) {
  return NetworkParams::shaped(cfg);
}

struct State {
  std::vector<Vec> h, c;  // per layer

  static State zeros(const NetConfig& cfg) {
    State s;
    s.h.assign(cfg.layers, Vec(cfg.hidden, 0.0));
    s.c.assign(cfg.layers, Vec(cfg.hidden, 0.0));
    return s;
  }
};

// Dropout multipliers for one timestep. in_mask[l] scales the previous
// layer's hidden state inside layer l's input (l >= 1 only); out_mask[l]
// scales layer l's hidden state on its way to the output softmax.
// Recurrent connections and embeddings are never masked.
struct StepMasks {
  std::vector<Vec> in_mask;   // [layers], [0] unused
  std::vector<Vec> out_mask;  // [layers]

  static StepMasks ones(const NetConfig& cfg) {
    StepMasks m;
    m.in_mask.assign(cfg.layers, Vec(cfg.hidden, 1.0));
    m.out_mask.assign(cfg.layers, Vec(cfg.hidden, 1.0));
    return m;
  }
  static StepMasks sample(const NetConfig& cfg, num::Rng& rng) {
    StepMasks m = ones(cfg);
    if (cfg.dropout <= 0.0) return m;
    const double keep = 1.0 - cfg.dropout;
    auto fill = [&](Vec& v) {
      for (double& x : v) x = rng.uniform01() < keep ? 1.0 / keep : 0.0;
    };
    for (std::size_t l = 1; l < cfg.layers; ++l) fill(m.in_mask[l]);
    for (std::size_t l = 0; l < cfg.layers; ++l) fill(m.out_mask[l]);
    return m;
  }
};

struct StepTrace {
  std::size_t token = 0;
  std::vector<Vec> i, f, o, chat, c, h;  // per layer
  Vec r, d;    // reading gate and the gated DA vector after this step
  Vec g;       // tanh(W_dc d), added to layer 0's cell
  Vec p;       // next-token distribution
  StepMasks masks;
};

struct ForwardTrace {
  Vec d0;
  std::vector<StepTrace> steps;
};

namespace detail {

inline void check_finite(const Vec& v, std::size_t t, const char* what) {
  if (!num::all_finite(v))
    throw NumericError(std::string("non-finite ") + what + " at timestep " +
                       std::to_string(t));
}

// One timestep. `state` is updated in place; the full set of activations
// lands in `out`.
inline void step_core(const NetworkParams& params, const NetConfig& cfg,
                      std::size_t token, State& state, Vec& d,
                      const StepMasks& masks, std::size_t t, StepTrace& out) {
  const std::size_t n = cfg.hidden;
  const std::size_t E = cfg.embed_dim();
  if (token >= cfg.vocab) throw InputError("token index out of range");
  const double* e = params.emb.row(token);

  out.token = token;
  out.masks = masks;

  // Reading gate.
  Vec r(cfg.da_dim, 1.0);
  switch (cfg.gating) {
    case Gating::learned: {
      Vec rho(cfg.da_dim, 0.0);
      num::matvec_acc(params.W_wr, e, rho.data());
      for (std::size_t l = 0; l < cfg.layers; ++l)
        num::matvec_acc_scaled(params.layer[l].W_hr, cfg.alpha_of(l),
                               state.h[l].data(), rho.data());
      for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = num::sigmoid_scalar(rho[k]);
      break;
    }
    case Gating::heuristic: {
      if (token < cfg.turnoff.size() && cfg.turnoff[token] >= 0)
        r[static_cast<std::size_t>(cfg.turnoff[token])] = 0.0;
      break;
    }
    case Gating::none:
      break;
  }
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = r[k] * d[k];
  out.r = std::move(r);
  out.d = d;

  // DA contribution to the first layer's cell.
  Vec g(n, 0.0);
  num::matvec_acc(params.W_dc, d.data(), g.data());
  for (double& x : g) x = std::tanh(x);
  out.g = g;

  out.i.resize(cfg.layers);
  out.f.resize(cfg.layers);
  out.o.resize(cfg.layers);
  out.chat.resize(cfg.layers);
  out.c.resize(cfg.layers);
  out.h.resize(cfg.layers);

  Vec x;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const auto& lp = params.layer[l];
    x.assign(e, e + E);
    if (l > 0) {
      const Vec& below = out.h[l - 1];
      const Vec& mask = masks.in_mask[l];
      for (std::size_t k = 0; k < n; ++k) x.push_back(mask[k] * below[k]);
    }

    Vec ai(n, 0.0), af(n, 0.0), ao(n, 0.0), ac(n, 0.0);
    num::matvec_acc(lp.W_wi, x.data(), ai.data());
    num::matvec_acc(lp.W_hi, state.h[l].data(), ai.data());
    num::matvec_acc(lp.W_wf, x.data(), af.data());
    num::matvec_acc(lp.W_hf, state.h[l].data(), af.data());
    num::matvec_acc(lp.W_wo, x.data(), ao.data());
    num::matvec_acc(lp.W_ho_rec, state.h[l].data(), ao.data());
    num::matvec_acc(lp.W_wc, x.data(), ac.data());
    num::matvec_acc(lp.W_hc, state.h[l].data(), ac.data());

    Vec iv(n), fv(n), ov(n), cv(n), hv(n), chv(n);
    for (std::size_t k = 0; k < n; ++k) {
      iv[k] = num::sigmoid_scalar(ai[k]);
      fv[k] = num::sigmoid_scalar(af[k]);
      ov[k] = num::sigmoid_scalar(ao[k]);
      chv[k] = std::tanh(ac[k]);
      cv[k] = fv[k] * state.c[l][k] + iv[k] * chv[k];
      if (l == 0) cv[k] += g[k];
      hv[k] = ov[k] * std::tanh(cv[k]);
    }
    check_finite(cv, t, "cell");
    check_finite(hv, t, "hidden state");

    out.i[l] = std::move(iv);
    out.f[l] = std::move(fv);
    out.o[l] = std::move(ov);
    out.chat[l] = std::move(chv);
    state.c[l] = cv;
    state.h[l] = hv;
    out.c[l] = std::move(cv);
    out.h[l] = std::move(hv);
  }

  // Output skip connections: the softmax reads every layer.
  Vec out_in(cfg.layers * n);
  for (std::size_t l = 0; l < cfg.layers; ++l)
    for (std::size_t k = 0; k < n; ++k)
      out_in[l * n + k] = masks.out_mask[l][k] * out.h[l][k];
  Vec logits = num::matvec(params.W_out, out_in);
  out.p = num::softmax(logits);
  check_finite(out.p, t, "output distribution");
}

}  // namespace detail

struct StepResult {
  State state;
  Vec d;
  Vec p;
};

// Single public step: returns the new recurrent state, the gated DA
// vector, and the next-token distribution.
inline StepResult step(const NetworkParams& params, const NetConfig& cfg,
                       std::size_t token, const State& prev, const Vec& d_prev,
                       const StepMasks& masks) {
  if (d_prev.size() != cfg.da_dim)
    throw InputError("DA vector has wrong dimension");
  StepResult res;
  res.state = prev;
  res.d = d_prev;
  StepTrace tr;
  detail::step_core(params, cfg, token, res.state, res.d, masks, 0, tr);
  res.p = std::move(tr.p);
  return res;
}

// Teacher-forced forward pass over an input token sequence (BOS first).
// In train mode fresh dropout masks are sampled per step from `rng`.
inline ForwardTrace forward_sentence(const NetworkParams& params,
                                     const NetConfig& cfg,
                                     const std::vector<std::size_t>& tokens,
                                     const Vec& d0, num::Rng* rng, bool train) {
  if (tokens.empty()) throw InputError("empty token sequence");
  if (d0.size() != cfg.da_dim)
    throw InputError("DA vector has wrong dimension");
  ForwardTrace trace;
  trace.d0 = d0;
  trace.steps.resize(tokens.size());
  State state = State::zeros(cfg);
  Vec d = d0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    StepMasks masks = (train && rng != nullptr)
                          ? StepMasks::sample(cfg, *rng)
                          : StepMasks::ones(cfg);
    detail::step_core(params, cfg, tokens[t], state, d, masks, t,
                      trace.steps[t]);
  }
  return trace;
}

// Same pass with caller-provided masks; used by the gradient checker to
// hold the dropout pattern fixed across cost evaluations.
inline ForwardTrace forward_with_masks(const NetworkParams& params,
                                       const NetConfig& cfg,
                                       const std::vector<std::size_t>& tokens,
                                       const Vec& d0,
                                       const std::vector<StepMasks>& masks) {
  if (masks.size() != tokens.size())
    throw InputError("mask count does not match token count");
  ForwardTrace trace;
  trace.d0 = d0;
  trace.steps.resize(tokens.size());
  State state = State::zeros(cfg);
  Vec d = d0;
  for (std::size_t t = 0; t < tokens.size(); ++t)
    detail::step_core(params, cfg, tokens[t], state, d, masks[t], t,
                      trace.steps[t]);
  return trace;
}

// Reverses the inner tokens, keeping the boundary tokens in place.
template <typename T>
std::vector<T> reverse_for_reranker(const std::vector<T>& tokens) {
  std::vector<T> out = tokens;
  if (out.size() > 3) std::reverse(out.begin() + 1, out.end() - 1);
  return out;
}

// Cost constants for the gate-regularised objective.
struct CostParams {
  double eta = 1e-4;
  double xi = 100.0;
};

struct CostBreakdown {
  double ce = 0.0;        // cross entropy
  double final_da = 0.0;  // ||d_T||
  double gate = 0.0;      // sum_t eta * xi^||d_{t+1}-d_t||
  double total() const { return ce + final_da + gate; }
};

// cost = -sum_t log p_t[y_t] + ||d_T|| + sum eta*xi^||delta d||. The
// second term punishes slots left unrendered; the exponential third term
// punishes several gate features switching off in one step.
inline CostBreakdown cost_terms(const ForwardTrace& trace,
                                const std::vector<std::size_t>& targets,
                                const CostParams& cp = {}) {
  if (targets.size() != trace.steps.size())
    throw InputError("target count does not match trace length");
  CostBreakdown out;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] >= trace.steps[t].p.size())
      throw InputError("target index out of range");
    out.ce -= std::log(trace.steps[t].p[targets[t]]);
  }
  const Vec* prev = &trace.d0;
  for (const auto& s : trace.steps) {
    double nd = 0.0;
    for (std::size_t k = 0; k < s.d.size(); ++k) {
      const double dk = s.d[k] - (*prev)[k];
      nd += dk * dk;
    }
    out.gate += cp.eta * std::pow(cp.xi, std::sqrt(nd));
    prev = &s.d;
  }
  out.final_da = num::norm2(trace.steps.back().d);
  return out;
}

// Exact gradients of cost_terms with respect to every parameter,
// including the embedding table, by backpropagation through time.
inline std::pair<Gradients, double> backprop_sentence(
    const NetworkParams& params, const NetConfig& cfg,
    const ForwardTrace& trace, const std::vector<std::size_t>& targets,
    const CostParams& cp = {}) {
  const std::size_t T = trace.steps.size();
  const std::size_t n = cfg.hidden;
  const std::size_t E = cfg.embed_dim();
  const std::size_t D = cfg.da_dim;
  if (targets.size() != T) throw InputError("target count does not match trace");

  Gradients grads = zeros_like(cfg);
  const CostBreakdown cost = cost_terms(trace, targets, cp);

  const bool gate_learned = cfg.gating == Gating::learned;
  const double lnxi = std::log(cp.xi);

  // Penalty-term derivatives with respect to each d_t (post-step values).
  auto d_at = [&](std::size_t t) -> const Vec& {
    return t == 0 ? trace.d0 : trace.steps[t - 1].d;
  };
  std::vector<Vec> dpen;
  if (gate_learned) {
    dpen.assign(T, Vec(D, 0.0));
    for (std::size_t k = 1; k <= T; ++k) {
      // transition d_{k-1} -> d_k contributes to both endpoints
      Vec delta(D);
      for (std::size_t j = 0; j < D; ++j)
        delta[j] = d_at(k)[j] - d_at(k - 1)[j];
      const double nd = num::norm2(delta);
      if (nd > 0.0) {
        const double w = cp.eta * std::pow(cp.xi, nd) * lnxi / nd;
        for (std::size_t j = 0; j < D; ++j) {
          dpen[k - 1][j] += w * delta[j];
          if (k >= 2) dpen[k - 2][j] -= w * delta[j];
        }
      }
    }
    const Vec& dT = trace.steps[T - 1].d;
    const double ndT = num::norm2(dT);
    if (ndT > 0.0)
      for (std::size_t j = 0; j < D; ++j) dpen[T - 1][j] += dT[j] / ndT;
  }

  std::vector<Vec> dh_next(cfg.layers, Vec(n, 0.0));
  std::vector<Vec> dc_next(cfg.layers, Vec(n, 0.0));
  Vec dd_next(D, 0.0);
  Vec x, dx;
  const Vec zero_n(n, 0.0);

  for (std::size_t t = T; t-- > 0;) {
    const StepTrace& st = trace.steps[t];
    const StepTrace* pt = t > 0 ? &trace.steps[t - 1] : nullptr;
    const double* e = params.emb.row(st.token);

    // Cross entropy at the output.
    Vec dlogits = st.p;
    dlogits[targets[t]] -= 1.0;

    Vec out_in(cfg.layers * n);
    for (std::size_t l = 0; l < cfg.layers; ++l)
      for (std::size_t k = 0; k < n; ++k)
        out_in[l * n + k] = st.masks.out_mask[l][k] * st.h[l][k];
    num::add_outer(grads.W_out, dlogits.data(), out_in.data());

    Vec dout_in(cfg.layers * n, 0.0);
    num::matTvec_acc(params.W_out, dlogits.data(), dout_in.data());

    std::vector<Vec> dh(cfg.layers, Vec(n, 0.0));
    for (std::size_t l = 0; l < cfg.layers; ++l)
      for (std::size_t k = 0; k < n; ++k)
        dh[l][k] = st.masks.out_mask[l][k] * dout_in[l * n + k] +
                   dh_next[l][k];

    std::vector<Vec> dh_prev(cfg.layers, Vec(n, 0.0));
    Vec de(E, 0.0);
    Vec dd(D, 0.0);

    for (std::size_t l = cfg.layers; l-- > 0;) {
      const auto& lp = params.layer[l];
      auto& gl = grads.layer[l];
      const Vec& hprev = pt ? pt->h[l] : zero_n;
      const Vec& cprev = pt ? pt->c[l] : zero_n;

      Vec dc(n), da_i(n), da_f(n), da_o(n), da_c(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double tc = std::tanh(st.c[l][k]);
        dc[k] = dh[l][k] * st.o[l][k] * (1.0 - tc * tc) + dc_next[l][k];
        const double do_ = dh[l][k] * tc;
        da_o[k] = do_ * st.o[l][k] * (1.0 - st.o[l][k]);
        const double di = dc[k] * st.chat[l][k];
        da_i[k] = di * st.i[l][k] * (1.0 - st.i[l][k]);
        const double df = dc[k] * cprev[k];
        da_f[k] = df * st.f[l][k] * (1.0 - st.f[l][k]);
        const double dch = dc[k] * st.i[l][k];
        da_c[k] = dch * (1.0 - st.chat[l][k] * st.chat[l][k]);
        dc_next[l][k] = dc[k] * st.f[l][k];
      }

      if (l == 0) {
        // DA term: c_0 gets + tanh(W_dc d)
        Vec da_g(n);
        for (std::size_t k = 0; k < n; ++k)
          da_g[k] = dc[k] * (1.0 - st.g[k] * st.g[k]);
        num::add_outer(grads.W_dc, da_g.data(), st.d.data());
        if (gate_learned) num::matTvec_acc(params.W_dc, da_g.data(), dd.data());
      }

      x.assign(e, e + E);
      if (l > 0) {
        const Vec& below = st.h[l - 1];
        const Vec& mask = st.masks.in_mask[l];
        for (std::size_t k = 0; k < n; ++k) x.push_back(mask[k] * below[k]);
      }

      num::add_outer(gl.W_wi, da_i.data(), x.data());
      num::add_outer(gl.W_wf, da_f.data(), x.data());
      num::add_outer(gl.W_wo, da_o.data(), x.data());
      num::add_outer(gl.W_wc, da_c.data(), x.data());
      num::add_outer(gl.W_hi, da_i.data(), hprev.data());
      num::add_outer(gl.W_hf, da_f.data(), hprev.data());
      num::add_outer(gl.W_ho_rec, da_o.data(), hprev.data());
      num::add_outer(gl.W_hc, da_c.data(), hprev.data());

      dx.assign(x.size(), 0.0);
      num::matTvec_acc(lp.W_wi, da_i.data(), dx.data());
      num::matTvec_acc(lp.W_wf, da_f.data(), dx.data());
      num::matTvec_acc(lp.W_wo, da_o.data(), dx.data());
      num::matTvec_acc(lp.W_wc, da_c.data(), dx.data());
      num::matTvec_acc(lp.W_hi, da_i.data(), dh_prev[l].data());
      num::matTvec_acc(lp.W_hf, da_f.data(), dh_prev[l].data());
      num::matTvec_acc(lp.W_ho_rec, da_o.data(), dh_prev[l].data());
      num::matTvec_acc(lp.W_hc, da_c.data(), dh_prev[l].data());

      for (std::size_t k = 0; k < E; ++k) de[k] += dx[k];
      if (l > 0) {
        const Vec& mask = st.masks.in_mask[l];
        for (std::size_t k = 0; k < n; ++k)
          dh[l - 1][k] += mask[k] * dx[E + k];
      }
    }

    // Reading gate; only the learned mode has parameters here.
    if (gate_learned) {
      for (std::size_t j = 0; j < D; ++j)
        dd[j] += dpen[t][j] + dd_next[j];
      const Vec& dprev = d_at(t);
      Vec drho(D);
      for (std::size_t j = 0; j < D; ++j) {
        const double dr = dd[j] * dprev[j];
        drho[j] = dr * st.r[j] * (1.0 - st.r[j]);
      }
      num::add_outer(grads.W_wr, drho.data(), e);
      num::matTvec_acc(params.W_wr, drho.data(), de.data());
      for (std::size_t l = 0; l < cfg.layers; ++l) {
        const double al = cfg.alpha_of(l);
        Vec scaled(D);
        for (std::size_t j = 0; j < D; ++j) scaled[j] = al * drho[j];
        num::add_outer(grads.layer[l].W_hr, scaled.data(),
                       (pt ? pt->h[l] : zero_n).data());
        num::matTvec_acc(params.layer[l].W_hr, scaled.data(),
                         dh_prev[l].data());
      }
      for (std::size_t j = 0; j < D; ++j) dd_next[j] = st.r[j] * dd[j];
    }

    for (std::size_t k = 0; k < E; ++k)
      grads.emb(st.token, k) += de[k];
    dh_next = std::move(dh_prev);
  }

  return {std::move(grads), cost.total()};
}

// ---------------------------------------------------------------------
// Finite-difference gradient verification.

struct GradcheckConfig {
  std::size_t hidden = 6;
  std::size_t da_dim = 9;
  std::size_t vocab = 12;
  std::size_t length = 5;
  double h = 1e-5;
  double threshold = 1e-4;
};

struct GradcheckEntry {
  std::string mode;
  std::size_t layers = 1;
  std::vector<std::pair<std::string, double>> block_errors;
  double worst = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double worst = 0.0;
  bool all_ok(double threshold) const { return worst < threshold; }
};

namespace detail {

// Independently coded replica of the forward cost in extended precision.
// Finite differences divide the cost change by 2e-5; at double precision
// the rounding noise of the two cost evaluations would drown the signal
// for parameters whose gradient is close to zero.
inline long double fd_cost(const NetworkParams& P, const NetConfig& cfg,
                           const std::vector<std::size_t>& tokens,
                           const Vec& d0,
                           const std::vector<StepMasks>& masks,
                           const std::vector<std::size_t>& targets,
                           const CostParams& cp) {
  using LD = long double;
  using LVec = std::vector<LD>;
  const std::size_t n = cfg.hidden, E = cfg.embed_dim(), D = cfg.da_dim,
                    V = cfg.vocab, L = cfg.layers;
  const auto sig = [](LD x) { return (LD)1 / ((LD)1 + std::exp(-x)); };
  const auto mv = [](const Mat& W, const LVec& v, LVec& out) {
    for (std::size_t r = 0; r < W.rows; ++r) {
      LD s = 0;
      const double* row = W.row(r);
      for (std::size_t c = 0; c < W.cols; ++c) s += (LD)row[c] * v[c];
      out[r] += s;
    }
  };

  std::vector<LVec> h(L, LVec(n, 0)), c(L, LVec(n, 0));
  LVec d(D);
  for (std::size_t j = 0; j < D; ++j) d[j] = d0[j];
  LD ce = 0, gate = 0;

  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const double* e = P.emb.row(tokens[t]);
    LVec r(D, 1);
    if (cfg.gating == Gating::learned) {
      LVec rho(D, 0);
      LVec ev(E);
      for (std::size_t k = 0; k < E; ++k) ev[k] = (LD)e[k];
      mv(P.W_wr, ev, rho);
      for (std::size_t l = 0; l < L; ++l) {
        LVec part(D, 0);
        mv(P.layer[l].W_hr, h[l], part);
        const LD al = cfg.alpha_of(l);
        for (std::size_t j = 0; j < D; ++j) rho[j] += al * part[j];
      }
      for (std::size_t j = 0; j < D; ++j) r[j] = sig(rho[j]);
    } else if (cfg.gating == Gating::heuristic) {
      if (tokens[t] < cfg.turnoff.size() && cfg.turnoff[tokens[t]] >= 0)
        r[static_cast<std::size_t>(cfg.turnoff[tokens[t]])] = 0;
    }
    LD nd = 0;
    for (std::size_t j = 0; j < D; ++j) {
      const LD dn = r[j] * d[j];
      nd += (dn - d[j]) * (dn - d[j]);
      d[j] = dn;
    }
    gate += (LD)cp.eta * std::pow((LD)cp.xi, std::sqrt(nd));

    LVec g(n, 0);
    mv(P.W_dc, d, g);
    for (LD& x : g) x = std::tanh(x);

    for (std::size_t l = 0; l < L; ++l) {
      const auto& lp = P.layer[l];
      LVec x(cfg.input_dim(l));
      for (std::size_t k = 0; k < E; ++k) x[k] = (LD)e[k];
      if (l > 0)
        for (std::size_t k = 0; k < n; ++k)
          x[E + k] = (LD)masks[t].in_mask[l][k] * h[l - 1][k];
      LVec ai(n, 0), af(n, 0), ao(n, 0), ac(n, 0);
      mv(lp.W_wi, x, ai);
      mv(lp.W_hi, h[l], ai);
      mv(lp.W_wf, x, af);
      mv(lp.W_hf, h[l], af);
      mv(lp.W_wo, x, ao);
      mv(lp.W_ho_rec, h[l], ao);
      mv(lp.W_wc, x, ac);
      mv(lp.W_hc, h[l], ac);
      for (std::size_t k = 0; k < n; ++k) {
        const LD iv = sig(ai[k]), fv = sig(af[k]), ov = sig(ao[k]);
        LD cv = fv * c[l][k] + iv * std::tanh(ac[k]);
        if (l == 0) cv += g[k];
        c[l][k] = cv;
        h[l][k] = ov * std::tanh(cv);
      }
    }

    LVec out_in(L * n);
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t k = 0; k < n; ++k)
        out_in[l * n + k] = (LD)masks[t].out_mask[l][k] * h[l][k];
    LVec logits(V, 0);
    mv(P.W_out, out_in, logits);
    LD mx = logits[0];
    for (LD v : logits) mx = std::max(mx, v);
    LD sum = 0;
    for (LD v : logits) sum += std::exp(v - mx);
    ce -= (logits[targets[t]] - mx) - std::log(sum);
  }

  LD ndT = 0;
  for (std::size_t j = 0; j < D; ++j) ndT += d[j] * d[j];
  return ce + std::sqrt(ndT) + gate;
}

}  // namespace detail

// Compares analytic BPTT gradients against central finite differences,
// block by block, for one configuration.
inline GradcheckEntry gradcheck_one(NetConfig cfg, const GradcheckConfig& gc,
                                    num::Rng& rng) {
  GradcheckEntry entry;
  entry.mode = gating_name(cfg.gating);
  entry.layers = cfg.layers;

  NetworkParams params = NetworkParams::init(cfg, rng);
  std::vector<std::size_t> tokens(gc.length), targets(gc.length);
  for (auto& t : tokens) t = rng.uniform_index(cfg.vocab);
  for (auto& t : targets) t = rng.uniform_index(cfg.vocab);
  Vec d0(cfg.da_dim, 0.0);
  std::size_t ones = 0;
  while (ones < 2) {  // keep the gate path live
    ones = 0;
    for (auto& v : d0) {
      v = rng.uniform01() < 0.5 ? 1.0 : 0.0;
      if (v > 0.0) ++ones;
    }
  }

  num::Rng mask_rng = rng.split();
  ForwardTrace trace =
      forward_sentence(params, cfg, tokens, d0, &mask_rng, true);
  std::vector<StepMasks> masks;
  masks.reserve(trace.steps.size());
  for (const auto& s : trace.steps) masks.push_back(s.masks);

  const CostParams cp;
  auto [grads, loss] = backprop_sentence(params, cfg, trace, targets, cp);
  (void)loss;

  std::vector<Mat*> blocks;
  std::vector<Mat*> grad_blocks;
  std::vector<std::string> names;
  params.for_each_block([&](const std::string& name, Mat& m) {
    blocks.push_back(&m);
    names.push_back(name);
  });
  grads.for_each_block(
      [&](const std::string&, Mat& m) { grad_blocks.push_back(&m); });

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    double worst = 0.0;
    Mat& m = *blocks[b];
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      const double saved = m.a[idx];
      m.a[idx] = saved + gc.h;
      const long double cp_ =
          detail::fd_cost(params, cfg, tokens, d0, masks, targets, cp);
      m.a[idx] = saved - gc.h;
      const long double cm_ =
          detail::fd_cost(params, cfg, tokens, d0, masks, targets, cp);
      m.a[idx] = saved;
      const double gn =
          static_cast<double>((cp_ - cm_) / (2.0L * (long double)gc.h));
      const double ga = grad_blocks[b]->a[idx];
      const double rel =
          std::abs(ga - gn) / std::max({std::abs(ga), std::abs(gn), 1e-8});
      worst = std::max(worst, rel);
    }
    entry.block_errors.emplace_back(names[b], worst);
    entry.worst = std::max(entry.worst, worst);
  }
  return entry;
}

// Runs the finite-difference comparison for every gating mode and both
// depths. Failures show up as large block errors in the report.
inline GradcheckReport gradcheck(const GradcheckConfig& gc, num::Rng& rng) {
  GradcheckReport report;
  for (Gating mode : {Gating::learned, Gating::heuristic, Gating::none}) {
    for (std::size_t layers : {std::size_t{1}, std::size_t{2}}) {
      NetConfig cfg;
      cfg.hidden = gc.hidden;
      cfg.layers = layers;
      cfg.embed = gc.hidden;
      cfg.vocab = gc.vocab;
      cfg.da_dim = gc.da_dim;
      cfg.dropout = layers > 1 ? 0.5 : 0.0;
      cfg.gating = mode;
      if (mode == Gating::heuristic) {
        cfg.turnoff.assign(gc.vocab, -1);
        for (std::size_t k = 0; k < gc.vocab; k += 3)
          cfg.turnoff[k] = static_cast<int>(k % gc.da_dim);
      }
      report.entries.push_back(gradcheck_one(cfg, gc, rng));
      report.worst = std::max(report.worst, report.entries.back().worst);
    }
  }
  return report;
}

}  // namespace sclstm::net
