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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "sclstm/trainer.hpp"

using namespace sclstm;
using train::Example;
using train::SplitCorpus;
using train::TrainConfig;

namespace {

// A fixed 10-pattern corpus; each pattern carries its own DA.
std::vector<da::CorpusEntry> toy_corpus(const da::Ontology& ont,
                                        std::size_t copies) {
  const std::vector<std::pair<std::string, std::string>> patterns = {
      {"inform(name=\"casa lucia\",area=\"north beach\")",
       "casa lucia is in the north beach area ."},
      {"inform(name=\"casa lucia\",food=\"thai\")",
       "casa lucia serves thai food ."},
      {"request(area)", "what area are you looking for ?"},
      {"goodbye()", "thank you , goodbye ."},
      {"inform(name=\"casa lucia\",pricerange=\"cheap\")",
       "casa lucia is in the cheap price range ."},
      {"reject(food=\"thai\")", "there are no restaurants serving thai food ."},
      {"confirm(area=\"north beach\")",
       "did you say in the north beach area ?"},
      {"inform(name=\"casa lucia\",phone=\"4151234567\")",
       "the phone number of casa lucia is 4151234567 ."},
      {"inform_only(name=\"casa lucia\",near=\"union square\")",
       "casa lucia is the only place near union square ."},
      {"reqmore()", "is there anything else i can help you with ?"},
  };
  std::vector<da::CorpusEntry> out;
  for (std::size_t c = 0; c < copies; ++c)
    for (const auto& [das, text] : patterns) {
      da::CorpusEntry e;
      e.da_string = das;
      e.text = text;
      e.act = da::parse_da(das, ont);
      e.delex = da::delexicalise(text, e.act, ont);
      out.push_back(e);
    }
  return out;
}

SplitCorpus memorization_split(const da::Ontology& ont, std::size_t copies) {
  auto corpus = toy_corpus(ont, copies);
  SplitCorpus split;
  split.vocab = da::Vocab::build(corpus);
  for (const auto& e : corpus) {
    Example ex{e.act, e.delex, da::encode_da(e.act, ont)};
    split.train.push_back(ex);
    split.valid.push_back(ex);
  }
  return split;
}

net::ForwardTrace fake_trace(const std::vector<num::Vec>& d_seq,
                             const num::Vec& d0, std::size_t vocab,
                             const std::vector<std::size_t>& targets) {
  net::ForwardTrace trace;
  trace.d0 = d0;
  trace.steps.resize(d_seq.size());
  for (std::size_t t = 0; t < d_seq.size(); ++t) {
    trace.steps[t].d = d_seq[t];
    trace.steps[t].p.assign(vocab, 0.0);
    trace.steps[t].p[targets[t]] = 1.0;  // perfect prediction
  }
  return trace;
}

}  // namespace

TEST_CASE("sentence cost floor is T times eta for a quiet gate") {
  const std::size_t T = 4;
  const num::Vec d0(6, 0.0);
  std::vector<num::Vec> ds(T, d0);
  const std::vector<std::size_t> targets(T, 2);
  auto trace = fake_trace(ds, d0, 5, targets);
  auto cost = train::sentence_cost(trace, targets);
  CHECK(cost.ce == 0.0);
  CHECK(cost.final_da == 0.0);
  CHECK(cost.gate == Catch::Approx(4 * 1e-4).epsilon(1e-12));
  CHECK(cost.total() == Catch::Approx(4e-4).epsilon(1e-12));
}

TEST_CASE("one surviving unit feature adds exactly one to the cost") {
  const std::size_t T = 3;
  num::Vec d0(6, 0.0);
  d0[2] = 1.0;
  std::vector<num::Vec> ds(T, d0);
  const std::vector<std::size_t> targets(T, 0);
  auto cost = train::sentence_cost(fake_trace(ds, d0, 4, targets), targets);
  CHECK(cost.final_da == 1.0);
  CHECK(cost.total() ==
        Catch::Approx(1.0 + 3 * 1e-4).epsilon(1e-12));
}

TEST_CASE("simultaneous gate drops cost more than separate ones") {
  const net::CostParams cp;
  num::Vec d0(2, 1.0);
  const std::vector<std::size_t> targets(3, 0);

  // both features drop between t=0 and t=1
  std::vector<num::Vec> together = {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  auto cost_together =
      train::sentence_cost(fake_trace(together, d0, 3, targets), targets, cp);

  // one feature per step
  std::vector<num::Vec> apart = {{0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}};
  auto cost_apart =
      train::sentence_cost(fake_trace(apart, d0, 3, targets), targets, cp);

  // direct evaluation of the penalty formula
  const double straight =
      cp.eta * std::pow(cp.xi, std::sqrt(2.0)) + 2 * cp.eta;
  const double split = 2 * cp.eta * cp.xi + cp.eta;
  CHECK(cost_together.gate == Catch::Approx(straight).epsilon(1e-12));
  CHECK(cost_apart.gate == Catch::Approx(split).epsilon(1e-12));
  CHECK(cost_together.gate == Catch::Approx(0.0673638848395).epsilon(1e-9));
  CHECK(cost_apart.gate == Catch::Approx(0.0201).epsilon(1e-9));
  CHECK(cost_together.gate > cost_apart.gate);

  CHECK(cost_together.ce + cost_together.final_da + cost_together.gate ==
        Catch::Approx(cost_together.total()).margin(1e-12));
}

TEST_CASE("upsample replicates small groups to the median size") {
  auto ont = da::preset_ontology("restaurant");
  std::vector<Example> split;
  auto add = [&](const std::string& das, const std::string& text,
                 std::size_t copies) {
    auto act = da::parse_da(das, ont);
    auto utt = da::delexicalise(text, act, ont);
    for (std::size_t i = 0; i < copies; ++i)
      split.push_back(Example{act, utt, da::encode_da(act, ont)});
  };
  add("goodbye()", "goodbye .", 1);
  add("reqmore()", "anything else ?", 9);

  auto up = train::upsample(split);
  std::size_t goodbye = 0, reqmore = 0;
  for (const auto& e : up) {
    goodbye += e.act.act_type == "goodbye";
    reqmore += e.act.act_type == "reqmore";
  }
  CHECK(goodbye == 5);  // median of {1, 9}
  CHECK(reqmore == 9);
  CHECK(up.size() >= split.size());  // superset
}

TEST_CASE("upsample is the identity for equal group sizes") {
  auto ont = da::preset_ontology("restaurant");
  std::vector<Example> split;
  for (const auto* das : {"goodbye()", "reqmore()", "request(area)"}) {
    auto act = da::parse_da(das, ont);
    da::DelexUtterance u;
    u.tokens = {"BOS", "x", "EOS"};
    for (int i = 0; i < 3; ++i)
      split.push_back(Example{act, u, da::encode_da(act, ont)});
  }
  auto up = train::upsample(split);
  CHECK(up.size() == split.size());
  std::multiset<std::string> before, after;
  for (const auto& e : split) before.insert(da::canonical_da(e.act));
  for (const auto& e : up) after.insert(da::canonical_da(e.act));
  CHECK(before == after);
}

TEST_CASE("split_corpus keeps canonical groups whole at roughly 3:1:1") {
  auto ont = da::preset_ontology("restaurant");
  auto corpus = toy_corpus(ont, 6);  // 10 groups x 6
  auto split = train::split_corpus(corpus, ont, 42);

  CHECK(split.train.size() + split.valid.size() + split.test.size() ==
        corpus.size());
  CHECK(split.train.size() >= split.valid.size());
  CHECK(split.train.size() >= split.test.size());
  CHECK(split.train.size() >= corpus.size() / 2);
  CHECK(!split.valid.empty());
  CHECK(!split.test.empty());

  std::map<std::string, std::set<int>> where;
  int which = 0;
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    for (const auto& e : *part) where[da::canonical_da(e.act)].insert(which);
    ++which;
  }
  for (const auto& [canon, parts] : where) CHECK(parts.size() == 1);

  // deterministic per seed
  auto again = train::split_corpus(corpus, ont, 42);
  CHECK(again.train.size() == split.train.size());
  for (std::size_t i = 0; i < split.train.size(); ++i)
    CHECK(again.train[i].utt.tokens == split.train[i].utt.tokens);
}

TEST_CASE("a small SGD step on one sentence lowers its cost") {
  num::Rng rng(5);
  net::NetConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 8;
  cfg.vocab = 10;
  cfg.da_dim = 7;
  cfg.gating = net::Gating::learned;

  for (int trial = 0; trial < 10; ++trial) {
    auto params = net::NetworkParams::init(cfg, rng);
    std::vector<std::size_t> tokens(6), targets(6);
    for (auto& t : tokens) t = rng.uniform_index(cfg.vocab);
    for (auto& t : targets) t = rng.uniform_index(cfg.vocab);
    num::Vec d0(cfg.da_dim, 0.0);
    d0[rng.uniform_index(cfg.da_dim)] = 1.0;
    d0[rng.uniform_index(cfg.da_dim)] = 1.0;

    auto trace = net::forward_sentence(params, cfg, tokens, d0, nullptr,
                                       false);
    auto [grads, before] = net::backprop_sentence(params, cfg, trace, targets);
    train::detail::clip_and_apply(params, grads, 1e-3, 5.0);
    auto after = net::cost_terms(
        net::forward_sentence(params, cfg, tokens, d0, nullptr, false),
        targets);
    CHECK(after.total() < before);
  }
}

TEST_CASE("memorization run drives per-token perplexity under 1.3") {
  auto ont = da::preset_ontology("restaurant");
  auto split = memorization_split(ont, 5);  // 50 sentences

  net::NetConfig cfg;
  cfg.hidden = 24;
  cfg.embed = 24;
  cfg.da_dim = da::da_vector_dim(ont);
  cfg.gating = net::Gating::learned;

  TrainConfig tc;
  tc.max_epochs = 200;
  tc.patience = 1000;  // no early stop in the memorization regime
  tc.seed = 1;
  tc.upsample = false;

  auto result = train::train(split, cfg, tc);
  REQUIRE(result.history.size() == 200);

  // smoothed training cost decreases
  std::vector<double> blocks;
  for (std::size_t start = 0; start + 25 <= 200; start += 25) {
    double m = 0;
    for (std::size_t i = start; i < start + 25; ++i)
      m += result.history[i].train_cost;
    blocks.push_back(m / 25);
  }
  for (std::size_t b = 1; b < blocks.size(); ++b)
    CHECK(blocks[b] <= blocks[b - 1] * 1.02);
  CHECK(blocks.back() < blocks.front());

  // per-token perplexity of the forward net on its training sentences
  net::NetConfig final_cfg = cfg;
  final_cfg.vocab = split.vocab.size();
  double ce = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : split.train) {
    auto in = train::input_ids(ex.utt, split.vocab);
    auto tgt = train::target_ids(ex.utt, split.vocab);
    auto trace = net::forward_sentence(result.forward, final_cfg, in, ex.d0,
                                       nullptr, false);
    ce += net::cost_terms(trace, tgt).ce;
    tokens += tgt.size();
  }
  const double ppl = std::exp(ce / static_cast<double>(tokens));
  INFO("per-token perplexity " << ppl);
  CHECK(ppl < 1.3);
}

TEST_CASE("patience zero stops after the first non-improving epoch") {
  auto ont = da::preset_ontology("restaurant");
  auto split = memorization_split(ont, 1);
  net::NetConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 8;
  cfg.da_dim = da::da_vector_dim(ont);

  TrainConfig tc;
  tc.learning_rate = 0.0;  // nothing improves
  tc.max_epochs = 50;
  tc.patience = 0;
  auto result = train::train(split, cfg, tc);
  CHECK(result.history.size() == 2);
  CHECK(result.best_epoch == 1);
}

TEST_CASE("identical seeds give bitwise identical parameters") {
  auto ont = da::preset_ontology("restaurant");
  auto split = memorization_split(ont, 2);
  net::NetConfig cfg;
  cfg.hidden = 10;
  cfg.embed = 10;
  cfg.da_dim = da::da_vector_dim(ont);
  cfg.layers = 2;
  cfg.dropout = 0.5;

  TrainConfig tc;
  tc.max_epochs = 3;
  tc.seed = 7;

  auto r1 = train::train(split, cfg, tc);
  auto r2 = train::train(split, cfg, tc);

  std::vector<const num::Mat*> b1, b2;
  r1.forward.for_each_block(
      [&](const std::string&, const num::Mat& m) { b1.push_back(&m); });
  r2.forward.for_each_block(
      [&](const std::string&, const num::Mat& m) { b2.push_back(&m); });
  for (std::size_t b = 0; b < b1.size(); ++b) CHECK(b1[b]->a == b2[b]->a);

  b1.clear();
  b2.clear();
  r1.backward.for_each_block(
      [&](const std::string&, const num::Mat& m) { b1.push_back(&m); });
  r2.backward.for_each_block(
      [&](const std::string&, const num::Mat& m) { b2.push_back(&m); });
  for (std::size_t b = 0; b < b1.size(); ++b) CHECK(b1[b]->a == b2[b]->a);

  // the tied detector is identical in both networks
  CHECK(r1.forward.W_wr.a == r1.backward.W_wr.a);
}

TEST_CASE("divergence aborts with the epoch and sentence index") {
  auto ont = da::preset_ontology("restaurant");
  auto split = memorization_split(ont, 1);
  net::NetConfig cfg;
  cfg.hidden = 8;
  cfg.embed = 8;
  cfg.da_dim = da::da_vector_dim(ont);

  TrainConfig tc;
  tc.max_epochs = 2;
  try {
    train::train(split, cfg, tc, nullptr,
                 [&](net::NetworkParams& f, net::NetworkParams&) {
                   for (double& v : f.W_out.a)
                     v = v > 0 ? 600.0 : -600.0;  // softmax underflow to 0
                 });
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string what = e.what();
    CHECK(what.find("epoch 1") != std::string::npos);
    CHECK(what.find("sentence") != std::string::npos);
  }
}
