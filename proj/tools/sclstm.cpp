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

// Command-line front end: corpus synthesis, training, generation,
// evaluation, and gradient checking.
//
// Exit codes: 0 success, 1 runtime/numeric failure, 2 usage/input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sclstm/corpusgen.hpp"
#include "sclstm/decoder.hpp"
#include "sclstm/delex.hpp"
#include "sclstm/evaluator.hpp"
#include "sclstm/model_io.hpp"
#include "sclstm/net.hpp"
#include "sclstm/trainer.hpp"

namespace {

using namespace sclstm;

struct CommonOpts {
  std::string domain = "restaurant";
  std::string ontology_path;
};

da::Ontology resolve_ontology(const CommonOpts& c) {
  if (!c.ontology_path.empty()) {
    std::ifstream is(c.ontology_path);
    if (!is)
      throw InputError("cannot open ontology file '" + c.ontology_path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return da::parse_ontology(buf.str());
  }
  return da::preset_ontology(c.domain);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  if (out.empty()) throw InputError("empty seed list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// --- synth ------------------------------------------------------------

struct SynthOpts {
  CommonOpts common;
  std::string templates_path;
  std::string out_path;
  std::size_t n = 2000;
  std::uint64_t seed = 1;
  double noise = 0.0;
};

int cmd_synth(const SynthOpts& o) {
  da::Ontology ont = resolve_ontology(o.common);
  synth::TemplateSet tset =
      o.templates_path.empty()
          ? synth::preset_templates(ont.domain_name, ont)
          : synth::parse_templates_file(o.templates_path, ont);
  num::Rng rng(o.seed);
  auto records = synth::synth_corpus(ont, tset, o.n, rng, o.noise);

  std::ofstream os(o.out_path);
  if (!os) throw InputError("cannot write corpus file '" + o.out_path + "'");
  synth::write_corpus(os, records);
  if (!os) throw InputError("short write to '" + o.out_path + "'");

  auto st = synth::corpus_stats(records);
  std::cout << "sentences " << st.sentences << "\n"
            << "distinct_das " << st.distinct_das << "\n"
            << "mean_slots_per_da " << fmt(st.mean_slots_per_da) << "\n";
  return 0;
}

// --- train ------------------------------------------------------------

struct TrainOpts {
  CommonOpts common;
  std::string corpus_path;
  std::string out_prefix;
  std::string seeds = "1";
  std::uint64_t split_seed = 42;
  std::size_t hidden = 80;
  std::size_t layers = 1;
  double dropout = -1.0;  // <0: default by depth
  std::size_t embedding = 0;
  double alpha = 0.5;
  std::string gating = "learned";
  double lr = 0.1;
  double lr_decay = 0.5;
  double eta = 1e-4;
  double xi = 100.0;
  double l2 = 1e-5;
  std::size_t l2_every = 10;
  std::size_t epochs = 50;
  std::size_t patience = 5;
  double clip = 5.0;
  bool no_upsample = false;
  std::string word_vectors;
};

int cmd_train(const TrainOpts& o) {
  da::Ontology ont = resolve_ontology(o.common);
  auto corpus = da::load_corpus_file(o.corpus_path, ont);
  if (corpus.empty()) throw InputError("corpus is empty");
  auto split = train::split_corpus(corpus, ont, o.split_seed);

  net::NetConfig cfg;
  cfg.hidden = o.hidden;
  cfg.layers = o.layers;
  cfg.embed = o.embedding;
  cfg.da_dim = da::da_vector_dim(ont);
  cfg.dropout = o.dropout >= 0.0 ? o.dropout : (o.layers > 1 ? 0.5 : 0.0);
  cfg.alpha.assign(o.layers, o.alpha);
  cfg.gating = net::gating_from_name(o.gating);
  if (cfg.gating == net::Gating::heuristic)
    cfg.turnoff = da::heuristic_turnoff_map(split.vocab, ont);

  train::TrainConfig tc;
  tc.learning_rate = o.lr;
  tc.lr_decay = o.lr_decay;
  tc.eta = o.eta;
  tc.xi = o.xi;
  tc.l2_coeff = o.l2;
  tc.l2_every = o.l2_every;
  tc.max_epochs = o.epochs;
  tc.patience = o.patience;
  tc.clip = o.clip;
  tc.upsample = !o.no_upsample;

  for (std::uint64_t seed : parse_seed_list(o.seeds)) {
    tc.seed = seed;
    const std::string tag = o.out_prefix + ".seed" + std::to_string(seed);
    std::ofstream log(tag + ".log");
    if (!log) throw InputError("cannot write log file '" + tag + ".log'");
    std::cout << "seed " << seed << " train " << split.train.size()
              << " valid " << split.valid.size() << " test "
              << split.test.size() << " vocab " << split.vocab.size() << "\n";
    auto result = train::train(
        split, cfg, tc,
        [&](const train::EpochRecord& r) {
          std::ostringstream line;
          line << "epoch " << r.epoch << " train_cost " << fmt(r.train_cost)
               << " valid_cost " << fmt(r.valid_cost) << " lr "
               << fmt(r.learning_rate);
          std::cout << line.str() << "\n";
          log << line.str() << "\n";
        },
        [&](net::NetworkParams& f, net::NetworkParams& b) {
          if (o.word_vectors.empty()) return;
          const std::size_t n =
              net::load_word_vectors(o.word_vectors, split.vocab, f);
          net::load_word_vectors(o.word_vectors, split.vocab, b);
          std::cout << "word_vectors_loaded " << n << "\n";
        });
    net::NetConfig final_cfg = cfg;
    final_cfg.vocab = split.vocab.size();
    net::save_model_file(tag + ".fwd", final_cfg, result.forward, split.vocab);
    net::save_model_file(tag + ".bwd", final_cfg, result.backward, split.vocab);
    std::cout << "best_epoch " << result.best_epoch << " best_valid_cost "
              << fmt(result.best_valid_cost /
                     static_cast<double>(2 * split.valid.size()))
              << "\n";
  }
  return 0;
}

// --- generate ----------------------------------------------------------

struct GenerateOpts {
  CommonOpts common;
  std::string fwd_path, bwd_path;
  std::string das_path;
  std::string out_path;
  std::uint64_t seed = 1;
  std::size_t n_overgen = 20;
  std::size_t n_best = 5;
  double lambda = 100.0;
  std::size_t max_len = 60;
};

int cmd_generate(const GenerateOpts& o) {
  da::Ontology ont = resolve_ontology(o.common);
  net::Model fwd = net::load_model_file(o.fwd_path);
  net::Model bwd = net::load_model_file(o.bwd_path);
  if (fwd.cfg.da_dim != da::da_vector_dim(ont))
    throw InputError("model/ontology mismatch (DA dimension)");
  if (fwd.vocab.tokens != bwd.vocab.tokens)
    throw InputError("forward/backward model vocabulary mismatch");

  std::ifstream is(o.das_path);
  if (!is) throw InputError("cannot open DA file '" + o.das_path + "'");
  std::ostream* out = &std::cout;
  std::ofstream of;
  if (!o.out_path.empty()) {
    of.open(o.out_path);
    if (!of) throw InputError("cannot write output file '" + o.out_path + "'");
    out = &of;
  }

  decode::DecodeConfig dc;
  dc.n_overgen = o.n_overgen;
  dc.n_best = o.n_best;
  dc.lambda = o.lambda;
  dc.max_len = o.max_len;

  num::Rng base(o.seed);
  std::string line;
  std::size_t lineno = 0;
  bool any_error = false;
  while (std::getline(is, line)) {
    ++lineno;
    num::Rng rng = base.split();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    da::DialogueAct act;
    try {
      act = da::parse_da(line, ont);
    } catch (const ParseError& e) {
      std::cerr << "line " << lineno << ": " << e.what() << "\n";
      any_error = true;
      continue;
    }
    const num::Vec d0 = da::encode_da(act, ont);
    auto top = decode::rerank(fwd.params, bwd.params, fwd.cfg, fwd.vocab, d0,
                              act, dc, rng);
    *out << "# " << line << "\n";
    for (const auto& c : top)
      *out << da::lexicalise(c.tokens, act) << "\t" << fmt(c.score) << "\t"
           << fmt(c.f_cost) << "\t" << fmt(c.b_cost) << "\t" << fmt(c.err)
           << "\n";
  }
  return any_error ? 2 : 0;
}

// --- eval ---------------------------------------------------------------

struct EvalOpts {
  CommonOpts common;
  std::string corpus_path;
  std::string model_prefix;
  std::string seeds = "1";
  std::uint64_t split_seed = 42;
  std::string split = "test";
  std::string baseline;
  std::string gating;  // assert the checkpoints use this mode
  std::string out_path;
  std::size_t n_overgen = 20;
  std::size_t n_best = 5;
  double lambda = 100.0;
};

int cmd_eval(const EvalOpts& o) {
  da::Ontology ont = resolve_ontology(o.common);
  auto corpus = da::load_corpus_file(o.corpus_path, ont);
  if (corpus.empty()) throw InputError("corpus is empty");
  auto split = train::split_corpus(corpus, ont, o.split_seed);
  auto groups = da::group_references(corpus);

  const std::vector<train::Example>* eval_set = &split.test;
  if (o.split == "train")
    eval_set = &split.train;
  else if (o.split == "valid")
    eval_set = &split.valid;
  else if (o.split != "test")
    throw InputError("unknown split '" + o.split + "'");

  std::ostream* out = &std::cout;
  std::ofstream of;
  if (!o.out_path.empty()) {
    of.open(o.out_path);
    if (!of) throw InputError("cannot write report file '" + o.out_path + "'");
    out = &of;
  }

  *out << "domain " << ont.domain_name << "\n"
       << "split " << o.split << "\n"
       << "das " << eval_set->size() << "\n";

  if (o.baseline == "knn") {
    auto report = eval::evaluate_knn(split.train, *eval_set, ont, groups);
    *out << "baseline knn\n"
         << "bleu_top1 " << fmt(report.bleu_top1) << " err_pct "
         << fmt(report.err_percent) << "\n";
    return 0;
  }
  if (!o.baseline.empty())
    throw InputError("unknown baseline '" + o.baseline + "'");
  if (o.model_prefix.empty())
    throw InputError("--model-prefix is required without --baseline");

  decode::DecodeConfig dc;
  dc.n_overgen = o.n_overgen;
  dc.n_best = o.n_best;
  dc.lambda = o.lambda;

  double sum1 = 0.0, sum5 = 0.0, sum_err = 0.0;
  const auto seeds = parse_seed_list(o.seeds);
  for (std::uint64_t seed : seeds) {
    const std::string tag = o.model_prefix + ".seed" + std::to_string(seed);
    net::Model fwd = net::load_model_file(tag + ".fwd");
    net::Model bwd = net::load_model_file(tag + ".bwd");
    if (fwd.vocab.tokens != split.vocab.tokens)
      throw InputError("model/corpus mismatch (vocab) for seed " +
                       std::to_string(seed));
    if (!o.gating.empty() &&
        fwd.cfg.gating != net::gating_from_name(o.gating))
      throw InputError("checkpoint for seed " + std::to_string(seed) +
                       " uses gating '" + net::gating_name(fwd.cfg.gating) +
                       "', expected '" + o.gating + "'");
    auto report = eval::evaluate_model(fwd.params, bwd.params, fwd.cfg,
                                       fwd.vocab, ont, *eval_set, groups, dc,
                                       seed);
    *out << "seed " << seed << " bleu_top1 " << fmt(report.bleu_top1)
         << " bleu_top5 " << fmt(report.bleu_top5_mean) << " err_pct "
         << fmt(report.err_percent) << "\n";
    sum1 += report.bleu_top1;
    sum5 += report.bleu_top5_mean;
    sum_err += report.err_percent;
  }
  const double n = static_cast<double>(seeds.size());
  *out << "mean bleu_top1 " << fmt(sum1 / n) << " bleu_top5 " << fmt(sum5 / n)
       << " err_pct " << fmt(sum_err / n) << "\n";
  return 0;
}

// --- gradcheck ----------------------------------------------------------

struct GradcheckOpts {
  std::size_t hidden = 6;
  std::size_t da_dim = 9;
  std::size_t vocab = 12;
  std::size_t length = 5;
  std::uint64_t seed = 1;
  double step = 1e-5;
  double threshold = 1e-4;
};

int cmd_gradcheck(const GradcheckOpts& o) {
  net::GradcheckConfig gc;
  gc.hidden = o.hidden;
  gc.da_dim = o.da_dim;
  gc.vocab = o.vocab;
  gc.length = o.length;
  gc.h = o.step;
  gc.threshold = o.threshold;
  num::Rng rng(o.seed);
  auto report = net::gradcheck(gc, rng);
  for (const auto& e : report.entries) {
    std::cout << "mode " << e.mode << " layers " << e.layers << "\n";
    for (const auto& [name, err] : e.block_errors) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3e", err);
      std::cout << "  " << name << " " << buf << "\n";
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", report.worst);
  std::cout << "worst_rel_err " << buf << "\n";
  if (!report.all_ok(gc.threshold)) {
    std::cout << "FAIL (threshold " << gc.threshold << ")\n";
    return 1;
  }
  std::cout << "OK\n";
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--domain", c.domain, "preset domain (restaurant|hotel)");
  cmd->add_option("--ontology", c.ontology_path, "ontology file path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantically controlled LSTM language generator"};
  app.require_subcommand(1);

  SynthOpts so;
  auto* synth_cmd = app.add_subcommand("synth", "synthesize a corpus");
  add_common(synth_cmd, so.common);
  synth_cmd->add_option("--templates", so.templates_path, "template file");
  synth_cmd->add_option("--n", so.n, "number of sentences");
  synth_cmd->add_option("--seed", so.seed, "random seed");
  synth_cmd->add_option("--noise", so.noise, "surface perturbation rate");
  synth_cmd->add_option("--out", so.out_path, "output corpus file")
      ->required();

  TrainOpts to;
  auto* train_cmd = app.add_subcommand("train", "train forward+backward nets");
  add_common(train_cmd, to.common);
  train_cmd->add_option("--corpus", to.corpus_path, "corpus file")->required();
  train_cmd->add_option("--out-prefix", to.out_prefix, "checkpoint prefix")
      ->required();
  train_cmd->add_option("--seeds", to.seeds, "comma-separated seed list");
  train_cmd->add_option("--split-seed", to.split_seed, "corpus split seed");
  train_cmd->add_option("--hidden", to.hidden, "hidden layer size");
  train_cmd->add_option("--layers", to.layers, "number of hidden layers");
  train_cmd->add_option("--dropout", to.dropout,
                        "dropout rate (default 0.5 when layers > 1)");
  train_cmd->add_option("--embedding", to.embedding,
                        "embedding size (0 = hidden size)");
  train_cmd->add_option("--alpha", to.alpha, "reading gate layer weight");
  train_cmd->add_option("--gating", to.gating,
                        "gating mode (learned|heuristic|none)");
  train_cmd->add_option("--lr", to.lr, "learning rate");
  train_cmd->add_option("--lr-decay", to.lr_decay, "decay on stall");
  train_cmd->add_option("--eta", to.eta, "gate penalty scale");
  train_cmd->add_option("--xi", to.xi, "gate penalty base");
  train_cmd->add_option("--l2", to.l2, "l2 coefficient");
  train_cmd->add_option("--l2-every", to.l2_every, "l2 period in sentences");
  train_cmd->add_option("--epochs", to.epochs, "maximum epochs");
  train_cmd->add_option("--patience", to.patience, "early stopping patience");
  train_cmd->add_option("--clip", to.clip, "gradient clip");
  train_cmd->add_flag("--no-upsample", to.no_upsample,
                      "disable group up-sampling");
  train_cmd->add_option("--word-vectors", to.word_vectors,
                        "pre-trained word vector file");

  GenerateOpts go;
  auto* gen_cmd = app.add_subcommand("generate", "realise DA strings");
  add_common(gen_cmd, go.common);
  gen_cmd->add_option("--fwd", go.fwd_path, "forward model")->required();
  gen_cmd->add_option("--bwd", go.bwd_path, "backward model")->required();
  gen_cmd->add_option("--das", go.das_path, "file with one DA per line")
      ->required();
  gen_cmd->add_option("--out", go.out_path, "output file (default stdout)");
  gen_cmd->add_option("--seed", go.seed, "random seed");
  gen_cmd->add_option("--n-overgen", go.n_overgen, "candidates to sample");
  gen_cmd->add_option("--n-best", go.n_best, "candidates to keep");
  gen_cmd->add_option("--lambda", go.lambda, "slot error tradeoff");
  gen_cmd->add_option("--max-len", go.max_len, "sampling length cap");

  EvalOpts eo;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate checkpoints");
  add_common(eval_cmd, eo.common);
  eval_cmd->add_option("--corpus", eo.corpus_path, "corpus file")->required();
  eval_cmd->add_option("--model-prefix", eo.model_prefix, "checkpoint prefix");
  eval_cmd->add_option("--seeds", eo.seeds, "comma-separated seed list");
  eval_cmd->add_option("--split-seed", eo.split_seed, "corpus split seed");
  eval_cmd->add_option("--split", eo.split, "split to evaluate");
  eval_cmd->add_option("--baseline", eo.baseline, "baseline (knn)");
  eval_cmd->add_option("--gating", eo.gating, "expected checkpoint gating");
  eval_cmd->add_option("--out", eo.out_path, "report file (default stdout)");
  eval_cmd->add_option("--n-overgen", eo.n_overgen, "candidates to sample");
  eval_cmd->add_option("--n-best", eo.n_best, "candidates to keep");
  eval_cmd->add_option("--lambda", eo.lambda, "slot error tradeoff");

  GradcheckOpts ko;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check");
  gc_cmd->add_option("--hidden", ko.hidden, "hidden size");
  gc_cmd->add_option("--da-dim", ko.da_dim, "DA vector dimension");
  gc_cmd->add_option("--vocab", ko.vocab, "vocabulary size");
  gc_cmd->add_option("--len", ko.length, "sentence length");
  gc_cmd->add_option("--seed", ko.seed, "random seed");
  gc_cmd->add_option("--h", ko.step, "finite difference step");
  gc_cmd->add_option("--threshold", ko.threshold, "pass threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(so);
    if (train_cmd->parsed()) return cmd_train(to);
    if (gen_cmd->parsed()) return cmd_generate(go);
    if (eval_cmd->parsed()) return cmd_eval(eo);
    if (gc_cmd->parsed()) return cmd_gradcheck(ko);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
