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

// Delexicalisation and its inverse: categorical slot values are swapped
// for SLOT_<NAME> tokens so the generator learns value-independent
// surface forms. Binary and dontcare values stay lexical; they have no
// token to match.

#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sclstm/dialogue_act.hpp"
#include "sclstm/ontology.hpp"

namespace sclstm::da {

inline const std::string kBos = "BOS";
inline const std::string kEos = "EOS";
inline const std::string kSlotPrefix = "SLOT_";

struct DelexUtterance {
  std::vector<std::string> tokens;  // BOS ... EOS

  bool operator==(const DelexUtterance& o) const { return tokens == o.tokens; }
  bool operator<(const DelexUtterance& o) const { return tokens < o.tokens; }
};

inline bool is_slot_token(const std::string& tok) {
  return tok.rfind(kSlotPrefix, 0) == 0 && tok.size() > kSlotPrefix.size();
}

inline std::string slot_token(const std::string& slot) {
  std::string out = kSlotPrefix;
  for (char ch : slot) out += static_cast<char>(std::toupper(ch));
  return out;
}

inline std::string slot_of_token(const std::string& tok) {
  std::string out;
  for (std::size_t i = kSlotPrefix.size(); i < tok.size(); ++i)
    out += static_cast<char>(std::tolower(tok[i]));
  return out;
}

// Lowercase, split on whitespace, split punctuation off as its own token.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c) && c != '_' && c != '\'') {
      flush();
      out.push_back(std::string(1, static_cast<char>(raw)));
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  flush();
  return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

// Replaces every exact occurrence of each categorical slot value with the
// slot token; longer values are matched first so a value containing
// another bound value is replaced as one unit. Bound values that never
// appear are reported through `warnings`.
inline DelexUtterance delexicalise(const std::string& text,
                                   const DialogueAct& act, const Ontology& ont,
                                   std::vector<std::string>* warnings = nullptr) {
  std::vector<std::string> toks = tokenize(text);

  struct Bound {
    std::string slot;
    std::vector<std::string> value_toks;
  };
  std::vector<Bound> bound;
  for (const auto& [slot, v] : act.bindings) {
    if (v.kind != ValueKind::categorical) continue;
    (void)ont.slot_index(slot);
    Bound b{slot, tokenize(v.text)};
    if (!b.value_toks.empty()) bound.push_back(std::move(b));
  }
  std::sort(bound.begin(), bound.end(), [](const Bound& a, const Bound& b) {
    if (a.value_toks.size() != b.value_toks.size())
      return a.value_toks.size() > b.value_toks.size();
    return a.slot < b.slot;
  });

  for (const auto& b : bound) {
    const std::string token = slot_token(b.slot);
    bool matched = false;
    std::vector<std::string> next;
    std::size_t i = 0;
    while (i < toks.size()) {
      bool hit = i + b.value_toks.size() <= toks.size();
      if (hit)
        for (std::size_t k = 0; k < b.value_toks.size(); ++k)
          if (toks[i + k] != b.value_toks[k]) {
            hit = false;
            break;
          }
      if (hit) {
        next.push_back(token);
        i += b.value_toks.size();
        matched = true;
      } else {
        next.push_back(toks[i]);
        ++i;
      }
    }
    toks = std::move(next);
    if (!matched && warnings)
      warnings->push_back("value for slot '" + b.slot +
                          "' not found in text");
  }

  DelexUtterance out;
  out.tokens.reserve(toks.size() + 2);
  out.tokens.push_back(kBos);
  for (auto& t : toks) out.tokens.push_back(std::move(t));
  out.tokens.push_back(kEos);
  return out;
}

// Substitutes slot tokens back with the act's bound values and joins with
// single spaces. Slot tokens with no usable binding are kept verbatim and
// reported as redundant.
inline std::string lexicalise(const DelexUtterance& utt, const DialogueAct& act,
                              std::vector<std::string>* redundant = nullptr) {
  std::vector<std::string> out;
  for (const auto& tok : utt.tokens) {
    if (tok == kBos || tok == kEos) continue;
    if (is_slot_token(tok)) {
      const std::string slot = slot_of_token(tok);
      const SlotValue* v = act.find(slot);
      if (v != nullptr && v->kind == ValueKind::categorical) {
        out.push_back(v->text);
        continue;
      }
      if (redundant) redundant->push_back(slot);
    }
    out.push_back(tok);
  }
  return join_tokens(out);
}

struct CorpusEntry {
  DialogueAct act;
  DelexUtterance delex;
  std::string text;      // raw surface string
  std::string da_string;
};

// Groups delexicalised surface forms that share a canonical DA. Forms are
// de-duplicated, first-seen order kept.
inline std::map<std::string, std::vector<DelexUtterance>> group_references(
    const std::vector<CorpusEntry>& corpus) {
  std::map<std::string, std::vector<DelexUtterance>> groups;
  for (const auto& e : corpus) {
    auto& forms = groups[canonical_da(e.act)];
    bool seen = false;
    for (const auto& f : forms)
      if (f == e.delex) {
        seen = true;
        break;
      }
    if (!seen) forms.push_back(e.delex);
  }
  return groups;
}

// Corpus file: UTF-8 JSON lines, each {"da": "...", "text": "..."}.
inline void save_corpus_line(std::ostream& os, const std::string& da_string,
                             const std::string& text) {
  nlohmann::json j;
  j["da"] = da_string;
  j["text"] = text;
  os << j.dump() << "\n";
}

inline std::vector<CorpusEntry> load_corpus(std::istream& is,
                                            const Ontology& ont,
                                            std::vector<std::string>* warnings = nullptr) {
  std::vector<CorpusEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("corpus line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    if (!j.contains("da") || !j.contains("text"))
      throw InputError("corpus line " + std::to_string(lineno) +
                       ": missing da/text field");
    CorpusEntry e;
    e.da_string = j["da"].get<std::string>();
    e.text = j["text"].get<std::string>();
    e.act = parse_da(e.da_string, ont);
    e.delex = delexicalise(e.text, e.act, ont, warnings);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<CorpusEntry> load_corpus_file(const std::string& path,
                                                 const Ontology& ont,
                                                 std::vector<std::string>* warnings = nullptr) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open corpus file '" + path + "'");
  return load_corpus(is, ont, warnings);
}

// Token <-> index table. BOS is 0 and EOS is 1; the rest are the corpus
// tokens in sorted order.
struct Vocab {
  std::vector<std::string> tokens;
  std::map<std::string, std::size_t> index;

  static Vocab build(const std::vector<CorpusEntry>& corpus) {
    std::set<std::string> uniq;
    for (const auto& e : corpus)
      for (const auto& t : e.delex.tokens)
        if (t != kBos && t != kEos) uniq.insert(t);
    Vocab v;
    v.tokens.push_back(kBos);
    v.tokens.push_back(kEos);
    for (const auto& t : uniq) v.tokens.push_back(t);
    for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index[v.tokens[i]] = i;
    return v;
  }

  std::size_t size() const { return tokens.size(); }
  std::size_t bos() const { return 0; }
  std::size_t eos() const { return 1; }

  std::size_t id(const std::string& tok) const {
    auto it = index.find(tok);
    if (it == index.end()) throw InputError("token '" + tok + "' not in vocabulary");
    return it->second;
  }
  const std::string& token(std::size_t i) const {
    if (i >= tokens.size()) throw InputError("token index out of range");
    return tokens[i];
  }

  std::vector<std::size_t> ids(const std::vector<std::string>& toks) const {
    std::vector<std::size_t> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(id(t));
    return out;
  }
};

// For each vocabulary token SLOT_<s>, the DA-vector feature the heuristic
// reading gate turns off after that token is consumed: slot s's
// "mentioned" bit. Everything else maps to -1.
inline std::vector<int> heuristic_turnoff_map(const Vocab& vocab,
                                              const Ontology& ont) {
  std::vector<int> map(vocab.size(), -1);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string& tok = vocab.tokens[i];
    if (!is_slot_token(tok)) continue;
    int si = ont.find_slot(slot_of_token(tok));
    if (si < 0) continue;
    map[i] = static_cast<int>(
        slot_feature_base(ont, static_cast<std::size_t>(si)));
  }
  return map;
}

}  // namespace sclstm::da
