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

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sclstm/error.hpp"

namespace sclstm::da {

enum class SlotKind { categorical, binary };

struct SlotDef {
  std::string name;
  SlotKind kind = SlotKind::categorical;
  bool allows_dontcare = false;
};

// A domain ontology: the dialogue act types and the slots they can carry.
struct Ontology {
  std::string domain_name;
  std::vector<std::string> act_types;
  std::vector<SlotDef> slots;

  std::size_t act_index(const std::string& act) const {
    for (std::size_t i = 0; i < act_types.size(); ++i)
      if (act_types[i] == act) return i;
    throw InputError("unknown act type '" + act + "' in domain " +
                     domain_name);
  }
  int find_act(const std::string& act) const {
    for (std::size_t i = 0; i < act_types.size(); ++i)
      if (act_types[i] == act) return static_cast<int>(i);
    return -1;
  }
  std::size_t slot_index(const std::string& name) const {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].name == name) return i;
    throw InputError("unknown slot '" + name + "' in domain " + domain_name);
  }
  int find_slot(const std::string& name) const {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].name == name) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {
inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}
}  // namespace detail

// Structured-text ontology format:
//   domain <name>
//   act <act_type>            (one per line, in order)
//   slot <name> categorical|binary [dontcare]
inline Ontology parse_ontology(const std::string& text) {
  Ontology ont;
  std::istringstream is(text);
  std::string line;
  std::size_t offset = 0;
  while (std::getline(is, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    auto words = detail::split_ws(line);
    if (words.empty() || words[0][0] == '#') continue;
    if (words[0] == "domain" && words.size() == 2) {
      ont.domain_name = words[1];
    } else if (words[0] == "act" && words.size() == 2) {
      if (ont.find_act(words[1]) >= 0)
        throw ParseError("duplicate act type '" + words[1] + "'", line_start);
      ont.act_types.push_back(words[1]);
    } else if (words[0] == "slot" && (words.size() == 3 || words.size() == 4)) {
      SlotDef def;
      def.name = words[1];
      if (words[2] == "categorical")
        def.kind = SlotKind::categorical;
      else if (words[2] == "binary")
        def.kind = SlotKind::binary;
      else
        throw ParseError("bad slot kind '" + words[2] + "'", line_start);
      if (words.size() == 4) {
        if (words[3] != "dontcare")
          throw ParseError("bad slot flag '" + words[3] + "'", line_start);
        def.allows_dontcare = true;
      }
      if (ont.find_slot(def.name) >= 0)
        throw ParseError("duplicate slot '" + def.name + "'", line_start);
      ont.slots.push_back(def);
    } else {
      throw ParseError("bad ontology line '" + line + "'", line_start);
    }
  }
  if (ont.domain_name.empty() || ont.act_types.empty())
    throw ParseError("ontology needs a domain and at least one act", 0);
  return ont;
}

inline std::string render_ontology(const Ontology& ont) {
  std::ostringstream os;
  os << "domain " << ont.domain_name << "\n";
  for (const auto& a : ont.act_types) os << "act " << a << "\n";
  for (const auto& s : ont.slots) {
    os << "slot " << s.name << " "
       << (s.kind == SlotKind::binary ? "binary" : "categorical");
    if (s.allows_dontcare) os << " dontcare";
    os << "\n";
  }
  return os.str();
}

// The two venue-information domains. Eight act types; nine shared slots,
// three domain-specific ones, plus the categorical result-count slot.
inline std::string preset_ontology_text(const std::string& domain) {
  const char* shared =
      "act inform\n"
      "act inform_only\n"
      "act reject\n"
      "act confirm\n"
      "act select\n"
      "act request\n"
      "act reqmore\n"
      "act goodbye\n"
      "slot name categorical\n"
      "slot type categorical\n"
      "slot pricerange categorical dontcare\n"
      "slot price categorical\n"
      "slot phone categorical\n"
      "slot address categorical\n"
      "slot postcode categorical\n"
      "slot area categorical dontcare\n"
      "slot near categorical dontcare\n";
  if (domain == "restaurant") {
    return std::string("domain restaurant\n") + shared +
           "slot food categorical dontcare\n"
           "slot goodformeal categorical dontcare\n"
           "slot kidsallowed binary dontcare\n"
           "slot count categorical\n";
  }
  if (domain == "hotel") {
    return std::string("domain hotel\n") + shared +
           "slot hasinternet binary dontcare\n"
           "slot acceptscards binary dontcare\n"
           "slot dogsallowed binary dontcare\n"
           "slot count categorical\n";
  }
  throw InputError("unknown preset domain '" + domain + "'");
}

inline Ontology preset_ontology(const std::string& domain) {
  return parse_ontology(preset_ontology_text(domain));
}

}  // namespace sclstm::da
