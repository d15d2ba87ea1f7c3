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

// Synthesizes a desk-scale training corpus from surface templates.
//
// Template files are line records:
//   value <slot> : v1 | v2 | ...
//   tmpl <act> : <text>
// where <text> mixes literal words, {slot} placeholders (a categorical
// value is sampled and rendered), zero-width binding markers
// {slot=yes|no|dontcare|req}, optional segments [...] (independently
// included or dropped), and alternations (a|b|c). Segments and
// alternations do not nest.

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sclstm/delex.hpp"
#include "sclstm/dialogue_act.hpp"
#include "sclstm/ontology.hpp"

namespace sclstm::synth {

struct TemplateNode {
  enum class Kind { literal, slot, marker, optional, alternation };
  Kind kind = Kind::literal;
  std::string text;                                // literal
  std::string slot;                                // slot / marker
  da::ValueKind marker = da::ValueKind::requested; // marker
  std::vector<TemplateNode> children;              // optional
  std::vector<std::vector<TemplateNode>> branches; // alternation
};

struct Template {
  std::string act;
  std::vector<TemplateNode> nodes;
  std::string source;  // the original record, used in error messages
};

struct TemplateSet {
  std::vector<Template> templates;
  std::map<std::string, std::vector<std::string>> values;
};

namespace detail {

inline TemplateNode parse_brace(const std::string& text, std::size_t& i,
                                std::size_t line_start) {
  // at '{'
  const std::size_t open = i++;
  std::string body;
  while (i < text.size() && text[i] != '}') body += text[i++];
  if (i >= text.size())
    throw ParseError("unterminated '{'", line_start + open);
  ++i;
  TemplateNode node;
  const auto eq = body.find('=');
  if (eq == std::string::npos) {
    node.kind = TemplateNode::Kind::slot;
    node.slot = body;
  } else {
    node.kind = TemplateNode::Kind::marker;
    node.slot = body.substr(0, eq);
    const std::string val = body.substr(eq + 1);
    if (val == "yes")
      node.marker = da::ValueKind::yes;
    else if (val == "no")
      node.marker = da::ValueKind::no;
    else if (val == "dontcare")
      node.marker = da::ValueKind::dontcare;
    else if (val == "req")
      node.marker = da::ValueKind::requested;
    else
      throw ParseError("bad marker value '" + val + "'", line_start + open);
  }
  return node;
}

inline std::vector<TemplateNode> parse_nodes(const std::string& text,
                                             std::size_t& i,
                                             std::size_t line_start,
                                             bool nested,
                                             const char* stops) {
  std::vector<TemplateNode> nodes;
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) {
      TemplateNode n;
      n.kind = TemplateNode::Kind::literal;
      n.text = literal;
      nodes.push_back(std::move(n));
      literal.clear();
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::strchr(stops, c) != nullptr) break;
    if (c == '{') {
      flush();
      nodes.push_back(parse_brace(text, i, line_start));
    } else if (c == '[') {
      if (nested)
        throw ParseError("nested '[' is not supported", line_start + i);
      flush();
      ++i;
      TemplateNode n;
      n.kind = TemplateNode::Kind::optional;
      n.children = parse_nodes(text, i, line_start, true, "]");
      if (i >= text.size() || text[i] != ']')
        throw ParseError("unterminated '['", line_start + i);
      ++i;
      nodes.push_back(std::move(n));
    } else if (c == '(') {
      flush();
      ++i;
      TemplateNode n;
      n.kind = TemplateNode::Kind::alternation;
      while (true) {
        n.branches.push_back(parse_nodes(text, i, line_start, true, "|)"));
        if (i >= text.size())
          throw ParseError("unterminated '('", line_start + i);
        if (text[i] == ')') {
          ++i;
          break;
        }
        ++i;  // '|'
      }
      nodes.push_back(std::move(n));
    } else if (c == ']' || c == ')' || c == '|') {
      throw ParseError(std::string("unexpected '") + c + "'", line_start + i);
    } else {
      literal += c;
      ++i;
    }
  }
  flush();
  return nodes;
}

inline void validate_nodes(const std::vector<TemplateNode>& nodes,
                           const da::Ontology& ont,
                           const std::string& source,
                           std::size_t line_start) {
  for (const auto& n : nodes) {
    switch (n.kind) {
      case TemplateNode::Kind::slot:
      case TemplateNode::Kind::marker:
        if (ont.find_slot(n.slot) < 0)
          throw ParseError("template '" + source + "' references unknown slot '" +
                               n.slot + "'",
                           line_start);
        break;
      case TemplateNode::Kind::optional:
        validate_nodes(n.children, ont, source, line_start);
        break;
      case TemplateNode::Kind::alternation:
        for (const auto& b : n.branches)
          validate_nodes(b, ont, source, line_start);
        break;
      case TemplateNode::Kind::literal:
        break;
    }
  }
}

}  // namespace detail

inline TemplateSet parse_templates(const std::string& text,
                                   const da::Ontology& ont) {
  TemplateSet set;
  std::istringstream is(text);
  std::string line;
  std::size_t offset = 0;
  while (std::getline(is, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "value") {
      std::string slot, colon;
      ls >> slot >> colon;
      if (colon != ":")
        throw ParseError("expected ':' in value record", line_start);
      if (ont.find_slot(slot) < 0)
        throw ParseError("value record for unknown slot '" + slot + "'",
                         line_start);
      std::string rest;
      std::getline(ls, rest);
      std::vector<std::string>& inv = set.values[slot];
      std::string item;
      std::istringstream rs(rest);
      while (std::getline(rs, item, '|')) {
        const std::size_t a = item.find_first_not_of(" \t");
        const std::size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        inv.push_back(item.substr(a, b - a + 1));
      }
      if (inv.empty())
        throw ParseError("empty value inventory for slot '" + slot + "'",
                         line_start);
    } else if (kind == "tmpl") {
      std::string act, colon;
      ls >> act >> colon;
      if (colon != ":")
        throw ParseError("expected ':' in template record", line_start);
      if (ont.find_act(act) < 0)
        throw ParseError("template for unknown act '" + act + "'", line_start);
      std::string rest;
      std::getline(ls, rest);
      const std::size_t a = rest.find_first_not_of(" \t");
      if (a == std::string::npos)
        throw ParseError("empty template text", line_start);
      rest = rest.substr(a);
      Template t;
      t.act = act;
      t.source = act + " : " + rest;
      std::size_t i = 0;
      t.nodes = detail::parse_nodes(rest, i, line_start, false, "");
      detail::validate_nodes(t.nodes, ont, t.source, line_start);
      set.templates.push_back(std::move(t));
    } else {
      throw ParseError("bad template-file record '" + kind + "'", line_start);
    }
  }
  if (set.templates.empty())
    throw ParseError("template file defines no templates", 0);
  return set;
}

inline TemplateSet parse_templates_file(const std::string& path,
                                        const da::Ontology& ont) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open template file '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_templates(buf.str(), ont);
}

struct SynthRecord {
  da::DialogueAct act;
  std::string da_string;
  std::string text;
};

namespace detail {

struct RenderState {
  std::vector<std::string> tokens;
  std::vector<bool> is_value_token;
  std::map<std::string, da::SlotValue> bindings;
};

inline void render_nodes(const std::vector<TemplateNode>& nodes,
                         const Template& tmpl, const da::Ontology& ont,
                         const TemplateSet& set, num::Rng& rng,
                         RenderState& out) {
  for (const auto& n : nodes) {
    switch (n.kind) {
      case TemplateNode::Kind::literal: {
        for (auto& tok : da::tokenize(n.text)) {
          out.tokens.push_back(std::move(tok));
          out.is_value_token.push_back(false);
        }
        break;
      }
      case TemplateNode::Kind::slot: {
        const auto& def = ont.slots[ont.slot_index(n.slot)];
        if (def.kind == da::SlotKind::binary)
          throw InputError("template '" + tmpl.source + "': binary slot '" +
                           n.slot + "' cannot take a sampled value");
        std::string value;
        auto bound = out.bindings.find(n.slot);
        if (bound != out.bindings.end()) {
          if (bound->second.kind != da::ValueKind::categorical)
            throw InputError("template '" + tmpl.source + "': slot '" +
                             n.slot + "' bound twice with different kinds");
          value = bound->second.text;
        } else {
          auto inv = set.values.find(n.slot);
          if (inv == set.values.end())
            throw InputError("template '" + tmpl.source +
                             "': no value inventory for slot '" + n.slot +
                             "'");
          value = inv->second[rng.uniform_index(inv->second.size())];
          out.bindings[n.slot] = da::SlotValue::categorical(value);
        }
        for (auto& tok : da::tokenize(value)) {
          out.tokens.push_back(std::move(tok));
          out.is_value_token.push_back(true);
        }
        break;
      }
      case TemplateNode::Kind::marker: {
        const auto& def = ont.slots[ont.slot_index(n.slot)];
        if ((n.marker == da::ValueKind::yes ||
             n.marker == da::ValueKind::no) &&
            def.kind != da::SlotKind::binary)
          throw InputError("template '" + tmpl.source + "': yes/no on " +
                           "non-binary slot '" + n.slot + "'");
        if (n.marker == da::ValueKind::dontcare && !def.allows_dontcare)
          throw InputError("template '" + tmpl.source + "': slot '" + n.slot +
                           "' does not take dontcare");
        if (n.marker == da::ValueKind::requested && tmpl.act != "request" &&
            tmpl.act != "select")
          throw InputError("template '" + tmpl.source +
                           "': requested slot outside request/select");
        out.bindings[n.slot] = da::SlotValue{n.marker, {}};
        break;
      }
      case TemplateNode::Kind::optional: {
        if (rng.uniform01() < 0.5)
          render_nodes(n.children, tmpl, ont, set, rng, out);
        break;
      }
      case TemplateNode::Kind::alternation: {
        const std::size_t pick = rng.uniform_index(n.branches.size());
        render_nodes(n.branches[pick], tmpl, ont, set, rng, out);
        break;
      }
    }
  }
}

// Benign AMT-style noise: swap one non-value word for a fixed synonym.
inline const std::map<std::string, std::string>& synonym_table() {
  static const std::map<std::string, std::string> table = {
      {"nice", "lovely"},        {"great", "fantastic"},
      {"good", "decent"},        {"located", "situated"},
      {"offers", "provides"},    {"serves", "does"},
      {"area", "neighborhood"},  {"place", "venue"},
      {"want", "need"},          {"looking", "searching"},
  };
  return table;
}

inline void apply_noise(RenderState& rs, num::Rng& rng) {
  const auto& table = synonym_table();
  std::vector<std::size_t> spots;
  for (std::size_t i = 0; i < rs.tokens.size(); ++i)
    if (!rs.is_value_token[i] && table.count(rs.tokens[i])) spots.push_back(i);
  if (spots.empty()) return;
  const std::size_t at = spots[rng.uniform_index(spots.size())];
  rs.tokens[at] = table.at(rs.tokens[at]);
}

}  // namespace detail

// Renders one record from one template.
inline SynthRecord render_template(const Template& tmpl,
                                   const da::Ontology& ont,
                                   const TemplateSet& set, num::Rng& rng,
                                   double noise_rate = 0.0) {
  detail::RenderState rs;
  detail::render_nodes(tmpl.nodes, tmpl, ont, set, rng, rs);
  if (noise_rate > 0.0 && rng.uniform01() < noise_rate)
    detail::apply_noise(rs, rng);

  SynthRecord rec;
  rec.act.act_type = tmpl.act;
  // ontology order keeps the rendered DA string canonical
  for (const auto& slot : ont.slots) {
    auto it = rs.bindings.find(slot.name);
    if (it != rs.bindings.end())
      rec.act.bindings.emplace_back(slot.name, it->second);
  }
  rec.da_string = da::render_da(rec.act, ont);
  rec.text = da::join_tokens(rs.tokens);
  return rec;
}

// Samples n sentences, templates drawn uniformly.
inline std::vector<SynthRecord> synth_corpus(const da::Ontology& ont,
                                             const TemplateSet& set,
                                             std::size_t n, num::Rng& rng,
                                             double noise_rate = 0.0) {
  if (n == 0) throw InputError("synth_corpus: n must be positive");
  std::vector<SynthRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Template& t = set.templates[rng.uniform_index(set.templates.size())];
    out.push_back(render_template(t, ont, set, rng, noise_rate));
  }
  return out;
}

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t distinct_das = 0;
  double mean_slots_per_da = 0.0;
};

inline CorpusStats corpus_stats(const std::vector<SynthRecord>& records) {
  CorpusStats st;
  st.sentences = records.size();
  std::map<std::string, bool> canon;
  double slots = 0.0;
  for (const auto& r : records) {
    canon[da::canonical_da(r.act)] = true;
    slots += static_cast<double>(r.act.bindings.size());
  }
  st.distinct_das = canon.size();
  st.mean_slots_per_da =
      records.empty() ? 0.0 : slots / static_cast<double>(records.size());
  return st;
}

inline void write_corpus(std::ostream& os,
                         const std::vector<SynthRecord>& records) {
  for (const auto& r : records) da::save_corpus_line(os, r.da_string, r.text);
}

// ---------------------------------------------------------------------
// Shipped presets. data/<domain>.templates carries the same text.

inline std::string preset_template_text(const std::string& domain) {
  if (domain == "restaurant") {
    return R"(# restaurant domain templates
value name : red door cafe | the golden gate grill | blue fin sushi | green papaya | casa lucia | the hungry bear | mama rosa | little sichuan | taverna nikos | chez maurice | the copper kettle | bangkok garden | el farolito grande | sakura house | the whistling pig | dosa on fillmore and kiss seafood | old harbor oyster bar | villa romana | the spice route | lucky noodle | crimson bistro | the marble arch
value type : restaurant | place to eat
value pricerange : cheap | moderate | expensive
value price : 8 dollars | 12 dollars | 19 dollars | 25 dollars | 34 dollars | 48 dollars
value phone : 4151234567 | 4159876543 | 4155550123 | 4155559876 | 4157772345
value address : 12 church street | 934 polk avenue | 58 castro lane | 221 divisadero road | 47 columbus way | 880 geary boulevard
value postcode : 94102 | 94109 | 94110 | 94115 | 94133
value area : cathedral hill | north beach | nob hill | hayes valley | russian hill | pacific heights | chinatown
value near : union square | the opera house | golden gate park | lower pacific heights | the civic center | moscone center | alamo square | dolores park
value food : thai | mexican | italian | japanese | vietnamese | ethiopian | greek | korean | french
value goodformeal : breakfast | lunch | dinner | brunch
value count : 2 | 3 | 4 | 5 | 7 | 9 | 14 | 23 | 41 | 182
tmpl inform : {name} is a (nice|great|good) {type}[ serving {food} food][ in the {area} area][ and it (allows|welcomes) (kids|children) {kidsallowed=yes}] .
tmpl inform : {name} is a (nice|great) restaurant[ in the {area} area][ serving (tasty|authentic) {food} food] .
tmpl inform : {name} (serves|offers) {food} food[ at {pricerange} prices][ in {area}] .
tmpl inform : {name} is (located|situated) at {address}[ in the {area} area] .
tmpl inform : the phone number of {name} is {phone}[ and its postcode is {postcode}] .
tmpl inform : {name} is in the {pricerange} price range[ and is good for {goodformeal}] .
tmpl inform : {name} is (good|ideal) for {goodformeal}[ and is near {near}] .
tmpl inform : {name} (does not allow|is not a good place for) (kids|children) {kidsallowed=no}[ but is good for {goodformeal}] .
tmpl inform : {name} allows (kids|children) {kidsallowed=yes}[ and serves {food} food] .
tmpl inform : there are {count} (restaurants|places)[ serving {food} food][ in the {area} area] .
tmpl inform : there are {count} restaurants if you do not care (whether kids are allowed|if children are welcome) {kidsallowed=dontcare} .
tmpl inform : there are {count} places[ near {near}] if the (area|location) does not matter {area=dontcare} .
tmpl inform : {name} is near {near}[ in the {area} area][ and the price range is {pricerange}] .
tmpl inform : the address of {name} is {address} and the postcode is {postcode} .
tmpl inform : {name} is a {pricerange} {type}[ near {near}] .
tmpl inform : if you do not mind the price range {pricerange=dontcare} , {name} (serves|offers) {food} food .
tmpl inform : the price for dinner at {name} is about {price} .
tmpl inform : a meal at {name} costs around {price}[ and it is in the {area} area] .
tmpl inform : {name} is good for {goodformeal} and (kids|children) are (welcome|allowed) {kidsallowed=yes}[ in the {area} area] .
tmpl inform : {name} in the {area} area does not (allow|welcome) (kids|children) {kidsallowed=no}[ and serves {food} food] .
tmpl inform : {name} is a {type} near {near}[ with {pricerange} prices] .
tmpl inform : the postcode of {name} is {postcode}[ and the phone number is {phone}] .
tmpl inform_only : {name} is the only (restaurant|place)[ serving {food} food][ near {near}] .
tmpl inform_only : there is no place other than {name}[ in the {pricerange} price range][ in the {area} area] .
tmpl inform_only : (i am sorry but|i apologize ,) {name} is the only {pricerange} restaurant near {near} .
tmpl inform_only : {name} is the only place (that allows|allowing) (kids|children) {kidsallowed=yes}[ near {near}] .
tmpl reject : there are no (restaurants|places)[ serving {food} food][ in the {area} area] .
tmpl reject : (i am sorry but|unfortunately) there is nothing in the {pricerange} price range[ near {near}] .
tmpl reject : no (restaurants|places) that allow (kids|children) {kidsallowed=yes} could be found[ in {area}] .
tmpl reject : there are no places good for {goodformeal}[ that allow (kids|children) {kidsallowed=yes}] .
tmpl confirm : (did you say|you are looking for) (a place|somewhere) in the {area} area ?
tmpl confirm : (did you say|can i confirm) you (want|are looking for) {food} food ?
tmpl confirm : (just to confirm ,|let me confirm ,) you want a place good for {goodformeal} ?
tmpl confirm : (did you say|you mean) in the {pricerange} price range ?
tmpl confirm : so you (want|need) a place where (kids|children) are allowed {kidsallowed=yes} ?
tmpl confirm : you do not care about the (area|location) {area=dontcare} , (correct|right) ?
tmpl confirm : (so|just to check ,) you want something near {near} ?
tmpl select : would you (prefer|like) {name} or (another|a different) (place|restaurant) ?
tmpl select : (which area would you prefer|what part of town do you want) {area=req} ?
tmpl select : would you (prefer|rather have) {food} food or something (else|different) ?
tmpl request : (what|which) (area|part of town) (are you looking for|would you like) {area=req} ?
tmpl request : (what kind of|what type of) food (would you like|are you looking for) {food=req} ?
tmpl request : (what is|whereabouts is) the (price range|budget) (you want|you are looking for) {pricerange=req} ?
tmpl request : (should|do you need) the (place|restaurant) (to allow|to welcome) (kids|children) {kidsallowed=req} ?
tmpl request : (what|which) meal (should it be good for|are you interested in) {goodformeal=req} ?
tmpl request : (are you looking for somewhere|do you want a place) near (a particular|a specific) (landmark|location) {near=req} ?
tmpl reqmore : (is there anything else i can help you with|can i help you with anything else|would you like anything else) ?
tmpl reqmore : (do you need anything else|what else can i do for you) ?
tmpl goodbye : (thank you|thank you for using this system) , goodbye .
tmpl goodbye : (goodbye .|have a nice day .|enjoy your meal , goodbye .)
)";
  }
  if (domain == "hotel") {
    return R"(# hotel domain templates
value name : red victorian bed breakfast | the grand plaza | harbor view inn | the lamplighter lodge | mission bay suites | hotel aurora | the pennycross | seacliff manor | union square lodge | the ivy house | parkside hotel | the gilded swan | casa del sol | the beacon arms | north point inn | wisteria guest house | the admiral hotel | stonebridge suites | the velvet fox | bayview terrace | the quiet owl
value type : hotel | place to stay
value pricerange : cheap | moderate | expensive
value price : 59 dollars | 85 dollars | 110 dollars | 149 dollars | 210 dollars
value phone : 4152223344 | 4156667788 | 4154445566 | 4159990011 | 4153332211
value address : 788 market street | 15 lombard court | 402 bush avenue | 91 embarcadero walk | 300 van ness row
value postcode : 94103 | 94108 | 94111 | 94117 | 94123
value area : cathedral hill | north beach | nob hill | hayes valley | russian hill | pacific heights | chinatown
value near : haight | union square | the opera house | golden gate park | lower pacific heights | the civic center | moscone center | alamo square
value count : 2 | 3 | 4 | 6 | 8 | 11 | 17 | 29 | 54 | 182
tmpl inform : {name} is a (nice|great|good) {type}[ in the {area} area][ and it (has|offers) internet {hasinternet=yes}] .
tmpl inform : {name} is a (nice|lovely) hotel[ near {near}][ in the {pricerange} price range] .
tmpl inform : {name} (accepts|takes) credit cards {acceptscards=yes}[ and (has|offers) internet {hasinternet=yes}] .
tmpl inform : {name} does not (accept|take) credit cards {acceptscards=no}[ but it does (have|offer) internet {hasinternet=yes}] .
tmpl inform : {name} (allows|welcomes) dogs {dogsallowed=yes}[ and is in the {area} area] .
tmpl inform : {name} does not (allow|welcome) dogs {dogsallowed=no}[ but is near {near}] .
tmpl inform : {name} is (located|situated) at {address}[ in the {area} area] .
tmpl inform : the phone number of {name} is {phone}[ and its postcode is {postcode}] .
tmpl inform : {name} is in the {pricerange} price range[ and (has|offers) internet {hasinternet=yes}] .
tmpl inform : there are {count} (hotels|places)[ in the {area} area][ in the {pricerange} price range] .
tmpl inform : there are {count} hotels if you do not care (whether dogs are allowed|if they allow dogs) {dogsallowed=dontcare} .
tmpl inform : there are {count} hotels if (internet|having internet) does not matter {hasinternet=dontcare} .
tmpl inform : there are {count} places[ near {near}] if the (area|location) does not matter {area=dontcare} .
tmpl inform : a (night|room) at {name} costs about {price}[ in the {area} area] .
tmpl inform : {name} is near {near}[ and (accepts|takes) credit cards {acceptscards=yes}] .
tmpl inform : {name} has no internet {hasinternet=no}[ but the price range is {pricerange}] .
tmpl inform : the postcode of {name} is {postcode}[ and the phone number is {phone}] .
tmpl inform : {name} is a {pricerange} {type}[ near {near}] .
tmpl inform_only : {name} is the only (hotel|place)[ near {near}] (that accepts|accepting) credit cards {acceptscards=yes}[ with internet {hasinternet=yes}] .
tmpl inform_only : there is no place other than {name}[ in the {pricerange} price range][ in the {area} area] .
tmpl inform_only : (i am sorry but|i apologize ,) {name} is the only {pricerange} hotel near {near} .
tmpl inform_only : {name} is the only hotel (that allows|allowing) dogs {dogsallowed=yes}[ in the {area} area] .
tmpl reject : there are no (hotels|places)[ in the {area} area][ in the {pricerange} price range] .
tmpl reject : (i am sorry but|unfortunately) there is nothing near {near}[ with internet {hasinternet=yes}] .
tmpl reject : no (hotels|places) that (allow|welcome) dogs {dogsallowed=yes} could be found[ in {area}] .
tmpl confirm : (did you say|you are looking for) (a place|somewhere) in the {area} area ?
tmpl confirm : (did you say|you mean) in the {pricerange} price range ?
tmpl confirm : (so|just to confirm ,) you (want|need) a hotel (that allows|allowing) dogs {dogsallowed=yes} ?
tmpl confirm : you (want|need) (a place|somewhere) with internet {hasinternet=yes} , (correct|right) ?
tmpl confirm : you do not care about the (area|location) {area=dontcare} , (correct|right) ?
tmpl confirm : (so|just to check ,) you want something near {near} ?
tmpl select : would you (prefer|like) {name} or (another|a different) (place|hotel) ?
tmpl select : (which area would you prefer|what part of town do you want) {area=req} ?
tmpl request : (what|which) (area|part of town) (are you looking for|would you like) {area=req} ?
tmpl request : (what is|whereabouts is) the (price range|budget) (you want|you are looking for) {pricerange=req} ?
tmpl request : (do you need|should the hotel have) internet (access|available) {hasinternet=req} ?
tmpl request : (do you need|would you like) (a place|somewhere) (that allows|that welcomes) dogs {dogsallowed=req} ?
tmpl request : (does the place need to|should it) (accept|take) credit cards {acceptscards=req} ?
tmpl reqmore : (is there anything else i can help you with|can i help you with anything else|would you like anything else) ?
tmpl reqmore : (do you need anything else|what else can i do for you) ?
tmpl goodbye : (thank you|thank you for using this system) , goodbye .
tmpl goodbye : (goodbye .|have a nice day .|enjoy your stay , goodbye .)
)";
  }
  throw InputError("unknown preset domain '" + domain + "'");
}

inline TemplateSet preset_templates(const std::string& domain,
                                    const da::Ontology& ont) {
  return parse_templates(preset_template_text(domain), ont);
}

}  // namespace sclstm::synth
