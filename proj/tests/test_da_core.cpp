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

#include <fstream>
#include <set>
#include <sstream>

#include "sclstm/delex.hpp"
#include "sclstm/dialogue_act.hpp"
#include "sclstm/ontology.hpp"

using namespace sclstm;

namespace {

da::DialogueAct random_da(const da::Ontology& ont, num::Rng& rng) {
  da::DialogueAct act;
  act.act_type = ont.act_types[rng.uniform_index(ont.act_types.size())];
  const bool requesty = act.act_type == "request" || act.act_type == "select";
  const std::size_t n_slots = rng.uniform_index(4);
  for (std::size_t k = 0; k < n_slots; ++k) {
    const auto& def = ont.slots[rng.uniform_index(ont.slots.size())];
    if (act.find(def.name)) continue;
    da::SlotValue v;
    const double roll = rng.uniform01();
    if (requesty && roll < 0.4) {
      v = da::SlotValue::requested();
    } else if (def.kind == da::SlotKind::binary) {
      if (roll < 0.4)
        v = da::SlotValue::yes();
      else if (roll < 0.8)
        v = da::SlotValue::no();
      else if (def.allows_dontcare)
        v = da::SlotValue::dontcare();
      else
        v = da::SlotValue::yes();
    } else if (def.allows_dontcare && roll < 0.3) {
      v = da::SlotValue::dontcare();
    } else {
      v = da::SlotValue::categorical("v" + std::to_string(rng.uniform_index(50)));
    }
    act.bindings.emplace_back(def.name, v);
  }
  return act;
}

}  // namespace

TEST_CASE("ontology presets match the two venue domains") {
  auto rest = da::preset_ontology("restaurant");
  auto hotel = da::preset_ontology("hotel");

  const std::vector<std::string> acts = {"inform",  "inform_only", "reject",
                                         "confirm", "select",      "request",
                                         "reqmore", "goodbye"};
  CHECK(rest.act_types == acts);
  CHECK(hotel.act_types == acts);

  const std::vector<std::string> shared = {"name",    "type", "pricerange",
                                           "price",   "phone", "address",
                                           "postcode", "area", "near"};
  for (const auto& s : shared) {
    CHECK(rest.find_slot(s) >= 0);
    CHECK(hotel.find_slot(s) >= 0);
  }
  for (const auto& s : {"food", "goodformeal", "kidsallowed"})
    CHECK(rest.find_slot(s) >= 0);
  for (const auto& s : {"hasinternet", "acceptscards", "dogsallowed"})
    CHECK(hotel.find_slot(s) >= 0);
  // the categorical result-count slot rides along in both presets
  CHECK(rest.slots.size() == 13);
  CHECK(hotel.slots.size() == 13);

  CHECK(rest.slots[rest.slot_index("kidsallowed")].kind ==
        da::SlotKind::binary);
  CHECK(rest.slots[rest.slot_index("kidsallowed")].allows_dontcare);
  CHECK(rest.slots[rest.slot_index("food")].kind == da::SlotKind::categorical);
  CHECK(rest.slots[rest.slot_index("name")].allows_dontcare == false);
  for (const auto& s : {"hasinternet", "acceptscards", "dogsallowed"}) {
    CHECK(hotel.slots[hotel.slot_index(s)].kind == da::SlotKind::binary);
    CHECK(hotel.slots[hotel.slot_index(s)].allows_dontcare);
  }
}

TEST_CASE("ontology data files carry the embedded presets") {
  for (const std::string domain : {"restaurant", "hotel"}) {
    std::ifstream is(std::string(SCLSTM_DATA_DIR) + "/" + domain +
                     ".ontology");
    REQUIRE(is);
    std::ostringstream buf;
    buf << is.rdbuf();
    CHECK(buf.str() == da::preset_ontology_text(domain));
  }
}

TEST_CASE("parse_da handles quoted values, specials, and empty lists") {
  auto hotel = da::preset_ontology("hotel");
  auto act = da::parse_da(
      "inform(type=\"hotel\",count=\"182\",dogsallowed=\"dontcare\")", hotel);
  CHECK(act.act_type == "inform");
  REQUIRE(act.bindings.size() == 3);
  CHECK(act.bindings[0].first == "type");
  CHECK(act.bindings[0].second.kind == da::ValueKind::categorical);
  CHECK(act.bindings[0].second.text == "hotel");
  CHECK(act.bindings[1].first == "count");
  CHECK(act.bindings[1].second.text == "182");
  CHECK(act.bindings[2].first == "dogsallowed");
  CHECK(act.bindings[2].second.kind == da::ValueKind::dontcare);

  auto bye = da::parse_da("goodbye()", hotel);
  CHECK(bye.act_type == "goodbye");
  CHECK(bye.bindings.empty());

  auto rest = da::preset_ontology("restaurant");
  auto merged =
      da::parse_da("inform(area=\"north beach\", area=\"north beach\")", rest);
  REQUIRE(merged.bindings.size() == 1);
  CHECK(merged.bindings[0].first == "area");

  // whitespace insensitivity and bare specials
  auto spaced = da::parse_da("  confirm ( kidsallowed = yes )  ", rest);
  CHECK(spaced.bindings[0].second.kind == da::ValueKind::yes);

  auto req = da::parse_da("request(area)", rest);
  CHECK(req.bindings[0].second.kind == da::ValueKind::requested);
}

TEST_CASE("parse_da reports errors with byte offsets") {
  auto ont = da::preset_ontology("restaurant");
  CHECK_THROWS_AS(da::parse_da("shout(name=\"x\")", ont), ParseError);
  CHECK_THROWS_AS(da::parse_da("inform(shoesize=\"9\")", ont), ParseError);
  CHECK_THROWS_AS(da::parse_da("inform(name=\"x\"", ont), ParseError);
  CHECK_THROWS_AS(da::parse_da("inform(name)", ont), ParseError);
  CHECK_THROWS_AS(da::parse_da("inform(kidsallowed=\"maybe\")", ont),
                  ParseError);
  CHECK_THROWS_AS(da::parse_da("inform(name=\"dontcare\")", ont), ParseError);

  try {
    da::parse_da("inform(shoesize=\"9\")", ont);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);  // 's' of shoesize
  }
}

TEST_CASE("encode_da layout") {
  auto ont = da::preset_ontology("hotel");
  const std::size_t dim = da::da_vector_dim(ont);
  CHECK(dim == 8 + 5 * 13);

  auto bye = da::encode_da(da::parse_da("goodbye()", ont), ont);
  double sum = 0;
  for (double v : bye) sum += v;
  CHECK(sum == 1.0);
  CHECK(bye[ont.act_index("goodbye")] == 1.0);

  auto one = da::encode_da(da::parse_da("inform(name=\"x\")", ont), ont);
  CHECK(one[ont.act_index("inform")] == 1.0);
  CHECK(one[da::slot_feature_base(ont, ont.slot_index("name"))] == 1.0);
  double total = 0;
  for (double v : one) total += v;
  CHECK(total == 2.0);

  auto net = da::encode_da(da::parse_da("inform(hasinternet=\"yes\")", ont),
                           ont);
  const std::size_t base =
      da::slot_feature_base(ont, ont.slot_index("hasinternet"));
  CHECK(net[base] == 1.0);      // mentioned
  CHECK(net[base + 2] == 1.0);  // yes
  double t2 = 0;
  for (double v : net) t2 += v;
  CHECK(t2 == 3.0);
}

TEST_CASE("encode_da is binary with one act bit and injective on canonicals") {
  auto ont = da::preset_ontology("restaurant");
  num::Rng rng(17);
  std::map<std::string, num::Vec> seen;
  for (int trial = 0; trial < 500; ++trial) {
    auto act = random_da(ont, rng);
    auto d = da::encode_da(act, ont);
    double act_bits = 0;
    for (std::size_t i = 0; i < ont.act_types.size(); ++i) act_bits += d[i];
    CHECK(act_bits == 1.0);
    for (double v : d) CHECK((v == 0.0 || v == 1.0));

    const std::string canon = da::canonical_da(act);
    auto it = seen.find(canon);
    if (it != seen.end()) {
      CHECK(it->second == d);
    } else {
      for (const auto& [other_canon, other_d] : seen)
        if (other_d == d) FAIL("distinct canonical DAs share a vector");
      seen[canon] = d;
    }
  }
}

TEST_CASE("parse_da after render_da is the identity on canonical form") {
  auto ont = da::preset_ontology("hotel");
  num::Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    auto act = random_da(ont, rng);
    const std::string rendered = da::render_da(act, ont);
    auto back = da::parse_da(rendered, ont);
    CHECK(da::render_da(back, ont) == rendered);
    CHECK(da::canonical_da(back) == da::canonical_da(act));
  }
}

TEST_CASE("delexicalise replaces exact value occurrences") {
  auto ont = da::preset_ontology("restaurant");
  auto act = da::parse_da(
      "inform(name=\"red door cafe\",area=\"cathedral hill\")", ont);
  auto u = da::delexicalise("red door cafe is in cathedral hill", act, ont);
  CHECK(u.tokens == std::vector<std::string>{"BOS", "SLOT_NAME", "is", "in",
                                             "SLOT_AREA", "EOS"});

  auto noslots = da::parse_da("goodbye()", ont);
  auto u2 = da::delexicalise("thank you , goodbye .", noslots, ont);
  CHECK(u2.tokens == std::vector<std::string>{"BOS", "thank", "you", ",",
                                              "goodbye", ".", "EOS"});
}

TEST_CASE("delexicalise matches the longest value first") {
  auto ont = da::preset_ontology("restaurant");
  auto act = da::parse_da(
      "inform_only(name=\"dosa on fillmore and kiss seafood\","
      "pricerange=\"expensive\",near=\"lower pacific heights\")",
      ont);
  auto u = da::delexicalise(
      "dosa on fillmore and kiss seafood is the only expensive restaurant "
      "near lower pacific heights .",
      act, ont);
  CHECK(u.tokens ==
        std::vector<std::string>{"BOS", "SLOT_NAME", "is", "the", "only",
                                 "SLOT_PRICERANGE", "restaurant", "near",
                                 "SLOT_NEAR", ".", "EOS"});
}

TEST_CASE("delexicalise leaves binary and dontcare values lexical") {
  auto ont = da::preset_ontology("hotel");
  auto act = da::parse_da(
      "inform(count=\"182\",dogsallowed=\"dontcare\")", ont);
  std::vector<std::string> warnings;
  auto u = da::delexicalise(
      "there are 182 hotels if you do not care whether dogs are allowed .",
      act, ont, &warnings);
  CHECK(warnings.empty());
  bool has_count = false;
  for (const auto& t : u.tokens) {
    CHECK(t != "SLOT_DOGSALLOWED");
    has_count = has_count || t == "SLOT_COUNT";
  }
  CHECK(has_count);
}

TEST_CASE("delexicalise reports unmatched values") {
  auto ont = da::preset_ontology("restaurant");
  auto act = da::parse_da("inform(name=\"casa lucia\")", ont);
  std::vector<std::string> warnings;
  auto u = da::delexicalise("this place is great .", act, ont, &warnings);
  REQUIRE(warnings.size() == 1);
  for (const auto& t : u.tokens) CHECK(!da::is_slot_token(t));
}

TEST_CASE("lexicalise substitutes values and reports redundant tokens") {
  auto ont = da::preset_ontology("restaurant");
  auto act = da::parse_da("inform(name=\"red door cafe\")", ont);
  da::DelexUtterance u;
  u.tokens = {"BOS", "SLOT_NAME", "is", "good", ".", "EOS"};
  CHECK(da::lexicalise(u, act) == "red door cafe is good .");

  da::DelexUtterance plain;
  plain.tokens = {"BOS", "hello", "there", "EOS"};
  CHECK(da::lexicalise(plain, act) == "hello there");

  da::DelexUtterance stray;
  stray.tokens = {"BOS", "SLOT_NAME", "is", "in", "SLOT_AREA", "EOS"};
  std::vector<std::string> redundant;
  da::lexicalise(stray, act, &redundant);
  REQUIRE(redundant.size() == 1);
  CHECK(redundant[0] == "area");
}

TEST_CASE("delexicalise then lexicalise round trips") {
  auto ont = da::preset_ontology("restaurant");
  const std::vector<std::pair<std::string, std::string>> corpus = {
      {"inform(name=\"red door cafe\",goodformeal=\"breakfast\","
       "area=\"cathedral hill\",kidsallowed=\"no\")",
       "red door cafe is a good restaurant for breakfast in the area of "
       "cathedral hill and does not allow children ."},
      {"inform(name=\"casa lucia\",food=\"thai\")",
       "casa lucia serves thai food ."},
      {"request(area)", "what area are you looking for ?"},
      {"goodbye()", "thank you , goodbye ."},
  };
  for (const auto& [da_str, text] : corpus) {
    auto act = da::parse_da(da_str, ont);
    auto u = da::delexicalise(text, act, ont);
    CHECK(da::lexicalise(u, act) == text);
  }
}

TEST_CASE("delexicalise only emits tokens for slots in the DA") {
  auto ont = da::preset_ontology("restaurant");
  num::Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto act = random_da(ont, rng);
    std::string text = "some venue serves v" +
                       std::to_string(rng.uniform_index(50)) + " food in v" +
                       std::to_string(rng.uniform_index(50)) + " town .";
    auto u = da::delexicalise(text, act, ont);
    for (const auto& t : u.tokens) {
      if (!da::is_slot_token(t)) continue;
      const auto* v = act.find(da::slot_of_token(t));
      REQUIRE(v != nullptr);
      CHECK(v->kind == da::ValueKind::categorical);
    }
  }
}

TEST_CASE("group_references groups by canonical DA") {
  auto ont = da::preset_ontology("restaurant");
  std::vector<da::CorpusEntry> corpus;
  auto add = [&](const std::string& das, const std::string& text) {
    da::CorpusEntry e;
    e.da_string = das;
    e.text = text;
    e.act = da::parse_da(das, ont);
    e.delex = da::delexicalise(text, e.act, ont);
    corpus.push_back(e);
  };
  add("inform(name=\"casa lucia\",area=\"north beach\")",
      "casa lucia is in north beach .");
  add("inform(name=\"blue fin sushi\",area=\"chinatown\")",
      "blue fin sushi is in chinatown .");
  add("inform(name=\"blue fin sushi\",area=\"chinatown\")",
      "you can find blue fin sushi in chinatown .");

  auto groups = da::group_references(corpus);
  REQUIRE(groups.size() == 1);
  CHECK(groups.begin()->second.size() == 2);  // two distinct delex forms

  CHECK(da::group_references({}).empty());
}

TEST_CASE("heuristic turnoff map points at mentioned bits") {
  auto ont = da::preset_ontology("restaurant");
  std::vector<da::CorpusEntry> corpus;
  da::CorpusEntry e;
  e.act = da::parse_da("inform(name=\"casa lucia\")", ont);
  e.text = "casa lucia is nice .";
  e.delex = da::delexicalise(e.text, e.act, ont);
  corpus.push_back(e);
  auto vocab = da::Vocab::build(corpus);
  auto map = da::heuristic_turnoff_map(vocab, ont);
  REQUIRE(map.size() == vocab.size());
  const std::size_t slot_tok = vocab.id("SLOT_NAME");
  CHECK(map[slot_tok] ==
        static_cast<int>(da::slot_feature_base(ont, ont.slot_index("name"))));
  CHECK(map[vocab.id("is")] == -1);
  CHECK(map[vocab.bos()] == -1);
}

TEST_CASE("corpus files round trip") {
  auto ont = da::preset_ontology("restaurant");
  std::ostringstream os;
  da::save_corpus_line(os, "inform(name=\"casa lucia\")",
                       "casa lucia is nice .");
  da::save_corpus_line(os, "goodbye()", "goodbye .");
  std::istringstream is(os.str());
  auto corpus = da::load_corpus(is, ont);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].act.act_type == "inform");
  CHECK(corpus[0].text == "casa lucia is nice .");
  CHECK(corpus[1].delex.tokens ==
        std::vector<std::string>{"BOS", "goodbye", ".", "EOS"});

  std::istringstream bad("{\"da\": \"inform(\"}\n");
  CHECK_THROWS_AS(da::load_corpus(bad, ont), InputError);
}

TEST_CASE("vocab is deterministic and rejects unknown tokens") {
  auto ont = da::preset_ontology("restaurant");
  std::vector<da::CorpusEntry> corpus(1);
  corpus[0].act = da::parse_da("goodbye()", ont);
  corpus[0].delex.tokens = {"BOS", "bye", "now", "EOS"};
  auto v = da::Vocab::build(corpus);
  CHECK(v.size() == 4);
  CHECK(v.bos() == 0);
  CHECK(v.eos() == 1);
  CHECK(v.id("bye") == 2);  // sorted after BOS/EOS
  CHECK_THROWS_AS(v.id("unseen"), InputError);
  CHECK_THROWS_AS(v.token(99), InputError);
}
