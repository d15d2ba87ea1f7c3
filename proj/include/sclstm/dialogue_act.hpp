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

// Dialogue acts: the DA string grammar, the canonical form used for
// grouping, and the binary feature-vector encoding that conditions the
// generator.

#pragma once

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sclstm/error.hpp"
#include "sclstm/numkit.hpp"
#include "sclstm/ontology.hpp"

namespace sclstm::da {

enum class ValueKind { categorical, dontcare, yes, no, requested };

struct SlotValue {
  ValueKind kind = ValueKind::categorical;
  std::string text;  // set only for categorical

  static SlotValue categorical(std::string v) {
    return SlotValue{ValueKind::categorical, std::move(v)};
  }
  static SlotValue dontcare() { return SlotValue{ValueKind::dontcare, {}}; }
  static SlotValue yes() { return SlotValue{ValueKind::yes, {}}; }
  static SlotValue no() { return SlotValue{ValueKind::no, {}}; }
  static SlotValue requested() { return SlotValue{ValueKind::requested, {}}; }

  bool operator==(const SlotValue& o) const {
    return kind == o.kind && text == o.text;
  }
};

struct DialogueAct {
  std::string act_type;
  std::vector<std::pair<std::string, SlotValue>> bindings;

  const SlotValue* find(const std::string& slot) const {
    for (const auto& [name, v] : bindings)
      if (name == slot) return &v;
    return nullptr;
  }
  bool operator==(const DialogueAct& o) const {
    return act_type == o.act_type && bindings == o.bindings;
  }
};

namespace detail {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  std::string ident() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    return s.substr(start, i - start);
  }
};

inline ValueKind special_kind(const std::string& v, bool* is_special) {
  *is_special = true;
  if (v == "yes") return ValueKind::yes;
  if (v == "no") return ValueKind::no;
  if (v == "dontcare" || v == "dont_care") return ValueKind::dontcare;
  *is_special = false;
  return ValueKind::categorical;
}

}  // namespace detail

// Grammar: ACT '(' [SLOT ('=' VALUE)? (',' SLOT ('=' VALUE)?)*] ')'
// VALUE is a double-quoted string, or bare yes/no/dontcare. Duplicate
// slots are merged (first binding wins). Whitespace-insensitive.
inline DialogueAct parse_da(const std::string& text, const Ontology& ont) {
  detail::Cursor c{text};
  DialogueAct out;
  out.act_type = c.ident();
  if (out.act_type.empty())
    throw ParseError("expected act type", c.i);
  if (ont.find_act(out.act_type) < 0)
    throw ParseError("unknown act type '" + out.act_type + "'", 0);
  if (!c.eat('('))
    throw ParseError("expected '(' after act type", c.i);
  if (!c.eat(')')) {
    while (true) {
      const std::size_t slot_at = (c.skip_ws(), c.i);
      std::string slot = c.ident();
      if (slot.empty())
        throw ParseError("expected slot name", c.i);
      int si = ont.find_slot(slot);
      if (si < 0)
        throw ParseError("unknown slot '" + slot + "'", slot_at);
      const SlotDef& def = ont.slots[static_cast<std::size_t>(si)];

      SlotValue value = SlotValue::requested();
      if (c.eat('=')) {
        c.skip_ws();
        const std::size_t val_at = c.i;
        std::string raw;
        bool quoted = false;
        if (c.i < text.size() && text[c.i] == '"') {
          quoted = true;
          ++c.i;
          std::size_t start = c.i;
          while (c.i < text.size() && text[c.i] != '"') ++c.i;
          if (c.i >= text.size())
            throw ParseError("unterminated quoted value", val_at);
          raw = text.substr(start, c.i - start);
          ++c.i;
        } else {
          raw = c.ident();
          if (raw.empty())
            throw ParseError("expected value after '='", c.i);
        }
        bool special = false;
        ValueKind kind = detail::special_kind(raw, &special);
        if (def.kind == SlotKind::binary) {
          if (!special)
            throw ParseError("binary slot '" + slot +
                                 "' takes yes/no/dontcare, got '" + raw + "'",
                             val_at);
          if (kind == ValueKind::dontcare && !def.allows_dontcare)
            throw ParseError("slot '" + slot + "' does not take dontcare",
                             val_at);
          value = SlotValue{kind, {}};
        } else if (special && kind == ValueKind::dontcare) {
          if (!def.allows_dontcare)
            throw ParseError("slot '" + slot + "' does not take dontcare",
                             val_at);
          value = SlotValue::dontcare();
        } else {
          // Quoted yes/no on a categorical slot stays a literal value.
          value = SlotValue::categorical(raw);
          (void)quoted;
        }
      } else {
        if (out.act_type != "request" && out.act_type != "select")
          throw ParseError("valueless slot '" + slot +
                               "' outside request/select",
                           slot_at);
      }

      if (out.find(slot) == nullptr) out.bindings.emplace_back(slot, value);

      if (c.eat(')')) break;
      if (!c.eat(','))
        throw ParseError("expected ',' or ')'", c.i);
    }
  }
  c.skip_ws();
  if (c.i != text.size())
    throw ParseError("trailing characters after ')'", c.i);
  return out;
}

// Inverse printer. Bindings are emitted in ontology slot order so that
// parse_da(render_da(x)) == canonical(x).
inline std::string render_da(const DialogueAct& act, const Ontology& ont) {
  std::vector<std::pair<std::size_t, const SlotValue*>> ordered;
  for (const auto& [slot, v] : act.bindings)
    ordered.emplace_back(ont.slot_index(slot), &v);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream os;
  os << act.act_type << "(";
  bool first = true;
  for (const auto& [si, v] : ordered) {
    if (!first) os << ",";
    first = false;
    os << ont.slots[si].name;
    switch (v->kind) {
      case ValueKind::categorical: os << "=\"" << v->text << "\""; break;
      case ValueKind::dontcare: os << "=\"dontcare\""; break;
      case ValueKind::yes: os << "=\"yes\""; break;
      case ValueKind::no: os << "=\"no\""; break;
      case ValueKind::requested: break;
    }
  }
  os << ")";
  return os.str();
}

// Canonical DA used for grouping surface forms: act type plus sorted slot
// names with special-value markers; categorical values are erased.
inline std::string canonical_da(const DialogueAct& act) {
  std::vector<std::string> parts;
  for (const auto& [slot, v] : act.bindings) {
    const char* marker = "";
    switch (v.kind) {
      case ValueKind::categorical: marker = ""; break;
      case ValueKind::dontcare: marker = "=dontcare"; break;
      case ValueKind::yes: marker = "=yes"; break;
      case ValueKind::no: marker = "=no"; break;
      case ValueKind::requested: marker = "?"; break;
    }
    parts.push_back(slot + marker);
  }
  std::sort(parts.begin(), parts.end());
  std::string out = act.act_type;
  for (const auto& p : parts) out += "|" + p;
  return out;
}

// Per-slot feature layout inside the DA vector.
inline constexpr std::size_t kSlotFeatures = 5;  // mentioned/dontcare/yes/no/requested

inline std::size_t da_vector_dim(const Ontology& ont) {
  return ont.act_types.size() + kSlotFeatures * ont.slots.size();
}

// Index of slot s's "mentioned" bit; the special-value bits follow it.
inline std::size_t slot_feature_base(const Ontology& ont, std::size_t slot) {
  return ont.act_types.size() + kSlotFeatures * slot;
}

// Binary control vector d0: one-hot act block, then per slot
// [mentioned, dontcare, yes, no, requested].
inline num::Vec encode_da(const DialogueAct& act, const Ontology& ont) {
  num::Vec d(da_vector_dim(ont), 0.0);
  d[ont.act_index(act.act_type)] = 1.0;
  for (const auto& [slot, v] : act.bindings) {
    const std::size_t base = slot_feature_base(ont, ont.slot_index(slot));
    d[base] = 1.0;  // mentioned
    switch (v.kind) {
      case ValueKind::categorical: break;
      case ValueKind::dontcare: d[base + 1] = 1.0; break;
      case ValueKind::yes: d[base + 2] = 1.0; break;
      case ValueKind::no: d[base + 3] = 1.0; break;
      case ValueKind::requested: d[base + 4] = 1.0; break;
    }
  }
  return d;
}

}  // namespace sclstm::da
