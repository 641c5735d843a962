#include "evobench/types.hpp"

#include <cctype>

#include "evobench/errors.hpp"

namespace evobench {

NodeId NodeId::parse(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
    throw ParseError("node id", "expected \"Database.attribute\", got \"" + text + "\"");
  }
  return NodeId{text.substr(0, dot), text.substr(dot + 1)};
}

std::string ValueType::str() const {
  std::string base;
  switch (kind) {
    case ValueKind::String: base = "str"; break;
    case ValueKind::Integer: base = "int"; break;
    case ValueKind::Float: base = "float"; break;
    case ValueKind::Boolean: base = "bool"; break;
    case ValueKind::StringList: base = "List[str]"; break;
    case ValueKind::Object: base = "Dict[str, Any]"; break;
  }
  return nullable ? "Optional[" + base + "]" : base;
}

ValueType ValueType::parse(const std::string& tag) {
  std::string t = tag;
  bool nullable = false;
  if (t.rfind("Optional[", 0) == 0 && t.back() == ']') {
    nullable = true;
    t = t.substr(9, t.size() - 10);
  }
  ValueType vt;
  vt.nullable = nullable;
  if (t == "str" || t == "string") vt.kind = ValueKind::String;
  else if (t == "int" || t == "integer") vt.kind = ValueKind::Integer;
  else if (t == "float") vt.kind = ValueKind::Float;
  else if (t == "bool" || t == "boolean") vt.kind = ValueKind::Boolean;
  else if (t == "List[str]" || t == "list[str]") vt.kind = ValueKind::StringList;
  else if (t == "Dict[str, Any]" || t == "dict" || t == "Dict[str,Any]") vt.kind = ValueKind::Object;
  else throw ParseError("value type", "unknown tag \"" + tag + "\"");
  return vt;
}

std::string to_string(ToolKind k) {
  return k == ToolKind::Read ? "READ" : "WRITE";
}

ToolKind parse_tool_kind(const std::string& s) {
  if (s == "READ" || s == "read") return ToolKind::Read;
  if (s == "WRITE" || s == "write") return ToolKind::Write;
  throw ParseError("tool kind", "unknown kind \"" + s + "\"");
}

std::string to_string(Relationship r) {
  switch (r) {
    case Relationship::References: return "references";
    case Relationship::BelongsTo: return "belongs_to";
    case Relationship::Contains: return "contains";
    case Relationship::HasAttribute: return "has_attribute";
    case Relationship::Identifies: return "identifies";
    case Relationship::UsedFor: return "used_for";
    case Relationship::Updates: return "updates";
    case Relationship::Explains: return "explains";
    case Relationship::Aggregates: return "aggregates";
    case Relationship::LinksTo: return "links_to";
  }
  return "references";
}

Relationship parse_relationship(const std::string& s) {
  if (s == "references") return Relationship::References;
  if (s == "belongs_to") return Relationship::BelongsTo;
  if (s == "contains") return Relationship::Contains;
  if (s == "has_attribute") return Relationship::HasAttribute;
  if (s == "identifies") return Relationship::Identifies;
  if (s == "used_for") return Relationship::UsedFor;
  if (s == "updates") return Relationship::Updates;
  if (s == "explains") return Relationship::Explains;
  if (s == "aggregates") return Relationship::Aggregates;
  if (s == "links_to") return Relationship::LinksTo;
  throw ParseError("relationship", "unknown type \"" + s + "\"");
}

std::string to_string(Cardinality c) {
  switch (c) {
    case Cardinality::OneToOne: return "one-to-one";
    case Cardinality::OneToMany: return "one-to-many";
    case Cardinality::ManyToOne: return "many-to-one";
    case Cardinality::ManyToMany: return "many-to-many";
  }
  return "one-to-many";
}

Cardinality parse_cardinality(const std::string& s) {
  if (s == "one-to-one") return Cardinality::OneToOne;
  if (s == "one-to-many") return Cardinality::OneToMany;
  if (s == "many-to-one") return Cardinality::ManyToOne;
  if (s == "many-to-many") return Cardinality::ManyToMany;
  throw ParseError("cardinality", "unknown cardinality \"" + s + "\"");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Completion: return "completion";
    case Strategy::Saturation: return "saturation";
    case Strategy::Deprecation: return "deprecation";
  }
  return "completion";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "completion") return Strategy::Completion;
  if (s == "saturation") return Strategy::Saturation;
  if (s == "deprecation") return Strategy::Deprecation;
  throw ParseError("strategy", "unknown strategy \"" + s + "\"");
}

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "easy";
}

Difficulty parse_difficulty(const std::string& s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  throw ParseError("difficulty", "unknown difficulty \"" + s + "\"");
}

std::string snake_case(const std::string& pascal) {
  std::string out;
  for (std::size_t i = 0; i < pascal.size(); ++i) {
    char c = pascal[i];
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (i > 0) out.push_back('_');
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace evobench
