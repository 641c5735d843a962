#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <json.hpp>

namespace evobench {

using Json = nlohmann::json;

/// (database, attribute) pair identifying one schema attribute node.
/// Databases are PascalCase, attributes snake_case. Identity and ordering are
/// lexicographic on the pair, which is what keeps every serialization
/// canonical.
struct NodeId {
  std::string database;
  std::string attribute;

  auto operator<=>(const NodeId&) const = default;

  std::string str() const { return database + "." + attribute; }

  /// Parses "Database.attribute". Throws ParseError otherwise.
  static NodeId parse(const std::string& text);
};

enum class ValueKind : std::uint8_t {
  String,
  Integer,
  Float,
  Boolean,
  StringList,
  Object,
};

/// Semantic type tag for attribute values. `nullable` marks Optional[...]
/// variants.
struct ValueType {
  ValueKind kind = ValueKind::String;
  bool nullable = false;

  auto operator<=>(const ValueType&) const = default;

  /// Python-style tag: "str", "int", "float", "bool", "List[str]",
  /// "Dict[str, Any]", or any of those wrapped in "Optional[...]".
  std::string str() const;
  static ValueType parse(const std::string& tag);
};

enum class ToolKind : std::uint8_t { Read, Write };

enum class Relationship : std::uint8_t {
  References,
  BelongsTo,
  Contains,
  HasAttribute,
  Identifies,
  UsedFor,
  Updates,
  Explains,
  Aggregates,
  LinksTo,
};

enum class Cardinality : std::uint8_t {
  OneToOne,
  OneToMany,
  ManyToOne,
  ManyToMany,
};

enum class Strategy : std::uint8_t { Completion, Saturation, Deprecation };

enum class Difficulty : std::uint8_t { Easy, Medium, Hard };

std::string to_string(ToolKind k);
std::string to_string(Relationship r);
std::string to_string(Cardinality c);
std::string to_string(Strategy s);
std::string to_string(Difficulty d);

ToolKind parse_tool_kind(const std::string& s);
Relationship parse_relationship(const std::string& s);
Cardinality parse_cardinality(const std::string& s);
Strategy parse_strategy(const std::string& s);
Difficulty parse_difficulty(const std::string& s);

/// snake_case rendering of a PascalCase database name ("CartItem" ->
/// "cart_item"). Used for synthetic identifiers and generated tool names.
std::string snake_case(const std::string& pascal);

}  // namespace evobench
