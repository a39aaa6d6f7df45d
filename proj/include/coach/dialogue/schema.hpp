#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coach::dialogue {

struct AgentSay {
    std::string text;
    bool operator==(const AgentSay&) const = default;
};

struct AgentAsk {
    std::string question_id;
    std::string text;
    std::string key;
    bool operator==(const AgentAsk&) const = default;
};

struct ExpectUser {
    std::string key;
    bool operator==(const ExpectUser&) const = default;
};

/// Subschema guard: an uppercase feature tag present in the last user turn, or a
/// lowercase context key under which the last user turn produced a statement gist.
struct Guard {
    enum class Kind { tag, gist_key };
    Kind kind = Kind::tag;
    std::string value;

    static Guard parse(std::string_view token);
    bool operator==(const Guard&) const = default;
};

struct InsertSubschema {
    std::string schema_id;
    Guard guard;
    bool operator==(const InsertSubschema&) const = default;
};

using SchemaEvent = std::variant<AgentSay, AgentAsk, ExpectUser, InsertSubschema>;

struct Schema {
    std::string id;
    std::string topic;
    std::string category;
    std::vector<SchemaEvent> events;
};

/// Set of schemas with cross references resolved and checked for cycles.
class SchemaLibrary {
public:
    /// Adds a schema after its own structural checks (dangling asks).
    void insert(Schema schema);
    /// Throws on unresolved subschema ids or a subschema reference cycle.
    void validate() const;

    const Schema* find(std::string_view id) const;
    const Schema* find_topic(std::string_view topic) const;
    const std::map<std::string, Schema, std::less<>>& schemas() const { return schemas_; }
    bool empty() const { return schemas_.empty(); }

private:
    std::map<std::string, Schema, std::less<>> schemas_;
};

/// Parses one or more `schema <id>` blocks:
///   topic: <label>          category: <name>
///   say: <text>             ask <key>: <text>
///   expect <key>            sub <schema-id> if <TAG|gist-key>
std::vector<Schema> parse_schemas(std::string_view source);

/// Parses and validates a self-contained schema source.
SchemaLibrary load_schemas(std::string_view source);
/// Loads every `*.schema` file in a directory (sorted by name) into one library.
SchemaLibrary load_schema_dir(const std::string& dir);

}  // namespace coach::dialogue
