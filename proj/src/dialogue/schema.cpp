#include "coach/dialogue/schema.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::dialogue {

Guard Guard::parse(std::string_view token) {
    Guard g;
    auto t = text::trim(token);
    if (!t.empty() && t.front() == '@') t.remove_prefix(1);
    const bool has_upper = std::any_of(t.begin(), t.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
    const bool has_lower = std::any_of(t.begin(), t.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); });
    if (t.empty()) throw Error(Errc::parse_error, "empty guard");
    if (has_upper && !has_lower) {
        g.kind = Kind::tag;
        g.value = std::string(t);
    } else {
        g.kind = Kind::gist_key;
        g.value = text::to_lower(t);
    }
    return g;
}

void SchemaLibrary::insert(Schema schema) {
    for (std::size_t i = 0; i < schema.events.size(); ++i) {
        const auto* ask = std::get_if<AgentAsk>(&schema.events[i]);
        if (!ask) continue;
        const bool answered = std::any_of(schema.events.begin() + static_cast<std::ptrdiff_t>(i) + 1, schema.events.end(),
                                          [&](const SchemaEvent& e) {
                                              const auto* ex = std::get_if<ExpectUser>(&e);
                                              return ex && ex->key == ask->key;
                                          });
        if (!answered)
            throw Error(Errc::dangling_ask, "schema '" + schema.id + "' asks '" + ask->key + "' with no matching expect");
    }
    if (schemas_.count(schema.id)) throw Error(Errc::parse_error, "schema '" + schema.id + "' defined twice");
    auto id = schema.id;
    schemas_.emplace(std::move(id), std::move(schema));
}

void SchemaLibrary::validate() const {
    for (const auto& [id, schema] : schemas_)
        for (const auto& e : schema.events)
            if (const auto* sub = std::get_if<InsertSubschema>(&e); sub && !schemas_.count(sub->schema_id))
                throw Error(Errc::unresolved_subschema, "schema '" + id + "' references unknown '" + sub->schema_id + "'");

    std::map<std::string_view, int> colour;
    std::vector<std::string_view> stack;
    auto visit = [&](auto&& self, std::string_view id) -> void {
        colour[id] = 1;
        stack.push_back(id);
        for (const auto& e : schemas_.find(id)->second.events) {
            const auto* sub = std::get_if<InsertSubschema>(&e);
            if (!sub) continue;
            const int c = colour[sub->schema_id];
            if (c == 1) {
                std::string chain;
                for (auto it = std::find(stack.begin(), stack.end(), sub->schema_id); it != stack.end(); ++it)
                    chain += std::string(*it) + " -> ";
                throw Error(Errc::schema_cycle, chain + sub->schema_id);
            }
            if (c == 0) self(self, sub->schema_id);
        }
        stack.pop_back();
        colour[id] = 2;
    };
    for (const auto& [id, schema] : schemas_)
        if (colour[id] == 0) visit(visit, id);
}

const Schema* SchemaLibrary::find(std::string_view id) const {
    auto it = schemas_.find(id);
    return it == schemas_.end() ? nullptr : &it->second;
}

const Schema* SchemaLibrary::find_topic(std::string_view topic) const {
    // Subschemas share their parent's topic label; prefer one nobody inserts.
    std::set<std::string_view> inserted;
    for (const auto& [id, schema] : schemas_)
        for (const auto& e : schema.events)
            if (const auto* sub = std::get_if<InsertSubschema>(&e)) inserted.insert(sub->schema_id);
    const Schema* any = nullptr;
    for (const auto& [id, schema] : schemas_) {
        if (schema.topic != topic) continue;
        if (!inserted.count(id)) return &schema;
        if (!any) any = &schema;
    }
    return any;
}

std::vector<Schema> parse_schemas(std::string_view source) {
    std::vector<Schema> out;
    std::istringstream in{std::string(source)};
    std::string raw;
    std::size_t line_no = 0;
    std::map<std::string, int> ask_counts;
    auto fail = [&](const std::string& msg) { throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": " + msg); };
    auto after_colon = [&](std::string_view line) {
        const auto colon = line.find(':');
        if (colon == line.npos) fail("missing ':'");
        return std::string(text::trim(line.substr(colon + 1)));
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;

        if (text::starts_with_word(line, "schema")) {
            auto id = std::string(text::trim(line.substr(6)));
            if (id.empty() || id.find(' ') != id.npos) fail("expected 'schema <id>'");
            out.push_back(Schema{id, id, "", {}});
            ask_counts.clear();
            continue;
        }
        if (out.empty()) fail("event before any 'schema' header");
        auto& schema = out.back();

        if (text::starts_with_word(line, "topic")) {
            schema.topic = after_colon(line);
        } else if (text::starts_with_word(line, "category")) {
            schema.category = after_colon(line);
        } else if (text::starts_with_word(line, "say")) {
            auto t = after_colon(line);
            if (t.empty()) fail("empty say");
            schema.events.emplace_back(AgentSay{std::move(t)});
        } else if (text::starts_with_word(line, "ask")) {
            const auto colon = line.find(':');
            if (colon == line.npos) fail("expected 'ask <key>: <text>'");
            auto key = text::to_lower(text::trim(line.substr(3, colon - 3)));
            auto t = std::string(text::trim(line.substr(colon + 1)));
            if (key.empty() || t.empty()) fail("expected 'ask <key>: <text>'");
            const int n = ++ask_counts[key];
            auto qid = schema.id + "." + key + (n > 1 ? "." + std::to_string(n) : "");
            schema.events.emplace_back(AgentAsk{std::move(qid), std::move(t), std::move(key)});
        } else if (text::starts_with_word(line, "expect")) {
            auto key = text::to_lower(text::trim(line.substr(6)));
            if (key.empty()) fail("expected 'expect <key>'");
            schema.events.emplace_back(ExpectUser{std::move(key)});
        } else if (text::starts_with_word(line, "sub")) {
            std::istringstream ls{std::string(line.substr(3))};
            std::string id, kw, guard;
            ls >> id >> kw >> guard;
            if (id.empty() || kw != "if" || guard.empty()) fail("expected 'sub <schema-id> if <guard>'");
            schema.events.emplace_back(InsertSubschema{id, Guard::parse(guard)});
        } else {
            fail("unknown directive '" + std::string(line) + "'");
        }
    }
    return out;
}

SchemaLibrary load_schemas(std::string_view source) {
    SchemaLibrary lib;
    for (auto& s : parse_schemas(source)) lib.insert(std::move(s));
    lib.validate();
    return lib;
}

SchemaLibrary load_schema_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(Errc::io_error, "schema directory '" + dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".schema") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    SchemaLibrary lib;
    for (const auto& f : files) {
        std::ifstream in(f);
        std::stringstream buf;
        buf << in.rdbuf();
        for (auto& s : parse_schemas(buf.str())) lib.insert(std::move(s));
    }
    lib.validate();
    return lib;
}

}  // namespace coach::dialogue
