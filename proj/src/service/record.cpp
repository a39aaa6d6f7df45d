#include "coach/service/record.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "coach/error.hpp"

namespace coach::service {

namespace fs = std::filesystem;

FileSink::FileSink(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw Error(Errc::io_error, "cannot open record file '" + path + "'");
}

void FileSink::append(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw Error(Errc::io_error, "record write failed");
}

RecordStore::RecordStore(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error(Errc::io_error, "cannot create data directory '" + dir_ + "'");
}

std::string RecordStore::path_for(const std::string& id) const {
    if (id.empty() || id.find_first_of("/\\") != std::string::npos || id.front() == '.')
        throw Error(Errc::unknown_session, "invalid session id '" + id + "'");
    return (fs::path(dir_) / (id + ".jsonl")).string();
}

bool RecordStore::exists(const std::string& id) const { return fs::exists(path_for(id)); }

std::unique_ptr<RecordSink> RecordStore::open(const std::string& id) const { return std::make_unique<FileSink>(path_for(id)); }

std::vector<std::string> RecordStore::read_lines(const std::string& id) const {
    std::ifstream in(path_for(id));
    if (!in) throw Error(Errc::unknown_session, "no record for session '" + id + "' in " + dir_);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> RecordStore::list() const {
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir_))
        if (e.path().extension() == ".jsonl") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string data_dir_from_env() {
    const char* v = std::getenv(kDataDirEnv);
    return v && *v ? v : "coach-data";
}

std::string header_line(const std::string& id, const SessionConfig& config) {
    return json{{"record", "coach-session"}, {"version", 1}, {"session", id}, {"config", to_json(config)}}.dump();
}

std::string input_line(const ClientMessage& msg) { return json{{"in", to_json(msg)}}.dump(); }
std::string output_line(const ServerMessage& msg) { return json{{"out", to_json(msg)}}.dump(); }

SessionRecord parse_record(const std::vector<std::string>& lines) {
    if (lines.empty()) throw Error(Errc::parse_error, "empty session record");
    SessionRecord r;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            throw Error(Errc::parse_error, "record line " + std::to_string(i + 1) + ": " + e.what());
        }
        try {
            if (i == 0) {
                if (j.value("record", "") != "coach-session") throw Error(Errc::parse_error, "not a session record");
                r.id = j.at("session").get<std::string>();
                r.config = config_from_json(j.at("config"));
            } else if (j.contains("in")) {
                r.inputs.push_back(parse_client_message(j["in"]));
            } else if (j.contains("out")) {
                r.outputs.push_back(parse_server_message(j["out"]));
            } else {
                throw Error(Errc::parse_error, "unknown record entry");
            }
        } catch (const Error& e) {
            throw Error(Errc::parse_error, "record line " + std::to_string(i + 1) + ": " + e.what());
        } catch (const json::exception& e) {
            throw Error(Errc::parse_error, "record line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return r;
}

std::vector<TranscriptEntry> SessionRecord::transcript() const {
    // Inputs and outputs interleave in the file; rebuild the spoken order by time.
    std::vector<TranscriptEntry> out;
    for (const auto& in : inputs)
        if (const auto* u = std::get_if<UserTurnMsg>(&in)) out.push_back({TranscriptEntry::Speaker::user, u->text, u->t_ms, {}});
    for (const auto& o : outputs)
        if (const auto* a = std::get_if<dialogue::AgentTurn>(&o.payload))
            out.push_back({TranscriptEntry::Speaker::agent, a->text, a->t_ms, a->provenance});
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; });
    return out;
}

std::vector<feedback::FeatureFrame> SessionRecord::frames() const {
    std::vector<feedback::FeatureFrame> out;
    for (const auto& in : inputs)
        if (const auto* f = std::get_if<FrameMsg>(&in)) out.push_back(f->frame);
    return out;
}

std::vector<feedback::FeedbackEvent> SessionRecord::events() const {
    std::vector<feedback::FeedbackEvent> out;
    for (const auto& o : outputs)
        if (const auto* e = std::get_if<feedback::FeedbackEvent>(&o.payload)) out.push_back(*e);
    return out;
}

std::optional<SummaryMsg> SessionRecord::summary() const {
    for (auto it = outputs.rbegin(); it != outputs.rend(); ++it)
        if (const auto* s = std::get_if<SummaryMsg>(&it->payload)) return *s;
    return std::nullopt;
}

}  // namespace coach::service
