#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coach/service/config.hpp"
#include "coach/service/wire.hpp"

namespace coach::service {

/// Append-only destination for a session's record lines.
class RecordSink {
public:
    virtual ~RecordSink() = default;
    virtual void append(const std::string& line) = 0;
};

class MemorySink : public RecordSink {
public:
    void append(const std::string& line) override { lines.push_back(line); }
    std::vector<std::string> lines;
};

class FileSink : public RecordSink {
public:
    explicit FileSink(const std::string& path);
    void append(const std::string& line) override;

private:
    std::ofstream out_;
};

/// One `<id>.jsonl` file per session under a data directory.
class RecordStore {
public:
    explicit RecordStore(std::string dir);

    const std::string& dir() const { return dir_; }
    std::string path_for(const std::string& session_id) const;
    bool exists(const std::string& session_id) const;
    std::unique_ptr<RecordSink> open(const std::string& session_id) const;
    /// Throws Errc::unknown_session when no record exists.
    std::vector<std::string> read_lines(const std::string& session_id) const;
    std::vector<std::string> list() const;

private:
    std::string dir_;
};

/// `COACH_DATA_DIR`, or `coach-data` in the working directory.
std::string data_dir_from_env();
inline constexpr const char* kDataDirEnv = "COACH_DATA_DIR";

std::string header_line(const std::string& session_id, const SessionConfig& config);
std::string input_line(const ClientMessage& msg);
std::string output_line(const ServerMessage& msg);

struct TranscriptEntry {
    enum class Speaker { user, agent };
    Speaker speaker = Speaker::user;
    std::string text;
    std::int64_t t_ms = 0;
    std::optional<dialogue::AgentTurn::Provenance> provenance;
};

/// A parsed record: the inputs needed for replay plus the derived views.
struct SessionRecord {
    std::string id;
    SessionConfig config;
    std::vector<ClientMessage> inputs;
    std::vector<ServerMessage> outputs;

    std::vector<TranscriptEntry> transcript() const;
    std::vector<feedback::FeatureFrame> frames() const;
    std::vector<feedback::FeedbackEvent> events() const;
    std::optional<SummaryMsg> summary() const;
};

/// Throws Errc::parse_error on a damaged record.
SessionRecord parse_record(const std::vector<std::string>& lines);

}  // namespace coach::service
