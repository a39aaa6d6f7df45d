// coach: command line front end for the practice engine.

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coach/analytics/summary.hpp"
#include "coach/error.hpp"
#include "coach/feedback/synthetic.hpp"
#include "coach/service/record.hpp"
#include "coach/service/server.hpp"
#include "coach/service/session.hpp"
#include "coach/service/simulator.hpp"
#include "coach/trainer/alpha.hpp"
#include "coach/trainer/fit.hpp"
#include "coach/trainer/marks.hpp"

#ifndef COACH_DEFAULT_RULES_DIR
#define COACH_DEFAULT_RULES_DIR "rules"
#endif
#ifndef COACH_DEFAULT_MODEL
#define COACH_DEFAULT_MODEL "models/demo.hmm"
#endif

namespace {

using namespace coach;
using service::json;

std::vector<feedback::FeatureFrame> read_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open feature file '" + path + "'");
    std::vector<feedback::FeatureFrame> frames;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            frames.push_back(service::frame_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw Error(Errc::parse_error, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return frames;
}

service::SessionConfig read_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open config '" + path + "'");
    try {
        return service::config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_config, path + ": " + e.what());
    }
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

void print_agreement(const trainer::AgreementReport& r) {
    for (auto c : feedback::kCues) {
        const auto& a = r.per_cue[feedback::index(c)];
        std::cout << "alpha " << std::left << std::setw(14) << feedback::to_string(c) << (a ? fmt(*a) : "n/a") << '\n';
    }
    std::cout << "alpha " << std::left << std::setw(14) << "pooled" << fmt(r.pooled) << '\n';
    if (r.mean_of_cues) std::cout << "alpha " << std::left << std::setw(14) << "mean-of-cues" << fmt(*r.mean_of_cues) << '\n';
}

void print_summary(const service::SummaryMsg& s, const std::string& id) {
    std::cout << analytics::format_report(s.overall, "Session " + id);
    for (std::size_t i = 0; i < s.segments.size(); ++i)
        std::cout << analytics::format_report(s.segments[i], "Conversation " + std::to_string(i + 1));
}

int cmd_train(const std::vector<std::string>& labels, const std::vector<std::string>& features, const std::string& out,
              std::int64_t bin_ms, int threshold) {
    if (labels.size() != features.size())
        throw Error(Errc::misaligned_lengths, "give one --features file per --labels file");
    std::vector<trainer::LabeledSequence> data;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto frames = read_features(features[i]);
        if (frames.empty()) throw Error(Errc::empty_sequence, features[i] + " has no frames");
        const auto marks = trainer::load_label_file(labels[i]);
        const auto matrix = trainer::bin_marks(marks, bin_ms, frames.back().t_ms + 1);
        std::cout << labels[i] << ": " << matrix.raters.size() << " raters, " << matrix.cues[0].units() << " bins\n";
        print_agreement(trainer::agreement(matrix));
        data.push_back({std::move(frames), trainer::aggregate_labels(matrix, threshold)});
    }
    const auto model = trainer::fit_supervised(data);
    feedback::save_model_file(model, out);
    std::cout << "wrote " << out << '\n';
    return 0;
}

int cmd_alpha(const std::string& labels, std::int64_t bin_ms, std::int64_t span_ms) {
    const auto marks = trainer::load_label_file(labels);
    if (span_ms <= 0)
        for (const auto& m : marks) span_ms = std::max(span_ms, m.end_ms);
    const auto matrix = trainer::bin_marks(marks, bin_ms, span_ms);
    std::cout << matrix.raters.size() << " raters, " << matrix.cues[0].units() << " bins of " << bin_ms << " ms\n";
    print_agreement(trainer::agreement(matrix));
    return 0;
}

int cmd_synth(double minutes, std::uint64_t seed, int raters, const std::string& features_out, const std::string& labels_out,
              const std::string& script) {
    feedback::BehaviorProfile profile;
    if (!script.empty()) profile = service::load_script(script).behavior;
    feedback::SyntheticStream stream(profile, seed);
    const auto span = static_cast<std::int64_t>(minutes * 60000.0);
    std::array<std::vector<std::pair<std::int64_t, std::int64_t>>, feedback::kCueCount> truth;
    std::array<std::optional<std::int64_t>, feedback::kCueCount> open;
    std::ofstream fout(features_out);
    if (!fout) throw Error(Errc::io_error, "cannot write '" + features_out + "'");
    std::int64_t last = 0;
    while (stream.peek_time() < span) {
        const auto f = stream.next();
        fout << service::frame_to_json(f).dump() << '\n';
        for (auto c : feedback::kCues) {
            const auto i = feedback::index(c);
            const bool bad = stream.truth()[i] == 1;
            if (bad && !open[i]) open[i] = f.t_ms;
            if (!bad && open[i]) {
                truth[i].emplace_back(*open[i], f.t_ms);
                open[i].reset();
            }
        }
        last = f.t_ms;
    }
    for (std::size_t i = 0; i < feedback::kCueCount; ++i)
        if (open[i]) truth[i].emplace_back(*open[i], last + 1);
    std::ofstream lout(labels_out);
    if (!lout) throw Error(Errc::io_error, "cannot write '" + labels_out + "'");
    lout << trainer::format_label_file(trainer::simulate_raters(truth, last + 1, raters, seed + 1));
    std::cout << "wrote " << features_out << " and " << labels_out << '\n';
    return 0;
}

int cmd_simulate(const std::string& script_path, std::uint64_t seed, const std::string& rules, const std::string& model_path,
                 const std::string& config_path, double rate_hz, bool quiet) {
    auto assets = dialogue::load_dialogue_assets(rules);
    auto model = service::load_model(model_path);
    const auto script = service::load_script(script_path);
    service::SimulationOptions opts;
    opts.config = read_config(config_path);
    opts.seed = seed;
    opts.frame_rate_hz = rate_hz;
    service::RecordStore store(service::data_dir_from_env());
    const auto id = "sim-" + std::to_string(seed);
    std::filesystem::remove(store.path_for(id));
    std::shared_ptr<service::RecordSink> sink = store.open(id);
    const auto r = service::simulate(script, opts, assets, model, sink);

    if (!quiet) {
        for (const auto& e : service::parse_record(store.read_lines(id)).transcript())
            std::cout << '[' << analytics::format_duration(e.t_ms) << "] "
                      << (e.speaker == service::TranscriptEntry::Speaker::user ? "user: " : "agent: ") << e.text << '\n';
    }
    std::cout << "session " << r.session_id << ": " << r.user_turns << " user turns, " << r.agent_turns
              << " replies, depth " << r.max_depth << ", topics:";
    for (const auto& t : r.topics) std::cout << " [" << t << ']';
    std::cout << '\n';
    service::SummaryMsg summary;
    for (const auto& m : r.outputs)
        if (const auto* s = std::get_if<service::SummaryMsg>(&m.payload)) summary = *s;
    print_summary(summary, r.session_id);
    std::cout << "record: " << store.path_for(id) << '\n';
    return 0;
}

int cmd_summarize(const std::string& id, const std::string& rules, const std::string& model_path) {
    service::RecordStore store(service::data_dir_from_env());
    const auto lines = store.read_lines(id);
    const auto record = service::parse_record(lines);
    if (auto s = record.summary()) {
        print_summary(*s, id);
        return 0;
    }
    // Session still open: rebuild it from its inputs and close it.
    auto sink = std::make_shared<service::MemorySink>();
    service::Session session(record.id, record.config, dialogue::load_dialogue_assets(rules),
                             service::load_model(record.config.model_path.empty() ? model_path : record.config.model_path), sink);
    for (const auto& in : record.inputs) session.handle(in);
    session.end();
    print_summary(std::get<service::SummaryMsg>(session.outputs().back().payload), id + " (not ended; closed now)");
    return 0;
}

int cmd_replay(const std::string& id, const std::string& rules, const std::string& model_path) {
    service::RecordStore store(service::data_dir_from_env());
    const auto lines = store.read_lines(id);
    const auto r = service::replay(lines, dialogue::load_dialogue_assets(rules), service::load_model(model_path));
    if (r.identical) {
        std::cout << "replay identical: " << r.lines << " lines\n";
        return 0;
    }
    std::cout << "replay differs at line " << *r.first_difference + 1 << '\n';
    if (*r.first_difference < lines.size()) std::cout << "  recorded:    " << lines[*r.first_difference] << '\n';
    if (*r.first_difference < r.regenerated.size()) std::cout << "  regenerated: " << r.regenerated[*r.first_difference] << '\n';
    return 1;
}

service::Server* g_server = nullptr;

int cmd_serve(std::uint16_t port, const std::string& host, const std::string& model_path, const std::string& rules,
              const std::string& config_path) {
    service::SessionManager manager(dialogue::load_dialogue_assets(rules), service::load_model(model_path),
                                    service::RecordStore(service::data_dir_from_env()));
    service::ServerOptions opts;
    opts.host = host;
    opts.port = port;
    opts.defaults = read_config(config_path);
    service::Server server(manager, opts);
    const auto bound = server.listen();
    g_server = &server;
    std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
    std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
    std::cout << "listening on ws://" << host << ':' << bound << "/ (records in " << service::data_dir_from_env() << ")"
              << std::endl;
    server.run();
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversation practice engine with real-time nonverbal feedback.\nData directory: $" +
                 std::string(service::kDataDirEnv) + " (default ./coach-data)"};
    app.require_subcommand(1);
    std::string rules = COACH_DEFAULT_RULES_DIR;
    std::string model = COACH_DEFAULT_MODEL;
    std::string config;

    auto* serve = app.add_subcommand("serve", "Run the WebSocket session server");
    std::uint16_t port = 8080;
    std::string host = "127.0.0.1";
    serve->add_option("--port", port, "TCP port (0 picks one)");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--models", model, "HMM model file")->check(CLI::ExistingFile);
    serve->add_option("--rules", rules, "Rules directory")->check(CLI::ExistingDirectory);
    serve->add_option("--config", config, "Session config JSON");

    auto* simulate = app.add_subcommand("simulate", "Run one scripted session on a simulated clock");
    std::string script;
    std::uint64_t seed = 1;
    double rate = 30.0;
    bool quiet = false;
    simulate->add_option("--script", script, "Scripted user JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--models", model, "HMM model file");
    simulate->add_option("--rules", rules, "Rules directory");
    simulate->add_option("--config", config, "Session config JSON");
    simulate->add_option("--rate", rate, "Frame rate in Hz");
    simulate->add_flag("--quiet", quiet, "Only print the summary");

    auto* train = app.add_subcommand("train", "Fit the feedback HMM from rater marks and feature frames");
    std::vector<std::string> labels, features;
    std::string out;
    std::int64_t bin_ms = trainer::kDefaultBinMs;
    int threshold = trainer::kDefaultRaterThreshold;
    train->add_option("--labels", labels, "Label file(s): rater,cue,start_ms,end_ms")->required();
    train->add_option("--features", features, "Feature file(s): one JSON frame per line")->required();
    train->add_option("--out", out, "Output model file")->required();
    train->add_option("--bin-ms", bin_ms, "Label bin width");
    train->add_option("--threshold", threshold, "Raters needed to label a bin");

    auto* alpha = app.add_subcommand("alpha", "Inter-rater agreement (Krippendorff's alpha, nominal)");
    std::string alpha_labels;
    std::int64_t span_ms = 0;
    alpha->add_option("--labels", alpha_labels, "Label file")->required()->check(CLI::ExistingFile);
    alpha->add_option("--bin-ms", bin_ms, "Bin width");
    alpha->add_option("--span-ms", span_ms, "Recording length (default: last mark)");

    auto* summarize = app.add_subcommand("summarize", "Print the summary of a recorded session");
    std::string session;
    summarize->add_option("--session", session, "Session id")->required();
    summarize->add_option("--models", model, "HMM model file");
    summarize->add_option("--rules", rules, "Rules directory");

    auto* replay = app.add_subcommand("replay", "Re-run a recorded session and compare byte for byte");
    replay->add_option("--session", session, "Session id")->required();
    replay->add_option("--models", model, "HMM model file");
    replay->add_option("--rules", rules, "Rules directory");

    auto* synth = app.add_subcommand("synth", "Generate synthetic frames and rater marks for training");
    double minutes = 10.0;
    int raters = 6;
    std::string features_out = "features.jsonl", labels_out = "labels.csv";
    synth->add_option("--minutes", minutes, "Recording length");
    synth->add_option("--seed", seed, "Random seed");
    synth->add_option("--raters", raters, "Number of simulated raters");
    synth->add_option("--features", features_out, "Feature output file");
    synth->add_option("--labels", labels_out, "Label output file");
    synth->add_option("--script", script, "Take behaviour rates from a scripted user");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*serve) return cmd_serve(port, host, model, rules, config);
        if (*simulate) return cmd_simulate(script, seed, rules, model, config, rate, quiet);
        if (*train) return cmd_train(labels, features, out, bin_ms, threshold);
        if (*alpha) return cmd_alpha(alpha_labels, bin_ms, span_ms);
        if (*summarize) return cmd_summarize(session, rules, model);
        if (*replay) return cmd_replay(session, rules, model);
        if (*synth) return cmd_synth(minutes, seed, raters, features_out, labels_out, script);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
