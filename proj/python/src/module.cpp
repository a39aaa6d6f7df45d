#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coach/analytics/summary.hpp"
#include "coach/error.hpp"
#include "coach/service/record.hpp"
#include "coach/service/session.hpp"
#include "coach/service/simulator.hpp"
#include "coach/trainer/alpha.hpp"
#include "coach/trainer/marks.hpp"

namespace py = pybind11;
using namespace coach;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::vector<std::string> encode_all(const std::vector<service::ServerMessage>& msgs) {
    std::vector<std::string> out;
    for (const auto& m : msgs) out.push_back(service::encode(m));
    return out;
}

trainer::RatingMatrix to_matrix(const std::vector<std::vector<int>>& rows) {
    trainer::RatingMatrix m;
    for (const auto& r : rows) m.rows.emplace_back(r.begin(), r.end());
    return m;
}

analytics::SessionTimeline to_timeline(std::int64_t span_ms, const std::vector<std::tuple<std::string, std::string, std::int64_t>>& events) {
    analytics::SessionTimeline tl{span_ms, {}};
    for (const auto& [cue, kind, t] : events) {
        auto c = feedback::cue_from_string(cue);
        auto k = feedback::event_kind_from_string(kind);
        if (!c) throw Error(Errc::invalid_timeline, "unknown cue '" + cue + "'");
        if (!k) throw Error(Errc::invalid_timeline, "unknown event kind '" + kind + "'");
        tl.events.push_back({*c, *k, t, {}});
    }
    return tl;
}

struct PySession {
    service::AssetsPtr assets;
    service::ModelPtr model;
    std::shared_ptr<service::MemorySink> sink = std::make_shared<service::MemorySink>();
    std::unique_ptr<service::Session> session;

    PySession(const std::string& rules_dir, const std::string& model_path, const std::string& config_json, const std::string& id)
        : assets(dialogue::load_dialogue_assets(rules_dir)), model(service::load_model(model_path)) {
        auto config = config_json.empty() ? service::SessionConfig{} : service::config_from_json(nlohmann::json::parse(config_json));
        session = std::make_unique<service::Session>(id, std::move(config), assets, model, sink);
    }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "conversation practice engine";

    static py::exception<Error> coach_error(m, "CoachError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(coach_error.ptr())(e.what());
            err.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(coach_error.ptr(), err.ptr());
        }
    });

    m.def("krippendorff_alpha", [](const std::vector<std::vector<int>>& rows) { return trainer::krippendorff_alpha(to_matrix(rows)); },
          py::arg("rows"), "Nominal alpha; rows are raters, -1 marks a missing rating.");

    m.def(
        "aggregate_labels",
        [](const std::vector<std::vector<int>>& rows, int threshold) {
            trainer::MarkMatrix mm;
            for (std::size_t r = 0; r < rows.size(); ++r) mm.raters.push_back(std::to_string(r));
            for (auto& c : mm.cues) c = to_matrix(rows);
            auto labels = trainer::aggregate_labels(mm, threshold)[feedback::Cue::eye_contact];
            return std::vector<int>(labels.begin(), labels.end());
        },
        py::arg("rows"), py::arg("threshold") = trainer::kDefaultRaterThreshold);

    m.def(
        "compute_summary",
        [](std::int64_t span_ms, const std::vector<std::tuple<std::string, std::string, std::int64_t>>& events) {
            return service::summary_to_json(analytics::compute_summary(to_timeline(span_ms, events))).dump();
        },
        py::arg("span_ms"), py::arg("events"));

    m.def(
        "format_report",
        [](std::int64_t span_ms, const std::vector<std::tuple<std::string, std::string, std::int64_t>>& events, const std::string& title) {
            return analytics::format_report(analytics::compute_summary(to_timeline(span_ms, events)), title);
        },
        py::arg("span_ms"), py::arg("events"), py::arg("title") = "Session");

    m.def(
        "simulate",
        [](const std::string& script, std::uint64_t seed, const std::string& rules_dir, const std::string& model_path, double rate) {
            auto sink = std::make_shared<service::MemorySink>();
            service::SimulationOptions opt;
            opt.seed = seed;
            opt.frame_rate_hz = rate;
            auto assets = dialogue::load_dialogue_assets(rules_dir);
            auto model = service::load_model(model_path);
            auto r = service::simulate(service::load_script(script), opt, assets, model, sink);
            py::dict d;
            d["session"] = r.session_id;
            d["user_turns"] = r.user_turns;
            d["agent_turns"] = r.agent_turns;
            d["turns_without_reply"] = r.turns_without_reply;
            d["repeated_asks"] = r.repeated_asks;
            d["errors"] = r.errors;
            d["max_depth"] = r.max_depth;
            d["topics"] = r.topics;
            d["summary"] = service::summary_to_json(r.summary).dump();
            d["record"] = sink->lines;
            return d;
        },
        py::arg("script"), py::arg("seed"), py::arg("rules_dir"), py::arg("model_path"), py::arg("frame_rate_hz") = 30.0);

    m.def(
        "replay",
        [](const std::vector<std::string>& lines, const std::string& rules_dir, const std::string& model_path) {
            return service::replay(lines, dialogue::load_dialogue_assets(rules_dir), service::load_model(model_path)).identical;
        },
        py::arg("lines"), py::arg("rules_dir"), py::arg("model_path"));

    py::class_<PySession>(m, "Session")
        .def(py::init<const std::string&, const std::string&, const std::string&, const std::string&>(), py::arg("rules_dir"),
             py::arg("model_path"), py::arg("config_json") = "", py::arg("id") = "py-session")
        .def("take_pending", [](PySession& s) { return encode_all(s.session->take_pending()); })
        .def("handle", [](PySession& s, const std::string& msg) { return encode_all(s.session->handle(service::parse_client_message(msg))); })
        .def("record", [](const PySession& s) { return s.sink->lines; })
        .def_property_readonly("ended", [](const PySession& s) { return s.session->ended(); });
}
