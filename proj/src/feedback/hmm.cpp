#include "coach/feedback/hmm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "coach/error.hpp"

namespace coach::feedback {

double GaussianEmission::log_density(const Observation& obs) const {
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    double lp = 0.0;
    for (std::size_t d = 0; d < obs.size() && d < mean.size(); ++d) {
        if (!obs[d]) continue;
        const double z = *obs[d] - mean[d];
        double quad = z * z / var[d];
        // Extreme inputs can overflow the square; the density is then effectively zero.
        if (!std::isfinite(quad) || quad > 1e300) quad = 1e300;
        lp -= 0.5 * (kLog2Pi + std::log(var[d]) + quad);
    }
    return lp;
}

void CueModel::validate(double variance_floor) const {
    const auto n = states();
    const auto name = std::string(to_string(cue));
    auto fail = [&](const std::string& msg) { throw Error(Errc::invalid_model, name + ": " + msg); };
    if (n < 1) fail("no states");
    if (transition.size() != n || emissions.size() != n) fail("state count mismatch");
    auto check_dist = [&](const std::vector<double>& row, const char* what) {
        if (row.size() != n) fail(std::string(what) + " has wrong length");
        double s = 0.0;
        for (double p : row) {
            if (!(p >= 0.0) || !std::isfinite(p)) fail(std::string(what) + " has a negative or non-finite entry");
            s += p;
        }
        if (std::abs(s - 1.0) > kStochasticTolerance) fail(std::string(what) + " does not sum to 1");
    };
    check_dist(initial, "initial distribution");
    for (const auto& row : transition) check_dist(row, "transition row");
    for (const auto& e : emissions) {
        if (e.mean.size() != features.size() || e.var.size() != features.size()) fail("emission dimension mismatch");
        for (double m : e.mean)
            if (!std::isfinite(m)) fail("non-finite emission mean");
        for (double v : e.var)
            if (!(v >= variance_floor) || !std::isfinite(v)) fail("emission variance below floor");
    }
}

std::vector<double> CueModel::log_emissions(const Observation& obs) const {
    std::vector<double> out(states());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = emissions[s].log_density(obs);
    return out;
}

void HmmModel::validate() const {
    for (auto c : kCues) {
        if (cues[index(c)].cue != c) throw Error(Errc::invalid_model, "cue slot mismatch for " + std::string(to_string(c)));
        cues[index(c)].validate(variance_floor);
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

constexpr std::string_view kMagic = "coach-hmm";
constexpr int kVersion = 1;

void write_row(std::ostringstream& out, std::string_view label, const std::vector<double>& row) {
    out << label;
    for (double v : row) out << ' ' << format_double(v);
    out << '\n';
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::parse_error, "model line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

}  // namespace

std::string write_model(const HmmModel& model) {
    std::ostringstream out;
    out << kMagic << ' ' << kVersion << '\n';
    out << "variance-floor " << format_double(model.variance_floor) << '\n';
    for (const auto& cm : model.cues) {
        out << "cue " << to_string(cm.cue) << '\n';
        out << "features";
        for (const auto& f : cm.features) out << ' ' << f.name();
        out << '\n';
        out << "states " << cm.states() << '\n';
        write_row(out, "initial", cm.initial);
        for (const auto& row : cm.transition) write_row(out, "transition", row);
        for (std::size_t s = 0; s < cm.emissions.size(); ++s) {
            write_row(out, "mean " + std::to_string(s), cm.emissions[s].mean);
            write_row(out, "var " + std::to_string(s), cm.emissions[s].var);
        }
        out << "end\n";
    }
    return out.str();
}

HmmModel read_model(std::string_view source) {
    HmmModel model;
    std::istringstream in{std::string(source)};
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) { throw Error(Errc::parse_error, "model line " + std::to_string(line_no) + ": " + msg); };
    auto next = [&](std::istringstream& ls) {
        if (!std::getline(in, raw)) fail("unexpected end of model");
        ++line_no;
        ls = std::istringstream(raw);
        std::string word;
        ls >> word;
        return word;
    };
    auto numbers = [&](std::istringstream& ls) {
        std::vector<double> v;
        for (std::string tok; ls >> tok;) v.push_back(parse_double(tok, line_no));
        return v;
    };

    std::istringstream ls;
    if (next(ls) != kMagic) fail("missing 'coach-hmm' header");
    int version = 0;
    ls >> version;
    if (version != kVersion) fail("unsupported model version " + std::to_string(version));
    if (next(ls) != "variance-floor") fail("expected variance-floor");
    auto floor = numbers(ls);
    if (floor.size() != 1) fail("variance-floor takes one value");
    model.variance_floor = floor[0];

    std::array<bool, kCueCount> seen{};
    for (std::size_t k = 0; k < kCueCount; ++k) {
        if (next(ls) != "cue") fail("expected 'cue'");
        std::string name;
        ls >> name;
        auto cue = cue_from_string(name);
        if (!cue) fail("unknown cue '" + name + "'");
        if (seen[index(*cue)]) fail("cue '" + name + "' repeated");
        seen[index(*cue)] = true;
        CueModel cm;
        cm.cue = *cue;
        if (next(ls) != "features") fail("expected 'features'");
        for (std::string f; ls >> f;) cm.features.push_back(FeatureId::parse(f));
        if (next(ls) != "states") fail("expected 'states'");
        std::size_t n = 0;
        ls >> n;
        if (n == 0) fail("state count must be positive");
        if (next(ls) != "initial") fail("expected 'initial'");
        cm.initial = numbers(ls);
        for (std::size_t i = 0; i < n; ++i) {
            if (next(ls) != "transition") fail("expected 'transition'");
            cm.transition.push_back(numbers(ls));
        }
        for (std::size_t s = 0; s < n; ++s) {
            GaussianEmission e;
            std::size_t idx = 0;
            if (next(ls) != "mean" || !(ls >> idx) || idx != s) fail("expected 'mean " + std::to_string(s) + "'");
            e.mean = numbers(ls);
            if (next(ls) != "var" || !(ls >> idx) || idx != s) fail("expected 'var " + std::to_string(s) + "'");
            e.var = numbers(ls);
            cm.emissions.push_back(std::move(e));
        }
        if (next(ls) != "end") fail("expected 'end'");
        model.cues[index(*cue)] = std::move(cm);
    }
    model.validate();
    return model;
}

HmmModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::model_load_failure, "cannot open model '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return read_model(buf.str());
    } catch (const Error& e) {
        throw Error(Errc::model_load_failure, path + ": " + e.what());
    }
}

void save_model_file(const HmmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write model '" + path + "'");
    out << write_model(model);
}

}  // namespace coach::feedback
