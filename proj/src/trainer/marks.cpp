#include "coach/trainer/marks.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach::trainer {

MarkMatrix bin_marks(const std::vector<RawMark>& marks, std::int64_t bin_ms, std::int64_t span_ms,
                     std::vector<std::string> raters) {
    if (bin_ms <= 0) throw Error(Errc::invalid_config, "bin size must be positive");
    if (span_ms < 0) throw Error(Errc::invalid_config, "span must be non-negative");
    if (raters.empty()) {
        std::set<std::string> ids;
        for (const auto& m : marks) ids.insert(m.rater);
        raters.assign(ids.begin(), ids.end());
    }
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < raters.size(); ++i) row_of[raters[i]] = i;

    // Merge each rater's intervals per cue so overlapping marks are not double counted.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::int64_t, std::int64_t>>> intervals;
    for (const auto& m : marks) {
        if (m.start_ms < 0 || m.end_ms > span_ms || m.start_ms > m.end_ms)
            throw Error(Errc::interval_out_of_span, m.rater + " marked [" + std::to_string(m.start_ms) + ", " +
                                                        std::to_string(m.end_ms) + "] outside [0, " + std::to_string(span_ms) + "]");
        auto it = row_of.find(m.rater);
        if (it == row_of.end()) throw Error(Errc::invalid_config, "unknown rater '" + m.rater + "'");
        intervals[{feedback::index(m.cue), it->second}].emplace_back(m.start_ms, m.end_ms);
    }

    MarkMatrix out;
    out.bin_ms = bin_ms;
    out.raters = raters;
    const auto bins = static_cast<std::size_t>((span_ms + bin_ms - 1) / bin_ms);
    for (auto& cm : out.cues) cm.rows.assign(raters.size(), std::vector<std::int8_t>(bins, 0));

    for (auto& [key, list] : intervals) {
        std::sort(list.begin(), list.end());
        std::vector<std::pair<std::int64_t, std::int64_t>> merged;
        for (const auto& iv : list) {
            if (!merged.empty() && iv.first <= merged.back().second) merged.back().second = std::max(merged.back().second, iv.second);
            else merged.push_back(iv);
        }
        auto& row = out.cues[key.first].rows[key.second];
        std::vector<std::int64_t> covered(bins, 0);
        for (const auto& [s, e] : merged) {
            for (auto b = static_cast<std::size_t>(s / bin_ms); b < bins && static_cast<std::int64_t>(b) * bin_ms < e; ++b) {
                const std::int64_t lo = static_cast<std::int64_t>(b) * bin_ms;
                covered[b] += std::max<std::int64_t>(0, std::min(e, lo + bin_ms) - std::max(s, lo));
            }
        }
        for (std::size_t b = 0; b < bins; ++b)
            if (2 * covered[b] >= bin_ms) row[b] = 1;
    }
    return out;
}

LabelTrack aggregate_labels(const MarkMatrix& marks, int threshold) {
    if (threshold < 1 || static_cast<std::size_t>(threshold) > marks.raters.size())
        throw Error(Errc::threshold_exceeds_raters,
                    "threshold " + std::to_string(threshold) + " with " + std::to_string(marks.raters.size()) + " raters");
    LabelTrack out;
    out.bin_ms = marks.bin_ms;
    for (std::size_t c = 0; c < kCueCount; ++c) {
        const auto& m = marks.cues[c];
        auto& labels = out.labels[c];
        labels.assign(m.units(), 0);
        for (std::size_t b = 0; b < m.units(); ++b) {
            int votes = 0;
            for (const auto& row : m.rows) votes += row[b] == 1;
            labels[b] = votes >= threshold;
        }
    }
    return out;
}

namespace {

std::int64_t parse_ms(const std::string& s, std::size_t line) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(Errc::parse_error, "label line " + std::to_string(line) + ": bad time '" + s + "'");
    return v;
}

}  // namespace

std::vector<RawMark> parse_label_file(std::string_view source) {
    std::vector<RawMark> out;
    std::istringstream in{std::string(source)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty() || (out.empty() && line.substr(0, 6) == "rater,")) continue;
        auto fields = text::split(line, ',');
        if (fields.size() != 4) throw Error(Errc::parse_error, "label line " + std::to_string(line_no) + ": expected 4 fields");
        auto cue = feedback::cue_from_string(fields[1]);
        if (!cue) throw Error(Errc::parse_error, "label line " + std::to_string(line_no) + ": unknown cue '" + fields[1] + "'");
        const auto start = parse_ms(fields[2], line_no), end = parse_ms(fields[3], line_no);
        if (end < start) throw Error(Errc::parse_error, "label line " + std::to_string(line_no) + ": interval ends before it starts");
        out.push_back({fields[0], *cue, start, end});
    }
    return out;
}

std::vector<RawMark> load_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open label file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_label_file(buf.str());
}

std::string format_label_file(const std::vector<RawMark>& marks) {
    std::ostringstream out;
    out << "rater,cue,start_ms,end_ms\n";
    for (const auto& m : marks) out << m.rater << ',' << feedback::to_string(m.cue) << ',' << m.start_ms << ',' << m.end_ms << '\n';
    return out.str();
}

std::vector<RawMark> simulate_raters(const std::array<std::vector<std::pair<std::int64_t, std::int64_t>>, kCueCount>& truth,
                                     std::int64_t span_ms, int raters, std::uint64_t seed, double hit_rate, double jitter_ms) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, jitter_ms);
    std::vector<RawMark> out;
    auto clamp = [&](double v) { return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), 0, span_ms); };
    for (int r = 0; r < raters; ++r) {
        const auto id = "ra" + std::to_string(r + 1);
        for (auto c : feedback::kCues) {
            for (const auto& [s, e] : truth[feedback::index(c)]) {
                if (u(rng) >= hit_rate) continue;
                auto a = clamp(static_cast<double>(s) + jitter(rng));
                auto b = clamp(static_cast<double>(e) + jitter(rng));
                if (b > a) out.push_back({id, c, a, b});
            }
            // Occasional spurious mark, roughly one per ten minutes.
            const double expected = static_cast<double>(span_ms) / 600000.0;
            if (u(rng) < expected) {
                const auto a = clamp(u(rng) * static_cast<double>(span_ms));
                const auto b = clamp(static_cast<double>(a) + 1000.0 + u(rng) * 2000.0);
                if (b > a) out.push_back({id, c, a, b});
            }
        }
    }
    return out;
}

}  // namespace coach::trainer
