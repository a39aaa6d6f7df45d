#include "coach/trainer/alpha.hpp"

#include <map>
#include <vector>

#include "coach/error.hpp"

namespace coach::trainer {

double krippendorff_alpha(const RatingMatrix& ratings) {
    if (ratings.raters() < 2) throw Error(Errc::insufficient_data, "alpha needs at least two raters");
    std::map<int, std::size_t> code_index;
    for (const auto& row : ratings.rows)
        for (auto v : row)
            if (v != kMissing) code_index.emplace(v, 0);
    std::size_t k = 0;
    for (auto& [code, idx] : code_index) idx = k++;

    std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
    std::size_t pairable = 0;
    std::vector<std::size_t> counts(k);
    for (std::size_t u = 0; u < ratings.units(); ++u) {
        std::fill(counts.begin(), counts.end(), 0);
        std::size_t m = 0;
        for (const auto& row : ratings.rows) {
            if (row[u] == kMissing) continue;
            ++counts[code_index[row[u]]];
            ++m;
        }
        if (m < 2) continue;
        ++pairable;
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t d = 0; d < k; ++d) {
                const double pairs = c == d ? static_cast<double>(counts[c] * (counts[c] - (counts[c] > 0 ? 1 : 0)))
                                            : static_cast<double>(counts[c] * counts[d]);
                o[c][d] += pairs * w;
            }
    }
    if (pairable < 2) throw Error(Errc::insufficient_data, "fewer than two units have two or more ratings");

    std::vector<double> n_c(k, 0.0);
    double n = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) n_c[c] += o[c][d];
        n += n_c[c];
    }
    double disagree = 0.0;
    double expected = 0.0;
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < k; ++d)
            if (c != d) {
                disagree += o[c][d];
                expected += n_c[c] * n_c[d];
            }
    if (disagree == 0.0) return 1.0;
    return 1.0 - (n - 1.0) * disagree / expected;
}

AgreementReport agreement(const MarkMatrix& marks) {
    AgreementReport report;
    RatingMatrix pooled;
    pooled.rows.assign(marks.raters.size(), {});
    double sum = 0.0;
    int defined = 0;
    for (auto c : feedback::kCues) {
        const auto& m = marks[c];
        for (std::size_t r = 0; r < m.raters(); ++r)
            pooled.rows[r].insert(pooled.rows[r].end(), m.rows[r].begin(), m.rows[r].end());
        try {
            const double a = krippendorff_alpha(m);
            report.per_cue[feedback::index(c)] = a;
            sum += a;
            ++defined;
        } catch (const Error& e) {
            if (e.code() != Errc::insufficient_data) throw;
        }
    }
    report.pooled = krippendorff_alpha(pooled);
    if (defined > 0) report.mean_of_cues = sum / defined;
    return report;
}

}  // namespace coach::trainer
