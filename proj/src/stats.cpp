#include "rapport/eval/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "rapport/common.hpp"
#include "rapport/labels.hpp"

namespace rapport::eval {

using nlohmann::json;

namespace {

struct ClassStats {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;  // sample variance
};

ClassStats class_stats(const std::vector<double>& v) {
    ClassStats s;
    s.n = v.size();
    if (s.n == 0) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(s.n);
    if (s.n < 2) return s;
    double m2 = 0.0;
    for (double x : v) {
        double d = x - s.mean;
        m2 += d * d;
    }
    s.var = m2 / static_cast<double>(s.n - 1);
    return s;
}

}  // namespace

std::map<std::string, double> feature_tscores(const features::FeatureMatrix& matrix,
                                              const std::map<ParticipantKey, int>& labels,
                                              const TScoreOptions& opts) {
    std::size_t low_rows = 0, high_rows = 0;
    for (const ParticipantKey& key : matrix.rows)
        (labels.at(key) == 1 ? low_rows : high_rows) += 1;
    if (low_rows < 2 || high_rows < 2)
        throw DegenerateClass("feature_tscores: need >= 2 rows per class");

    std::map<std::string, double> out;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        std::vector<double> low, high;
        for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
            double v = matrix.at(r, c);
            if (is_missing(v)) continue;
            (labels.at(matrix.rows[r]) == 1 ? low : high).push_back(v);
        }
        if (low.size() < 2 || high.size() < 2) continue;

        ClassStats a = class_stats(low);
        ClassStats b = class_stats(high);
        double diff = a.mean - b.mean;
        double denom;
        if (opts.welch) {
            denom = std::sqrt(a.var / static_cast<double>(a.n) + b.var / static_cast<double>(b.n));
        } else {
            double pooled = ((static_cast<double>(a.n) - 1.0) * a.var +
                             (static_cast<double>(b.n) - 1.0) * b.var) /
                            static_cast<double>(a.n + b.n - 2);
            denom = std::sqrt(pooled) *
                    std::sqrt(1.0 / static_cast<double>(a.n) + 1.0 / static_cast<double>(b.n));
        }
        double t;
        if (denom > 0.0)
            t = diff / denom;
        else
            // constant in both classes: 0 when equal, clamped otherwise
            t = diff == 0.0 ? 0.0 : std::copysign(1e300, diff);
        out[matrix.names[c]] = t;
    }
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n != y.size() || n < 3) throw DegenerateVariance("pearson: need >= 3 paired samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DegenerateVariance("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3) return 1.0;
    double r2 = std::min(r * r, 1.0);
    if (r2 >= 1.0) return 0.0;
    double df = static_cast<double>(n - 2);
    double t = std::fabs(r) * std::sqrt(df / (1.0 - r2));
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

CorrelationReport attribute_correlations(const Corpus& corpus) {
    static const char* kAttributes[] = {"rapport", "leadership", "dominance", "competence",
                                        "liking"};
    static const char* kTraits[] = {"O", "C", "E", "A", "N"};

    // per-variable value vectors in participant order
    std::map<std::string, std::vector<double>> columns;
    for (const auto& [session, ratings] : corpus) {
        for (const ParticipantId& pid : session.participants) {
            for (const char* attr : kAttributes)
                columns[attr].push_back(aggregate_received_score(ratings, attr, pid));
            auto it = ratings.personality.find(pid);
            if (it == ratings.personality.end())
                throw SchemaViolation("personality missing for '" + pid + "'");
            columns["O"].push_back(it->second.openness);
            columns["C"].push_back(it->second.conscientiousness);
            columns["E"].push_back(it->second.extraversion);
            columns["A"].push_back(it->second.agreeableness);
            columns["N"].push_back(it->second.neuroticism);
        }
    }

    CorrelationReport report;
    report.n = columns["rapport"].size();
    auto add_cell = [&](const std::string& a, const std::string& b) {
        CorrelationCell cell;
        cell.r = pearson(columns[a], columns[b]);
        cell.p_value = pearson_p_value(cell.r, report.n);
        cell.significant = cell.p_value < 0.05;
        report.cells[{a, b}] = cell;
    };
    for (std::size_t i = 0; i < std::size(kAttributes); ++i)
        for (std::size_t j = i + 1; j < std::size(kAttributes); ++j)
            add_cell(kAttributes[i], kAttributes[j]);
    for (const char* trait : kTraits)
        for (const char* attr : kAttributes) add_cell(trait, attr);
    return report;
}

std::string CorrelationReport::to_json() const {
    json j;
    j["participants"] = n;
    json cells_json = json::array();
    for (const auto& [pair, cell] : cells)
        cells_json.push_back({{"a", pair.first},
                              {"b", pair.second},
                              {"r", cell.r},
                              {"p_value", cell.p_value},
                              {"significant", cell.significant}});
    j["cells"] = std::move(cells_json);
    return j.dump(2) + "\n";
}

std::string CorrelationReport::to_table() const {
    static const char* kAttributes[] = {"rapport", "leadership", "dominance", "competence",
                                        "liking"};
    static const char* kRows[] = {"rapport", "leadership", "dominance", "competence", "liking",
                                  "O", "C", "E", "A", "N"};
    std::string out = "pearson r (asterisk: p < 0.05, two-tailed)\n";
    char buf[192];
    std::snprintf(buf, sizeof buf, "%-12s", "");
    out += buf;
    for (const char* a : kAttributes) {
        std::snprintf(buf, sizeof buf, "%12s", a);
        out += buf;
    }
    out += "\n";
    for (const char* row : kRows) {
        std::snprintf(buf, sizeof buf, "%-12s", row);
        out += buf;
        for (const char* col : kAttributes) {
            auto it = cells.find({row, col});
            if (it == cells.end()) it = cells.find({col, row});
            if (it == cells.end() || std::string(row) == col) {
                std::snprintf(buf, sizeof buf, "%12s", "-");
            } else {
                std::snprintf(buf, sizeof buf, "%10.2f%s ", it->second.r,
                              it->second.significant ? "*" : " ");
            }
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace rapport::eval
