#include "rapport/labels.hpp"

#include <algorithm>
#include <cmath>

#include "rapport/common.hpp"

namespace rapport {

double aggregate_received_score(const RatingsRecord& r, const std::string& attribute,
                                const ParticipantId& target) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [pair, scores] : r.directed) {
        if (pair.second != target) continue;
        sum += scores.get(attribute);
        ++count;
    }
    if (count == 0) throw UnknownParticipant("no ratings received by '" + target + "'");
    return sum / static_cast<double>(count);
}

double quantile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw EmptyMatrix("quantile of empty set");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    double h = p * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

LabelSet label_low_rapport(const std::map<ParticipantKey, double>& scores) {
    std::vector<double> vals;
    vals.reserve(scores.size());
    for (const auto& kv : scores) vals.push_back(kv.second);

    double boundary = quantile_linear(vals, 0.25);

    LabelSet out;
    out.score = scores;
    for (const auto& [key, score] : scores) out.low[key] = score < boundary ? 1 : 0;
    return out;
}

std::map<ParticipantKey, double> corpus_rapport_scores(const Corpus& corpus) {
    std::map<ParticipantKey, double> scores;
    for (const auto& [session, ratings] : corpus)
        for (const ParticipantId& pid : session.participants)
            scores[{session.session_id, pid}] =
                aggregate_received_score(ratings, "rapport", pid);
    return scores;
}

LabelSet corpus_labels(const Corpus& corpus) {
    return label_low_rapport(corpus_rapport_scores(corpus));
}

}  // namespace rapport
