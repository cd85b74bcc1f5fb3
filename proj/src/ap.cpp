#include "rapport/eval/ap.hpp"

#include <algorithm>
#include <cstdio>

#include "rapport/common.hpp"

namespace rapport::eval {

double average_precision(std::vector<ScoredItem> items) {
    std::sort(items.begin(), items.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });

    std::size_t positives = 0;
    for (const ScoredItem& it : items) positives += it.label == 1 ? 1 : 0;
    if (positives == 0) throw NoPositives("average_precision: no positive labels");

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k].label != 1) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
    return sum / static_cast<double>(positives);
}

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<ScoredItem> items(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%012zu", i);
        items[i] = {buf, scores[i], labels[i]};
    }
    return average_precision(std::move(items));
}

}  // namespace rapport::eval
