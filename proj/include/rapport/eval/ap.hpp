#ifndef RAPPORT_EVAL_AP_HPP
#define RAPPORT_EVAL_AP_HPP

#include <string>
#include <vector>

namespace rapport::eval {

struct ScoredItem {
    std::string id;  // deterministic tie-break key, ascending
    double score = 0.0;
    int label = 0;  // 1 = positive
};

// Average precision of the ranking by descending score (score ties broken by
// ascending id): mean of precision@k over the ranks of the positives.
// Throws NoPositives when no positive label is present.
double average_precision(std::vector<ScoredItem> items);

// Index-keyed convenience overload.
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace rapport::eval

#endif  // RAPPORT_EVAL_AP_HPP
