#ifndef RAPPORT_EVAL_STATS_HPP
#define RAPPORT_EVAL_STATS_HPP

#include <map>
#include <string>
#include <vector>

#include "rapport/features/feature_sets.hpp"
#include "rapport/types.hpp"

namespace rapport::eval {

struct TScoreOptions {
    bool welch = false;  // pooled variance by default
};

// Two-sample t per feature with sign convention mean(low) - mean(high):
// positive t means the feature runs higher in the low-rapport group.
// Missing cells are skipped per feature; features with fewer than two
// usable values in either class are omitted. Features constant in both
// classes report 0. Throws DegenerateClass when a class has < 2 rows.
std::map<std::string, double> feature_tscores(const features::FeatureMatrix& matrix,
                                              const std::map<ParticipantKey, int>& labels,
                                              const TScoreOptions& opts = {});

struct CorrelationCell {
    double r = 0.0;
    double p_value = 1.0;
    bool significant = false;  // two-tailed, alpha = 0.05
};

struct CorrelationReport {
    std::size_t n = 0;  // participants
    // Upper-triangle attribute pairs plus every (trait, attribute) pair.
    std::map<std::pair<std::string, std::string>, CorrelationCell> cells;

    std::string to_json() const;
    std::string to_table() const;
};

// Pearson correlations between aggregated received attribute scores
// (rapport, leadership, dominance, competence, liking) and the five
// personality traits, across all participants of the corpus. Significance
// uses the t distribution with n-2 degrees of freedom. Throws
// DegenerateVariance when a variable has zero variance.
CorrelationReport attribute_correlations(const Corpus& corpus);

// Pearson r of two equal-length vectors.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Two-tailed p-value of an observed r under the null, n samples.
double pearson_p_value(double r, std::size_t n);

}  // namespace rapport::eval

#endif  // RAPPORT_EVAL_STATS_HPP
