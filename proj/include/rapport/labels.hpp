#ifndef RAPPORT_LABELS_HPP
#define RAPPORT_LABELS_HPP

#include "rapport/types.hpp"

namespace rapport {

// Mean of all scores the target received from the other group members for
// one attribute ("rapport", "leadership", "dominance", "competence",
// "liking"). Throws UnknownParticipant when nobody rated the target.
double aggregate_received_score(const RatingsRecord& r, const std::string& attribute,
                                const ParticipantId& target);

// Empirical p-quantile with linear interpolation (the numpy default).
double quantile_linear(std::vector<double> values, double p);

// Corpus-wide low-rapport labelling: low iff score is strictly below the
// linearly interpolated 25th percentile. Ties at the boundary stay not-low,
// which keeps the positive count at or below ceil(n/4).
LabelSet label_low_rapport(const std::map<ParticipantKey, double>& scores);

// Aggregated received rapport for every participant of the corpus.
std::map<ParticipantKey, double> corpus_rapport_scores(const Corpus& corpus);

// Scores + quartile labels in one step.
LabelSet corpus_labels(const Corpus& corpus);

}  // namespace rapport

#endif  // RAPPORT_LABELS_HPP
