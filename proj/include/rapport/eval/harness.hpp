#ifndef RAPPORT_EVAL_HARNESS_HPP
#define RAPPORT_EVAL_HARNESS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rapport/features/feature_sets.hpp"
#include "rapport/learn/ensemble.hpp"
#include "rapport/types.hpp"

namespace rapport::eval {

// Leave-one-interaction-out folds: (training session indices, held-out
// session index), one per session. Throws TooFewSessions below 2.
std::vector<std::pair<std::vector<std::size_t>, std::size_t>> loio_folds(std::size_t n_sessions);

struct FoldPrediction {
    ParticipantKey key;
    double prob = 0.0;
    int label = 0;
};

struct FoldResult {
    std::string session_id;
    bool skipped = false;
    std::string skip_reason;
    double chosen_cost = 0.0;
    double gamma = 0.0;
    // FNV-1a over the fitted standardization/imputation stats, gamma and the
    // selected cost; the no-leakage audit compares these across reruns.
    std::string fit_fingerprint;
    std::vector<FoldPrediction> predictions;
};

struct EvalReport {
    std::string feature_set;
    Segment segment = Segment::Full;
    learn::EnsembleConfig learner;
    std::vector<FoldResult> folds;
    double pooled_ap = 0.0;
    double chance_ap = 0.0;  // positive prevalence of the pooled predictions
    std::size_t participants = 0;
    std::size_t positives = 0;

    std::string to_json() const;
    // aligned text block mirroring the feature-set / segment grouping
    std::string to_table() const;
};

struct RunOptions {
    learn::EnsembleConfig learner;
    features::ExtractConfig extract;
    int jobs = 0;
    // Test hook: permutes the participant->score assignment (seeded) before
    // labelling, which destroys any feature-label association while keeping
    // the label marginal intact.
    std::optional<std::uint64_t> label_permutation_seed;
};

// One complete leave-one-interaction-out evaluation: per fold, assemble
// features, fit imputation/standardization and tune the cost on the training
// sessions only, train the ensemble, and score the held-out participants.
// The pooled AP is computed over all held-out predictions concatenated
// across folds. Folds whose training data degenerates are flagged, not fatal.
EvalReport run_experiment(const Corpus& corpus, const std::string& feature_set, Segment segment,
                          const RunOptions& opts);

// Fig-5-style facial ablation: face, face_nosync, face_synconly,
// face_no200s, face_200sonly on the full segment.
std::map<std::string, EvalReport> face_ablation(const Corpus& corpus, const RunOptions& opts);

// Scores after the optional permutation hook; exposed for the audit tests.
std::map<ParticipantKey, double> experiment_scores(const Corpus& corpus, const RunOptions& opts);

}  // namespace rapport::eval

#endif  // RAPPORT_EVAL_HARNESS_HPP
