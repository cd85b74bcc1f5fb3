#include "rapport/eval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "rapport/common.hpp"
#include "rapport/eval/ap.hpp"
#include "rapport/labels.hpp"

namespace rapport::eval {

using nlohmann::json;

std::vector<std::pair<std::vector<std::size_t>, std::size_t>> loio_folds(std::size_t n_sessions) {
    if (n_sessions < 2) throw TooFewSessions("loio_folds: need >= 2 sessions");
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> folds;
    folds.reserve(n_sessions);
    for (std::size_t held = 0; held < n_sessions; ++held) {
        std::vector<std::size_t> train;
        train.reserve(n_sessions - 1);
        for (std::size_t i = 0; i < n_sessions; ++i)
            if (i != held) train.push_back(i);
        folds.emplace_back(std::move(train), held);
    }
    return folds;
}

std::map<ParticipantKey, double> experiment_scores(const Corpus& corpus, const RunOptions& opts) {
    auto scores = corpus_rapport_scores(corpus);
    if (opts.label_permutation_seed) {
        std::vector<double> values;
        values.reserve(scores.size());
        for (const auto& kv : scores) values.push_back(kv.second);
        Rng rng(derive_seed(*opts.label_permutation_seed, 0x7065726dULL));
        rng.shuffle(values);
        std::size_t i = 0;
        for (auto& kv : scores) kv.second = values[i++];
    }
    return scores;
}

namespace {

std::string fingerprint_fit(const learn::TrainedEnsemble& e) {
    Fingerprint fp;
    fp.add(e.standardizer.mean);
    fp.add(e.standardizer.stddev);
    fp.add(e.standardizer.imputation);
    fp.add(e.gamma);
    fp.add(e.cost);
    return fp.hex();
}

json learner_json(const learn::EnsembleConfig& c) {
    return json{{"members", c.members},
                {"seed", c.seed},
                {"cost_grid", c.cost_grid},
                {"gamma_policy", c.gamma_policy == learn::GammaPolicy::Scaled ? "scaled" : "fixed"},
                {"gamma_value", c.gamma_value},
                {"tune_members", c.tune_members},
                {"class_weight", c.class_weight},
                {"smo_tol", c.smo_tol}};
}

}  // namespace

EvalReport run_experiment(const Corpus& corpus, const std::string& feature_set, Segment segment,
                          const RunOptions& opts) {
    auto folds = loio_folds(corpus.size());
    LabelSet labels = label_low_rapport(experiment_scores(corpus, opts));

    features::FeatureMatrix matrix =
        features::build_feature_matrix(corpus, feature_set, segment, opts.extract, opts.jobs);

    // row indices per session, in corpus order
    std::map<std::string, std::vector<std::size_t>> session_rows;
    for (std::size_t r = 0; r < matrix.rows.size(); ++r)
        session_rows[matrix.rows[r].session_id].push_back(r);

    EvalReport report;
    report.feature_set = feature_set;
    report.segment = segment;
    report.learner = opts.learner;

    // Folds run sequentially; the parallel budget goes to ensemble members
    // and inner tuning folds, whose reduction order is fixed.
    for (const auto& [train_sessions, held] : folds) {
        FoldResult fold;
        fold.session_id = corpus[held].first.session_id;

        std::vector<std::size_t> train_rows;
        for (std::size_t s : train_sessions)
            for (std::size_t r : session_rows.at(corpus[s].first.session_id))
                train_rows.push_back(r);

        learn::Matrix x_train(train_rows.size(), matrix.cols());
        std::vector<int> y_train;
        std::vector<std::string> groups;
        y_train.reserve(train_rows.size());
        groups.reserve(train_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            const ParticipantKey& key = matrix.rows[train_rows[i]];
            std::copy(matrix.cells.begin() + static_cast<std::ptrdiff_t>(train_rows[i] * matrix.cols()),
                      matrix.cells.begin() + static_cast<std::ptrdiff_t>((train_rows[i] + 1) * matrix.cols()),
                      x_train.row(i));
            y_train.push_back(labels.low.at(key) == 1 ? 1 : -1);
            groups.push_back(key.session_id);
        }

        learn::EnsembleConfig cfg = opts.learner;
        cfg.seed = derive_seed(opts.learner.seed, 0x666f6c64ULL, held);
        cfg.jobs = opts.jobs;
        try {
            learn::TrainedEnsemble ensemble = learn::train_ensemble(x_train, y_train, groups, cfg);
            fold.chosen_cost = ensemble.cost;
            fold.gamma = ensemble.gamma;
            fold.fit_fingerprint = fingerprint_fit(ensemble);
            for (std::size_t r : session_rows.at(fold.session_id)) {
                FoldPrediction pred;
                pred.key = matrix.rows[r];
                pred.prob = learn::ensemble_prob(ensemble, &matrix.cells[r * matrix.cols()]);
                pred.label = labels.low.at(pred.key);
                fold.predictions.push_back(std::move(pred));
            }
        } catch (const SingleClass& e) {
            fold.skipped = true;
            fold.skip_reason = e.what();
        } catch (const NoPositives& e) {
            fold.skipped = true;
            fold.skip_reason = e.what();
        }
        report.folds.push_back(std::move(fold));
    }

    std::vector<ScoredItem> pooled;
    for (const FoldResult& fold : report.folds)
        for (const FoldPrediction& p : fold.predictions)
            pooled.push_back({p.key.str(), p.prob, p.label});
    report.participants = pooled.size();
    for (const ScoredItem& item : pooled) report.positives += item.label == 1 ? 1 : 0;
    report.chance_ap = pooled.empty()
                           ? 0.0
                           : static_cast<double>(report.positives) / static_cast<double>(pooled.size());
    report.pooled_ap = average_precision(std::move(pooled));
    return report;
}

std::map<std::string, EvalReport> face_ablation(const Corpus& corpus, const RunOptions& opts) {
    std::map<std::string, EvalReport> out;
    for (const char* set : {"face", "face_nosync", "face_synconly", "face_no200s", "face_200sonly"})
        out.emplace(set, run_experiment(corpus, set, Segment::Full, opts));
    return out;
}

std::string EvalReport::to_json() const {
    json j;
    j["feature_set"] = feature_set;
    j["segment"] = segment_name(segment);
    j["learner"] = learner_json(learner);
    j["pooled_ap"] = pooled_ap;
    j["chance_ap"] = chance_ap;
    j["participants"] = participants;
    j["positives"] = positives;
    json jfolds = json::array();
    for (const FoldResult& f : folds) {
        json jf;
        jf["session"] = f.session_id;
        jf["skipped"] = f.skipped;
        if (f.skipped) {
            jf["skip_reason"] = f.skip_reason;
        } else {
            jf["chosen_cost"] = f.chosen_cost;
            jf["gamma"] = f.gamma;
            jf["fit_fingerprint"] = f.fit_fingerprint;
            json preds = json::array();
            for (const FoldPrediction& p : f.predictions)
                preds.push_back({{"participant", p.key.participant_id},
                                 {"prob", p.prob},
                                 {"label", p.label}});
            jf["predictions"] = std::move(preds);
        }
        jfolds.push_back(std::move(jf));
    }
    j["folds"] = std::move(jfolds);
    return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof line, "%-24s %-8s %10s %10s\n", "feature set", "segment",
                  "pooled AP", "chance");
    out += line;
    std::snprintf(line, sizeof line, "%-24s %-8s %10.4f %10.4f\n", feature_set.c_str(),
                  segment_name(segment), pooled_ap, chance_ap);
    out += line;
    return out;
}

}  // namespace rapport::eval
