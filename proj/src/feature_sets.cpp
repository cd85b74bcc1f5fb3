#include "rapport/features/feature_sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rapport/common.hpp"
#include "rapport/csv.hpp"

namespace rapport::features {

namespace {

const char* kBaseSets[] = {"speech_act", "prosody",     "face",        "face_nosync",
                           "face_synconly", "face_no200s", "face_200sonly", "hand",
                           "personality"};

void apply_base_set(const std::string& name, SetSpec& spec) {
    if (name == "speech_act") {
        spec.speech = true;
    } else if (name == "prosody") {
        spec.prosody = true;
    } else if (name == "hand") {
        spec.hand = true;
    } else if (name == "personality") {
        spec.personality = true;
    } else {
        FaceVariant v;
        if (name == "face")
            v = FaceVariant::Full;
        else if (name == "face_nosync")
            v = FaceVariant::NoSync;
        else if (name == "face_synconly")
            v = FaceVariant::SyncOnly;
        else if (name == "face_no200s")
            v = FaceVariant::No200s;
        else if (name == "face_200sonly")
            v = FaceVariant::Only200s;
        else
            throw UnknownFeatureSet("unknown feature set '" + name + "'");
        if (spec.face != FaceVariant::None && spec.face != v)
            throw UnknownFeatureSet("conflicting face variants in combination");
        spec.face = v;
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_sync_feature(const std::string& name) { return ends_with(name, "_sync"); }
bool is_200s_feature(const std::string& name) { return ends_with(name, "_200s"); }

bool face_variant_keeps(FaceVariant v, const std::string& name) {
    switch (v) {
        case FaceVariant::None: return false;
        case FaceVariant::Full: return true;
        case FaceVariant::NoSync: return !is_sync_feature(name);
        case FaceVariant::SyncOnly: return is_sync_feature(name);
        case FaceVariant::No200s: return !is_200s_feature(name);
        case FaceVariant::Only200s: return is_200s_feature(name);
    }
    return false;
}

}  // namespace

SetSpec resolve_feature_set(const std::string& name) {
    if (name.empty()) throw UnknownFeatureSet("empty feature set name");
    SetSpec spec;
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t pos = name.find('+', start);
        std::string part =
            pos == std::string::npos ? name.substr(start) : name.substr(start, pos - start);
        if (part.empty()) throw UnknownFeatureSet("malformed feature set name '" + name + "'");
        apply_base_set(part, spec);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return spec;
}

std::vector<std::string> registered_feature_sets() {
    return {std::begin(kBaseSets), std::end(kBaseSets)};
}

namespace {

// All sync signals in the face block, in kAuIds order per kind.
struct FaceSyncNames {
    static std::string intensity(int au_id) { return au_label(au_id) + "_sync"; }
    static std::string activation(int au_id) { return "Prob" + au_label(au_id) + "_sync"; }
};

// Pairwise DTW scores for one signal, shared across target participants.
// Returns per-participant score (average or sum over partners), or all
// missing when any participant's series is empty / a pairing is infeasible.
std::map<ParticipantId, double> sync_scores_shared(const SessionRecord& s,
                                                   const SyncSignalSpec& spec,
                                                   const ExtractConfig& cfg) {
    std::map<ParticipantId, double> out;
    Interp mode = (spec.kind == SyncSignal::PosiFace || spec.kind == SyncSignal::AuActivation)
                      ? Interp::Nearest
                      : Interp::Linear;

    std::vector<std::vector<double>> grids;
    grids.reserve(s.participants.size());
    for (const ParticipantId& pid : s.participants) {
        TimeSeries sig = extract_sync_signal(s, pid, spec, cfg.feature);
        if (sig.empty()) {
            for (const ParticipantId& p : s.participants) out[p] = kMissing;
            return out;
        }
        grids.push_back(resample(sig, cfg.sync.rate, mode).v);
    }

    std::size_t n = s.participants.size();
    std::vector<double> dist(n * n, 0.0);
    try {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double d = dtw_distance(grids[i], grids[j], cfg.sync.band_samples(),
                                        cfg.sync.normalize_by_length);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
    } catch (const Infeasible&) {
        for (const ParticipantId& p : s.participants) out[p] = kMissing;
        return out;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) total += dist[i * n + j];
        out[s.participants[i]] =
            cfg.sync.average_over_partners ? total / static_cast<double>(n - 1) : total;
    }
    return out;
}

void add_face_features(const SessionRecord& clip, bool include_200s, const ExtractConfig& cfg,
                       std::map<ParticipantId, std::map<std::string, double>>& acc) {
    std::pair<double, double> w200{0.0, cfg.feature.window_200s};

    for (const ParticipantId& pid : clip.participants) {
        auto& f = acc[pid];

        AuStats full = au_stats(clip, pid);
        for (std::size_t k = 0; k < kAuCount; ++k) {
            f[au_label(kAuIds[k])] = full.mean_intensity[k];
            f["Prob" + au_label(kAuIds[k])] = full.active_fraction[k];
        }
        if (include_200s) {
            AuStats early = au_stats(clip, pid, w200);
            for (std::size_t k = 0; k < kAuCount; ++k) {
                f[au_label(kAuIds[k]) + "_200s"] = early.mean_intensity[k];
                f["Prob" + au_label(kAuIds[k]) + "_200s"] = early.active_fraction[k];
            }
        }

        auto stream_it = clip.streams.find(pid);
        TimeSeries pf =
            stream_it != clip.streams.end() ? posiface_series(stream_it->second.au) : TimeSeries{};
        IndicatorStats ps = posiface_stats(pf);
        f["PosiFace_mean"] = ps.mean;
        f["PosiFace_std"] = ps.stddev;
        if (include_200s) {
            IndicatorStats p200 = posiface_stats(pf, w200);
            f["PosiFace_mean_200s"] = p200.mean;
            f["PosiFace_std_200s"] = p200.stddev;
        }

        FacingFeatures facing = facing_features(clip, pid, cfg.feature);
        f["Facing"] = facing.facing;
        f["MutualFacing"] = facing.mutual_facing;
    }

    // Synchronisation block: one pairwise matrix per signal.
    auto posiface_sync = sync_scores_shared(clip, {SyncSignal::PosiFace, 0}, cfg);
    for (const auto& [pid, v] : posiface_sync) acc[pid]["PosiFace_sync"] = v;

    std::map<ParticipantId, double> int_mean, act_mean;
    std::map<ParticipantId, bool> int_any_missing, act_any_missing;
    for (int au_id : kAuIds) {
        auto di = sync_scores_shared(clip, {SyncSignal::AuIntensity, au_id}, cfg);
        auto da = sync_scores_shared(clip, {SyncSignal::AuActivation, au_id}, cfg);
        for (const auto& [pid, v] : di) {
            acc[pid][FaceSyncNames::intensity(au_id)] = v;
            if (is_missing(v))
                int_any_missing[pid] = true;
            else
                int_mean[pid] += v;
        }
        for (const auto& [pid, v] : da) {
            acc[pid][FaceSyncNames::activation(au_id)] = v;
            if (is_missing(v))
                act_any_missing[pid] = true;
            else
                act_mean[pid] += v;
        }
    }
    for (const ParticipantId& pid : clip.participants) {
        acc[pid]["AU_sync"] = int_any_missing[pid]
                                  ? kMissing
                                  : int_mean[pid] / static_cast<double>(kAuCount);
        acc[pid]["ProbAU_sync"] = act_any_missing[pid]
                                      ? kMissing
                                      : act_mean[pid] / static_cast<double>(kAuCount);
    }
}

void add_crossmodal_face_speech(const SessionRecord& clip,
                                std::map<ParticipantId, std::map<std::string, double>>& acc) {
    for (const ParticipantId& pid : clip.participants) {
        CrossmodalAu cm = crossmodal_au_features(clip, pid);
        auto& f = acc[pid];
        for (std::size_t k = 0; k < kAuCount; ++k) {
            std::string au = au_label(kAuIds[k]);
            f[au + "_tgt_speak"] = cm.target_speak_intensity[k];
            f[au + "_tgt_notspeak"] = cm.target_notspeak_intensity[k];
            f[au + "_oth_tgtspeak"] = cm.other_targetspeak_intensity[k];
            f[au + "_tgt_othspeak"] = cm.target_otherspeak_intensity[k];
            f["Prob" + au + "_tgt_speak"] = cm.target_speak_prob[k];
            f["Prob" + au + "_tgt_notspeak"] = cm.target_notspeak_prob[k];
            f["Prob" + au + "_oth_tgtspeak"] = cm.other_targetspeak_prob[k];
            f["Prob" + au + "_tgt_othspeak"] = cm.target_otherspeak_prob[k];
        }
    }
}

}  // namespace

std::map<ParticipantId, FeatureVector> extract_session_features(
    const SessionRecord& s, const RatingsRecord& ratings, const std::string& set_name,
    Segment segment, const ExtractConfig& cfg) {
    SetSpec spec = resolve_feature_set(set_name);
    bool include_200s = segment == Segment::Full || segment == Segment::First;
    if (spec.face == FaceVariant::Only200s && !include_200s)
        throw InvalidConfig("feature set '" + set_name +
                            "' is empty for segment '" + std::string(segment_name(segment)) +
                            "': 200s features are only defined for full and first");

    SessionRecord clip = clip_segment(s, segment);
    std::map<ParticipantId, std::map<std::string, double>> acc;
    for (const ParticipantId& pid : clip.participants) acc[pid];  // ensure rows exist

    if (spec.speech) {
        for (const ParticipantId& pid : clip.participants) {
            SpeechActivity sa = speech_activity_features(clip, pid);
            auto& f = acc[pid];
            f["TimeSpeak"] = sa.time_speak;
            f["TimeTurn"] = sa.time_turn;
            f["RateTurn"] = sa.rate_turn;
            f["ProbTurnTrans"] = sa.prob_turn_trans;
        }
    }
    if (spec.prosody) {
        for (const ParticipantId& pid : clip.participants) {
            auto prs = prosody_features(clip, pid);
            acc[pid].insert(prs.begin(), prs.end());
        }
    }
    if (spec.face != FaceVariant::None) {
        std::map<ParticipantId, std::map<std::string, double>> face_acc;
        for (const ParticipantId& pid : clip.participants) face_acc[pid];
        add_face_features(clip, include_200s, cfg, face_acc);
        for (auto& [pid, f] : face_acc)
            for (auto& [name, value] : f)
                if (face_variant_keeps(spec.face, name)) acc[pid][name] = value;
    }
    if (spec.hand) {
        for (const ParticipantId& pid : clip.participants)
            acc[pid]["VelHand"] = hand_features(clip, pid, cfg.feature);
        auto vh_sync = sync_scores_shared(clip, {SyncSignal::HandVelocity, 0}, cfg);
        for (const auto& [pid, v] : vh_sync) acc[pid]["VelHand_sync"] = v;
    }
    if (spec.personality) {
        for (const ParticipantId& pid : clip.participants) {
            auto it = ratings.personality.find(pid);
            if (it == ratings.personality.end())
                throw SchemaViolation("personality scores missing for '" + pid + "'");
            auto& f = acc[pid];
            f["NEO_O"] = it->second.openness;
            f["NEO_C"] = it->second.conscientiousness;
            f["NEO_E"] = it->second.extraversion;
            f["NEO_A"] = it->second.agreeableness;
            f["NEO_N"] = it->second.neuroticism;
        }
    }
    if (spec.cross_face_speech()) add_crossmodal_face_speech(clip, acc);
    if (spec.cross_hand_speech()) {
        for (const ParticipantId& pid : clip.participants)
            acc[pid]["VelHand_tgt_speak"] = hand_speech_feature(clip, pid, cfg.feature);
    }

    std::map<ParticipantId, FeatureVector> out;
    for (auto& [pid, values] : acc) {
        FeatureVector fv;
        fv.participant = pid;
        fv.segment = segment;
        fv.values = std::move(values);
        out.emplace(pid, std::move(fv));
    }
    return out;
}

FeatureVector assemble_features(const SessionRecord& s, const RatingsRecord& ratings,
                                const ParticipantId& pid, const std::string& set_name,
                                Segment segment, const ExtractConfig& cfg) {
    if (!s.has_participant(pid)) throw UnknownParticipant("no participant '" + pid + "'");
    auto all = extract_session_features(s, ratings, set_name, segment, cfg);
    return all.at(pid);
}

std::vector<std::string> feature_names(const std::string& set_name, Segment segment) {
    SetSpec spec = resolve_feature_set(set_name);
    bool include_200s = segment == Segment::Full || segment == Segment::First;

    std::vector<std::string> names;
    if (spec.speech) {
        names.insert(names.end(), {"TimeSpeak", "TimeTurn", "RateTurn", "ProbTurnTrans"});
    }
    if (spec.prosody) {
        for (std::size_t k = 1; k <= 2 * ProsodyVector::kDim; ++k) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "PRS%03zu", k);
            names.emplace_back(buf);
        }
    }
    if (spec.face != FaceVariant::None) {
        std::vector<std::string> face;
        for (int id : kAuIds) {
            face.push_back(au_label(id));
            face.push_back("Prob" + au_label(id));
            face.push_back(au_label(id) + "_sync");
            face.push_back("Prob" + au_label(id) + "_sync");
            if (include_200s) {
                face.push_back(au_label(id) + "_200s");
                face.push_back("Prob" + au_label(id) + "_200s");
            }
        }
        face.insert(face.end(), {"AU_sync", "ProbAU_sync", "PosiFace_mean", "PosiFace_std",
                                 "PosiFace_sync", "Facing", "MutualFacing"});
        if (include_200s) face.insert(face.end(), {"PosiFace_mean_200s", "PosiFace_std_200s"});
        for (const std::string& n : face)
            if (face_variant_keeps(spec.face, n)) names.push_back(n);
    }
    if (spec.hand) names.insert(names.end(), {"VelHand", "VelHand_sync"});
    if (spec.personality)
        names.insert(names.end(), {"NEO_O", "NEO_C", "NEO_E", "NEO_A", "NEO_N"});
    if (spec.cross_face_speech()) {
        for (int id : kAuIds)
            for (const char* suffix : {"_tgt_speak", "_tgt_notspeak", "_oth_tgtspeak", "_tgt_othspeak"}) {
                names.push_back(au_label(id) + suffix);
                names.push_back("Prob" + au_label(id) + suffix);
            }
    }
    if (spec.cross_hand_speech()) names.push_back("VelHand_tgt_speak");

    std::sort(names.begin(), names.end());
    if (names.empty())
        throw InvalidConfig("feature set '" + set_name + "' is empty for segment '" +
                            segment_name(segment) + "'");
    return names;
}

FeatureMatrix build_feature_matrix(const Corpus& corpus, const std::string& set_name,
                                   Segment segment, const ExtractConfig& cfg, int jobs) {
    FeatureMatrix m;
    m.names = feature_names(set_name, segment);

    std::vector<std::map<ParticipantId, FeatureVector>> per_session(corpus.size());
    parallel_for(corpus.size(), jobs, [&](std::size_t i) {
        per_session[i] = extract_session_features(corpus[i].first, corpus[i].second, set_name,
                                                  segment, cfg);
    });

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const SessionRecord& s = corpus[i].first;
        for (const ParticipantId& pid : s.participants) {
            const FeatureVector& fv = per_session[i].at(pid);
            if (fv.values.size() != m.names.size())
                throw SchemaViolation("feature count mismatch for " + s.session_id + ":" + pid);
            m.rows.push_back({s.session_id, pid});
            for (const std::string& name : m.names) {
                auto it = fv.values.find(name);
                if (it == fv.values.end())
                    throw SchemaViolation("feature '" + name + "' missing from vector");
                m.cells.push_back(it->second);
            }
        }
    }
    return m;
}

void write_feature_csv(const FeatureMatrix& m, Segment segment, const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> header = {"session", "participant", "segment"};
    header.insert(header.end(), m.names.begin(), m.names.end());
    w.row(header);
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        std::vector<std::string> cells = {m.rows[r].session_id, m.rows[r].participant_id,
                                          segment_name(segment)};
        for (std::size_t c = 0; c < m.names.size(); ++c)
            cells.push_back(format_number(m.at(r, c)));
        w.row(cells);
    }
}

}  // namespace rapport::features
