#ifndef RAPPORT_FEATURES_FEATURE_SETS_HPP
#define RAPPORT_FEATURES_FEATURE_SETS_HPP

#include <map>
#include <string>
#include <vector>

#include "rapport/features/relational.hpp"
#include "rapport/features/unimodal.hpp"
#include "rapport/types.hpp"

namespace rapport::features {

// Named real-valued features for one (participant, feature set, segment)
// triple. Values use kMissing for unavailable entries; the map keeps names
// sorted so matrices are reproducible.
struct FeatureVector {
    ParticipantId participant;
    Segment segment = Segment::Full;
    std::map<std::string, double> values;
};

enum class FaceVariant { None, Full, NoSync, SyncOnly, No200s, Only200s };

// Parsed form of a feature-set name such as "face_nosync+personality".
struct SetSpec {
    bool speech = false;
    bool prosody = false;
    bool hand = false;
    bool personality = false;
    FaceVariant face = FaceVariant::None;

    bool cross_face_speech() const { return face != FaceVariant::None && speech; }
    bool cross_hand_speech() const { return hand && speech; }
};

// Registered taxonomy: speech_act, prosody, face, face_nosync, face_synconly,
// face_no200s, face_200sonly, hand, personality, and '+'-joined combinations.
// Combinations that include both a face variant and speech_act add the
// cross-modal AU-by-speech block; hand plus speech_act adds the
// hand-while-speaking feature. Throws UnknownFeatureSet.
SetSpec resolve_feature_set(const std::string& name);

std::vector<std::string> registered_feature_sets();

struct ExtractConfig {
    FeatureConfig feature;
    SyncConfig sync;
};

// Features of every participant of one session for the given set and
// temporal segment, sharing the pairwise DTW work across participants.
std::map<ParticipantId, FeatureVector> extract_session_features(
    const SessionRecord& s, const RatingsRecord& ratings, const std::string& set_name,
    Segment segment, const ExtractConfig& cfg = {});

// Single-participant convenience wrapper over extract_session_features.
FeatureVector assemble_features(const SessionRecord& s, const RatingsRecord& ratings,
                                const ParticipantId& pid, const std::string& set_name,
                                Segment segment, const ExtractConfig& cfg = {});

// Sorted names the given set produces for a segment (the 200s variants are
// only defined for full and first segments).
std::vector<std::string> feature_names(const std::string& set_name, Segment segment);

// Row-major matrix over (session, participant) rows with fixed column order.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<ParticipantKey> rows;
    std::vector<double> cells;  // rows.size() x names.size(), kMissing for gaps

    std::size_t cols() const { return names.size(); }
    double at(std::size_t r, std::size_t c) const { return cells[r * names.size() + c]; }
};

FeatureMatrix build_feature_matrix(const Corpus& corpus, const std::string& set_name,
                                   Segment segment, const ExtractConfig& cfg = {}, int jobs = 0);

// CSV export: session,participant,segment columns then the sorted feature
// names; missing values become empty cells.
void write_feature_csv(const FeatureMatrix& m, Segment segment, const std::string& path);

}  // namespace rapport::features

#endif  // RAPPORT_FEATURES_FEATURE_SETS_HPP
