#ifndef RAPPORT_FEATURES_RELATIONAL_HPP
#define RAPPORT_FEATURES_RELATIONAL_HPP

#include <map>
#include <string>

#include "rapport/features/unimodal.hpp"
#include "rapport/series.hpp"
#include "rapport/types.hpp"

namespace rapport::features {

struct SyncConfig {
    double band = 5.0;                // Sakoe-Chiba band, seconds
    double rate = 5.0;                // resampling rate for sync signals, Hz
    bool normalize_by_length = true;  // divide cost by warping path length
    bool average_over_partners = true;  // mean instead of sum over partners

    int band_samples() const { return static_cast<int>(std::lround(band * rate)); }
};

// Banded dynamic time warping distance with absolute-difference local cost.
// Steps are (1,0), (0,1), (1,1) and the path must keep |i-j| <= band_samples.
// Among minimum-cost paths the shortest is used for length normalization.
// Throws EmptySeries, or Infeasible when the band cannot bridge the length
// difference.
double dtw_distance(const std::vector<double>& a, const std::vector<double>& b, int band_samples,
                    bool normalize_by_length = true);

// Behavioural signals that synchronisation is measured on.
enum class SyncSignal {
    PosiFace,
    AuIntensity,   // uses au_index
    AuActivation,  // uses au_index
    HandVelocity,
};

struct SyncSignalSpec {
    SyncSignal kind = SyncSignal::PosiFace;
    int au = 0;  // AU id for the Au* kinds
};

// Per-participant scalar signal prior to resampling.
TimeSeries extract_sync_signal(const SessionRecord& s, const ParticipantId& pid,
                               const SyncSignalSpec& spec, const FeatureConfig& fcfg);

// Average (or sum) of the DTW distances from the target's signal to every
// other participant's, on a cfg.rate grid. Larger = less synchronised.
// Missing when any involved series is empty or a pairing is infeasible.
double sync_score(const SessionRecord& s, const ParticipantId& pid, const SyncSignalSpec& spec,
                  const SyncConfig& cfg = {}, const FeatureConfig& fcfg = {});

// Cross-modal AU statistics conditioned on the speaking mask. Names follow
// the pattern AU09_tgt_speak / ProbAU09_oth_tgtspeak, see feature_sets.cpp.
struct CrossmodalAu {
    // indexed like kAuIds
    std::array<double, kAuCount> target_speak_intensity{};
    std::array<double, kAuCount> target_notspeak_intensity{};
    std::array<double, kAuCount> other_targetspeak_intensity{};
    std::array<double, kAuCount> target_otherspeak_intensity{};
    std::array<double, kAuCount> target_speak_prob{};
    std::array<double, kAuCount> target_notspeak_prob{};
    std::array<double, kAuCount> other_targetspeak_prob{};
    std::array<double, kAuCount> target_otherspeak_prob{};
};

CrossmodalAu crossmodal_au_features(const SessionRecord& s, const ParticipantId& pid);

// Mean hand velocity restricted to samples inside the target's turns;
// missing when no sample falls in a turn.
double hand_speech_feature(const SessionRecord& s, const ParticipantId& pid,
                           const FeatureConfig& cfg = {});

// True if t lies inside any of the speaker's turns ([start, end) intervals).
bool is_speaking(const SessionRecord& s, const ParticipantId& pid, double t);

}  // namespace rapport::features

#endif  // RAPPORT_FEATURES_RELATIONAL_HPP
