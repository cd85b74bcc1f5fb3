#ifndef RAPPORT_FEATURES_UNIMODAL_HPP
#define RAPPORT_FEATURES_UNIMODAL_HPP

#include <map>
#include <optional>
#include <string>

#include "rapport/series.hpp"
#include "rapport/types.hpp"

namespace rapport::features {

// Geometry and matching knobs shared by the per-modality extractors.
struct FeatureConfig {
    double facing_angle_deg = 30.0;   // facing(i->j) holds below this angle
    double head_match_window = 0.2;   // seconds; nearest-frame pairing limit
    double hand_gap_max = 0.5;        // seconds; longer gaps yield no velocity sample
    double window_200s = 200.0;       // span of the interaction-start variants
};

struct SpeechActivity {
    double time_speak = 0.0;          // fraction of session duration
    double time_turn = 0.0;           // mean turn length, seconds (missing if no turns)
    double rate_turn = 0.0;           // turns per minute
    double prob_turn_trans = 0.0;     // next-speaker share of transitions started by others
};

// TimeSpeak/TimeTurn/RateTurn and the turn-grabbing probability. Transitions
// are consecutive pairs of distinct speakers in turn-start order;
// ProbTurnTrans(pid) = (# transitions to pid) / (# transitions whose previous
// speaker is not pid), missing when the denominator is zero.
SpeechActivity speech_activity_features(const SessionRecord& s, const ParticipantId& pid);

// Per-dimension mean and population standard deviation over the target's
// per-turn prosody vectors: PRS001..PRS384 are means, PRS385..PRS768
// standard deviations. All missing when the target has no turns.
std::map<std::string, double> prosody_features(const SessionRecord& s, const ParticipantId& pid);

struct AuStats {
    std::array<double, kAuCount> mean_intensity{};   // AUx
    std::array<double, kAuCount> active_fraction{};  // ProbAUx
};

// Frame statistics over an optional [t0,t1) window (pass nullopt for the
// whole segment; [0,200) gives the 200s variants). Missing when no frame
// falls inside the window.
AuStats au_stats(const SessionRecord& s, const ParticipantId& pid,
                 std::optional<std::pair<double, double>> window = std::nullopt);

// Facial positivity indicator: +1 smiling (AU12 without the negativity
// pattern), -1 negativity (AU15 with AU1 or AU4, no AU12), 0 otherwise or
// when both patterns co-occur.
int posiface_value(const AuFrame& frame);
TimeSeries posiface_series(const std::vector<AuFrame>& au);

struct IndicatorStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

IndicatorStats posiface_stats(const TimeSeries& series,
                              std::optional<std::pair<double, double>> window = std::nullopt);

struct FacingFeatures {
    double facing = 0.0;         // others facing the target, time-averaged
    double mutual_facing = 0.0;  // both directions holding simultaneously
};

// Head-orientation attention features. Each partner's head frames are paired
// with the target's nearest frame within cfg.head_match_window; a frame pair
// counts as facing when the angle between the gaze direction and the
// connecting seat vector stays below cfg.facing_angle_deg. Missing when any
// head stream is empty.
FacingFeatures facing_features(const SessionRecord& s, const ParticipantId& pid,
                               const FeatureConfig& cfg = {});

// Speed samples on consecutive frame pairs where both hands are tracked at
// both ends and the gap stays below cfg.hand_gap_max. Sample timestamps are
// interval midpoints; dropouts produce no samples.
TimeSeries hand_velocity_series(const ParticipantStreams& streams, const FeatureConfig& cfg = {});

// Mean of hand_velocity_series; missing when the series is empty.
double hand_features(const SessionRecord& s, const ParticipantId& pid,
                     const FeatureConfig& cfg = {});

}  // namespace rapport::features

#endif  // RAPPORT_FEATURES_UNIMODAL_HPP
