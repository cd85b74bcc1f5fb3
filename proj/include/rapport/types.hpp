#ifndef RAPPORT_TYPES_HPP
#define RAPPORT_TYPES_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rapport {

// The 17 facial action units carried by every AU frame, in file-column order.
inline constexpr std::array<int, 17> kAuIds = {1,  2,  4,  5,  6,  7,  9,  10, 12,
                                               14, 15, 17, 20, 23, 25, 26, 45};
inline constexpr std::size_t kAuCount = kAuIds.size();

// Index into kAuIds for a given AU id, or -1.
int au_index(int au_id);

// Zero-padded label such as "AU09"; prob variants use "ProbAU09".
std::string au_label(int au_id);

using ParticipantId = std::string;

struct TurnSegment {
    ParticipantId speaker;
    double start = 0.0;  // seconds
    double end = 0.0;    // seconds, end > start
};

struct AuFrame {
    double t = 0.0;
    double confidence = 1.0;                 // [0,1]
    std::array<double, kAuCount> intensity{};  // [0,5]
    std::array<std::uint8_t, kAuCount> active{};
};

struct HeadFrame {
    double t = 0.0;
    std::array<double, 3> seat_position{};  // metres, room frame
    std::array<double, 3> facing_dir{};     // unit vector, room frame
};

struct HandFrame {
    double t = 0.0;
    std::optional<std::array<double, 2>> left;   // normalized image coords
    std::optional<std::array<double, 2>> right;
    bool both_detected = false;
};

struct ProsodyVector {
    static constexpr std::size_t kDim = 384;
    std::vector<double> values;  // exactly kDim entries
};

struct ParticipantStreams {
    std::vector<AuFrame> au;
    std::vector<HeadFrame> head;
    std::vector<HandFrame> hands;
    // (index into SessionRecord::turns, per-turn acoustic descriptor)
    std::vector<std::pair<std::size_t, ProsodyVector>> prosody;
};

struct SessionRecord {
    std::string session_id;
    std::vector<ParticipantId> participants;  // 3 or 4, distinct
    double duration = 0.0;                    // seconds
    std::vector<TurnSegment> turns;
    std::map<ParticipantId, ParticipantStreams> streams;

    bool has_participant(const ParticipantId& pid) const;
};

// Post-hoc questionnaire scores for one session.
struct AttributeScores {
    double rapport = 0.0;
    double leadership = 0.0;
    double dominance = 0.0;
    double competence = 0.0;
    double liking = 0.0;

    double get(const std::string& attribute) const;
};

struct PersonalityScores {
    double openness = 0.0;
    double conscientiousness = 0.0;
    double extraversion = 0.0;
    double agreeableness = 0.0;
    double neuroticism = 0.0;
};

struct RatingsRecord {
    // (rater, ratee) -> scores; exactly all ordered pairs of distinct
    // participants, no self-ratings.
    std::map<std::pair<ParticipantId, ParticipantId>, AttributeScores> directed;
    std::map<ParticipantId, PersonalityScores> personality;
};

// Globally unique participant key; participant ids are only unique within a
// session.
struct ParticipantKey {
    std::string session_id;
    ParticipantId participant_id;

    auto operator<=>(const ParticipantKey&) const = default;
    std::string str() const { return session_id + ":" + participant_id; }
};

struct LabelSet {
    std::map<ParticipantKey, double> score;  // aggregated received rapport
    std::map<ParticipantKey, int> low;       // 1 = below the corpus lower quartile
};

using Corpus = std::vector<std::pair<SessionRecord, RatingsRecord>>;

// The temporal slice features are extracted from.
enum class Segment { Full, First, Middle, Last };

const char* segment_name(Segment s);
std::optional<Segment> parse_segment(const std::string& name);

// Restricts streams and turns to one equal-duration third (or returns a copy
// for Segment::Full). Turns straddling a boundary are truncated to it and
// timestamps are re-based to zero.
SessionRecord clip_segment(const SessionRecord& s, Segment segment);

// Invariant checks for a parsed session; returns one description per
// violation (empty means the record is well formed).
std::vector<std::string> validate_session(const SessionRecord& s);

// Companion check for the ratings attached to a session.
std::vector<std::string> validate_ratings(const SessionRecord& s, const RatingsRecord& r);

}  // namespace rapport

#endif  // RAPPORT_TYPES_HPP
