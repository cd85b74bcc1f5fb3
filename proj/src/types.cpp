#include "rapport/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "rapport/common.hpp"

namespace rapport {

int au_index(int au_id) {
    for (std::size_t i = 0; i < kAuIds.size(); ++i)
        if (kAuIds[i] == au_id) return static_cast<int>(i);
    return -1;
}

std::string au_label(int au_id) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "AU%02d", au_id);
    return buf;
}

bool SessionRecord::has_participant(const ParticipantId& pid) const {
    return std::find(participants.begin(), participants.end(), pid) != participants.end();
}

double AttributeScores::get(const std::string& attribute) const {
    if (attribute == "rapport") return rapport;
    if (attribute == "leadership") return leadership;
    if (attribute == "dominance") return dominance;
    if (attribute == "competence") return competence;
    if (attribute == "liking") return liking;
    throw UnknownFeatureSet("unknown attribute: " + attribute);
}

const char* segment_name(Segment s) {
    switch (s) {
        case Segment::Full: return "full";
        case Segment::First: return "first";
        case Segment::Middle: return "middle";
        case Segment::Last: return "last";
    }
    return "full";
}

std::optional<Segment> parse_segment(const std::string& name) {
    if (name == "full") return Segment::Full;
    if (name == "first") return Segment::First;
    if (name == "middle") return Segment::Middle;
    if (name == "last") return Segment::Last;
    return std::nullopt;
}

namespace {

template <typename Frame>
void clip_frames(const std::vector<Frame>& in, double lo, double hi, bool closed_end,
                 std::vector<Frame>& out) {
    for (const Frame& f : in) {
        bool inside = f.t >= lo && (closed_end ? f.t <= hi : f.t < hi);
        if (!inside) continue;
        Frame g = f;
        g.t = f.t - lo;
        out.push_back(g);
    }
}

}  // namespace

SessionRecord clip_segment(const SessionRecord& s, Segment segment) {
    if (segment == Segment::Full) return s;

    double third = s.duration / 3.0;
    double lo = 0.0, hi = third;
    bool closed_end = false;
    if (segment == Segment::Middle) {
        lo = third;
        hi = 2.0 * third;
    } else if (segment == Segment::Last) {
        lo = 2.0 * third;
        hi = s.duration;
        closed_end = true;  // a sample exactly at `duration` belongs to the last third
    }

    SessionRecord out;
    out.session_id = s.session_id;
    out.participants = s.participants;
    out.duration = hi - lo;

    // Truncate turns to the window; zero-length leftovers are dropped.
    // old turn index -> new index, for prosody re-mapping.
    std::map<std::size_t, std::size_t> turn_remap;
    for (std::size_t i = 0; i < s.turns.size(); ++i) {
        const TurnSegment& t = s.turns[i];
        double a = std::max(t.start, lo);
        double b = std::min(t.end, hi);
        if (b - a <= 0.0) continue;
        turn_remap[i] = out.turns.size();
        out.turns.push_back({t.speaker, a - lo, b - lo});
    }

    for (const auto& [pid, st] : s.streams) {
        ParticipantStreams dst;
        clip_frames(st.au, lo, hi, closed_end, dst.au);
        clip_frames(st.head, lo, hi, closed_end, dst.head);
        clip_frames(st.hands, lo, hi, closed_end, dst.hands);
        for (const auto& [turn_idx, vec] : st.prosody) {
            auto it = turn_remap.find(turn_idx);
            if (it != turn_remap.end()) dst.prosody.emplace_back(it->second, vec);
        }
        out.streams.emplace(pid, std::move(dst));
    }
    return out;
}

namespace {

template <typename Frame>
void check_timestamps(const std::vector<Frame>& frames, double duration,
                      const std::string& where, std::vector<std::string>& out) {
    double prev = -1.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        double t = frames[i].t;
        if (t < 0.0 || t > duration)
            out.push_back(where + "[" + std::to_string(i) + "]: timestamp " + std::to_string(t) +
                          " outside [0, duration]");
        if (i > 0 && t <= prev)
            out.push_back(where + "[" + std::to_string(i) + "]: timestamps not strictly increasing");
        prev = t;
    }
}

}  // namespace

std::vector<std::string> validate_session(const SessionRecord& s) {
    std::vector<std::string> v;

    if (s.participants.size() < 3 || s.participants.size() > 4)
        v.push_back("participants: size " + std::to_string(s.participants.size()) +
                    " not in [3,4]");
    {
        std::set<ParticipantId> uniq(s.participants.begin(), s.participants.end());
        if (uniq.size() != s.participants.size())
            v.push_back("participants: ids not distinct");
    }
    if (!(s.duration > 0.0)) v.push_back("duration: must be > 0");

    for (std::size_t i = 0; i < s.turns.size(); ++i) {
        const TurnSegment& t = s.turns[i];
        std::string where = "turns[" + std::to_string(i) + "]";
        if (!s.has_participant(t.speaker)) v.push_back(where + ": unknown speaker '" + t.speaker + "'");
        if (!(t.end - t.start > 0.0)) v.push_back(where + ": end - start must be > 0");
        if (t.start < 0.0 || t.end > s.duration) v.push_back(where + ": outside [0, duration]");
    }

    // same-speaker turns must not overlap (cross-speaker overlap is natural)
    for (const ParticipantId& pid : s.participants) {
        std::vector<std::pair<double, double>> spans;
        for (const TurnSegment& t : s.turns)
            if (t.speaker == pid) spans.emplace_back(t.start, t.end);
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i)
            if (spans[i].first < spans[i - 1].second) {
                v.push_back("turns: speaker '" + pid + "' has overlapping turns");
                break;
            }
    }

    for (const ParticipantId& pid : s.participants)
        if (!s.streams.count(pid)) v.push_back("streams: participant '" + pid + "' missing");
    for (const auto& [pid, st] : s.streams) {
        if (!s.has_participant(pid)) {
            v.push_back("streams: unknown participant '" + pid + "'");
            continue;
        }
        std::string base = "streams[" + pid + "]";
        check_timestamps(st.au, s.duration, base + ".au", v);
        check_timestamps(st.head, s.duration, base + ".head", v);
        check_timestamps(st.hands, s.duration, base + ".hands", v);

        for (std::size_t i = 0; i < st.au.size(); ++i) {
            const AuFrame& f = st.au[i];
            if (f.confidence < 0.0 || f.confidence > 1.0)
                v.push_back(base + ".au[" + std::to_string(i) + "]: confidence outside [0,1]");
            for (std::size_t k = 0; k < kAuCount; ++k) {
                if (f.intensity[k] < -1e-9 || f.intensity[k] > 5.0 + 1e-9) {
                    v.push_back(base + ".au[" + std::to_string(i) + "]: intensity outside [0,5]");
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < st.head.size(); ++i) {
            const HeadFrame& f = st.head[i];
            double n = std::sqrt(f.facing_dir[0] * f.facing_dir[0] +
                                 f.facing_dir[1] * f.facing_dir[1] +
                                 f.facing_dir[2] * f.facing_dir[2]);
            if (std::fabs(n - 1.0) > 1e-6)
                v.push_back(base + ".head[" + std::to_string(i) + "]: facing_dir not unit length");
        }
        for (std::size_t i = 0; i < st.hands.size(); ++i) {
            const HandFrame& f = st.hands[i];
            bool both = f.left.has_value() && f.right.has_value();
            if (f.both_detected != both)
                v.push_back(base + ".hands[" + std::to_string(i) +
                            "]: both_detected inconsistent with detections");
            for (const auto& hand : {f.left, f.right}) {
                if (!hand) continue;
                if ((*hand)[0] < -1e-9 || (*hand)[0] > 1.0 + 1e-9 || (*hand)[1] < -1e-9 ||
                    (*hand)[1] > 1.0 + 1e-9) {
                    v.push_back(base + ".hands[" + std::to_string(i) + "]: position outside [0,1]^2");
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < st.prosody.size(); ++i) {
            const auto& [turn_idx, vec] = st.prosody[i];
            if (turn_idx >= s.turns.size())
                v.push_back(base + ".prosody[" + std::to_string(i) + "]: turn_index out of range");
            else if (s.turns[turn_idx].speaker != pid)
                v.push_back(base + ".prosody[" + std::to_string(i) +
                            "]: turn_index refers to another speaker's turn");
            if (vec.values.size() != ProsodyVector::kDim)
                v.push_back(base + ".prosody[" + std::to_string(i) + "]: dimension " +
                            std::to_string(vec.values.size()) + " != 384");
        }
    }
    return v;
}

std::vector<std::string> validate_ratings(const SessionRecord& s, const RatingsRecord& r) {
    std::vector<std::string> v;
    std::size_t n = s.participants.size();
    std::size_t expected_pairs = n * (n - 1);
    if (r.directed.size() != expected_pairs)
        v.push_back("ratings: expected " + std::to_string(expected_pairs) + " directed pairs, got " +
                    std::to_string(r.directed.size()));
    for (const auto& [pair, scores] : r.directed) {
        const auto& [rater, ratee] = pair;
        if (rater == ratee) v.push_back("ratings: self-rating by '" + rater + "'");
        if (!s.has_participant(rater) || !s.has_participant(ratee))
            v.push_back("ratings: pair (" + rater + "," + ratee + ") names unknown participant");
        for (double x : {scores.rapport, scores.leadership, scores.dominance, scores.competence,
                         scores.liking})
            if (x < 1.0 - 1e-9 || x > 7.0 + 1e-9) {
                v.push_back("ratings: (" + rater + "," + ratee + ") score outside [1,7]");
                break;
            }
    }
    for (const ParticipantId& pid : s.participants)
        if (!r.personality.count(pid))
            v.push_back("ratings: personality scores missing for '" + pid + "'");
    return v;
}

}  // namespace rapport
