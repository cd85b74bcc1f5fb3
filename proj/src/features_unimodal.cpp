#include "rapport/features/unimodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rapport/common.hpp"

namespace rapport::features {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct OrderedTurn {
    double start;
    double end;
    const ParticipantId* speaker;
};

std::vector<OrderedTurn> turns_by_start(const SessionRecord& s) {
    std::vector<OrderedTurn> ordered;
    ordered.reserve(s.turns.size());
    for (const TurnSegment& t : s.turns) ordered.push_back({t.start, t.end, &t.speaker});
    std::sort(ordered.begin(), ordered.end(), [](const OrderedTurn& a, const OrderedTurn& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return *a.speaker < *b.speaker;
    });
    return ordered;
}

}  // namespace

SpeechActivity speech_activity_features(const SessionRecord& s, const ParticipantId& pid) {
    SpeechActivity out;

    double spoken = 0.0;
    std::size_t turn_count = 0;
    for (const TurnSegment& t : s.turns) {
        if (t.speaker != pid) continue;
        spoken += t.end - t.start;
        ++turn_count;
    }
    out.time_speak = spoken / s.duration;
    out.time_turn = turn_count > 0 ? spoken / static_cast<double>(turn_count) : kMissing;
    out.rate_turn = static_cast<double>(turn_count) / (s.duration / 60.0);

    auto ordered = turns_by_start(s);
    std::size_t taken = 0, offered = 0;
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        const ParticipantId& prev = *ordered[i - 1].speaker;
        const ParticipantId& next = *ordered[i].speaker;
        if (prev == next) continue;  // not a transition
        if (prev == pid) continue;   // target already held the floor
        ++offered;
        if (next == pid) ++taken;
    }
    out.prob_turn_trans =
        offered > 0 ? static_cast<double>(taken) / static_cast<double>(offered) : kMissing;
    return out;
}

std::map<std::string, double> prosody_features(const SessionRecord& s, const ParticipantId& pid) {
    constexpr std::size_t dim = ProsodyVector::kDim;
    auto name = [](std::size_t one_based) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "PRS%03zu", one_based);
        return std::string(buf);
    };

    std::map<std::string, double> out;
    auto it = s.streams.find(pid);
    const auto* entries = it != s.streams.end() ? &it->second.prosody : nullptr;

    if (!entries || entries->empty()) {
        for (std::size_t k = 0; k < 2 * dim; ++k) out[name(k + 1)] = kMissing;
        return out;
    }

    std::vector<double> mean(dim, 0.0), m2(dim, 0.0);
    for (const auto& [turn_idx, vec] : *entries)
        for (std::size_t k = 0; k < dim; ++k) mean[k] += vec.values[k];
    auto n = static_cast<double>(entries->size());
    for (std::size_t k = 0; k < dim; ++k) mean[k] /= n;
    for (const auto& [turn_idx, vec] : *entries)
        for (std::size_t k = 0; k < dim; ++k) {
            double d = vec.values[k] - mean[k];
            m2[k] += d * d;
        }

    for (std::size_t k = 0; k < dim; ++k) {
        out[name(k + 1)] = mean[k];
        out[name(dim + k + 1)] = std::sqrt(m2[k] / n);
    }
    return out;
}

AuStats au_stats(const SessionRecord& s, const ParticipantId& pid,
                 std::optional<std::pair<double, double>> window) {
    AuStats out;
    out.mean_intensity.fill(kMissing);
    out.active_fraction.fill(kMissing);

    auto it = s.streams.find(pid);
    if (it == s.streams.end()) return out;

    std::array<double, kAuCount> sum{};
    std::array<double, kAuCount> act{};
    std::size_t n = 0;
    for (const AuFrame& f : it->second.au) {
        if (window && (f.t < window->first || f.t >= window->second)) continue;
        for (std::size_t k = 0; k < kAuCount; ++k) {
            sum[k] += f.intensity[k];
            act[k] += f.active[k];
        }
        ++n;
    }
    if (n == 0) return out;
    for (std::size_t k = 0; k < kAuCount; ++k) {
        out.mean_intensity[k] = sum[k] / static_cast<double>(n);
        out.active_fraction[k] = act[k] / static_cast<double>(n);
    }
    return out;
}

int posiface_value(const AuFrame& frame) {
    static const int i1 = au_index(1), i4 = au_index(4), i12 = au_index(12), i15 = au_index(15);
    bool positive = frame.active[i12] != 0;
    bool negative = frame.active[i15] != 0 && (frame.active[i1] != 0 || frame.active[i4] != 0);
    if (positive && !negative) return 1;
    if (negative && !positive) return -1;
    return 0;
}

TimeSeries posiface_series(const std::vector<AuFrame>& au) {
    TimeSeries out;
    out.t.reserve(au.size());
    out.v.reserve(au.size());
    for (const AuFrame& f : au) out.push(f.t, static_cast<double>(posiface_value(f)));
    return out;
}

IndicatorStats posiface_stats(const TimeSeries& series,
                              std::optional<std::pair<double, double>> window) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (window && (series.t[i] < window->first || series.t[i] >= window->second)) continue;
        sum += series.v[i];
        ++n;
    }
    if (n == 0) return {kMissing, kMissing};
    double mean = sum / static_cast<double>(n);
    double m2 = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (window && (series.t[i] < window->first || series.t[i] >= window->second)) continue;
        double d = series.v[i] - mean;
        m2 += d * d;
    }
    return {mean, std::sqrt(m2 / static_cast<double>(n))};
}

namespace {

// Index of the frame in `frames` whose timestamp is nearest to t, if within
// `window` seconds. Assumes strictly increasing timestamps.
std::optional<std::size_t> nearest_frame(const std::vector<HeadFrame>& frames, double t,
                                         double window) {
    if (frames.empty()) return std::nullopt;
    auto cmp = [](const HeadFrame& f, double q) { return f.t < q; };
    auto it = std::lower_bound(frames.begin(), frames.end(), t, cmp);
    std::size_t best;
    if (it == frames.begin())
        best = 0;
    else if (it == frames.end())
        best = frames.size() - 1;
    else {
        std::size_t hi = static_cast<std::size_t>(it - frames.begin());
        best = (frames[hi].t - t < t - frames[hi - 1].t) ? hi : hi - 1;
    }
    if (std::fabs(frames[best].t - t) > window) return std::nullopt;
    return best;
}

// angle(gaze of `from`, seat(to) - seat(from)) <= threshold
bool is_facing(const HeadFrame& from, const HeadFrame& to, double cos_threshold) {
    double dx = to.seat_position[0] - from.seat_position[0];
    double dy = to.seat_position[1] - from.seat_position[1];
    double dz = to.seat_position[2] - from.seat_position[2];
    double norm = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (norm <= 0.0) return false;
    double dot =
        (from.facing_dir[0] * dx + from.facing_dir[1] * dy + from.facing_dir[2] * dz) / norm;
    return dot >= cos_threshold;
}

}  // namespace

FacingFeatures facing_features(const SessionRecord& s, const ParticipantId& pid,
                               const FeatureConfig& cfg) {
    double cos_threshold = std::cos(cfg.facing_angle_deg * kPi / 180.0);

    auto target_it = s.streams.find(pid);
    if (target_it == s.streams.end() || target_it->second.head.empty())
        return {kMissing, kMissing};
    const auto& target_head = target_it->second.head;

    double facing_sum = 0.0, mutual_sum = 0.0;
    std::size_t partners_facing = 0, partners_mutual = 0;
    for (const ParticipantId& other : s.participants) {
        if (other == pid) continue;
        auto other_it = s.streams.find(other);
        if (other_it == s.streams.end() || other_it->second.head.empty())
            return {kMissing, kMissing};
        const auto& other_head = other_it->second.head;

        // facing(other -> pid), driven on the partner's timeline
        std::size_t hits = 0, samples = 0;
        for (const HeadFrame& of : other_head) {
            auto match = nearest_frame(target_head, of.t, cfg.head_match_window);
            if (!match) continue;
            ++samples;
            if (is_facing(of, target_head[*match], cos_threshold)) ++hits;
        }
        if (samples > 0) {
            facing_sum += static_cast<double>(hits) / static_cast<double>(samples);
            ++partners_facing;
        }

        // mutual facing, driven on the target's timeline
        std::size_t mutual_hits = 0, mutual_samples = 0;
        for (const HeadFrame& tf : target_head) {
            auto match = nearest_frame(other_head, tf.t, cfg.head_match_window);
            if (!match) continue;
            ++mutual_samples;
            const HeadFrame& of = other_head[*match];
            if (is_facing(tf, of, cos_threshold) && is_facing(of, tf, cos_threshold)) ++mutual_hits;
        }
        if (mutual_samples > 0) {
            mutual_sum += static_cast<double>(mutual_hits) / static_cast<double>(mutual_samples);
            ++partners_mutual;
        }
    }

    FacingFeatures out;
    out.facing = partners_facing > 0 ? facing_sum / static_cast<double>(partners_facing) : kMissing;
    out.mutual_facing =
        partners_mutual > 0 ? mutual_sum / static_cast<double>(partners_mutual) : kMissing;
    return out;
}

TimeSeries hand_velocity_series(const ParticipantStreams& streams, const FeatureConfig& cfg) {
    TimeSeries out;
    const auto& frames = streams.hands;
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const HandFrame& a = frames[i - 1];
        const HandFrame& b = frames[i];
        if (!a.both_detected || !b.both_detected) continue;
        double dt = b.t - a.t;
        if (dt <= 0.0 || dt > cfg.hand_gap_max) continue;
        auto dist = [](const std::array<double, 2>& p, const std::array<double, 2>& q) {
            double dx = q[0] - p[0], dy = q[1] - p[1];
            return std::sqrt(dx * dx + dy * dy);
        };
        double v = (dist(*a.left, *b.left) + dist(*a.right, *b.right)) / (2.0 * dt);
        out.push(0.5 * (a.t + b.t), v);
    }
    return out;
}

double hand_features(const SessionRecord& s, const ParticipantId& pid, const FeatureConfig& cfg) {
    auto it = s.streams.find(pid);
    if (it == s.streams.end()) return kMissing;
    TimeSeries v = hand_velocity_series(it->second, cfg);
    if (v.empty()) return kMissing;
    double sum = 0.0;
    for (double x : v.v) sum += x;
    return sum / static_cast<double>(v.size());
}

}  // namespace rapport::features
