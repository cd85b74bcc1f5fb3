#include "rapport/features/relational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rapport/common.hpp"

namespace rapport::features {

// ---------------------------------------------------------------------------
// Banded DTW

double dtw_distance(const std::vector<double>& a, const std::vector<double>& b, int band_samples,
                    bool normalize_by_length) {
    if (a.empty() || b.empty()) throw EmptySeries("dtw_distance: empty sequence");
    auto n = static_cast<std::ptrdiff_t>(a.size());
    auto m = static_cast<std::ptrdiff_t>(b.size());
    auto band = static_cast<std::ptrdiff_t>(band_samples);
    if (band < std::abs(n - m))
        throw Infeasible("dtw_distance: band " + std::to_string(band_samples) +
                         " smaller than length difference " + std::to_string(std::abs(n - m)));

    constexpr double inf = std::numeric_limits<double>::infinity();
    // Rolling rows over the band stripe. Column j of row i lives at offset
    // j - (i - band). State is (cumulative cost, path length); costs tie-break
    // toward the shorter path so normalization is well defined.
    std::size_t width = static_cast<std::size_t>(2 * band + 1);
    std::vector<double> prev_cost(width, inf), cur_cost(width, inf);
    std::vector<std::int64_t> prev_len(width, 0), cur_len(width, 0);

    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - band);
        std::ptrdiff_t hi = std::min(m - 1, i + band);
        std::fill(cur_cost.begin(), cur_cost.end(), inf);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            std::size_t c = static_cast<std::size_t>(j - (i - band));
            double best_cost;
            std::int64_t best_len;
            if (i == 0 && j == 0) {
                best_cost = 0.0;
                best_len = 0;
            } else {
                best_cost = inf;
                best_len = 0;
                // predecessor offsets in the rolling rows:
                //   (i-1, j-1) -> prev[c]     (stripe shifts by one per row)
                //   (i-1, j)   -> prev[c + 1]
                //   (i,   j-1) -> cur[c - 1]
                auto consider = [&](double cost, std::int64_t len) {
                    if (cost < best_cost || (cost == best_cost && len < best_len)) {
                        best_cost = cost;
                        best_len = len;
                    }
                };
                if (i > 0 && j > 0) consider(prev_cost[c], prev_len[c]);
                if (i > 0 && c + 1 < width) consider(prev_cost[c + 1], prev_len[c + 1]);
                if (j > lo) consider(cur_cost[c - 1], cur_len[c - 1]);
            }
            if (best_cost == inf) continue;  // unreachable corner of the stripe
            cur_cost[c] = best_cost + std::fabs(a[static_cast<std::size_t>(i)] -
                                                b[static_cast<std::size_t>(j)]);
            cur_len[c] = best_len + 1;
        }
        std::swap(prev_cost, cur_cost);
        std::swap(prev_len, cur_len);
    }

    std::size_t end = static_cast<std::size_t>((m - 1) - (n - 1 - band));
    double cost = prev_cost[end];
    if (cost == inf) throw Infeasible("dtw_distance: no feasible path");
    if (!normalize_by_length) return cost;
    return cost / static_cast<double>(prev_len[end]);
}

// ---------------------------------------------------------------------------
// Synchronisation

TimeSeries extract_sync_signal(const SessionRecord& s, const ParticipantId& pid,
                               const SyncSignalSpec& spec, const FeatureConfig& fcfg) {
    auto it = s.streams.find(pid);
    if (it == s.streams.end()) return {};
    const ParticipantStreams& st = it->second;

    TimeSeries out;
    switch (spec.kind) {
        case SyncSignal::PosiFace:
            return posiface_series(st.au);
        case SyncSignal::AuIntensity: {
            int k = au_index(spec.au);
            if (k < 0) throw InvalidConfig("unknown AU id " + std::to_string(spec.au));
            for (const AuFrame& f : st.au) out.push(f.t, f.intensity[static_cast<std::size_t>(k)]);
            return out;
        }
        case SyncSignal::AuActivation: {
            int k = au_index(spec.au);
            if (k < 0) throw InvalidConfig("unknown AU id " + std::to_string(spec.au));
            for (const AuFrame& f : st.au)
                out.push(f.t, static_cast<double>(f.active[static_cast<std::size_t>(k)]));
            return out;
        }
        case SyncSignal::HandVelocity:
            return hand_velocity_series(st, fcfg);
    }
    return out;
}

namespace {

bool indicator_signal(const SyncSignalSpec& spec) {
    return spec.kind == SyncSignal::PosiFace || spec.kind == SyncSignal::AuActivation;
}

}  // namespace

double sync_score(const SessionRecord& s, const ParticipantId& pid, const SyncSignalSpec& spec,
                  const SyncConfig& cfg, const FeatureConfig& fcfg) {
    Interp mode = indicator_signal(spec) ? Interp::Nearest : Interp::Linear;

    TimeSeries own = extract_sync_signal(s, pid, spec, fcfg);
    if (own.empty()) return kMissing;
    TimeSeries own_grid = resample(own, cfg.rate, mode);

    double total = 0.0;
    std::size_t partners = 0;
    for (const ParticipantId& other : s.participants) {
        if (other == pid) continue;
        TimeSeries theirs = extract_sync_signal(s, other, spec, fcfg);
        if (theirs.empty()) return kMissing;
        TimeSeries grid = resample(theirs, cfg.rate, mode);
        try {
            total += dtw_distance(own_grid.v, grid.v, cfg.band_samples(), cfg.normalize_by_length);
        } catch (const Infeasible&) {
            return kMissing;
        }
        ++partners;
    }
    if (partners == 0) return kMissing;
    return cfg.average_over_partners ? total / static_cast<double>(partners) : total;
}

// ---------------------------------------------------------------------------
// Cross-modal features

namespace {

struct SpeakingMask {
    std::vector<std::pair<double, double>> spans;  // sorted [start, end)

    bool contains(double t) const {
        auto it = std::upper_bound(spans.begin(), spans.end(), t,
                                   [](double q, const std::pair<double, double>& s) {
                                       return q < s.first;
                                   });
        if (it == spans.begin()) return false;
        --it;
        return t >= it->first && t < it->second;
    }
};

SpeakingMask speaking_mask(const SessionRecord& s, const ParticipantId& pid) {
    SpeakingMask m;
    for (const TurnSegment& t : s.turns)
        if (t.speaker == pid) m.spans.emplace_back(t.start, t.end);
    std::sort(m.spans.begin(), m.spans.end());
    return m;
}

struct ConditionedAu {
    std::array<double, kAuCount> intensity{};
    std::array<double, kAuCount> prob{};
    std::size_t frames = 0;
};

// AU statistics of `streams` over frames where `mask` has the given value.
ConditionedAu conditioned_stats(const ParticipantStreams& streams, const SpeakingMask& mask,
                                bool mask_value) {
    ConditionedAu out;
    std::array<double, kAuCount> sum{};
    std::array<double, kAuCount> act{};
    for (const AuFrame& f : streams.au) {
        if (mask.contains(f.t) != mask_value) continue;
        for (std::size_t k = 0; k < kAuCount; ++k) {
            sum[k] += f.intensity[k];
            act[k] += f.active[k];
        }
        ++out.frames;
    }
    for (std::size_t k = 0; k < kAuCount; ++k) {
        if (out.frames == 0) {
            out.intensity[k] = kMissing;
            out.prob[k] = kMissing;
        } else {
            out.intensity[k] = sum[k] / static_cast<double>(out.frames);
            out.prob[k] = act[k] / static_cast<double>(out.frames);
        }
    }
    return out;
}

// Mean over partners of per-partner conditioned means; missing when no
// partner has frames under its mask.
void average_partphase(const std::vector<ConditionedAu>& parts,
                       std::array<double, kAuCount>& intensity,
                       std::array<double, kAuCount>& prob) {
    std::array<double, kAuCount> isum{};
    std::array<double, kAuCount> psum{};
    std::size_t defined = 0;
    for (const ConditionedAu& p : parts) {
        if (p.frames == 0) continue;
        ++defined;
        for (std::size_t k = 0; k < kAuCount; ++k) {
            isum[k] += p.intensity[k];
            psum[k] += p.prob[k];
        }
    }
    for (std::size_t k = 0; k < kAuCount; ++k) {
        if (defined == 0) {
            intensity[k] = kMissing;
            prob[k] = kMissing;
        } else {
            intensity[k] = isum[k] / static_cast<double>(defined);
            prob[k] = psum[k] / static_cast<double>(defined);
        }
    }
}

}  // namespace

bool is_speaking(const SessionRecord& s, const ParticipantId& pid, double t) {
    return speaking_mask(s, pid).contains(t);
}

CrossmodalAu crossmodal_au_features(const SessionRecord& s, const ParticipantId& pid) {
    CrossmodalAu out;
    SpeakingMask target_mask = speaking_mask(s, pid);

    auto it = s.streams.find(pid);
    const ParticipantStreams empty;
    const ParticipantStreams& target = it != s.streams.end() ? it->second : empty;

    ConditionedAu speak = conditioned_stats(target, target_mask, true);
    ConditionedAu notspeak = conditioned_stats(target, target_mask, false);
    out.target_speak_intensity = speak.intensity;
    out.target_speak_prob = speak.prob;
    out.target_notspeak_intensity = notspeak.intensity;
    out.target_notspeak_prob = notspeak.prob;

    // others' AUs while the target speaks: one conditioned mean per partner,
    // then averaged over partners
    std::vector<ConditionedAu> others_while_target;
    std::vector<ConditionedAu> target_while_other;
    for (const ParticipantId& other : s.participants) {
        if (other == pid) continue;
        auto oit = s.streams.find(other);
        const ParticipantStreams& os = oit != s.streams.end() ? oit->second : empty;
        others_while_target.push_back(conditioned_stats(os, target_mask, true));
        target_while_other.push_back(conditioned_stats(target, speaking_mask(s, other), true));
    }
    average_partphase(others_while_target, out.other_targetspeak_intensity,
                      out.other_targetspeak_prob);
    average_partphase(target_while_other, out.target_otherspeak_intensity,
                      out.target_otherspeak_prob);
    return out;
}

double hand_speech_feature(const SessionRecord& s, const ParticipantId& pid,
                           const FeatureConfig& cfg) {
    auto it = s.streams.find(pid);
    if (it == s.streams.end()) return kMissing;
    TimeSeries vel = hand_velocity_series(it->second, cfg);
    SpeakingMask mask = speaking_mask(s, pid);

    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < vel.size(); ++i) {
        if (!mask.contains(vel.t[i])) continue;
        sum += vel.v[i];
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : kMissing;
}

}  // namespace rapport::features
