#include "rapport/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "rapport/common.hpp"
#include "rapport/csv.hpp"

namespace rapport {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

std::string resolve(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).string();
}

std::map<ParticipantId, std::string> path_map(const json& j, const std::string& key,
                                              const SessionManifest& sm) {
    if (!j.contains(key))
        throw SchemaViolation("manifest: session '" + sm.id + "' missing '" + key + "'");
    std::map<ParticipantId, std::string> out;
    for (const auto& [pid, path] : j.at(key).items()) out[pid] = path.get<std::string>();
    for (const ParticipantId& pid : sm.participants)
        if (!out.count(pid))
            throw SchemaViolation("manifest: session '" + sm.id + "': '" + key +
                                  "' has no entry for participant '" + pid + "'");
    return out;
}

double required_number(const CsvTable& t, std::size_t row, std::size_t col) {
    auto v = csv_number(t, row, col);
    if (!v)
        throw ParseError(t.path, t.row_lines[row],
                         "empty cell in required column " + t.header[col]);
    return *v;
}

std::vector<TurnSegment> load_turns(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 3)
        throw SchemaViolation(path + ": expected 3 columns (speaker,start_s,end_s), got " +
                              std::to_string(t.header.size()));
    std::vector<TurnSegment> turns;
    turns.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        turns.push_back({t.rows[r][0], required_number(t, r, 1), required_number(t, r, 2)});
    return turns;
}

std::vector<AuFrame> load_au(const std::string& path, double confidence_threshold) {
    CsvTable t = read_csv(path);
    // t_s, confidence, 17 intensity columns, 17 activation columns
    const std::size_t expected = 2 + 2 * kAuCount;
    if (t.header.size() != expected)
        throw SchemaViolation(path + ": expected " + std::to_string(expected) +
                              " columns, got " + std::to_string(t.header.size()));
    std::vector<AuFrame> frames;
    frames.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        AuFrame f;
        f.t = required_number(t, r, 0);
        f.confidence = required_number(t, r, 1);
        if (f.confidence < confidence_threshold) continue;
        for (std::size_t k = 0; k < kAuCount; ++k) {
            f.intensity[k] = required_number(t, r, 2 + k);
            double a = required_number(t, r, 2 + kAuCount + k);
            if (a != 0.0 && a != 1.0)
                throw SchemaViolation(path + ":" + std::to_string(t.row_lines[r]) +
                                      ": activation must be 0 or 1");
            f.active[k] = a != 0.0 ? 1 : 0;
        }
        frames.push_back(f);
    }
    return frames;
}

std::vector<HeadFrame> load_head(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 7)
        throw SchemaViolation(path + ": expected 7 columns (t_s,px,py,pz,dx,dy,dz), got " +
                              std::to_string(t.header.size()));
    std::vector<HeadFrame> frames;
    frames.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        HeadFrame f;
        f.t = required_number(t, r, 0);
        for (int k = 0; k < 3; ++k) f.seat_position[k] = required_number(t, r, 1 + k);
        for (int k = 0; k < 3; ++k) f.facing_dir[k] = required_number(t, r, 4 + k);
        frames.push_back(f);
    }
    return frames;
}

std::vector<HandFrame> load_hands(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() != 6)
        throw SchemaViolation(path + ": expected 6 columns (t_s,lx,ly,rx,ry,both), got " +
                              std::to_string(t.header.size()));
    std::vector<HandFrame> frames;
    frames.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        HandFrame f;
        f.t = required_number(t, r, 0);
        auto lx = csv_number(t, r, 1), ly = csv_number(t, r, 2);
        auto rx = csv_number(t, r, 3), ry = csv_number(t, r, 4);
        if (lx.has_value() != ly.has_value() || rx.has_value() != ry.has_value())
            throw SchemaViolation(path + ":" + std::to_string(t.row_lines[r]) +
                                  ": half-specified hand coordinates");
        if (lx) f.left = std::array<double, 2>{*lx, *ly};
        if (rx) f.right = std::array<double, 2>{*rx, *ry};
        f.both_detected = required_number(t, r, 5) != 0.0;
        frames.push_back(f);
    }
    return frames;
}

std::vector<std::pair<std::size_t, ProsodyVector>> load_prosody(const std::string& path) {
    CsvTable t = read_csv(path);
    const std::size_t expected = 1 + ProsodyVector::kDim;
    if (t.header.size() != expected)
        throw SchemaViolation(path + ": expected " + std::to_string(expected) +
                              " columns (turn_index + 384 values), got " +
                              std::to_string(t.header.size()));
    std::vector<std::pair<std::size_t, ProsodyVector>> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        double idx = required_number(t, r, 0);
        if (idx < 0.0 || idx != std::floor(idx))
            throw SchemaViolation(path + ":" + std::to_string(t.row_lines[r]) +
                                  ": turn_index must be a non-negative integer");
        ProsodyVector v;
        v.values.reserve(ProsodyVector::kDim);
        for (std::size_t k = 0; k < ProsodyVector::kDim; ++k)
            v.values.push_back(required_number(t, r, 1 + k));
        out.emplace_back(static_cast<std::size_t>(idx), std::move(v));
    }
    return out;
}

}  // namespace

RatingsRecord load_ratings(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path, 0, e.what());
    }
    RatingsRecord r;
    for (const auto& entry : j.at("directed")) {
        AttributeScores s;
        s.rapport = entry.at("rapport").get<double>();
        s.leadership = entry.at("leadership").get<double>();
        s.dominance = entry.at("dominance").get<double>();
        s.competence = entry.at("competence").get<double>();
        s.liking = entry.at("liking").get<double>();
        auto rater = entry.at("rater").get<std::string>();
        auto ratee = entry.at("ratee").get<std::string>();
        if (!r.directed.emplace(std::make_pair(rater, ratee), s).second)
            throw SchemaViolation(path + ": duplicate directed rating (" + rater + "," + ratee + ")");
    }
    for (const auto& [pid, p] : j.at("personality").items()) {
        PersonalityScores s;
        s.openness = p.at("O").get<double>();
        s.conscientiousness = p.at("C").get<double>();
        s.extraversion = p.at("E").get<double>();
        s.agreeableness = p.at("A").get<double>();
        s.neuroticism = p.at("N").get<double>();
        r.personality[pid] = s;
    }
    return r;
}

Manifest read_manifest(const std::string& manifest_path) {
    if (!file_exists(manifest_path)) throw MissingFile("manifest not found: " + manifest_path);
    json j;
    try {
        j = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ParseError(manifest_path, 0, e.what());
    }

    Manifest m;
    m.base_dir = fs::path(manifest_path).parent_path().string();
    if (m.base_dir.empty()) m.base_dir = ".";
    if (j.contains("au_confidence_threshold"))
        m.au_confidence_threshold = j.at("au_confidence_threshold").get<double>();

    if (!j.contains("sessions") || !j.at("sessions").is_array())
        throw SchemaViolation("manifest: missing 'sessions' array");
    for (const auto& js : j.at("sessions")) {
        SessionManifest sm;
        sm.id = js.at("id").get<std::string>();
        sm.duration_s = js.at("duration_s").get<double>();
        sm.participants = js.at("participants").get<std::vector<std::string>>();
        sm.turns_csv = js.at("turns_csv").get<std::string>();
        sm.au_csv = path_map(js, "au_csv", sm);
        sm.head_csv = path_map(js, "head_csv", sm);
        sm.hands_csv = path_map(js, "hands_csv", sm);
        sm.prosody_csv = path_map(js, "prosody_csv", sm);
        sm.ratings_json = js.at("ratings_json").get<std::string>();
        m.sessions.push_back(std::move(sm));
    }
    return m;
}

SessionRecord load_session(const Manifest& m, const SessionManifest& sm, const LoadOptions& opts) {
    double threshold =
        opts.confidence_threshold >= 0.0 ? opts.confidence_threshold : m.au_confidence_threshold;

    SessionRecord s;
    s.session_id = sm.id;
    s.duration = sm.duration_s;
    s.participants = sm.participants;
    s.turns = load_turns(resolve(m.base_dir, sm.turns_csv));
    for (const ParticipantId& pid : sm.participants) {
        ParticipantStreams st;
        st.au = load_au(resolve(m.base_dir, sm.au_csv.at(pid)), threshold);
        st.head = load_head(resolve(m.base_dir, sm.head_csv.at(pid)));
        st.hands = load_hands(resolve(m.base_dir, sm.hands_csv.at(pid)));
        st.prosody = load_prosody(resolve(m.base_dir, sm.prosody_csv.at(pid)));
        s.streams.emplace(pid, std::move(st));
    }
    return s;
}

Corpus load_corpus(const std::string& manifest_path, const LoadOptions& opts) {
    Manifest m = read_manifest(manifest_path);

    // Report every absent file at once rather than failing one at a time.
    std::vector<std::string> missing;
    auto check = [&](const std::string& p) {
        std::string full = resolve(m.base_dir, p);
        if (!file_exists(full)) missing.push_back(full);
    };
    for (const SessionManifest& sm : m.sessions) {
        check(sm.turns_csv);
        check(sm.ratings_json);
        for (const auto& kv : sm.au_csv) check(kv.second);
        for (const auto& kv : sm.head_csv) check(kv.second);
        for (const auto& kv : sm.hands_csv) check(kv.second);
        for (const auto& kv : sm.prosody_csv) check(kv.second);
    }
    if (!missing.empty()) {
        std::string msg = "missing files:";
        for (const std::string& p : missing) msg += "\n  " + p;
        throw MissingFile(msg);
    }

    Corpus corpus;
    corpus.reserve(m.sessions.size());
    for (const SessionManifest& sm : m.sessions) {
        SessionRecord s = load_session(m, sm, opts);
        RatingsRecord r = load_ratings(resolve(m.base_dir, sm.ratings_json));
        if (opts.enforce_validation) {
            auto violations = validate_session(s);
            auto rv = validate_ratings(s, r);
            violations.insert(violations.end(), rv.begin(), rv.end());
            if (!violations.empty())
                throw SchemaViolation("session '" + s.session_id + "': " + violations.front() +
                                      (violations.size() > 1
                                           ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                           : ""));
        }
        corpus.emplace_back(std::move(s), std::move(r));
    }
    return corpus;
}

}  // namespace rapport
