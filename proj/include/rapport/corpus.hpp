#ifndef RAPPORT_CORPUS_HPP
#define RAPPORT_CORPUS_HPP

#include <map>
#include <string>

#include "rapport/types.hpp"

namespace rapport {

struct LoadOptions {
    // AU frames below this OpenFace-style confidence are dropped at load.
    // A manifest-level "au_confidence_threshold" field overrides the default;
    // a value set here (>= 0) overrides both.
    double confidence_threshold = -1.0;
    // When true, a session failing validate_session aborts the load with
    // SchemaViolation. The `validate` CLI turns this off to collect and
    // print all violations instead.
    bool enforce_validation = true;
};

// Per-session file references as written in the manifest.
struct SessionManifest {
    std::string id;
    double duration_s = 0.0;
    std::vector<ParticipantId> participants;
    std::string turns_csv;
    std::map<ParticipantId, std::string> au_csv;
    std::map<ParticipantId, std::string> head_csv;
    std::map<ParticipantId, std::string> hands_csv;
    std::map<ParticipantId, std::string> prosody_csv;
    std::string ratings_json;
};

struct Manifest {
    std::vector<SessionManifest> sessions;
    double au_confidence_threshold = 0.8;
    std::string base_dir;  // manifest-relative paths resolve against this
};

Manifest read_manifest(const std::string& manifest_path);

// Loads every session referenced by the manifest. File paths are resolved
// relative to the manifest's directory. Throws MissingFile (listing every
// absent file), ParseError, or SchemaViolation.
Corpus load_corpus(const std::string& manifest_path, const LoadOptions& opts = {});

// Single-session loaders, exposed for targeted reloads in tests.
SessionRecord load_session(const Manifest& m, const SessionManifest& sm, const LoadOptions& opts);
RatingsRecord load_ratings(const std::string& path);

}  // namespace rapport

#endif  // RAPPORT_CORPUS_HPP
