#ifndef RAPPORT_COMMON_HPP
#define RAPPORT_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rapport {

// A feature value that could not be computed. Encoded as quiet NaN so
// numeric pipelines can carry it without a wrapper type; serialized as an
// empty CSV cell.
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// ---------------------------------------------------------------------------
// Errors

struct MissingFile : std::runtime_error {
    explicit MissingFile(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& file, std::size_t line, const std::string& detail)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + detail),
          line(line) {}
    std::size_t line;
};

struct SchemaViolation : std::runtime_error {
    explicit SchemaViolation(const std::string& detail) : std::runtime_error(detail) {}
};

struct EmptySeries : std::runtime_error {
    explicit EmptySeries(const std::string& what) : std::runtime_error(what) {}
};

struct Infeasible : std::runtime_error {
    explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownParticipant : std::runtime_error {
    explicit UnknownParticipant(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownFeatureSet : std::runtime_error {
    explicit UnknownFeatureSet(const std::string& what) : std::runtime_error(what) {}
};

struct SingleClass : std::runtime_error {
    explicit SingleClass(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyMatrix : std::runtime_error {
    explicit EmptyMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct NoPositives : std::runtime_error {
    explicit NoPositives(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewSessions : std::runtime_error {
    explicit TooFewSessions(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateClass : std::runtime_error {
    explicit DegenerateClass(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateVariance : std::runtime_error {
    explicit DegenerateVariance(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidConfig : std::runtime_error {
    explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Seed derivation and fingerprinting

// splitmix64 finalizer; used to derive independent sub-seeds so that a single
// master seed drives every random decision in a run.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return derive_seed(derive_seed(seed, tag_a), tag_b);
}

// FNV-1a over raw bytes; used to fingerprint fitted statistics for the
// leakage audit.
class Fingerprint {
public:
    void add_bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    void add(double v) { add_bytes(&v, sizeof v); }
    void add(std::uint64_t v) { add_bytes(&v, sizeof v); }
    void add(const std::vector<double>& v) {
        for (double x : v) add(x);
    }
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// ---------------------------------------------------------------------------
// Deterministic random number generation
//
// std::mt19937_64 has a standard-pinned output sequence, but the standard
// distributions do not; the samplers below keep generated corpora and models
// bit-identical across platforms.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed == 0 ? 0x9e3779b97f4a7c15ULL : seed) {
        // warm up splitmix-based state
        for (int i = 0; i < 4; ++i) next();
    }

    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (no cached spare: keeps the stream
    // position independent of call parity)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double truncated_normal(double mean, double sd, double lo, double hi) {
        for (;;) {
            double v = normal(mean, sd);
            if (v >= lo && v <= hi) return v;
        }
    }

    double exponential(double mean) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -mean * std::log(u);
    }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t s_;
};

// ---------------------------------------------------------------------------
// Deterministic parallelism

// Runs fn(i) for i in [0, n). Work is split into fixed index ranges so the
// assignment of items to workers, and therefore every seeded computation,
// is identical for any job count. jobs <= 0 selects hardware concurrency.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

int effective_jobs(int jobs);

}  // namespace rapport

#endif  // RAPPORT_COMMON_HPP
