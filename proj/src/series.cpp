#include "rapport/series.hpp"

#include <algorithm>
#include <cmath>

#include "rapport/common.hpp"

namespace rapport {

double sample_at(const TimeSeries& s, double q, Interp mode) {
    if (s.empty()) throw EmptySeries("sample_at: empty series");
    if (q <= s.t.front()) return s.v.front();
    if (q >= s.t.back()) return s.v.back();
    // first index with t > q; bracketing interval is [i-1, i]
    auto it = std::upper_bound(s.t.begin(), s.t.end(), q);
    std::size_t i = static_cast<std::size_t>(it - s.t.begin());
    std::size_t lo = i - 1;
    double span = s.t[i] - s.t[lo];
    double u = span > 0.0 ? (q - s.t[lo]) / span : 0.0;
    if (mode == Interp::Nearest) return u < 0.5 ? s.v[lo] : s.v[i];
    return s.v[lo] + u * (s.v[i] - s.v[lo]);
}

TimeSeries resample(const TimeSeries& s, double rate, Interp mode) {
    if (s.empty()) throw EmptySeries("resample: empty series");
    if (!(rate > 0.0)) throw InvalidConfig("resample: rate must be > 0");

    double t0 = s.t.front();
    double t1 = s.t.back();
    double step = 1.0 / rate;
    // small slack so a grid point that lands on the last sample is kept
    auto count = static_cast<std::size_t>(std::floor((t1 - t0) * rate + 1e-9)) + 1;

    TimeSeries out;
    out.t.reserve(count);
    out.v.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        double q = t0 + static_cast<double>(k) * step;
        out.t.push_back(q);
        out.v.push_back(sample_at(s, q, mode));
    }
    return out;
}

}  // namespace rapport
