#ifndef RAPPORT_SERIES_HPP
#define RAPPORT_SERIES_HPP

#include <vector>

namespace rapport {

// Scalar signal with explicit (not necessarily uniform) timestamps.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> v;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    void push(double time, double value) {
        t.push_back(time);
        v.push_back(value);
    }
};

enum class Interp {
    Linear,   // real-valued channels
    Nearest,  // boolean / indicator channels
};

// Value of the series at time q under the given interpolation mode.
// q is clamped to the series' time span.
double sample_at(const TimeSeries& s, double q, Interp mode);

// Uniform grid at `rate` Hz from the first to the last timestamp.
// Throws EmptySeries when the input has no samples.
TimeSeries resample(const TimeSeries& s, double rate, Interp mode);

}  // namespace rapport

#endif  // RAPPORT_SERIES_HPP
