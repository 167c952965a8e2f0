#ifndef HISTMATCH_INSPECT_HPP
#define HISTMATCH_INSPECT_HPP

#include <ostream>

#include "histmatch/csv.hpp"
#include "histmatch/histogram.hpp"

namespace histmatch {

// CSV dumps for debugging: `bin,value` rows behind one header line.
// Floats use shortest round-trip formatting.

inline void dump_csv(const ChannelHistogram& h, std::ostream& out) {
    out << "bin,value\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << i << "," << h.counts[i] << "\n";
}

inline void dump_csv(const NormalizedHistogram& h, std::ostream& out) {
    out << "bin,value\n";
    for (std::size_t i = 0; i < h.probs.size(); ++i)
        out << i << "," << format_double(h.probs[i]) << "\n";
}

inline void dump_csv(const Cdf& c, std::ostream& out) {
    out << "bin,value\n";
    for (std::size_t i = 0; i < c.values.size(); ++i)
        out << i << "," << format_double(c.values[i]) << "\n";
}

} // namespace histmatch

#endif // HISTMATCH_INSPECT_HPP
