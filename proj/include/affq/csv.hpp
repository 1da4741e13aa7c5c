#ifndef AFFQ_CSV_HPP
#define AFFQ_CSV_HPP

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace affq {

inline constexpr const char* kToolName = "affq";
inline constexpr const char* kToolVersion = "1.0.0";

// 17 significant digits: round-trips every double.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string join(const std::vector<std::string>& cols, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += sep;
        out += cols[i];
    }
    return out;
}

// Metadata lines precede the single header row and start with '#'.
inline std::string metadata_line(const std::string& key, const std::string& value) {
    return "# " + key + "=" + value + "\n";
}

}  // namespace affq

#endif  // AFFQ_CSV_HPP
