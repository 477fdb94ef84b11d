#include "teachlab/textio.hpp"

#include <charconv>
#include <cstdlib>

#include "teachlab/errors.hpp"

namespace teachlab {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ContractError("cannot parse '" + s + "' as a number");
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

bool strict_determinism() {
    const char* v = std::getenv("TEACHLAB_THREADS");
    return v != nullptr && std::string(v) == "1";
}

}  // namespace teachlab
