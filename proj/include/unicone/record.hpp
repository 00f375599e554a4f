#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace unicone {

/// Line-oriented key=value record, the serialization format for verdicts and
/// reports. Keys keep insertion order; values are formatted deterministically.
class Record {
public:
    void add(const std::string& key, const std::string& value) {
        entries_.emplace_back(key, value);
    }
    void add(const std::string& key, const char* value) { entries_.emplace_back(key, value); }
    void add(const std::string& key, bool value) {
        entries_.emplace_back(key, value ? "true" : "false");
    }
    void add(const std::string& key, double value) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", value);
        entries_.emplace_back(key, buf);
    }
    template <typename T>
        requires std::is_integral_v<T>
    void add(const std::string& key, T value) {
        entries_.emplace_back(key, std::to_string(value));
    }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : entries_) os << k << '=' << v << '\n';
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
        return entries_;
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const Record& r) {
    r.write(os);
    return os;
}

} // namespace unicone
