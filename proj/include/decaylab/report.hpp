#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "decaylab/serialize.hpp"

namespace decaylab {

// fixed 17-significant-digit formatting: deterministic and round-trip exact
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// CSV: comma separated, '.' decimal, header row, LF line endings
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size()) throw Error("CsvWriter: column count mismatch");
        rows_.push_back(cells);
    }

    std::string str() const {
        std::string out = join(header_);
        for (const auto& r : rows_) out += join(r);
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open " + path.string());
        f << str();
    }

private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        line += '\n';
        return line;
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    f << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

// two-column data file with a comment header, ready for external plotting
inline void write_curve(const std::filesystem::path& path, const std::string& comment,
                        const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("write_curve: length mismatch");
    std::string out = "# " + comment + "\n";
    for (size_t i = 0; i < x.size(); ++i) out += fmt17(x[i]) + " " + fmt17(y[i]) + "\n";
    write_text(path, out);
}

}  // namespace decaylab
