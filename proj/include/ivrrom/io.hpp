#pragma once

/// Matrix files and CSV output.
///
/// Matrix file layout (little-endian):
///   8 bytes   magic "IVRMAT01"
///   uint64    rows
///   uint64    cols
///   cols x f64  column labels (snapshot times, mode indices, ...)
///   rows*cols f64  entries, column-major

#include "ivrrom/numerics.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace ivrrom {

class IoError : public Error {
public:
    using Error::Error;
};

struct LabeledMatrix {
    Matrix data;
    std::vector<double> labels;
};

inline constexpr char kMatrixMagic[8] = {'I', 'V', 'R', 'M', 'A', 'T', '0', '1'};

inline void write_matrix(const std::filesystem::path& path, const Matrix& m, const std::vector<double>& labels = {}) {
    if (!labels.empty() && static_cast<Index>(labels.size()) != m.cols())
        throw IoError("write_matrix: label count does not match column count");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    out.write(kMatrixMagic, sizeof(kMatrixMagic));
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    std::vector<double> lab = labels;
    if (lab.empty()) lab.assign(static_cast<std::size_t>(cols), 0.0);
    out.write(reinterpret_cast<const char*>(lab.data()), static_cast<std::streamsize>(lab.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path.string());
}

inline LabeledMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kMatrixMagic)) throw IoError("not a matrix file: " + path.string());
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in) throw IoError("truncated header: " + path.string());
    LabeledMatrix out;
    out.labels.resize(cols);
    in.read(reinterpret_cast<char*>(out.labels.data()), static_cast<std::streamsize>(cols * sizeof(double)));
    out.data.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (!in) throw IoError("truncated data: " + path.string());
    return out;
}

/// Shortest round-trip scientific notation.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17e", v);
    return buf;
}

/// RFC 4180 style CSV: header row, optional leading '#' provenance comment.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::string& provenance = {}) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path);
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
        if (!provenance.empty()) out_ << "# " << provenance << '\n';
        write_fields(header);
        columns_ = header.size();
    }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != columns_) throw IoError("CSV row has the wrong number of fields");
        write_fields(fields);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> f;
        f.reserve(values.size());
        for (double v : values) f.push_back(format_real(v));
        row(f);
    }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + '"';
    }

    void write_fields(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << quote(fields[i]);
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t columns_ = 0;
};

/// Reads a CSV written by CsvWriter (comment lines skipped, no embedded newlines).
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace ivrrom
