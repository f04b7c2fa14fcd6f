#include "ofdr/csvio.hpp"

#include <cstdio>
#include <stdexcept>

#include "ofdr/common.hpp"

namespace ofdr {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "' for hashing");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string format_csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::span<const std::string> columns)
    : path_(path), out_(path, std::ios::binary), n_cols_(columns.size()) {
    if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != n_cols_)
        throw InternalError("CsvWriter: column count mismatch in " + path_);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format_csv_number(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << '\n'; }

}  // namespace ofdr
