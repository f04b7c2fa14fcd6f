#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace ofdr {

/// FNV-1a 64-bit over bytes; used for product hashing and scenario hashes.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t fnv1a64_file(const std::string& path);

/// CSV writer with a fixed numeric format ("%.12g") so identical data
/// produces byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::span<const std::string> columns);
    void row(std::span<const double> values);
    void raw_row(const std::string& line);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t n_cols_;
};

std::string format_csv_number(double v);

}  // namespace ofdr
