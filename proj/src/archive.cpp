#include "ofdr/archive.hpp"

#include <cstring>
#include <fstream>

#include "ofdr/common.hpp"

namespace ofdr {

namespace {

constexpr char kMagic[8] = {'O', 'F', 'D', 'R', 'A', 'R', 'C', '\0'};

template <typename T>
void append(std::vector<unsigned char>& buf, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <typename T>
T read_value(const unsigned char*& p, const unsigned char* end) {
    if (p + sizeof(T) > end) throw ConfigError("archive truncated");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

void TraceArchive::add_trace(const ComplexTrace& trace) {
    Block b;
    b.kind = kTraceKind;
    b.core = static_cast<std::uint32_t>(trace.core);
    b.sweep = static_cast<std::uint32_t>(trace.sweep_index);
    append(b.payload, trace.bin_spacing_m);
    append(b.payload, trace.t_slow_s);
    for (const auto& c : trace.bins) {
        append(b.payload, static_cast<float>(c.real()));
        append(b.payload, static_cast<float>(c.imag()));
    }
    blocks.push_back(std::move(b));
}

void TraceArchive::add_beat(const BeatRecord& beat) {
    Block b;
    b.kind = kBeatKind;
    b.core = static_cast<std::uint32_t>(beat.core);
    b.sweep = static_cast<std::uint32_t>(beat.sweep_index);
    append(b.payload, beat.sample_rate_hz);
    append(b.payload, beat.t_slow_s);
    for (double s : beat.samples) append(b.payload, static_cast<float>(s));
    blocks.push_back(std::move(b));
}

void TraceArchive::add_fiber(const MultiCoreFiber& fiber) {
    for (int core = 0; core < fiber.n_cores; ++core) {
        Block b;
        b.kind = kFiberKind;
        b.core = static_cast<std::uint32_t>(core);
        b.sweep = 0;
        const auto& pos = fiber.position_m[core];
        const auto& refl = fiber.reflectivity[core];
        for (std::size_t k = 0; k < pos.size(); ++k) {
            append(b.payload, pos[k]);
            append(b.payload, refl[k].real());
            append(b.payload, refl[k].imag());
        }
        blocks.push_back(std::move(b));
    }
}

void TraceArchive::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, version);
    write_raw(out, static_cast<std::uint32_t>(header_json.size()));
    out.write(header_json.data(), static_cast<std::streamsize>(header_json.size()));
    write_raw(out, static_cast<std::uint64_t>(blocks.size()));
    for (const auto& b : blocks) {
        write_raw(out, b.kind);
        write_raw(out, b.core);
        write_raw(out, b.sweep);
        write_raw(out, std::uint32_t{0});
        write_raw(out, static_cast<std::uint64_t>(b.payload.size()));
        out.write(reinterpret_cast<const char*>(b.payload.data()),
                  static_cast<std::streamsize>(b.payload.size()));
    }
    if (!out) throw InternalError("archive write failed: " + path);
}

TraceArchive TraceArchive::read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open archive '" + path + "'");
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    const unsigned char* p = data.data();
    const unsigned char* end = p + data.size();

    if (data.size() < sizeof(kMagic) || std::memcmp(p, kMagic, sizeof(kMagic)) != 0)
        throw ConfigError("not a trace archive: " + path);
    p += sizeof(kMagic);

    TraceArchive arc;
    arc.version = read_value<std::uint32_t>(p, end);
    if (arc.version != 1) throw ConfigError("unsupported archive version");
    const auto hdr_len = read_value<std::uint32_t>(p, end);
    if (p + hdr_len > end) throw ConfigError("archive truncated");
    arc.header_json.assign(reinterpret_cast<const char*>(p), hdr_len);
    p += hdr_len;
    const auto count = read_value<std::uint64_t>(p, end);
    arc.blocks.resize(count);
    for (auto& b : arc.blocks) {
        b.kind = read_value<std::uint32_t>(p, end);
        b.core = read_value<std::uint32_t>(p, end);
        b.sweep = read_value<std::uint32_t>(p, end);
        (void)read_value<std::uint32_t>(p, end);
        const auto n = read_value<std::uint64_t>(p, end);
        if (p + n > end) throw ConfigError("archive truncated");
        b.payload.assign(p, p + n);
        p += n;
    }
    return arc;
}

bool TraceArchive::operator==(const TraceArchive& other) const {
    if (version != other.version || header_json != other.header_json ||
        blocks.size() != other.blocks.size())
        return false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& a = blocks[i];
        const auto& b = other.blocks[i];
        if (a.kind != b.kind || a.core != b.core || a.sweep != b.sweep ||
            a.payload != b.payload)
            return false;
    }
    return true;
}

}  // namespace ofdr
