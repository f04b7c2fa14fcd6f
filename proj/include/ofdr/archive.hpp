#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ofdr/engine.hpp"
#include "ofdr/fiber.hpp"
#include "ofdr/types.hpp"

namespace ofdr {

/// Binary trace archive for regression fixtures. Byte layout (all integers
/// little-endian):
///   magic   8 bytes  "OFDRARC\0"
///   version u32      = 1
///   hdr_len u32      header length in bytes
///   header  hdr_len  UTF-8 JSON: {"scenario_hash": ..., "params": ...}
///   count   u64      number of blocks
///   blocks  count x { kind u32; core u32; sweep u32; reserved u32;
///                     n u64; payload }
/// Block payloads:
///   kind 1 (trace): n complex-float32 pairs (re, im) per bin, plus one
///                   float64 bin spacing and one float64 t_slow prefix
///   kind 2 (beat):  n float32 samples, prefixed by float64 sample_rate
///                   and float64 t_slow
///   kind 3 (fiber): n scatterers as float64 triplets (position, re, im)
struct TraceArchive {
    std::uint32_t version = 1;
    std::string header_json;

    struct Block {
        std::uint32_t kind = 0;
        std::uint32_t core = 0;
        std::uint32_t sweep = 0;
        std::vector<unsigned char> payload;
    };
    std::vector<Block> blocks;

    static constexpr std::uint32_t kTraceKind = 1;
    static constexpr std::uint32_t kBeatKind = 2;
    static constexpr std::uint32_t kFiberKind = 3;

    void add_trace(const ComplexTrace& trace);
    void add_beat(const BeatRecord& beat);
    void add_fiber(const MultiCoreFiber& fiber);

    void write(const std::string& path) const;
    static TraceArchive read(const std::string& path);

    bool operator==(const TraceArchive& other) const;
};

}  // namespace ofdr
