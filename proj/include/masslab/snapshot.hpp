#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "masslab/state.hpp"

namespace masslab {

// Snapshot container, format version 1. Little-endian hosts assumed; the
// header records an endianness tag and loading refuses a foreign byte order
// rather than swapping.
//
//   offset  size  field
//   0       8     magic "MLABSNP1"
//   8       4     endian tag 0x01020304 (u32, native order)
//   12      4     format version (u32) = 1
//   16      1     kind: 1 = superposition state, 2 = extended field
//   17      8     n   (u64, spatial points)
//   25      8     length (f64)
//   33      8     n_s (u64, 0 for superposition)
//   41      8     length_s (f64, 0 for superposition)
//   49      8     t (f64)
//   57      8     channel count (u64, 0 for extended)
//   65      8*nc  channel masses (f64 each)
//   ...           payload: complex samples as (re, im) f64 pairs;
//                 superposition: channels in mass order, n samples each;
//                 extended: n*n_s samples, s-major
//   end     4     CRC-32 (u32) over all preceding bytes

namespace snapshot_detail {

inline constexpr char kMagic[8] = {'M', 'L', 'A', 'B', 'S', 'N', 'P', '1'};
inline constexpr std::uint32_t kEndianTag = 0x01020304u;
inline constexpr std::uint32_t kVersion = 1;

inline std::uint32_t crc32(const unsigned char* data, std::size_t len,
                           std::uint32_t seed = 0) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int bit = 0; bit < 8; ++bit)
                c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = ~seed;
    for (std::size_t i = 0; i < len; ++i)
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return ~crc;
}

struct Buffer {
    std::vector<unsigned char> bytes;

    template <class T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const unsigned char*>(&v);
        bytes.insert(bytes.end(), p, p + sizeof(T));
    }
    void put_complex(const complexd& z) {
        put(z.real());
        put(z.imag());
    }
};

struct Reader {
    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;

    template <class T>
    T get() {
        if (pos + sizeof(T) > bytes.size())
            throw snapshot_error("snapshot: truncated payload");
        T v;
        std::memcpy(&v, bytes.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    complexd get_complex() {
        const double re = get<double>();
        const double im = get<double>();
        return {re, im};
    }
};

inline void write_file(const std::string& path, const Buffer& body) {
    const std::uint32_t crc = crc32(body.bytes.data(), body.bytes.size());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw snapshot_error("snapshot: cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(body.bytes.data()),
              static_cast<std::streamsize>(body.bytes.size()));
    out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
    if (!out) throw snapshot_error("snapshot: write failed: " + path);
}

inline std::vector<unsigned char> read_checked(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw snapshot_error("snapshot: cannot open: " + path);
    const auto size = static_cast<std::size_t>(in.tellg());
    if (size < sizeof(kMagic) + 12 + 4) throw snapshot_error("snapshot: file too short");
    std::vector<unsigned char> bytes(size);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw snapshot_error("snapshot: read failed: " + path);

    std::uint32_t stored = 0;
    std::memcpy(&stored, bytes.data() + size - 4, 4);
    bytes.resize(size - 4);
    if (crc32(bytes.data(), bytes.size()) != stored)
        throw snapshot_error("snapshot: corrupt payload (checksum mismatch)");

    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw snapshot_error("snapshot: bad magic");
    std::uint32_t endian = 0, version = 0;
    std::memcpy(&endian, bytes.data() + 8, 4);
    std::memcpy(&version, bytes.data() + 12, 4);
    if (endian != kEndianTag)
        throw snapshot_error("snapshot: endianness mismatch");
    if (version != kVersion)
        throw snapshot_error("snapshot: unsupported format version " + std::to_string(version));
    return bytes;
}

inline void put_header(Buffer& buf, std::uint8_t kind, const SpatialGrid& grid,
                       std::uint64_t n_s, double length_s, double t,
                       const std::vector<double>& masses) {
    buf.bytes.insert(buf.bytes.end(), kMagic, kMagic + sizeof(kMagic));
    buf.put(kEndianTag);
    buf.put(kVersion);
    buf.put(kind);
    buf.put(static_cast<std::uint64_t>(grid.n));
    buf.put(grid.length);
    buf.put(n_s);
    buf.put(length_s);
    buf.put(t);
    buf.put(static_cast<std::uint64_t>(masses.size()));
    for (double m : masses) buf.put(m);
}

}  // namespace snapshot_detail

inline void save_snapshot(const SuperpositionState& state, const std::string& path) {
    snapshot_detail::Buffer buf;
    snapshot_detail::put_header(buf, 1, state.grid(), 0, 0.0, state.t(), state.masses());
    for (const auto& ch : state.channels)
        for (const auto& z : ch.psi) buf.put_complex(z);
    snapshot_detail::write_file(path, buf);
}

inline void save_snapshot(const ExtendedField& f, const std::string& path) {
    snapshot_detail::Buffer buf;
    snapshot_detail::put_header(buf, 2, f.grid, f.sgrid.n_s, f.sgrid.length_s, f.t, {});
    for (const auto& z : f.field) buf.put_complex(z);
    snapshot_detail::write_file(path, buf);
}

using Snapshot = std::variant<SuperpositionState, ExtendedField>;

/// Loads a snapshot; the returned state carries its own grid (no resampling).
inline Snapshot load_snapshot(const std::string& path) {
    const auto bytes = snapshot_detail::read_checked(path);
    snapshot_detail::Reader r{bytes, 16};
    const auto kind = r.get<std::uint8_t>();
    const auto n = r.get<std::uint64_t>();
    const auto length = r.get<double>();
    const auto n_s = r.get<std::uint64_t>();
    const auto length_s = r.get<double>();
    const auto t = r.get<double>();
    const auto n_channels = r.get<std::uint64_t>();
    std::vector<double> masses(n_channels);
    for (auto& m : masses) m = r.get<double>();

    const SpatialGrid grid = make_spatial_grid(n, length);
    if (kind == 1) {
        std::vector<MassChannel> channels;
        channels.reserve(n_channels);
        for (double m : masses) {
            MassChannel ch{m, t, grid, wave(n)};
            for (auto& z : ch.psi) z = r.get_complex();
            channels.push_back(std::move(ch));
        }
        if (r.pos != bytes.size()) throw snapshot_error("snapshot: trailing bytes");
        return make_superposition(std::move(channels));
    }
    if (kind == 2) {
        ExtendedField f{grid, make_sgrid(n_s, length_s), t, wave(n * n_s)};
        for (auto& z : f.field) z = r.get_complex();
        if (r.pos != bytes.size()) throw snapshot_error("snapshot: trailing bytes");
        return f;
    }
    throw snapshot_error("snapshot: unknown kind " + std::to_string(kind));
}

}  // namespace masslab
