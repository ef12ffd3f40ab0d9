#include "enscade/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace enscade {

namespace {

constexpr char kMagic[5] = {'E', 'N', 'S', 'C', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

double get_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_header(std::ostream& out, const Grid3& g, double time, std::uint32_t kind) {
    out.write(kMagic, 5);
    put_u32(out, std::uint32_t(g.n));
    put_f64(out, g.length);
    put_f64(out, time);
    put_u32(out, kind);
}

SnapshotHeader read_header(std::istream& in, const std::filesystem::path& path) {
    char magic[5] = {};
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kMagic, 5) != 0)
        throw FieldError("not a snapshot file: " + path.string());
    SnapshotHeader h;
    h.n = get_u32(in);
    h.length = get_f64(in);
    h.time = get_f64(in);
    h.kind = get_u32(in);
    if (!in || (h.kind != 1 && h.kind != 3))
        throw FieldError("corrupt snapshot header: " + path.string());
    return h;
}

void write_values(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * 8));
}

void read_values(std::istream& in, std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * 8));
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FieldError("cannot open for writing: " + path.string());
    write_header(out, f.grid, time, 1);
    write_values(out, f.v);
    if (!out) throw FieldError("write failed: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const VectorField3& f, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FieldError("cannot open for writing: " + path.string());
    write_header(out, f.grid, time, 3);
    for (int c = 0; c < 3; ++c) write_values(out, f[c].v);
    if (!out) throw FieldError("write failed: " + path.string());
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("cannot open: " + path.string());
    return read_header(in, path);
}

ScalarField read_scalar_snapshot(const std::filesystem::path& path, double* time) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("cannot open: " + path.string());
    const SnapshotHeader h = read_header(in, path);
    if (h.kind != 1) throw FieldError("expected scalar snapshot: " + path.string());
    ScalarField f(Grid3::make(int(h.n), h.length));
    read_values(in, f.v);
    if (!in) throw FieldError("truncated snapshot: " + path.string());
    if (time) *time = h.time;
    return f;
}

VectorField3 read_vector_snapshot(const std::filesystem::path& path, double* time) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("cannot open: " + path.string());
    const SnapshotHeader h = read_header(in, path);
    if (h.kind != 3) throw FieldError("expected vector snapshot: " + path.string());
    VectorField3 f(Grid3::make(int(h.n), h.length));
    for (int c = 0; c < 3; ++c) read_values(in, f[c].v);
    if (!in) throw FieldError("truncated snapshot: " + path.string());
    if (time) *time = h.time;
    return f;
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("cannot open: " + path.string());
    std::uint64_t hash = 1469598103934665603ull;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= std::uint8_t(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(hex);
}

}  // namespace enscade
