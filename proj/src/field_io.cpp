#include "nlw/field_io.hpp"

#include "nlw/errors.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace nlw {

namespace {

template <class U>
void put_le(std::string& out, U x) {
    for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
}

template <class U>
U get_le(const unsigned char* p) {
    U x = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) x |= static_cast<U>(p[b]) << (8 * b);
    return x;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace

void write_nlwf(const std::filesystem::path& path, const NlwfArray& a) {
    std::uint64_t count = 1;
    for (auto d : a.dims) count *= d;
    if (count != a.values.size()) throw IoError("dims do not match value count");
    std::string out = "NLWF";
    out.reserve(16 + 8 * a.dims.size() + 8 * a.values.size());
    put_le<std::uint32_t>(out, nlwf_version);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.dims.size()));
    for (auto d : a.dims) put_le<std::uint64_t>(out, d);
    for (double v : a.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    write_all(path, out);
}

NlwfArray read_nlwf(const std::filesystem::path& path) {
    const std::string bytes = read_all(path);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();
    if (n < 12) throw IoError(path.string() + ": truncated header");
    if (std::memcmp(p, "NLWF", 4) != 0) throw IoError(path.string() + ": bad magic");
    auto version = get_le<std::uint32_t>(p + 4);
    if (version != nlwf_version)
        throw IoError(path.string() + ": unsupported version " + std::to_string(version));
    auto rank = get_le<std::uint32_t>(p + 8);
    if (rank == 0 || rank > 8) throw IoError(path.string() + ": bad rank " + std::to_string(rank));
    if (n < 12 + 8 * static_cast<std::size_t>(rank)) throw IoError(path.string() + ": truncated shape");
    NlwfArray a;
    std::uint64_t count = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
        auto d = get_le<std::uint64_t>(p + 12 + 8 * r);
        if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / 8 / d)
            throw IoError(path.string() + ": shape overflow");
        count *= d;
        a.dims.push_back(d);
    }
    const std::size_t off = 12 + 8 * static_cast<std::size_t>(rank);
    if ((n - off) / 8 < count || (n - off) != count * 8)
        throw IoError(path.string() + ": payload size does not match shape (truncated or trailing bytes)");
    a.values.resize(count);
    for (std::uint64_t m = 0; m < count; ++m)
        a.values[m] = std::bit_cast<double>(get_le<std::uint64_t>(p + off + 8 * m));
    return a;
}

void write_field(const std::filesystem::path& path, const SpaceTimeScalarField& f) {
    const auto& g = f.grid();
    write_nlwf(path, {{g.nt(), g.ny(), g.nx()}, f.values()});
}

SpaceTimeScalarField read_field(const std::filesystem::path& path, double Lx, double Ly, double T) {
    auto a = read_nlwf(path);
    if (a.dims.size() != 3) throw IoError(path.string() + ": expected rank 3, got " + std::to_string(a.dims.size()));
    SpaceTimeGrid g(a.dims[2], a.dims[1], a.dims[0], Lx, Ly, T);
    return SpaceTimeScalarField(g, std::move(a.values));
}

SpaceTimeScalarField read_field(const std::filesystem::path& path, const SpaceTimeGrid& expected) {
    auto f = read_field(path, expected.Lx(), expected.Ly(), expected.T());
    require_same_grid(f.grid(), expected, path.string());
    return f;
}

void write_spatial(const std::filesystem::path& path, const SpatialField& f) {
    write_nlwf(path, {{f.ny, f.nx}, f.v});
}

void write_face(const std::filesystem::path& path, const FaceArray& f) {
    write_nlwf(path, {{f.nt, f.n}, f.v});
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::trunc), columns_(header.size()) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    row(header);
}

void CsvWriter::row(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_real(v));
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw IoError("csv row has wrong number of cells");
    for (std::size_t c = 0; c < cells.size(); ++c) out_ << (c ? "," : "") << cells[c];
    out_ << '\n';
    out_.flush();
}

} // namespace nlw
