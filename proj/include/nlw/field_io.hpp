#pragma once

#include "nlw/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace nlw {

/// Raw NLWF payload: dims slowest first, values row-major.
struct NlwfArray {
    std::vector<std::uint64_t> dims;
    std::vector<double> values;
};

inline constexpr std::uint32_t nlwf_version = 1;

void write_nlwf(const std::filesystem::path& path, const NlwfArray& a);
NlwfArray read_nlwf(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const SpaceTimeScalarField& f);
/// Rebuilds the grid from the stored (nt, ny, nx) and the given extents.
SpaceTimeScalarField read_field(const std::filesystem::path& path, double Lx, double Ly, double T);
/// Reads and checks the stored shape against an expected grid.
SpaceTimeScalarField read_field(const std::filesystem::path& path, const SpaceTimeGrid& expected);

void write_spatial(const std::filesystem::path& path, const SpatialField& f);
void write_face(const std::filesystem::path& path, const FaceArray& f);

/// Formats with 17 significant digits so values round-trip.
std::string format_real(double x);

/// Comma-separated writer with a fixed header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
    void row(std::initializer_list<double> values);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

} // namespace nlw
