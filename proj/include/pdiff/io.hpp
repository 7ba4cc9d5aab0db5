#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdiff/classify.hpp"
#include "pdiff/grid.hpp"
#include "pdiff/stencil.hpp"

namespace pdiff::io {

// Grid files, line oriented, '#' starts a comment line:
//
//     dim N
//     origin v1 ... vN
//     h v
//     extents e1 ... eN
//     <one value per line, row-major>
//
// Values may be omitted when only the geometry is wanted (read_grid_spec).

GridSpec read_grid_spec(std::istream& in, const std::string& source);
GridFunction read_grid(std::istream& in, const std::string& source);
GridSpec read_grid_spec(const std::filesystem::path& path);
GridFunction read_grid(const std::filesystem::path& path);

std::string format_grid(const GridFunction& u);
std::string format_grid_spec(const GridSpec& spec);

// Stencil files:
//
//     dim N
//     h v
//     scale p
//     term s1 ... sN c        c is a number or a "quoted expression"
//
// Shifts may be real; only integer shifts convert to a Stencil.

struct StencilFile {
    int dim = 0;
    double h = 1.0;
    int scale = 0;
    DifferenceOperator op;
    std::vector<int> term_lines;
};

StencilFile read_stencil_file(std::istream& in, const std::string& source);
StencilFile read_stencil_file(const std::filesystem::path& path);

/// Throws InputError naming the line of the first non-integer shift.
Stencil to_stencil(const StencilFile& file, const std::string& source);

/// printf "%.17g": fixed format, round-trips every double.
std::string format_number(double v);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace pdiff::io
