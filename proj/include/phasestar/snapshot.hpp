#pragma once

#include "phasestar/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace phasestar {

// Binary layout (little-endian): "PSGRID01", u32 ndim, u32 reserved, then per axis
// u64 points, f64 min, f64 spacing; f64 time; payload of f64 in row-major order.
void write_snapshot(const std::string& path, const GridState& f);
// Axis names are not stored; they default to x0, x1, ... unless given.
GridState read_snapshot(const std::string& path, const std::vector<std::string>& names = {},
                        Boundary boundary = Boundary::periodic, Scheme scheme = Scheme::spectral);

std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t seed = 14695981039346656037ull);
std::uint64_t checksum(const GridState& f);
std::string hex64(std::uint64_t v);

// gnuplot "splot ... with pm3d" text: x y value rows, blank line between x blocks. Other
// axes are fixed at the sample nearest the midpoint of their range.
void write_gnuplot_slice(const std::string& path, const GridState& f, const std::string& x_axis, const std::string& y_axis);

}  // namespace phasestar
