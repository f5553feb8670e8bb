#include "phasestar/snapshot.hpp"

#include "phasestar/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace phasestar {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'S', 'G', 'R', 'I', 'D', '0', '1'};

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw InputError("truncated snapshot");
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const GridState& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.spec.axes.size()));
  put<std::uint32_t>(os, 0);
  for (const auto& a : f.spec.axes) {
    put<std::uint64_t>(os, a.points);
    put<double>(os, a.min);
    put<double>(os, a.spacing());
  }
  put<double>(os, f.time);
  os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw InputError("write failed for " + path);
}

GridState read_snapshot(const std::string& path, const std::vector<std::string>& names, Boundary boundary, Scheme scheme) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw InputError(path + " is not a PSGRID01 snapshot");
  auto ndim = get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  if (ndim == 0 || ndim > 16) throw InputError("snapshot has an invalid axis count");
  if (!names.empty() && names.size() != ndim) throw InputError("snapshot axis names do not match its dimension");
  GridSpec spec;
  spec.boundary = boundary;
  spec.scheme = scheme;
  for (std::uint32_t k = 0; k < ndim; ++k) {
    Axis a;
    a.points = get<std::uint64_t>(is);
    a.min = get<double>(is);
    double h = get<double>(is);
    a.max = a.min + h * static_cast<double>(a.points);
    a.name = names.empty() ? "x" + std::to_string(k) : names[k];
    spec.axes.push_back(a);
  }
  double t = get<double>(is);
  std::vector<double> v(spec.size());
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw InputError("truncated snapshot payload in " + path);
  return GridState(spec, std::move(v), t);
}

std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t k = 0; k < bytes; ++k) {
    h ^= p[k];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t checksum(const GridState& f) { return fnv1a64(f.values.data(), f.values.size() * sizeof(double)); }

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_gnuplot_slice(const std::string& path, const GridState& f, const std::string& x_axis, const std::string& y_axis) {
  const auto& s = f.spec;
  std::size_t ax = s.axis(x_axis), ay = s.axis(y_axis);
  if (ax == ay) throw InputError("gnuplot slice needs two distinct axes");
  auto strides = s.strides();
  std::size_t base = 0;
  for (std::size_t k = 0; k < s.axes.size(); ++k)
    if (k != ax && k != ay) base += (s.axes[k].points / 2) * strides[k];
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path);
  os << "# " << x_axis << " " << y_axis << " f  (t = " << std::setprecision(17) << f.time << ")\n";
  char line[96];
  for (std::size_t i = 0; i < s.axes[ax].points; ++i) {
    for (std::size_t j = 0; j < s.axes[ay].points; ++j) {
      double v = f.values[base + i * strides[ax] + j * strides[ay]];
      std::snprintf(line, sizeof line, "%.10e %.10e %.10e\n", s.axes[ax].x(i), s.axes[ay].x(j), v);
      os << line;
    }
    os << "\n";
  }
}

}  // namespace phasestar
