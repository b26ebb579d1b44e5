#include "fdmq/trace_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "fdmq/errors.hpp"

namespace fdmq {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'D', 'M', 'Q'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw Error("trace file truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_trace(std::ostream& out, const IQTrace& trace) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kTraceFormatVersion);
  put_le<double>(out, trace.sample_rate_hz);
  put_le<std::uint64_t>(out, trace.samples.size());
  put_le<double>(out, trace.carrier_hz);
  for (const auto& s : trace.samples) {
    put_le<double>(out, s.real());
    put_le<double>(out, s.imag());
  }
  if (!out) throw Error("failed writing trace");
}

IQTrace read_trace(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not an FDMQ trace file");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kTraceFormatVersion)
    throw Error("unsupported trace format version " + std::to_string(version));
  IQTrace trace;
  trace.sample_rate_hz = get_le<double>(in);
  const auto n = get_le<std::uint64_t>(in);
  trace.carrier_hz = get_le<double>(in);
  trace.samples.resize(n);
  for (auto& s : trace.samples) {
    const double i = get_le<double>(in);
    const double q = get_le<double>(in);
    s = {i, q};
  }
  return trace;
}

void write_trace_file(const std::filesystem::path& path, const IQTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_trace(out, trace);
}

IQTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_trace(in);
}

}  // namespace fdmq
