#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "fdmq/dsp_tx.hpp"

namespace fdmq {

// Binary trace dump, all fields little-endian:
//
//   offset  size  field
//        0     4  magic "FDMQ"
//        4     4  uint32 format version (1)
//        8     8  float64 sample rate, Hz
//       16     8  uint64 number of samples N
//       24     8  float64 carrier frequency, Hz (0 for baseband)
//       32  16*N  interleaved float64 I, Q
//
// start_time is not stored; traces read back start at t = 0.
inline constexpr std::uint32_t kTraceFormatVersion = 1;
inline constexpr std::size_t kTraceHeaderBytes = 32;

void write_trace(std::ostream& out, const IQTrace& trace);
IQTrace read_trace(std::istream& in);

void write_trace_file(const std::filesystem::path& path, const IQTrace& trace);
IQTrace read_trace_file(const std::filesystem::path& path);

}  // namespace fdmq
