#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "pdtc/propagator.hpp"

namespace pdtc {

inline constexpr const char* kTraceSchema = "pdtc-trace/1";
inline constexpr const char* kTraceColumns = "time,parity,Ix,Iy,Iz,S,phi";

/// Key/value pairs written as "# key: value" lines above the column header.
using TraceHeader = std::map<std::string, std::string>;

void write_trace_csv(const std::filesystem::path& path, const TimeTrace& trace,
                     const TraceHeader& header);

struct LoadedTrace {
  TimeTrace trace;
  TraceHeader header;
};

/// Reads a trace written by write_trace_csv. Readout kinds are recovered from
/// parity changes: a row whose parity differs from the previous one is a kick.
LoadedTrace read_trace_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace pdtc
