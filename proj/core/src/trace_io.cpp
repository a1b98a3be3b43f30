#include "pdtc/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdtc {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const std::filesystem::path& path, const TimeTrace& trace,
                     const TraceHeader& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# schema: " << kTraceSchema << '\n';
  out << "# n_spins: " << trace.n_spins << '\n';
  for (const auto& [k, v] : header) {
    if (k.find_first_of(":\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("invalid trace header entry: " + k);
    }
    out << "# " << k << ": " << v << '\n';
  }
  out << kTraceColumns << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_double(trace.time[i]) << ',' << trace.parity[i] << ','
        << format_double(trace.ix[i]) << ',' << format_double(trace.iy[i]) << ','
        << format_double(trace.iz[i]) << ',' << format_double(trace.s[i]) << ','
        << format_double(trace.phi[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LoadedTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  LoadedTrace lt;
  std::string line;
  bool columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
      };
      trim(key);
      trim(value);
      lt.header[key] = value;
      continue;
    }
    if (!columns) {
      if (line != kTraceColumns) throw std::runtime_error("unexpected trace columns: " + line);
      columns = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    double v[7];
    for (int c = 0; c < 7; ++c) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("short trace row: " + line);
      v[c] = std::stod(cell);
    }
    auto& t = lt.trace;
    const int parity = static_cast<int>(v[1]);
    Readout r = Readout::spin_lock;
    if (t.empty()) r = Readout::none;
    else if (parity != t.parity.back()) r = Readout::kick;
    t.time.push_back(v[0]);
    t.parity.push_back(parity);
    t.kind.push_back(r);
    t.ix.push_back(v[2]);
    t.iy.push_back(v[3]);
    t.iz.push_back(v[4]);
    t.s.push_back(v[5]);
    t.phi.push_back(v[6]);
  }
  if (!columns) throw std::runtime_error("missing column header in " + path.string());
  auto it = lt.header.find("n_spins");
  lt.trace.n_spins = it == lt.header.end() ? 0 : std::stoi(it->second);
  return lt;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace pdtc
