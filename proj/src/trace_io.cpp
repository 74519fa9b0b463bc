#include "proxmin/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace proxmin {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kProxHeader = "k,f,rho,r,normG,backtracks,inner_iters,elapsed_us";
constexpr const char* kAccelHeader =
    "k,f,rho,r,normG,backtracks,inner_iters,elapsed_us,a_k,alpha_k,tau_k,normG_tilde";

void append_common(std::string& out, const TraceRecord& t) {
  out += std::to_string(t.k);
  out += ',';
  out += format_double(t.f);
  out += ',';
  out += format_double(t.rho);
  out += ',';
  out += format_double(t.r);
  out += ',';
  out += format_double(t.norm_G);
  out += ',';
  out += std::to_string(t.backtracks);
  out += ',';
  out += std::to_string(t.inner_iters);
  out += ',';
  out += std::to_string(t.elapsed_us);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<TraceRecord> parse_rows(const std::string& text, const char* header,
                                    std::size_t min_fields) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "trace: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == header, "trace: unexpected header: " + line);
  std::vector<TraceRecord> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    require(f.size() >= min_fields, "trace: short row: " + line);
    TraceRecord t;
    t.k = std::stoi(f[0]);
    t.f = std::stod(f[1]);
    t.rho = std::stod(f[2]);
    t.r = std::stod(f[3]);
    t.norm_G = std::stod(f[4]);
    t.backtracks = std::stoi(f[5]);
    t.inner_iters = std::stol(f[6]);
    t.elapsed_us = std::stoll(f[7]);
    rows.push_back(std::move(t));
  }
  return rows;
}

}  // namespace

std::string prox_trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = kProxHeader;
  out += '\n';
  for (const auto& t : trace) {
    append_common(out, t);
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_prox_trace_csv(const std::string& text) {
  return parse_rows(text, kProxHeader, 8);
}

std::string accel_trace_csv(const AccelResult& res) {
  std::string out = kAccelHeader;
  out += '\n';
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    append_common(out, res.trace[i]);
    const AccelState& st = res.states[i];
    out += ',';
    out += format_double(st.estimate.a);
    out += ',';
    out += format_double(st.alpha);
    out += ',';
    out += format_double(st.tau);
    out += ',';
    out += format_double(st.G_tilde.norm());
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_accel_trace_csv(const std::string& text) {
  return parse_rows(text, kAccelHeader, 12);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace proxmin
