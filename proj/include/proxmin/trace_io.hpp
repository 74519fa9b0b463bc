#pragma once

#include <string>
#include <vector>

#include "proxmin/accel_scheme.hpp"
#include "proxmin/prox_scheme.hpp"

namespace proxmin {

// Prox trace CSV: k,f,rho,r,normG,backtracks,inner_iters,elapsed_us
std::string prox_trace_csv(const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> parse_prox_trace_csv(const std::string& text);

// Accel trace CSV appends: a_k,alpha_k,tau_k,normG_tilde
std::string accel_trace_csv(const AccelResult& res);
std::vector<TraceRecord> parse_accel_trace_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Round-trippable double formatting (%.17g).
std::string format_double(double v);

}  // namespace proxmin
