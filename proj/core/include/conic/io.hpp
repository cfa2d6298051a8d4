#pragma once

#include "conic/instance.hpp"
#include "conic/solver.hpp"
#include "conic/types.hpp"

#include <string>

namespace conic {

/// Instance document: {"n": .., "m": .., "rows": [[..]..],
/// "planted": {"center": [..], "rho": ..}?}. Numbers round-trip bit-exactly.
std::string save_instance(const ConeInstance& instance);
ConeInstance load_instance(const std::string& text);

ConeInstance load_instance_file(const std::string& path);
void save_instance_file(const ConeInstance& instance, const std::string& path);

/// Certificate document mirrors the Certificate fields plus the transform
/// log and (when present) the norm coefficient log.
std::string save_certificate(const Certificate& cert);
Certificate load_certificate(const std::string& text);

Certificate load_certificate_file(const std::string& path);
void save_certificate_file(const Certificate& cert, const std::string& path);

/// Result document: config echo, certificate, phase/iteration counts, the
/// thresholds in effect, and the roundedness block when present. Excluding
/// wall_ms, identical configs and seeds reproduce it bit-exactly.
std::string save_result(const SolveResult& result, const SolveConfig& cfg, double wall_ms);

/// Line-delimited trace: one JSON object per iteration row and per rescale.
std::string trace_to_jsonl(const SolveResult& result);

} // namespace conic
