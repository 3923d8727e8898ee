#pragma once

// Serialization: JSON descriptors and states (complex vectors as interleaved
// re/im arrays), the trace CSV schema, PGM images, and atomic file writes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "saddle_raar/analysis.hpp"
#include "saddle_raar/solvers.hpp"

namespace saddle_raar::io {

using Json = nlohmann::json;

/// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

Json complex_to_json(const CVec& v);
CVec complex_from_json(const Json& j);
Json real_to_json(const RVec& v);
RVec real_from_json(const Json& j);

/// Dense ensembles are stored by (n, N, seed) and rebuilt; masked-DFT
/// ensembles carry their masks and grid shapes.
Json ensemble_to_json(const MeasurementEnsemble& e);
MeasurementEnsemble ensemble_from_json(const Json& j);

Json state_to_json(const SolverState& s);
SolverState state_from_json(const Json& j);

inline constexpr const char* kTraceHeader = "k,beta_or_rho,residual,deriv_norm,t_ratio,objective_F,wall_ns";

std::string trace_csv(const std::vector<DiagnosticsRecord>& trace);

Json to_json(const FixedPointCertificate& c);
Json to_json(const SaddleCertificate& c);
Json to_json(const DrsCertificate& c);
Json to_json(const SpectralGap& g);

/// Binary PGM of `values` (row-major on `grid`) scaled so the maximum maps to
/// the top gray level. `bits` is 8 or 16.
std::string pgm(const RVec& values, GridShape grid, int bits = 8);

}  // namespace saddle_raar::io
