#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lognls/grid.hpp"
#include "lognls/solver.hpp"

namespace lognls::io {

/// Write bytes to `path` through a temp file in the same directory followed
/// by an atomic rename, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& bytes);

std::string read_file(const std::string& path);

/// Field snapshot: raw little-endian float64 pairs (re, im) in grid order at
/// `path`, with a JSON sidecar at `path + ".json"` describing grid geometry,
/// time stamp, model parameters, and the format version.
void write_snapshot(const std::string& path, const WaveField& u, const pde::ModelParams& p);

/// Load a snapshot written by write_snapshot; returns the field (time stamp
/// restored) and the model parameters from the sidecar.
std::pair<WaveField, pde::ModelParams> read_snapshot(const std::string& path);

/// Evolution diagnostics with fixed column order
///     t, M, J_0.., E, E_reg
/// at 17 significant digits.
void write_diagnostics_csv(const std::vector<pde::DiagRow>& rows, int d, std::ostream& os);

} // namespace lognls::io
