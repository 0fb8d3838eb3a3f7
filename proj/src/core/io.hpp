#pragma once
// Text serialization of problems, spectral data and reconstruction results.
// Documents are JSON; writing is canonical (fixed key order, %.17g numbers),
// so identical values always produce byte-identical files.

#include <string>

#include "inverse.hpp"
#include "problem.hpp"
#include "spectral_data.hpp"

namespace matsl {
namespace io {

std::string write_problem(const BoundaryProblem& p);
BoundaryProblem read_problem(const std::string& text);

std::string write_spectral(const SpectralData& d);
// Reads entries as stored (alpha, multiplicity, cluster_id are authoritative);
// rho, cluster heads, primed weights and the group partition are recomputed.
SpectralData read_spectral(const std::string& text, const Tolerances& tol);

std::string write_result(const ReconstructionResult& r);

// {"key": value, ...} overrides applied onto an existing Tolerances set.
void apply_tolerance_overrides(Tolerances& tol, const std::string& text);

std::string load_file(const std::string& path);
void save_file(const std::string& path, const std::string& contents);

}  // namespace io
}  // namespace matsl
