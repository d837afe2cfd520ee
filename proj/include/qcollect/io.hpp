// io.hpp
// JSON state files: {"k","n","matrix":[[[re,im],...],...]} for density
// matrices, {"k","n","amplitudes":[[re,im],...]} for pure states.

#pragma once

#include <string>
#include <variant>

#include "qcollect/qcore.hpp"

namespace qcollect::io {

using LoadedState = std::variant<DensityMatrix, PureState>;

// Dispatches on the presence of "amplitudes" vs "matrix". Throws ParseError
// for malformed input; validation errors propagate from qcore.
LoadedState load_state(const std::string& path, double tol = kDefaultTol);

DensityMatrix load_density(const std::string& path, double tol = kDefaultTol);
PureState load_pure(const std::string& path, double tol = kDefaultTol);

std::string density_to_json(const DensityMatrix& rho);
std::string pure_to_json(const PureState& psi);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace qcollect::io
