#pragma once

#include <iosfwd>
#include <string>

#include "beamlab/poly.hpp"

namespace beamlab {

inline constexpr int kPolyFormatVersion = 1;

// Line format:
//   beamlab-poly <version>
//   lattice <d> <J> <s> <a_1> ... <a_d>
//   poly <degree> <n_keys> <real 0|1>
//   <k> <sign_1> ... <sign_k> <j_1 components> ... <j_k components> <re> <im>
void write_poly(std::ostream& os, const HomogPoly& p);
// Reads a polynomial; when `lat` is null a lattice is built from the header.
HomogPoly read_poly(std::istream& is, LatticePtr lat = nullptr);

void save_poly(const std::string& path, const HomogPoly& p);
HomogPoly load_poly(const std::string& path, LatticePtr lat = nullptr);

}  // namespace beamlab
