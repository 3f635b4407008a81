#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eigentraj/etspace.hpp"

namespace eigentraj::plot {

// SVG of basis vector i: its 2D path on top, x(t) and y(t) traces below.
// Coordinates are printed with fixed precision so output is byte-stable.
std::string basis_svg(const etspace::ETBasis& basis, std::size_t i);

// Writes basis_<segment>_u<i>.svg for every vector of the basis (1-based names).
std::vector<std::filesystem::path> write_basis_plots(const etspace::ETBasis& basis, const std::filesystem::path& dir);

}  // namespace eigentraj::plot
