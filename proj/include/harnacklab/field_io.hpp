#pragma once

#include <filesystem>

#include "harnacklab/grid.hpp"

namespace harnack {

/// FLD1: ASCII header "FLD1 <dim> <n> <role>\n" followed by n^d little-endian
/// IEEE-754 doubles, last axis fastest.
void save_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField load_field(const std::filesystem::path& path);

}  // namespace harnack
