#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "trapdyn/model.hpp"

namespace trapdyn {

// System file layout:
//   {"n": 3, "c": [...], "L": [[...], ...],
//    "Q": [{"i": 2, "j": 1, "k": 3, "v": -0.5}, ...]}
// Indices are one-based with j <= k. Numbers are written with 17 significant
// digits, so write(parse(write(s))) reproduces the same bytes.

LosslessQuadraticSystem parse_system_json(
    std::string_view text,
    LosslessQuadraticSystem::Validation validation =
        LosslessQuadraticSystem::Validation::kLossless);

std::string system_to_json(const LosslessQuadraticSystem& sys);

LosslessQuadraticSystem load_system(
    const std::filesystem::path& path,
    LosslessQuadraticSystem::Validation validation =
        LosslessQuadraticSystem::Validation::kLossless);

void save_system(const LosslessQuadraticSystem& sys,
                 const std::filesystem::path& path);

/// printf("%.17g") with a trailing ".0" when the result would read as an
/// integer, so the value stays a JSON float.
std::string format_double(double v);

}  // namespace trapdyn
