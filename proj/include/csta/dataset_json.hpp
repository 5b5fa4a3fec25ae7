// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "csta/skeleton.hpp"

namespace csta {

/// Canonical dataset interchange document:
///
///   {
///     "classes": ["name", ...],
///     "samples": [
///       { "label": int, "subject": int, "view": int,
///         "frames": [ [ [x,y,z] x25 ] xT ],
///         "source": "optional string" }, ...
///     ],
///     "splits": { "protocol": ["train"|"test", ...] }   (optional)
///   }
///
/// Coordinates are decimal meters and survive a write/parse round trip
/// bit-identically. parse validates the schema and throws ValidationError
/// naming the JSON path of the first violation.
Dataset parse_canonical_json(const std::string& text);
std::string write_canonical_json(const Dataset& dataset);

Dataset load_canonical_json(const std::filesystem::path& path);
void save_canonical_json(const Dataset& dataset, const std::filesystem::path& path);

} // namespace csta
