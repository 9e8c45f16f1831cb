#pragma once

#include <filesystem>
#include <string_view>

#include "palms/dataset.hpp"

namespace palms {

/// Reads `f1,...,fn,label` CSV. Ids are row indices (0-based, data rows only).
/// Errors name the offending row and column.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text);

/// Feature-only parse for uploaded pools. A trailing `label` column is accepted
/// and discarded: uploaded labels are never trusted. Returned points carry
/// label 0 as a placeholder.
Dataset parse_unlabeled_csv(std::string_view text);

}  // namespace palms
