#pragma once

#include <filesystem>

#include "json.hpp"
#include "madbm/dbm.hpp"

namespace madbm {

/// Checkpoint document: {"shape": [...], "a": [...], "b": [[...], ...], "W": [[[...]], ...]}.
nlohmann::json params_to_json(const DbmParams& params);
DbmParams params_from_json(const nlohmann::json& doc);

void save_params(const std::filesystem::path& path, const DbmParams& params);
DbmParams load_params(const std::filesystem::path& path);

}  // namespace madbm
