#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "elmdetect/trainer.hpp"

namespace elmdetect {

inline constexpr const char* kCheckpointFormat = "elmdetect-checkpoint";
inline constexpr int kCheckpointVersion = 1;

// Hex FNV-1a of the canonical JSON form of the config.
std::string config_hash(const train::TrainConfig& config);

// Doubles are written in shortest round-trip form, so loading restores every
// parameter bit for bit.
nlohmann::json checkpoint_to_json(const train::TrainedModel& model);
// Errors: kFormat (wrong format/version, missing field, shape mismatch).
train::TrainedModel checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const train::TrainedModel& model, const std::filesystem::path& path);
// Errors: kFileNotFound, kFormat.
train::TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace elmdetect
