#pragma once

#include <cstdint>
#include <filesystem>

#include "oldroyd/dynamics.hpp"
#include "oldroyd/integrator.hpp"

namespace oldroyd {

struct StateCheckpoint {
  State state;
  ModelParams params;
  StepperConfig config;
  std::int64_t step = 0;
};

/// Writes u then τ as two consecutive field records to `path`, and the
/// parameters, stepper configuration, step index and time as JSON to
/// `path` + ".json".
void save_state(const std::filesystem::path& path, const State& s, const ModelParams& params,
                const StepperConfig& config, std::int64_t step);

/// Reads both files written by save_state. The state's time is step * dt.
StateCheckpoint load_state(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace oldroyd
