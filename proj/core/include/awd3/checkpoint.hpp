#pragma once

#include <filesystem>

#include "awd3/agents.hpp"

namespace awd3 {

/// Checkpoint container: the magic header "AWD3CKPT1", a u64 entry count,
/// then length-prefixed named entries. Parameter arrays are little-endian
/// IEEE-754 doubles; generator states and text metadata are byte entries.
/// Holds the full AgentState: networks, Adam moments, beta, step counter,
/// random streams, config snapshot and environment name.
inline constexpr char kCheckpointMagic[] = "AWD3CKPT1";

void save_checkpoint(const std::filesystem::path& path, const AgentState& state);

/// Throws IoError on a missing file, bad magic or truncated container.
AgentState load_checkpoint(const std::filesystem::path& path);

} // namespace awd3
