#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qsopt/agent.hpp"

namespace qsopt {

// Binary checkpoint, little-endian:
//
//   char[8]   "QSOPTCKP"
//   u32       format version (kCheckpointVersion)
//   i32 x 8   QNetShape: channels rows cols aux actions conv1 conv2 hidden
//   f64 x 10  gamma eps_start eps_floor eps_decay lr lr_decay plateau_factor
//             entangling_weight (reserved) (reserved)
//   u64 x 2   memory_size batch_size
//   i32 x 3   plateau_patience plateau_window target_sync_every
//   u64       parameter count P
//   f32 x P   main network parameters
//   f32 x P   target network parameters
//
// Readers reject unknown versions, wrong magic, and truncated files.

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  AgentConfig agent;
  QNetShape shape;
  std::vector<float> main;
  std::vector<float> target;
};

Checkpoint make_checkpoint(const Agent& agent);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws Error on unreadable or malformed files.
Checkpoint load_checkpoint(const std::filesystem::path& path);
/// Agent with the stored configuration and both networks restored.
Agent restore_agent(const Checkpoint& ckpt);

}  // namespace qsopt
