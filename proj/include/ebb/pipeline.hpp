#pragma once

#include <string>
#include <vector>

#include "ebb/sim.hpp"
#include "ebb/store.hpp"

namespace ebb {

struct SimRun {
    EbbLog log;
    sim::GroundTruth truth;
    std::vector<std::string> warnings;
    wire::Bytes stream;  // the exact bytes that crossed the link
};

/// Generates the scenario's frames, pushes them through a ByteChannel from a
/// producer thread, decodes and collects them on the calling thread.
SimRun run_pipeline(const sim::Scenario& scenario, std::size_t chunk_size = 4096);

/// Decodes and collects a captured byte stream.
SimRun collect_stream(std::span<const std::uint8_t> bytes, std::uint32_t session_len);

}  // namespace ebb
