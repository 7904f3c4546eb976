#include "ebb/pipeline.hpp"

#include <algorithm>
#include <thread>

namespace ebb {
namespace {

SimRun finish_collect(std::vector<wire::DecodeEvent> events, std::uint32_t session_len) {
    auto collected = wire::collect(events, session_len);
    SimRun run;
    run.log.records = std::move(collected.records);
    if (collected.meta) run.log.meta = *collected.meta;
    run.warnings = std::move(collected.warnings);
    return run;
}

}  // namespace

SimRun run_pipeline(const sim::Scenario& scenario, std::size_t chunk_size) {
    auto generated = sim::generate(scenario);
    auto stream = sim::encode_stream(generated.frames);
    chunk_size = std::max<std::size_t>(chunk_size, 1);

    wire::ByteChannel channel;
    std::thread producer([&] {
        for (std::size_t off = 0; off < stream.size(); off += chunk_size) {
            const auto end = std::min(stream.size(), off + chunk_size);
            channel.push(wire::Bytes(stream.begin() + static_cast<std::ptrdiff_t>(off),
                                     stream.begin() + static_cast<std::ptrdiff_t>(end)));
        }
        channel.close();
    });

    wire::StreamDecoder decoder;
    std::vector<wire::DecodeEvent> events;
    while (auto chunk = channel.pop()) decoder.feed(*chunk, events);
    decoder.finish(events);
    producer.join();

    auto run = finish_collect(std::move(events), scenario.session_len);
    if (run.log.meta.session_id.empty()) run.log.meta = generated.meta;
    run.truth = std::move(generated.truth);
    run.stream = std::move(stream);
    return run;
}

SimRun collect_stream(std::span<const std::uint8_t> bytes, std::uint32_t session_len) {
    auto run = finish_collect(wire::decode_stream(bytes), session_len);
    run.stream.assign(bytes.begin(), bytes.end());
    return run;
}

}  // namespace ebb
