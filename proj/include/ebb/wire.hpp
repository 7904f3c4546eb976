#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ebb/core.hpp"

namespace ebb::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kSync0 = 0xEB;
inline constexpr std::uint8_t kSync1 = 0xB0;
inline constexpr std::size_t kHeaderSize = 2 + 1 + 4 + 4 + 2;  // sync, kind, seq, t, len
inline constexpr std::size_t kCrcSize = 2;
inline constexpr std::size_t kDataPayloadSize = kChannelCount * 4;
inline constexpr std::size_t kMaxMetaPayload = 4096;

enum class FrameKind : std::uint8_t { Data = 0x01, Heartbeat = 0x02, Meta = 0x03 };

struct Frame {
    FrameKind kind = FrameKind::Heartbeat;
    std::uint32_t seq = 0;
    std::uint32_t t = 0;
    Bytes payload;
    std::uint16_t crc = 0;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final XOR.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> bytes,
                                std::uint16_t crc = 0xFFFF);

/// CRC over kind‖seq‖t‖len‖payload as laid out on the wire.
std::uint16_t frame_crc(FrameKind kind, std::uint32_t seq, std::uint32_t t,
                        std::span<const std::uint8_t> payload);

/// Builds a frame with a correct CRC. Throws ArgumentError on a payload
/// length that does not match the kind.
Frame make_frame(FrameKind kind, std::uint32_t seq, std::uint32_t t, Bytes payload = {});
Frame make_data_frame(std::uint32_t seq, std::uint32_t t, const ChannelValues& values);
Frame make_heartbeat_frame(std::uint32_t seq, std::uint32_t t);
Frame make_meta_frame(std::uint32_t seq, const SessionMeta& meta);

Bytes encode_frame(const Frame& f);
void encode_frame_into(const Frame& f, Bytes& out);

ChannelValues decode_data_payload(std::span<const std::uint8_t> payload);
SessionMeta decode_meta_payload(std::span<const std::uint8_t> payload);

struct FrameOk {
    Frame frame;
    friend bool operator==(const FrameOk&, const FrameOk&) = default;
};
struct CrcError {
    std::uint64_t offset;  // stream offset of the sync word
    friend bool operator==(const CrcError&, const CrcError&) = default;
};
struct SyncLoss {
    std::uint64_t skipped;
    friend bool operator==(const SyncLoss&, const SyncLoss&) = default;
};
struct SeqGap {
    std::uint32_t expected;
    std::uint32_t got;
    friend bool operator==(const SeqGap&, const SeqGap&) = default;
};

using DecodeEvent = std::variant<FrameOk, CrcError, SyncLoss, SeqGap>;

/// Incremental frame decoder. Single owner; feed bytes in arrival order and
/// call finish() at end of stream to flush any undecodable tail.
class StreamDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes, std::vector<DecodeEvent>& out);
    void finish(std::vector<DecodeEvent>& out);

    std::uint64_t bytes_consumed() const { return consumed_; }

private:
    void drain(std::vector<DecodeEvent>& out);
    void skip(std::size_t n);
    void flush_skipped(std::vector<DecodeEvent>& out);

    Bytes buf_;
    std::size_t pos_ = 0;            // read position within buf_
    std::uint64_t consumed_ = 0;     // stream offset of buf_[pos_]
    std::uint64_t pending_skip_ = 0;
    std::optional<std::uint32_t> expected_seq_;
};

/// Convenience: decode a complete byte string.
std::vector<DecodeEvent> decode_stream(std::span<const std::uint8_t> bytes);

struct CollectResult {
    std::vector<EbbRecord> records;
    std::optional<SessionMeta> meta;
    std::vector<std::string> warnings;
};

/// Turns decoder events into exactly one record per second in [0, session_len),
/// zero-filling seconds with no DATA frame.
CollectResult collect(std::span<const DecodeEvent> events, std::uint32_t session_len);

/// Ordered, thread-safe byte channel connecting a producer thread to a
/// consumer thread. close() marks end of stream.
class ByteChannel {
public:
    explicit ByteChannel(std::size_t max_chunks = 256) : max_chunks_(max_chunks) {}

    void push(Bytes chunk);
    void close();
    /// Blocks until a chunk is available; nullopt once closed and drained.
    std::optional<Bytes> pop();

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Bytes> chunks_;
    std::size_t max_chunks_;
    bool closed_ = false;
};

}  // namespace ebb::wire
