#include "ebb/wire.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

namespace ebb::wire {
namespace {

constexpr std::array<std::uint16_t, 256> make_crc_table() {
    std::array<std::uint16_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        auto crc = static_cast<std::uint16_t>(i << 8);
        for (int b = 0; b < 8; ++b) {
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

constexpr auto kCrcTable = make_crc_table();

std::uint16_t crc_update(std::uint16_t crc, std::uint8_t byte) {
    return static_cast<std::uint16_t>((crc << 8) ^ kCrcTable[((crc >> 8) ^ byte) & 0xFF]);
}

void put_u16le(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32le(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint16_t get_u16le(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool known_kind(std::uint8_t k) { return k >= 0x01 && k <= 0x03; }

bool length_fits_kind(FrameKind kind, std::size_t len) {
    switch (kind) {
        case FrameKind::Data: return len == kDataPayloadSize;
        case FrameKind::Heartbeat: return len == 0;
        case FrameKind::Meta: return len <= kMaxMetaPayload;
    }
    return false;
}

std::string kind_name(FrameKind kind) {
    switch (kind) {
        case FrameKind::Data: return "DATA";
        case FrameKind::Heartbeat: return "HEARTBEAT";
        case FrameKind::Meta: return "META";
    }
    return "?";
}

}  // namespace

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> bytes, std::uint16_t crc) {
    for (auto b : bytes) crc = crc_update(crc, b);
    return crc;
}

std::uint16_t frame_crc(FrameKind kind, std::uint32_t seq, std::uint32_t t,
                        std::span<const std::uint8_t> payload) {
    Bytes header;
    header.reserve(11);
    header.push_back(static_cast<std::uint8_t>(kind));
    put_u32le(header, seq);
    put_u32le(header, t);
    put_u16le(header, static_cast<std::uint16_t>(payload.size()));
    return crc16_ccitt_false(payload, crc16_ccitt_false(header));
}

Frame make_frame(FrameKind kind, std::uint32_t seq, std::uint32_t t, Bytes payload) {
    if (!length_fits_kind(kind, payload.size())) {
        throw ArgumentError(kind_name(kind) + " frame cannot carry a " +
                            std::to_string(payload.size()) + "-byte payload");
    }
    Frame f{kind, seq, t, std::move(payload), 0};
    f.crc = frame_crc(f.kind, f.seq, f.t, f.payload);
    return f;
}

Frame make_data_frame(std::uint32_t seq, std::uint32_t t, const ChannelValues& values) {
    Bytes payload;
    payload.reserve(kDataPayloadSize);
    for (float v : values) put_u32le(payload, std::bit_cast<std::uint32_t>(v));
    return make_frame(FrameKind::Data, seq, t, std::move(payload));
}

Frame make_heartbeat_frame(std::uint32_t seq, std::uint32_t t) {
    return make_frame(FrameKind::Heartbeat, seq, t);
}

Frame make_meta_frame(std::uint32_t seq, const SessionMeta& meta) {
    nlohmann::ordered_json j{{"session_id", meta.session_id},
                             {"device_id", meta.device_id},
                             {"start_utc", meta.start_utc},
                             {"rate_hz", meta.rate_hz},
                             {"schema_version", meta.schema_version}};
    const std::string text = j.dump();
    return make_frame(FrameKind::Meta, seq, 0, Bytes(text.begin(), text.end()));
}

void encode_frame_into(const Frame& f, Bytes& out) {
    if (!length_fits_kind(f.kind, f.payload.size())) {
        throw ArgumentError(kind_name(f.kind) + " frame cannot carry a " +
                            std::to_string(f.payload.size()) + "-byte payload");
    }
    const std::size_t start = out.size();
    out.push_back(kSync0);
    out.push_back(kSync1);
    out.push_back(static_cast<std::uint8_t>(f.kind));
    put_u32le(out, f.seq);
    put_u32le(out, f.t);
    put_u16le(out, static_cast<std::uint16_t>(f.payload.size()));
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    const auto crc = crc16_ccitt_false(std::span(out).subspan(start + 2));
    if (crc != f.crc) throw ArgumentError("frame crc does not match its contents");
    out.push_back(static_cast<std::uint8_t>(crc >> 8));
    out.push_back(static_cast<std::uint8_t>(crc));
}

Bytes encode_frame(const Frame& f) {
    Bytes out;
    out.reserve(kHeaderSize + f.payload.size() + kCrcSize);
    encode_frame_into(f, out);
    return out;
}

ChannelValues decode_data_payload(std::span<const std::uint8_t> payload) {
    if (payload.size() != kDataPayloadSize) {
        throw ArgumentError("DATA payload must be 48 bytes");
    }
    ChannelValues values{};
    for (std::size_t i = 0; i < kChannelCount; ++i) {
        values[i] = std::bit_cast<float>(get_u32le(payload.data() + 4 * i));
    }
    return values;
}

SessionMeta decode_meta_payload(std::span<const std::uint8_t> payload) {
    const auto j = nlohmann::json::parse(payload.begin(), payload.end());
    SessionMeta m;
    m.session_id = j.value("session_id", "");
    m.device_id = j.value("device_id", "");
    m.start_utc = j.value("start_utc", "");
    m.rate_hz = j.value("rate_hz", 1);
    m.schema_version = j.value("schema_version", 1);
    return m;
}

// ---------------------------------------------------------------------------

void StreamDecoder::feed(std::span<const std::uint8_t> bytes, std::vector<DecodeEvent>& out) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    drain(out);
    if (pos_ > 0) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
        pos_ = 0;
    }
}

void StreamDecoder::finish(std::vector<DecodeEvent>& out) {
    const std::size_t tail = buf_.size() - pos_;
    pending_skip_ += tail;
    consumed_ += tail;
    buf_.clear();
    pos_ = 0;
    flush_skipped(out);
}

void StreamDecoder::skip(std::size_t n) {
    pos_ += n;
    consumed_ += n;
}

void StreamDecoder::flush_skipped(std::vector<DecodeEvent>& out) {
    if (pending_skip_ > 0) {
        out.emplace_back(SyncLoss{pending_skip_});
        pending_skip_ = 0;
    }
}

void StreamDecoder::drain(std::vector<DecodeEvent>& out) {
    for (;;) {
        const std::size_t avail = buf_.size() - pos_;
        if (avail == 0) return;
        const std::uint8_t* p = buf_.data() + pos_;
        if (p[0] != kSync0) {
            skip(1);
            ++pending_skip_;
            continue;
        }
        if (avail < 2) return;
        if (p[1] != kSync1) {
            skip(1);
            ++pending_skip_;
            continue;
        }
        if (avail < kHeaderSize) return;

        const std::uint8_t raw_kind = p[2];
        const std::size_t len = get_u16le(p + 11);
        if (!known_kind(raw_kind) || !length_fits_kind(static_cast<FrameKind>(raw_kind), len)) {
            // False sync or corrupted header: resume the search one byte later.
            skip(1);
            ++pending_skip_;
            continue;
        }
        const std::size_t total = kHeaderSize + len + kCrcSize;
        if (avail < total) return;

        const auto wire_crc = static_cast<std::uint16_t>((p[kHeaderSize + len] << 8) |
                                                         p[kHeaderSize + len + 1]);
        const auto calc = crc16_ccitt_false(std::span(p + 2, kHeaderSize - 2 + len));
        if (wire_crc != calc) {
            flush_skipped(out);
            out.emplace_back(CrcError{consumed_});
            skip(2);
            continue;
        }

        flush_skipped(out);
        Frame f;
        f.kind = static_cast<FrameKind>(raw_kind);
        f.seq = get_u32le(p + 3);
        f.t = get_u32le(p + 7);
        f.payload.assign(p + kHeaderSize, p + kHeaderSize + len);
        f.crc = wire_crc;
        if (expected_seq_ && f.seq > *expected_seq_) {
            out.emplace_back(SeqGap{*expected_seq_, f.seq});
        }
        expected_seq_ = f.seq + 1;
        out.emplace_back(FrameOk{std::move(f)});
        skip(total);
    }
}

std::vector<DecodeEvent> decode_stream(std::span<const std::uint8_t> bytes) {
    StreamDecoder dec;
    std::vector<DecodeEvent> events;
    dec.feed(bytes, events);
    dec.finish(events);
    return events;
}

// ---------------------------------------------------------------------------

CollectResult collect(std::span<const DecodeEvent> events, std::uint32_t session_len) {
    CollectResult result;
    std::vector<std::optional<ChannelValues>> data(session_len);
    std::vector<bool> heartbeat(session_len, false);

    for (const auto& ev : events) {
        if (const auto* ok = std::get_if<FrameOk>(&ev)) {
            const Frame& f = ok->frame;
            switch (f.kind) {
                case FrameKind::Data:
                    if (f.t >= session_len) {
                        result.warnings.push_back("DATA frame t=" + std::to_string(f.t) +
                                                  " beyond session end, dropped");
                    } else if (data[f.t]) {
                        result.warnings.push_back("duplicate DATA frame for t=" +
                                                  std::to_string(f.t) + ", kept the first");
                    } else {
                        data[f.t] = decode_data_payload(f.payload);
                    }
                    break;
                case FrameKind::Heartbeat:
                    if (f.t < session_len) heartbeat[f.t] = true;
                    break;
                case FrameKind::Meta:
                    try {
                        result.meta = decode_meta_payload(f.payload);
                    } catch (const std::exception& e) {
                        result.warnings.push_back(std::string("unreadable META frame: ") +
                                                  e.what());
                    }
                    break;
            }
        } else if (const auto* crc = std::get_if<CrcError>(&ev)) {
            result.warnings.push_back("crc error at offset " + std::to_string(crc->offset));
        } else if (const auto* loss = std::get_if<SyncLoss>(&ev)) {
            result.warnings.push_back("sync lost, skipped " + std::to_string(loss->skipped) +
                                      " bytes");
        } else if (const auto* gap = std::get_if<SeqGap>(&ev)) {
            result.warnings.push_back("sequence gap: expected " + std::to_string(gap->expected) +
                                      ", got " + std::to_string(gap->got));
        }
    }

    result.records.reserve(session_len);
    for (std::uint32_t t = 0; t < session_len; ++t) {
        EbbRecord r;
        r.seq = t;
        r.t = t;
        if (data[t]) {
            r.values = *data[t];
            r.hb = heartbeat[t];
        } else {
            r.synthesized = true;
        }
        result.records.push_back(r);
    }
    return result;
}

// ---------------------------------------------------------------------------

void ByteChannel::push(Bytes chunk) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return chunks_.size() < max_chunks_ || closed_; });
    if (closed_) return;
    chunks_.push_back(std::move(chunk));
    cv_.notify_all();
}

void ByteChannel::close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
}

std::optional<Bytes> ByteChannel::pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !chunks_.empty() || closed_; });
    if (chunks_.empty()) return std::nullopt;
    Bytes chunk = std::move(chunks_.front());
    chunks_.pop_front();
    cv_.notify_all();
    return chunk;
}

}  // namespace ebb::wire
