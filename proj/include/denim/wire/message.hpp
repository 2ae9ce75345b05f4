#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "denim/wire/cipher.hpp"
#include "denim/wire/ids.hpp"

namespace denim::wire {

// Application-layer sizes (TLS record included) and on-wire sizes (plus
// 20B TCP + 20B IP).
inline constexpr std::size_t kTransportOverhead = 40;
inline constexpr std::size_t kHeaderSize = 49;
inline constexpr std::size_t kChunksPerMessage = 2;
inline constexpr std::size_t kMessageCapacity = kChunksPerMessage * cipher::kAsymPlainMax;  // 892

inline constexpr std::size_t kMessageBodySize =
    kHeaderSize + kChunksPerMessage * cipher::kAsymSealedSize;                 // 1073
inline constexpr std::size_t kKeyRequestBodySize = 2 * UserId::kSize;          // 32
inline constexpr std::size_t kKeyResponseBodySize = 2 * PublicKey::kSize;      // 1024

inline constexpr std::size_t kMessageAppSize = kMessageBodySize + cipher::kSymOverhead;          // 1094
inline constexpr std::size_t kKeyRequestAppSize = kKeyRequestBodySize + cipher::kSymOverhead;    // 53
inline constexpr std::size_t kKeyResponseAppSize = kKeyResponseBodySize + cipher::kSymOverhead;  // 1045

inline constexpr std::size_t kMessageWireSize = kMessageAppSize + kTransportOverhead;          // 1134
inline constexpr std::size_t kKeyRequestWireSize = kKeyRequestAppSize + kTransportOverhead;    // 93
inline constexpr std::size_t kKeyResponseWireSize = kKeyResponseAppSize + kTransportOverhead;  // 1085

static_assert(kMessageWireSize == 1134);
static_assert(kKeyRequestAppSize == 53 && kKeyRequestWireSize == 93);
static_assert(kKeyResponseAppSize == 1045 && kKeyResponseWireSize == 1085);

enum class MessageType : std::uint8_t {
    Regular = 1,
    Deniable = 2,
    Dummy = 3,
    BlockRequest = 4,
};

const char* to_string(MessageType type);

struct MessageHeaders {
    UserId sender;
    UserId true_receiver;
    UserId decoy_receiver;  // absent for everything but DENIABLE / BLOCK_REQUEST
    MessageType type = MessageType::Regular;

    std::array<std::uint8_t, kHeaderSize> encode() const;
    static std::optional<MessageHeaders> decode(std::span<const std::uint8_t> bytes);

    bool operator==(const MessageHeaders&) const = default;
};

/// A payload chunk as it travels: always 512 sealed bytes.
class PayloadChunk {
public:
    PayloadChunk() = default;
    explicit PayloadChunk(const cipher::SealedChunk& sealed) : sealed_(sealed) {}

    /// Throws Error(ChunkTooLarge) for plaintext over 446 bytes.
    static PayloadChunk seal(const PublicKey& key, cipher::ContentKind kind,
                             std::span<const std::uint8_t> plaintext, Prng& nonces);
    /// Server-fabricated filler: random bytes nobody can open.
    static PayloadChunk random(Prng& prng);

    std::optional<cipher::Opened> open(const PublicKey& key) const;
    const cipher::SealedChunk& sealed() const noexcept { return sealed_; }

    bool operator==(const PayloadChunk&) const = default;

private:
    cipher::SealedChunk sealed_{};
};

using ChunkPair = std::array<PayloadChunk, kChunksPerMessage>;

struct PaddedMsg {
    MessageHeaders headers;
    ChunkPair chunks;

    bool operator==(const PaddedMsg&) const = default;
};

enum class DatagramKind : std::uint8_t { Message, KeyRequest, KeyResponse };

const char* to_string(DatagramKind kind);

/// The only thing the network sees: opaque bytes. `bytes` holds the TLS record
/// (application layer); the TCP/IP headers are accounted, not materialised.
struct WireDatagram {
    DatagramKind kind = DatagramKind::Message;
    Bytes bytes;

    std::size_t app_size() const noexcept { return bytes.size(); }
    std::size_t wire_size() const noexcept { return bytes.size() + kTransportOverhead; }
};

std::size_t wire_size_of(DatagramKind kind) noexcept;
/// Classifies an on-wire size; anything outside the three sizes is garbage.
std::optional<DatagramKind> classify_wire_size(std::size_t wire_size) noexcept;

// Plaintext chunking: each message carries two chunks of up to 446 bytes.
using MessagePlaintext = std::array<Bytes, kChunksPerMessage>;

/// Splits text into ceil(len/892) messages (one message for empty text). The
/// second chunk of a message is empty when there is nothing left for it.
std::vector<MessagePlaintext> chunk_plaintext(std::span<const std::uint8_t> text);
Bytes unchunk(std::span<const MessagePlaintext> messages);

ChunkPair seal_message(const PublicKey& key, cipher::ContentKind kind,
                       const MessagePlaintext& plain, Prng& nonces);

WireDatagram encode_message(const PaddedMsg& msg, const LinkKey& link, Prng& nonces);
std::optional<PaddedMsg> decode_message(const WireDatagram& datagram, const LinkKey& link);

struct KeyRequest {
    UserId who1;
    UserId who2;  // absent for single-key requests

    bool operator==(const KeyRequest&) const = default;
};

WireDatagram encode_key_request(const KeyRequest& request, const LinkKey& link, Prng& nonces);
std::optional<KeyRequest> decode_key_request(const WireDatagram& datagram, const LinkKey& link);

struct KeyResponse {
    PublicKey key1;
    PublicKey key2;
    /// False when slot 2 repeats slot 1 (single-key response).
    bool key2_valid = false;

    bool unknown_user() const noexcept { return key1.is_null() || (key2_valid && key2.is_null()); }
};

/// Single-key responses repeat key1 in slot 2.
WireDatagram encode_key_response(const PublicKey& key1, const std::optional<PublicKey>& key2,
                                 const LinkKey& link, Prng& nonces);
std::optional<KeyResponse> decode_key_response(const WireDatagram& datagram, const LinkKey& link);

}  // namespace denim::wire
