#include "denim/wire/message.hpp"

#include <algorithm>

namespace denim::wire {

const char* to_string(MessageType type) {
    switch (type) {
        case MessageType::Regular: return "REGULAR";
        case MessageType::Deniable: return "DENIABLE";
        case MessageType::Dummy: return "DUMMY";
        case MessageType::BlockRequest: return "BLOCK_REQUEST";
    }
    return "?";
}

const char* to_string(DatagramKind kind) {
    switch (kind) {
        case DatagramKind::Message: return "MESSAGE";
        case DatagramKind::KeyRequest: return "KEY_REQUEST";
        case DatagramKind::KeyResponse: return "KEY_RESPONSE";
    }
    return "?";
}

std::array<std::uint8_t, kHeaderSize> MessageHeaders::encode() const {
    std::array<std::uint8_t, kHeaderSize> out{};
    auto it = std::copy(sender.bytes().begin(), sender.bytes().end(), out.begin());
    it = std::copy(true_receiver.bytes().begin(), true_receiver.bytes().end(), it);
    it = std::copy(decoy_receiver.bytes().begin(), decoy_receiver.bytes().end(), it);
    *it = static_cast<std::uint8_t>(type);
    return out;
}

std::optional<MessageHeaders> MessageHeaders::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kHeaderSize) return std::nullopt;
    const std::uint8_t tag = bytes[3 * UserId::kSize];
    if (tag < static_cast<std::uint8_t>(MessageType::Regular) ||
        tag > static_cast<std::uint8_t>(MessageType::BlockRequest)) {
        return std::nullopt;
    }
    MessageHeaders h;
    h.sender = UserId::from_bytes(bytes.subspan(0, UserId::kSize));
    h.true_receiver = UserId::from_bytes(bytes.subspan(UserId::kSize, UserId::kSize));
    h.decoy_receiver = UserId::from_bytes(bytes.subspan(2 * UserId::kSize, UserId::kSize));
    h.type = static_cast<MessageType>(tag);
    return h;
}

PayloadChunk PayloadChunk::seal(const PublicKey& key, cipher::ContentKind kind,
                                std::span<const std::uint8_t> plaintext, Prng& nonces) {
    return PayloadChunk(cipher::asym_seal(key, kind, plaintext, nonces));
}

PayloadChunk PayloadChunk::random(Prng& prng) {
    cipher::SealedChunk bytes{};
    prng.fill(bytes);
    return PayloadChunk(bytes);
}

std::optional<cipher::Opened> PayloadChunk::open(const PublicKey& key) const {
    return cipher::asym_open(key, sealed_);
}

std::size_t wire_size_of(DatagramKind kind) noexcept {
    switch (kind) {
        case DatagramKind::Message: return kMessageWireSize;
        case DatagramKind::KeyRequest: return kKeyRequestWireSize;
        case DatagramKind::KeyResponse: return kKeyResponseWireSize;
    }
    return 0;
}

std::optional<DatagramKind> classify_wire_size(std::size_t wire_size) noexcept {
    switch (wire_size) {
        case kMessageWireSize: return DatagramKind::Message;
        case kKeyRequestWireSize: return DatagramKind::KeyRequest;
        case kKeyResponseWireSize: return DatagramKind::KeyResponse;
        default: return std::nullopt;
    }
}

std::vector<MessagePlaintext> chunk_plaintext(std::span<const std::uint8_t> text) {
    std::vector<MessagePlaintext> out;
    std::size_t offset = 0;
    do {
        MessagePlaintext msg;
        for (auto& chunk : msg) {
            const std::size_t take = std::min(cipher::kAsymPlainMax, text.size() - offset);
            chunk.assign(text.begin() + offset, text.begin() + offset + take);
            offset += take;
        }
        out.push_back(std::move(msg));
    } while (offset < text.size());
    return out;
}

Bytes unchunk(std::span<const MessagePlaintext> messages) {
    Bytes out;
    for (const auto& msg : messages) {
        for (const auto& chunk : msg) out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

ChunkPair seal_message(const PublicKey& key, cipher::ContentKind kind, const MessagePlaintext& plain,
                       Prng& nonces) {
    return {PayloadChunk::seal(key, kind, plain[0], nonces),
            PayloadChunk::seal(key, kind, plain[1], nonces)};
}

namespace {

std::optional<Bytes> open_kind(const WireDatagram& datagram, DatagramKind kind, std::size_t body_size,
                               const LinkKey& link) {
    if (datagram.kind != kind || datagram.app_size() != body_size + cipher::kSymOverhead) {
        return std::nullopt;
    }
    auto body = cipher::sym_open(link, datagram.bytes);
    if (!body || body->size() != body_size) return std::nullopt;
    return body;
}

}  // namespace

WireDatagram encode_message(const PaddedMsg& msg, const LinkKey& link, Prng& nonces) {
    Bytes body;
    body.reserve(kMessageBodySize);
    const auto headers = msg.headers.encode();
    body.insert(body.end(), headers.begin(), headers.end());
    for (const auto& chunk : msg.chunks) {
        body.insert(body.end(), chunk.sealed().begin(), chunk.sealed().end());
    }
    return {DatagramKind::Message, cipher::sym_seal(link, body, nonces)};
}

std::optional<PaddedMsg> decode_message(const WireDatagram& datagram, const LinkKey& link) {
    auto body = open_kind(datagram, DatagramKind::Message, kMessageBodySize, link);
    if (!body) return std::nullopt;
    auto span = std::span<const std::uint8_t>(*body);
    auto headers = MessageHeaders::decode(span.first(kHeaderSize));
    if (!headers) return std::nullopt;

    PaddedMsg msg;
    msg.headers = *headers;
    for (std::size_t i = 0; i < kChunksPerMessage; ++i) {
        cipher::SealedChunk sealed{};
        auto src = span.subspan(kHeaderSize + i * cipher::kAsymSealedSize, cipher::kAsymSealedSize);
        std::copy(src.begin(), src.end(), sealed.begin());
        msg.chunks[i] = PayloadChunk(sealed);
    }
    return msg;
}

WireDatagram encode_key_request(const KeyRequest& request, const LinkKey& link, Prng& nonces) {
    Bytes body;
    body.reserve(kKeyRequestBodySize);
    body.insert(body.end(), request.who1.bytes().begin(), request.who1.bytes().end());
    body.insert(body.end(), request.who2.bytes().begin(), request.who2.bytes().end());
    return {DatagramKind::KeyRequest, cipher::sym_seal(link, body, nonces)};
}

std::optional<KeyRequest> decode_key_request(const WireDatagram& datagram, const LinkKey& link) {
    auto body = open_kind(datagram, DatagramKind::KeyRequest, kKeyRequestBodySize, link);
    if (!body) return std::nullopt;
    auto span = std::span<const std::uint8_t>(*body);
    KeyRequest request{UserId::from_bytes(span.first(UserId::kSize)),
                       UserId::from_bytes(span.subspan(UserId::kSize))};
    if (request.who1.is_absent()) return std::nullopt;
    return request;
}

WireDatagram encode_key_response(const PublicKey& key1, const std::optional<PublicKey>& key2,
                                 const LinkKey& link, Prng& nonces) {
    Bytes body;
    body.reserve(kKeyResponseBodySize);
    body.insert(body.end(), key1.bytes.begin(), key1.bytes.end());
    const PublicKey& second = key2 ? *key2 : key1;
    body.insert(body.end(), second.bytes.begin(), second.bytes.end());
    return {DatagramKind::KeyResponse, cipher::sym_seal(link, body, nonces)};
}

std::optional<KeyResponse> decode_key_response(const WireDatagram& datagram, const LinkKey& link) {
    auto body = open_kind(datagram, DatagramKind::KeyResponse, kKeyResponseBodySize, link);
    if (!body) return std::nullopt;
    KeyResponse response;
    std::copy(body->begin(), body->begin() + PublicKey::kSize, response.key1.bytes.begin());
    std::copy(body->begin() + PublicKey::kSize, body->end(), response.key2.bytes.begin());
    response.key2_valid = !(response.key1 == response.key2);
    return response;
}

}  // namespace denim::wire
