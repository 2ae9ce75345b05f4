#include "denim/wire/ids.hpp"

#include <algorithm>
#include <cctype>

#include "denim/wire/cipher.hpp"

namespace denim {

const char* to_string(Errc code) {
    switch (code) {
        case Errc::ChunkTooLarge: return "CHUNK_TOO_LARGE";
        case Errc::DecoyIsReceiver: return "DECOY_IS_RECEIVER";
        case Errc::AlreadyRegistered: return "ALREADY_REGISTERED";
        case Errc::UnknownUser: return "UNKNOWN_USER";
        case Errc::DecodeFailure: return "DECODE_FAILURE";
        case Errc::ValidationError: return "VALIDATION_ERROR";
        case Errc::SizeExceeded: return "SIZE_EXCEEDED";
        case Errc::SyntaxError: return "SYNTAX_ERROR";
        case Errc::UnknownBuiltin: return "UNKNOWN_BUILTIN";
        case Errc::InvalidId: return "INVALID_ID";
    }
    return "?";
}

UserId UserId::from_name(std::string_view name) {
    if (name.empty() || name.size() > kSize) {
        throw Error(Errc::InvalidId, "user name must be 1..16 bytes: '" + std::string(name) + "'");
    }
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
            throw Error(Errc::InvalidId, "user name has invalid character: '" + std::string(name) + "'");
        }
    }
    if (name == "SERVER") {
        throw Error(Errc::InvalidId, "SERVER is reserved");
    }
    UserId id;
    std::copy(name.begin(), name.end(), id.bytes_.begin());
    return id;
}

UserId UserId::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kSize) {
        throw Error(Errc::InvalidId, "user id must be 16 bytes");
    }
    UserId id;
    std::copy(bytes.begin(), bytes.end(), id.bytes_.begin());
    return id;
}

UserId UserId::server() {
    UserId id;
    id.bytes_.fill(0xFF);
    return id;
}

bool UserId::is_absent() const noexcept {
    return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

bool UserId::is_server() const noexcept {
    return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0xFF; });
}

std::string UserId::name() const {
    if (is_absent()) return "-";
    if (is_server()) return "SERVER";
    auto end = std::find(bytes_.begin(), bytes_.end(), std::uint8_t{0});
    bool printable = std::all_of(bytes_.begin(), end, [](std::uint8_t b) {
        return std::isalnum(b) || b == '_' || b == '-';
    });
    bool zero_tail = std::all_of(end, bytes_.end(), [](std::uint8_t b) { return b == 0; });
    if (printable && zero_tail) return std::string(bytes_.begin(), end);

    static constexpr char kHex[] = "0123456789abcdef";
    std::string out = "0x";
    for (auto b : bytes_) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

}  // namespace denim

std::size_t std::hash<denim::UserId>::operator()(const denim::UserId& id) const noexcept {
    return static_cast<std::size_t>(denim::hash_bytes(id.bytes()));
}
