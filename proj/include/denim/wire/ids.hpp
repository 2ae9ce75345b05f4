#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace denim {

using Bytes = std::vector<std::uint8_t>;

/// Simulated milliseconds since scenario start.
using SimTime = std::int64_t;

enum class Errc {
    ChunkTooLarge,
    DecoyIsReceiver,
    AlreadyRegistered,
    UnknownUser,
    DecodeFailure,
    ValidationError,
    SizeExceeded,
    SyntaxError,
    UnknownBuiltin,
    InvalidId,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// 16-byte opaque user identifier.
///
/// Scenario names (up to 16 printable bytes) map onto ids by zero padding, so
/// the mapping is stateless and reversible. The all-zero id means "absent" and
/// the all-0xFF id is reserved for the server.
class UserId {
public:
    static constexpr std::size_t kSize = 16;

    constexpr UserId() = default;

    static UserId from_name(std::string_view name);
    static UserId from_bytes(std::span<const std::uint8_t> bytes);
    static UserId server();

    bool is_absent() const noexcept;
    bool is_server() const noexcept;

    /// Scenario name, "SERVER", "-" for absent, or hex for non-printable ids.
    std::string name() const;

    const std::array<std::uint8_t, kSize>& bytes() const noexcept { return bytes_; }

    auto operator<=>(const UserId&) const = default;

private:
    std::array<std::uint8_t, kSize> bytes_{};
};

}  // namespace denim

template <>
struct std::hash<denim::UserId> {
    std::size_t operator()(const denim::UserId& id) const noexcept;
};
