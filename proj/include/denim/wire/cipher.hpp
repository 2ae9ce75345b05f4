#pragma once

// Size-faithful mock cipher.
//
// Stands in for RSAES-OAEP (4096-bit keys) on payload chunks and for a
// TLS_AES_128_GCM_SHA256 record layer on links. None of this is secure; it
// reproduces the ciphertext sizes exactly and produces output that looks
// uniform to anyone without the key, which is all the traffic analysis needs.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "denim/wire/ids.hpp"

namespace denim {

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_bytes(std::span<const std::uint8_t> data, std::uint64_t basis = 0) noexcept;

/// Seeded deterministic generator. Sub-streams are derived by domain label so
/// adding a consumer never shifts another consumer's draws.
class Prng {
public:
    explicit Prng(std::uint64_t seed);

    std::uint64_t next();
    void fill(std::span<std::uint8_t> out);
    /// Uniform on the closed interval [lo, hi]; lo > hi is swapped.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);

    Prng derive(std::string_view domain) const;
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

struct PublicKey {
    static constexpr std::size_t kSize = 512;
    std::array<std::uint8_t, kSize> bytes{};

    static PublicKey generate(Prng& prng);
    /// An all-zero key marks "unknown user" inside a key response.
    bool is_null() const noexcept;
    bool operator==(const PublicKey&) const = default;
};

struct LinkKey {
    std::array<std::uint8_t, 16> bytes{};

    static LinkKey generate(Prng& prng);
    bool operator==(const LinkKey&) const = default;
};

namespace cipher {

inline constexpr std::size_t kAsymPlainMax = 446;
inline constexpr std::size_t kAsymSealedSize = 512;
inline constexpr std::size_t kRecordHeaderSize = 5;
inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kSymOverhead = kRecordHeaderSize + kTagSize;

enum class ContentKind : std::uint8_t {
    Text = 0,
    Recipe = 1,
    BlockTarget = 2,
};

using SealedChunk = std::array<std::uint8_t, kAsymSealedSize>;

struct Opened {
    ContentKind kind;
    Bytes content;
};

/// Throws Error(ChunkTooLarge) when plain exceeds 446 bytes.
SealedChunk asym_seal(const PublicKey& key, ContentKind kind,
                      std::span<const std::uint8_t> plain, Prng& nonces);
std::optional<Opened> asym_open(const PublicKey& key, std::span<const std::uint8_t> sealed);

/// TLS-style record: 5-byte header, ciphertext, 16-byte tag (8-byte nonce + 8-byte MAC).
Bytes sym_seal(const LinkKey& key, std::span<const std::uint8_t> plain, Prng& nonces);
std::optional<Bytes> sym_open(const LinkKey& key, std::span<const std::uint8_t> record);

}  // namespace cipher
}  // namespace denim
