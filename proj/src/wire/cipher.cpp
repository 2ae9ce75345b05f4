#include "denim/wire/cipher.hpp"

#include <algorithm>
#include <cstring>

namespace denim {

std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_bytes(std::span<const std::uint8_t> data, std::uint64_t basis) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL ^ mix64(basis);
    for (auto b : data) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return mix64(h);
}

Prng::Prng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

std::uint64_t Prng::next() { return engine_(); }

void Prng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = engine_();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(word >> (8 * k));
        }
    }
}

std::int64_t Prng::uniform(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) std::swap(lo, hi);
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(engine_());
    const std::uint64_t range = span + 1;
    // Rejection sampling keeps the draw unbiased and portable across standard
    // libraries (std::uniform_int_distribution is implementation-defined).
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw >= limit);
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + draw % range);
}

Prng Prng::derive(std::string_view domain) const {
    auto label = std::span(reinterpret_cast<const std::uint8_t*>(domain.data()), domain.size());
    return Prng(hash_bytes(label, seed_));
}

PublicKey PublicKey::generate(Prng& prng) {
    PublicKey key;
    do {
        prng.fill(key.bytes);
    } while (key.is_null());
    return key;
}

bool PublicKey::is_null() const noexcept {
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

LinkKey LinkKey::generate(Prng& prng) {
    LinkKey key;
    prng.fill(key.bytes);
    return key;
}

namespace cipher {
namespace {

// Layout of the 512-byte sealed chunk:
//   [16B nonce] ENC([2B BE length][1B kind][446B content, zero padded][47B zero check])
constexpr std::size_t kNonceSize = 16;
constexpr std::size_t kInnerSize = kAsymSealedSize - kNonceSize;  // 496
constexpr std::size_t kInnerPrefix = 3;
constexpr std::size_t kCheckOffset = kInnerPrefix + kAsymPlainMax;  // 449
static_assert(kCheckOffset < kInnerSize);

void apply_keystream(std::uint64_t seed, std::span<std::uint8_t> data) {
    std::mt19937_64 stream(mix64(seed));
    std::size_t i = 0;
    while (i < data.size()) {
        std::uint64_t word = stream();
        for (int k = 0; k < 8 && i < data.size(); ++k, ++i) {
            data[i] ^= static_cast<std::uint8_t>(word >> (8 * k));
        }
    }
}

std::uint64_t read_le64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
    return v;
}

void write_le64(std::uint8_t* p, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) p[k] = static_cast<std::uint8_t>(v >> (8 * k));
}

std::uint64_t record_mac(std::uint64_t key_hash, std::uint64_t nonce,
                         std::span<const std::uint8_t> ciphertext) {
    return hash_bytes(ciphertext, key_hash ^ mix64(nonce ^ 0x6D61636D61636D61ULL));
}

constexpr std::uint8_t kRecordType = 0x17;  // application_data
constexpr std::uint8_t kLegacyVersion[2] = {0x03, 0x03};

}  // namespace

SealedChunk asym_seal(const PublicKey& key, ContentKind kind, std::span<const std::uint8_t> plain,
                      Prng& nonces) {
    if (plain.size() > kAsymPlainMax) {
        throw Error(Errc::ChunkTooLarge, "chunk plaintext of " + std::to_string(plain.size()) +
                                             " bytes exceeds " + std::to_string(kAsymPlainMax));
    }
    SealedChunk out{};
    nonces.fill(std::span(out).first(kNonceSize));
    auto inner = std::span(out).subspan(kNonceSize);
    inner[0] = static_cast<std::uint8_t>(plain.size() >> 8);
    inner[1] = static_cast<std::uint8_t>(plain.size() & 0xFF);
    inner[2] = static_cast<std::uint8_t>(kind);
    std::copy(plain.begin(), plain.end(), inner.begin() + kInnerPrefix);

    const auto seed = hash_bytes(std::span(out).first(kNonceSize), hash_bytes(key.bytes));
    apply_keystream(seed, inner);
    return out;
}

std::optional<Opened> asym_open(const PublicKey& key, std::span<const std::uint8_t> sealed) {
    if (sealed.size() != kAsymSealedSize) return std::nullopt;
    std::array<std::uint8_t, kInnerSize> inner{};
    std::copy(sealed.begin() + kNonceSize, sealed.end(), inner.begin());
    const auto seed = hash_bytes(sealed.first(kNonceSize), hash_bytes(key.bytes));
    apply_keystream(seed, inner);

    const std::size_t len = (std::size_t{inner[0]} << 8) | inner[1];
    if (len > kAsymPlainMax || inner[2] > static_cast<std::uint8_t>(ContentKind::BlockTarget)) {
        return std::nullopt;
    }
    const bool padding_clean = std::all_of(inner.begin() + kInnerPrefix + len, inner.end(),
                                           [](std::uint8_t b) { return b == 0; });
    if (!padding_clean) return std::nullopt;

    Opened opened{static_cast<ContentKind>(inner[2]), {}};
    opened.content.assign(inner.begin() + kInnerPrefix, inner.begin() + kInnerPrefix + len);
    return opened;
}

Bytes sym_seal(const LinkKey& key, std::span<const std::uint8_t> plain, Prng& nonces) {
    const std::size_t body = plain.size() + kTagSize;
    if (body > 0xFFFF) throw Error(Errc::SizeExceeded, "record too large");

    Bytes out(kRecordHeaderSize + body);
    out[0] = kRecordType;
    out[1] = kLegacyVersion[0];
    out[2] = kLegacyVersion[1];
    out[3] = static_cast<std::uint8_t>(body >> 8);
    out[4] = static_cast<std::uint8_t>(body & 0xFF);

    const std::uint64_t nonce = nonces.next();
    const std::uint64_t key_hash = hash_bytes(key.bytes);
    auto ct = std::span(out).subspan(kRecordHeaderSize, plain.size());
    std::copy(plain.begin(), plain.end(), ct.begin());
    apply_keystream(key_hash ^ nonce, ct);

    auto tag = out.data() + kRecordHeaderSize + plain.size();
    write_le64(tag, nonce);
    write_le64(tag + 8, record_mac(key_hash, nonce, ct));
    return out;
}

std::optional<Bytes> sym_open(const LinkKey& key, std::span<const std::uint8_t> record) {
    if (record.size() < kSymOverhead) return std::nullopt;
    const std::size_t body = (std::size_t{record[3]} << 8) | record[4];
    if (record[0] != kRecordType || record[1] != kLegacyVersion[0] ||
        record[2] != kLegacyVersion[1] || body != record.size() - kRecordHeaderSize) {
        return std::nullopt;
    }
    const std::size_t ct_len = body - kTagSize;
    auto ct = record.subspan(kRecordHeaderSize, ct_len);
    const auto* tag = record.data() + kRecordHeaderSize + ct_len;
    const std::uint64_t nonce = read_le64(tag);
    const std::uint64_t key_hash = hash_bytes(key.bytes);
    if (read_le64(tag + 8) != record_mac(key_hash, nonce, ct)) return std::nullopt;

    Bytes plain(ct.begin(), ct.end());
    apply_keystream(key_hash ^ nonce, plain);
    return plain;
}

}  // namespace cipher
}  // namespace denim
