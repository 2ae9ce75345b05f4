#pragma once

#include <map>
#include <optional>

#include "denim/wire/cipher.hpp"
#include "denim/wire/ids.hpp"

namespace denim::client {

enum class Intent { Regular, Deniable };

enum class CacheDecision {
    ReuseRegular,         // R1
    ReuseDecoyAsRegular,  // R2
    FetchOne,             // R3
    ReusePair,            // D3
    FetchPair,            // D4
    Abort,                // D1, D2
};

const char* to_string(CacheDecision decision);

struct KeyCacheEntry {
    PublicKey key;
    SimTime expires_at = 0;

    bool alive(SimTime now) const noexcept { return now < expires_at; }
};

/// A <decoy, true receiver> pair, keyed by the decoy.
struct DeniableEntry {
    UserId receiver;
    PublicKey decoy_key;
    PublicKey receiver_key;
    SimTime expires_at = 0;

    bool alive(SimTime now) const noexcept { return now < expires_at; }
};

/// Partitioned key cache: regular keys by receiver, deniable pairs by decoy.
class KeyCaches {
public:
    explicit KeyCaches(SimTime ttl = 60'000) : ttl_(ttl) {}

    SimTime ttl() const noexcept { return ttl_; }

    const KeyCacheEntry* regular(const UserId& who, SimTime now) const;
    const DeniableEntry* as_decoy(const UserId& decoy, SimTime now) const;
    bool as_deniable_receiver(const UserId& who, SimTime now) const;

    void store_regular(const UserId& who, const PublicKey& key, SimTime now);
    void store_pair(const UserId& decoy, const PublicKey& decoy_key, const UserId& receiver,
                    const PublicKey& receiver_key, SimTime now);
    /// Sets expires_at = now + TTL on a live entry; expired entries are left alone.
    void bump_regular(const UserId& who, SimTime now);
    void bump_pair(const UserId& decoy, SimTime now);

    void evict_expired(SimTime now);

    const std::map<UserId, KeyCacheEntry>& regular_entries() const noexcept { return regular_; }
    const std::map<UserId, DeniableEntry>& deniable_entries() const noexcept { return deniable_; }

private:
    SimTime ttl_;
    std::map<UserId, KeyCacheEntry> regular_;
    std::map<UserId, DeniableEntry> deniable_;
};

/// Applies rules R1-R3 (regular intent) or D1-D4 (deniable intent). Pure.
/// Throws Error(DecoyIsReceiver) for a deniable intent whose decoy is absent or
/// equal to the receiver.
CacheDecision resolve_keys(const KeyCaches& caches, Intent intent, const UserId& receiver,
                           const UserId& decoy, SimTime now);

}  // namespace denim::client
