#include "denim/client/key_cache.hpp"

#include <algorithm>

namespace denim::client {

const char* to_string(CacheDecision decision) {
    switch (decision) {
        case CacheDecision::ReuseRegular: return "REUSE_REGULAR";
        case CacheDecision::ReuseDecoyAsRegular: return "REUSE_DECOY_AS_REGULAR";
        case CacheDecision::FetchOne: return "FETCH_ONE";
        case CacheDecision::ReusePair: return "REUSE_PAIR";
        case CacheDecision::FetchPair: return "FETCH_PAIR";
        case CacheDecision::Abort: return "ABORT";
    }
    return "?";
}

const KeyCacheEntry* KeyCaches::regular(const UserId& who, SimTime now) const {
    auto it = regular_.find(who);
    return it != regular_.end() && it->second.alive(now) ? &it->second : nullptr;
}

const DeniableEntry* KeyCaches::as_decoy(const UserId& decoy, SimTime now) const {
    auto it = deniable_.find(decoy);
    return it != deniable_.end() && it->second.alive(now) ? &it->second : nullptr;
}

bool KeyCaches::as_deniable_receiver(const UserId& who, SimTime now) const {
    return std::any_of(deniable_.begin(), deniable_.end(), [&](const auto& kv) {
        return kv.second.receiver == who && kv.second.alive(now);
    });
}

void KeyCaches::store_regular(const UserId& who, const PublicKey& key, SimTime now) {
    evict_expired(now);
    regular_[who] = KeyCacheEntry{key, now + ttl_};
}

void KeyCaches::store_pair(const UserId& decoy, const PublicKey& decoy_key, const UserId& receiver,
                           const PublicKey& receiver_key, SimTime now) {
    evict_expired(now);
    deniable_[decoy] = DeniableEntry{receiver, decoy_key, receiver_key, now + ttl_};
}

void KeyCaches::bump_regular(const UserId& who, SimTime now) {
    auto it = regular_.find(who);
    if (it != regular_.end() && it->second.alive(now)) it->second.expires_at = now + ttl_;
}

void KeyCaches::bump_pair(const UserId& decoy, SimTime now) {
    auto it = deniable_.find(decoy);
    if (it != deniable_.end() && it->second.alive(now)) it->second.expires_at = now + ttl_;
}

void KeyCaches::evict_expired(SimTime now) {
    std::erase_if(regular_, [now](const auto& kv) { return !kv.second.alive(now); });
    std::erase_if(deniable_, [now](const auto& kv) { return !kv.second.alive(now); });
}

CacheDecision resolve_keys(const KeyCaches& caches, Intent intent, const UserId& receiver,
                           const UserId& decoy, SimTime now) {
    if (intent == Intent::Regular) {
        if (caches.regular(receiver, now)) return CacheDecision::ReuseRegular;
        if (caches.as_decoy(receiver, now)) return CacheDecision::ReuseDecoyAsRegular;
        return CacheDecision::FetchOne;
    }

    if (decoy.is_absent() || decoy == receiver) {
        throw Error(Errc::DecoyIsReceiver, "decoy must be present and differ from the receiver");
    }
    if (caches.regular(decoy, now)) return CacheDecision::Abort;
    if (const auto* pair = caches.as_decoy(decoy, now)) {
        return pair->receiver == receiver ? CacheDecision::ReusePair : CacheDecision::Abort;
    }
    return CacheDecision::FetchPair;
}

}  // namespace denim::client
