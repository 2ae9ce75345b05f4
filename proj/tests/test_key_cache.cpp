#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cache_oracle.hpp"

using namespace denim;
using namespace denim::client;

namespace {

const UserId bob = UserId::from_name("bob");
const UserId charlie = UserId::from_name("charlie");
const UserId dorothy = UserId::from_name("dorothy");
const PublicKey key{};

}  // namespace

TEST_CASE("oracle agrees with resolve_keys on every enumerated state") {
    const auto res = oracle::run_oracle();
    for (const auto& f : res.failures) MESSAGE(f);
    CHECK(res.states == 27 * 125);
    CHECK(res.checks == 2 * res.states);
    CHECK(res.mismatches == 0);
}

TEST_CASE("every listed case is reached by the enumeration") {
    const auto res = oracle::run_oracle();
    CHECK(res.case_hits.size() == 17);
    for (const auto& [label, hits] : res.case_hits) {
        INFO(label);
        CHECK(hits > 0);
    }
}

TEST_CASE("regular intent") {
    KeyCaches c(1000);
    CHECK(resolve_keys(c, Intent::Regular, bob, UserId{}, 0) == CacheDecision::FetchOne);
    c.store_regular(bob, key, 0);
    CHECK(resolve_keys(c, Intent::Regular, bob, UserId{}, 999) == CacheDecision::ReuseRegular);
    CHECK(resolve_keys(c, Intent::Regular, bob, UserId{}, 1000) == CacheDecision::FetchOne);

    KeyCaches d(1000);
    d.store_pair(charlie, key, bob, key, 0);
    CHECK(resolve_keys(d, Intent::Regular, charlie, UserId{}, 10) == CacheDecision::ReuseDecoyAsRegular);
    // A deniable receiver's key is never reused for regular traffic.
    CHECK(resolve_keys(d, Intent::Regular, bob, UserId{}, 10) == CacheDecision::FetchOne);
}

TEST_CASE("deniable intent") {
    KeyCaches c(1000);
    CHECK(resolve_keys(c, Intent::Deniable, bob, charlie, 0) == CacheDecision::FetchPair);
    c.store_pair(charlie, key, bob, key, 0);
    CHECK(resolve_keys(c, Intent::Deniable, bob, charlie, 5) == CacheDecision::ReusePair);
    CHECK(resolve_keys(c, Intent::Deniable, dorothy, charlie, 5) == CacheDecision::Abort);
    // Decoy and receiver swapped: the decoy is only a hidden receiver.
    CHECK(resolve_keys(c, Intent::Deniable, charlie, bob, 5) == CacheDecision::FetchPair);
    c.store_regular(dorothy, key, 0);
    CHECK(resolve_keys(c, Intent::Deniable, bob, dorothy, 5) == CacheDecision::Abort);
}

TEST_CASE("decoy must differ from the receiver") {
    KeyCaches c;
    CHECK_THROWS_AS(resolve_keys(c, Intent::Deniable, bob, bob, 0), Error);
    CHECK_THROWS_AS(resolve_keys(c, Intent::Deniable, bob, UserId{}, 0), Error);
    try {
        resolve_keys(c, Intent::Deniable, bob, bob, 0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DecoyIsReceiver);
    }
}

TEST_CASE("bump extends live entries only") {
    KeyCaches c(100);
    c.store_regular(bob, key, 0);
    c.bump_regular(bob, 50);
    CHECK(c.regular(bob, 149) != nullptr);
    CHECK(c.regular(bob, 150) == nullptr);
    c.bump_regular(bob, 150);
    CHECK(c.regular(bob, 151) == nullptr);

    c.store_pair(charlie, key, bob, key, 0);
    c.bump_pair(charlie, 99);
    CHECK(c.as_decoy(charlie, 198) != nullptr);
    CHECK(c.as_deniable_receiver(bob, 198));
    CHECK_FALSE(c.as_deniable_receiver(bob, 199));
}

TEST_CASE("storing evicts expired entries") {
    KeyCaches c(100);
    c.store_regular(bob, key, 0);
    c.store_pair(charlie, key, bob, key, 0);
    c.store_regular(dorothy, key, 100);
    CHECK(c.regular_entries().size() == 1);
    CHECK(c.deniable_entries().empty());
}
