#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "denim/sim/simulator.hpp"

using namespace denim;
using namespace denim::sim;

namespace {

const UserId alice = UserId::from_name("alice");
const UserId bob = UserId::from_name("bob");
const UserId charlie = UserId::from_name("charlie");
const UserId dorothy = UserId::from_name("dorothy");

const std::string kCast =
    "client alice p=2 friends=charlie,dorothy\n"
    "client bob p=2 friends=alice\n"
    "client charlie p=2 friends=alice\n"
    "client dorothy p=2 friends=bob\n";

RunResult run_text(const std::string& text) { return run(parse_scenario(text)); }

std::string text_of(const client::InboxEntry& e) { return std::string(e.text.begin(), e.text.end()); }

AdversaryView view_of(const RunResult& r) { return adversary_view(r.trace); }

std::size_t count_from(const RunResult& r, const UserId& src) {
    std::size_t n = 0;
    for (const auto& ev : r.trace) n += ev.src == src;
    return n;
}

}  // namespace

TEST_CASE("empty scenario gives an empty trace") {
    CHECK(run_text(kCast).trace.empty());
}

TEST_CASE("deniable message rides on a regular message to the receiver") {
    const auto r = run_text(kCast +
                            "at 0 send_deniable alice via charlie to bob \"meet at noon\"\n"
                            "at 100 send_regular dorothy bob \"lunch?\"\n");
    const auto& inbox = r.client(bob).inbox;
    REQUIRE(inbox.size() == 2);
    CHECK(inbox[0].from == alice);
    CHECK(inbox[0].type == wire::MessageType::Deniable);
    CHECK(text_of(inbox[0]) == "meet at noon");
    CHECK(inbox[1].from == dorothy);
    CHECK(text_of(inbox[1]) == "lunch?");
    CHECK(r.deniable_backlog.at(bob) == 0);

    // The decoy sees a dummy plus p piggyback dummies and keeps nothing.
    CHECK(r.client(charlie).inbox.empty());
    CHECK(r.client(charlie).dummies_dropped == 3);
    // Bob's p=2 slots: one deniable, one dummy.
    CHECK(r.client(bob).dummies_dropped == 1);
}

TEST_CASE("regular send with warm cache: one upstream message, p+1 downstream") {
    const auto r = run_text(kCast +
                            "at 0 send_regular dorothy bob \"one\"\n"
                            "at 1000 send_regular dorothy bob \"two\"\n");
    const auto v = view_of(r);
    REQUIRE(v.size() == 2 * 3 + 2 * 1 + 2);
    // Second send reuses the cached key: no lookup.
    const AdversaryView tail(v.end() - 4, v.end());
    const AdversaryView want{{1000, "dorothy", "SERVER", 1134},
                             {1012, "SERVER", "bob", 1134},
                             {1013, "SERVER", "bob", 1134},
                             {1014, "SERVER", "bob", 1134}};
    CHECK(tail == want);
}

TEST_CASE("cold cache: lookup then message") {
    const auto r = run_text(kCast + "at 0 send_regular dorothy bob \"hi\"\n");
    const AdversaryView want{{0, "dorothy", "SERVER", 93},
                             {15, "SERVER", "dorothy", 1085},
                             {25, "dorothy", "SERVER", 1134},
                             {37, "SERVER", "bob", 1134},
                             {38, "SERVER", "bob", 1134},
                             {39, "SERVER", "bob", 1134}};
    CHECK(view_of(r) == want);
    CHECK(r.client(dorothy).history.at(0).decision == client::CacheDecision::FetchOne);
}

TEST_CASE("long text splits across messages") {
    const auto r = run_text(kCast + "at 0 send_regular dorothy bob bytes=1000\n");
    const auto& h = r.client(dorothy).history.at(0);
    CHECK(h.message_payloads == std::vector<std::size_t>{892, 108});
    REQUIRE(r.client(bob).inbox.size() == 2);
    CHECK(r.client(bob).inbox[0].text.size() + r.client(bob).inbox[1].text.size() == 1000);
}

TEST_CASE("D3 reuse and R2 decoy reuse skip lookups") {
    const auto r = run_text(kCast +
                            "at 0 send_deniable alice via charlie to bob \"a\"\n"
                            "at 500 send_deniable alice via charlie to bob \"b\"\n"
                            "at 1000 send_regular alice charlie \"c\"\n");
    const auto& h = r.client(alice).history;
    REQUIRE(h.size() == 3);
    CHECK(h[0].decision == client::CacheDecision::FetchPair);
    CHECK(h[1].decision == client::CacheDecision::ReusePair);
    CHECK(h[2].decision == client::CacheDecision::ReuseDecoyAsRegular);
    std::size_t lookups = 0;
    for (const auto& ev : r.trace) lookups += ev.size == 93;
    CHECK(lookups == 1);
    REQUIRE(r.client(charlie).inbox.size() == 1);
    CHECK(text_of(r.client(charlie).inbox[0]) == "c");
}

TEST_CASE("decoy in regular use aborts without traffic") {
    const auto r = run_text(kCast +
                            "at 0 send_regular alice charlie \"hi\"\n"
                            "at 500 send_deniable alice via charlie to bob \"secret\"\n");
    const auto& h = r.client(alice).history;
    REQUIRE(h.size() == 2);
    CHECK(h[1].decision == client::CacheDecision::Abort);
    CHECK(h[1].status == client::OpStatus::AbortedDecoyBusy);
    CHECK(count_from(r, alice) == 2);
}

TEST_CASE("TTL expiry forces a fresh lookup") {
    const auto r = run_text(
        "client alice p=0 ttl=100 friends=charlie\n"
        "client charlie p=0 friends=alice\n"
        "at 0 send_regular alice charlie \"a\"\n"
        "at 1000 send_regular alice charlie \"b\"\n");
    const auto& h = r.client(alice).history;
    CHECK(h[0].decision == client::CacheDecision::FetchOne);
    CHECK(h[1].decision == client::CacheDecision::FetchOne);
}

TEST_CASE("blocking drops later deniable messages but keeps the trace") {
    const std::string base = kCast + "at 3000 send_deniable alice via charlie to bob \"x\"\n"
                                     "at 5000 send_regular dorothy bob \"y\"\n";
    const auto blocked = run_text(kCast + "at 0 block bob via alice target alice\n" +
                                  base.substr(kCast.size()));
    const auto open = run_text(kCast + "at 0 send_deniable bob via alice to charlie \"z\"\n" +
                               base.substr(kCast.size()));
    CHECK(blocked.server.blocked_dropped == 1);
    CHECK(blocked.client(bob).inbox.size() == 1);
    CHECK(blocked.client(bob).history.at(0).kind == client::OpKind::Block);
    // Block vs deniable: same datagrams at the same times.
    CHECK_FALSE(check_indistinguishable(view_of(blocked), view_of(open)).has_value());
}

TEST_CASE("offline receiver gets buffered datagrams on reconnect") {
    const auto r = run_text(kCast +
                            "at 0 offline bob\n"
                            "at 0 send_regular dorothy bob \"hi\"\n"
                            "at 5000 online bob\n");
    const auto v = view_of(r);
    REQUIRE(v.size() == 6);
    CHECK(v[3] == ViewEvent{5002, "SERVER", "bob", 1134});
    CHECK(v[5] == ViewEvent{5004, "SERVER", "bob", 1134});
    CHECK(r.client(bob).inbox.size() == 1);
}

TEST_CASE("queue cap drops overflow silently") {
    const auto r = run_text(kCast + "server queue_cap=1\n"
                                    "at 0 send_deniable alice via charlie to bob \"1\"\n"
                                    "at 100 send_deniable alice via charlie to bob \"2\"\n");
    CHECK(r.server.cap_dropped == 1);
    CHECK(r.deniable_backlog.at(bob) == 1);
}

TEST_CASE("recipes from non-friends never run") {
    const auto r = run_text(
        "client alice p=1 friends=charlie\n"
        "client bob p=1 friends=dorothy\n"
        "client charlie p=1 friends=alice\n"
        "client dorothy p=1 friends=bob\n"
        "at 0 send_recipe alice via charlie to bob \"send(1);\"\n"
        "at 100 send_regular dorothy bob \"carrier\"\n");
    CHECK(r.client(bob).recipes_rejected == 1);
    CHECK(r.recipes.empty());
    CHECK(count_from(r, bob) == 0);
}

TEST_CASE("injected garbage is dropped by the server and adds nothing") {
    const std::string base = kCast + "at 0 send_regular dorothy bob \"hi\"\n";
    const auto clean = run_text(base);
    const auto noisy = run_text(base + "at 1 inject alice SERVER 1134\nat 2 inject SERVER bob 93\n");
    CHECK(noisy.stats.injected == 2);
    CHECK(noisy.server.garbage_dropped == 1);
    CHECK(noisy.client(bob).decode_failures == 1);
    CHECK(view_of(clean) == view_of(noisy));
}

TEST_CASE("adversary drop removes the datagram from the trace") {
    const auto r = run_text(kCast +
                            "at 0 drop SERVER bob 3\n"
                            "at 0 send_regular dorothy bob \"hi\"\n");
    CHECK(r.stats.adversary_dropped == 3);
    CHECK(r.trace.size() == 3);
    CHECK(r.client(bob).inbox.empty());
}

TEST_CASE("validation errors name the line") {
    try {
        run_text("client alice p=1\nat 0 send_regular alice zed \"x\"\n");
        FAIL("expected a validation error");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == 2);
        CHECK(e.code() == Errc::ValidationError);
    }
}
