#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "denim/sim/simulator.hpp"

using namespace denim;
using namespace denim::sim;

namespace {

const std::string kCast =
    "client alice p=1 friends=charlie\n"
    "client bob p=1 friends=alice\n"
    "client charlie p=1 friends=alice\n";

int error_line(const std::string& text) {
    try {
        validate(parse_scenario(text));
    } catch (const ScenarioError& e) {
        CHECK(e.code() == Errc::ValidationError);
        return e.line();
    }
    FAIL("expected a scenario error for:\n" << text);
    return -1;
}

}  // namespace

TEST_CASE("directives and actions parse") {
    const auto sc = parse_scenario(
        "# comment\n"
        "seed 42\n"
        "clock 50000\n"
        "server lookup_delay=7 forward_delay=3 spacing=2 queue_cap=5\n"
        "network latency=20\n" +
        kCast +
        "at 0 send_regular alice bob \"hi \\\"there\\\"\"\n"
        "at 5 send_deniable alice via charlie to bob bytes=600\n"
        "at 6 block bob via alice target charlie\n"
        "at 7 offline bob\n"
        "at 8 online bob\n"
        "at 9 app_active bob\n"
        "at 9 key_press bob\n"
        "at 10 inject alice SERVER 1134\n"
        "at 11 drop SERVER bob 2\n"
        "at 12 send_recipe alice via charlie to bob \"send(1);\"\n");
    CHECK(sc.seed == 42);
    CHECK(sc.network.clock_offset_s == 50000);
    CHECK(sc.network.latency == 20);
    CHECK(sc.server.lookup_delay == 7);
    CHECK(sc.server.queue_cap == 5);
    REQUIRE(sc.clients.size() == 3);
    CHECK(sc.clients[0].friends == std::vector<std::string>{"charlie"});
    REQUIRE(sc.actions.size() == 10);
    CHECK(std::string(sc.actions[0].payload.begin(), sc.actions[0].payload.end()) == "hi \"there\"");
    CHECK(sc.actions[1].payload.size() == 600);
    CHECK(sc.actions[2].kind == ActionKind::Block);
    CHECK(sc.actions[8].count == 2);
    CHECK(sc.actions[9].kind == ActionKind::SendRecipe);
    CHECK_FALSE(sc.actions[9].payload.empty());
    CHECK_NOTHROW(validate(sc));

    const auto again = parse_scenario(to_text(sc));
    CHECK(to_text(again) == to_text(sc));
    CHECK(again.actions.size() == sc.actions.size());
    CHECK(again.actions[9].payload == sc.actions[9].payload);
}

TEST_CASE("validation names the offending line") {
    CHECK(error_line(kCast + "at 0 send_regular alice zed \"x\"\n") == 4);
    CHECK(error_line(kCast + "at 0 send_deniable alice via bob to charlie \"x\"\n") == 4);
    CHECK(error_line(kCast + "at 0 send_deniable bob via alice to alice \"x\"\n") == 4);
    CHECK(error_line(kCast + "at 5 offline bob\nat 4 online bob\n") == 5);
    CHECK(error_line(kCast + "at 0 inject alice bob 93\n") == 4);
    CHECK(error_line("client SERVER p=1\n") == 1);
    CHECK(error_line("client alice friends=ghost\n") == 1);
    CHECK(error_line("client alice\nclient alice\n") == 2);
    CHECK(error_line("client a_very_long_name_here\n") == 1);
    CHECK(error_line("client alice\nat 0 send_deniable alice via bob to bob \"x\"\n") == 2);
}

TEST_CASE("syntax errors name the line") {
    auto parse_line = [](const std::string& text) {
        try {
            parse_scenario(text);
        } catch (const ScenarioError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(parse_line("seed 1\nbogus\n") == 2);
    CHECK(parse_line("client a p=x\n") == 1);
    CHECK(parse_line("client a\nat 0 send_regular a \"unterminated\n") == 2);
    CHECK(parse_line("client a\nat 0 teleport a\n") == 2);
    CHECK(parse_line("client a\nat 0 send_recipe a via b to c \"frob(1);\"\n") == 2);
}

TEST_CASE("runs are deterministic and seeds only change ciphertext") {
    const auto sc = parse_scenario(kCast +
                                   "at 0 send_deniable alice via charlie to bob \"x\"\n"
                                   "at 50 send_regular charlie bob \"y\"\n");
    const auto a = format_trace(adversary_view(run(sc).trace));
    const auto b = format_trace(adversary_view(run(sc).trace));
    const auto c = format_trace(adversary_view(run(sc, 999).trace));
    CHECK(a == b);
    CHECK(a == c);
    CHECK_FALSE(a.empty());
}

TEST_CASE("trace text round trip") {
    const AdversaryView v{{0, "alice", "SERVER", 93}, {15, "SERVER", "alice", 1085}};
    const std::string text = format_trace(v);
    CHECK(text == "0\talice\tSERVER\t93\n15\tSERVER\talice\t1085\n");
    CHECK(parse_trace(text) == v);
    CHECK(parse_trace("").empty());
}

TEST_CASE("malformed traces are rejected") {
    CHECK_THROWS_AS(parse_trace("0\talice\tSERVER\t93"), Error);  // truncated
    CHECK_THROWS_AS(parse_trace("0\talice\tSERVER\n"), Error);
    CHECK_THROWS_AS(parse_trace("0\talice\tSERVER\t93\textra\n"), Error);
    CHECK_THROWS_AS(parse_trace("x\talice\tSERVER\t93\n"), Error);
    CHECK_THROWS_AS(parse_trace("5\ta\tb\t1\n4\ta\tb\t1\n"), Error);
    CHECK_THROWS_AS(parse_trace("5\t\tb\t1\n"), Error);
}

TEST_CASE("first divergence is reported by field") {
    const AdversaryView a{{0, "alice", "SERVER", 1134}, {12, "SERVER", "charlie", 1134}};
    auto b = a;
    CHECK_FALSE(check_indistinguishable(a, b).has_value());
    b[1].dst = "dorothy";
    auto d = check_indistinguishable(a, b);
    REQUIRE(d.has_value());
    CHECK(d->index == 1);
    CHECK(d->field == "dst");
    b = a;
    b[0].time = 1;
    CHECK(check_indistinguishable(a, b)->field == "time");
    b = a;
    b[1].size = 93;
    CHECK(check_indistinguishable(a, b)->field == "size");
    b = a;
    b.pop_back();
    d = check_indistinguishable(a, b);
    CHECK(d->field == "length");
    CHECK(d->index == 1);
}

TEST_CASE("projection is idempotent") {
    const auto r = run(parse_scenario(kCast + "at 0 send_regular alice bob \"x\"\n"));
    const auto v = adversary_view(r.trace);
    CHECK(parse_trace(format_trace(v)) == v);
}

TEST_CASE("regular to different receivers diverges at dst") {
    const auto to_bob = run(parse_scenario(kCast + "at 0 send_regular alice bob \"x\"\n"));
    const auto to_charlie = run(parse_scenario(kCast + "at 0 send_regular alice charlie \"x\"\n"));
    const auto d = check_indistinguishable(adversary_view(to_bob.trace), adversary_view(to_charlie.trace));
    REQUIRE(d.has_value());
    CHECK(d->field == "dst");
}
