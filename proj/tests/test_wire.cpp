#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "denim/sim/batch.hpp"
#include "denim/wire/message.hpp"

using namespace denim;
using namespace denim::wire;

namespace {

const UserId alice = UserId::from_name("alice");
const UserId bob = UserId::from_name("bob");
const UserId charlie = UserId::from_name("charlie");

Bytes text_of(std::size_t n) {
    Bytes b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(i * 7 + 3);
    return b;
}

struct Keys {
    Prng rng{42};
    PublicKey bob_key = PublicKey::generate(rng);
    LinkKey link = LinkKey::generate(rng);
};

std::string hex_dump(const Bytes& bytes) {
    std::ostringstream out;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << int(bytes[i]);
        out << ((i % 32 == 31 || i + 1 == bytes.size()) ? '\n' : ' ');
    }
    return out.str();
}

std::string fixture_path(const char* name) { return std::string(DENIM_SOURCE_DIR) + "/tests/fixtures/" + name; }

void check_fixture(const char* name, const Bytes& bytes) {
    const std::string dump = hex_dump(bytes);
    if (std::getenv("DENIM_REGEN_FIXTURES")) {
        std::ofstream(fixture_path(name), std::ios::binary) << dump;
    }
    std::ifstream in(fixture_path(name), std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing fixture ", name, " (set DENIM_REGEN_FIXTURES=1 to create)");
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == dump);
}

}  // namespace

TEST_CASE("user ids") {
    CHECK(alice.name() == "alice");
    CHECK(UserId::server().is_server());
    CHECK(UserId::server().name() == "SERVER");
    CHECK(UserId{}.is_absent());
    CHECK(UserId::from_bytes(alice.bytes()) == alice);
    CHECK_THROWS_AS(UserId::from_name(""), Error);
    CHECK_THROWS_AS(UserId::from_name("seventeen-chars-x"), Error);
    CHECK_THROWS_AS(UserId::from_name("has space"), Error);
}

TEST_CASE("sizes are fixed per datagram kind") {
    Keys k;
    Prng nonces(1);
    for (std::size_t n : {0u, 1u, 100u, 446u, 447u, 892u}) {
        const auto plains = chunk_plaintext(text_of(n));
        REQUIRE(plains.size() == 1);
        PaddedMsg msg{{alice, bob, {}, MessageType::Regular},
                      seal_message(k.bob_key, cipher::ContentKind::Text, plains[0], nonces)};
        const auto d = encode_message(msg, k.link, nonces);
        CHECK(d.app_size() == 1094);
        CHECK(d.wire_size() == 1134);
    }
    const auto req1 = encode_key_request({bob, {}}, k.link, nonces);
    const auto req2 = encode_key_request({bob, charlie}, k.link, nonces);
    CHECK(req1.app_size() == 53);
    CHECK(req1.wire_size() == 93);
    CHECK(req2.wire_size() == 93);
    const auto res1 = encode_key_response(k.bob_key, std::nullopt, k.link, nonces);
    const auto res2 = encode_key_response(k.bob_key, k.bob_key, k.link, nonces);
    CHECK(res1.app_size() == 1045);
    CHECK(res1.wire_size() == 1085);
    CHECK(res2.wire_size() == 1085);

    CHECK(classify_wire_size(1134) == DatagramKind::Message);
    CHECK(classify_wire_size(93) == DatagramKind::KeyRequest);
    CHECK(classify_wire_size(1085) == DatagramKind::KeyResponse);
    CHECK_FALSE(classify_wire_size(1000).has_value());
}

TEST_CASE("headers encode to 49 bytes and round trip") {
    MessageHeaders h{alice, bob, charlie, MessageType::Deniable};
    const auto bytes = h.encode();
    CHECK(bytes.size() == 49);
    CHECK(bytes[48] == 2);
    CHECK(MessageHeaders::decode(bytes) == h);
    auto bad = bytes;
    bad[48] = 9;
    CHECK_FALSE(MessageHeaders::decode(bad).has_value());
}

TEST_CASE("chunking") {
    SUBCASE("100 bytes: one message, second chunk empty") {
        const auto m = chunk_plaintext(text_of(100));
        REQUIRE(m.size() == 1);
        CHECK(m[0][0].size() == 100);
        CHECK(m[0][1].empty());
    }
    SUBCASE("892 bytes: one full message") {
        const auto m = chunk_plaintext(text_of(892));
        REQUIRE(m.size() == 1);
        CHECK(m[0][0].size() == 446);
        CHECK(m[0][1].size() == 446);
    }
    SUBCASE("1000 bytes: two messages") {
        const auto m = chunk_plaintext(text_of(1000));
        REQUIRE(m.size() == 2);
        CHECK(m[1][0].size() == 108);
        CHECK(unchunk(m) == text_of(1000));
    }
    SUBCASE("empty text: one message") {
        CHECK(chunk_plaintext({}).size() == 1);
    }
}

TEST_CASE("message round trip through both layers") {
    Keys k;
    Prng nonces(9);
    const auto text = text_of(700);
    const auto plains = chunk_plaintext(text);
    PaddedMsg msg{{alice, bob, charlie, MessageType::Deniable},
                  seal_message(k.bob_key, cipher::ContentKind::Text, plains[0], nonces)};
    const auto d = encode_message(msg, k.link, nonces);
    const auto back = decode_message(d, k.link);
    REQUIRE(back.has_value());
    CHECK(*back == msg);
    const auto c0 = back->chunks[0].open(k.bob_key);
    const auto c1 = back->chunks[1].open(k.bob_key);
    REQUIRE(c0.has_value());
    REQUIRE(c1.has_value());
    CHECK(c0->content.size() == 446);
    CHECK(c1->content.size() == 254);

    Prng other(77);
    CHECK_FALSE(back->chunks[0].open(PublicKey::generate(other)).has_value());
    CHECK_FALSE(decode_message(d, LinkKey::generate(other)).has_value());
}

TEST_CASE("tampering is detected") {
    Keys k;
    Prng nonces(3);
    auto d = encode_message(PaddedMsg{{alice, bob, {}, MessageType::Regular}, {}}, k.link, nonces);
    d.bytes[100] ^= 1;
    CHECK_FALSE(decode_message(d, k.link).has_value());
    auto r = encode_key_request({bob, {}}, k.link, nonces);
    r.bytes.pop_back();
    CHECK_FALSE(decode_key_request(r, k.link).has_value());
}

TEST_CASE("chunk over 446 bytes is refused") {
    Keys k;
    Prng nonces(5);
    try {
        PayloadChunk::seal(k.bob_key, cipher::ContentKind::Text, text_of(447), nonces);
        FAIL("expected ChunkTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ChunkTooLarge);
    }
}

TEST_CASE("key request and response round trip") {
    Keys k;
    Prng nonces(11);
    CHECK(decode_key_request(encode_key_request({bob, charlie}, k.link, nonces), k.link) ==
          KeyRequest{bob, charlie});
    CHECK(decode_key_request(encode_key_request({bob, {}}, k.link, nonces), k.link) == KeyRequest{bob, {}});

    Prng rng(4);
    const auto other = PublicKey::generate(rng);
    const auto pair = decode_key_response(encode_key_response(k.bob_key, other, k.link, nonces), k.link);
    REQUIRE(pair.has_value());
    CHECK(pair->key1 == k.bob_key);
    CHECK(pair->key2 == other);
    CHECK(pair->key2_valid);
    CHECK_FALSE(pair->unknown_user());

    const auto one = decode_key_response(encode_key_response(k.bob_key, std::nullopt, k.link, nonces), k.link);
    REQUIRE(one.has_value());
    CHECK_FALSE(one->key2_valid);

    const auto unknown =
        decode_key_response(encode_key_response(PublicKey{}, std::nullopt, k.link, nonces), k.link);
    REQUIRE(unknown.has_value());
    CHECK(unknown->unknown_user());
}

TEST_CASE("ciphertext bytes look uniform") {
    Keys k;
    Prng nonces(21);
    std::vector<Bytes> blobs;
    for (int i = 0; i < 400; ++i) {
        const auto chunk = PayloadChunk::seal(k.bob_key, cipher::ContentKind::Text, Bytes(10, 'a'), nonces);
        blobs.emplace_back(chunk.sealed().begin(), chunk.sealed().end());
    }
    // 255 degrees of freedom: the 0.999 quantile is about 330.
    CHECK(sim::chi_square(sim::byte_histogram(blobs)) < 330.0);
    CHECK(sim::byte_histogram(blobs) == sim::byte_histogram_serial(blobs));
}

TEST_CASE("byte-exact fixtures") {
    Prng rng(2024);
    const auto key = PublicKey::generate(rng);
    const auto link = LinkKey::generate(rng);
    Prng nonces(7);
    const auto plains = chunk_plaintext(Bytes{'h', 'e', 'l', 'l', 'o'});
    PaddedMsg msg{{alice, bob, charlie, MessageType::Deniable},
                  seal_message(key, cipher::ContentKind::Text, plains[0], nonces)};
    check_fixture("message.hex", encode_message(msg, link, nonces).bytes);
    check_fixture("key_request.hex", encode_key_request({bob, charlie}, link, nonces).bytes);
    check_fixture("key_response.hex", encode_key_response(key, key, link, nonces).bytes);
}
