#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "denim/sim/batch.hpp"

using namespace denim;
using namespace denim::sim;

TEST_CASE("parallel batch matches the serial reference") {
    const auto sc = parse_scenario(
        "client alice p=2 friends=charlie\nclient bob p=1 friends=alice\nclient charlie p=3 friends=alice\n"
        "at 0 send_deniable alice via charlie to bob \"x\"\n"
        "at 40 send_regular charlie bob bytes=900\n"
        "at 90 send_regular bob alice \"y\"\n");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 16; ++s) seeds.push_back(s * 7919);
    const auto par = run_batch(sc, seeds);
    const auto ser = run_batch_serial(sc, seeds);
    REQUIRE(par.size() == seeds.size());
    CHECK(par == ser);
    // Timing and sizes never depend on the seed.
    for (const auto& v : par) CHECK(v == par.front());
}

TEST_CASE("parallel histogram matches the serial reference") {
    std::vector<Bytes> blobs;
    Prng rng(5);
    for (int i = 0; i < 64; ++i) {
        Bytes b(1 + i * 13);
        rng.fill(b);
        blobs.push_back(std::move(b));
    }
    CHECK(byte_histogram(blobs) == byte_histogram_serial(blobs));
}

TEST_CASE("chi-square separates uniform from skewed bytes") {
    ByteHistogram flat{};
    flat.fill(100);
    CHECK(chi_square(flat) == doctest::Approx(0.0));
    ByteHistogram skew{};
    skew[0] = 25600;
    CHECK(chi_square(skew) > 1e5);
    CHECK(chi_square(ByteHistogram{}) == 0.0);
}
