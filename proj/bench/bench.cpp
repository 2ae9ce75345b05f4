// Parallel kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "denim/sim/batch.hpp"
#include "denim/wire/message.hpp"

using namespace denim;
using namespace denim::sim;

namespace {

template <class F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Eight clients in a ring; each action is a regular or deniable send.
Scenario ring_scenario(int actions) {
    const int n = 8;
    auto name = [](int i) { return "u" + std::to_string(i); };
    std::ostringstream s;
    for (int i = 0; i < n; ++i) s << "client " << name(i) << " p=" << i % 4 << " friends=" << name((i + 1) % n) << "\n";
    for (int a = 0; a < actions; ++a) {
        const int from = a % n;
        const int to = (from + 2 + a / n) % n == from ? (from + 3) % n : (from + 2 + a / n) % n;
        s << "at " << a * 15 << " ";
        if (a % 3 == 0 && to != (from + 1) % n) {
            s << "send_deniable " << name(from) << " via " << name((from + 1) % n) << " to " << name(to) << " bytes=200\n";
        } else {
            s << "send_regular " << name(from) << " " << name(to) << " bytes=" << (a * 37) % 1200 << "\n";
        }
    }
    return parse_scenario(s.str());
}

std::vector<Bytes> sealed_chunks(int count) {
    Prng rng(42);
    const auto key = PublicKey::generate(rng);
    std::vector<Bytes> blobs;
    blobs.reserve(count);
    for (int i = 0; i < count; ++i) {
        const auto chunk = wire::PayloadChunk::seal(key, cipher::ContentKind::Text, Bytes(100, 'a'), rng);
        blobs.emplace_back(chunk.sealed().begin(), chunk.sealed().end());
    }
    return blobs;
}

void row(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-16s %10.1f %10.1f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                equal ? "equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"denim parallel kernel benchmark"};
    int runs = 32, actions = 500, blobs = 20000;
    app.add_option("--runs", runs, "seeds per batch");
    app.add_option("--actions", actions, "actions per scenario");
    app.add_option("--blobs", blobs, "sealed chunks to histogram");
    CLI11_PARSE(app, argc, argv);

    const auto sc = ring_scenario(actions);
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < runs; ++i) seeds.push_back(static_cast<std::uint64_t>(i) * 7919 + 1);
    const auto data = sealed_chunks(blobs);

    std::printf("threads %d\n", omp_get_max_threads());
    std::printf("%-16s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    std::vector<AdversaryView> ser, par;
    const double t_ser = time_ms([&] { ser = run_batch_serial(sc, seeds); });
    const double t_par = time_ms([&] { par = run_batch(sc, seeds); });
    row("run_batch", t_ser, t_par, ser == par);

    ByteHistogram h_ser{}, h_par{};
    const double t_hser = time_ms([&] { h_ser = byte_histogram_serial(data); });
    const double t_hpar = time_ms([&] { h_par = byte_histogram(data); });
    row("byte_histogram", t_hser, t_hpar, h_ser == h_par);
    std::printf("chi-square %.1f over %zu bytes\n", chi_square(h_par), data.size() * data.front().size());

    return ser == par && h_ser == h_par ? 0 : 1;
}
