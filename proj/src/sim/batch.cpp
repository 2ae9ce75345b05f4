#include "denim/sim/batch.hpp"

#include <omp.h>

#include "denim/sim/simulator.hpp"

namespace denim::sim {

std::vector<AdversaryView> run_batch(const Scenario& scenario, const std::vector<std::uint64_t>& seeds) {
    validate(scenario);
    std::vector<AdversaryView> views(seeds.size());
    const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        views[i] = adversary_view(run(scenario, seeds[i]).trace);
    }
    return views;
}

std::vector<AdversaryView> run_batch_serial(const Scenario& scenario, const std::vector<std::uint64_t>& seeds) {
    std::vector<AdversaryView> views;
    views.reserve(seeds.size());
    for (auto seed : seeds) views.push_back(adversary_view(run(scenario, seed).trace));
    return views;
}

ByteHistogram byte_histogram(const std::vector<Bytes>& blobs) {
    ByteHistogram total{};
    const auto n = static_cast<std::int64_t>(blobs.size());
#pragma omp parallel
    {
        ByteHistogram local{};
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            for (auto b : blobs[i]) ++local[b];
        }
#pragma omp critical
        for (std::size_t k = 0; k < local.size(); ++k) total[k] += local[k];
    }
    return total;
}

ByteHistogram byte_histogram_serial(const std::vector<Bytes>& blobs) {
    ByteHistogram hist{};
    for (const auto& blob : blobs) {
        for (auto b : blob) ++hist[b];
    }
    return hist;
}

double chi_square(const ByteHistogram& hist) {
    std::uint64_t total = 0;
    for (auto c : hist) total += c;
    if (total == 0) return 0.0;
    const double expected = static_cast<double>(total) / 256.0;
    double stat = 0.0;
    for (auto c : hist) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

}  // namespace denim::sim
