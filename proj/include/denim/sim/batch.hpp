#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "denim/sim/scenario.hpp"
#include "denim/sim/trace.hpp"

namespace denim::sim {

/// Adversary views of one scenario under many seeds. Runs share no mutable
/// state; the parallel version uses one OpenMP thread per run.
std::vector<AdversaryView> run_batch(const Scenario& scenario, const std::vector<std::uint64_t>& seeds);
std::vector<AdversaryView> run_batch_serial(const Scenario& scenario, const std::vector<std::uint64_t>& seeds);

using ByteHistogram = std::array<std::uint64_t, 256>;

ByteHistogram byte_histogram(const std::vector<Bytes>& blobs);
ByteHistogram byte_histogram_serial(const std::vector<Bytes>& blobs);

/// Pearson statistic against the uniform distribution (255 degrees of freedom).
double chi_square(const ByteHistogram& hist);

}  // namespace denim::sim
