#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "denim/client/client.hpp"
#include "denim/sim/scenario.hpp"
#include "denim/sim/simulator.hpp"
#include "denim/sim/trace.hpp"

namespace denim::sim {

// Baseline: a plain message with two 16B ids and one sealed chunk per 446B,
// no decoy id or type byte, no second chunk.
inline constexpr std::size_t kBaselineFixed = wire::kTransportOverhead + cipher::kSymOverhead + 2 * UserId::kSize;
inline constexpr std::size_t kBaselineOneChunk = kBaselineFixed + cipher::kAsymSealedSize;      // 605
inline constexpr std::size_t kBaselineTwoChunks = kBaselineFixed + 2 * cipher::kAsymSealedSize;  // 1117
inline constexpr std::size_t kBaselineKeyRequest = wire::kTransportOverhead + cipher::kSymOverhead + UserId::kSize;  // 77
inline constexpr std::size_t kBaselineKeyResponse =
    wire::kTransportOverhead + cipher::kSymOverhead + PublicKey::kSize;  // 573

static_assert(kBaselineOneChunk == 605 && kBaselineTwoChunks == 1117);
static_assert(kBaselineKeyRequest == 77 && kBaselineKeyResponse == 573);

/// Baseline size for a plaintext of `payload` bytes (1 or 2 chunks).
std::size_t baseline_size(std::size_t payload);
/// 1134 minus baseline: 529 up to 446B, 17 up to 892B.
std::size_t message_overhead(std::size_t payload);
/// max(p - n, 0) * 1134.
std::size_t dummy_overhead(std::size_t p, std::size_t n);

struct MessageRow {
    SimTime time = 0;
    UserId sender;
    UserId receiver;
    client::OpKind kind = client::OpKind::Regular;
    std::size_t payload = 0;
    std::size_t wire = wire::kMessageWireSize;
    std::size_t baseline = 0;
    std::size_t overhead = 0;
};

struct ForwardRow {
    SimTime time = 0;
    UserId receiver;
    wire::MessageType carried = wire::MessageType::Regular;
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t dummies = 0;
    std::size_t dummy_overhead = 0;
    SimTime latency_delta = 0;  // p * spacing
};

struct OverheadReport {
    std::vector<MessageRow> messages;
    std::vector<ForwardRow> forwards;

    std::size_t datagrams = 0;
    std::size_t wire_bytes = 0;
    std::size_t app_bytes = 0;
    std::size_t message_datagrams = 0;
    std::size_t key_requests = 0;
    std::size_t key_responses = 0;
    std::size_t decoy_dummies = 0;  // dummy messages the server sends to decoys

    std::size_t message_overhead = 0;
    std::size_t piggyback_overhead = 0;
    std::size_t decoy_dummy_overhead = 0;
    std::size_t key_lookup_overhead = 0;
    std::size_t total_overhead = 0;
    SimTime max_latency_delta = 0;
    SimTime total_latency_delta = 0;
};

OverheadReport build_report(const RunResult& result, const server::ServerConfig& server);

/// Re-runs the scenario and checks that it reproduces `view`; the report needs
/// queue state the view does not carry. Throws Error(ValidationError) on mismatch.
OverheadReport overhead_report(const AdversaryView& view, const Scenario& scenario);

void write_report(std::ostream& out, const OverheadReport& report);
std::string format_report(const OverheadReport& report);

}  // namespace denim::sim
