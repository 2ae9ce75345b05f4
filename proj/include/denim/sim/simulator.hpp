#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "denim/client/client.hpp"
#include "denim/recipes/vm.hpp"
#include "denim/server/server.hpp"
#include "denim/sim/scenario.hpp"
#include "denim/sim/trace.hpp"

namespace denim::sim {

struct ClientSummary {
    UserId id;
    std::vector<client::InboxEntry> inbox;
    std::vector<client::OpRecord> history;
    std::size_t decode_failures = 0;
    std::size_t dummies_dropped = 0;
    std::size_t recipes_rejected = 0;
};

struct RecipeRecord {
    UserId host;
    UserId owner;
    SimTime started = 0;
    std::optional<SimTime> ended;
    recipes::VmStatus status = recipes::VmStatus::Ready;
    recipes::KillReason reason = recipes::KillReason::None;
    std::uint64_t instructions = 0;
    /// Simulated time of each send(n) call and its n.
    std::vector<std::pair<SimTime, std::int32_t>> sends;
};

struct RunStats {
    std::size_t events_processed = 0;
    std::size_t injected = 0;
    std::size_t adversary_dropped = 0;
};

struct RunResult {
    std::vector<TraceEvent> trace;
    std::vector<ClientSummary> clients;  // declaration order
    std::vector<server::ForwardRecord> forwards;
    server::ServerStats server;
    std::map<UserId, std::size_t> deniable_backlog;  // queue depth at the end of the run
    std::vector<RecipeRecord> recipes;
    RunStats stats;

    const ClientSummary& client(const UserId& id) const;
};

/// Runs a scenario to quiescence. Deterministic in (scenario, seed); events at
/// equal times run in scheduling order. Validates first and throws
/// ScenarioError before any event executes.
RunResult run(const Scenario& scenario);
RunResult run(const Scenario& scenario, std::uint64_t seed);

/// Safety net against runaway scenarios.
inline constexpr std::size_t kMaxEvents = 20'000'000;

}  // namespace denim::sim
