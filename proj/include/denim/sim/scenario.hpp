#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "denim/server/server.hpp"
#include "denim/wire/ids.hpp"

namespace denim::sim {

/// Scenario input problem, tied to a 1-based line (0 when not from a file).
class ScenarioError : public Error {
public:
    ScenarioError(int line, const std::string& message);
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct ClientSpec {
    std::string name;
    std::uint32_t p = 0;
    SimTime ttl = 60'000;
    std::vector<std::string> friends;
    int line = 0;
};

enum class ActionKind {
    SendRegular,
    SendDeniable,
    Block,
    SendRecipe,
    Offline,
    Online,
    AppActive,
    KeyPress,
    Inject,
    Drop,
};

const char* to_string(ActionKind kind);

struct Action {
    SimTime at = 0;
    ActionKind kind = ActionKind::SendRegular;
    std::string actor;   // sender / user going on- or offline / inject+drop source
    std::string target;  // receiver, recipe host, blocked user, inject+drop destination
    std::string decoy;
    Bytes payload;              // text, or compiled recipe
    std::string recipe_source;  // SendRecipe only
    std::size_t size = 0;       // Inject: on-wire size
    std::size_t count = 1;      // Drop: datagrams to drop
    int line = 0;
};

struct NetworkConfig {
    SimTime latency = 10;             // one way, client <-> server
    std::int64_t clock_offset_s = 0;  // recipe gettime() at sim time 0
};

struct Scenario {
    std::uint64_t seed = 0;
    std::vector<ClientSpec> clients;
    std::vector<Action> actions;
    server::ServerConfig server;
    NetworkConfig network;
};

/// Parses the line-oriented scenario format. Recipe sources given as
/// `@path` resolve relative to base_dir. Throws ScenarioError.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Checks references and ordering before anything runs. Throws ScenarioError
/// (code VALIDATION_ERROR) naming the offending line.
void validate(const Scenario& scenario);

/// Canonical text form; parse_scenario(to_text(s)) reproduces s.
std::string to_text(const Scenario& scenario);

}  // namespace denim::sim
