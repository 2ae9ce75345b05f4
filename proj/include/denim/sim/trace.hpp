#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "denim/wire/ids.hpp"
#include "denim/wire/message.hpp"

namespace denim::sim {

/// One datagram as it crossed the network. `kind` is simulator bookkeeping;
/// it follows from `size` and is never part of the adversary view.
struct TraceEvent {
    SimTime time = 0;
    UserId src;
    UserId dst;
    std::size_t size = 0;
    wire::DatagramKind kind = wire::DatagramKind::Message;
};

/// What a global passive observer records: endpoints, size, time.
struct ViewEvent {
    SimTime time = 0;
    std::string src;
    std::string dst;
    std::size_t size = 0;

    bool operator==(const ViewEvent&) const = default;
};

using AdversaryView = std::vector<ViewEvent>;

AdversaryView adversary_view(const std::vector<TraceEvent>& trace);

struct Divergence {
    std::size_t index = 0;
    /// "time", "src", "dst", "size", or "length" when one view is a prefix of the other.
    std::string field;
};

/// nullopt when the views are identical.
std::optional<Divergence> check_indistinguishable(const AdversaryView& a, const AdversaryView& b);

/// Tab-separated `time_ms  src  dst  size`, one event per line.
void write_trace(std::ostream& out, const AdversaryView& view);
std::string format_trace(const AdversaryView& view);
/// Throws Error(DecodeFailure) with a line number on malformed input.
AdversaryView parse_trace(std::string_view text);
AdversaryView load_trace(const std::filesystem::path& path);

}  // namespace denim::sim
