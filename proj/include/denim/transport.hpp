#pragma once

#include "denim/wire/ids.hpp"
#include "denim/wire/message.hpp"

namespace denim {

/// The virtual network as seen by an actor. Implemented by the simulator.
class Transport {
public:
    virtual ~Transport() = default;

    virtual SimTime now() const = 0;
    /// Puts a datagram on the link from `from` to `to`, leaving at time `at` (>= now()).
    virtual void send(const UserId& from, const UserId& to, wire::WireDatagram datagram, SimTime at) = 0;
};

}  // namespace denim
