#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "denim/transport.hpp"
#include "denim/wire/message.hpp"

namespace denim::server {

struct ServerConfig {
    SimTime lookup_delay = 5;   // key lookup service time, same for one or two keys
    SimTime forward_delay = 2;  // receive-to-first-emission processing time
    SimTime spacing = 1;        // between consecutive datagrams of one forward
    std::size_t queue_cap = 0;  // per-receiver deniable queue cap; 0 = unbounded
};

struct ClientEntry {
    PublicKey pubkey;
    LinkKey link;
    std::uint32_t p_value = 0;
    bool online = true;
    std::set<UserId> blocklist;
};

/// One execution of the forwarding loop.
struct ForwardRecord {
    SimTime time = 0;
    UserId receiver;
    std::uint32_t p_value = 0;
    std::size_t deniable_delivered = 0;  // n: queued deniable messages popped
    wire::MessageType carried = wire::MessageType::Regular;
    bool buffered_offline = false;
};

struct ServerStats {
    std::size_t key_lookups = 0;
    std::size_t messages_received = 0;
    std::size_t garbage_dropped = 0;
    std::size_t blocked_dropped = 0;
    std::size_t cap_dropped = 0;
    std::size_t unroutable_dropped = 0;
};

/// Trusted store-and-forward hub. Every handler runs to completion at one
/// simulated instant; emissions are scheduled on the transport.
class Server {
public:
    Server(ServerConfig config, PublicKey own_key, Prng nonces);

    const ServerConfig& config() const noexcept { return config_; }
    const PublicKey& public_key() const noexcept { return own_key_; }

    /// Throws Error(AlreadyRegistered).
    void register_client(const UserId& user, const PublicKey& pubkey, const LinkKey& link,
                         std::uint32_t p_value);
    bool is_registered(const UserId& user) const { return clients_.contains(user); }
    const ClientEntry& entry(const UserId& user) const { return clients_.at(user); }

    /// Entry point for everything arriving from `from`. Undecodable input is dropped.
    void on_datagram(const UserId& from, const wire::WireDatagram& datagram, Transport& net);

    void key_lookup(const UserId& from, const wire::KeyRequest& request, Transport& net);
    void receive_message(const UserId& from, const wire::PaddedMsg& msg, Transport& net);
    /// Emits p piggybacks (queued deniable first, then dummies) and then msg.
    void forward(const wire::PaddedMsg& msg, Transport& net);

    void go_offline(const UserId& user);
    void go_online(const UserId& user, Transport& net);

    const std::deque<wire::PaddedMsg>& deniable_queue(const UserId& user) const;
    std::size_t offline_backlog(const UserId& user) const;
    const std::vector<ForwardRecord>& forwards() const noexcept { return forwards_; }
    const ServerStats& stats() const noexcept { return stats_; }

private:
    wire::PaddedMsg make_dummy(const UserId& receiver);
    void emit_to(const UserId& user, const wire::WireDatagram& datagram, SimTime at, Transport& net);

    ServerConfig config_;
    PublicKey own_key_;
    Prng nonces_;

    std::map<UserId, ClientEntry> clients_;
    std::map<UserId, std::deque<wire::PaddedMsg>> deniable_queue_;
    std::map<UserId, std::deque<wire::WireDatagram>> offline_queue_;

    std::vector<ForwardRecord> forwards_;
    ServerStats stats_;
};

}  // namespace denim::server
