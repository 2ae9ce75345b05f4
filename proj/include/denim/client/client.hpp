#pragma once

#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "denim/client/key_cache.hpp"
#include "denim/transport.hpp"
#include "denim/wire/message.hpp"

namespace denim::client {

struct ClientConfig {
    SimTime ttl = 60'000;
    std::set<UserId> friends;
};

enum class OpKind { Regular, Deniable, Block, Recipe };
enum class OpStatus { Sent, AbortedDecoyBusy, UnknownUser };

const char* to_string(OpKind kind);
const char* to_string(OpStatus status);

/// Outcome of one send operation, logged when the operation completes.
struct OpRecord {
    SimTime issued = 0;
    SimTime completed = 0;
    OpKind kind = OpKind::Regular;
    UserId receiver;  // SERVER for block requests
    UserId decoy;
    CacheDecision decision = CacheDecision::FetchOne;
    OpStatus status = OpStatus::Sent;
    /// Plaintext bytes carried by each emitted MESSAGE datagram, in order.
    std::vector<std::size_t> message_payloads;
};

struct InboxEntry {
    SimTime time = 0;
    UserId from;
    wire::MessageType type = wire::MessageType::Regular;
    Bytes text;
};

enum class ReceiveKind {
    DummyDropped,
    Delivered,
    RecipeAccepted,
    RecipeRejected,
    KeyResponse,
    DecodeFailure,
};

const char* to_string(ReceiveKind kind);

struct ReceiveOutcome {
    ReceiveKind kind = ReceiveKind::DecodeFailure;
    UserId from;
    Bytes payload;  // recipe bytecode for RecipeAccepted
};

/// A DenIM endpoint. Operations are processed one at a time in FIFO order; an
/// operation that needs a key lookup holds the queue until the response lands.
class Client {
public:
    Client(UserId self, ClientConfig config, PublicKey own_key, LinkKey link, PublicKey server_key,
           Prng nonces);

    const UserId& id() const noexcept { return self_; }
    const ClientConfig& config() const noexcept { return config_; }
    const PublicKey& public_key() const noexcept { return own_key_; }
    const LinkKey& link_key() const noexcept { return link_; }
    bool is_friend(const UserId& who) const { return config_.friends.contains(who); }

    void send_regular(const UserId& receiver, Bytes text, Transport& net);
    /// Throws Error(ValidationError) if the decoy is not a friend,
    /// Error(DecoyIsReceiver) if decoy == receiver.
    void send_deniable(const UserId& decoy, const UserId& receiver, Bytes text, Transport& net);
    void send_block(const UserId& decoy, const UserId& blocked, Transport& net);
    /// Bytecode must fit one chunk (446 bytes); throws Error(SizeExceeded) otherwise.
    void send_recipe(const UserId& decoy, const UserId& host, Bytes bytecode, Transport& net);

    ReceiveOutcome on_datagram(const wire::WireDatagram& datagram, Transport& net);

    const KeyCaches& caches() const noexcept { return caches_; }
    KeyCaches& caches() noexcept { return caches_; }
    const std::vector<InboxEntry>& inbox() const noexcept { return inbox_; }
    const std::vector<OpRecord>& history() const noexcept { return history_; }
    std::size_t decode_failures() const noexcept { return decode_failures_; }
    std::size_t pending_ops() const noexcept { return queue_.size() + (awaiting_ ? 1 : 0); }

private:
    struct PendingOp {
        OpKind kind;
        UserId receiver;
        UserId decoy;
        Bytes payload;
        SimTime issued;
    };

    struct Awaiting {
        PendingOp op;
        CacheDecision decision;
        wire::KeyRequest request;
    };

    void enqueue(PendingOp op, Transport& net);
    void pump(Transport& net);
    /// Returns true when the op finished without waiting for the network.
    bool start(PendingOp op, Transport& net);
    void finish_with_keys(const PendingOp& op, CacheDecision decision, const PublicKey& payload_key,
                          Transport& net);
    void record(const PendingOp& op, CacheDecision decision, OpStatus status, SimTime now,
                std::vector<std::size_t> payloads = {});

    UserId self_;
    ClientConfig config_;
    PublicKey own_key_;
    LinkKey link_;
    PublicKey server_key_;
    Prng nonces_;
    KeyCaches caches_;

    std::deque<PendingOp> queue_;
    std::optional<Awaiting> awaiting_;

    std::vector<InboxEntry> inbox_;
    std::vector<OpRecord> history_;
    std::size_t decode_failures_ = 0;
};

}  // namespace denim::client
