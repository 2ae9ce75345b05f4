#include "denim/client/client.hpp"

#include <utility>

namespace denim::client {

using wire::MessageType;

const char* to_string(OpKind kind) {
    switch (kind) {
        case OpKind::Regular: return "regular";
        case OpKind::Deniable: return "deniable";
        case OpKind::Block: return "block";
        case OpKind::Recipe: return "recipe";
    }
    return "?";
}

const char* to_string(OpStatus status) {
    switch (status) {
        case OpStatus::Sent: return "SENT";
        case OpStatus::AbortedDecoyBusy: return "ABORTED_DECOY_BUSY";
        case OpStatus::UnknownUser: return "UNKNOWN_USER";
    }
    return "?";
}

const char* to_string(ReceiveKind kind) {
    switch (kind) {
        case ReceiveKind::DummyDropped: return "DUMMY_DROPPED";
        case ReceiveKind::Delivered: return "DELIVERED";
        case ReceiveKind::RecipeAccepted: return "RECIPE_ACCEPTED";
        case ReceiveKind::RecipeRejected: return "RECIPE_REJECTED";
        case ReceiveKind::KeyResponse: return "KEY_RESPONSE";
        case ReceiveKind::DecodeFailure: return "DECODE_FAILURE";
    }
    return "?";
}

Client::Client(UserId self, ClientConfig config, PublicKey own_key, LinkKey link,
               PublicKey server_key, Prng nonces)
    : self_(self),
      config_(std::move(config)),
      own_key_(own_key),
      link_(link),
      server_key_(server_key),
      nonces_(std::move(nonces)),
      caches_(config_.ttl) {}

void Client::send_regular(const UserId& receiver, Bytes text, Transport& net) {
    enqueue({OpKind::Regular, receiver, UserId{}, std::move(text), net.now()}, net);
}

void Client::send_deniable(const UserId& decoy, const UserId& receiver, Bytes text, Transport& net) {
    if (decoy.is_absent() || decoy == receiver) {
        throw Error(Errc::DecoyIsReceiver, "decoy cannot be the receiver");
    }
    if (!is_friend(decoy)) {
        throw Error(Errc::ValidationError, "decoy " + decoy.name() + " is not a trusted contact of " +
                                               self_.name());
    }
    enqueue({OpKind::Deniable, receiver, decoy, std::move(text), net.now()}, net);
}

void Client::send_block(const UserId& decoy, const UserId& blocked, Transport& net) {
    if (!is_friend(decoy)) {
        throw Error(Errc::ValidationError, "decoy " + decoy.name() + " is not a trusted contact of " +
                                               self_.name());
    }
    Bytes target(blocked.bytes().begin(), blocked.bytes().end());
    enqueue({OpKind::Block, UserId::server(), decoy, std::move(target), net.now()}, net);
}

void Client::send_recipe(const UserId& decoy, const UserId& host, Bytes bytecode, Transport& net) {
    if (bytecode.size() > cipher::kAsymPlainMax) {
        throw Error(Errc::SizeExceeded, "recipe of " + std::to_string(bytecode.size()) +
                                            " bytes does not fit one chunk");
    }
    if (decoy.is_absent() || decoy == host) {
        throw Error(Errc::DecoyIsReceiver, "decoy cannot be the receiver");
    }
    if (!is_friend(decoy)) {
        throw Error(Errc::ValidationError, "decoy " + decoy.name() + " is not a trusted contact of " +
                                               self_.name());
    }
    enqueue({OpKind::Recipe, host, decoy, std::move(bytecode), net.now()}, net);
}

void Client::enqueue(PendingOp op, Transport& net) {
    queue_.push_back(std::move(op));
    pump(net);
}

void Client::pump(Transport& net) {
    while (!awaiting_ && !queue_.empty()) {
        PendingOp op = std::move(queue_.front());
        queue_.pop_front();
        start(std::move(op), net);
    }
}

bool Client::start(PendingOp op, Transport& net) {
    const SimTime now = net.now();
    const Intent intent = op.kind == OpKind::Regular ? Intent::Regular : Intent::Deniable;
    const CacheDecision decision = resolve_keys(caches_, intent, op.receiver, op.decoy, now);

    switch (decision) {
        case CacheDecision::Abort:
            record(op, decision, OpStatus::AbortedDecoyBusy, now);
            return true;
        case CacheDecision::ReuseRegular: {
            const PublicKey key = caches_.regular(op.receiver, now)->key;
            caches_.bump_regular(op.receiver, now);
            finish_with_keys(op, decision, key, net);
            return true;
        }
        case CacheDecision::ReuseDecoyAsRegular: {
            const PublicKey key = caches_.as_decoy(op.receiver, now)->decoy_key;
            caches_.bump_pair(op.receiver, now);
            finish_with_keys(op, decision, key, net);
            return true;
        }
        case CacheDecision::ReusePair: {
            const PublicKey key = caches_.as_decoy(op.decoy, now)->receiver_key;
            caches_.bump_pair(op.decoy, now);
            finish_with_keys(op, decision, key, net);
            return true;
        }
        case CacheDecision::FetchOne:
        case CacheDecision::FetchPair: {
            wire::KeyRequest request{op.receiver,
                                     decision == CacheDecision::FetchPair ? op.decoy : UserId{}};
            net.send(self_, UserId::server(), wire::encode_key_request(request, link_, nonces_), now);
            awaiting_ = Awaiting{std::move(op), decision, request};
            return false;
        }
    }
    return true;
}

void Client::finish_with_keys(const PendingOp& op, CacheDecision decision, const PublicKey& payload_key,
                              Transport& net) {
    const SimTime now = net.now();
    std::vector<wire::MessagePlaintext> parts;
    cipher::ContentKind content = cipher::ContentKind::Text;
    wire::MessageHeaders headers{self_, op.receiver, UserId{}, MessageType::Regular};

    switch (op.kind) {
        case OpKind::Regular:
            parts = wire::chunk_plaintext(op.payload);
            break;
        case OpKind::Deniable:
            parts = wire::chunk_plaintext(op.payload);
            headers.decoy_receiver = op.decoy;
            headers.type = MessageType::Deniable;
            break;
        case OpKind::Recipe:
            parts.push_back({op.payload, Bytes{}});
            content = cipher::ContentKind::Recipe;
            headers.decoy_receiver = op.decoy;
            headers.type = MessageType::Deniable;
            break;
        case OpKind::Block:
            parts.push_back({op.payload, Bytes{}});
            content = cipher::ContentKind::BlockTarget;
            headers.decoy_receiver = op.decoy;
            headers.type = MessageType::BlockRequest;
            break;
    }

    std::vector<std::size_t> payloads;
    for (const auto& part : parts) {
        wire::PaddedMsg msg{headers, wire::seal_message(payload_key, content, part, nonces_)};
        net.send(self_, UserId::server(), wire::encode_message(msg, link_, nonces_), now);
        payloads.push_back(part[0].size() + part[1].size());
    }
    record(op, decision, OpStatus::Sent, now, std::move(payloads));
}

void Client::record(const PendingOp& op, CacheDecision decision, OpStatus status, SimTime now,
                    std::vector<std::size_t> payloads) {
    history_.push_back(OpRecord{op.issued, now, op.kind, op.receiver, op.decoy, decision, status,
                                std::move(payloads)});
}

ReceiveOutcome Client::on_datagram(const wire::WireDatagram& datagram, Transport& net) {
    const SimTime now = net.now();

    if (datagram.kind == wire::DatagramKind::KeyResponse) {
        auto response = wire::decode_key_response(datagram, link_);
        if (!response || !awaiting_) {
            ++decode_failures_;
            return {ReceiveKind::DecodeFailure, {}, {}};
        }
        Awaiting waiting = std::move(*awaiting_);
        awaiting_.reset();

        const bool pair = waiting.decision == CacheDecision::FetchPair;
        if (response->key1.is_null() || (pair && response->key2.is_null())) {
            record(waiting.op, waiting.decision, OpStatus::UnknownUser, now);
        } else if (pair) {
            caches_.store_pair(waiting.request.who2, response->key2, waiting.request.who1,
                               response->key1, now);
            finish_with_keys(waiting.op, waiting.decision, response->key1, net);
        } else {
            caches_.store_regular(waiting.request.who1, response->key1, now);
            finish_with_keys(waiting.op, waiting.decision, response->key1, net);
        }
        pump(net);
        return {ReceiveKind::KeyResponse, UserId::server(), {}};
    }

    auto msg = wire::decode_message(datagram, link_);
    if (!msg || msg->headers.true_receiver != self_) {
        ++decode_failures_;
        return {ReceiveKind::DecodeFailure, {}, {}};
    }
    const auto& headers = msg->headers;
    if (headers.type == MessageType::Dummy) {
        return {ReceiveKind::DummyDropped, headers.sender, {}};
    }
    if (headers.type == MessageType::BlockRequest) {
        ++decode_failures_;
        return {ReceiveKind::DecodeFailure, headers.sender, {}};
    }

    Bytes text;
    std::optional<cipher::ContentKind> kind;
    for (const auto& chunk : msg->chunks) {
        auto opened = chunk.open(own_key_);
        if (!opened) {
            ++decode_failures_;
            return {ReceiveKind::DecodeFailure, headers.sender, {}};
        }
        if (!kind) kind = opened->kind;
        text.insert(text.end(), opened->content.begin(), opened->content.end());
    }

    if (kind == cipher::ContentKind::Recipe) {
        // Recipes only run when they arrive deniably from a friend.
        if (headers.type != MessageType::Deniable || !is_friend(headers.sender)) {
            return {ReceiveKind::RecipeRejected, headers.sender, {}};
        }
        return {ReceiveKind::RecipeAccepted, headers.sender, std::move(text)};
    }
    if (kind != cipher::ContentKind::Text) {
        ++decode_failures_;
        return {ReceiveKind::DecodeFailure, headers.sender, {}};
    }

    inbox_.push_back(InboxEntry{now, headers.sender, headers.type, text});
    return {ReceiveKind::Delivered, headers.sender, std::move(text)};
}

}  // namespace denim::client
