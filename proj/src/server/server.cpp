#include "denim/server/server.hpp"

#include <utility>

namespace denim::server {

using wire::MessageType;

namespace {
const std::deque<wire::PaddedMsg> kEmptyQueue;
}

Server::Server(ServerConfig config, PublicKey own_key, Prng nonces)
    : config_(config), own_key_(own_key), nonces_(std::move(nonces)) {}

void Server::register_client(const UserId& user, const PublicKey& pubkey, const LinkKey& link,
                             std::uint32_t p_value) {
    if (clients_.contains(user)) {
        throw Error(Errc::AlreadyRegistered, user.name() + " is already registered");
    }
    clients_.emplace(user, ClientEntry{pubkey, link, p_value, true, {}});
}

void Server::on_datagram(const UserId& from, const wire::WireDatagram& datagram, Transport& net) {
    auto it = clients_.find(from);
    if (it == clients_.end()) {
        ++stats_.garbage_dropped;
        return;
    }
    const LinkKey& link = it->second.link;
    switch (datagram.kind) {
        case wire::DatagramKind::KeyRequest:
            if (auto request = wire::decode_key_request(datagram, link)) {
                key_lookup(from, *request, net);
                return;
            }
            break;
        case wire::DatagramKind::Message:
            if (auto msg = wire::decode_message(datagram, link); msg && msg->headers.sender == from) {
                receive_message(from, *msg, net);
                return;
            }
            break;
        case wire::DatagramKind::KeyResponse:
            break;
    }
    ++stats_.garbage_dropped;
}

void Server::key_lookup(const UserId& from, const wire::KeyRequest& request, Transport& net) {
    ++stats_.key_lookups;
    auto lookup = [&](const UserId& who) -> PublicKey {
        if (who.is_server()) return own_key_;
        auto it = clients_.find(who);
        return it == clients_.end() ? PublicKey{} : it->second.pubkey;
    };
    const PublicKey key1 = lookup(request.who1);
    std::optional<PublicKey> key2;
    if (!request.who2.is_absent()) key2 = lookup(request.who2);

    const auto& link = clients_.at(from).link;
    emit_to(from, wire::encode_key_response(key1, key2, link, nonces_),
            net.now() + config_.lookup_delay, net);
}

void Server::receive_message(const UserId& from, const wire::PaddedMsg& msg, Transport& net) {
    ++stats_.messages_received;
    const auto& headers = msg.headers;
    switch (headers.type) {
        case MessageType::Regular:
            forward(msg, net);
            return;
        case MessageType::Deniable: {
            if (!clients_.contains(headers.decoy_receiver) || !clients_.contains(headers.true_receiver)) {
                ++stats_.unroutable_dropped;
                return;
            }
            // The decoy's dummy goes out before the deniable message is queued.
            forward(make_dummy(headers.decoy_receiver), net);
            if (clients_.at(headers.true_receiver).blocklist.contains(from)) {
                ++stats_.blocked_dropped;
                return;
            }
            auto& queue = deniable_queue_[headers.true_receiver];
            if (config_.queue_cap != 0 && queue.size() >= config_.queue_cap) {
                ++stats_.cap_dropped;
                return;
            }
            queue.push_back(msg);
            return;
        }
        case MessageType::BlockRequest: {
            if (!clients_.contains(headers.decoy_receiver) || !headers.true_receiver.is_server()) {
                ++stats_.unroutable_dropped;
                return;
            }
            forward(make_dummy(headers.decoy_receiver), net);
            auto target = msg.chunks[0].open(own_key_);
            if (target && target->kind == cipher::ContentKind::BlockTarget &&
                target->content.size() == UserId::kSize) {
                clients_.at(from).blocklist.insert(UserId::from_bytes(target->content));
            }
            return;
        }
        case MessageType::Dummy:
            // Clients never originate dummies.
            ++stats_.garbage_dropped;
            return;
    }
}

void Server::forward(const wire::PaddedMsg& msg, Transport& net) {
    const UserId receiver = msg.headers.true_receiver;
    auto it = clients_.find(receiver);
    if (it == clients_.end()) {
        ++stats_.unroutable_dropped;
        return;
    }
    const ClientEntry& entry = it->second;
    auto& queue = deniable_queue_[receiver];

    ForwardRecord rec{net.now(), receiver, entry.p_value, 0, msg.headers.type, !entry.online};
    std::vector<wire::PaddedMsg> batch;
    batch.reserve(entry.p_value + 1);
    for (std::uint32_t i = 0; i < entry.p_value; ++i) {
        if (!queue.empty()) {
            batch.push_back(std::move(queue.front()));
            queue.pop_front();
            ++rec.deniable_delivered;
        } else {
            batch.push_back(make_dummy(receiver));
        }
    }
    batch.push_back(msg);

    // Both branches above take the same simulated time: emission slots depend
    // only on the position in the batch.
    const SimTime first = net.now() + config_.forward_delay;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        emit_to(receiver, wire::encode_message(batch[i], entry.link, nonces_),
                first + static_cast<SimTime>(i) * config_.spacing, net);
    }
    forwards_.push_back(rec);
}

wire::PaddedMsg Server::make_dummy(const UserId& receiver) {
    wire::PaddedMsg dummy;
    dummy.headers = {UserId::server(), receiver, UserId{}, MessageType::Dummy};
    for (auto& chunk : dummy.chunks) chunk = wire::PayloadChunk::random(nonces_);
    return dummy;
}

void Server::emit_to(const UserId& user, const wire::WireDatagram& datagram, SimTime at, Transport& net) {
    if (!clients_.at(user).online) {
        offline_queue_[user].push_back(datagram);
        return;
    }
    net.send(UserId::server(), user, datagram, at);
}

void Server::go_offline(const UserId& user) { clients_.at(user).online = false; }

void Server::go_online(const UserId& user, Transport& net) {
    auto& entry = clients_.at(user);
    if (entry.online) return;
    entry.online = true;
    auto it = offline_queue_.find(user);
    if (it == offline_queue_.end()) return;
    const SimTime first = net.now() + config_.forward_delay;
    SimTime slot = 0;
    for (auto& datagram : it->second) {
        net.send(UserId::server(), user, std::move(datagram), first + slot * config_.spacing);
        ++slot;
    }
    offline_queue_.erase(it);
}

const std::deque<wire::PaddedMsg>& Server::deniable_queue(const UserId& user) const {
    auto it = deniable_queue_.find(user);
    return it == deniable_queue_.end() ? kEmptyQueue : it->second;
}

std::size_t Server::offline_backlog(const UserId& user) const {
    auto it = offline_queue_.find(user);
    return it == offline_queue_.end() ? 0 : it->second.size();
}

}  // namespace denim::server
