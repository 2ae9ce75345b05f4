#include "denim/sim/simulator.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <queue>

namespace denim::sim {

const ClientSummary& RunResult::client(const UserId& id) const {
    for (const auto& c : clients) {
        if (c.id == id) return c;
    }
    throw Error(Errc::UnknownUser, "no client " + id.name() + " in run result");
}

namespace {

constexpr std::int32_t kNoKeyPress = -86'400;
constexpr std::int32_t kMaxSendsPerCall = 100;

PublicKey key_from(const Prng& root, std::string_view domain) {
    Prng rng = root.derive(domain);
    return PublicKey::generate(rng);
}

class Simulation final : public Transport {
public:
    Simulation(const Scenario& sc, std::uint64_t seed)
        : sc_(sc),
          root_(seed),
          server_(sc.server, key_from(root_, "key/SERVER"), root_.derive("nonce/SERVER")),
          adversary_(root_.derive("adversary")) {
        for (const auto& spec : sc_.clients) {
            const UserId id = UserId::from_name(spec.name);
            Prng key_rng = root_.derive("key/" + spec.name);
            Prng link_rng = root_.derive("link/" + spec.name);
            client::ClientConfig config;
            config.ttl = spec.ttl;
            for (const auto& f : spec.friends) config.friends.insert(UserId::from_name(f));
            index_.emplace(id, clients_.size());
            clients_.emplace_back(id, std::move(config), PublicKey::generate(key_rng),
                                  LinkKey::generate(link_rng), server_.public_key(),
                                  root_.derive("nonce/" + spec.name));
            summaries_.push_back(ClientSummary{id, {}, {}, 0, 0, 0});
            // Registration is out-of-band setup and leaves no trace.
            const auto& c = clients_.back();
            server_.register_client(id, c.public_key(), c.link_key(), spec.p);
        }
    }

    SimTime now() const override { return now_; }

    void send(const UserId& from, const UserId& to, wire::WireDatagram datagram, SimTime at) override {
        if (at <= now_) {
            emit(from, to, std::move(datagram));
        } else {
            schedule(at, [this, from, to, d = std::move(datagram)]() mutable { emit(from, to, std::move(d)); });
        }
    }

    RunResult execute() {
        for (std::size_t i = 0; i < sc_.actions.size(); ++i) {
            schedule(sc_.actions[i].at, [this, i] { perform(sc_.actions[i]); });
        }
        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            ev.fn();
            if (++result_.stats.events_processed > kMaxEvents) {
                throw Error(Errc::ValidationError, "scenario exceeded the event limit");
            }
        }
        return finish();
    }

private:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    struct DropRule {
        UserId src;
        UserId dst;
        std::size_t remaining;
    };

    struct Instance {
        std::size_t record;
        UserId host;
        UserId owner;
        recipes::Vm vm;
        bool live = true;
        std::optional<std::int32_t> waiting_on;
    };

    class Bridge final : public recipes::VmHost {
    public:
        Bridge(Simulation& sim, std::size_t index) : sim_(sim), index_(index) {}

        std::int32_t gettime() override { return sim_.time_of_day(); }
        std::int32_t last_kb_time() override {
            auto it = sim_.last_key_press_.find(inst().host);
            return it == sim_.last_key_press_.end() ? kNoKeyPress : it->second;
        }
        std::int32_t rnd(std::int32_t lo, std::int32_t hi) override {
            auto key = std::make_pair(inst().host, inst().owner);
            auto it = sim_.recipe_rng_.find(key);
            if (it == sim_.recipe_rng_.end()) {
                it = sim_.recipe_rng_
                         .emplace(key, sim_.root_.derive("recipe/" + key.first.name() + "/" + key.second.name()))
                         .first;
            }
            return static_cast<std::int32_t>(it->second.uniform(lo, hi));
        }
        void send(std::int32_t count) override {
            const std::int32_t n = std::clamp(count, 0, kMaxSendsPerCall);
            sim_.result_.recipes[inst().record].sends.emplace_back(sim_.now_, n);
            auto& host = sim_.client_of(inst().host);
            for (std::int32_t i = 0; i < n; ++i) host.send_regular(inst().owner, Bytes{}, sim_);
        }
        std::int32_t load(std::int32_t reg) override {
            const auto& regs = sim_.stores_[{inst().host, inst().owner}];
            auto it = regs.find(reg);
            return it == regs.end() ? 0 : it->second;
        }
        void store(std::int32_t reg, std::int32_t value) override {
            sim_.stores_[{inst().host, inst().owner}][reg] = value;
        }
        void reset() override {
            for (std::size_t i = 0; i < sim_.instances_.size(); ++i) {
                auto& other = *sim_.instances_[i];
                if (i == index_ || !other.live || other.host != inst().host || other.owner != inst().owner) continue;
                other.vm.kill(recipes::KillReason::Reset);
                sim_.retire(i);
            }
        }

    private:
        Instance& inst() { return *sim_.instances_[index_]; }
        Simulation& sim_;
        std::size_t index_;
    };

    void schedule(SimTime at, std::function<void()> fn) { queue_.push(Event{at, next_seq_++, std::move(fn)}); }

    client::Client& client_of(const UserId& id) { return clients_.at(index_.at(id)); }
    ClientSummary& summary_of(const UserId& id) { return summaries_.at(index_.at(id)); }

    std::int32_t time_of_day() const {
        return static_cast<std::int32_t>(sc_.network.clock_offset_s + now_ / 1000);
    }

    static UserId endpoint(const std::string& name) {
        return name == "SERVER" ? UserId::server() : UserId::from_name(name);
    }

    void emit(const UserId& from, const UserId& to, wire::WireDatagram datagram) {
        for (auto& rule : drops_) {
            if (rule.remaining > 0 && rule.src == from && rule.dst == to) {
                --rule.remaining;
                ++result_.stats.adversary_dropped;
                return;
            }
        }
        result_.trace.push_back(TraceEvent{now_, from, to, datagram.wire_size(), datagram.kind});
        deliver_later(from, to, std::move(datagram));
    }

    void deliver_later(const UserId& from, const UserId& to, wire::WireDatagram datagram) {
        schedule(now_ + sc_.network.latency,
                 [this, from, to, d = std::move(datagram)] { arrive(from, to, d); });
    }

    void arrive(const UserId& from, const UserId& to, const wire::WireDatagram& datagram) {
        if (to.is_server()) {
            server_.on_datagram(from, datagram, *this);
            return;
        }
        auto outcome = client_of(to).on_datagram(datagram, *this);
        auto& summary = summary_of(to);
        switch (outcome.kind) {
            case client::ReceiveKind::DummyDropped: ++summary.dummies_dropped; break;
            case client::ReceiveKind::RecipeRejected: ++summary.recipes_rejected; break;
            case client::ReceiveKind::RecipeAccepted: spawn(to, outcome.from, std::move(outcome.payload)); break;
            default: break;
        }
    }

    void perform(const Action& a) {
        const UserId actor = endpoint(a.actor);
        switch (a.kind) {
            case ActionKind::SendRegular:
                client_of(actor).send_regular(UserId::from_name(a.target), a.payload, *this);
                break;
            case ActionKind::SendDeniable:
                client_of(actor).send_deniable(UserId::from_name(a.decoy), UserId::from_name(a.target),
                                               a.payload, *this);
                break;
            case ActionKind::SendRecipe:
                client_of(actor).send_recipe(UserId::from_name(a.decoy), UserId::from_name(a.target),
                                             a.payload, *this);
                break;
            case ActionKind::Block:
                client_of(actor).send_block(UserId::from_name(a.decoy), UserId::from_name(a.target), *this);
                break;
            case ActionKind::Offline:
                server_.go_offline(actor);
                break;
            case ActionKind::Online:
                server_.go_online(actor, *this);
                break;
            case ActionKind::KeyPress:
                last_key_press_[actor] = time_of_day();
                break;
            case ActionKind::AppActive:
                app_active(actor);
                break;
            case ActionKind::Inject: {
                Bytes garbage(a.size > wire::kTransportOverhead ? a.size - wire::kTransportOverhead : 0);
                adversary_.fill(garbage);
                wire::WireDatagram d{wire::classify_wire_size(a.size).value_or(wire::DatagramKind::Message),
                                     std::move(garbage)};
                ++result_.stats.injected;
                deliver_later(actor, endpoint(a.target), std::move(d));
                break;
            }
            case ActionKind::Drop:
                drops_.push_back(DropRule{actor, endpoint(a.target), a.count});
                break;
        }
    }

    void app_active(const UserId& host) {
        std::vector<std::size_t> ready;
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            const auto& inst = *instances_[i];
            if (inst.live && inst.host == host &&
                inst.waiting_on == static_cast<std::int32_t>(recipes::RecipeEvent::AppActive)) {
                ready.push_back(i);
            }
        }
        for (auto i : ready) {
            if (!instances_[i]->live) continue;
            instances_[i]->waiting_on.reset();
            resume(i);
        }
    }

    void spawn(const UserId& host, const UserId& owner, Bytes bytecode) {
        result_.recipes.push_back(RecipeRecord{host, owner, now_, std::nullopt, recipes::VmStatus::Ready,
                                               recipes::KillReason::None, 0, {}});
        instances_.push_back(std::make_unique<Instance>(
            Instance{result_.recipes.size() - 1, host, owner, recipes::Vm(std::move(bytecode)), true, std::nullopt}));
        resume(instances_.size() - 1);
    }

    void resume(std::size_t index) {
        auto& inst = *instances_[index];
        if (!inst.live) return;
        Bridge bridge(*this, index);
        const auto yield = inst.vm.run(bridge);
        switch (yield.status) {
            case recipes::VmStatus::Sleeping:
                schedule(now_ + yield.sleep_ms, [this, index] { resume(index); });
                break;
            case recipes::VmStatus::Waiting:
                inst.waiting_on = yield.event;
                break;
            default:
                retire(index);
                break;
        }
    }

    void retire(std::size_t index) {
        auto& inst = *instances_[index];
        inst.live = false;
        auto& rec = result_.recipes[inst.record];
        rec.ended = now_;
        rec.status = inst.vm.status();
        rec.reason = inst.vm.kill_reason();
        rec.instructions = inst.vm.instructions_executed();
    }

    RunResult finish() {
        for (const auto& inst : instances_) {
            if (!inst->live) continue;
            auto& rec = result_.recipes[inst->record];
            rec.status = inst->vm.status();
            rec.instructions = inst->vm.instructions_executed();
        }
        for (std::size_t i = 0; i < clients_.size(); ++i) {
            auto& summary = summaries_[i];
            summary.inbox = clients_[i].inbox();
            summary.history = clients_[i].history();
            summary.decode_failures = clients_[i].decode_failures();
            result_.deniable_backlog[summary.id] = server_.deniable_queue(summary.id).size();
        }
        result_.clients = std::move(summaries_);
        result_.forwards = server_.forwards();
        result_.server = server_.stats();
        return std::move(result_);
    }

    const Scenario& sc_;
    Prng root_;
    server::Server server_;
    Prng adversary_;
    std::vector<client::Client> clients_;
    std::vector<ClientSummary> summaries_;
    std::map<UserId, std::size_t> index_;

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    SimTime now_ = 0;

    std::vector<DropRule> drops_;
    std::vector<std::unique_ptr<Instance>> instances_;
    std::map<std::pair<UserId, UserId>, std::map<std::int32_t, std::int32_t>> stores_;
    std::map<std::pair<UserId, UserId>, Prng> recipe_rng_;
    std::map<UserId, std::int32_t> last_key_press_;

    RunResult result_;
};

}  // namespace

RunResult run(const Scenario& scenario) { return run(scenario, scenario.seed); }

RunResult run(const Scenario& scenario, std::uint64_t seed) {
    validate(scenario);
    Simulation sim(scenario, seed);
    return sim.execute();
}

}  // namespace denim::sim
