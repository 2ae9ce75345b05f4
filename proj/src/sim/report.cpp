#include "denim/sim/report.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace denim::sim {

std::size_t baseline_size(std::size_t payload) {
    return payload <= cipher::kAsymPlainMax ? kBaselineOneChunk : kBaselineTwoChunks;
}

std::size_t message_overhead(std::size_t payload) { return wire::kMessageWireSize - baseline_size(payload); }

std::size_t dummy_overhead(std::size_t p, std::size_t n) {
    return p > n ? (p - n) * wire::kMessageWireSize : 0;
}

OverheadReport build_report(const RunResult& result, const server::ServerConfig& server) {
    OverheadReport r;
    for (const auto& c : result.clients) {
        for (const auto& op : c.history) {
            if (op.status != client::OpStatus::Sent) continue;
            for (auto payload : op.message_payloads) {
                MessageRow row;
                row.time = op.completed;
                row.sender = c.id;
                row.receiver = op.receiver;
                row.kind = op.kind;
                row.payload = payload;
                row.baseline = baseline_size(payload);
                row.overhead = row.wire - row.baseline;
                r.message_overhead += row.overhead;
                r.messages.push_back(row);
            }
        }
    }
    std::stable_sort(r.messages.begin(), r.messages.end(),
                     [](const MessageRow& a, const MessageRow& b) { return a.time < b.time; });

    for (const auto& f : result.forwards) {
        ForwardRow row;
        row.time = f.time;
        row.receiver = f.receiver;
        row.carried = f.carried;
        row.p = f.p_value;
        row.n = f.deniable_delivered;
        row.dummies = row.p > row.n ? row.p - row.n : 0;
        row.dummy_overhead = dummy_overhead(row.p, row.n);
        row.latency_delta = static_cast<SimTime>(row.p) * server.spacing;
        r.piggyback_overhead += row.dummy_overhead;
        r.total_latency_delta += row.latency_delta;
        r.max_latency_delta = std::max(r.max_latency_delta, row.latency_delta);
        if (f.carried == wire::MessageType::Dummy) ++r.decoy_dummies;
        r.forwards.push_back(row);
    }
    r.decoy_dummy_overhead = r.decoy_dummies * wire::kMessageWireSize;

    for (const auto& ev : result.trace) {
        ++r.datagrams;
        r.wire_bytes += ev.size;
        r.app_bytes += ev.size - wire::kTransportOverhead;
        switch (ev.kind) {
            case wire::DatagramKind::Message: ++r.message_datagrams; break;
            case wire::DatagramKind::KeyRequest: ++r.key_requests; break;
            case wire::DatagramKind::KeyResponse: ++r.key_responses; break;
        }
    }
    r.key_lookup_overhead = r.key_requests * (wire::kKeyRequestWireSize - kBaselineKeyRequest) +
                            r.key_responses * (wire::kKeyResponseWireSize - kBaselineKeyResponse);
    r.total_overhead = r.message_overhead + r.piggyback_overhead + r.decoy_dummy_overhead + r.key_lookup_overhead;
    return r;
}

OverheadReport overhead_report(const AdversaryView& view, const Scenario& scenario) {
    const RunResult result = run(scenario);
    const AdversaryView replay = adversary_view(result.trace);
    if (auto d = check_indistinguishable(view, replay)) {
        throw Error(Errc::ValidationError, "trace does not match scenario: first divergence at event " +
                                               std::to_string(d->index) + " (" + d->field + ")");
    }
    return build_report(result, scenario.server);
}

void write_report(std::ostream& out, const OverheadReport& r) {
    out << "messages\n";
    out << std::setw(10) << "time" << std::setw(18) << "sender" << std::setw(18) << "receiver" << std::setw(10)
        << "kind" << std::setw(9) << "payload" << std::setw(7) << "wire" << std::setw(10) << "baseline"
        << std::setw(10) << "overhead" << '\n';
    for (const auto& m : r.messages) {
        out << std::setw(10) << m.time << std::setw(18) << m.sender.name() << std::setw(18) << m.receiver.name()
            << std::setw(10) << client::to_string(m.kind) << std::setw(9) << m.payload << std::setw(7) << m.wire
            << std::setw(10) << m.baseline << std::setw(10) << m.overhead << '\n';
    }
    out << "\nforwards\n";
    out << std::setw(10) << "time" << std::setw(18) << "receiver" << std::setw(10) << "carried" << std::setw(5)
        << "p" << std::setw(5) << "n" << std::setw(9) << "dummies" << std::setw(16) << "dummy_overhead"
        << std::setw(10) << "latency" << '\n';
    for (const auto& f : r.forwards) {
        out << std::setw(10) << f.time << std::setw(18) << f.receiver.name() << std::setw(10)
            << wire::to_string(f.carried) << std::setw(5) << f.p << std::setw(5) << f.n << std::setw(9) << f.dummies
            << std::setw(16) << f.dummy_overhead << std::setw(10) << f.latency_delta << '\n';
    }
    out << "\ndatagrams=" << r.datagrams << '\n'
        << "wire_bytes=" << r.wire_bytes << '\n'
        << "app_bytes=" << r.app_bytes << '\n'
        << "message_datagrams=" << r.message_datagrams << '\n'
        << "key_requests=" << r.key_requests << '\n'
        << "key_responses=" << r.key_responses << '\n'
        << "messages_sent=" << r.messages.size() << '\n'
        << "forwards=" << r.forwards.size() << '\n'
        << "decoy_dummies=" << r.decoy_dummies << '\n'
        << "message_overhead=" << r.message_overhead << '\n'
        << "piggyback_overhead=" << r.piggyback_overhead << '\n'
        << "decoy_dummy_overhead=" << r.decoy_dummy_overhead << '\n'
        << "key_lookup_overhead=" << r.key_lookup_overhead << '\n'
        << "total_overhead=" << r.total_overhead << '\n'
        << "max_latency_delta_ms=" << r.max_latency_delta << '\n'
        << "total_latency_delta_ms=" << r.total_latency_delta << '\n';
}

std::string format_report(const OverheadReport& r) {
    std::ostringstream out;
    write_report(out, r);
    return out.str();
}

}  // namespace denim::sim
