// denim: run scenarios, compare adversary views, report overhead, build recipes.
//   exit 0 success, 1 views differ (compare), 2 input error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "denim/recipes/bytecode.hpp"
#include "denim/recipes/compiler.hpp"
#include "denim/sim/report.hpp"
#include "denim/sim/scenario.hpp"
#include "denim/sim/simulator.hpp"
#include "denim/sim/trace.hpp"

using namespace denim;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kInputError = 2;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ValidationError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_bytes(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::ValidationError, "cannot write " + path);
    out << data;
    if (!out) throw Error(Errc::ValidationError, "cannot write " + path);
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& trace_out) {
    auto sc = sim::load_scenario(scenario_path);
    if (seed) sc.seed = *seed;
    const auto result = sim::run(sc);
    const auto text = sim::format_trace(sim::adversary_view(result.trace));
    if (trace_out.empty()) {
        std::cout << text;
    } else {
        write_bytes(trace_out, text);
    }
    return kOk;
}

const char* kind_of(std::size_t size) {
    auto kind = wire::classify_wire_size(size);
    if (!kind) return "?";
    switch (*kind) {
        case wire::DatagramKind::Message: return "MESSAGE";
        case wire::DatagramKind::KeyRequest: return "KEY_REQUEST";
        case wire::DatagramKind::KeyResponse: return "KEY_RESPONSE";
    }
    return "?";
}

int cmd_view(const std::string& trace_path) {
    const auto view = sim::load_trace(trace_path);
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_user;  // sent, received
    std::cout << std::setw(10) << "time" << std::setw(18) << "src" << std::setw(18) << "dst" << std::setw(7)
              << "size" << "  class\n";
    for (const auto& ev : view) {
        std::cout << std::setw(10) << ev.time << std::setw(18) << ev.src << std::setw(18) << ev.dst << std::setw(7)
                  << ev.size << "  " << kind_of(ev.size) << '\n';
        ++per_user[ev.src].first;
        ++per_user[ev.dst].second;
    }
    std::cout << "\nendpoint           sent  received\n";
    for (const auto& [name, counts] : per_user) {
        std::cout << std::left << std::setw(16) << name << std::right << std::setw(7) << counts.first
                  << std::setw(10) << counts.second << '\n';
    }
    return kOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
    const auto a = sim::load_trace(a_path);
    const auto b = sim::load_trace(b_path);
    const auto d = sim::check_indistinguishable(a, b);
    if (!d) {
        std::cout << "indistinguishable: " << a.size() << " events\n";
        return kOk;
    }
    std::cout << "divergence at event " << d->index << ": " << d->field << '\n';
    auto show = [&](const char* label, const sim::AdversaryView& v) {
        std::cout << "  " << label << ": ";
        if (d->index < v.size()) {
            const auto& ev = v[d->index];
            std::cout << ev.time << '\t' << ev.src << '\t' << ev.dst << '\t' << ev.size << '\n';
        } else {
            std::cout << "(end of trace)\n";
        }
    };
    show(a_path.c_str(), a);
    show(b_path.c_str(), b);
    return kMismatch;
}

int cmd_report(const std::string& trace_path, const std::string& scenario_path) {
    const auto view = sim::load_trace(trace_path);
    const auto sc = sim::load_scenario(scenario_path);
    sim::write_report(std::cout, sim::overhead_report(view, sc));
    return kOk;
}

int cmd_compile(const std::string& source_path, const std::string& out_path) {
    const auto code = recipes::compile_source(read_text(source_path));
    const auto file = recipes::to_file(code);
    const std::string data(file.begin(), file.end());
    if (out_path.empty()) {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
        std::cerr << code.size() << " bytes\n";
    } else {
        write_bytes(out_path, data);
        std::cout << code.size() << " bytes\n";
    }
    return kOk;
}

int cmd_disasm(const std::string& path) {
    const auto raw = read_text(path);
    const auto code = recipes::from_file(Bytes(raw.begin(), raw.end()));
    std::cout << recipes::disassemble(code);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DenIM deniable messaging simulator"};
    app.require_subcommand(1);

    std::string scenario_path, trace_path, trace_out, other_path, out_path;
    std::optional<std::uint64_t> seed;
    std::function<int()> action;

    auto* run = app.add_subcommand("run", "Run a scenario and write its adversary trace");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--trace-out", trace_out, "Trace file (default: stdout)");
    run->callback([&] { action = [&] { return cmd_run(scenario_path, seed, trace_out); }; });

    auto* view = app.add_subcommand("view", "Print a trace as the adversary sees it");
    view->add_option("trace", trace_path, "Trace file")->required();
    view->callback([&] { action = [&] { return cmd_view(trace_path); }; });

    auto* compare = app.add_subcommand("compare", "Check two traces for indistinguishability");
    compare->add_option("trace_a", trace_path, "First trace")->required();
    compare->add_option("trace_b", other_path, "Second trace")->required();
    compare->callback([&] { action = [&] { return cmd_compare(trace_path, other_path); }; });

    auto* report = app.add_subcommand("report", "Bandwidth and latency overhead of a run");
    report->add_option("trace", trace_path, "Trace file")->required();
    report->add_option("scenario", scenario_path, "Scenario that produced it")->required();
    report->callback([&] { action = [&] { return cmd_report(trace_path, scenario_path); }; });

    auto* compile = app.add_subcommand("compile-recipe", "Compile recipe source to bytecode");
    compile->add_option("source", scenario_path, "Recipe source")->required();
    compile->add_option("--out", out_path, "Bytecode file (default: stdout)");
    compile->callback([&] { action = [&] { return cmd_compile(scenario_path, out_path); }; });

    auto* disasm = app.add_subcommand("disasm", "Disassemble a bytecode file");
    disasm->add_option("bytecode", trace_path, "Bytecode file")->required();
    disasm->callback([&] { action = [&] { return cmd_disasm(trace_path); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kInputError;
}
