#include "denim/sim/trace.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace denim::sim {

AdversaryView adversary_view(const std::vector<TraceEvent>& trace) {
    AdversaryView view;
    view.reserve(trace.size());
    for (const auto& ev : trace) view.push_back({ev.time, ev.src.name(), ev.dst.name(), ev.size});
    return view;
}

std::optional<Divergence> check_indistinguishable(const AdversaryView& a, const AdversaryView& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].time != b[i].time) return Divergence{i, "time"};
        if (a[i].src != b[i].src) return Divergence{i, "src"};
        if (a[i].dst != b[i].dst) return Divergence{i, "dst"};
        if (a[i].size != b[i].size) return Divergence{i, "size"};
    }
    if (a.size() != b.size()) return Divergence{n, "length"};
    return std::nullopt;
}

void write_trace(std::ostream& out, const AdversaryView& view) {
    for (const auto& ev : view) out << ev.time << '\t' << ev.src << '\t' << ev.dst << '\t' << ev.size << '\n';
}

std::string format_trace(const AdversaryView& view) {
    std::ostringstream out;
    write_trace(out, view);
    return out.str();
}

namespace {

template <typename Int>
Int field_int(std::string_view s, int lineno, const char* what) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::DecodeFailure, "trace line " + std::to_string(lineno) + ": bad " + what);
    }
    return v;
}

}  // namespace

AdversaryView parse_trace(std::string_view text) {
    AdversaryView view;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            throw Error(Errc::DecodeFailure,
                        "trace line " + std::to_string(lineno + 1) + ": missing newline (truncated file?)");
        }
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        for (std::size_t start = 0;;) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 4) {
            throw Error(Errc::DecodeFailure, "trace line " + std::to_string(lineno) + ": expected 4 tab-separated fields");
        }
        ViewEvent ev;
        ev.time = field_int<SimTime>(fields[0], lineno, "time");
        ev.src = std::string(fields[1]);
        ev.dst = std::string(fields[2]);
        ev.size = field_int<std::size_t>(fields[3], lineno, "size");
        if (ev.src.empty() || ev.dst.empty()) {
            throw Error(Errc::DecodeFailure, "trace line " + std::to_string(lineno) + ": empty endpoint");
        }
        if (!view.empty() && ev.time < view.back().time) {
            throw Error(Errc::DecodeFailure, "trace line " + std::to_string(lineno) + ": time goes backwards");
        }
        view.push_back(std::move(ev));
    }
    return view;
}

AdversaryView load_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::DecodeFailure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

}  // namespace denim::sim
