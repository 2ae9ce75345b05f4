#include "denim/sim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "denim/recipes/compiler.hpp"
#include "denim/wire/message.hpp"

namespace denim::sim {

ScenarioError::ScenarioError(int line, const std::string& message)
    : Error(Errc::ValidationError, line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

const char* to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::SendRegular: return "send_regular";
        case ActionKind::SendDeniable: return "send_deniable";
        case ActionKind::Block: return "block";
        case ActionKind::SendRecipe: return "send_recipe";
        case ActionKind::Offline: return "offline";
        case ActionKind::Online: return "online";
        case ActionKind::AppActive: return "app_active";
        case ActionKind::KeyPress: return "key_press";
        case ActionKind::Inject: return "inject";
        case ActionKind::Drop: return "drop";
    }
    return "?";
}

namespace {

struct Word {
    std::string text;
    bool quoted = false;
};

std::vector<Word> split_words(std::string_view line, int lineno) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        Word w;
        if (line[i] == '"') {
            w.quoted = true;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char c = line[i++];
                if (c == '"') {
                    closed = true;
                    break;
                }
                if (c == '\\') {
                    if (i >= line.size()) break;
                    char e = line[i++];
                    switch (e) {
                        case 'n': w.text.push_back('\n'); break;
                        case 't': w.text.push_back('\t'); break;
                        case '\\': w.text.push_back('\\'); break;
                        case '"': w.text.push_back('"'); break;
                        default: throw ScenarioError(lineno, std::string("unknown escape \\") + e);
                    }
                } else {
                    w.text.push_back(c);
                }
            }
            if (!closed) throw ScenarioError(lineno, "unterminated string");
        } else {
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) w.text.push_back(line[i++]);
        }
        words.push_back(std::move(w));
    }
    return words;
}

template <typename Int>
Int parse_int(std::string_view s, int lineno, const char* what) {
    Int value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ScenarioError(lineno, std::string("invalid ") + what + " '" + std::string(s) + "'");
    }
    return value;
}

std::map<std::string, std::string> parse_options(const std::vector<Word>& words, std::size_t from,
                                                 int lineno) {
    std::map<std::string, std::string> opts;
    for (std::size_t i = from; i < words.size(); ++i) {
        const auto eq = words[i].text.find('=');
        if (words[i].quoted || eq == std::string::npos) {
            throw ScenarioError(lineno, "expected key=value, got '" + words[i].text + "'");
        }
        opts[words[i].text.substr(0, eq)] = words[i].text.substr(eq + 1);
    }
    return opts;
}

void expect_keyword(const std::vector<Word>& w, std::size_t i, std::string_view kw, int lineno) {
    if (i >= w.size() || w[i].quoted || w[i].text != kw) {
        throw ScenarioError(lineno, "expected '" + std::string(kw) + "'");
    }
}

void expect_count(const std::vector<Word>& w, std::size_t n, int lineno, const char* form) {
    if (w.size() != n) throw ScenarioError(lineno, std::string("expected: ") + form);
}

Bytes text_payload(const Word& w, int lineno) {
    if (w.quoted) return Bytes(w.text.begin(), w.text.end());
    if (w.text.rfind("bytes=", 0) == 0) {
        const auto n = parse_int<std::size_t>(std::string_view(w.text).substr(6), lineno, "byte count");
        Bytes out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>('a' + i % 26);
        return out;
    }
    throw ScenarioError(lineno, "expected quoted text or bytes=<n>");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ValidationError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Action parse_action(const std::vector<Word>& w, int lineno, const std::filesystem::path& base_dir) {
    if (w.size() < 3) throw ScenarioError(lineno, "expected: at <ms> <action> ...");
    Action a;
    a.line = lineno;
    a.at = parse_int<SimTime>(w[1].text, lineno, "time");
    if (a.at < 0) throw ScenarioError(lineno, "negative time");
    const std::string& verb = w[2].text;

    if (verb == "send_regular") {
        expect_count(w, 6, lineno, "at <ms> send_regular <from> <to> \"<text>\"");
        a.kind = ActionKind::SendRegular;
        a.actor = w[3].text;
        a.target = w[4].text;
        a.payload = text_payload(w[5], lineno);
    } else if (verb == "send_deniable" || verb == "send_recipe") {
        const bool recipe = verb == "send_recipe";
        expect_count(w, 9, lineno, recipe ? "at <ms> send_recipe <from> via <decoy> to <host> \"<source>\""
                                          : "at <ms> send_deniable <from> via <decoy> to <to> \"<text>\"");
        expect_keyword(w, 4, "via", lineno);
        expect_keyword(w, 6, "to", lineno);
        a.kind = recipe ? ActionKind::SendRecipe : ActionKind::SendDeniable;
        a.actor = w[3].text;
        a.decoy = w[5].text;
        a.target = w[7].text;
        if (!recipe) {
            a.payload = text_payload(w[8], lineno);
        } else {
            if (w[8].quoted) {
                a.recipe_source = w[8].text;
            } else if (!w[8].text.empty() && w[8].text[0] == '@') {
                a.recipe_source = read_file(base_dir / w[8].text.substr(1));
            } else {
                throw ScenarioError(lineno, "expected quoted recipe source or @path");
            }
            try {
                a.payload = recipes::compile_source(a.recipe_source);
            } catch (const Error& e) {
                throw ScenarioError(lineno, std::string("recipe: ") + e.what());
            }
        }
    } else if (verb == "block") {
        expect_count(w, 8, lineno, "at <ms> block <who> via <decoy> target <blocked>");
        expect_keyword(w, 4, "via", lineno);
        expect_keyword(w, 6, "target", lineno);
        a.kind = ActionKind::Block;
        a.actor = w[3].text;
        a.decoy = w[5].text;
        a.target = w[7].text;
    } else if (verb == "offline" || verb == "online" || verb == "app_active" || verb == "key_press") {
        expect_count(w, 4, lineno, ("at <ms> " + verb + " <id>").c_str());
        a.kind = verb == "offline"      ? ActionKind::Offline
                 : verb == "online"     ? ActionKind::Online
                 : verb == "app_active" ? ActionKind::AppActive
                                        : ActionKind::KeyPress;
        a.actor = w[3].text;
    } else if (verb == "inject") {
        expect_count(w, 6, lineno, "at <ms> inject <src> <dst> <size>");
        a.kind = ActionKind::Inject;
        a.actor = w[3].text;
        a.target = w[4].text;
        a.size = parse_int<std::size_t>(w[5].text, lineno, "size");
        if (a.size > 65'535) throw ScenarioError(lineno, "inject size too large");
    } else if (verb == "drop") {
        if (w.size() != 5 && w.size() != 6) throw ScenarioError(lineno, "expected: at <ms> drop <src> <dst> [<count>]");
        a.kind = ActionKind::Drop;
        a.actor = w[3].text;
        a.target = w[4].text;
        if (w.size() == 6) a.count = parse_int<std::size_t>(w[5].text, lineno, "count");
    } else {
        throw ScenarioError(lineno, "unknown action '" + verb + "'");
    }
    return a;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size() && !s.empty()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        if (comma > start) out.push_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    Scenario sc;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto words = split_words(line, lineno);
        if (words.empty() || (!words[0].quoted && words[0].text[0] == '#')) continue;
        const std::string& head = words[0].text;

        if (head == "seed") {
            expect_count(words, 2, lineno, "seed <n>");
            sc.seed = parse_int<std::uint64_t>(words[1].text, lineno, "seed");
        } else if (head == "clock") {
            expect_count(words, 2, lineno, "clock <seconds>");
            sc.network.clock_offset_s = parse_int<std::int64_t>(words[1].text, lineno, "clock");
        } else if (head == "client") {
            if (words.size() < 2) throw ScenarioError(lineno, "expected: client <id> p=<n> ttl=<ms> friends=<id,...>");
            ClientSpec spec;
            spec.name = words[1].text;
            spec.line = lineno;
            for (const auto& [key, value] : parse_options(words, 2, lineno)) {
                if (key == "p") spec.p = parse_int<std::uint32_t>(value, lineno, "p");
                else if (key == "ttl") spec.ttl = parse_int<SimTime>(value, lineno, "ttl");
                else if (key == "friends") spec.friends = split_list(value);
                else throw ScenarioError(lineno, "unknown client option '" + key + "'");
            }
            sc.clients.push_back(std::move(spec));
        } else if (head == "server") {
            for (const auto& [key, value] : parse_options(words, 1, lineno)) {
                if (key == "lookup_delay") sc.server.lookup_delay = parse_int<SimTime>(value, lineno, key.c_str());
                else if (key == "forward_delay") sc.server.forward_delay = parse_int<SimTime>(value, lineno, key.c_str());
                else if (key == "spacing") sc.server.spacing = parse_int<SimTime>(value, lineno, key.c_str());
                else if (key == "queue_cap") sc.server.queue_cap = parse_int<std::size_t>(value, lineno, key.c_str());
                else throw ScenarioError(lineno, "unknown server option '" + key + "'");
            }
        } else if (head == "network") {
            for (const auto& [key, value] : parse_options(words, 1, lineno)) {
                if (key == "latency") sc.network.latency = parse_int<SimTime>(value, lineno, "latency");
                else throw ScenarioError(lineno, "unknown network option '" + key + "'");
            }
        } else if (head == "at") {
            sc.actions.push_back(parse_action(words, lineno, base_dir));
        } else {
            throw ScenarioError(lineno, "unknown directive '" + head + "'");
        }
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path), path.parent_path());
}

void validate(const Scenario& sc) {
    std::map<std::string, const ClientSpec*> declared;
    for (const auto& c : sc.clients) {
        try {
            (void)UserId::from_name(c.name);
        } catch (const Error& e) {
            throw ScenarioError(c.line, e.what());
        }
        if (!declared.emplace(c.name, &c).second) {
            throw ScenarioError(c.line, "client '" + c.name + "' declared twice");
        }
        if (c.ttl <= 0) throw ScenarioError(c.line, "ttl must be positive");
        if (c.p > 10'000) throw ScenarioError(c.line, "p is unreasonably large");
    }
    for (const auto& c : sc.clients) {
        for (const auto& f : c.friends) {
            if (!declared.contains(f)) throw ScenarioError(c.line, "friend '" + f + "' is not a declared client");
            if (f == c.name) throw ScenarioError(c.line, "a client cannot befriend itself");
        }
    }
    if (sc.network.latency < 0 || sc.server.lookup_delay < 0 || sc.server.forward_delay < 0 ||
        sc.server.spacing < 0) {
        throw ScenarioError(0, "delays must be non-negative");
    }

    auto user = [&](const Action& a, const std::string& name, const char* role) -> const ClientSpec& {
        auto it = declared.find(name);
        if (it == declared.end()) {
            throw ScenarioError(a.line, std::string(role) + " '" + name + "' is not a declared client");
        }
        return *it->second;
    };
    auto endpoint = [&](const Action& a, const std::string& name, const char* role) {
        if (name != "SERVER") user(a, name, role);
    };
    auto trusted = [&](const Action& a, const ClientSpec& sender, const std::string& decoy) {
        if (sender.friends.empty()) {
            throw ScenarioError(a.line, "'" + sender.name + "' has no trusted contacts");
        }
        if (std::find(sender.friends.begin(), sender.friends.end(), decoy) == sender.friends.end()) {
            throw ScenarioError(a.line, "decoy '" + decoy + "' is not a trusted contact of '" + sender.name + "'");
        }
    };

    SimTime last = 0;
    for (const auto& a : sc.actions) {
        if (a.at < last) throw ScenarioError(a.line, "action times must be non-decreasing");
        last = a.at;
        switch (a.kind) {
            case ActionKind::SendRegular:
                user(a, a.actor, "sender");
                user(a, a.target, "receiver");
                if (a.actor == a.target) throw ScenarioError(a.line, "cannot message oneself");
                break;
            case ActionKind::SendDeniable:
            case ActionKind::SendRecipe: {
                const auto& sender = user(a, a.actor, "sender");
                user(a, a.decoy, "decoy");
                user(a, a.target, a.kind == ActionKind::SendRecipe ? "host" : "receiver");
                if (a.decoy == a.target) throw ScenarioError(a.line, "decoy cannot be the receiver");
                if (a.actor == a.target || a.actor == a.decoy) {
                    throw ScenarioError(a.line, "sender cannot be its own receiver or decoy");
                }
                trusted(a, sender, a.decoy);
                if (a.kind == ActionKind::SendRecipe && a.payload.size() > recipes::kMaxBytecodeSize) {
                    throw ScenarioError(a.line, "recipe exceeds the 446-byte budget");
                }
                break;
            }
            case ActionKind::Block: {
                const auto& sender = user(a, a.actor, "blocker");
                user(a, a.decoy, "decoy");
                user(a, a.target, "blocked user");
                if (a.actor == a.decoy) throw ScenarioError(a.line, "decoy cannot be the blocker");
                trusted(a, sender, a.decoy);
                break;
            }
            case ActionKind::Offline:
            case ActionKind::Online:
            case ActionKind::AppActive:
            case ActionKind::KeyPress:
                user(a, a.actor, "user");
                break;
            case ActionKind::Inject:
            case ActionKind::Drop:
                endpoint(a, a.actor, "source");
                endpoint(a, a.target, "destination");
                if ((a.actor == "SERVER") == (a.target == "SERVER")) {
                    throw ScenarioError(a.line, "links run between a client and SERVER");
                }
                break;
        }
    }
}

namespace {

std::string quote(std::span<const std::uint8_t> bytes) {
    std::string out = "\"";
    for (auto b : bytes) {
        switch (b) {
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            default: out.push_back(static_cast<char>(b));
        }
    }
    return out + "\"";
}

std::string quote(const std::string& s) {
    return quote(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace

std::string to_text(const Scenario& sc) {
    std::ostringstream out;
    out << "seed " << sc.seed << "\n";
    if (sc.network.clock_offset_s != 0) out << "clock " << sc.network.clock_offset_s << "\n";
    const server::ServerConfig defaults_server;
    const NetworkConfig defaults_net;
    if (sc.server.lookup_delay != defaults_server.lookup_delay || sc.server.forward_delay != defaults_server.forward_delay ||
        sc.server.spacing != defaults_server.spacing || sc.server.queue_cap != defaults_server.queue_cap) {
        out << "server lookup_delay=" << sc.server.lookup_delay << " forward_delay=" << sc.server.forward_delay
            << " spacing=" << sc.server.spacing << " queue_cap=" << sc.server.queue_cap << "\n";
    }
    if (sc.network.latency != defaults_net.latency) out << "network latency=" << sc.network.latency << "\n";
    for (const auto& c : sc.clients) {
        out << "client " << c.name << " p=" << c.p << " ttl=" << c.ttl << " friends=";
        for (std::size_t i = 0; i < c.friends.size(); ++i) out << (i ? "," : "") << c.friends[i];
        out << "\n";
    }
    for (const auto& a : sc.actions) {
        out << "at " << a.at << " ";
        switch (a.kind) {
            case ActionKind::SendRegular:
                out << "send_regular " << a.actor << " " << a.target << " " << quote(a.payload);
                break;
            case ActionKind::SendDeniable:
                out << "send_deniable " << a.actor << " via " << a.decoy << " to " << a.target << " "
                    << quote(a.payload);
                break;
            case ActionKind::SendRecipe:
                out << "send_recipe " << a.actor << " via " << a.decoy << " to " << a.target << " "
                    << quote(a.recipe_source);
                break;
            case ActionKind::Block:
                out << "block " << a.actor << " via " << a.decoy << " target " << a.target;
                break;
            case ActionKind::Offline:
            case ActionKind::Online:
            case ActionKind::AppActive:
            case ActionKind::KeyPress:
                out << to_string(a.kind) << " " << a.actor;
                break;
            case ActionKind::Inject:
                out << "inject " << a.actor << " " << a.target << " " << a.size;
                break;
            case ActionKind::Drop:
                out << "drop " << a.actor << " " << a.target << " " << a.count;
                break;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace denim::sim
