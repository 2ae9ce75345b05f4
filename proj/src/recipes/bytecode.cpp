#include "denim/recipes/bytecode.hpp"

#include <array>
#include <cstdio>
#include <vector>

namespace denim::recipes {
namespace {

constexpr std::array<BuiltinInfo, kBuiltinCount> kBuiltins{{
    {Builtin::Wait, "wait", 1},
    {Builtin::Sleep, "sleep", 1},
    {Builtin::Usleep, "usleep", 1},
    {Builtin::Send, "send", 1},
    {Builtin::Gettime, "gettime", 0},
    {Builtin::LastKbTime, "last_kb_time", 0},
    {Builtin::Rnd, "rnd", 2},
    {Builtin::Store, "store", 2},
    {Builtin::Load, "load", 1},
    {Builtin::Reset, "reset", 0},
}};

constexpr std::array<std::uint8_t, 4> kMagic{'D', 'N', 'R', 'C'};

std::int32_t read_i32(const std::uint8_t* p) {
    return static_cast<std::int32_t>(std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                                     (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24));
}

}  // namespace

std::optional<std::size_t> operand_size(std::uint8_t opcode) noexcept {
    switch (static_cast<Op>(opcode)) {
        case Op::Push: return 4;
        case Op::Jmp:
        case Op::Jz: return 2;
        case Op::Load:
        case Op::Store:
        case Op::Call: return 1;
        default: return opcode < kOpCount ? std::optional<std::size_t>(0) : std::nullopt;
    }
}

const char* op_name(Op op) noexcept {
    switch (op) {
        case Op::Halt: return "HALT";
        case Op::Push: return "PUSH";
        case Op::Pop: return "POP";
        case Op::Load: return "LOAD";
        case Op::Store: return "STORE";
        case Op::Add: return "ADD";
        case Op::Sub: return "SUB";
        case Op::Mul: return "MUL";
        case Op::Div: return "DIV";
        case Op::Mod: return "MOD";
        case Op::Neg: return "NEG";
        case Op::Not: return "NOT";
        case Op::Eq: return "EQ";
        case Op::Ne: return "NE";
        case Op::Lt: return "LT";
        case Op::Le: return "LE";
        case Op::Gt: return "GT";
        case Op::Ge: return "GE";
        case Op::Jmp: return "JMP";
        case Op::Jz: return "JZ";
        case Op::Call: return "CALL";
    }
    return "???";
}

const BuiltinInfo* find_builtin(std::string_view name) noexcept {
    for (const auto& info : kBuiltins) {
        if (info.name == name) return &info;
    }
    return nullptr;
}

const BuiltinInfo& builtin_info(Builtin id) noexcept { return kBuiltins[static_cast<std::size_t>(id)]; }

std::optional<std::string> verify(std::span<const std::uint8_t> code) {
    if (code.size() > kMaxBytecodeSize) {
        return "bytecode is " + std::to_string(code.size()) + " bytes, budget is " +
               std::to_string(kMaxBytecodeSize);
    }
    std::vector<bool> boundary(code.size() + 1, false);
    std::vector<std::size_t> targets;
    std::size_t pc = 0;
    while (pc < code.size()) {
        boundary[pc] = true;
        const auto width = operand_size(code[pc]);
        if (!width) return "unknown opcode at " + std::to_string(pc);
        if (pc + 1 + *width > code.size()) return "truncated operand at " + std::to_string(pc);
        const auto op = static_cast<Op>(code[pc]);
        if (op == Op::Jmp || op == Op::Jz) {
            targets.push_back(std::size_t{code[pc + 1]} | (std::size_t{code[pc + 2]} << 8));
        } else if (op == Op::Call && code[pc + 1] >= kBuiltinCount) {
            return "unknown builtin id at " + std::to_string(pc);
        }
        pc += 1 + *width;
    }
    boundary[code.size()] = true;
    for (auto t : targets) {
        if (t > code.size() || !boundary[t]) return "jump target " + std::to_string(t) + " out of bounds";
    }
    return std::nullopt;
}

std::string disassemble(std::span<const std::uint8_t> code) {
    std::string out;
    char line[96];
    std::size_t pc = 0;
    while (pc < code.size()) {
        const auto width = operand_size(code[pc]);
        if (!width || pc + 1 + *width > code.size()) {
            std::snprintf(line, sizeof line, "%04zu  .byte 0x%02x\n", pc, code[pc]);
            out += line;
            ++pc;
            continue;
        }
        const auto op = static_cast<Op>(code[pc]);
        const std::uint8_t* arg = code.data() + pc + 1;
        switch (op) {
            case Op::Push:
                std::snprintf(line, sizeof line, "%04zu  PUSH %d\n", pc, read_i32(arg));
                break;
            case Op::Jmp:
            case Op::Jz:
                std::snprintf(line, sizeof line, "%04zu  %s %04u\n", pc, op_name(op),
                              unsigned{arg[0]} | (unsigned{arg[1]} << 8));
                break;
            case Op::Load:
            case Op::Store:
                std::snprintf(line, sizeof line, "%04zu  %s %u\n", pc, op_name(op), unsigned{arg[0]});
                break;
            case Op::Call:
                if (arg[0] < kBuiltinCount) {
                    const auto& info = builtin_info(static_cast<Builtin>(arg[0]));
                    std::snprintf(line, sizeof line, "%04zu  CALL %.*s/%d\n", pc,
                                  static_cast<int>(info.name.size()), info.name.data(), info.arity);
                } else {
                    std::snprintf(line, sizeof line, "%04zu  CALL #%u\n", pc, unsigned{arg[0]});
                }
                break;
            default:
                std::snprintf(line, sizeof line, "%04zu  %s\n", pc, op_name(op));
                break;
        }
        out += line;
        pc += 1 + *width;
    }
    return out;
}

Bytes to_file(std::span<const std::uint8_t> code) {
    Bytes out(kMagic.begin(), kMagic.end());
    out.push_back(kFileVersion);
    out.insert(out.end(), code.begin(), code.end());
    return out;
}

Bytes from_file(std::span<const std::uint8_t> file) {
    if (file.size() < kMagic.size() + 1 || !std::equal(kMagic.begin(), kMagic.end(), file.begin())) {
        throw Error(Errc::DecodeFailure, "not a compiled recipe (bad magic)");
    }
    if (file[kMagic.size()] != kFileVersion) {
        throw Error(Errc::DecodeFailure, "unsupported recipe file version " +
                                             std::to_string(file[kMagic.size()]));
    }
    Bytes code(file.begin() + kMagic.size() + 1, file.end());
    if (auto problem = verify(code)) throw Error(Errc::DecodeFailure, *problem);
    return code;
}

}  // namespace denim::recipes
