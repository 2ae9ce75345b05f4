#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "denim/wire/ids.hpp"

namespace denim::recipes {

/// A recipe travels in one payload chunk.
inline constexpr std::size_t kMaxBytecodeSize = 446;
inline constexpr std::size_t kMaxLocals = 256;

// Encoding: 1-byte opcodes. PUSH carries a 4-byte little-endian value, jumps a
// 2-byte little-endian absolute target, LOAD/STORE/CALL a 1-byte index.
enum class Op : std::uint8_t {
    Halt = 0x00,
    Push = 0x01,
    Pop = 0x02,
    Load = 0x03,
    Store = 0x04,
    Add = 0x05,
    Sub = 0x06,
    Mul = 0x07,
    Div = 0x08,
    Mod = 0x09,
    Neg = 0x0A,
    Not = 0x0B,
    Eq = 0x0C,
    Ne = 0x0D,
    Lt = 0x0E,
    Le = 0x0F,
    Gt = 0x10,
    Ge = 0x11,
    Jmp = 0x12,
    Jz = 0x13,
    Call = 0x14,
};

inline constexpr std::uint8_t kOpCount = 0x15;

/// Immediate operand width for an opcode; nullopt for unknown opcodes.
std::optional<std::size_t> operand_size(std::uint8_t opcode) noexcept;
const char* op_name(Op op) noexcept;

enum class Builtin : std::uint8_t {
    Wait = 0,
    Sleep = 1,
    Usleep = 2,
    Send = 3,
    Gettime = 4,
    LastKbTime = 5,
    Rnd = 6,
    Store = 7,
    Load = 8,
    Reset = 9,
};

inline constexpr std::uint8_t kBuiltinCount = 10;

struct BuiltinInfo {
    Builtin id;
    std::string_view name;
    int arity;
};

const BuiltinInfo* find_builtin(std::string_view name) noexcept;
const BuiltinInfo& builtin_info(Builtin id) noexcept;

/// Events a recipe can wait on. Further kinds are reserved.
enum class RecipeEvent : std::int32_t { AppActive = 1 };

/// Structural check: size budget, known opcodes and builtins, complete
/// operands, jump targets on instruction boundaries. Returns a diagnostic on
/// failure, nullopt when the code is well formed.
std::optional<std::string> verify(std::span<const std::uint8_t> code);

/// One instruction per line: "<offset>  <MNEMONIC> [operand]".
std::string disassemble(std::span<const std::uint8_t> code);

// Compiled recipe file: 4-byte magic "DNRC", 1-byte version, bytecode.
inline constexpr std::uint8_t kFileVersion = 1;
Bytes to_file(std::span<const std::uint8_t> code);
/// Throws Error(DecodeFailure) on bad magic/version or malformed code.
Bytes from_file(std::span<const std::uint8_t> file);

}  // namespace denim::recipes
