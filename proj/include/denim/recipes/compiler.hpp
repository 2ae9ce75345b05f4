#pragma once

#include <map>
#include <string>
#include <string_view>

#include "denim/recipes/ast.hpp"
#include "denim/recipes/bytecode.hpp"

namespace denim::recipes {

struct CompileResult {
    Bytes code;
    /// Variable name -> local slot, in declaration order.
    std::map<std::string, std::uint8_t> locals;
};

/// Lowers a parsed program. Throws CompileError for semantic errors and
/// Error(SizeExceeded) when the output breaks the 446-byte budget.
CompileResult compile(const Program& program);

/// parse + compile.
Bytes compile_source(std::string_view source);

/// Named constants usable in expressions (APP_ACTIVE).
std::optional<std::int32_t> find_constant(std::string_view name) noexcept;

}  // namespace denim::recipes
