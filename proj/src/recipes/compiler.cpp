#include "denim/recipes/compiler.hpp"

namespace denim::recipes {

std::optional<std::int32_t> find_constant(std::string_view name) noexcept {
    if (name == "APP_ACTIVE") return static_cast<std::int32_t>(RecipeEvent::AppActive);
    return std::nullopt;
}

namespace {

class CodeGen {
public:
    CompileResult run(const Program& program) {
        for (const auto& stmt : program.body) statement(*stmt);
        emit(Op::Halt);
        if (out_.code.size() > kMaxBytecodeSize) {
            throw Error(Errc::SizeExceeded, "recipe compiles to " + std::to_string(out_.code.size()) +
                                                " bytes; budget is " +
                                                std::to_string(kMaxBytecodeSize));
        }
        return std::move(out_);
    }

private:
    void emit(Op op) { out_.code.push_back(static_cast<std::uint8_t>(op)); }

    void emit_u8(Op op, std::uint8_t arg) {
        emit(op);
        out_.code.push_back(arg);
    }

    void emit_push(std::int32_t value) {
        emit(Op::Push);
        const auto u = static_cast<std::uint32_t>(value);
        for (int k = 0; k < 4; ++k) out_.code.push_back(static_cast<std::uint8_t>(u >> (8 * k)));
    }

    /// Emits a jump with a placeholder target; returns the operand offset.
    std::size_t emit_jump(Op op) {
        emit(op);
        out_.code.push_back(0);
        out_.code.push_back(0);
        return out_.code.size() - 2;
    }

    void patch(std::size_t operand, std::size_t target) {
        // Targets beyond 16 bits would already blow the size budget; the final
        // size check reports that case.
        out_.code[operand] = static_cast<std::uint8_t>(target & 0xFF);
        out_.code[operand + 1] = static_cast<std::uint8_t>((target >> 8) & 0xFF);
    }

    void emit_jump_to(Op op, std::size_t target) { patch(emit_jump(op), target); }

    std::uint8_t slot_of(const std::string& name, SourcePos pos) const {
        auto it = out_.locals.find(name);
        if (it == out_.locals.end()) {
            throw CompileError(Errc::SyntaxError, pos.line, pos.col, "undeclared variable '" + name + "'");
        }
        return it->second;
    }

    void statement(const Stmt& stmt) {
        switch (stmt.kind) {
            case Stmt::Kind::Decl: {
                if (out_.locals.contains(stmt.name)) {
                    throw CompileError(Errc::SyntaxError, stmt.pos.line, stmt.pos.col,
                                       "redeclaration of '" + stmt.name + "'");
                }
                if (find_builtin(stmt.name) || find_constant(stmt.name)) {
                    throw CompileError(Errc::SyntaxError, stmt.pos.line, stmt.pos.col,
                                       "'" + stmt.name + "' is reserved");
                }
                if (out_.locals.size() >= kMaxLocals) {
                    throw CompileError(Errc::SizeExceeded, stmt.pos.line, stmt.pos.col, "too many variables");
                }
                // The initializer may not refer to the variable being declared.
                if (stmt.expr) expression(*stmt.expr);
                else emit_push(0);
                const auto slot = static_cast<std::uint8_t>(out_.locals.size());
                out_.locals.emplace(stmt.name, slot);
                emit_u8(Op::Store, slot);
                return;
            }
            case Stmt::Kind::Assign: {
                const auto slot = slot_of(stmt.name, stmt.pos);
                expression(*stmt.expr);
                emit_u8(Op::Store, slot);
                return;
            }
            case Stmt::Kind::Expr:
                expression(*stmt.expr);
                emit(Op::Pop);
                return;
            case Stmt::Kind::Block:
                for (const auto& s : stmt.body) statement(*s);
                return;
            case Stmt::Kind::If: {
                expression(*stmt.expr);
                const auto to_else = emit_jump(Op::Jz);
                for (const auto& s : stmt.body) statement(*s);
                if (stmt.else_body.empty()) {
                    patch(to_else, out_.code.size());
                    return;
                }
                const auto to_end = emit_jump(Op::Jmp);
                patch(to_else, out_.code.size());
                for (const auto& s : stmt.else_body) statement(*s);
                patch(to_end, out_.code.size());
                return;
            }
            case Stmt::Kind::While: {
                const auto top = out_.code.size();
                expression(*stmt.expr);
                const auto to_end = emit_jump(Op::Jz);
                for (const auto& s : stmt.body) statement(*s);
                emit_jump_to(Op::Jmp, top);
                patch(to_end, out_.code.size());
                return;
            }
        }
    }

    void expression(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Number:
                emit_push(e.value);
                return;
            case Expr::Kind::Var:
                if (!out_.locals.contains(e.name)) {
                    if (auto constant = find_constant(e.name)) {
                        emit_push(*constant);
                        return;
                    }
                }
                emit_u8(Op::Load, slot_of(e.name, e.pos));
                return;
            case Expr::Kind::Unary:
                expression(*e.operands[0]);
                emit(e.unary == UnaryOp::Neg ? Op::Neg : Op::Not);
                return;
            case Expr::Kind::Binary:
                expression(*e.operands[0]);
                expression(*e.operands[1]);
                emit(binary_op(e.binary));
                return;
            case Expr::Kind::Call: {
                const BuiltinInfo* info = find_builtin(e.name);
                if (!info) {
                    throw CompileError(Errc::UnknownBuiltin, e.pos.line, e.pos.col,
                                       "unknown built-in '" + e.name + "'");
                }
                if (static_cast<int>(e.operands.size()) != info->arity) {
                    throw CompileError(Errc::SyntaxError, e.pos.line, e.pos.col,
                                       "'" + e.name + "' takes " + std::to_string(info->arity) +
                                           " argument(s), got " + std::to_string(e.operands.size()));
                }
                for (const auto& arg : e.operands) expression(*arg);
                emit_u8(Op::Call, static_cast<std::uint8_t>(info->id));
                return;
            }
        }
    }

    static Op binary_op(BinaryOp op) {
        switch (op) {
            case BinaryOp::Add: return Op::Add;
            case BinaryOp::Sub: return Op::Sub;
            case BinaryOp::Mul: return Op::Mul;
            case BinaryOp::Div: return Op::Div;
            case BinaryOp::Mod: return Op::Mod;
            case BinaryOp::Eq: return Op::Eq;
            case BinaryOp::Ne: return Op::Ne;
            case BinaryOp::Lt: return Op::Lt;
            case BinaryOp::Le: return Op::Le;
            case BinaryOp::Gt: return Op::Gt;
            case BinaryOp::Ge: return Op::Ge;
        }
        return Op::Halt;
    }

    CompileResult out_;
};

}  // namespace

CompileResult compile(const Program& program) { return CodeGen().run(program); }

Bytes compile_source(std::string_view source) { return compile(parse(source)).code; }

}  // namespace denim::recipes
