#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "denim/wire/ids.hpp"

namespace denim::recipes {

/// Compile error carrying a 1-based source position.
class CompileError : public Error {
public:
    CompileError(Errc code, int line, int col, const std::string& message);
    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }

private:
    int line_;
    int col_;
};

struct SourcePos {
    int line = 1;
    int col = 1;
};

enum class TokenKind {
    Number,
    Ident,
    KwInt,
    KwIf,
    KwElse,
    KwWhile,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semicolon,
    Comma,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::int32_t value = 0;
    SourcePos pos;
};

std::vector<Token> tokenize(std::string_view source);

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnaryOp { Neg, Not };

struct Expr {
    enum class Kind { Number, Var, Unary, Binary, Call };

    Kind kind = Kind::Number;
    SourcePos pos;
    std::int32_t value = 0;  // Number
    std::string name;        // Var, Call
    BinaryOp binary = BinaryOp::Add;
    UnaryOp unary = UnaryOp::Neg;
    std::vector<std::unique_ptr<Expr>> operands;  // Unary: 1, Binary: 2, Call: args
};

using ExprPtr = std::unique_ptr<Expr>;

struct Stmt {
    enum class Kind { Decl, Assign, Expr, If, While, Block };

    Kind kind = Kind::Expr;
    SourcePos pos;
    std::string name;  // Decl, Assign
    ExprPtr expr;      // Decl initializer (may be null), Assign value, Expr, If/While condition
    std::vector<std::unique_ptr<Stmt>> body;       // Block, If-then, While
    std::vector<std::unique_ptr<Stmt>> else_body;  // If-else
};

using StmtPtr = std::unique_ptr<Stmt>;

struct Program {
    std::vector<StmtPtr> body;
};

/// Parses recipe source. A statement may omit its trailing ';' when the next
/// token starts on a later line.
Program parse(std::string_view source);

}  // namespace denim::recipes
