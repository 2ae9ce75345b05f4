#include <cctype>
#include <limits>

#include "denim/recipes/ast.hpp"

namespace denim::recipes {

CompileError::CompileError(Errc code, int line, int col, const std::string& message)
    : Error(code, std::to_string(line) + ":" + std::to_string(col) + ": " + message),
      line_(line),
      col_(col) {}

namespace {

[[noreturn]] void syntax_error(SourcePos pos, const std::string& message) {
    throw CompileError(Errc::SyntaxError, pos.line, pos.col, message);
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token tok;
            tok.pos = pos_;
            if (at_end()) {
                out.push_back(tok);
                return out;
            }
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                lex_number(tok);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                lex_word(tok);
            } else {
                lex_punct(tok);
            }
            out.push_back(std::move(tok));
        }
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }

    char advance() {
        const char c = src_[i_++];
        if (c == '\n') {
            ++pos_.line;
            pos_.col = 1;
        } else {
            ++pos_.col;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (peek() == '/' && peek(1) == '*') {
                const SourcePos start = pos_;
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (at_end()) syntax_error(start, "unterminated comment");
                    advance();
                }
                advance();
                advance();
            } else if (peek() == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                return;
            }
        }
    }

    void lex_number(Token& tok) {
        tok.kind = TokenKind::Number;
        std::int64_t value = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            value = value * 10 + (advance() - '0');
            if (value > std::numeric_limits<std::int32_t>::max()) {
                syntax_error(tok.pos, "integer literal out of range");
            }
        }
        tok.value = static_cast<std::int32_t>(value);
    }

    void lex_word(Token& tok) {
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') tok.text.push_back(advance());
        if (tok.text == "int") tok.kind = TokenKind::KwInt;
        else if (tok.text == "if") tok.kind = TokenKind::KwIf;
        else if (tok.text == "else") tok.kind = TokenKind::KwElse;
        else if (tok.text == "while") tok.kind = TokenKind::KwWhile;
        else tok.kind = TokenKind::Ident;
    }

    void lex_punct(Token& tok) {
        const char c = advance();
        tok.text = std::string(1, c);
        auto two = [&](char next, TokenKind both, TokenKind single) {
            if (peek() == next) {
                tok.text.push_back(advance());
                tok.kind = both;
            } else {
                tok.kind = single;
            }
        };
        switch (c) {
            case '(': tok.kind = TokenKind::LParen; break;
            case ')': tok.kind = TokenKind::RParen; break;
            case '{': tok.kind = TokenKind::LBrace; break;
            case '}': tok.kind = TokenKind::RBrace; break;
            case ';': tok.kind = TokenKind::Semicolon; break;
            case ',': tok.kind = TokenKind::Comma; break;
            case '+': tok.kind = TokenKind::Plus; break;
            case '-': tok.kind = TokenKind::Minus; break;
            case '*': tok.kind = TokenKind::Star; break;
            case '/': tok.kind = TokenKind::Slash; break;
            case '%': tok.kind = TokenKind::Percent; break;
            case '=': two('=', TokenKind::Eq, TokenKind::Assign); break;
            case '!': two('=', TokenKind::Ne, TokenKind::Bang); break;
            case '<': two('=', TokenKind::Le, TokenKind::Lt); break;
            case '>': two('=', TokenKind::Ge, TokenKind::Gt); break;
            default: syntax_error(tok.pos, std::string("unexpected character '") + c + "'");
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program program() {
        Program prog;
        while (!check(TokenKind::End)) prog.body.push_back(statement());
        return prog;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    bool check(TokenKind kind) const { return peek().kind == kind; }
    const Token& advance() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    bool match(TokenKind kind) {
        if (!check(kind)) return false;
        advance();
        return true;
    }

    const Token& expect(TokenKind kind, const char* what) {
        if (!check(kind)) syntax_error(peek().pos, std::string("expected ") + what + describe_next());
        return advance();
    }

    std::string describe_next() const {
        return check(TokenKind::End) ? " at end of input" : " before '" + peek().text + "'";
    }

    void terminate_statement() {
        if (match(TokenKind::Semicolon)) return;
        const int last_line = toks_[i_ - 1].pos.line;
        if (check(TokenKind::End) || check(TokenKind::RBrace) || peek().pos.line > last_line) return;
        syntax_error(peek().pos, "expected ';'" + describe_next());
    }

    std::vector<StmtPtr> block_or_statement() {
        std::vector<StmtPtr> body;
        if (match(TokenKind::LBrace)) {
            while (!check(TokenKind::RBrace)) {
                if (check(TokenKind::End)) syntax_error(peek().pos, "expected '}' at end of input");
                body.push_back(statement());
            }
            advance();
        } else {
            body.push_back(statement());
        }
        return body;
    }

    StmtPtr statement() {
        auto stmt = std::make_unique<Stmt>();
        stmt->pos = peek().pos;

        if (match(TokenKind::Semicolon)) {
            stmt->kind = Stmt::Kind::Block;
            return stmt;
        }
        if (check(TokenKind::LBrace)) {
            stmt->kind = Stmt::Kind::Block;
            stmt->body = block_or_statement();
            return stmt;
        }
        if (match(TokenKind::KwInt)) {
            stmt->kind = Stmt::Kind::Decl;
            stmt->name = expect(TokenKind::Ident, "variable name").text;
            if (match(TokenKind::Assign)) stmt->expr = expression();
            terminate_statement();
            return stmt;
        }
        if (match(TokenKind::KwIf)) {
            stmt->kind = Stmt::Kind::If;
            expect(TokenKind::LParen, "'('");
            stmt->expr = expression();
            expect(TokenKind::RParen, "')'");
            stmt->body = block_or_statement();
            if (match(TokenKind::KwElse)) stmt->else_body = block_or_statement();
            return stmt;
        }
        if (match(TokenKind::KwWhile)) {
            stmt->kind = Stmt::Kind::While;
            expect(TokenKind::LParen, "'('");
            stmt->expr = expression();
            expect(TokenKind::RParen, "')'");
            stmt->body = block_or_statement();
            return stmt;
        }
        if (check(TokenKind::Ident) && toks_[i_ + 1].kind == TokenKind::Assign) {
            stmt->kind = Stmt::Kind::Assign;
            stmt->name = advance().text;
            advance();
            stmt->expr = expression();
            terminate_statement();
            return stmt;
        }
        stmt->kind = Stmt::Kind::Expr;
        stmt->expr = expression();
        terminate_statement();
        return stmt;
    }

    ExprPtr expression() { return comparison(); }

    ExprPtr binary(BinaryOp op, SourcePos pos, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->binary = op;
        e->pos = pos;
        e->operands.push_back(std::move(lhs));
        e->operands.push_back(std::move(rhs));
        return e;
    }

    ExprPtr comparison() {
        auto lhs = additive();
        for (;;) {
            BinaryOp op;
            switch (peek().kind) {
                case TokenKind::Eq: op = BinaryOp::Eq; break;
                case TokenKind::Ne: op = BinaryOp::Ne; break;
                case TokenKind::Lt: op = BinaryOp::Lt; break;
                case TokenKind::Le: op = BinaryOp::Le; break;
                case TokenKind::Gt: op = BinaryOp::Gt; break;
                case TokenKind::Ge: op = BinaryOp::Ge; break;
                default: return lhs;
            }
            const SourcePos pos = advance().pos;
            lhs = binary(op, pos, std::move(lhs), additive());
        }
    }

    ExprPtr additive() {
        auto lhs = multiplicative();
        while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
            const Token& tok = advance();
            const BinaryOp op = tok.kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            lhs = binary(op, tok.pos, std::move(lhs), multiplicative());
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        auto lhs = unary();
        for (;;) {
            BinaryOp op;
            switch (peek().kind) {
                case TokenKind::Star: op = BinaryOp::Mul; break;
                case TokenKind::Slash: op = BinaryOp::Div; break;
                case TokenKind::Percent: op = BinaryOp::Mod; break;
                default: return lhs;
            }
            const SourcePos pos = advance().pos;
            lhs = binary(op, pos, std::move(lhs), unary());
        }
    }

    ExprPtr unary() {
        if (check(TokenKind::Minus) || check(TokenKind::Bang)) {
            const Token& tok = advance();
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->unary = tok.kind == TokenKind::Minus ? UnaryOp::Neg : UnaryOp::Not;
            e->pos = tok.pos;
            e->operands.push_back(unary());
            return e;
        }
        return primary();
    }

    ExprPtr primary() {
        auto e = std::make_unique<Expr>();
        e->pos = peek().pos;
        if (check(TokenKind::Number)) {
            e->kind = Expr::Kind::Number;
            e->value = advance().value;
            return e;
        }
        if (check(TokenKind::Ident)) {
            e->name = advance().text;
            if (!match(TokenKind::LParen)) {
                e->kind = Expr::Kind::Var;
                return e;
            }
            e->kind = Expr::Kind::Call;
            if (!check(TokenKind::RParen)) {
                do {
                    e->operands.push_back(expression());
                } while (match(TokenKind::Comma));
            }
            expect(TokenKind::RParen, "')'");
            return e;
        }
        if (match(TokenKind::LParen)) {
            auto inner = expression();
            expect(TokenKind::RParen, "')'");
            return inner;
        }
        syntax_error(peek().pos, "expected expression" + describe_next());
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

Program parse(std::string_view source) { return Parser(tokenize(source)).program(); }

}  // namespace denim::recipes
