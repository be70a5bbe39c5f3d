// Concrete syntax: a hand-written lexer and recursive-descent parser, and the
// matching printer.
//
//   f ::= f <-> f | f -> f | f '|' f | f & f | unary
//   unary ::= ~unary | K agent unary | [f] unary | <f> unary
//           | [{G}] unary | <{G}> unary | [<{G}>] unary | <[{G}]> unary
//           | atom | top | bot | ( f )
//
// <-> | & associate to the left, -> to the right.  "[<{" and "<[{" open a
// coalition operator only when the closing ">]" / "]>" follows the group;
// otherwise they open an announcement whose first token is a quantifier.

#include <algorithm>
#include <cctype>
#include <optional>

#include "cogal/formula.hpp"

namespace cogal {

namespace {

enum class Tok {
    Ident,
    Know,
    Top,
    Bot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Comma,
    End,
};

std::string describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Know: return "'K'";
        case Tok::Top: return "'top'";
        case Tok::Bot: return "'bot'";
        case Tok::Tilde: return "'~'";
        case Tok::Amp: return "'&'";
        case Tok::Bar: return "'|'";
        case Tok::Arrow: return "'->'";
        case Tok::DArrow: return "'<->'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrack: return "'['";
        case Tok::RBrack: return "']'";
        case Tok::LAngle: return "'<'";
        case Tok::RAngle: return "'>'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    const auto push = [&](Tok k, std::size_t len) {
        out.push_back({k, std::string(src.substr(i, len)), line, col});
        i += len;
        col += len;
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            ++col;
            continue;
        }
        if (c >= 'a' && c <= 'z') {
            std::size_t j = i + 1;
            while (j < src.size() &&
                   ((src[j] >= 'a' && src[j] <= 'z') || (src[j] >= '0' && src[j] <= '9') || src[j] == '_'))
                ++j;
            const std::string_view word = src.substr(i, j - i);
            Tok k = Tok::Ident;
            if (word == "top") k = Tok::Top;
            if (word == "bot") k = Tok::Bot;
            push(k, j - i);
            continue;
        }
        if (src.substr(i, 3) == "<->") {
            push(Tok::DArrow, 3);
            continue;
        }
        if (src.substr(i, 2) == "->") {
            push(Tok::Arrow, 2);
            continue;
        }
        switch (c) {
            case 'K': push(Tok::Know, 1); continue;
            case '~': push(Tok::Tilde, 1); continue;
            case '&': push(Tok::Amp, 1); continue;
            case '|': push(Tok::Bar, 1); continue;
            case '(': push(Tok::LParen, 1); continue;
            case ')': push(Tok::RParen, 1); continue;
            case '[': push(Tok::LBrack, 1); continue;
            case ']': push(Tok::RBrack, 1); continue;
            case '<': push(Tok::LAngle, 1); continue;
            case '>': push(Tok::RAngle, 1); continue;
            case '{': push(Tok::LBrace, 1); continue;
            case '}': push(Tok::RBrace, 1); continue;
            case ',': push(Tok::Comma, 1); continue;
            default:
                throw ParseError(line, col, {"formula"}, std::string("unknown operator '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse_all() {
        Formula f = parse_iff();
        expect(Tok::End, {"'&'", "'|'", "'->'", "'<->'", "end of input"});
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.column, std::move(expected), found);
    }

    const Token& expect(Tok k, std::vector<std::string> expected = {}) {
        if (peek().kind != k) {
            if (expected.empty()) expected.push_back(describe(k));
            fail(std::move(expected));
        }
        return toks_[pos_++];
    }

    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }

    Formula parse_iff() {
        Formula lhs = parse_imp();
        while (accept(Tok::DArrow)) lhs = iff(lhs, parse_imp());
        return lhs;
    }

    Formula parse_imp() {
        Formula lhs = parse_or();
        if (accept(Tok::Arrow)) return implies(lhs, parse_imp());
        return lhs;
    }

    Formula parse_or() {
        Formula lhs = parse_and();
        while (accept(Tok::Bar)) lhs = disj(lhs, parse_and());
        return lhs;
    }

    Formula parse_and() {
        Formula lhs = parse_unary();
        while (accept(Tok::Amp)) lhs = conj(lhs, parse_unary());
        return lhs;
    }

    AgentSet parse_group() {
        expect(Tok::LBrace);
        AgentSet g;
        if (accept(Tok::RBrace)) return g;
        for (;;) {
            const Token& a = expect(Tok::Ident, {"agent name"});
            g.insert(a.text);
            if (accept(Tok::RBrace)) return g;
            expect(Tok::Comma, {"','", "'}'"});
        }
    }

    // Tries "[<{G}>]" or "<[{G}]>" at the current position.  On mismatch the
    // position is restored and nothing is returned.
    std::optional<AgentSet> try_coalition(Tok open, Tok inner_open, Tok inner_close, Tok close) {
        if (peek().kind != open || peek(1).kind != inner_open || peek(2).kind != Tok::LBrace) return {};
        const std::size_t saved = pos_;
        pos_ += 2;
        try {
            AgentSet g = parse_group();
            if (accept(inner_close) && accept(close)) return g;
        } catch (const ParseError&) {
        }
        pos_ = saved;
        return {};
    }

    Formula parse_unary() {
        switch (peek().kind) {
            case Tok::Tilde: ++pos_; return neg(parse_unary());
            case Tok::Know: {
                ++pos_;
                const Token& a = expect(Tok::Ident, {"agent name"});
                std::string agent = a.text;
                return know(std::move(agent), parse_unary());
            }
            case Tok::LBrack: {
                if (auto g = try_coalition(Tok::LBrack, Tok::LAngle, Tok::RAngle, Tok::RBrack))
                    return coal_box(std::move(*g), parse_unary());
                ++pos_;
                if (peek().kind == Tok::LBrace) {
                    AgentSet g = parse_group();
                    expect(Tok::RBrack);
                    return group_box(std::move(g), parse_unary());
                }
                Formula ann = parse_iff();
                expect(Tok::RBrack, {"']'", "'&'", "'|'", "'->'", "'<->'"});
                return announce(std::move(ann), parse_unary());
            }
            case Tok::LAngle: {
                if (auto g = try_coalition(Tok::LAngle, Tok::LBrack, Tok::RBrack, Tok::RAngle))
                    return coal_dia(std::move(*g), parse_unary());
                ++pos_;
                if (peek().kind == Tok::LBrace) {
                    AgentSet g = parse_group();
                    expect(Tok::RAngle);
                    return group_dia(std::move(g), parse_unary());
                }
                Formula ann = parse_iff();
                expect(Tok::RAngle, {"'>'", "'&'", "'|'", "'->'", "'<->'"});
                return announce_dia(std::move(ann), parse_unary());
            }
            case Tok::LParen: {
                ++pos_;
                Formula f = parse_iff();
                expect(Tok::RParen, {"')'", "'&'", "'|'", "'->'", "'<->'"});
                return f;
            }
            case Tok::Top: ++pos_; return top();
            case Tok::Bot: ++pos_; return bot();
            case Tok::Ident: return atom(toks_[pos_++].text);
            default:
                fail({"atom", "'top'", "'bot'", "'~'", "'K'", "'('", "'['", "'<'"});
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ── Printer ─────────────────────────────────────────────────────────────────

int precedence(Op op) {
    switch (op) {
        case Op::Iff: return 1;
        case Op::Imp: return 2;
        case Op::Or: return 3;
        case Op::And: return 4;
        default: return 5;
    }
}

bool right_assoc(Op op) { return op == Op::Imp; }

void print(const Formula& f, std::string& out);

void print_operand(const Formula& f, std::string& out) {
    if (precedence(f.op()) < 5) {
        out += '(';
        print(f, out);
        out += ')';
    } else {
        print(f, out);
    }
}

void print(const Formula& f, std::string& out) {
    switch (f.op()) {
        case Op::Atom: out += f.name(); return;
        case Op::Top: out += "top"; return;
        case Op::Bot: out += "bot"; return;
        case Op::Not:
            out += '~';
            print_operand(f.arg(0), out);
            return;
        case Op::Know:
            out += "K ";
            out += f.name();
            out += ' ';
            print_operand(f.arg(0), out);
            return;
        case Op::PaBox:
        case Op::PaDia:
            out += f.op() == Op::PaBox ? '[' : '<';
            print(f.arg(0), out);
            out += f.op() == Op::PaBox ? "] " : "> ";
            print_operand(f.arg(1), out);
            return;
        case Op::GroupBox:
            out += "[" + to_string(f.group()) + "] ";
            print_operand(f.arg(0), out);
            return;
        case Op::GroupDia:
            out += "<" + to_string(f.group()) + "> ";
            print_operand(f.arg(0), out);
            return;
        case Op::CoalBox:
            out += "[<" + to_string(f.group()) + ">] ";
            print_operand(f.arg(0), out);
            return;
        case Op::CoalDia:
            out += "<[" + to_string(f.group()) + "]> ";
            print_operand(f.arg(0), out);
            return;
        case Op::And:
        case Op::Or:
        case Op::Imp:
        case Op::Iff: {
            const int p = precedence(f.op());
            const bool ra = right_assoc(f.op());
            const auto side = [&](const Formula& child, bool left) {
                const int cp = precedence(child.op());
                const bool parens = cp < p || (cp == p && (left ? ra : !ra));
                if (parens) out += '(';
                print(child, out);
                if (parens) out += ')';
            };
            side(f.arg(0), true);
            switch (f.op()) {
                case Op::And: out += " & "; break;
                case Op::Or: out += " | "; break;
                case Op::Imp: out += " -> "; break;
                default: out += " <-> "; break;
            }
            side(f.arg(1), false);
            return;
        }
    }
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += xs[i];
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected,
                       const std::string& found)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": found " + found + ", expected one of: " + join(expected)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Formula parse(std::string_view text) {
    Parser p(lex(text));
    return p.parse_all();
}

std::string render(const Formula& f) {
    std::string out;
    print(f, out);
    return out;
}

}  // namespace cogal
