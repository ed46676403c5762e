#pragma once

// Minimal arithmetic expressions over w1..wm, used for user-supplied reaction
// terms. Grammar (EBNF):
//
//   expr    = term , { ( "+" | "-" ) , term } ;
//   term    = unary , { "*" , unary } ;
//   unary   = ( "+" | "-" ) , unary | power ;
//   power   = primary , [ "^" , unary ] ;        (* right associative *)
//   primary = number | variable | "(" , expr , ")" ;
//   variable = "w" , digit , { digit } ;         (* w1 .. wm *)
//   number  = digit , { digit } , [ "." , { digit } ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digit , { digit } ] ;
//
// Whitespace is ignored between tokens.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdrd/errors.hpp"

namespace tdrd {

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ConfigError(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class Expression {
public:
    /// Parses `text`; variables must lie in w1..w{num_vars}.
    static Expression parse(std::string_view text, int num_vars) {
        Parser p{text, 0, num_vars, {}};
        Expression e;
        const int root = p.parse_expr();
        p.skip_ws();
        if (p.pos != text.size()) throw ParseError("unexpected '" + std::string(1, text[p.pos]) + "'", p.pos);
        e.nodes_ = std::move(p.nodes);
        e.root_ = root;
        e.source_ = std::string(text);
        return e;
    }

    double evaluate(std::span<const double> w) const { return eval(root_, w); }
    const std::string& source() const noexcept { return source_; }

private:
    enum class Op { constant, variable, add, sub, mul, pow, neg };
    struct Node {
        Op op;
        double value = 0.0;
        int var = 0;
        int lhs = -1;
        int rhs = -1;
    };

    struct Parser {
        std::string_view s;
        std::size_t pos;
        int num_vars;
        std::vector<Node> nodes;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool accept(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        int add(Node n) {
            nodes.push_back(n);
            return static_cast<int>(nodes.size()) - 1;
        }

        int parse_expr() {
            int lhs = parse_term();
            while (true) {
                if (accept('+')) lhs = add({Op::add, 0.0, 0, lhs, parse_term()});
                else if (accept('-')) lhs = add({Op::sub, 0.0, 0, lhs, parse_term()});
                else return lhs;
            }
        }
        int parse_term() {
            int lhs = parse_unary();
            while (accept('*')) lhs = add({Op::mul, 0.0, 0, lhs, parse_unary()});
            return lhs;
        }
        int parse_unary() {
            if (accept('-')) return add({Op::neg, 0.0, 0, parse_unary(), -1});
            if (accept('+')) return parse_unary();
            return parse_power();
        }
        int parse_power() {
            const int base = parse_primary();
            if (accept('^')) return add({Op::pow, 0.0, 0, base, parse_unary()});
            return base;
        }
        int parse_primary() {
            skip_ws();
            if (pos >= s.size()) throw ParseError("unexpected end of expression", pos);
            const char c = s[pos];
            if (c == '(') {
                ++pos;
                const int inner = parse_expr();
                if (!accept(')')) throw ParseError("expected ')'", pos);
                return inner;
            }
            if (c == 'w') {
                const std::size_t start = pos++;
                std::size_t digits = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                if (digits == pos) throw ParseError("expected variable index after 'w'", start);
                const int idx = std::atoi(std::string(s.substr(digits, pos - digits)).c_str());
                if (idx < 1 || idx > num_vars)
                    throw ParseError("variable w" + std::to_string(idx) + " out of range w1..w" +
                                         std::to_string(num_vars),
                                     start);
                return add({Op::variable, 0.0, idx - 1, -1, -1});
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const std::size_t start = pos;
                auto digits = [&] {
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                };
                digits();
                if (pos < s.size() && s[pos] == '.') {
                    ++pos;
                    digits();
                }
                if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
                    std::size_t save = pos++;
                    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
                    const std::size_t exp_start = pos;
                    digits();
                    if (exp_start == pos) pos = save;
                }
                const std::string lit(s.substr(start, pos - start));
                if (lit == ".") throw ParseError("malformed number", start);
                return add({Op::constant, std::strtod(lit.c_str(), nullptr), 0, -1, -1});
            }
            throw ParseError("unexpected '" + std::string(1, c) + "'", pos);
        }
    };

    double eval(int i, std::span<const double> w) const {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::constant: return n.value;
            case Op::variable: return w[n.var];
            case Op::add: return eval(n.lhs, w) + eval(n.rhs, w);
            case Op::sub: return eval(n.lhs, w) - eval(n.rhs, w);
            case Op::mul: return eval(n.lhs, w) * eval(n.rhs, w);
            case Op::neg: return -eval(n.lhs, w);
            case Op::pow: return std::pow(eval(n.lhs, w), eval(n.rhs, w));
        }
        return 0.0;
    }

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string source_;
};

}  // namespace tdrd
