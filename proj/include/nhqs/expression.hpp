// Recursive-descent parser and evaluator for analytic potential entries.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' integer)?
//   atom   := number | 'i' | 'z' | func '(' expr ')' | '(' expr ')'
//   func   in { exp, sin, cos, sinh, cosh, sqrt }
//
// All arithmetic is complex; evaluation at complex z is the point of the
// exercise (contour integration needs V analytic off the real axis).  abs()
// is deliberately absent: it is not analytic.
#ifndef NHQS_EXPRESSION_HPP
#define NHQS_EXPRESSION_HPP

#include <cctype>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "nhqs/errors.hpp"
#include "nhqs/linalg.hpp"

namespace nhqs {

class Expression {
public:
    static Expression parse(std::string_view src);

    Complex eval(Complex z) const {
        Complex v = root_ ? root_->eval(z) : Complex(0.0, 0.0);
        if (!is_finite(v))
            throw NonFiniteValue("expression '" + source_ + "' is non-finite at z=(" +
                                 std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")");
        return v;
    }

    const std::string& source() const { return source_; }

    // Structural identity; enough for the involution checks.
    friend bool operator==(const Expression& a, const Expression& b) {
        return a.source_ == b.source_;
    }

private:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    enum class Func { Exp, Sin, Cos, Sinh, Cosh, Sqrt };

    struct Node {
        enum class Kind { Number, ImagUnit, Variable, Add, Sub, Mul, Div, Neg, Pow, Call } kind;
        double number = 0.0;
        long exponent = 0;
        Func func = Func::Exp;
        NodePtr lhs, rhs;

        Complex eval(Complex z) const {
            switch (kind) {
                case Kind::Number: return Complex(number, 0.0);
                case Kind::ImagUnit: return Complex(0.0, 1.0);
                case Kind::Variable: return z;
                case Kind::Add: return lhs->eval(z) + rhs->eval(z);
                case Kind::Sub: return lhs->eval(z) - rhs->eval(z);
                case Kind::Mul: return lhs->eval(z) * rhs->eval(z);
                case Kind::Div: return lhs->eval(z) / rhs->eval(z);
                case Kind::Neg: return -lhs->eval(z);
                case Kind::Pow: return pow_int(lhs->eval(z), exponent);
                case Kind::Call:
                    switch (func) {
                        case Func::Exp: return std::exp(lhs->eval(z));
                        case Func::Sin: return std::sin(lhs->eval(z));
                        case Func::Cos: return std::cos(lhs->eval(z));
                        case Func::Sinh: return std::sinh(lhs->eval(z));
                        case Func::Cosh: return std::cosh(lhs->eval(z));
                        case Func::Sqrt: return std::sqrt(lhs->eval(z));
                    }
            }
            return Complex(0.0, 0.0);
        }

        static Complex pow_int(Complex base, long k) {
            if (k < 0) return Complex(1.0, 0.0) / pow_int(base, -k);
            Complex acc(1.0, 0.0);
            Complex b = base;
            while (k > 0) {
                if (k & 1) acc *= b;
                b *= b;
                k >>= 1;
            }
            return acc;
        }
    };

    class Parser {
    public:
        explicit Parser(std::string_view src) : src_(src) {}

        NodePtr run() {
            NodePtr e = expr();
            skip_ws();
            if (pos_ != src_.size()) throw SyntaxError("unexpected trailing input", pos_);
            return e;
        }

    private:
        std::string_view src_;
        std::size_t pos_ = 0;

        void skip_ws() {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        char peek() {
            skip_ws();
            return pos_ < src_.size() ? src_[pos_] : '\0';
        }
        bool accept(char c) {
            if (peek() == c) {
                ++pos_;
                return true;
            }
            return false;
        }
        void expect(char c) {
            if (!accept(c))
                throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }

        NodePtr expr() {
            NodePtr a = term();
            for (;;) {
                if (accept('+'))
                    a = binary(Node::Kind::Add, a, term());
                else if (accept('-'))
                    a = binary(Node::Kind::Sub, a, term());
                else
                    return a;
            }
        }

        NodePtr term() {
            NodePtr a = unary();
            for (;;) {
                if (accept('*'))
                    a = binary(Node::Kind::Mul, a, unary());
                else if (accept('/'))
                    a = binary(Node::Kind::Div, a, unary());
                else
                    return a;
            }
        }

        NodePtr unary() {
            if (accept('-')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Neg;
                n->lhs = unary();
                return n;
            }
            return power();
        }

        NodePtr power() {
            NodePtr base = atom();
            if (accept('^')) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Pow;
                n->lhs = base;
                n->exponent = integer();
                return n;
            }
            return base;
        }

        long integer() {
            skip_ws();
            std::size_t start = pos_;
            bool neg = false;
            if (pos_ < src_.size() && src_[pos_] == '-') {
                neg = true;
                ++pos_;
            }
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw SyntaxError("expected integer exponent", start);
            long v = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                v = v * 10 + (src_[pos_] - '0');
                if (v > 1000000) throw SyntaxError("exponent too large", start);
                ++pos_;
            }
            return neg ? -v : v;
        }

        NodePtr atom() {
            const char c = peek();
            if (c == '(') {
                ++pos_;
                NodePtr e = expr();
                expect(')');
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
            throw SyntaxError("expected number, 'i', 'z', function call or '('", pos_);
        }

        NodePtr number() {
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t mark = pos_;
                ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    while (pos_ < src_.size() &&
                           std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        ++pos_;
                } else {
                    pos_ = mark;  // 'e' belongs to something else; not an exponent
                }
            }
            const std::string text(src_.substr(start, pos_ - start));
            if (text.empty() || text == ".") throw SyntaxError("malformed number", start);
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Number;
            n->number = std::strtod(text.c_str(), nullptr);
            return n;
        }

        NodePtr identifier() {
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string name(src_.substr(start, pos_ - start));
            if (name == "i") {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::ImagUnit;
                return n;
            }
            if (name == "z") {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Variable;
                return n;
            }
            Func f;
            if (name == "exp")
                f = Func::Exp;
            else if (name == "sin")
                f = Func::Sin;
            else if (name == "cos")
                f = Func::Cos;
            else if (name == "sinh")
                f = Func::Sinh;
            else if (name == "cosh")
                f = Func::Cosh;
            else if (name == "sqrt")
                f = Func::Sqrt;
            else
                throw UnknownIdentifier(name, start);
            expect('(');
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Call;
            n->func = f;
            n->lhs = expr();
            expect(')');
            return n;
        }

        static NodePtr binary(Node::Kind k, NodePtr a, NodePtr b) {
            auto n = std::make_shared<Node>();
            n->kind = k;
            n->lhs = std::move(a);
            n->rhs = std::move(b);
            return n;
        }
    };

    NodePtr root_;
    std::string source_;
};

inline Expression Expression::parse(std::string_view src) {
    Expression e;
    e.source_ = std::string(src);
    e.root_ = Parser(src).run();
    return e;
}

}  // namespace nhqs

#endif  // NHQS_EXPRESSION_HPP
