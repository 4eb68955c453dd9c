#include "thinlab/poly.hpp"

#include <cctype>
#include <stdexcept>

namespace thinlab {

struct MatrixPolynomial::Node {
    enum class Kind { Constant, Entry, Add, Sub, Mul, Pow, Neg };
    Kind kind;
    mpz_class value;       // Constant
    int entry = 0;         // Entry: 0..3 for a,b,c,d
    unsigned exponent = 0; // Pow
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = MatrixPolynomial::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("polynomial parse error at position " + std::to_string(pos) +
                                    ": " + what);
    }

    NodePtr make(Node n) { return std::make_shared<Node>(std::move(n)); }

    NodePtr parse_expr() {
        skip();
        bool negate = false;
        if (eat('-'))
            negate = true;
        else
            eat('+');
        NodePtr acc = parse_term();
        if (negate) acc = make({Node::Kind::Neg, {}, 0, 0, acc, nullptr});
        while (true) {
            if (eat('+'))
                acc = make({Node::Kind::Add, {}, 0, 0, acc, parse_term()});
            else if (eat('-'))
                acc = make({Node::Kind::Sub, {}, 0, 0, acc, parse_term()});
            else
                break;
        }
        return acc;
    }

    NodePtr parse_term() {
        NodePtr acc = parse_factor();
        while (eat('*')) acc = make({Node::Kind::Mul, {}, 0, 0, acc, parse_factor()});
        return acc;
    }

    NodePtr parse_factor() {
        NodePtr base = parse_base();
        if (eat('^')) {
            skip();
            if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                fail("expected exponent");
            unsigned e = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                e = e * 10 + static_cast<unsigned>(text[pos++] - '0');
            return make({Node::Kind::Pow, {}, 0, e, base, nullptr});
        }
        return base;
    }

    NodePtr parse_base() {
        skip();
        if (pos >= text.size()) fail("unexpected end of input");
        if (eat('(')) {
            NodePtr inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
            std::string digits;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                digits.push_back(text[pos++]);
            Node n{Node::Kind::Constant, mpz_class(digits), 0, 0, nullptr, nullptr};
            return make(std::move(n));
        }
        if (text[pos] == 'x') {
            if (pos + 2 < text.size()) {
                const char r = text[pos + 1];
                const char c = text[pos + 2];
                if ((r == '1' || r == '2') && (c == '1' || c == '2')) {
                    pos += 3;
                    const int entry = (r - '1') * 2 + (c - '1');
                    return make({Node::Kind::Entry, {}, entry, 0, nullptr, nullptr});
                }
            }
            fail("expected x11, x12, x21 or x22");
        }
        fail("unexpected character '" + std::string(1, text[pos]) + "'");
    }
};

mpz_class eval_node(const Node& n, const Mat2Z& g) {
    switch (n.kind) {
        case Node::Kind::Constant: return n.value;
        case Node::Kind::Entry:
            switch (n.entry) {
                case 0: return g.a;
                case 1: return g.b;
                case 2: return g.c;
                default: return g.d;
            }
        case Node::Kind::Add: return eval_node(*n.lhs, g) + eval_node(*n.rhs, g);
        case Node::Kind::Sub: return eval_node(*n.lhs, g) - eval_node(*n.rhs, g);
        case Node::Kind::Mul: return eval_node(*n.lhs, g) * eval_node(*n.rhs, g);
        case Node::Kind::Neg: return -eval_node(*n.lhs, g);
        case Node::Kind::Pow: {
            mpz_class base = eval_node(*n.lhs, g), out;
            mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), n.exponent);
            return out;
        }
    }
    throw std::logic_error("eval_node: bad node");
}

std::uint64_t pow_mod(std::uint64_t base, unsigned e, std::uint64_t p) {
    std::uint64_t out = 1 % p;
    base %= p;
    while (e) {
        if (e & 1) out = (out * base) % p;
        base = (base * base) % p;
        e >>= 1;
    }
    return out;
}

std::uint64_t eval_node_mod(const Node& n, const std::uint64_t e[4], std::uint64_t p) {
    switch (n.kind) {
        case Node::Kind::Constant:
            return mpz_fdiv_ui(n.value.get_mpz_t(), static_cast<unsigned long>(p));
        case Node::Kind::Entry: return e[n.entry] % p;
        case Node::Kind::Add: return (eval_node_mod(*n.lhs, e, p) + eval_node_mod(*n.rhs, e, p)) % p;
        case Node::Kind::Sub:
            return (eval_node_mod(*n.lhs, e, p) + p - eval_node_mod(*n.rhs, e, p)) % p;
        case Node::Kind::Mul: return (eval_node_mod(*n.lhs, e, p) * eval_node_mod(*n.rhs, e, p)) % p;
        case Node::Kind::Neg: return (p - eval_node_mod(*n.lhs, e, p)) % p;
        case Node::Kind::Pow: return pow_mod(eval_node_mod(*n.lhs, e, p), n.exponent, p);
    }
    throw std::logic_error("eval_node_mod: bad node");
}

}  // namespace

MatrixPolynomial MatrixPolynomial::parse(const std::string& text) {
    Parser p(text);
    MatrixPolynomial out;
    out.root_ = p.parse_expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    out.text_ = text;
    return out;
}

mpz_class MatrixPolynomial::eval(const Mat2Z& g) const { return eval_node(*root_, g); }

std::uint64_t MatrixPolynomial::eval_mod(const ModMat2& m, std::uint64_t p) const {
    const std::uint64_t e[4] = {m.a, m.b, m.c, m.d};
    return eval_node_mod(*root_, e, p);
}

std::uint64_t MatrixPolynomial::eval_mod(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                         std::uint64_t d, std::uint64_t p) const {
    const std::uint64_t e[4] = {a, b, c, d};
    return eval_node_mod(*root_, e, p);
}

}  // namespace thinlab
