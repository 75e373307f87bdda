#include "gflow/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>
#include <set>

namespace gflow::expr {

namespace {

const std::set<std::string, std::less<>> kFunctions = {"sin", "cos", "tan", "exp", "sqrt"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

} // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    ++k;
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            Token t;
            t.kind = TokenKind::Number;
            t.text = std::string(src.substr(i, j - i));
            t.offset = i;
            t.number = std::strtod(t.text.c_str(), nullptr);
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            Token t;
            t.text = std::string(src.substr(i, j - i));
            t.kind = kFunctions.count(t.text) ? TokenKind::Func : TokenKind::Ident;
            t.offset = i;
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        Token t;
        t.offset = i;
        t.text = std::string(1, c);
        switch (c) {
        case '+': case '-': case '*': case '/': case '^': t.kind = TokenKind::Op; break;
        case '(': t.kind = TokenKind::LParen; break;
        case ')': t.kind = TokenKind::RParen; break;
        default: throw ParseError(i, "a token (unexpected character '" + std::string(1, c) + "')");
        }
        out.push_back(std::move(t));
        ++i;
    }
    Token end;
    end.kind = TokenKind::End;
    end.offset = src.size();
    out.push_back(end);
    return out;
}

namespace {

// Precedence-climbing parser. Binding powers: (+,-) 10/11, (*,/) 20/21,
// unary minus 26, '^' 40/39 (right-associative, tighter than unary minus).
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), tokens_(tokenize(src)) {}

    NodePtr parse() {
        NodePtr e = parse_expr(0);
        expect(TokenKind::End, "end of input");
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token advance() { return tokens_[pos_++]; }

    void expect(TokenKind kind, const char* what) {
        if (peek().kind != kind) throw ParseError(peek().offset, what);
        advance();
    }

    static int left_bp(char op) {
        switch (op) {
        case '+': case '-': return 10;
        case '*': case '/': return 20;
        case '^': return 40;
        }
        return -1;
    }

    static int right_bp(char op) {
        switch (op) {
        case '+': case '-': return 11;
        case '*': case '/': return 21;
        case '^': return 39; // right-associative
        }
        return -1;
    }

    NodePtr parse_expr(int min_bp) {
        NodePtr lhs = parse_unary();
        while (peek().kind == TokenKind::Op && left_bp(peek().text[0]) > min_bp) {
            Token op = advance();
            NodePtr rhs = parse_expr(right_bp(op.text[0]));
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Binary;
            node->op = op.text[0];
            node->lhs = lhs;
            node->rhs = rhs;
            node->offset = lhs->offset;
            node->length = rhs->offset + rhs->length - lhs->offset;
            lhs = node;
        }
        return lhs;
    }

    NodePtr parse_unary() {
        if (peek().kind == TokenKind::Op && peek().text[0] == '-') {
            Token minus = advance();
            NodePtr operand = parse_expr(26); // binds looser than '^'
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Unary;
            node->op = '-';
            node->lhs = operand;
            node->offset = minus.offset;
            node->length = operand->offset + operand->length - minus.offset;
            return node;
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::Number: {
            Token tok = advance();
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Literal;
            node->literal = tok.number;
            node->offset = tok.offset;
            node->length = tok.text.size();
            return node;
        }
        case TokenKind::Ident: {
            Token tok = advance();
            auto node = std::make_shared<Node>();
            node->offset = tok.offset;
            node->length = tok.text.size();
            if (tok.text == "pi") {
                node->kind = Node::Kind::Literal;
                node->literal = std::numbers::pi;
            } else {
                node->kind = Node::Kind::Variable;
                node->name = tok.text;
            }
            return node;
        }
        case TokenKind::Func: {
            Token tok = advance();
            expect(TokenKind::LParen, "'(' after function name");
            NodePtr arg = parse_expr(0);
            expect(TokenKind::RParen, "')'");
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Call;
            node->name = tok.text;
            node->lhs = arg;
            node->offset = tok.offset;
            node->length = peek().offset - tok.offset;
            return node;
        }
        case TokenKind::LParen: {
            advance();
            NodePtr inner = parse_expr(0);
            expect(TokenKind::RParen, "')'");
            return inner;
        }
        default:
            throw ParseError(t.offset, "a number, identifier, function call or '('");
        }
    }

    std::string_view src_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

template <class S>
S eval_node(const Node& n, const std::map<std::string, S, std::less<>>& bindings) {
    switch (n.kind) {
    case Node::Kind::Literal:
        return scalar_cast<S>(n.literal);
    case Node::Kind::Variable: {
        auto it = bindings.find(n.name);
        if (it == bindings.end()) throw EvalError("unbound variable '" + n.name + "'");
        return it->second;
    }
    case Node::Kind::Unary:
        return -eval_node(*n.lhs, bindings);
    case Node::Kind::Binary: {
        S a = eval_node(*n.lhs, bindings);
        S b = eval_node(*n.rhs, bindings);
        switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return pow(a, b);
        }
        throw EvalError("unknown operator");
    }
    case Node::Kind::Call: {
        S a = eval_node(*n.lhs, bindings);
        if (n.name == "sin") return sin(a);
        if (n.name == "cos") return cos(a);
        if (n.name == "tan") return tan(a);
        if (n.name == "exp") return exp(a);
        if (n.name == "sqrt") {
            if (value_of(a) < 0.0) throw EvalError("sqrt of negative value");
            return sqrt(a);
        }
        throw EvalError("unknown function '" + n.name + "'");
    }
    }
    throw EvalError("malformed expression tree");
}

void collect_variables(const Node& n, std::set<std::string>& out) {
    if (n.kind == Node::Kind::Variable) out.insert(n.name);
    if (n.lhs) collect_variables(*n.lhs, out);
    if (n.rhs) collect_variables(*n.rhs, out);
}

int node_precedence(const Node& n) {
    switch (n.kind) {
    case Node::Kind::Binary:
        return n.op == '^' ? 40 : (n.op == '*' || n.op == '/' ? 20 : 10);
    case Node::Kind::Unary:
        return 26;
    default:
        return 100;
    }
}

std::string print_node(const Node& n);

std::string print_child(const Node& child, int parent_prec, bool tighten) {
    std::string s = print_node(child);
    const int prec = node_precedence(child);
    if (prec < parent_prec || (tighten && prec == parent_prec)) return "(" + s + ")";
    return s;
}

std::string print_node(const Node& n) {
    switch (n.kind) {
    case Node::Kind::Literal: {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", n.literal);
        return buf;
    }
    case Node::Kind::Variable:
        return n.name;
    case Node::Kind::Unary:
        return "-" + print_child(*n.lhs, 26, true);
    case Node::Kind::Binary: {
        const int prec = node_precedence(n);
        const bool right_assoc = n.op == '^';
        return print_child(*n.lhs, prec, right_assoc) + n.op +
               print_child(*n.rhs, prec, !right_assoc);
    }
    case Node::Kind::Call:
        return n.name + "(" + print_node(*n.lhs) + ")";
    }
    return {};
}

bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.op != b.op || a.name != b.name) return false;
    if (a.kind == Node::Kind::Literal && a.literal != b.literal) return false;
    if ((a.lhs == nullptr) != (b.lhs == nullptr)) return false;
    if ((a.rhs == nullptr) != (b.rhs == nullptr)) return false;
    if (a.lhs && !nodes_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !nodes_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

} // namespace

Ast Ast::parse(std::string_view src) {
    Parser p(src);
    return Ast(p.parse(), std::string(src));
}

std::vector<std::string> Ast::free_variables() const {
    std::set<std::string> vars;
    collect_variables(*root_, vars);
    return std::vector<std::string>(vars.begin(), vars.end());
}

std::string Ast::to_string() const { return print_node(*root_); }

bool Ast::structurally_equal(const Ast& other) const { return nodes_equal(*root_, *other.root_); }

template <class S>
S Ast::eval_generic(const std::map<std::string, S, std::less<>>& bindings) const {
    return eval_node(*root_, bindings);
}

template double Ast::eval_generic<double>(const std::map<std::string, double, std::less<>>&) const;
template Dual1 Ast::eval_generic<Dual1>(const std::map<std::string, Dual1, std::less<>>&) const;
template Dual2 Ast::eval_generic<Dual2>(const std::map<std::string, Dual2, std::less<>>&) const;

double Ast::eval(const std::map<std::string, double, std::less<>>& bindings) const {
    return eval_generic<double>(bindings);
}

Vector Ast::grad(std::span<const std::string> wrt, const Vector& point,
                 const std::map<std::string, double, std::less<>>& extra) const {
    if (static_cast<Eigen::Index>(wrt.size()) != point.size())
        throw std::invalid_argument("Ast::grad: names and point sizes differ");
    std::map<std::string, Dual1, std::less<>> bindings;
    for (const auto& [k, v] : extra) bindings.emplace(k, Dual1(v));
    for (std::size_t i = 0; i < wrt.size(); ++i)
        bindings.insert_or_assign(wrt[i],
                                  Dual1::variable(point[static_cast<Eigen::Index>(i)], wrt.size(), i));
    Dual1 y = eval_generic<Dual1>(bindings);
    Vector g(point.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = y.partial(static_cast<std::size_t>(i));
    return g;
}

ScalarFieldPtr to_scalar_field(const Ast& ast, std::vector<std::string> variables,
                               std::map<std::string, double, std::less<>> constants) {
    // Every free variable must be covered so that eval cannot fail later.
    std::set<std::string> known(variables.begin(), variables.end());
    for (const auto& [k, v] : constants) known.insert(k);
    for (const auto& v : ast.free_variables())
        if (!known.count(v)) throw EvalError("unbound variable '" + v + "' in expression");

    auto shared = std::make_shared<Ast>(ast);
    return make_scalar_field(static_cast<int>(variables.size()),
                             [shared, vars = std::move(variables),
                              consts = std::move(constants)](auto x) {
                                 using S = std::remove_cv_t<typename decltype(x)::element_type>;
                                 std::map<std::string, S, std::less<>> bindings;
                                 for (const auto& [k, v] : consts) bindings.emplace(k, scalar_cast<S>(v));
                                 for (std::size_t i = 0; i < vars.size(); ++i)
                                     bindings.insert_or_assign(vars[i], x[i]);
                                 return shared->eval_generic<S>(bindings);
                             });
}

} // namespace gflow::expr
