#include "ovl/kernel.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "ovl/error.hpp"

namespace ovl {

namespace {

struct Token {
    enum class Kind { Ident, Integer, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::int64_t value = 0;
    int line = 0, col = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error("line " + std::to_string(tok_.line) + ":" + std::to_string(tok_.col) +
                    ": " + msg);
    }

private:
    void advance() {
        skip_ws_and_comments();
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text = "<end of input>";
            return;
        }
        const char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                step();
            tok_.kind = Token::Kind::Ident;
            tok_.text = text_.substr(start, pos_ - start);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                step();
            tok_.kind = Token::Kind::Integer;
            tok_.text = text_.substr(start, pos_ - start);
            try {
                tok_.value = std::stoll(tok_.text);
            } catch (const std::exception&) {
                tok_.value = INT64_MAX; // out of range, rejected by the parser
            }
        } else if (c == '+' || c == '-' || c == '*' || c == '(' || c == ')' || c == ';' ||
                   c == '=') {
            tok_.kind = Token::Kind::Punct;
            tok_.text = std::string(1, c);
            step();
        } else {
            throw Error("line " + std::to_string(line_) + ":" + std::to_string(col_) +
                        ": unexpected character '" + std::string(1, c) + "'");
        }
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') step();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                step();
            } else {
                break;
            }
        }
    }

    void step() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    KernelProgram parse() {
        KernelProgram prog;
        if (lex_.peek().kind == Token::Kind::End) lex_.fail("empty program");
        while (lex_.peek().kind != Token::Kind::End) statement(prog);
        if (prog.outputs.empty()) lex_.fail("program declares no outputs");
        return prog;
    }

private:
    void statement(KernelProgram& prog) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Ident) lex_.fail("expected identifier or 'out'");
        if (t.text == "out") {
            Token name = lex_.take();
            if (name.kind != Token::Kind::Ident) lex_.fail("expected identifier after 'out'");
            if (!defined_.count(name.text))
                throw Error("line " + std::to_string(name.line) + ":" +
                            std::to_string(name.col) + ": undeclared output '" + name.text +
                            "'");
            prog.outputs.push_back(name.text);
            expect(";");
            return;
        }
        if (defined_.count(t.text))
            throw Error("line " + std::to_string(t.line) + ":" + std::to_string(t.col) +
                        ": reassignment of '" + t.text + "'");
        expect("=");
        ExprPtr e = expr(false);
        expect(";");
        defined_.insert(t.text);
        prog.statements.push_back({t.text, std::move(e)});
    }

    ExprPtr expr(bool in_parens) {
        ExprPtr lhs = term(in_parens);
        while (is_punct("+") || is_punct("-")) {
            const char op = lex_.take().text[0];
            lhs = binary(op, std::move(lhs), term(false));
        }
        return lhs;
    }

    ExprPtr term(bool in_parens) {
        ExprPtr lhs = factor(in_parens);
        while (is_punct("*")) {
            lex_.take();
            lhs = binary('*', std::move(lhs), factor(false));
        }
        return lhs;
    }

    // allow_neg is set only for the factor directly following '('.
    ExprPtr factor(bool allow_neg) {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Ident) {
            Token id = lex_.take();
            auto e = std::make_unique<ExprNode>();
            e->kind = ExprNode::Kind::Var;
            e->name = id.text;
            e->line = id.line;
            e->col = id.col;
            return e;
        }
        if (t.kind == Token::Kind::Integer) return literal(false);
        if (is_punct("-")) {
            if (!allow_neg) lex_.fail("unexpected '-' (negative literals need parentheses)");
            lex_.take();
            return literal(true);
        }
        if (is_punct("(")) {
            lex_.take();
            ExprPtr e = expr(true);
            expect(")");
            return e;
        }
        lex_.fail("expected identifier, integer or '('");
    }

    ExprPtr literal(bool negative) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Integer) lex_.fail("expected integer literal");
        const std::int64_t v = negative ? -t.value : t.value;
        if (v < INT32_MIN || v > INT32_MAX)
            throw Error("line " + std::to_string(t.line) + ":" + std::to_string(t.col) +
                        ": literal out of 32-bit range");
        auto e = std::make_unique<ExprNode>();
        e->kind = ExprNode::Kind::Literal;
        e->value = static_cast<std::int32_t>(v);
        return e;
    }

    static ExprPtr binary(char op, ExprPtr lhs, ExprPtr rhs) {
        auto e = std::make_unique<ExprNode>();
        e->kind = ExprNode::Kind::Binary;
        e->op = op;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return e;
    }

    bool is_punct(const char* p) const {
        return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
    }

    void expect(const char* p) {
        if (!is_punct(p)) lex_.fail(std::string("expected '") + p + "'");
        lex_.take();
    }

    Lexer lex_;
    std::set<std::string> defined_;
};

void walk_vars(const ExprNode& e, const std::function<void(const ExprNode&)>& fn) {
    if (e.kind == ExprNode::Kind::Var) fn(e);
    if (e.lhs) walk_vars(*e.lhs, fn);
    if (e.rhs) walk_vars(*e.rhs, fn);
}

} // namespace

KernelProgram parse_kernel(const std::string& text) {
    KernelProgram prog = Parser(text).parse();

    // Single assignment: a name that is assigned anywhere must not be read
    // before its own statement. Names never assigned are stream inputs.
    std::set<std::string> targets;
    for (const KernelStatement& st : prog.statements) targets.insert(st.target);
    std::set<std::string> defined;
    for (const KernelStatement& st : prog.statements) {
        walk_vars(*st.expr, [&](const ExprNode& v) {
            if (targets.count(v.name) && !defined.count(v.name))
                throw Error("line " + std::to_string(v.line) + ":" + std::to_string(v.col) +
                            ": use of '" + v.name + "' before its definition");
        });
        defined.insert(st.target);
    }
    return prog;
}

namespace {

struct Lowering {
    std::vector<std::string> inputs;      // free variables, first-use order
    std::vector<std::int32_t> lit_values; // distinct literals, first-use order
    std::map<std::int32_t, std::string> lit_ids;
    std::map<std::string, std::string> var_node; // kernel variable -> node id
    std::map<std::tuple<char, std::string, std::string>, std::string> cse;
    std::vector<DfgNode> arith_nodes;
    std::set<std::string> reserved; // every identifier in the source
    int temp_counter = 0;

    std::string fresh_temp() {
        std::string id;
        do {
            id = "t" + std::to_string(temp_counter++);
        } while (reserved.count(id));
        return id;
    }

    std::string literal_node(std::int32_t v) {
        auto it = lit_ids.find(v);
        if (it != lit_ids.end()) return it->second;
        std::string id = "const_" + std::string(v < 0 ? "m" : "") +
                         std::to_string(v < 0 ? -static_cast<std::int64_t>(v) : v);
        while (reserved.count(id)) id += "_";
        reserved.insert(id);
        lit_ids[v] = id;
        lit_values.push_back(v);
        return id;
    }

    std::string lower_expr(const ExprNode& e) {
        switch (e.kind) {
        case ExprNode::Kind::Var: {
            auto it = var_node.find(e.name);
            if (it != var_node.end()) return it->second;
            inputs.push_back(e.name); // free variable: new stream input
            var_node[e.name] = e.name;
            return e.name;
        }
        case ExprNode::Kind::Literal: return literal_node(e.value);
        case ExprNode::Kind::Binary: {
            const std::string lhs = lower_expr(*e.lhs);
            const std::string rhs = lower_expr(*e.rhs);
            const auto key = std::make_tuple(e.op, lhs, rhs);
            auto it = cse.find(key);
            if (it != cse.end()) return it->second;
            DfgNode n;
            n.id = fresh_temp();
            n.kind = e.op == '+' ? OpKind::Add : e.op == '-' ? OpKind::Sub : OpKind::Mul;
            n.operands = {lhs, rhs};
            arith_nodes.push_back(n);
            cse[key] = n.id;
            return n.id;
        }
        }
        throw ContractViolation("lower_expr: bad ExprNode");
    }
};

} // namespace

Dfg lower_to_dfg(const KernelProgram& prog) {
    Lowering lw;
    for (const KernelStatement& st : prog.statements) {
        lw.reserved.insert(st.target);
        walk_vars(*st.expr, [&](const ExprNode& v) { lw.reserved.insert(v.name); });
    }

    for (const KernelStatement& st : prog.statements)
        lw.var_node[st.target] = lw.lower_expr(*st.expr);

    Dfg dfg;
    for (const std::string& in : lw.inputs) dfg.nodes.push_back({in, OpKind::Input, {}});
    for (std::int32_t v : lw.lit_values) {
        const std::string id = lw.lit_ids.at(v);
        dfg.nodes.push_back({id, OpKind::Input, {}});
        dfg.consts[id] = v;
    }
    for (DfgNode& n : lw.arith_nodes) dfg.nodes.push_back(std::move(n));

    // Output nodes carry the declared variable name; the value node itself
    // is always a temp or an input, so the name is free.
    std::set<std::string> out_ids;
    for (const std::string& out : prog.outputs) {
        if (!out_ids.insert(out).second) throw Error("duplicate output '" + out + "'");
        dfg.nodes.push_back({out, OpKind::Output, {lw.var_node.at(out)}});
    }

    validate(dfg);
    return dfg;
}

} // namespace ovl
