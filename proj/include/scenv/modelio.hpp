#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "scenv/distribution.hpp"
#include "scenv/errors.hpp"
#include "scenv/model.hpp"
#include "scenv/polynomial.hpp"

namespace scenv {

// Parse result: the model plus the joint distribution declared inline.
struct ParsedModel {
    ParametricModel model;
    ParameterDistribution dist;
    int version = 1;
};

namespace modelio_detail {

enum class Tok {
    Ident, Number, LBrace, RBrace, LParen, RParen, Colon, Comma, Plus, Minus, Star, Caret,
    Equals, Arrow, DDash, RArrowHead, End
};

struct Token {
    Tok kind;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                t.text += take();
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Tok::Number;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                t.text += take();
            if (pos_ < text_.size() && text_[pos_] == '.') {
                t.text += take();
                if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    throw SyntaxError(line_, col_, "digits expected after decimal point");
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    t.text += take();
            } else if (pos_ < text_.size() && text_[pos_] == '/') {
                t.text += take();
                if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    throw SyntaxError(line_, col_, "digits expected after '/'");
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    t.text += take();
            }
            return t;
        }
        switch (c) {
            case '{': take(); t.kind = Tok::LBrace; return t;
            case '}': take(); t.kind = Tok::RBrace; return t;
            case '(': take(); t.kind = Tok::LParen; return t;
            case ')': take(); t.kind = Tok::RParen; return t;
            case ':': take(); t.kind = Tok::Colon; return t;
            case ',': take(); t.kind = Tok::Comma; return t;
            case '+': take(); t.kind = Tok::Plus; return t;
            case '*': take(); t.kind = Tok::Star; return t;
            case '^': take(); t.kind = Tok::Caret; return t;
            case '=': take(); t.kind = Tok::Equals; return t;
            case '>': take(); t.kind = Tok::RArrowHead; return t;
            case '-': {
                take();
                if (pos_ < text_.size() && text_[pos_] == '-') {
                    take();
                    if (pos_ < text_.size() && text_[pos_] == '>') {
                        take();
                        t.kind = Tok::Arrow; // "-->"
                        return t;
                    }
                    t.kind = Tok::DDash; // "--"
                    return t;
                }
                t.kind = Tok::Minus;
                return t;
            }
            default:
                throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
        }
    }

private:
    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') take();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else {
                break;
            }
        }
    }
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

inline bool is_keyword(const std::string& s) {
    static const char* kw[] = {"umdp", "name",   "kind",     "param",  "simplex", "state",
                               "init", "target", "goal",     "cost",   "uniform", "discrete",
                               "dirichlet", "mc", "mdp"};
    for (const char* k : kw)
        if (s == k) return true;
    return false;
}

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) { advance(); }

    ParsedModel parse() {
        ParsedModel out;
        // header
        if (cur_.kind != Tok::Ident || cur_.text != "umdp")
            throw SyntaxError(cur_.line, cur_.col, "expected header");
        advance();
        out.version = static_cast<int>(expect_integer("format version"));
        expect_ident_kw("name");
        out.model.name = expect_name("model name");
        expect_ident_kw("kind");
        std::string kind = expect_name("model kind", true);
        if (kind != "mc" && kind != "mdp")
            throw SyntaxError(cur_.line, cur_.col, "kind must be 'mc' or 'mdp'");
        is_mc_ = kind == "mc";

        while (cur_.kind != Tok::End) parse_item(out);

        finalize(out);
        return out;
    }

private:
    void parse_item(ParsedModel& out) {
        if (cur_.kind != Tok::Ident)
            throw SyntaxError(cur_.line, cur_.col, "expected declaration or transition");
        if (cur_.text == "param") return parse_param(out);
        if (cur_.text == "simplex") return parse_simplex(out);
        if (cur_.text == "state") return parse_state(out);
        if (cur_.text == "cost") return parse_cost(out);
        return parse_transition(out);
    }

    void parse_param(ParsedModel& out) {
        advance();
        std::string pname = expect_name("parameter name");
        expect(Tok::Colon, "':'");
        if (cur_.kind != Tok::Ident)
            throw SyntaxError(cur_.line, cur_.col, "expected distribution or 'cost'");
        std::string what = cur_.text;
        if (what == "cost") {
            advance();
            out.model.add_parameter(pname, ParamKind::ControllableCost);
            return;
        }
        VarId v = out.model.add_parameter(pname, ParamKind::Uncontrollable);
        if (what == "uniform") {
            advance();
            expect(Tok::LParen, "'('");
            double lo = expect_number("lower bound");
            expect(Tok::Comma, "','");
            double hi = expect_number("upper bound");
            expect(Tok::RParen, "')'");
            try {
                out.dist.add_uniform(v, lo, hi);
            } catch (const ConfigError& e) {
                throw SyntaxError(cur_.line, cur_.col, e.what());
            }
        } else if (what == "discrete") {
            advance();
            expect(Tok::LBrace, "'{'");
            std::vector<double> vals, probs;
            for (;;) {
                vals.push_back(expect_number("value"));
                expect(Tok::Colon, "':'");
                probs.push_back(expect_number("probability"));
                if (cur_.kind == Tok::Comma) { advance(); continue; }
                break;
            }
            expect(Tok::RBrace, "'}'");
            try {
                out.dist.add_discrete(v, std::move(vals), std::move(probs));
            } catch (const ConfigError& e) {
                throw SyntaxError(cur_.line, cur_.col, e.what());
            }
        } else {
            throw SyntaxError(cur_.line, cur_.col, "unknown distribution '" + what + "'");
        }
    }

    void parse_simplex(ParsedModel& out) {
        advance();
        expect_name("simplex group name"); // group label, kept for readability
        expect(Tok::Colon, "':'");
        expect_ident_kw("dirichlet");
        expect(Tok::LParen, "'('");
        std::vector<double> weights;
        for (;;) {
            weights.push_back(expect_number("weight"));
            if (cur_.kind == Tok::Comma) { advance(); continue; }
            break;
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Minus, "'->'");
        expect(Tok::RArrowHead, "'->'");
        std::vector<VarId> vars;
        while (cur_.kind == Tok::Ident && !is_keyword(cur_.text)) {
            vars.push_back(out.model.add_parameter(cur_.text, ParamKind::Uncontrollable));
            advance();
        }
        if (vars.empty()) throw SyntaxError(cur_.line, cur_.col, "simplex group needs parameters");
        try {
            out.dist.add_dirichlet(std::move(vars), std::move(weights));
        } catch (const ConfigError& e) {
            throw SyntaxError(cur_.line, cur_.col, e.what());
        }
    }

    void parse_state(ParsedModel& out) {
        advance();
        std::string sname = expect_name("state name");
        StateId s = out.model.add_state(sname);
        while (cur_.kind == Tok::Ident &&
               (cur_.text == "init" || cur_.text == "target" || cur_.text == "goal")) {
            if (cur_.text == "init") {
                if (saw_init_) throw SemanticError("more than one init state");
                saw_init_ = true;
                out.model.set_initial(s);
            } else if (cur_.text == "target") {
                out.model.mark_target(s);
            } else {
                out.model.mark_goal(s);
            }
            advance();
        }
    }

    void parse_transition(ParsedModel& out) {
        std::string sname = cur_.text;
        int line = cur_.line, col = cur_.col;
        advance();
        auto sid = out.model.find_state(sname);
        if (!sid) throw SyntaxError(line, col, "unknown state '" + sname + "'");
        std::string action = "_";
        if (cur_.kind == Tok::DDash) {
            advance();
            action = expect_name("action name");
            expect(Tok::Arrow, "'-->'");
            if (is_mc_)
                throw SyntaxError(line, col, "named actions are not allowed in an mc document");
        } else {
            expect(Tok::Arrow, "'-->'");
        }
        ActionId a = out.model.intern_action(action);
        expect(Tok::LBrace, "'{'");
        std::vector<ParametricEdge> edges;
        for (;;) {
            std::string tname = expect_name("successor state");
            auto tid = out.model.find_state(tname);
            if (!tid) throw SyntaxError(cur_.line, cur_.col, "unknown state '" + tname + "'");
            expect(Tok::Colon, "':'");
            edges.push_back({*tid, parse_poly(out)});
            if (cur_.kind == Tok::Comma) {
                advance();
                if (cur_.kind == Tok::RBrace) break; // trailing comma
                continue;
            }
            break;
        }
        expect(Tok::RBrace, "'}'");
        out.model.add_row(*sid, a, std::move(edges));
    }

    void parse_cost(ParsedModel& out) {
        advance();
        expect(Tok::LParen, "'('");
        std::string sname = expect_name("state name");
        auto sid = out.model.find_state(sname);
        if (!sid) throw SyntaxError(cur_.line, cur_.col, "unknown state '" + sname + "'");
        std::string action = "_";
        if (cur_.kind == Tok::Comma) {
            advance();
            action = expect_name("action name");
        }
        expect(Tok::RParen, "')'");
        expect(Tok::Equals, "'='");
        Polynomial p = parse_poly(out);
        attach_cost(out, *sid, action, std::move(p));
    }

    void attach_cost(ParsedModel& out, StateId s, const std::string& action, Polynomial p) {
        ActionId a = out.model.intern_action(action);
        if (!out.model.set_cost(s, a, std::move(p)))
            throw SemanticError("cost declared for a transition that does not exist");
    }

    // expression := term (('+'|'-') term)*
    Polynomial parse_poly(ParsedModel& out) {
        Polynomial acc = parse_term(out);
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            bool plus = cur_.kind == Tok::Plus;
            advance();
            Polynomial rhs = parse_term(out);
            acc = plus ? acc + rhs : acc - rhs;
        }
        return acc;
    }

    // term := factor ('*' factor)*
    Polynomial parse_term(ParsedModel& out) {
        Polynomial acc = parse_factor(out);
        while (cur_.kind == Tok::Star) {
            advance();
            acc = acc * parse_factor(out);
        }
        return acc;
    }

    // factor := '-' factor | atom ('^' INT)?
    Polynomial parse_factor(ParsedModel& out) {
        if (cur_.kind == Tok::Minus) {
            advance();
            return -parse_factor(out);
        }
        Polynomial base = parse_atom(out);
        if (cur_.kind == Tok::Caret) {
            advance();
            long e = expect_integer("exponent");
            if (e < 0) throw SyntaxError(cur_.line, cur_.col, "exponent must be nonnegative");
            return Polynomial::pow(base, static_cast<std::uint32_t>(e));
        }
        return base;
    }

    Polynomial parse_atom(ParsedModel& out) {
        if (cur_.kind == Tok::Number) {
            Rational q = parse_rational(cur_.text);
            advance();
            return Polynomial(std::move(q));
        }
        if (cur_.kind == Tok::Ident && !is_keyword(cur_.text)) {
            auto v = out.model.find_parameter(cur_.text);
            if (!v)
                throw SyntaxError(cur_.line, cur_.col, "unknown parameter '" + cur_.text + "'");
            advance();
            return Polynomial::variable(*v);
        }
        if (cur_.kind == Tok::LParen) {
            advance();
            Polynomial p = parse_poly(out);
            expect(Tok::RParen, "')'");
            return p;
        }
        if (cur_.kind == Tok::DDash)
            throw SyntaxError(cur_.line, cur_.col, "unexpected '--' in expression");
        throw SyntaxError(cur_.line, cur_.col, "expected number, parameter, or '('");
    }

    void finalize(ParsedModel& out) {
        if (out.model.num_states() == 0) throw SemanticError("document declares no states");
        if (!saw_init_) throw SemanticError("no state carries the init label");
        if (is_mc_ && !out.model.is_mc())
            throw SemanticError("kind is mc but some state has several actions");
        auto diags = out.model.validate();
        if (!diags.empty()) throw SemanticError(diags.front().message);
        out.dist.check_coverage(out.model);
    }

    void advance() { cur_ = lex_.next(); }

    void expect(Tok kind, const std::string& what) {
        if (cur_.kind != kind)
            throw SyntaxError(cur_.line, cur_.col, "expected " + what);
        advance();
    }

    void expect_ident_kw(const std::string& kw) {
        if (cur_.kind != Tok::Ident || cur_.text != kw)
            throw SyntaxError(cur_.line, cur_.col, "expected '" + kw + "'");
        advance();
    }

    std::string expect_name(const std::string& what, bool allow_keyword = false) {
        if (cur_.kind != Tok::Ident || (!allow_keyword && is_keyword(cur_.text)))
            throw SyntaxError(cur_.line, cur_.col, "expected " + what);
        std::string s = cur_.text;
        advance();
        return s;
    }

    long expect_integer(const std::string& what) {
        if (cur_.kind != Tok::Number || cur_.text.find_first_of("./") != std::string::npos)
            throw SyntaxError(cur_.line, cur_.col, "expected integer " + what);
        long v = std::stol(cur_.text);
        advance();
        return v;
    }

    double expect_number(const std::string& what) {
        if (cur_.kind != Tok::Number)
            throw SyntaxError(cur_.line, cur_.col, "expected " + what);
        double v = to_double(parse_rational(cur_.text));
        advance();
        return v;
    }

    Lexer lex_;
    Token cur_;
    bool is_mc_ = true;
    bool saw_init_ = false;
};

// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    for (int prec = 1; prec <= 17; ++prec) {
        std::ostringstream os;
        os.precision(prec);
        os << v;
        if (std::stod(os.str()) == v) return os.str();
    }
    return std::to_string(v);
}

} // namespace modelio_detail

inline ParsedModel parse_model(const std::string& text) {
    modelio_detail::Parser p(text);
    return p.parse();
}

inline std::vector<std::string> param_names(const ParametricModel& m) {
    std::vector<std::string> names;
    for (const auto& p : m.parameters()) names.push_back(p.name);
    return names;
}

// Deterministic text form; parse(serialize(m)) is structurally equal to m,
// including exact rational coefficients.
inline std::string serialize_model(const ParsedModel& pm) {
    const ParametricModel& m = pm.model;
    std::ostringstream os;
    os << "umdp " << pm.version << "\n";
    os << "name " << m.name << "\n";
    os << "kind " << (m.is_mc() ? "mc" : "mdp") << "\n\n";

    int group = 0;
    for (const auto& b : pm.dist.blocks()) {
        if (auto* u = std::get_if<UniformBlock>(&b)) {
            os << "param " << m.parameters()[u->var].name << " : uniform("
               << modelio_detail::format_double(u->lo) << ", "
               << modelio_detail::format_double(u->hi) << ")\n";
        } else if (auto* d = std::get_if<DiscreteBlock>(&b)) {
            os << "param " << m.parameters()[d->var].name << " : discrete{";
            for (std::size_t i = 0; i < d->values.size(); ++i) {
                if (i) os << ", ";
                os << modelio_detail::format_double(d->values[i]) << ": "
                   << modelio_detail::format_double(d->probs[i]);
            }
            os << "}\n";
        } else {
            const auto& dir = std::get<DirichletBlock>(b);
            os << "simplex g" << group++ << " : dirichlet(";
            for (std::size_t i = 0; i < dir.weights.size(); ++i) {
                if (i) os << ", ";
                os << modelio_detail::format_double(dir.weights[i]);
            }
            os << ") ->";
            for (VarId v : dir.vars) os << " " << m.parameters()[v].name;
            os << "\n";
        }
    }
    for (VarId v = 0; v < m.num_params(); ++v)
        if (m.parameters()[v].kind == ParamKind::ControllableCost)
            os << "param " << m.parameters()[v].name << " : cost\n";
    os << "\n";

    for (StateId s = 0; s < m.num_states(); ++s) {
        os << "state " << m.state_names()[s];
        if (s == m.initial()) os << " init";
        if (m.target_flags()[s]) os << " target";
        if (m.goal_flags()[s]) os << " goal";
        os << "\n";
    }
    os << "\n";

    for (StateId s = 0; s < m.num_states(); ++s) {
        for (const auto& row : m.rows()[s]) {
            os << m.state_names()[s];
            if (m.is_mc()) os << " --> {";
            else os << " --" << m.action_names()[row.action] << "--> {";
            for (std::size_t i = 0; i < row.edges.size(); ++i) {
                if (i) os << ",";
                os << " " << m.state_names()[row.edges[i].succ] << ": "
                   << row.edges[i].prob.to_string(param_names(m));
            }
            os << " }\n";
        }
    }

    bool any_cost = false;
    for (StateId s = 0; s < m.num_states(); ++s)
        for (const auto& row : m.rows()[s])
            if (row.cost) any_cost = true;
    if (any_cost) {
        os << "\n";
        for (StateId s = 0; s < m.num_states(); ++s)
            for (const auto& row : m.rows()[s]) {
                if (!row.cost) continue;
                os << "cost(" << m.state_names()[s];
                if (!m.is_mc()) os << ", " << m.action_names()[row.action];
                os << ") = " << row.cost->to_string(param_names(m)) << "\n";
            }
    }
    return os.str();
}

} // namespace scenv
