#include "relfacts/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include "relfacts/errors.hpp"

namespace relfacts::scn {

namespace {

enum class TokKind {
    kIdent,
    kInt,
    kFloat,
    kString,
    kLParen,
    kRParen,
    kLBracket,
    kRBracket,
    kComma,
    kSemicolon,
    kEquals,
    kPlus,
    kMinus,
    kNewline,
    kEnd,
};

struct Token {
    TokKind kind = TokKind::kEnd;
    std::string text;
    double number = 0.0;
    std::uint64_t uint_value = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

struct Abort {
    ParseError error;
};

[[noreturn]] void fail(std::size_t line, std::size_t column, std::string message,
                       std::vector<std::string> expected = {}) {
    throw Abort{ParseError{line, column, std::move(message), std::move(expected)}};
}

[[noreturn]] void fail(const Token& at, std::string message,
                       std::vector<std::string> expected = {}) {
    fail(at.line, at.column, std::move(message), std::move(expected));
}

class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(source) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            if (c == '\n') {
                tokens.push_back(make(TokKind::kNewline, "\n"));
                advance();
                ++line_;
                column_ = 1;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                tokens.push_back(lex_number());
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                tokens.push_back(lex_ident());
                continue;
            }
            if (c == '"') {
                tokens.push_back(lex_string());
                continue;
            }
            TokKind kind;
            switch (c) {
                case '(': kind = TokKind::kLParen; break;
                case ')': kind = TokKind::kRParen; break;
                case '[': kind = TokKind::kLBracket; break;
                case ']': kind = TokKind::kRBracket; break;
                case ',': kind = TokKind::kComma; break;
                case ';': kind = TokKind::kSemicolon; break;
                case '=': kind = TokKind::kEquals; break;
                case '+': kind = TokKind::kPlus; break;
                case '-': kind = TokKind::kMinus; break;
                default:
                    fail(line_, column_, std::string("unexpected character '") + c + "'");
            }
            tokens.push_back(make(kind, std::string(1, c)));
            advance();
        }
        tokens.push_back(make(TokKind::kEnd, ""));
        return tokens;
    }

private:
    Token make(TokKind kind, std::string text) const {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.line = line_;
        t.column = column_;
        return t;
    }

    void advance() {
        ++pos_;
        ++column_;
    }

    Token lex_number() {
        const std::size_t start = pos_;
        const std::size_t line = line_, column = column_;
        bool is_float = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            is_float = true;
            advance();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                fail(line_, column_, "expected digits after decimal point");
            }
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            }
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            is_float = true;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                fail(line_, column_, "expected digits in exponent");
            }
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        Token t;
        t.kind = is_float ? TokKind::kFloat : TokKind::kInt;
        t.text = text;
        t.line = line;
        t.column = column;
        t.number = std::strtod(text.c_str(), nullptr);
        if (!is_float) {
            errno = 0;
            t.uint_value = std::strtoull(text.c_str(), nullptr, 10);
            if (errno == ERANGE) fail(line, column, "integer literal out of range");
        }
        return t;
    }

    Token lex_ident() {
        const std::size_t start = pos_;
        const std::size_t line = line_, column = column_;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                advance();
            } else {
                break;
            }
        }
        Token t;
        t.kind = TokKind::kIdent;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.line = line;
        t.column = column;
        return t;
    }

    Token lex_string() {
        const std::size_t line = line_, column = column_;
        advance();  // opening quote
        const std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
        if (pos_ >= src_.size() || src_[pos_] != '"') {
            fail(line, column, "unterminated string");
        }
        Token t;
        t.kind = TokKind::kString;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.line = line;
        t.column = column;
        advance();  // closing quote
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {
        "scenario",     "seed",      "system",    "apparatus",       "environment",
        "observer",     "state",     "observable", "premeasure",     "measure",
        "unitary-view", "decohere",  "stability-check", "cross-check", "dim",
        "ready",        "on",        "with",      "using",           "into",
        "overlap",      "partition", "target",    "against",         "i",
        std::string(kBuiltinSpinZ),  std::string(kBuiltinPointer),
    };
    return kw;
}

enum class PhysKind { kSystem, kApparatus, kEnvironment };

struct PhysInfo {
    PhysKind kind = PhysKind::kSystem;
    std::size_t dim = 0;
    std::size_t ready = 0;
};

struct ObsInfo {
    std::string target;
    bool on_observer = false;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ScenarioAst run() {
        while (true) {
            while (peek().kind == TokKind::kNewline) next();
            if (peek().kind == TokKind::kEnd) break;
            statement();
        }
        return std::move(ast_);
    }

    std::vector<Complex> complex_list() {
        std::vector<Complex> values;
        values.push_back(parse_complex());
        while (peek().kind == TokKind::kComma) {
            next();
            values.push_back(parse_complex());
        }
        if (peek().kind != TokKind::kEnd && peek().kind != TokKind::kNewline) {
            fail(peek(), "expected ',' or end of list", {","});
        }
        return values;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(index_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    const Token& next() {
        const Token& t = tokens_[index_];
        if (index_ + 1 < tokens_.size()) ++index_;
        return t;
    }

    const Token& expect(TokKind kind, const std::string& what) {
        if (peek().kind != kind) fail(peek(), "expected " + what, {what});
        return next();
    }

    const Token& expect_ident(const std::string& what) { return expect(TokKind::kIdent, what); }

    const Token& expect_keyword(const std::string& word) {
        if (peek().kind != TokKind::kIdent || peek().text != word) {
            fail(peek(), "expected '" + word + "'", {word});
        }
        return next();
    }

    std::uint64_t expect_uint(const std::string& what) {
        return expect(TokKind::kInt, what).uint_value;
    }

    double expect_number(const std::string& what) {
        if (peek().kind != TokKind::kInt && peek().kind != TokKind::kFloat) {
            fail(peek(), "expected " + what, {what});
        }
        return next().number;
    }

    void end_statement() {
        if (peek().kind == TokKind::kEnd) return;
        if (peek().kind != TokKind::kNewline) {
            fail(peek(), "expected end of statement", {"newline"});
        }
        next();
    }

    void check_fresh_label(const Token& tok, bool observer_namespace) {
        if (keywords().count(tok.text)) {
            fail(tok, "keyword '" + tok.text + "' cannot be used as a label");
        }
        if (observer_namespace) {
            if (observers_.count(tok.text)) fail(tok, "duplicate observer: " + tok.text);
        } else if (physical_.count(tok.text)) {
            fail(tok, "duplicate label: " + tok.text);
        }
    }

    const PhysInfo& require_physical(const Token& tok) {
        auto it = physical_.find(tok.text);
        if (it == physical_.end()) {
            fail(tok, "forward reference: '" + tok.text + "' is not a declared system",
                 {"declared system, apparatus, or environment"});
        }
        return it->second;
    }

    void require_observer(const Token& tok) {
        if (!observers_.count(tok.text)) {
            fail(tok, "forward reference: '" + tok.text + "' is not a declared observer",
                 {"declared observer"});
        }
    }

    // Product of the non-environment dimensions an observer describes.
    std::size_t observer_view_dim(const std::string& observer) const {
        std::size_t dim = 1;
        for (const std::string& label : phys_order_) {
            const PhysInfo& info = physical_.at(label);
            if (info.kind == PhysKind::kEnvironment || label == observer) continue;
            dim *= info.dim;
        }
        return dim;
    }

    Complex parse_complex() {
        double sign = 1.0;
        if (peek().kind == TokKind::kMinus || peek().kind == TokKind::kPlus) {
            if (next().text == "-") sign = -1.0;
        }
        const double re = sign * expect_number("number");
        if (peek().kind == TokKind::kIdent && peek().text == "i") {
            fail(peek(), "imaginary amplitudes need an explicit real part, e.g. 0+1i");
        }
        double im = 0.0;
        if (peek().kind == TokKind::kPlus || peek().kind == TokKind::kMinus) {
            const double im_sign = next().text == "-" ? -1.0 : 1.0;
            im = im_sign * expect_number("imaginary part");
            if (peek().kind != TokKind::kIdent || peek().text != "i") {
                fail(peek(), "expected 'i' after imaginary part", {"i"});
            }
            next();
        }
        return Complex{re, im};
    }

    std::vector<Complex> parse_amplitudes() {
        expect(TokKind::kLParen, "'('");
        std::vector<Complex> amps;
        amps.push_back(parse_complex());
        while (peek().kind == TokKind::kComma) {
            next();
            amps.push_back(parse_complex());
        }
        expect(TokKind::kRParen, "')'");
        return amps;
    }

    CMatrix parse_matrix(const Token& at) {
        expect(TokKind::kLBracket, "'['");
        std::vector<std::vector<Complex>> rows;
        while (true) {
            std::vector<Complex> row;
            row.push_back(parse_complex());
            while (peek().kind == TokKind::kComma) {
                next();
                row.push_back(parse_complex());
            }
            rows.push_back(std::move(row));
            if (peek().kind == TokKind::kSemicolon) {
                next();
                continue;
            }
            break;
        }
        expect(TokKind::kRBracket, "']'");
        const std::size_t cols = rows.front().size();
        std::vector<Complex> flat;
        for (const auto& row : rows) {
            if (row.size() != cols) fail(at, "ragged matrix literal");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        if (rows.size() != cols) fail(at, "dimension mismatch: observable matrix must be square");
        return CMatrix(rows.size(), cols, std::move(flat));
    }

    void statement() {
        const Token& head = peek();
        if (head.kind != TokKind::kIdent) {
            fail(head, "expected a statement keyword", {"statement keyword"});
        }
        const std::string word = head.text;
        if (word == "scenario") {
            next();
            if (saw_name_) fail(head, "scenario name already set");
            ast_.name = expect(TokKind::kString, "scenario name string").text;
            saw_name_ = true;
        } else if (word == "seed") {
            next();
            if (ast_.default_seed) fail(head, "seed already set");
            ast_.default_seed = expect_uint("seed integer");
        } else if (word == "system" || word == "apparatus" || word == "environment") {
            declare_physical(word);
        } else if (word == "observer") {
            next();
            const Token& label = expect_ident("observer label");
            check_fresh_label(label, true);
            observers_.insert(label.text);
            ast_.declarations.push_back({head.line, ObserverDecl{label.text}});
        } else if (word == "state") {
            declare_state();
        } else if (word == "observable") {
            declare_observable();
        } else if (word == "premeasure") {
            step_premeasure();
        } else if (word == "measure") {
            step_measure();
        } else if (word == "unitary-view") {
            next();
            const Token& obs = expect_ident("observer");
            require_observer(obs);
            ast_.steps.push_back({head.line, UnitaryViewStmt{obs.text}});
        } else if (word == "decohere") {
            step_decohere();
        } else if (word == "stability-check") {
            step_stability();
        } else if (word == "cross-check") {
            step_cross_check();
        } else {
            fail(head, "unknown keyword '" + word + "'", {"statement keyword"});
        }
        end_statement();
    }

    void declare_physical(const std::string& kind_word) {
        const Token& head = next();
        const Token& label = expect_ident("label");
        check_fresh_label(label, false);
        expect_keyword("dim");
        const Token& dim_tok = peek();
        const std::size_t dim = static_cast<std::size_t>(expect_uint("dimension"));
        if (dim == 0) fail(dim_tok, "dimension mismatch: dimension must be positive");

        std::size_t total = dim;
        if (total > (std::size_t{1} << 20)) {
            fail(dim_tok, "dimension mismatch: total dimension exceeds 2^20");
        }
        for (const auto& [_, info] : physical_) {
            if (total > (std::size_t{1} << 20) / info.dim) {
                fail(dim_tok, "dimension mismatch: total dimension exceeds 2^20");
            }
            total *= info.dim;
        }

        PhysInfo info;
        info.dim = dim;
        if (kind_word == "system") {
            info.kind = PhysKind::kSystem;
            ast_.declarations.push_back({head.line, SystemDecl{label.text, dim}});
        } else if (kind_word == "apparatus") {
            info.kind = PhysKind::kApparatus;
            expect_keyword("ready");
            const Token& ready_tok = peek();
            info.ready = static_cast<std::size_t>(expect_uint("ready index"));
            if (info.ready >= dim) {
                fail(ready_tok, "dimension mismatch: ready index must be below the dimension");
            }
            ast_.declarations.push_back({head.line, ApparatusDecl{label.text, dim, info.ready}});
        } else {
            info.kind = PhysKind::kEnvironment;
            ast_.declarations.push_back({head.line, EnvironmentDecl{label.text, dim}});
        }
        physical_.emplace(label.text, info);
        phys_order_.push_back(label.text);
    }

    void declare_state() {
        const Token& head = next();
        const Token& label = expect_ident("system label");
        const PhysInfo& info = require_physical(label);
        if (stated_.count(label.text)) fail(label, "state already declared for " + label.text);
        expect(TokKind::kEquals, "'='");
        const Token& open = peek();
        std::vector<Complex> amps = parse_amplitudes();
        if (amps.size() != info.dim) {
            fail(open, "dimension mismatch: expected " + std::to_string(info.dim) +
                           " amplitudes for '" + label.text + "'");
        }
        double norm_sq = 0.0;
        for (const Complex& a : amps) norm_sq += std::norm(a);
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-12) fail(open, "state has zero norm");
        double applied = 1.0;
        if (std::abs(norm - 1.0) > 1e-12) {
            for (Complex& a : amps) a /= norm;
            applied = norm;
        }
        stated_.insert(label.text);
        ast_.declarations.push_back({head.line, StateDecl{label.text, std::move(amps), applied}});
    }

    void declare_observable() {
        const Token& head = next();
        const Token& name = expect_ident("observable name");
        if (keywords().count(name.text)) {
            fail(name, "keyword '" + name.text + "' cannot be used as an observable name");
        }
        if (observables_.count(name.text)) fail(name, "duplicate observable: " + name.text);
        expect_keyword("on");
        const Token& target = expect_ident("target label");

        bool on_observer = false;
        std::size_t target_dim = 0;
        if (physical_.count(target.text)) {
            target_dim = physical_.at(target.text).dim;
        } else if (observers_.count(target.text)) {
            on_observer = true;
            target_dim = observer_view_dim(target.text);
        } else {
            fail(target, "forward reference: '" + target.text + "' is not declared",
                 {"declared system or observer"});
        }

        expect(TokKind::kEquals, "'='");
        ObservableDecl decl;
        decl.name = name.text;
        decl.target = target.text;
        if (peek().kind == TokKind::kIdent && peek().text == kBuiltinSpinZ) {
            next();
            decl.kind = ObservableKind::kSpinZ;
            if (target_dim != 2) {
                fail(target, "dimension mismatch: spin-z needs a 2-dimensional target");
            }
        } else if (peek().kind == TokKind::kIdent && peek().text == kBuiltinPointer) {
            next();
            decl.kind = ObservableKind::kPointer;
        } else if (peek().kind == TokKind::kLBracket) {
            const Token& open = peek();
            decl.kind = ObservableKind::kMatrix;
            decl.matrix = parse_matrix(open);
            if (decl.matrix.rows() != target_dim) {
                fail(open, "dimension mismatch: matrix side " +
                               std::to_string(decl.matrix.rows()) + " does not match target '" +
                               target.text + "' of dimension " + std::to_string(target_dim));
            }
            if (!decl.matrix.is_hermitian(kInvariantTol)) {
                fail(open, "observable matrix is not Hermitian");
            }
        } else {
            fail(peek(), "expected 'spin-z', 'pointer', or a matrix literal",
                 {"spin-z", "pointer", "matrix"});
        }
        observables_.emplace(name.text, ObsInfo{target.text, on_observer});
        ast_.declarations.push_back({head.line, std::move(decl)});
    }

    // Observable reference in a step where the acted-on system is known.
    void require_observable_for(const Token& name, const Token& system,
                                const PhysInfo& system_info) {
        if (name.text == kBuiltinSpinZ) {
            if (system_info.dim != 2) {
                fail(system, "dimension mismatch: spin-z needs a 2-dimensional target");
            }
            return;
        }
        if (name.text == kBuiltinPointer) return;
        auto it = observables_.find(name.text);
        if (it == observables_.end()) {
            fail(name, "forward reference: '" + name.text + "' is not a declared observable",
                 {"declared observable", "spin-z", "pointer"});
        }
        if (it->second.target != system.text) {
            fail(name, "observable '" + name.text + "' does not act on '" + system.text + "'");
        }
    }

    void step_premeasure() {
        const Token& head = next();
        const Token& system = expect_ident("system label");
        const PhysInfo& sys_info = require_physical(system);
        expect_keyword("with");
        const Token& apparatus = expect_ident("apparatus label");
        const PhysInfo& app_info = require_physical(apparatus);
        if (app_info.kind != PhysKind::kApparatus) {
            fail(apparatus, "'" + apparatus.text + "' is not a declared apparatus");
        }
        expect_keyword("using");
        const Token& obs = expect_ident("observable");
        require_observable_for(obs, system, sys_info);
        ast_.steps.push_back({head.line, PremeasureStmt{system.text, apparatus.text, obs.text}});
    }

    void step_measure() {
        const Token& head = next();
        const Token& observer = expect_ident("observer");
        require_observer(observer);
        const Token& obs = expect_ident("observable");
        expect_keyword("on");
        const Token& system = expect_ident("system label");
        const PhysInfo& sys_info = require_physical(system);
        require_observable_for(obs, system, sys_info);
        MeasureStmt stmt{observer.text, obs.text, system.text, std::nullopt};
        if (peek().kind == TokKind::kIdent && peek().text == "seed") {
            next();
            stmt.seed = expect_uint("seed integer");
        }
        ast_.steps.push_back({head.line, std::move(stmt)});
    }

    void step_decohere() {
        const Token& head = next();
        const Token& target = expect_ident("target label");
        const PhysInfo& target_info = require_physical(target);
        if (target_info.kind == PhysKind::kEnvironment) {
            fail(target, "decohere target must be a system or apparatus");
        }
        expect_keyword("into");
        const Token& env = expect_ident("environment label");
        const PhysInfo& env_info = require_physical(env);
        if (env_info.kind != PhysKind::kEnvironment) {
            fail(env, "'" + env.text + "' is not a declared environment");
        }
        expect_keyword("overlap");
        const Token& overlap_tok = peek();
        const double overlap = expect_number("overlap value");
        if (overlap < 0.0 || overlap > 1.0) {
            fail(overlap_tok, "overlap must lie in [0, 1]");
        }
        const std::size_t branches = target_info.kind == PhysKind::kApparatus
                                         ? std::max<std::size_t>(target_info.dim - 1, 1)
                                         : target_info.dim;
        if (env_info.dim < branches) {
            fail(env, "dimension mismatch: environment '" + env.text +
                          "' is too small for the target's branches");
        }
        ast_.steps.push_back({head.line, DecohereStmt{target.text, env.text, overlap}});
    }

    void step_stability() {
        const Token& head = next();
        const Token& observer = expect_ident("observer");
        require_observer(observer);
        expect_keyword("partition");
        const Token& partition = expect_ident("partition observable");
        if (!observables_.count(partition.text)) {
            fail(partition, "forward reference: '" + partition.text +
                                "' is not a declared observable",
                 {"declared observable"});
        }
        expect_keyword("target");
        const Token& target = expect_ident("target observable");
        if (!observables_.count(target.text)) {
            fail(target, "forward reference: '" + target.text + "' is not a declared observable",
                 {"declared observable"});
        }
        ast_.steps.push_back({head.line, StabilityStmt{observer.text, partition.text, target.text}});
    }

    void step_cross_check() {
        const Token& head = next();
        const Token& observer = expect_ident("observer");
        require_observer(observer);
        expect_keyword("against");
        const Token& friend_obs = expect_ident("observer");
        require_observer(friend_obs);
        if (observer.text == friend_obs.text) {
            fail(friend_obs, "an observer cannot cross-check against itself");
        }
        ast_.steps.push_back({head.line, CrossCheckStmt{observer.text, friend_obs.text}});
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    ScenarioAst ast_;
    bool saw_name_ = false;

    std::map<std::string, PhysInfo> physical_;
    std::vector<std::string> phys_order_;
    std::set<std::string> observers_;
    std::map<std::string, ObsInfo> observables_;
    std::set<std::string> stated_;
};

}  // namespace

bool ObservableDecl::operator==(const ObservableDecl& other) const {
    if (name != other.name || target != other.target || kind != other.kind) return false;
    if (kind != ObservableKind::kMatrix) return true;
    if (matrix.rows() != other.matrix.rows() || matrix.cols() != other.matrix.cols()) return false;
    const auto a = matrix.entries();
    const auto b = other.matrix.entries();
    return std::equal(a.begin(), a.end(), b.begin());
}

ParseResult parse(std::string_view source) {
    try {
        Lexer lexer(source);
        Parser parser(lexer.run());
        return parser.run();
    } catch (const Abort& abort) {
        return abort.error;
    } catch (const Error& e) {
        return ParseError{1, 1, e.what(), {}};
    }
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_complex(Complex value) {
    std::string out = format_double(value.real());
    if (value.imag() != 0.0) {
        if (value.imag() < 0.0) {
            out += "-" + format_double(-value.imag());
        } else {
            out += "+" + format_double(value.imag());
        }
        out += "i";
    }
    return out;
}

namespace {

std::string format_matrix(const CMatrix& m) {
    std::string out = "[";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r != 0) out += "; ";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c != 0) out += ", ";
            out += format_complex(m.at(r, c));
        }
    }
    out += "]";
    return out;
}

struct DeclPrinter {
    std::string operator()(const SystemDecl& d) const {
        return "system " + d.label + " dim " + std::to_string(d.dim);
    }
    std::string operator()(const ApparatusDecl& d) const {
        return "apparatus " + d.label + " dim " + std::to_string(d.dim) + " ready " +
               std::to_string(d.ready);
    }
    std::string operator()(const EnvironmentDecl& d) const {
        return "environment " + d.label + " dim " + std::to_string(d.dim);
    }
    std::string operator()(const ObserverDecl& d) const { return "observer " + d.label; }
    std::string operator()(const StateDecl& d) const {
        std::string out = "state " + d.label + " = (";
        for (std::size_t i = 0; i < d.amplitudes.size(); ++i) {
            if (i != 0) out += ", ";
            out += format_complex(d.amplitudes[i]);
        }
        return out + ")";
    }
    std::string operator()(const ObservableDecl& d) const {
        std::string out = "observable " + d.name + " on " + d.target + " = ";
        switch (d.kind) {
            case ObservableKind::kSpinZ: return out + std::string(kBuiltinSpinZ);
            case ObservableKind::kPointer: return out + std::string(kBuiltinPointer);
            case ObservableKind::kMatrix: return out + format_matrix(d.matrix);
        }
        return out;
    }
};

struct StepPrinter {
    std::string operator()(const PremeasureStmt& s) const {
        return "premeasure " + s.system + " with " + s.apparatus + " using " + s.observable;
    }
    std::string operator()(const MeasureStmt& s) const {
        std::string out = "measure " + s.observer + " " + s.observable + " on " + s.system;
        if (s.seed) out += " seed " + std::to_string(*s.seed);
        return out;
    }
    std::string operator()(const UnitaryViewStmt& s) const { return "unitary-view " + s.observer; }
    std::string operator()(const DecohereStmt& s) const {
        return "decohere " + s.target + " into " + s.env + " overlap " + format_double(s.overlap);
    }
    std::string operator()(const StabilityStmt& s) const {
        return "stability-check " + s.observer + " partition " + s.partition + " target " +
               s.target;
    }
    std::string operator()(const CrossCheckStmt& s) const {
        return "cross-check " + s.observer + " against " + s.friend_observer;
    }
};

}  // namespace

std::string print(const ScenarioAst& ast) {
    std::string out;
    if (!ast.name.empty()) out += "scenario \"" + ast.name + "\"\n";
    if (ast.default_seed) out += "seed " + std::to_string(*ast.default_seed) + "\n";
    for (const Declaration& decl : ast.declarations) {
        out += std::visit(DeclPrinter{}, decl.node) + "\n";
    }
    for (const Step& step : ast.steps) {
        out += std::visit(StepPrinter{}, step.node) + "\n";
    }
    return out;
}

std::variant<std::vector<Complex>, ParseError> parse_complex_list(std::string_view text) {
    try {
        Lexer lexer(text);
        Parser parser(lexer.run());
        return parser.complex_list();
    } catch (const Abort& abort) {
        return abort.error;
    } catch (const Error& e) {
        return ParseError{1, 1, e.what(), {}};
    }
}

}  // namespace relfacts::scn
