#include "crn/parser.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace crn {

const char* to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::Syntax: return "SyntaxError";
        case ParseErrorKind::NegativeCoefficient: return "NegativeCoefficient";
        case ParseErrorKind::UnknownSpecies: return "UnknownSpecies";
        case ParseErrorKind::MissingRate: return "MissingRate";
        case ParseErrorKind::InvalidReaction: return "InvalidReaction";
        case ParseErrorKind::Duplicate: return "Duplicate";
        case ParseErrorKind::IncompleteInit: return "IncompleteInit";
    }
    return "ParseError";
}

namespace {

std::string describe(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message) {
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": " << to_string(kind) << ": " << message;
    return os.str();
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message)
    : InvalidInput(describe(kind, line, column, message)),
      kind_(kind),
      line_(line),
      column_(column),
      message_(message) {}

namespace {

struct Term {
    std::string name;
    int coeff = 1;
    SourcePos pos;
};

struct RawReaction {
    std::string id;
    SourcePos id_pos;
    std::vector<Term> lhs;
    std::vector<Term> rhs;
    std::optional<double> k_plus;
    std::optional<double> k_minus;
    SourcePos pos;
};

struct Named {
    std::string name;
    SourcePos pos;
};

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_reserved(std::string_view word) { return word == "species" || word == "init"; }

// Cursor over one line (comment already stripped).
class LineCursor {
public:
    LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool starts_with(std::string_view s) {
        skip_ws();
        return text_.substr(pos_).substr(0, s.size()) == s;
    }
    SourcePos here() {
        skip_ws();
        return {line_, pos_ + 1};
    }

    [[noreturn]] void fail(ParseErrorKind kind, const std::string& message) {
        const SourcePos p = here();
        throw ParseError(kind, p.line, p.column, message);
    }
    [[noreturn]] static void fail_at(ParseErrorKind kind, SourcePos p, const std::string& message) {
        throw ParseError(kind, p.line, p.column, message);
    }

    void expect(std::string_view token) {
        if (!starts_with(token)) fail(ParseErrorKind::Syntax, "expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    std::string identifier(const char* what) {
        skip_ws();
        if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(ParseErrorKind::Syntax, std::string("expected ") + what);
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    // Lookahead: identifier followed by `next` (after optional spaces).
    bool identifier_followed_by(char next) {
        skip_ws();
        std::size_t p = pos_;
        if (p >= text_.size() || !is_ident_start(text_[p])) return false;
        while (p < text_.size() && is_ident_char(text_[p])) ++p;
        while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t')) ++p;
        return p < text_.size() && text_[p] == next;
    }

    std::string_view peek_identifier() {
        skip_ws();
        std::size_t p = pos_;
        while (p < text_.size() && is_ident_char(text_[p])) ++p;
        if (p == pos_ || !is_ident_start(text_[pos_])) return {};
        return text_.substr(pos_, p - pos_);
    }

    // Real number token, locale independent.
    double number(const char* what) {
        skip_ws();
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() &&
               (is_digit(text_[end]) || text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E' ||
                ((text_[end] == '-' || text_[end] == '+') &&
                 (end == start || text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
            ++end;
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + end;
        const auto res = std::from_chars(first, last, value);
        if (end == start || res.ec != std::errc() || res.ptr != last || !std::isfinite(value))
            fail(ParseErrorKind::Syntax, std::string("expected ") + what);
        pos_ = end;
        return value;
    }

    // Optional stoichiometric coefficient before a species name.
    int coefficient() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '-')
            fail(ParseErrorKind::NegativeCoefficient, "stoichiometric coefficients must be nonnegative");
        if (pos_ >= text_.size() || !is_digit(text_[pos_])) return 1;
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && is_digit(text_[end])) ++end;
        if (end < text_.size() && (text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E' || text_[end] == '/'))
            fail(ParseErrorKind::Syntax,
                 "stoichiometric coefficients must be nonnegative integers; fractional values are not supported");
        int value = 0;
        const auto res = std::from_chars(text_.data() + start, text_.data() + end, value);
        if (res.ec != std::errc()) fail(ParseErrorKind::Syntax, "coefficient out of range");
        pos_ = end;
        return value;
    }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

std::vector<Term> parse_side(LineCursor& cur) {
    std::vector<Term> terms;
    for (;;) {
        Term t;
        t.pos = cur.here();
        t.coeff = cur.coefficient();
        const SourcePos name_pos = cur.here();
        t.name = cur.identifier("a species name");
        if (is_reserved(t.name))
            LineCursor::fail_at(ParseErrorKind::Syntax, name_pos, "'" + t.name + "' is a reserved word");
        t.pos = name_pos;
        terms.push_back(std::move(t));
        if (cur.peek() != '+') break;
        cur.expect("+");
    }
    return terms;
}

void parse_rates(LineCursor& cur, RawReaction& rx) {
    for (;;) {
        const SourcePos key_pos = cur.here();
        const std::string key = cur.identifier("'kf' or 'kr'");
        std::optional<double>* slot = nullptr;
        if (key == "kf") slot = &rx.k_plus;
        else if (key == "kr") slot = &rx.k_minus;
        else LineCursor::fail_at(ParseErrorKind::Syntax, key_pos, "unknown rate key '" + key + "', expected 'kf' or 'kr'");
        if (slot->has_value()) LineCursor::fail_at(ParseErrorKind::Duplicate, key_pos, "rate '" + key + "' given twice");
        cur.expect("=");
        const SourcePos value_pos = cur.here();
        const double v = cur.number("a rate constant");
        if (!(v > 0.0)) LineCursor::fail_at(ParseErrorKind::InvalidReaction, value_pos, "rate constants must be positive");
        *slot = v;
        if (cur.peek() != ',') break;
        cur.expect(",");
    }
}

}  // namespace

NetworkFile parse(std::string_view text) {
    std::vector<Named> declared;
    std::vector<RawReaction> raw_reactions;
    struct RawInit {
        Named species;
        double value;
    };
    std::vector<RawInit> raw_init;
    // Names in first-appearance order, for inference.
    std::vector<std::string> appearance;
    std::set<std::string> appeared;
    auto note = [&](const std::string& name) {
        if (appeared.insert(name).second) appearance.push_back(name);
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        start = end + 1;

        LineCursor cur(line, line_no);
        if (cur.at_end()) {
            if (end == text.size()) break;
            continue;
        }

        const std::string_view keyword = cur.peek_identifier();
        if (keyword == "species" && cur.identifier_followed_by(':')) {
            cur.expect("species");
            cur.expect(":");
            for (;;) {
                Named n;
                n.pos = cur.here();
                n.name = cur.identifier("a species name");
                if (is_reserved(n.name))
                    LineCursor::fail_at(ParseErrorKind::Syntax, n.pos, "'" + n.name + "' is a reserved word");
                declared.push_back(std::move(n));
                if (cur.at_end()) break;
                if (cur.peek() == ',') cur.expect(",");
            }
        } else if (keyword == "init" && !cur.identifier_followed_by(':')) {
            cur.expect("init");
            RawInit ri;
            ri.species.pos = cur.here();
            ri.species.name = cur.identifier("a species name");
            cur.expect("=");
            const SourcePos value_pos = cur.here();
            ri.value = cur.number("an initial concentration");
            if (ri.value < 0.0)
                LineCursor::fail_at(ParseErrorKind::Syntax, value_pos, "initial concentrations must be nonnegative");
            raw_init.push_back(std::move(ri));
        } else {
            RawReaction rx;
            rx.pos = cur.here();
            if (cur.identifier_followed_by(':')) {
                rx.id_pos = cur.here();
                rx.id = cur.identifier("a reaction id");
                if (is_reserved(rx.id))
                    LineCursor::fail_at(ParseErrorKind::Syntax, rx.id_pos, "'" + rx.id + "' is a reserved word");
                cur.expect(":");
            }
            rx.lhs = parse_side(cur);
            cur.expect("<=>");
            rx.rhs = parse_side(cur);
            if (cur.peek() == ';') {
                cur.expect(";");
                parse_rates(cur, rx);
            }
            for (const auto& t : rx.lhs) note(t.name);
            for (const auto& t : rx.rhs) note(t.name);
            raw_reactions.push_back(std::move(rx));
        }
        if (!cur.at_end()) cur.fail(ParseErrorKind::Syntax, "unexpected trailing input");
        if (end == text.size()) break;
    }

    NetworkFile file;
    file.strict_species = !declared.empty();
    std::map<std::string, std::size_t> index;
    if (file.strict_species) {
        for (const auto& d : declared) {
            if (!index.emplace(d.name, file.species.size()).second)
                LineCursor::fail_at(ParseErrorKind::Duplicate, d.pos, "species '" + d.name + "' declared twice");
            file.species.push_back(d.name);
        }
    } else {
        for (const auto& name : appearance) {
            index.emplace(name, file.species.size());
            file.species.push_back(name);
        }
    }
    auto lookup = [&](const std::string& name, SourcePos pos) {
        const auto it = index.find(name);
        if (it == index.end())
            LineCursor::fail_at(ParseErrorKind::UnknownSpecies, pos, "species '" + name + "' is not declared");
        return it->second;
    };

    const std::size_t n = file.species.size();
    std::set<std::string> ids;
    for (std::size_t k = 0; k < raw_reactions.size(); ++k) {
        RawReaction& raw = raw_reactions[k];
        ReactionEntry e;
        e.pos = raw.pos;
        e.alpha.assign(n, 0);
        e.beta.assign(n, 0);
        for (const auto& t : raw.lhs) e.alpha[lookup(t.name, t.pos)] += t.coeff;
        for (const auto& t : raw.rhs) e.beta[lookup(t.name, t.pos)] += t.coeff;
        const SourcePos id_pos = raw.id.empty() ? raw.pos : raw.id_pos;
        e.id = raw.id.empty() ? "R" + std::to_string(k + 1) : raw.id;
        if (!ids.insert(e.id).second)
            LineCursor::fail_at(ParseErrorKind::Duplicate, id_pos, "duplicate reaction id '" + e.id + "'");
        if (e.alpha == e.beta)
            LineCursor::fail_at(ParseErrorKind::InvalidReaction, raw.pos, "reactant and product sides are identical");
        e.k_plus = raw.k_plus;
        e.k_minus = raw.k_minus;
        file.reactions.push_back(std::move(e));
    }

    std::set<std::string> initialized;
    for (const auto& ri : raw_init) {
        lookup(ri.species.name, ri.species.pos);
        if (!initialized.insert(ri.species.name).second)
            LineCursor::fail_at(ParseErrorKind::Duplicate, ri.species.pos,
                                "initial value for '" + ri.species.name + "' given twice");
        file.init.push_back({ri.species.name, ri.value, ri.species.pos});
    }
    if (!raw_init.empty()) {
        for (const auto& name : file.species)
            if (!initialized.count(name))
                LineCursor::fail_at(ParseErrorKind::IncompleteInit, raw_init.front().species.pos,
                                    "init lines must cover every species; '" + name + "' has no initial value");
    }
    return file;
}

LoadedNetwork to_network(const NetworkFile& file, std::optional<DefaultRates> defaults) {
    std::vector<Reaction> reactions;
    reactions.reserve(file.reactions.size());
    for (const auto& e : file.reactions) {
        Reaction rx;
        rx.alpha = e.alpha;
        rx.beta = e.beta;
        rx.name = e.id;
        if (e.k_plus) rx.k_plus = *e.k_plus;
        else if (defaults) rx.k_plus = defaults->k_plus;
        else throw ParseError(ParseErrorKind::MissingRate, e.pos.line, e.pos.column, "reaction " + e.id + " has no kf and no default was supplied");
        if (e.k_minus) rx.k_minus = *e.k_minus;
        else if (defaults) rx.k_minus = defaults->k_minus;
        else throw ParseError(ParseErrorKind::MissingRate, e.pos.line, e.pos.column, "reaction " + e.id + " has no kr and no default was supplied");
        reactions.push_back(std::move(rx));
    }
    LoadedNetwork out{build_network(file.species, std::move(reactions)), std::nullopt};
    if (!file.init.empty()) {
        Vector c0 = Vector::Constant(static_cast<Eigen::Index>(file.species.size()), std::nan(""));
        for (const auto& ie : file.init)
            c0(static_cast<Eigen::Index>(*out.network.species_index(ie.species))) = ie.value;
        for (std::size_t i = 0; i < file.species.size(); ++i)
            if (std::isnan(c0(static_cast<Eigen::Index>(i))))
                throw InvalidInput("species '" + file.species[i] + "' has no initial value");
        out.c0 = std::move(c0);
    }
    return out;
}

std::string format_shortest(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string serialize(const ReactionNetwork& network, const std::optional<Vector>& c0) {
    std::ostringstream os;
    const auto& species = network.species();
    os << "species: ";
    for (std::size_t i = 0; i < species.size(); ++i) os << (i ? ", " : "") << species[i];
    os << '\n';
    auto side = [&](const std::vector<int>& coeffs) {
        bool first = true;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] == 0) continue;
            os << (first ? "" : " + ") << coeffs[i] << ' ' << species[i];
            first = false;
        }
    };
    for (const auto& rx : network.reactions()) {
        os << rx.name << ": ";
        side(rx.alpha);
        os << " <=> ";
        side(rx.beta);
        os << " ; kf=" << format_shortest(rx.k_plus) << ", kr=" << format_shortest(rx.k_minus) << '\n';
    }
    if (c0) {
        for (std::size_t i = 0; i < species.size(); ++i)
            os << "init " << species[i] << " = " << format_shortest((*c0)(static_cast<Eigen::Index>(i))) << '\n';
    }
    return os.str();
}

LoadedNetwork load_network_file(const std::string& path, std::optional<DefaultRates> defaults) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open network file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return to_network(parse(buf.str()), defaults);
}

}  // namespace crn
