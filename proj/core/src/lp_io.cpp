#include "trackflow/lp_io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace trackflow::lp {

namespace {

struct Token {
    enum Kind { Number, Ident, Plus, Minus, Rel, End } kind;
    double value = 0.0;
    std::string text;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#') {
            break;
        } else if (c == '+') {
            toks.push_back({Token::Plus, 0.0, ""});
            ++i;
        } else if (c == '-') {
            toks.push_back({Token::Minus, 0.0, ""});
            ++i;
        } else if (c == '*') {
            ++i;  // optional multiplication sign
        } else if (c == '<' || c == '>' || c == '=') {
            std::string rel(1, c);
            ++i;
            if (i < line.size() && line[i] == '=') {
                rel += '=';
                ++i;
            }
            toks.push_back({Token::Rel, 0.0, rel});
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(line.substr(i), &used);
            toks.push_back({Token::Number, v, ""});
            i += used;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < line.size() &&
                   (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
                ++j;
            toks.push_back({Token::Ident, 0.0, line.substr(i, j - i)});
            i = j;
        } else {
            throw std::invalid_argument(std::string("lp parse: unexpected character '") + c + "'");
        }
    }
    toks.push_back({Token::End, 0.0, ""});
    return toks;
}

// Parses a linear expression starting at position `pos`; stops at a relation
// token or end. Returns coefficients by variable name plus a constant term.
void parse_expression(const std::vector<Token>& toks, std::size_t& pos,
                      std::map<std::string, double>& coeffs, double& constant) {
    double sign = 1.0;
    bool expect_term = true;
    while (true) {
        const Token& t = toks[pos];
        if (t.kind == Token::End || t.kind == Token::Rel) break;
        if (t.kind == Token::Plus) {
            sign = 1.0;
            expect_term = true;
            ++pos;
        } else if (t.kind == Token::Minus) {
            sign = expect_term ? -sign : -1.0;
            expect_term = true;
            ++pos;
        } else if (t.kind == Token::Number) {
            double v = sign * t.value;
            ++pos;
            if (toks[pos].kind == Token::Ident) {
                coeffs[toks[pos].text] += v;
                ++pos;
            } else {
                constant += v;
            }
            sign = 1.0;
            expect_term = false;
        } else if (t.kind == Token::Ident) {
            coeffs[t.text] += sign;
            ++pos;
            sign = 1.0;
            expect_term = false;
        }
    }
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

LinearProgram parse_lp_text(const std::string& text) {
    enum Section { None, Objective, Constraints, Bounds, Done };
    Section section = None;

    LinearProgram lp;
    std::map<std::string, int> var_index;
    auto var_id = [&](const std::string& name) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        const int id = static_cast<int>(var_index.size());
        var_index[name] = id;
        return id;
    };

    struct RawRow {
        std::map<std::string, double> coeffs;
        Relation rel;
        double rhs;
    };
    std::map<std::string, double> obj;
    std::vector<RawRow> raw_rows;
    struct RawBound {
        std::string var;
        bool free = false;
        Relation rel = Relation::GreaterEqual;
        double value = 0.0;
    };
    std::vector<RawBound> raw_bounds;
    bool have_objective = false;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<Token> toks = tokenize(line);
        if (toks.size() == 1) continue;  // blank / comment line

        if (toks[0].kind == Token::Ident) {
            const std::string word = upper(toks[0].text);
            if (word == "MAXIMIZE" || word == "MAX") {
                lp.sense = Sense::Maximize;
                section = Objective;
                if (toks.size() > 2) throw std::invalid_argument("lp parse: junk after MAXIMIZE");
                continue;
            }
            if (word == "MINIMIZE" || word == "MIN") {
                lp.sense = Sense::Minimize;
                section = Objective;
                if (toks.size() > 2) throw std::invalid_argument("lp parse: junk after MINIMIZE");
                continue;
            }
            if (word == "SUBJECT" || word == "ST") {
                section = Constraints;
                continue;
            }
            if (word == "BOUNDS") {
                section = Bounds;
                continue;
            }
            if (word == "END") {
                section = Done;
                continue;
            }
        }

        switch (section) {
            case Objective: {
                std::size_t pos = 0;
                double constant = 0.0;
                parse_expression(toks, pos, obj, constant);
                if (toks[pos].kind != Token::End)
                    throw std::invalid_argument("lp parse: relation in objective");
                have_objective = true;
                break;
            }
            case Constraints: {
                std::size_t pos = 0;
                RawRow row;
                double lhs_const = 0.0;
                parse_expression(toks, pos, row.coeffs, lhs_const);
                if (toks[pos].kind != Token::Rel)
                    throw std::invalid_argument("lp parse: constraint without relation");
                const std::string rel = toks[pos].text;
                ++pos;
                std::map<std::string, double> rhs_coeffs;
                double rhs_const = 0.0;
                parse_expression(toks, pos, rhs_coeffs, rhs_const);
                for (const auto& [name, c] : rhs_coeffs) row.coeffs[name] -= c;
                row.rhs = rhs_const - lhs_const;
                if (rel == "<=" || rel == "<") row.rel = Relation::LessEqual;
                else if (rel == ">=" || rel == ">") row.rel = Relation::GreaterEqual;
                else row.rel = Relation::Equal;
                raw_rows.push_back(std::move(row));
                break;
            }
            case Bounds: {
                if (toks[0].kind == Token::Ident && toks.size() >= 3 &&
                    toks[1].kind == Token::Ident && upper(toks[1].text) == "FREE") {
                    raw_bounds.push_back({toks[0].text, true, Relation::GreaterEqual, 0.0});
                    break;
                }
                // forms: var <= num, var >= num, var = num, num <= var, ...
                std::size_t pos = 0;
                std::map<std::string, double> lhs;
                double lhs_const = 0.0;
                parse_expression(toks, pos, lhs, lhs_const);
                if (toks[pos].kind != Token::Rel)
                    throw std::invalid_argument("lp parse: malformed bound line");
                std::string rel = toks[pos].text;
                ++pos;
                std::map<std::string, double> rhs;
                double rhs_const = 0.0;
                parse_expression(toks, pos, rhs, rhs_const);
                std::string name;
                double value = 0.0;
                if (lhs.size() == 1 && rhs.empty()) {
                    name = lhs.begin()->first;
                    value = rhs_const;
                } else if (rhs.size() == 1 && lhs.empty()) {
                    name = rhs.begin()->first;
                    value = lhs_const;
                    if (rel == "<=" || rel == "<") rel = ">=";
                    else if (rel == ">=" || rel == ">") rel = "<=";
                } else {
                    throw std::invalid_argument("lp parse: bound must involve a single variable");
                }
                RawBound b;
                b.var = name;
                b.value = value;
                if (rel == "<=" || rel == "<") b.rel = Relation::LessEqual;
                else if (rel == ">=" || rel == ">") b.rel = Relation::GreaterEqual;
                else b.rel = Relation::Equal;
                raw_bounds.push_back(std::move(b));
                break;
            }
            case None:
            case Done:
                throw std::invalid_argument("lp parse: content outside any section");
        }
    }
    if (!have_objective && section == None)
        throw std::invalid_argument("lp parse: missing objective section");

    // Register variables in order of first appearance.
    for (const auto& [name, c] : obj) var_id(name);
    for (const auto& row : raw_rows)
        for (const auto& [name, c] : row.coeffs) var_id(name);
    for (const auto& b : raw_bounds) var_id(b.var);

    const int n = static_cast<int>(var_index.size());
    lp.objective.assign(n, 0.0);
    lp.var_names.resize(n);
    for (const auto& [name, id] : var_index) lp.var_names[id] = name;
    for (const auto& [name, c] : obj) lp.objective[var_index[name]] = c;
    for (const auto& row : raw_rows) {
        std::vector<double> r(n, 0.0);
        for (const auto& [name, c] : row.coeffs) r[var_index[name]] = c;
        lp.rows.push_back(std::move(r));
        lp.rhs.push_back(row.rhs);
        lp.relations.push_back(row.rel);
    }
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, std::nullopt);
    for (const auto& b : raw_bounds) {
        const int j = var_index[b.var];
        if (b.free) {
            lp.lower[j] = std::nullopt;
            lp.upper[j] = std::nullopt;
        } else if (b.rel == Relation::GreaterEqual) {
            lp.lower[j] = b.value;
        } else if (b.rel == Relation::LessEqual) {
            lp.upper[j] = b.value;
        } else {
            lp.lower[j] = b.value;
            lp.upper[j] = b.value;
        }
    }
    lp.validate();
    return lp;
}

LinearProgram read_lp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open LP file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lp_text(buf.str());
}

void print_result(std::ostream& os, const LinearProgram& lp, const SolveResult& result) {
    switch (result.status) {
        case SolveStatus::Optimal: {
            os << "OPTIMAL z=" << result.objective << "\n";
            for (int j = 0; j < lp.num_vars(); ++j)
                os << "  " << lp.var_name(j) << " = " << result.x[j] << "\n";
            os << "dual:";
            for (double y : result.dual) os << " " << y;
            os << "\n";
            break;
        }
        case SolveStatus::Unbounded: {
            os << "UNBOUNDED\n";
            os << "feasible point:";
            for (double v : result.x) os << " " << v;
            os << "\nimproving ray:";
            for (double v : result.ray) os << " " << v;
            os << "\n";
            break;
        }
        case SolveStatus::Infeasible: {
            os << "INFEASIBLE (auxiliary optimum " << result.phase1_objective << ")\n";
            os << "farkas:";
            for (double v : result.farkas_rows) os << " " << v;
            os << "\n";
            break;
        }
    }
    const CertificateReport rep = check_certificates(lp, result);
    os << "certificates: " << (rep.pass ? "ok" : "FAILED") << "\n";
    for (const auto& v : rep.violations) os << "  violated: " << v << "\n";
}

}  // namespace trackflow::lp
