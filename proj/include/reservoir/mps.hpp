#ifndef RESERVOIR_MPS_HPP
#define RESERVOIR_MPS_HPP

// Text dump of an lp::Problem in (free-format) MPS.
//
// Sections: NAME, OBJSENSE (always MAX), ROWS, COLUMNS, RHS, BOUNDS, ENDATA.
// Names never contain whitespace. Bounds default to [0, +inf); other bounds
// are written with LO/UP/MI/PL/FR/FX records. Numbers use 17 significant digits
// so a dump reloads to the same problem.

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reservoir/lp.hpp"

namespace reservoir::lp {

class MpsError : public std::runtime_error {
public:
    MpsError(std::size_t line, const std::string& what)
        : std::runtime_error("MPS line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string clean_name(const std::string& s, const std::string& fallback, std::set<std::string>& used) {
    std::string out = s.empty() ? fallback : s;
    for (char& c : out)
        if (c == ' ' || c == '\t') c = '_';
    if (!used.insert(out).second) {
        out = fallback;
        while (!used.insert(out).second) out += '_';
    }
    return out;
}

}  // namespace detail

inline void write_mps(std::ostream& os, const Problem& p) {
    std::set<std::string> used{"OBJ"};
    std::vector<std::string> vnames, rnames;
    for (std::size_t j = 0; j < p.variables.size(); ++j)
        vnames.push_back(detail::clean_name(p.variables[j].name, "X" + std::to_string(j), used));
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        rnames.push_back(detail::clean_name(p.constraints[i].name, "R" + std::to_string(i), used));

    // Column-major copy of the constraint matrix, duplicates merged.
    std::vector<std::map<std::size_t, double>> cols(p.variables.size());
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        for (const auto& t : p.constraints[i].terms) cols[t.var][i] += t.coef;

    os << "NAME          " << (p.name.empty() ? "LP" : p.name) << '\n';
    os << "OBJSENSE\n    MAX\n";
    os << "ROWS\n N  OBJ\n";
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const char* code = "L";
        if (p.constraints[i].relation == Relation::equal) code = "E";
        if (p.constraints[i].relation == Relation::greater_equal) code = "G";
        os << ' ' << code << "  " << rnames[i] << '\n';
    }
    os << "COLUMNS\n";
    for (std::size_t j = 0; j < p.variables.size(); ++j) {
        os << "    " << vnames[j] << "  OBJ  " << detail::num(p.variables[j].objective) << '\n';
        for (const auto& [row, coef] : cols[j])
            if (coef != 0.0) os << "    " << vnames[j] << "  " << rnames[row] << "  " << detail::num(coef) << '\n';
    }
    os << "RHS\n";
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
        if (p.constraints[i].rhs != 0.0) os << "    RHS  " << rnames[i] << "  " << detail::num(p.constraints[i].rhs) << '\n';
    os << "BOUNDS\n";
    for (std::size_t j = 0; j < p.variables.size(); ++j) {
        const auto& v = p.variables[j];
        const std::string& nm = vnames[j];
        if (v.lower == v.upper) {
            os << " FX BND  " << nm << "  " << detail::num(v.lower) << '\n';
            continue;
        }
        if (v.lower == -kInf && v.upper == kInf) {
            os << " FR BND  " << nm << '\n';
            continue;
        }
        if (v.lower == -kInf) os << " MI BND  " << nm << '\n';
        else if (v.lower != 0.0) os << " LO BND  " << nm << "  " << detail::num(v.lower) << '\n';
        if (v.upper != kInf) os << " UP BND  " << nm << "  " << detail::num(v.upper) << '\n';
    }
    os << "ENDATA\n";
}

inline Problem read_mps(std::istream& is) {
    enum class Section { none, name, objsense, rows, columns, rhs, bounds, done };
    Problem p;
    Section sec = Section::none;
    std::map<std::string, std::size_t> row_index, col_index;
    std::string objective_row;
    bool maximize = false;
    std::string line;
    std::size_t lineno = 0;

    auto parse_num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw MpsError(lineno, "expected a number, got '" + s + "'");
        }
    };
    auto column = [&](const std::string& name) {
        auto it = col_index.find(name);
        if (it != col_index.end()) return it->second;
        std::size_t j = p.add_variable(name, 0.0, kInf, 0.0);
        col_index.emplace(name, j);
        return j;
    };
    auto existing_column = [&](const std::string& name) {
        auto it = col_index.find(name);
        if (it == col_index.end()) throw MpsError(lineno, "unknown column '" + name + "'");
        return it->second;
    };
    auto apply = [&](const std::string& row, double value, auto&& on_row) {
        if (row == objective_row) return on_row(std::size_t(-1), value);
        auto it = row_index.find(row);
        if (it == row_index.end()) throw MpsError(lineno, "unknown row '" + row + "'");
        on_row(it->second, value);
    };

    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        bool header = line[0] != ' ' && line[0] != '\t';
        if (header) {
            const std::string& h = tok[0];
            if (h == "NAME") {
                sec = Section::name;
                if (tok.size() > 1) p.name = tok[1];
            } else if (h == "OBJSENSE") {
                sec = Section::objsense;
                if (tok.size() > 1) maximize = (tok[1] == "MAX" || tok[1] == "MAXIMIZE");
            } else if (h == "ROWS") sec = Section::rows;
            else if (h == "COLUMNS") sec = Section::columns;
            else if (h == "RHS") sec = Section::rhs;
            else if (h == "BOUNDS") sec = Section::bounds;
            else if (h == "RANGES") throw MpsError(lineno, "RANGES section is not supported");
            else if (h == "ENDATA") {
                sec = Section::done;
                break;
            } else throw MpsError(lineno, "unknown section '" + h + "'");
            continue;
        }
        switch (sec) {
            case Section::objsense:
                maximize = (tok[0] == "MAX" || tok[0] == "MAXIMIZE");
                break;
            case Section::rows: {
                if (tok.size() != 2) throw MpsError(lineno, "ROWS entry needs a type and a name");
                if (tok[0] == "N") {
                    if (objective_row.empty()) objective_row = tok[1];
                    break;
                }
                Relation rel;
                if (tok[0] == "L") rel = Relation::less_equal;
                else if (tok[0] == "G") rel = Relation::greater_equal;
                else if (tok[0] == "E") rel = Relation::equal;
                else throw MpsError(lineno, "unknown row type '" + tok[0] + "'");
                row_index[tok[1]] = p.add_constraint(tok[1], {}, rel, 0.0);
                break;
            }
            case Section::columns: {
                if (tok.size() != 3 && tok.size() != 5) throw MpsError(lineno, "COLUMNS entry has wrong arity");
                std::size_t j = column(tok[0]);
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    double v = parse_num(tok[k + 1]);
                    apply(tok[k], v, [&](std::size_t r, double c) {
                        if (r == std::size_t(-1)) p.variables[j].objective += c;
                        else p.constraints[r].terms.push_back({j, c});
                    });
                }
                break;
            }
            case Section::rhs: {
                if (tok.size() != 3 && tok.size() != 5) throw MpsError(lineno, "RHS entry has wrong arity");
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    double v = parse_num(tok[k + 1]);
                    apply(tok[k], v, [&](std::size_t r, double c) {
                        if (r != std::size_t(-1)) p.constraints[r].rhs = c;
                    });
                }
                break;
            }
            case Section::bounds: {
                if (tok.size() < 3) throw MpsError(lineno, "BOUNDS entry too short");
                const std::string& type = tok[0];
                auto& v = p.variables[existing_column(tok[2])];
                auto value = [&]() {
                    if (tok.size() < 4) throw MpsError(lineno, type + " bound needs a value");
                    return parse_num(tok[3]);
                };
                if (type == "UP") v.upper = value();
                else if (type == "LO") v.lower = value();
                else if (type == "FX") v.lower = v.upper = value();
                else if (type == "FR") v.lower = -kInf, v.upper = kInf;
                else if (type == "MI") v.lower = -kInf;
                else if (type == "PL") v.upper = kInf;
                else throw MpsError(lineno, "unknown bound type '" + type + "'");
                break;
            }
            default:
                throw MpsError(lineno, "data line outside of a section");
        }
    }
    if (sec != Section::done) throw MpsError(lineno, "missing ENDATA");
    if (!maximize)
        for (auto& v : p.variables) v.objective = -v.objective;
    return p;
}

}  // namespace reservoir::lp

#endif  // RESERVOIR_MPS_HPP
