#include "ceh/milp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ceh/errors.hpp"

namespace ceh {

std::string_view to_string(VarKind kind) {
    switch (kind) {
        case VarKind::PvUnits: return "n_pv";
        case VarKind::WtUnits: return "n_wt";
        case VarKind::BessUnits: return "n_bess";
        case VarKind::ChargerSelected: return "q";
        case VarKind::ChargeStart: return "x";
        case VarKind::BessMode: return "delta";
        case VarKind::BessCharge: return "p_ch";
        case VarKind::BessDischarge: return "p_dis";
        case VarKind::GridPower: return "p_grid";
        case VarKind::SocEnergy: return "soc";
        case VarKind::GridCost: return "c_el";
        case VarKind::ChargerPower: return "p_chg";
    }
    return "?";
}

std::string_view to_string(ConstraintFamily family) {
    switch (family) {
        case ConstraintFamily::PvLink: return "pv_link";
        case ConstraintFamily::WtLink: return "wt_link";
        case ConstraintFamily::SocRecursion: return "soc_recursion";
        case ConstraintFamily::SocBounds: return "soc_bounds";
        case ConstraintFamily::InitialSoc: return "initial_soc";
        case ConstraintFamily::BessPowerCaps: return "bess_power_caps";
        case ConstraintFamily::BessExclusivity: return "bess_exclusivity";
        case ConstraintFamily::ChargerLinking: return "charger_linking";
        case ConstraintFamily::ExactlyOneStart: return "exactly_one_start";
        case ConstraintFamily::Occupancy: return "occupancy";
        case ConstraintFamily::ChargerPower: return "charger_power";
        case ConstraintFamily::SymmetryInstall: return "symmetry_install";
        case ConstraintFamily::SymmetryUsage: return "symmetry_usage";
        case ConstraintFamily::GridBounds: return "grid_bounds";
        case ConstraintFamily::PriceRelaxation: return "price_relaxation";
        case ConstraintFamily::PowerBalance: return "power_balance";
    }
    return "?";
}

std::vector<ConstraintFamily> all_families() {
    std::vector<ConstraintFamily> out;
    for (int i = 0; i < kFamilyCount; ++i) out.push_back(static_cast<ConstraintFamily>(i));
    return out;
}

std::string VariableRef::name() const {
    std::string out(to_string(key.kind));
    const auto& i = key.idx;
    auto part = [&](char tag, int value) {
        if (value >= 0) out += fmt::format("_{}{}", tag, value);
    };
    part('p', i.p);
    part('w', i.w);
    part('b', i.b);
    part('c', i.c);
    part('v', i.v);
    part('r', i.tr);
    part('t', i.t);
    part('s', i.s);
    return out;
}

int MilpProblem::add_column(const VariableRef& var) {
    columns_.push_back(var);
    objective_.push_back(0.0);
    return static_cast<int>(columns_.size()) - 1;
}

void MilpProblem::add_row(std::vector<Term> terms, Relation relation, double rhs, ConstraintFamily family,
                          const VarIndex& where) {
    for (const auto& t : terms) {
        if (t.column < 0 || t.column >= column_count()) {
            throw std::out_of_range(fmt::format("row '{}' references unregistered column {}", to_string(family), t.column));
        }
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.column < b.column; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const auto& t : terms) {
        if (!merged.empty() && merged.back().column == t.column) {
            merged.back().coef += t.coef;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    rows_.push_back(Constraint{std::move(merged), relation, rhs, family, where});
}

void MilpProblem::add_cost(int column, double coef) { objective_.at(static_cast<std::size_t>(column)) += coef; }

std::size_t MilpProblem::nonzero_count() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.terms.size();
    return n;
}

int MilpProblem::integer_column_count() const {
    return static_cast<int>(std::count_if(columns_.begin(), columns_.end(), [](const VariableRef& v) { return v.integral(); }));
}

double MilpProblem::evaluate_objective(const std::vector<double>& values) const {
    double total = objective_constant_;
    for (std::size_t j = 0; j < objective_.size(); ++j) total += objective_[j] * values.at(j);
    return total;
}

double MilpProblem::max_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        worst = std::max({worst, columns_[j].lower - values.at(j), values.at(j) - columns_[j].upper});
    }
    for (const auto& r : rows_) {
        double activity = 0.0;
        for (const auto& t : r.terms) activity += t.coef * values.at(static_cast<std::size_t>(t.column));
        switch (r.relation) {
            case Relation::LessEqual: worst = std::max(worst, activity - r.rhs); break;
            case Relation::GreaterEqual: worst = std::max(worst, r.rhs - activity); break;
            case Relation::Equal: worst = std::max(worst, std::abs(activity - r.rhs)); break;
        }
    }
    return worst;
}

void MilpProblem::check_structure() const {
    for (const auto& v : columns_) {
        if (v.lower > v.upper) throw Error("column " + v.name() + " has inverted bounds");
        if (v.integral() && (!std::isfinite(v.lower) || !std::isfinite(v.upper))) {
            throw Error("integer column " + v.name() + " needs finite bounds");
        }
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (const auto& t : rows_[i].terms) {
            if (t.column < 0 || t.column >= column_count()) throw Error("row " + row_name(static_cast<int>(i)) + " references an unknown column");
        }
    }
}

std::string MilpProblem::row_name(int row) const {
    return fmt::format("{}_{}", to_string(rows_.at(static_cast<std::size_t>(row)).family), row);
}

void IndexMaps::insert(const VariableKey& key, int column) {
    if (column != static_cast<int>(keys_.size())) throw std::logic_error("IndexMaps columns must be inserted in order");
    if (!columns_.emplace(key, column).second) throw std::logic_error("duplicate variable key");
    keys_.push_back(key);
}

std::optional<int> IndexMaps::find(const VariableKey& key) const {
    const auto it = columns_.find(key);
    if (it == columns_.end()) return std::nullopt;
    return it->second;
}

int IndexMaps::at(const VariableKey& key) const {
    const auto it = columns_.find(key);
    if (it == columns_.end()) throw std::out_of_range(fmt::format("no column for variable of kind {}", to_string(key.kind)));
    return it->second;
}

namespace {
// Shortest representation that round-trips; MPS readers accept it.
std::string num(double v) { return fmt::format("{}", v); }
}  // namespace

void write_mps(const MilpProblem& problem, std::ostream& out, std::string_view name) {
    const auto& cols = problem.columns();
    const auto& rows = problem.rows();
    std::vector<std::vector<std::pair<int, double>>> by_column(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& t : rows[i].terms) by_column[static_cast<std::size_t>(t.column)].emplace_back(static_cast<int>(i), t.coef);
    }
    std::vector<std::string> row_names(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) row_names[i] = problem.row_name(static_cast<int>(i));

    fmt::print(out, "NAME {}\nOBJSENSE\n    MIN\nROWS\n N  COST\n", name);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const char* sense = rows[i].relation == Relation::LessEqual ? "L" : rows[i].relation == Relation::Equal ? "E" : "G";
        fmt::print(out, " {}  {}\n", sense, row_names[i]);
    }
    fmt::print(out, "COLUMNS\n");
    bool in_integer_block = false;
    int marker = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].integral() != in_integer_block) {
            fmt::print(out, "    MARKER{} 'MARKER' '{}'\n", marker++, cols[j].integral() ? "INTORG" : "INTEND");
            in_integer_block = cols[j].integral();
        }
        const auto cname = cols[j].name();
        const double cost = problem.objective()[j];
        if (cost != 0.0 || by_column[j].empty()) fmt::print(out, "    {} COST {}\n", cname, num(cost));
        for (const auto& [row, coef] : by_column[j]) fmt::print(out, "    {} {} {}\n", cname, row_names[static_cast<std::size_t>(row)], num(coef));
    }
    if (in_integer_block) fmt::print(out, "    MARKER{} 'MARKER' 'INTEND'\n", marker++);
    fmt::print(out, "RHS\n");
    if (problem.objective_constant() != 0.0) fmt::print(out, "    RHS COST {}\n", num(-problem.objective_constant()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].rhs != 0.0) fmt::print(out, "    RHS {} {}\n", row_names[i], num(rows[i].rhs));
    }
    fmt::print(out, "BOUNDS\n");
    for (const auto& c : cols) {
        const auto cname = c.name();
        if (c.type == VarType::Binary && c.lower == 0.0 && c.upper == 1.0) {
            fmt::print(out, " BV BND {}\n", cname);
            continue;
        }
        if (c.lower == c.upper) {
            fmt::print(out, " FX BND {} {}\n", cname, num(c.lower));
            continue;
        }
        if (std::isinf(c.lower) && std::isinf(c.upper)) {
            fmt::print(out, " FR BND {}\n", cname);
            continue;
        }
        if (std::isinf(c.lower)) {
            fmt::print(out, " MI BND {}\n", cname);
        } else if (c.lower != 0.0 || c.integral()) {
            fmt::print(out, " LO BND {} {}\n", cname, num(c.lower));
        }
        if (std::isfinite(c.upper)) fmt::print(out, " UP BND {} {}\n", cname, num(c.upper));
    }
    fmt::print(out, "ENDATA\n");
}

void write_constraint_dump(const MilpProblem& problem, std::ostream& out) {
    const auto& cols = problem.columns();
    for (auto family : all_families()) {
        std::size_t count = 0;
        for (const auto& r : problem.rows()) count += r.family == family ? 1 : 0;
        fmt::print(out, "# {} ({} rows)\n", to_string(family), count);
        for (std::size_t i = 0; i < problem.rows().size(); ++i) {
            const auto& r = problem.rows()[i];
            if (r.family != family) continue;
            fmt::print(out, "{}:", problem.row_name(static_cast<int>(i)));
            for (const auto& t : r.terms) fmt::print(out, " {:+} {}", t.coef, cols[static_cast<std::size_t>(t.column)].name());
            if (r.terms.empty()) fmt::print(out, " 0");
            const char* rel = r.relation == Relation::LessEqual ? "<=" : r.relation == Relation::Equal ? "=" : ">=";
            fmt::print(out, " {} {}\n", rel, num(r.rhs));
        }
    }
    fmt::print(out, "# objective\n");
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (problem.objective()[j] != 0.0) fmt::print(out, "{:+} {}\n", problem.objective()[j], cols[j].name());
    }
    if (problem.objective_constant() != 0.0) fmt::print(out, "{:+}\n", problem.objective_constant());
}

}  // namespace ceh
