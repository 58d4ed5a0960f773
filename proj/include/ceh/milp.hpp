#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ceh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Decision variable kinds of the hub model.
enum class VarKind : std::uint8_t {
    PvUnits,          // n_p
    WtUnits,          // n_w
    BessUnits,        // n_b
    ChargerSelected,  // q_c
    ChargeStart,      // x_{v,c,t_r,s}
    BessMode,         // delta_{t,s} (or delta_{b,t,s})
    BessCharge,       // P^ch_{b,t,s}
    BessDischarge,    // P^dis_{b,t,s}
    GridPower,        // P^g_{t,s}
    SocEnergy,        // E_{b,t,s}
    GridCost,         // C^el_{t,s}
    ChargerPower,     // P_{c,t,s}
};

std::string_view to_string(VarKind kind);

enum class VarType : std::uint8_t { Continuous, Integer, Binary };

/// Indices of a variable or row. All indices are 0-based; unused ones are -1.
/// `tr` is the start offset after arrival, so a ChargeStart variable with
/// offset tr starts charging in 1-based slot arrival_slot + tr.
struct VarIndex {
    int p = -1;
    int w = -1;
    int b = -1;
    int c = -1;
    int v = -1;
    int t = -1;
    int tr = -1;
    int s = -1;

    auto operator<=>(const VarIndex&) const = default;
};

struct VariableKey {
    VarKind kind{};
    VarIndex idx;

    auto operator<=>(const VariableKey&) const = default;
};

struct VariableRef {
    VariableKey key;
    double lower = 0.0;
    double upper = kInf;
    VarType type = VarType::Continuous;

    bool integral() const { return type != VarType::Continuous; }
    /// Column name without spaces, stable across builds.
    std::string name() const;

    bool operator==(const VariableRef&) const = default;
};

enum class Relation : std::uint8_t { LessEqual, Equal, GreaterEqual };

/// Constraint families of the hub model. Every row carries one of these as
/// its provenance tag; the validator reports violations by the same names.
/// PvLink, WtLink and GridBounds have no rows of their own: PV and wind
/// output enter the balance as coefficients and grid limits are column
/// bounds.
enum class ConstraintFamily : std::uint8_t {
    PvLink,
    WtLink,
    SocRecursion,
    SocBounds,
    InitialSoc,
    BessPowerCaps,
    BessExclusivity,
    ChargerLinking,
    ExactlyOneStart,
    Occupancy,
    ChargerPower,
    SymmetryInstall,
    SymmetryUsage,
    GridBounds,
    PriceRelaxation,
    PowerBalance,
};

inline constexpr int kFamilyCount = 16;

std::string_view to_string(ConstraintFamily family);
std::vector<ConstraintFamily> all_families();

struct Term {
    int column = 0;
    double coef = 0.0;

    bool operator==(const Term&) const = default;
};

struct Constraint {
    std::vector<Term> terms;  // sorted by column, no duplicates, no zeros
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
    ConstraintFamily family{};
    VarIndex where;  // indices the row is quantified over

    bool operator==(const Constraint&) const = default;
};

/// Sparse MILP in row form: minimize c'x + k subject to rows and column
/// bounds. Columns are registered once; rows may only reference registered
/// columns.
class MilpProblem {
public:
    int add_column(const VariableRef& var);
    /// Normalizes the terms (merges duplicates, drops zeros, sorts) and
    /// appends the row. Throws std::out_of_range for unknown columns.
    void add_row(std::vector<Term> terms, Relation relation, double rhs, ConstraintFamily family,
                 const VarIndex& where = {});

    void add_cost(int column, double coef);
    void set_objective_constant(double k) { objective_constant_ = k; }

    const std::vector<VariableRef>& columns() const { return columns_; }
    const std::vector<Constraint>& rows() const { return rows_; }
    const std::vector<double>& objective() const { return objective_; }
    double objective_constant() const { return objective_constant_; }

    int column_count() const { return static_cast<int>(columns_.size()); }
    int row_count() const { return static_cast<int>(rows_.size()); }
    std::size_t nonzero_count() const;
    int integer_column_count() const;

    /// Objective value of a full assignment.
    double evaluate_objective(const std::vector<double>& values) const;
    /// Largest bound or row violation of a full assignment (0 when feasible).
    double max_violation(const std::vector<double>& values) const;

    /// Throws ceh::Error when a row references an unknown column, an integer
    /// column has an infinite bound, or bounds are inverted.
    void check_structure() const;

    /// Row name used in exports: family plus row number.
    std::string row_name(int row) const;

    bool operator==(const MilpProblem&) const = default;

private:
    std::vector<VariableRef> columns_;
    std::vector<Constraint> rows_;
    std::vector<double> objective_;
    double objective_constant_ = 0.0;
};

/// Bidirectional map between variable keys and column numbers, plus the
/// dimensions the model was built with.
class IndexMaps {
public:
    void insert(const VariableKey& key, int column);
    std::optional<int> find(const VariableKey& key) const;
    /// Throws std::out_of_range when the key is not registered.
    int at(const VariableKey& key) const;
    const VariableKey& key(int column) const { return keys_.at(static_cast<std::size_t>(column)); }
    std::size_t size() const { return keys_.size(); }

    int slot_count = 0;
    int scenario_count = 0;
    int candidate_count = 0;
    /// Longest departure - arrival over all sessions.
    int max_parked_slots = 0;

    bool operator==(const IndexMaps& other) const { return keys_ == other.keys_; }

private:
    std::map<VariableKey, int> columns_;
    std::vector<VariableKey> keys_;
};

/// Writes the problem in free-format MPS.
void write_mps(const MilpProblem& problem, std::ostream& out, std::string_view name = "ceh");

/// Human-readable listing of every row grouped by provenance tag.
void write_constraint_dump(const MilpProblem& problem, std::ostream& out);

}  // namespace ceh
