#include "ceh/lp_dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ceh/errors.hpp"

namespace ceh::lp {

namespace {

using Real = long double;
constexpr Real kInfL = std::numeric_limits<Real>::infinity();
constexpr Real kFeasTol = 1e-9L;
constexpr Real kPivotTol = 1e-11L;
constexpr int kMaxPresolvePasses = 64;

struct LocalRow {
    std::vector<std::pair<int, Real>> terms;  // local column, coefficient
    Relation relation = Relation::LessEqual;
    Real rhs = 0.0L;
    bool active = true;
};

Real tol_for(Real rhs) { return kFeasTol * std::max<Real>(1.0L, std::fabs(rhs)); }

enum class Presolve { Ok, Infeasible };

/// Folds rows into column bounds until nothing changes. Rows whose activity
/// range already satisfies them are dropped; singleton rows become bounds.
Presolve presolve(std::vector<LocalRow>& rows, std::vector<Real>& lo, std::vector<Real>& hi) {
    auto tighten_upper = [&](int k, Real v) {
        if (v < hi[k]) hi[k] = v;
    };
    auto tighten_lower = [&](int k, Real v) {
        if (v > lo[k]) lo[k] = v;
    };
    for (int pass = 0; pass < kMaxPresolvePasses; ++pass) {
        bool changed = false;
        for (auto& row : rows) {
            if (!row.active) continue;
            Real min_act = 0.0L;
            Real max_act = 0.0L;
            Real fixed_sum = 0.0L;
            int open = 0;
            int open_col = -1;
            Real open_coef = 0.0L;
            for (const auto& [k, a] : row.terms) {
                if (lo[k] == hi[k]) {
                    fixed_sum += a * lo[k];
                    min_act += a * lo[k];
                    max_act += a * lo[k];
                    continue;
                }
                ++open;
                open_col = k;
                open_coef = a;
                if (a > 0) {
                    min_act += a * lo[k];
                    max_act += a * hi[k];
                } else {
                    min_act += a * hi[k];
                    max_act += a * lo[k];
                }
            }
            const Real tol = tol_for(row.rhs);
            const bool upper_side = row.relation != Relation::GreaterEqual;
            const bool lower_side = row.relation != Relation::LessEqual;
            if (upper_side && min_act > row.rhs + tol) return Presolve::Infeasible;
            if (lower_side && max_act < row.rhs - tol) return Presolve::Infeasible;
            const bool upper_ok = !upper_side || max_act <= row.rhs;
            const bool lower_ok = !lower_side || min_act >= row.rhs;
            if (upper_ok && lower_ok) {
                row.active = false;
                changed = true;
                continue;
            }
            if (open == 0) {
                // Within tolerance but not exact; nothing left to adjust.
                row.active = false;
                changed = true;
                continue;
            }
            if (open == 1) {
                const Real bound = (row.rhs - fixed_sum) / open_coef;
                const bool gives_upper = open_coef > 0 ? upper_side : lower_side;
                const bool gives_lower = open_coef > 0 ? lower_side : upper_side;
                if (gives_upper) tighten_upper(open_col, bound);
                if (gives_lower) tighten_lower(open_col, bound);
                if (lo[open_col] > hi[open_col]) {
                    if (lo[open_col] > hi[open_col] + tol_for(lo[open_col])) return Presolve::Infeasible;
                    hi[open_col] = lo[open_col];
                }
                row.active = false;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return Presolve::Ok;
}

/// Bounded-variable primal simplex on a dense tableau. All variables have
/// lower bound 0 and upper bound ub (possibly infinite).
class Tableau {
public:
    Tableau(int m, int n) : m_(m), n_(n), t_(static_cast<std::size_t>(m) * n, 0.0L), ub_(n, kInfL),
                            at_upper_(n, false), basic_row_(n, -1), basis_(m, -1), xb_(m, 0.0L) {}

    Real& at(int i, int j) { return t_[static_cast<std::size_t>(i) * n_ + j]; }
    Real at(int i, int j) const { return t_[static_cast<std::size_t>(i) * n_ + j]; }

    void set_basic(int i, int j, Real value) {
        basis_[i] = j;
        basic_row_[j] = i;
        xb_[i] = value;
    }

    std::vector<Real>& ub() { return ub_; }

    Real value(int j) const {
        if (basic_row_[j] >= 0) return xb_[basic_row_[j]];
        return at_upper_[j] ? ub_[j] : 0.0L;
    }

    /// Minimizes cost'y over the current basis; columns with allowed[j]
    /// false never enter. Returns false when unbounded.
    bool optimize(const std::vector<Real>& cost, const std::vector<bool>& allowed, int& iterations) {
        Real scale = 1.0L;
        for (Real c : cost) scale = std::max(scale, std::fabs(c));
        const Real dual_tol = 1e-12L * scale;
        std::vector<Real> d(cost);
        for (int i = 0; i < m_; ++i) {
            const Real cb = cost[basis_[i]];
            if (cb == 0.0L) continue;
            for (int j = 0; j < n_; ++j) d[j] -= cb * at(i, j);
        }
        const int max_iterations = 50 * (m_ + n_) + 1000;
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n_; ++j) {
                if (basic_row_[j] >= 0 || !allowed[j] || ub_[j] <= 0.0L) continue;
                if ((!at_upper_[j] && d[j] < -dual_tol) || (at_upper_[j] && d[j] > dual_tol)) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            if (++iterations > max_iterations) {
                throw NumericalFailure(fmt::format("NumericalFailure: dense simplex exceeded {} iterations", max_iterations));
            }
            const Real dir = at_upper_[enter] ? -1.0L : 1.0L;
            Real theta = ub_[enter];
            int leave = -1;
            for (int i = 0; i < m_; ++i) {
                const Real alpha = dir * at(i, enter);
                Real limit;
                if (alpha > kPivotTol) {
                    limit = xb_[i] / alpha;
                } else if (alpha < -kPivotTol && ub_[basis_[i]] < kInfL) {
                    limit = (ub_[basis_[i]] - xb_[i]) / -alpha;
                } else {
                    continue;
                }
                limit = std::max(limit, 0.0L);
                if (limit < theta || (limit == theta && leave >= 0 && basis_[i] < basis_[leave])) {
                    theta = limit;
                    leave = i;
                }
            }
            if (theta == kInfL) return false;
            for (int i = 0; i < m_; ++i) xb_[i] -= theta * dir * at(i, enter);
            if (leave < 0) {
                at_upper_[enter] = !at_upper_[enter];
                continue;
            }
            const int out = basis_[leave];
            const Real alpha_r = dir * at(leave, enter);
            const Real entering_value = (at_upper_[enter] ? ub_[enter] : 0.0L) + dir * theta;
            pivot(leave, enter, d);
            basic_row_[out] = -1;
            at_upper_[out] = alpha_r < 0;
            if (at_upper_[out] && ub_[out] == kInfL) at_upper_[out] = false;
            at_upper_[enter] = false;
            basis_[leave] = enter;
            basic_row_[enter] = leave;
            xb_[leave] = entering_value;
        }
    }

    int rows() const { return m_; }
    int basis(int i) const { return basis_[i]; }
    Real& xb(int i) { return xb_[i]; }

private:
    void pivot(int r, int c, std::vector<Real>& d) {
        const Real p = at(r, c);
        for (int j = 0; j < n_; ++j) at(r, j) /= p;
        at(r, c) = 1.0L;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const Real f = at(i, c);
            if (f == 0.0L) continue;
            for (int j = 0; j < n_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0L;
        }
        const Real f = d[c];
        if (f != 0.0L) {
            for (int j = 0; j < n_; ++j) d[j] -= f * at(r, j);
            d[c] = 0.0L;
        }
    }

    int m_;
    int n_;
    std::vector<Real> t_;
    std::vector<Real> ub_;
    std::vector<bool> at_upper_;
    std::vector<int> basic_row_;
    std::vector<int> basis_;
    std::vector<Real> xb_;
};

/// One tableau column standing for a (part of a) local column:
/// x_local = offset + sign * y.
struct Structural {
    int local = 0;
    Real offset = 0.0L;
    Real sign = 1.0L;
    Real ub = kInfL;
};

}  // namespace

LpResult solve_dense(const LpView& view) {
    const auto& problem = *view.problem;
    const auto& lower = *view.lower;
    const auto& upper = *view.upper;
    const auto& cols = *view.columns;
    const int nloc = static_cast<int>(cols.size());

    std::vector<int> local_of(static_cast<std::size_t>(problem.column_count()), -1);
    for (int k = 0; k < nloc; ++k) local_of[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])] = k;

    std::vector<Real> lo(static_cast<std::size_t>(nloc));
    std::vector<Real> hi(static_cast<std::size_t>(nloc));
    for (int k = 0; k < nloc; ++k) {
        const auto c = static_cast<std::size_t>(cols[static_cast<std::size_t>(k)]);
        lo[static_cast<std::size_t>(k)] = lower[c];
        hi[static_cast<std::size_t>(k)] = upper[c];
    }

    LpResult result;
    result.values.assign(static_cast<std::size_t>(problem.column_count()), 0.0);

    std::vector<LocalRow> rows;
    rows.reserve(view.rows->size());
    for (int r : *view.rows) {
        const auto& row = problem.rows()[static_cast<std::size_t>(r)];
        LocalRow local;
        local.relation = row.relation;
        local.rhs = row.rhs;
        for (const auto& t : row.terms) {
            const int k = local_of[static_cast<std::size_t>(t.column)];
            if (k >= 0) {
                local.terms.emplace_back(k, t.coef);
            } else {
                local.rhs -= static_cast<Real>(t.coef) * lower[static_cast<std::size_t>(t.column)];
                result.values[static_cast<std::size_t>(t.column)] = lower[static_cast<std::size_t>(t.column)];
            }
        }
        rows.push_back(std::move(local));
    }
    for (int k = 0; k < nloc; ++k) {
        if (lo[static_cast<std::size_t>(k)] > hi[static_cast<std::size_t>(k)]) return result;
    }
    if (presolve(rows, lo, hi) == Presolve::Infeasible) return result;

    // Tableau columns: structurals, then one slack per inequality row, then
    // artificials where no slack can start in the basis.
    std::vector<Structural> structurals;
    std::vector<int> first_structural(static_cast<std::size_t>(nloc), -1);
    for (int k = 0; k < nloc; ++k) {
        const Real l = lo[static_cast<std::size_t>(k)];
        const Real h = hi[static_cast<std::size_t>(k)];
        if (l == h) continue;
        first_structural[static_cast<std::size_t>(k)] = static_cast<int>(structurals.size());
        if (l > -kInfL) {
            structurals.push_back({k, l, 1.0L, h - l});
        } else if (h < kInfL) {
            structurals.push_back({k, h, -1.0L, kInfL});
        } else {
            structurals.push_back({k, 0.0L, 1.0L, kInfL});
            structurals.push_back({k, 0.0L, -1.0L, kInfL});
        }
    }
    std::vector<const LocalRow*> active;
    for (const auto& row : rows) {
        if (row.active) active.push_back(&row);
    }
    const int m = static_cast<int>(active.size());
    const int ns = static_cast<int>(structurals.size());

    // Row data in y space: A y (rel) b.
    std::vector<std::vector<std::pair<int, Real>>> ay(static_cast<std::size_t>(m));
    std::vector<Real> b(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto& row = *active[static_cast<std::size_t>(i)];
        Real rhs = row.rhs;
        for (const auto& [k, a] : row.terms) {
            const int s0 = first_structural[static_cast<std::size_t>(k)];
            if (s0 < 0) {
                rhs -= a * lo[static_cast<std::size_t>(k)];
                continue;
            }
            rhs -= a * structurals[static_cast<std::size_t>(s0)].offset;
            ay[static_cast<std::size_t>(i)].emplace_back(s0, a * structurals[static_cast<std::size_t>(s0)].sign);
            const int s1 = s0 + 1;
            if (s1 < ns && structurals[static_cast<std::size_t>(s1)].local == k) {
                ay[static_cast<std::size_t>(i)].emplace_back(s1, a * structurals[static_cast<std::size_t>(s1)].sign);
            }
        }
        b[static_cast<std::size_t>(i)] = rhs;
    }

    int slack_count = 0;
    for (int i = 0; i < m; ++i) slack_count += active[static_cast<std::size_t>(i)]->relation != Relation::Equal ? 1 : 0;
    // Artificials are needed where the slack would start negative or is absent.
    std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
    std::vector<Real> slack_sign(static_cast<std::size_t>(m), 0.0L);
    std::vector<Real> row_sign(static_cast<std::size_t>(m), 1.0L);
    int next = ns;
    int artificial_count = 0;
    for (int i = 0; i < m; ++i) {
        const auto rel = active[static_cast<std::size_t>(i)]->relation;
        if (rel != Relation::Equal) {
            slack_col[static_cast<std::size_t>(i)] = next++;
            slack_sign[static_cast<std::size_t>(i)] = rel == Relation::LessEqual ? 1.0L : -1.0L;
        }
        if (b[static_cast<std::size_t>(i)] < 0) row_sign[static_cast<std::size_t>(i)] = -1.0L;
        const bool slack_basic = slack_col[static_cast<std::size_t>(i)] >= 0 &&
                                 slack_sign[static_cast<std::size_t>(i)] * row_sign[static_cast<std::size_t>(i)] > 0;
        if (!slack_basic) ++artificial_count;
    }
    const int n = ns + slack_count + artificial_count;
    Tableau tab(m, n);
    for (int j = 0; j < ns; ++j) tab.ub()[static_cast<std::size_t>(j)] = structurals[static_cast<std::size_t>(j)].ub;
    int art = ns + slack_count;
    std::vector<bool> is_artificial(static_cast<std::size_t>(n), false);
    for (int i = 0; i < m; ++i) {
        const Real sgn = row_sign[static_cast<std::size_t>(i)];
        for (const auto& [j, a] : ay[static_cast<std::size_t>(i)]) tab.at(i, j) += sgn * a;
        const Real rhs = sgn * b[static_cast<std::size_t>(i)];
        const int sc = slack_col[static_cast<std::size_t>(i)];
        if (sc >= 0) tab.at(i, sc) = sgn * slack_sign[static_cast<std::size_t>(i)];
        if (sc >= 0 && tab.at(i, sc) > 0) {
            tab.set_basic(i, sc, rhs);
        } else {
            tab.at(i, art) = 1.0L;
            is_artificial[static_cast<std::size_t>(art)] = true;
            tab.set_basic(i, art, rhs);
            ++art;
        }
    }

    if (artificial_count > 0) {
        std::vector<Real> phase1(static_cast<std::size_t>(n), 0.0L);
        std::vector<bool> allowed(static_cast<std::size_t>(n), true);
        for (int j = 0; j < n; ++j) {
            if (is_artificial[static_cast<std::size_t>(j)]) {
                phase1[static_cast<std::size_t>(j)] = 1.0L;
                allowed[static_cast<std::size_t>(j)] = false;
            }
        }
        tab.optimize(phase1, allowed, result.iterations);
        Real infeasibility = 0.0L;
        Real scale = 1.0L;
        for (int i = 0; i < m; ++i) scale = std::max(scale, std::fabs(b[static_cast<std::size_t>(i)]));
        for (int i = 0; i < m; ++i) {
            if (is_artificial[static_cast<std::size_t>(tab.basis(i))]) infeasibility += tab.xb(i);
        }
        if (infeasibility > kFeasTol * scale) return result;
        for (int j = 0; j < n; ++j) {
            if (is_artificial[static_cast<std::size_t>(j)]) tab.ub()[static_cast<std::size_t>(j)] = 0.0L;
        }
        for (int i = 0; i < m; ++i) {
            if (is_artificial[static_cast<std::size_t>(tab.basis(i))]) tab.xb(i) = 0.0L;
        }
    }

    std::vector<Real> cost(static_cast<std::size_t>(n), 0.0L);
    for (int j = 0; j < ns; ++j) {
        const auto& s = structurals[static_cast<std::size_t>(j)];
        const auto col = static_cast<std::size_t>(cols[static_cast<std::size_t>(s.local)]);
        cost[static_cast<std::size_t>(j)] = static_cast<Real>(problem.objective()[col]) * s.sign;
    }
    std::vector<bool> allowed(static_cast<std::size_t>(n), true);
    for (int j = 0; j < n; ++j) allowed[static_cast<std::size_t>(j)] = !is_artificial[static_cast<std::size_t>(j)];
    if (!tab.optimize(cost, allowed, result.iterations)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    std::vector<Real> x(lo);
    for (int k = 0; k < nloc; ++k) {
        if (first_structural[static_cast<std::size_t>(k)] >= 0) x[static_cast<std::size_t>(k)] = 0.0L;
    }
    for (int j = 0; j < ns; ++j) {
        const auto& s = structurals[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(s.local)] += s.offset + s.sign * tab.value(j);
        if (j + 1 < ns && structurals[static_cast<std::size_t>(j + 1)].local == s.local) {
            // split free column: offset counted once
            x[static_cast<std::size_t>(s.local)] += structurals[static_cast<std::size_t>(j + 1)].sign * tab.value(j + 1);
            ++j;
        }
    }
    Real objective = 0.0L;
    for (int k = 0; k < nloc; ++k) {
        const auto col = static_cast<std::size_t>(cols[static_cast<std::size_t>(k)]);
        objective += static_cast<Real>(problem.objective()[col]) * x[static_cast<std::size_t>(k)];
        result.values[col] = static_cast<double>(x[static_cast<std::size_t>(k)]);
    }
    result.objective = objective;
    result.status = LpStatus::Optimal;
    return result;
}

}  // namespace ceh::lp
