#include "trackflow/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trackflow::lp {

namespace {

constexpr double kTiny = 1e-12;
constexpr int kMaxPivots = 200000;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::string LinearProgram::var_name(int j) const {
    if (j < static_cast<int>(var_names.size()) && !var_names[j].empty()) return var_names[j];
    return "x" + std::to_string(j + 1);
}

void LinearProgram::validate() const {
    const std::size_t n = objective.size();
    if (rows.size() != rhs.size() || rows.size() != relations.size())
        throw std::invalid_argument("lp: row/rhs/relation counts differ");
    for (const auto& row : rows)
        if (row.size() != n) throw std::invalid_argument("lp: row length differs from objective");
    if (!lower.empty() && lower.size() != n) throw std::invalid_argument("lp: lower bounds length");
    if (!upper.empty() && upper.size() != n) throw std::invalid_argument("lp: upper bounds length");
    for (std::size_t j = 0; j < n; ++j) {
        auto lo = lower_bound(static_cast<int>(j));
        auto up = upper_bound(static_cast<int>(j));
        if (lo && up && *lo > *up + kEps)
            throw std::invalid_argument("lp: empty bound interval on variable " + std::to_string(j));
    }
    for (double v : objective)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite objective coefficient");
    for (double v : rhs)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite rhs");
}

std::vector<double> VariableMap::recover(const std::vector<double>& t) const {
    std::vector<double> x(entries.size(), 0.0);
    for (std::size_t j = 0; j < entries.size(); ++j) {
        const Entry& e = entries[j];
        double v = e.sign * t[e.index] + e.shift;
        if (e.neg_index >= 0) v = t[e.index] - t[e.neg_index];
        x[j] = v;
    }
    return x;
}

std::vector<double> VariableMap::recover_direction(const std::vector<double>& d) const {
    std::vector<double> x(entries.size(), 0.0);
    for (std::size_t j = 0; j < entries.size(); ++j) {
        const Entry& e = entries[j];
        double v = e.sign * d[e.index];
        if (e.neg_index >= 0) v = d[e.index] - d[e.neg_index];
        x[j] = v;
    }
    return x;
}

double VariableMap::recover_objective(double z) const {
    return (sense_flipped ? -z : z) + objective_shift;
}

// Column substitutions shared by both forms: every variable becomes either a
// nonnegative transformed variable (possibly scaled/shifted) or a split pair.
// Upper bounds that survive the substitution come back as pending rows
// y[idx] <= rhs.
namespace {

struct ColumnPlan {
    VariableMap map;
    int out_vars = 0;
    struct PendingUpper {
        int orig_var;
        int idx;
        double rhs;
    };
    std::vector<PendingUpper> uppers;
};

ColumnPlan plan_columns(const LinearProgram& lp) {
    ColumnPlan plan;
    plan.map.entries.resize(lp.num_vars());
    for (int j = 0; j < lp.num_vars(); ++j) {
        auto lo = lp.lower_bound(j);
        auto up = lp.upper_bound(j);
        VariableMap::Entry& e = plan.map.entries[j];
        if (lo) {
            e.index = plan.out_vars++;
            e.sign = 1.0;
            e.shift = *lo;
            if (up) plan.uppers.push_back({j, e.index, *up - *lo});
        } else if (up) {
            // only an upper bound: x = u - y
            e.index = plan.out_vars++;
            e.sign = -1.0;
            e.shift = *up;
        } else {
            e.index = plan.out_vars++;
            e.neg_index = plan.out_vars++;
        }
        plan.map.objective_shift += lp.objective[j] * e.shift;
    }
    return plan;
}

// Row a'x (rel) b rewritten over the transformed variables; returns the new
// coefficient vector and adjusted rhs.
std::pair<std::vector<double>, double> substitute_row(const std::vector<double>& a, double b,
                                                      const ColumnPlan& plan) {
    std::vector<double> out(plan.out_vars, 0.0);
    double rhs = b;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const VariableMap::Entry& e = plan.map.entries[j];
        if (e.neg_index >= 0) {
            out[e.index] += a[j];
            out[e.neg_index] -= a[j];
        } else {
            out[e.index] += e.sign * a[j];
            rhs -= a[j] * e.shift;
        }
    }
    return {std::move(out), rhs};
}

std::vector<double> substitute_objective(const LinearProgram& lp, const ColumnPlan& plan,
                                         double flip) {
    std::vector<double> c(plan.out_vars, 0.0);
    for (int j = 0; j < lp.num_vars(); ++j) {
        const VariableMap::Entry& e = plan.map.entries[j];
        if (e.neg_index >= 0) {
            c[e.index] += flip * lp.objective[j];
            c[e.neg_index] -= flip * lp.objective[j];
        } else {
            c[e.index] += flip * e.sign * lp.objective[j];
        }
    }
    return c;
}

}  // namespace

StandardForm to_standard_form(const LinearProgram& lp) {
    lp.validate();
    ColumnPlan plan = plan_columns(lp);
    StandardForm out;
    out.map = plan.map;
    out.map.sense_flipped = (lp.sense == Sense::Maximize);

    LinearProgram& std_lp = out.lp;
    std_lp.sense = Sense::Minimize;
    const double flip = out.map.sense_flipped ? -1.0 : 1.0;
    std_lp.objective = substitute_objective(lp, plan, flip);

    int slacks = 0;
    for (int r = 0; r < lp.num_rows(); ++r)
        if (lp.relations[r] != Relation::Equal) ++slacks;
    slacks += static_cast<int>(plan.uppers.size());
    const int total = plan.out_vars + slacks;
    std_lp.objective.resize(total, 0.0);

    int next_slack = plan.out_vars;
    for (int r = 0; r < lp.num_rows(); ++r) {
        auto [row, rhs] = substitute_row(lp.rows[r], lp.rhs[r], plan);
        row.resize(total, 0.0);
        if (lp.relations[r] == Relation::LessEqual) row[next_slack++] = 1.0;
        else if (lp.relations[r] == Relation::GreaterEqual) row[next_slack++] = -1.0;
        std_lp.rows.push_back(std::move(row));
        std_lp.rhs.push_back(rhs);
        std_lp.relations.push_back(Relation::Equal);
    }
    for (const auto& ub : plan.uppers) {
        std::vector<double> row(total, 0.0);
        row[ub.idx] = 1.0;
        row[next_slack++] = 1.0;
        std_lp.rows.push_back(std::move(row));
        std_lp.rhs.push_back(ub.rhs);
        std_lp.relations.push_back(Relation::Equal);
    }
    std_lp.lower.assign(total, 0.0);
    std_lp.upper.assign(total, std::nullopt);
    return out;
}

InequalityForm to_inequality_form(const LinearProgram& lp) {
    lp.validate();
    ColumnPlan plan = plan_columns(lp);
    InequalityForm out;
    out.map = plan.map;
    out.map.sense_flipped = (lp.sense == Sense::Minimize);

    LinearProgram& ineq = out.lp;
    ineq.sense = Sense::Maximize;
    const double flip = out.map.sense_flipped ? -1.0 : 1.0;
    ineq.objective = substitute_objective(lp, plan, flip);

    for (int r = 0; r < lp.num_rows(); ++r) {
        auto [row, rhs] = substitute_row(lp.rows[r], lp.rhs[r], plan);
        if (lp.relations[r] == Relation::LessEqual || lp.relations[r] == Relation::Equal) {
            ineq.rows.push_back(row);
            ineq.rhs.push_back(rhs);
            ineq.relations.push_back(Relation::LessEqual);
            out.row_origin.push_back({r, 1.0, -1});
        }
        if (lp.relations[r] == Relation::GreaterEqual || lp.relations[r] == Relation::Equal) {
            std::vector<double> neg(row.size());
            for (std::size_t j = 0; j < row.size(); ++j) neg[j] = -row[j];
            ineq.rows.push_back(std::move(neg));
            ineq.rhs.push_back(-rhs);
            ineq.relations.push_back(Relation::LessEqual);
            out.row_origin.push_back({r, -1.0, -1});
        }
    }
    for (const auto& ub : plan.uppers) {
        std::vector<double> row(plan.out_vars, 0.0);
        row[ub.idx] = 1.0;
        ineq.rows.push_back(std::move(row));
        ineq.rhs.push_back(ub.rhs);
        ineq.relations.push_back(Relation::LessEqual);
        out.row_origin.push_back({-1, 1.0, ub.orig_var});
    }
    ineq.lower.assign(plan.out_vars, 0.0);
    ineq.upper.assign(plan.out_vars, std::nullopt);
    return out;
}

bool Dictionary::feasible(double eps) const {
    for (double c : constant)
        if (c < -eps) return false;
    return true;
}

std::vector<double> Dictionary::solution(int count) const {
    std::vector<double> x(count, 0.0);
    for (int i = 0; i < rows(); ++i)
        if (basic[i] < count) x[basic[i]] = constant[i];
    return x;
}

void Dictionary::pivot(int row, int col) {
    const double a = table[row][col];
    if (std::abs(a) < kTiny) throw std::logic_error("dictionary pivot on ~zero coefficient");

    // Solve the leaving row for the entering variable.
    const double inv = 1.0 / a;
    std::vector<double>& prow = table[row];
    const double new_const = -constant[row] * inv;
    std::vector<double> nrow(prow.size());
    for (std::size_t k = 0; k < prow.size(); ++k) nrow[k] = -prow[k] * inv;
    nrow[col] = inv;  // coefficient of the (now nonbasic) former basic variable
    constant[row] = new_const;
    table[row] = std::move(nrow);

    for (int r = 0; r < rows(); ++r) {
        if (r == row) continue;
        const double f = table[r][col];
        if (f == 0.0) continue;
        constant[r] += f * new_const;
        std::vector<double>& trow = table[r];
        for (std::size_t k = 0; k < trow.size(); ++k)
            if (k != static_cast<std::size_t>(col)) trow[k] += f * table[row][k];
        trow[col] = f * table[row][col];
    }
    const double f = obj_coeffs[col];
    if (f != 0.0) {
        obj_constant += f * new_const;
        for (std::size_t k = 0; k < obj_coeffs.size(); ++k)
            if (k != static_cast<std::size_t>(col)) obj_coeffs[k] += f * table[row][k];
        obj_coeffs[col] = f * table[row][col];
    }
    std::swap(basic[row], nonbasic[col]);
}

Dictionary make_slack_dictionary(const LinearProgram& ineq) {
    const int n = ineq.num_vars();
    const int m = ineq.num_rows();
    Dictionary d;
    d.nonbasic.resize(n);
    for (int j = 0; j < n; ++j) d.nonbasic[j] = j;
    d.basic.resize(m);
    d.table.assign(m, std::vector<double>(n, 0.0));
    d.constant = ineq.rhs;
    for (int i = 0; i < m; ++i) {
        d.basic[i] = n + i;
        for (int j = 0; j < n; ++j) d.table[i][j] = -ineq.rows[i][j];
    }
    d.obj_constant = 0.0;
    d.obj_coeffs = ineq.objective;
    return d;
}

namespace {

// Bland: entering = smallest variable id among positive objective
// coefficients; returns the nonbasic position or -1 when optimal.
int bland_entering(const Dictionary& d) {
    int pos = -1;
    for (int j = 0; j < d.cols(); ++j)
        if (d.obj_coeffs[j] > kEps && (pos < 0 || d.nonbasic[j] < d.nonbasic[pos])) pos = j;
    return pos;
}

// Minimum-ratio leaving row; ties broken by smallest basic id unless one of
// the tied rows holds prefer_var, which then wins. Returns -1 when no row
// limits the entering variable.
int ratio_leaving(const Dictionary& d, int col, int prefer_var = -1) {
    int row = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d.rows(); ++i) {
        const double a = d.table[i][col];
        if (a >= -kEps) continue;
        const double ratio = d.constant[i] / (-a);
        if (ratio < best - kEps) {
            best = ratio;
            row = i;
        } else if (ratio <= best + kEps && row >= 0) {
            if (d.basic[i] == prefer_var) row = i;
            else if (d.basic[row] != prefer_var && d.basic[i] < d.basic[row]) row = i;
        }
    }
    return row;
}

}  // namespace

Phase1Result phase1(const LinearProgram& ineq) {
    ineq.validate();
    for (int r = 0; r < ineq.num_rows(); ++r)
        if (ineq.relations[r] != Relation::LessEqual)
            throw std::invalid_argument("phase1 expects a max/<=/x>=0 program");

    const int n = ineq.num_vars();
    const int m = ineq.num_rows();
    Phase1Result out;

    Dictionary d = make_slack_dictionary(ineq);
    if (d.feasible()) {
        out.feasible = true;
        out.dict = std::move(d);
        return out;  // origin already a vertex: zero pivots
    }

    // Auxiliary problem: maximize -x0 with x0 added to every row.
    const int x0 = n + m;
    Dictionary aux = d;
    for (int i = 0; i < m; ++i) aux.table[i].push_back(1.0);
    aux.nonbasic.push_back(x0);
    aux.obj_coeffs.assign(n + 1, 0.0);
    aux.obj_coeffs[n] = -1.0;
    aux.obj_constant = 0.0;

    // First pivot: x0 enters against the most negative constant row.
    int worst = 0;
    for (int i = 1; i < m; ++i)
        if (aux.constant[i] < aux.constant[worst]) worst = i;
    out.pivots.push_back({x0, aux.basic[worst]});
    aux.pivot(worst, n);

    for (int iter = 0; iter < kMaxPivots; ++iter) {
        const int col = bland_entering(aux);
        if (col < 0) break;
        const int row = ratio_leaving(aux, col, x0);
        if (row < 0) throw std::logic_error("auxiliary problem cannot be unbounded");
        out.pivots.push_back({aux.nonbasic[col], aux.basic[row]});
        aux.pivot(row, col);
    }

    out.aux_value = -aux.obj_constant;  // optimal x0
    if (out.aux_value > kEps) {
        // Farkas certificate from the auxiliary duals: the w-row coefficients
        // on the slack variables, scaled so that lambda'b = -1.
        std::vector<double> y(m, 0.0);
        for (int j = 0; j < aux.cols(); ++j) {
            const int v = aux.nonbasic[j];
            if (v >= n && v < n + m) y[v - n] = -aux.obj_coeffs[j];
        }
        const double t = -dot(ineq.rhs, y);
        if (t <= kTiny) throw std::logic_error("degenerate Farkas scaling");
        out.farkas_rows.resize(m);
        for (int i = 0; i < m; ++i) out.farkas_rows[i] = std::max(0.0, y[i] / t);
        // Multipliers on the x>=0 rows absorb the residual of lambda'A.
        out.farkas_var_rows.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += out.farkas_rows[i] * ineq.rows[i][j];
            out.farkas_var_rows[j] = std::max(0.0, s);
        }
        return out;
    }

    // Feasible: force x0 out of the basis if it is degenerately stuck there.
    int x0_row = -1;
    for (int i = 0; i < aux.rows(); ++i)
        if (aux.basic[i] == x0) x0_row = i;
    if (x0_row >= 0) {
        int col = -1;
        for (int j = 0; j < aux.cols(); ++j)
            if (std::abs(aux.table[x0_row][j]) > kTiny &&
                (col < 0 || aux.nonbasic[j] < aux.nonbasic[col]))
                col = j;
        if (col >= 0) {
            out.pivots.push_back({aux.nonbasic[col], x0});
            aux.pivot(x0_row, col);
            x0_row = -1;
        }
    }

    // Drop x0 and rewrite the original objective over the surviving non-basics.
    Dictionary res;
    for (int i = 0; i < aux.rows(); ++i) {
        if (aux.basic[i] == x0) continue;  // identically-zero redundant row
        res.basic.push_back(aux.basic[i]);
        std::vector<double> row;
        for (int j = 0; j < aux.cols(); ++j)
            if (aux.nonbasic[j] != x0) row.push_back(aux.table[i][j]);
        res.table.push_back(std::move(row));
        res.constant.push_back(aux.constant[i]);
    }
    for (int j = 0; j < aux.cols(); ++j)
        if (aux.nonbasic[j] != x0) res.nonbasic.push_back(aux.nonbasic[j]);

    std::vector<double> c(n + m, 0.0);
    for (int j = 0; j < n; ++j) c[j] = ineq.objective[j];
    res.obj_constant = 0.0;
    res.obj_coeffs.assign(res.cols(), 0.0);
    for (int j = 0; j < res.cols(); ++j) res.obj_coeffs[j] = c[res.nonbasic[j]];
    for (int i = 0; i < res.rows(); ++i) {
        const double ci = c[res.basic[i]];
        if (ci == 0.0) continue;
        res.obj_constant += ci * res.constant[i];
        for (int j = 0; j < res.cols(); ++j) res.obj_coeffs[j] += ci * res.table[i][j];
    }

    out.feasible = true;
    out.dict = std::move(res);
    return out;
}

Phase2Result phase2(Dictionary dict) {
    if (!dict.feasible()) throw std::invalid_argument("phase2 requires a feasible dictionary");
    Phase2Result out;
    for (int iter = 0; iter < kMaxPivots; ++iter) {
        const int col = bland_entering(dict);
        if (col < 0) {
            out.status = SolveStatus::Optimal;
            out.dict = std::move(dict);
            return out;
        }
        const int row = ratio_leaving(dict, col);
        if (row < 0) {
            out.status = SolveStatus::Unbounded;
            out.ray_var = dict.nonbasic[col];
            out.dict = std::move(dict);
            return out;
        }
        out.pivots.push_back({dict.nonbasic[col], dict.basic[row]});
        dict.pivot(row, col);
    }
    throw std::logic_error("simplex exceeded the pivot cap (Bland's rule should terminate)");
}

namespace {

// Ray in the inequality-form variable space for entering variable `var`.
std::vector<double> dictionary_ray(const Dictionary& d, int var, int count) {
    std::vector<double> ray(count, 0.0);
    int col = -1;
    for (int j = 0; j < d.cols(); ++j)
        if (d.nonbasic[j] == var) col = j;
    if (var < count) ray[var] = 1.0;
    for (int i = 0; i < d.rows(); ++i)
        if (d.basic[i] < count) ray[d.basic[i]] = d.table[i][col];
    return ray;
}

void map_duals(const InequalityForm& form, const Dictionary& dict, const LinearProgram& orig,
               SolveResult& res) {
    const int n = form.lp.num_vars();
    const int m = form.lp.num_rows();
    // Multiplier of each inequality-form row: objective-row coefficient of its
    // slack, negated; zero when the slack is basic.
    std::vector<double> y(m, 0.0);
    std::vector<double> reduced(n, 0.0);
    for (int j = 0; j < dict.cols(); ++j) {
        const int v = dict.nonbasic[j];
        if (v >= n) y[v - n] = -dict.obj_coeffs[j];
        else reduced[v] = -dict.obj_coeffs[j];
    }
    const double flip = form.map.sense_flipped ? -1.0 : 1.0;

    // Multipliers are reported against the <=-oriented rows. A >= row was
    // already negated on the way into the form, matching its orientation, so
    // its multiplier transfers directly; only equality pairs carry a sign.
    res.dual.assign(orig.num_rows(), 0.0);
    res.bound_duals.clear();
    for (int k = 0; k < m; ++k) {
        const auto& ro = form.row_origin[k];
        if (ro.row >= 0) {
            const bool eq_pair = orig.relations[ro.row] == Relation::Equal;
            res.dual[ro.row] += flip * (eq_pair ? ro.scale : 1.0) * y[k];
        } else {
            res.bound_duals.push_back({ro.bound_var, Relation::LessEqual, flip * y[k]});
        }
    }
    // Reduced costs of the transformed variables are the multipliers of the
    // bound rows hidden by the substitution.
    for (int j = 0; j < orig.num_vars(); ++j) {
        const auto& e = form.map.entries[j];
        if (e.neg_index >= 0) continue;  // free split: no bound rows
        const double rc = flip * reduced[e.index];
        if (e.sign > 0) res.bound_duals.push_back({j, Relation::GreaterEqual, rc});
        else res.bound_duals.push_back({j, Relation::LessEqual, rc});
    }
}

void map_farkas(const InequalityForm& form, const Phase1Result& p1, const LinearProgram& orig,
                SolveResult& res) {
    res.farkas_rows.assign(orig.num_rows(), 0.0);
    res.farkas_bounds.clear();
    for (std::size_t k = 0; k < p1.farkas_rows.size(); ++k) {
        const auto& ro = form.row_origin[k];
        // The certificate is stated over <=-oriented original rows: an
        // original >= row was negated on the way in, so its multiplier
        // transfers as-is to the negated orientation.
        if (ro.row >= 0) {
            if (orig.relations[ro.row] == Relation::Equal)
                res.farkas_rows[ro.row] += ro.scale * p1.farkas_rows[k];
            else
                res.farkas_rows[ro.row] += p1.farkas_rows[k];
        } else {
            res.farkas_bounds.push_back({ro.bound_var, Relation::LessEqual, p1.farkas_rows[k]});
        }
    }
    for (int j = 0; j < orig.num_vars(); ++j) {
        const auto& e = form.map.entries[j];
        if (e.neg_index >= 0) continue;
        const double mu = p1.farkas_var_rows[e.index];
        if (mu == 0.0) continue;
        if (e.sign > 0) res.farkas_bounds.push_back({j, Relation::GreaterEqual, mu});
        else res.farkas_bounds.push_back({j, Relation::LessEqual, mu});
    }
}

}  // namespace

SolveResult solve(const LinearProgram& lp) {
    InequalityForm form = to_inequality_form(lp);
    SolveResult res;

    Phase1Result p1 = phase1(form.lp);
    res.pivots = p1.pivots;
    res.phase1_objective = p1.aux_value;
    if (!p1.feasible) {
        res.status = SolveStatus::Infeasible;
        map_farkas(form, p1, lp, res);
        return res;
    }

    Phase2Result p2 = phase2(std::move(p1.dict));
    res.pivots.insert(res.pivots.end(), p2.pivots.begin(), p2.pivots.end());

    const int n = form.lp.num_vars();
    const std::vector<double> xt = p2.dict.solution(n);
    res.x = form.map.recover(xt);
    if (p2.status == SolveStatus::Unbounded) {
        res.status = SolveStatus::Unbounded;
        const std::vector<double> rt = dictionary_ray(p2.dict, p2.ray_var, n);
        res.ray = form.map.recover_direction(rt);
        return res;
    }

    res.status = SolveStatus::Optimal;
    res.objective = form.map.recover_objective(p2.dict.obj_constant);
    map_duals(form, p2.dict, lp, res);
    return res;
}

LinearProgram dual_of(const LinearProgram& lp) {
    lp.validate();
    // Bring the primal to max/<= form keeping every variable either
    // nonnegative or free; finite bounds other than x >= 0 become rows.
    const int n = lp.num_vars();
    const double flip = (lp.sense == Sense::Minimize) ? -1.0 : 1.0;

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (int r = 0; r < lp.num_rows(); ++r) {
        if (lp.relations[r] == Relation::LessEqual || lp.relations[r] == Relation::Equal) {
            rows.push_back(lp.rows[r]);
            rhs.push_back(lp.rhs[r]);
        }
        if (lp.relations[r] == Relation::GreaterEqual || lp.relations[r] == Relation::Equal) {
            std::vector<double> neg(n);
            for (int j = 0; j < n; ++j) neg[j] = -lp.rows[r][j];
            rows.push_back(std::move(neg));
            rhs.push_back(-lp.rhs[r]);
        }
    }
    std::vector<bool> nonneg(n, false);
    for (int j = 0; j < n; ++j) {
        auto lo = lp.lower_bound(j);
        auto up = lp.upper_bound(j);
        if (lo && *lo == 0.0 && !up) {
            nonneg[j] = true;
            continue;
        }
        if (lo) {
            std::vector<double> row(n, 0.0);
            row[j] = -1.0;
            rows.push_back(std::move(row));
            rhs.push_back(-*lo);
        }
        if (up) {
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            rows.push_back(std::move(row));
            rhs.push_back(*up);
        }
    }

    // A minimization primal is dualized through its negated maximization;
    // negating the dual objective and flipping its sense keeps the optimal
    // value equal to the original primal's.
    const int m = static_cast<int>(rows.size());
    LinearProgram dual;
    dual.sense = (lp.sense == Sense::Maximize) ? Sense::Minimize : Sense::Maximize;
    dual.objective.resize(m);
    for (int i = 0; i < m; ++i) dual.objective[i] = flip * rhs[i];
    dual.rows.assign(n, std::vector<double>(m, 0.0));
    dual.rhs.resize(n);
    dual.relations.resize(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) dual.rows[j][i] = rows[i][j];
        dual.rhs[j] = flip * lp.objective[j];
        dual.relations[j] = nonneg[j] ? Relation::GreaterEqual : Relation::Equal;
    }
    dual.lower.assign(m, 0.0);
    dual.upper.assign(m, std::nullopt);
    return dual;
}

namespace {

// The <=-oriented closure of an LP: every row in <= orientation (equalities
// keep a free multiplier flag) plus the finite-bound rows.
struct OrientedSystem {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<bool> free_mult;  // true for equality rows
    std::vector<int> origin_row;  // original row, or -1 for bound rows
    std::vector<std::pair<int, Relation>> bound_origin;
};

OrientedSystem orient(const LinearProgram& lp) {
    OrientedSystem sys;
    const int n = lp.num_vars();
    for (int r = 0; r < lp.num_rows(); ++r) {
        std::vector<double> row = lp.rows[r];
        double b = lp.rhs[r];
        if (lp.relations[r] == Relation::GreaterEqual) {
            for (double& v : row) v = -v;
            b = -b;
        }
        sys.rows.push_back(std::move(row));
        sys.rhs.push_back(b);
        sys.free_mult.push_back(lp.relations[r] == Relation::Equal);
        sys.origin_row.push_back(r);
        sys.bound_origin.push_back({-1, Relation::Equal});
    }
    for (int j = 0; j < n; ++j) {
        if (auto lo = lp.lower_bound(j)) {
            std::vector<double> row(n, 0.0);
            row[j] = -1.0;
            sys.rows.push_back(std::move(row));
            sys.rhs.push_back(-*lo);
            sys.free_mult.push_back(false);
            sys.origin_row.push_back(-1);
            sys.bound_origin.push_back({j, Relation::GreaterEqual});
        }
        if (auto up = lp.upper_bound(j)) {
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            sys.rows.push_back(std::move(row));
            sys.rhs.push_back(*up);
            sys.free_mult.push_back(false);
            sys.origin_row.push_back(-1);
            sys.bound_origin.push_back({j, Relation::LessEqual});
        }
    }
    return sys;
}

std::vector<double> gather_multipliers(const OrientedSystem& sys,
                                       const std::vector<double>& row_mult,
                                       const std::vector<BoundDual>& bound_mult) {
    std::vector<double> out(sys.rows.size(), 0.0);
    for (std::size_t k = 0; k < sys.rows.size(); ++k) {
        if (sys.origin_row[k] >= 0) {
            out[k] = sys.origin_row[k] < static_cast<int>(row_mult.size())
                         ? row_mult[sys.origin_row[k]]
                         : 0.0;
        } else {
            for (const auto& bd : bound_mult)
                if (bd.var == sys.bound_origin[k].first && bd.side == sys.bound_origin[k].second)
                    out[k] = bd.value;
        }
    }
    return out;
}

}  // namespace

CertificateReport check_certificates(const LinearProgram& lp, const SolveResult& result,
                                     double eps) {
    CertificateReport rep;
    auto fail = [&rep](const std::string& msg) {
        rep.pass = false;
        rep.violations.push_back(msg);
    };
    lp.validate();
    const OrientedSystem sys = orient(lp);
    const int n = lp.num_vars();

    auto check_point = [&](const std::vector<double>& x) {
        if (static_cast<int>(x.size()) != n) {
            fail("primal point has wrong dimension");
            return;
        }
        for (std::size_t k = 0; k < sys.rows.size(); ++k) {
            double lhs = dot(sys.rows[k], x);
            const double slackness = lhs - sys.rhs[k];
            const double tol = eps * (1.0 + std::abs(sys.rhs[k]));
            if (sys.free_mult[k] ? std::abs(slackness) > tol : slackness > tol) {
                if (sys.origin_row[k] >= 0)
                    fail("primal feasibility violated at row " + std::to_string(sys.origin_row[k]));
                else
                    fail("primal point violates a variable bound");
            }
        }
    };

    switch (result.status) {
        case SolveStatus::Optimal: {
            check_point(result.x);
            const double cx = dot(lp.objective, result.x);
            if (std::abs(cx - result.objective) > eps * (1.0 + std::abs(cx)))
                fail("reported objective differs from c'x");
            const std::vector<double> mult =
                gather_multipliers(sys, result.dual, result.bound_duals);
            // Maximization aggregates <=-rows upward (multipliers >= 0);
            // minimization needs lower bounds, hence multipliers <= 0.
            const double sign = (lp.sense == Sense::Maximize) ? 1.0 : -1.0;
            double by = 0.0;
            for (std::size_t k = 0; k < sys.rows.size(); ++k) {
                by += mult[k] * sys.rhs[k];
                if (!sys.free_mult[k] && sign * mult[k] < -eps)
                    fail("dual multiplier has the wrong sign at oriented row " + std::to_string(k));
            }
            if (std::abs(cx - by) > eps * (1.0 + std::abs(cx))) fail("duality gap");
            break;
        }
        case SolveStatus::Unbounded: {
            check_point(result.x);
            if (static_cast<int>(result.ray.size()) != n) {
                fail("ray has wrong dimension");
                break;
            }
            for (std::size_t k = 0; k < sys.rows.size(); ++k) {
                const double ad = dot(sys.rows[k], result.ray);
                if (sys.free_mult[k] ? std::abs(ad) > eps : ad > eps)
                    fail("ray leaves the feasible cone at oriented row " + std::to_string(k));
            }
            const double cd = dot(lp.objective, result.ray);
            if (lp.sense == Sense::Maximize ? cd <= eps : cd >= -eps)
                fail("ray does not improve the objective");
            break;
        }
        case SolveStatus::Infeasible: {
            const std::vector<double> mult =
                gather_multipliers(sys, result.farkas_rows, result.farkas_bounds);
            for (std::size_t k = 0; k < sys.rows.size(); ++k)
                if (!sys.free_mult[k] && mult[k] < -eps)
                    fail("Farkas multiplier negative at oriented row " + std::to_string(k));
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < sys.rows.size(); ++k)
                    s += mult[k] * sys.rows[k][j];
                if (std::abs(s) > eps)
                    fail("Farkas lambda'A nonzero at column " + std::to_string(j));
            }
            double lb = 0.0;
            for (std::size_t k = 0; k < sys.rows.size(); ++k) lb += mult[k] * sys.rhs[k];
            if (std::abs(lb + 1.0) > eps) fail("Farkas lambda'b differs from -1");
            break;
        }
    }
    return rep;
}

namespace {

double minor_determinant(const std::vector<std::vector<int>>& m, const std::vector<int>& ri,
                         const std::vector<int>& ci) {
    const int k = static_cast<int>(ri.size());
    std::vector<std::vector<double>> a(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a[i][j] = m[ri[i]][ci[j]];
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = -1;
        for (int r = c; r < k; ++r)
            if (std::abs(a[r][c]) > 1e-9) {
                piv = r;
                break;
            }
        if (piv < 0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < k; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int j = c; j < k; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < n - (k - i)) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

bool is_totally_unimodular(const std::vector<std::vector<int>>& m) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    if (rows > 8 || cols > 8)
        throw std::invalid_argument("is_totally_unimodular: exhaustive check limited to 8x8");
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("is_totally_unimodular: ragged matrix");
        for (int v : row)
            if (v < -1 || v > 1)
                throw std::invalid_argument("is_totally_unimodular: entries must be in {-1,0,1}");
    }
    for (int k = 1; k <= std::min(rows, cols); ++k) {
        std::vector<int> ri(k), ci(k);
        for (int i = 0; i < k; ++i) ri[i] = i;
        do {
            for (int i = 0; i < k; ++i) ci[i] = i;
            do {
                const double det = minor_determinant(m, ri, ci);
                if (std::abs(std::abs(det) - std::round(std::abs(det))) > 1e-6)
                    return false;
                const long r = std::lround(std::abs(det));
                if (r > 1) return false;
            } while (next_combination(ci, cols));
        } while (next_combination(ri, rows));
    }
    return true;
}

}  // namespace trackflow::lp
