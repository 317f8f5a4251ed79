#ifndef TRACKFLOW_LP_HPP
#define TRACKFLOW_LP_HPP

#include <optional>
#include <string>
#include <vector>

namespace trackflow::lp {

// Zero tolerance for pivot eligibility and dictionary feasibility.
inline constexpr double kEps = 1e-9;

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };

/// A general linear program: optimize c'x subject to row relations and
/// per-variable bounds. Default bounds are x >= 0.
struct LinearProgram {
    Sense sense = Sense::Maximize;
    std::vector<double> objective;              // c, length n
    std::vector<std::vector<double>> rows;      // A, m x n
    std::vector<double> rhs;                    // b, length m
    std::vector<Relation> relations;            // length m
    std::vector<std::optional<double>> lower;   // length n; default 0
    std::vector<std::optional<double>> upper;   // length n; default none
    std::vector<std::string> var_names;         // optional, for printing

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    std::optional<double> lower_bound(int j) const {
        if (j < static_cast<int>(lower.size())) return lower[j];
        return 0.0;
    }
    std::optional<double> upper_bound(int j) const {
        if (j < static_cast<int>(upper.size())) return upper[j];
        return std::nullopt;
    }
    std::string var_name(int j) const;

    void validate() const;  // throws std::invalid_argument when malformed
};

/// Records how transformed variables reconstruct the original ones:
/// x_j = sign * y[index] + shift, or x_j = y[index] - y[neg_index] for splits.
struct VariableMap {
    struct Entry {
        int index = -1;
        int neg_index = -1;  // >= 0 only for free-variable splits
        double sign = 1.0;
        double shift = 0.0;
    };
    std::vector<Entry> entries;      // one per original variable
    double objective_shift = 0.0;    // original obj = (flip ? -z : z) + shift
    bool sense_flipped = false;

    std::vector<double> recover(const std::vector<double>& transformed) const;
    std::vector<double> recover_direction(const std::vector<double>& d) const;
    double recover_objective(double transformed_value) const;
};

/// Standard form: minimize, equality rows only, x >= 0.
struct StandardForm {
    LinearProgram lp;
    VariableMap map;
};
StandardForm to_standard_form(const LinearProgram& lp);

/// Dictionary-ready inequality form: maximize, <= rows only, x >= 0.
/// row_origin records where each produced row came from so duals and Farkas
/// certificates can be mapped back: a scaled original row, the negated half of
/// an equality pair, or an upper-bound row for variable bound_var.
struct InequalityForm {
    struct RowOrigin {
        int row = -1;       // original row index, or -1 for bound rows
        double scale = 1.0; // +1 as-is, -1 negated
        int bound_var = -1; // original variable whose upper bound made this row
    };
    LinearProgram lp;
    VariableMap map;
    std::vector<RowOrigin> row_origin;
};
InequalityForm to_inequality_form(const LinearProgram& lp);

/// Simplex dictionary: each basic variable expressed as a constant plus a
/// linear form in the non-basic variables,
///   x_basic[i] = constant[i] + sum_j table[i][j] * x_nonbasic[j],
/// with the objective row z = obj_constant + sum_j obj_coeffs[j] * x_nonbasic[j].
struct Dictionary {
    std::vector<int> basic;
    std::vector<int> nonbasic;
    std::vector<std::vector<double>> table;
    std::vector<double> constant;
    double obj_constant = 0.0;
    std::vector<double> obj_coeffs;

    int rows() const { return static_cast<int>(basic.size()); }
    int cols() const { return static_cast<int>(nonbasic.size()); }

    bool feasible(double eps = kEps) const;
    /// Values of variables 0..count-1 in the associated solution
    /// (non-basics at zero, basics at their constants).
    std::vector<double> solution(int count) const;
    /// Exchange nonbasic[col] (entering) with basic[row] (leaving).
    void pivot(int row, int col);
};

/// Slack-basis dictionary of a max/<=/x>=0 program. Variable ids: 0..n-1 the
/// structural variables, n..n+m-1 the row slacks.
Dictionary make_slack_dictionary(const LinearProgram& ineq);

enum class SolveStatus { Optimal, Unbounded, Infeasible };

struct PivotStep {
    int entering = -1;
    int leaving = -1;
};

/// Multiplier attached to a finite variable bound (side == GreaterEqual for
/// the lower bound row x_j >= l, LessEqual for x_j <= u).
struct BoundDual {
    int var = -1;
    Relation side = Relation::GreaterEqual;
    double value = 0.0;
};

/// Infeasibility certificates refer to the <=-oriented system: each original
/// row taken as-is when <=, negated when >=, signed freely when ==, plus the
/// oriented finite-bound rows (-x_j <= -l, x_j <= u).
struct SolveResult {
    SolveStatus status = SolveStatus::Optimal;

    std::vector<double> x;       // Optimal: point; Unbounded: feasible point
    double objective = 0.0;
    std::vector<double> dual;    // one multiplier per original row
    std::vector<BoundDual> bound_duals;

    std::vector<double> ray;     // Unbounded: improving direction

    std::vector<double> farkas_rows;      // Infeasible: one per original row
    std::vector<BoundDual> farkas_bounds;
    double phase1_objective = 0.0;        // auxiliary-variable optimum

    std::vector<PivotStep> pivots;        // full pivot trace, phase 1 then 2
};

struct Phase1Result {
    bool feasible = false;
    Dictionary dict;                      // valid when feasible
    std::vector<double> farkas_rows;      // over the inequality-form rows
    std::vector<double> farkas_var_rows;  // over the x>=0 rows, same scaling
    double aux_value = 0.0;               // optimal value of the auxiliary x0
    std::vector<PivotStep> pivots;
};

/// Phase I on a max/<=/x>=0 program: returns a feasible dictionary of the
/// program or a Farkas certificate extracted from the auxiliary duals.
Phase1Result phase1(const LinearProgram& ineq);

struct Phase2Result {
    SolveStatus status = SolveStatus::Optimal;
    Dictionary dict;
    int ray_var = -1;  // Unbounded: the entering variable without limiting row
    std::vector<PivotStep> pivots;
};

/// Phase II (Bland's rule throughout) on a feasible dictionary.
Phase2Result phase2(Dictionary dict);

/// Full pipeline: inequality-form conversion, phase I, phase II, mapping the
/// solution and certificates back to the original variables and rows.
SolveResult solve(const LinearProgram& lp);

/// Dual program. The primal is first brought to max/<= form with each
/// variable either nonnegative or free (other bounds folded into rows); a
/// nonnegative variable yields a >= dual row, a free variable an == row.
LinearProgram dual_of(const LinearProgram& lp);

struct CertificateReport {
    bool pass = true;
    std::vector<std::string> violations;
};

/// Re-derives every identity the result claims: primal feasibility and the
/// strong-duality gap for Optimal, ray feasibility/improvement for Unbounded,
/// the Farkas identities for Infeasible.
CertificateReport check_certificates(const LinearProgram& lp, const SolveResult& result,
                                     double eps = 1e-7);

/// Exhaustive minor check; only matrices up to 8x8 with entries in {-1,0,1}
/// are accepted.
bool is_totally_unimodular(const std::vector<std::vector<int>>& m);

}  // namespace trackflow::lp

#endif
