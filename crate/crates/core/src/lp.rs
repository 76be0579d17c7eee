//! Dense two-phase primal simplex with primal and dual solutions.
//!
//! Problem sizes in this crate are desk scale (at most a few thousand rows
//! and a few tens of thousands of nonzeros), so the tableau is dense and no
//! factorization machinery is used. Pricing is Dantzig's rule; after a run of
//! degenerate pivots the solver falls back to Bland's rule, which cannot
//! cycle, and returns to Dantzig once the objective moves again. The ratio
//! test is a two-pass Harris test that prefers large pivot elements among
//! tied rows, and the tableau is periodically rebuilt from the original data
//! through a fresh LU solve of the basis, which caps accumulated pivot error.
//! Every optimal solve is checked for primal feasibility, complementary
//! slackness, and a primal/dual objective gap before it is returned.

use crate::error::{Error, Result};

/// Entries below this magnitude never serve as pivot elements.
const PIVOT_TOL: f64 = 1e-7;
/// Reduced-cost tolerance for optimality.
const COST_TOL: f64 = 1e-9;
/// Harris ratio-test slack.
const RATIO_SLACK: f64 = 1e-9;
/// Phase-1 objective above this value means infeasible.
const FEAS_TOL: f64 = 1e-8;
/// Consecutive degenerate pivots before switching to Bland's rule.
const STALL_LIMIT: usize = 40;
/// Pivots between scheduled tableau rebuilds.
const REBUILD_EVERY: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Per-variable bounds. The default is `0 <= x` with no upper bound; a lower
/// bound of negative infinity makes the variable free.
#[derive(Debug, Clone, Copy)]
pub struct VarBound {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl Default for VarBound {
    fn default() -> Self {
        VarBound { lower: 0.0, upper: None }
    }
}

impl VarBound {
    pub fn free() -> Self {
        VarBound { lower: f64::NEG_INFINITY, upper: None }
    }
}

/// A minimization linear program over real variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { objective, constraints: Vec::new(), bounds: vec![VarBound::default(); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation: Relation::Le, rhs });
        self
    }

    pub fn ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation: Relation::Ge, rhs });
        self
    }

    pub fn eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation: Relation::Eq, rhs });
        self
    }

    pub fn free_var(&mut self, j: usize) -> &mut Self {
        self.bounds[j] = VarBound::free();
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidInput("linear program with no variables".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite objective coefficient".into()));
        }
        if self.bounds.len() != n {
            return Err(Error::Dimension(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Dimension(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("constraint {i} has a non-finite entry")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.lower == f64::INFINITY {
                return Err(Error::InvalidInput(format!("variable {j} has invalid lower bound")));
            }
            if let Some(u) = b.upper {
                if !u.is_finite() {
                    return Err(Error::InvalidInput(format!("variable {j} has invalid upper bound")));
                }
            }
        }
        Ok(())
    }

    /// Human-readable dump for troubleshooting.
    pub fn debug_dump(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "min {:?}", self.objective);
        for c in &self.constraints {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "==",
                Relation::Ge => ">=",
            };
            let _ = writeln!(s, "  {:?} {} {}", c.coeffs, rel, c.rhs);
        }
        let _ = writeln!(s, "bounds {:?}", self.bounds);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of a linear program.
///
/// When the status is `Optimal` the residual fields certify the solution:
/// primal feasibility below 1e-9, complementary slackness below 1e-8, and a
/// primal/dual objective gap below 1e-8 (all scaled by the objective
/// magnitude). `dual` holds one multiplier per original constraint, signed so
/// that the dual objective `sum_i dual_i * rhs_i` (plus lower-bound shifts)
/// matches the primal objective: nonnegative for `>=` rows, nonpositive for
/// `<=` rows, free for `==` rows.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_gap: f64,
    pub complementarity: f64,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution {
            status,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: f64::NAN,
            primal_residual: f64::NAN,
            dual_gap: f64::NAN,
            complementarity: f64::NAN,
        }
    }
}

/// Standard-form data: min c.z  s.t.  A z = b, z >= 0.
struct StandardForm {
    m: usize,
    n_total: usize, // structural + slack/surplus + artificial
    rows: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    artificial_start: usize,
    /// structural column -> (original variable, sign)
    col_map: Vec<(usize, f64)>,
    /// per original variable: finite lower bound shift
    shift: Vec<f64>,
    /// per standard row: (original row index or usize::MAX for bound rows, sign flip)
    row_map: Vec<(usize, f64)>,
    /// equilibration factor each row was divided by
    row_scale: Vec<f64>,
    /// columns of slack/surplus in row order (usize::MAX where none)
    slack_col: Vec<usize>,
    slack_sign: Vec<f64>,
    /// artificial column per row (usize::MAX where none)
    art_col: Vec<usize>,
}

fn standardize(lp: &LinearProgram) -> StandardForm {
    let n = lp.num_vars();
    // Column layout for structural variables.
    let mut col_map: Vec<(usize, f64)> = Vec::new();
    let mut shift = vec![0.0; n];
    let mut var_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for j in 0..n {
        if lp.bounds[j].lower == f64::NEG_INFINITY {
            var_cols[j].push((col_map.len(), 1.0));
            col_map.push((j, 1.0));
            var_cols[j].push((col_map.len(), -1.0));
            col_map.push((j, -1.0));
        } else {
            shift[j] = lp.bounds[j].lower;
            var_cols[j].push((col_map.len(), 1.0));
            col_map.push((j, 1.0));
        }
    }
    let n_struct = col_map.len();

    // Rows: original constraints, then upper-bound rows.
    let mut raw_rows: Vec<(Vec<f64>, Relation, f64, usize)> = Vec::new();
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![0.0; n_struct];
        let mut rhs = c.rhs;
        for j in 0..n {
            let a = c.coeffs[j];
            if a == 0.0 {
                continue;
            }
            rhs -= a * shift[j];
            for &(col, sign) in &var_cols[j] {
                row[col] += a * sign;
            }
        }
        raw_rows.push((row, c.relation, rhs, i));
    }
    for j in 0..n {
        if let Some(u) = lp.bounds[j].upper {
            let mut row = vec![0.0; n_struct];
            for &(col, sign) in &var_cols[j] {
                row[col] += sign;
            }
            raw_rows.push((row, Relation::Le, u - shift[j], usize::MAX));
        }
    }

    let m = raw_rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut row_map = Vec::with_capacity(m);
    let mut row_scale = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    for (mut row, mut rel, mut rhs, orig) in raw_rows {
        // Equilibrate: scale the row so its largest coefficient is 1, which
        // keeps pivot magnitudes comparable across rows.
        let scale = row.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        for v in row.iter_mut() {
            *v /= scale;
        }
        rhs /= scale;
        row_scale.push(scale);
        let mut flip = 1.0;
        if rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            rhs = -rhs;
            flip = -1.0;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push(row);
        b.push(rhs);
        row_map.push((orig, flip));
        relations.push(rel);
    }

    // Slack/surplus columns, then artificial columns.
    let mut slack_col = vec![usize::MAX; m];
    let mut slack_sign = vec![0.0; m];
    let mut next = n_struct;
    for i in 0..m {
        match relations[i] {
            Relation::Le => {
                slack_col[i] = next;
                slack_sign[i] = 1.0;
                next += 1;
            }
            Relation::Ge => {
                slack_col[i] = next;
                slack_sign[i] = -1.0;
                next += 1;
            }
            Relation::Eq => {}
        }
    }
    let artificial_start = next;
    let mut art_col = vec![usize::MAX; m];
    for i in 0..m {
        // Le rows start with the slack basic; Ge and Eq rows need an artificial.
        if !matches!(relations[i], Relation::Le) {
            art_col[i] = next;
            next += 1;
        }
    }
    let n_total = next;

    for i in 0..m {
        rows[i].resize(n_total, 0.0);
        if slack_col[i] != usize::MAX {
            rows[i][slack_col[i]] = slack_sign[i];
        }
        if art_col[i] != usize::MAX {
            rows[i][art_col[i]] = 1.0;
        }
    }

    let mut cost = vec![0.0; n_total];
    for (col, &(j, sign)) in col_map.iter().enumerate() {
        cost[col] = lp.objective[j] * sign;
    }

    StandardForm {
        m,
        n_total,
        rows,
        b,
        cost,
        artificial_start,
        col_map,
        shift,
        row_map,
        row_scale,
        slack_col,
        slack_sign,
        art_col,
    }
}

/// Dense LU with partial pivoting for the basis solves of the rebuild path.
struct Lu {
    m: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

enum FactorOutcome {
    Ok(Lu),
    /// Column `dependent_col` of the basis is linearly dependent on its
    /// predecessors; `free_row` is a row not yet used as a pivot.
    Singular { dependent_col: usize, free_row: usize },
}

impl Lu {
    fn factor(mut a: Vec<f64>, m: usize) -> FactorOutcome {
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let mut piv = k;
            let mut best = a[perm[k] * m + k].abs();
            for r in (k + 1)..m {
                let v = a[perm[r] * m + k].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                return FactorOutcome::Singular { dependent_col: k, free_row: perm[k] };
            }
            perm.swap(k, piv);
            let pk = perm[k];
            let inv = 1.0 / a[pk * m + k];
            for r in (k + 1)..m {
                let pr = perm[r];
                let f = a[pr * m + k] * inv;
                a[pr * m + k] = f;
                if f != 0.0 {
                    for c in (k + 1)..m {
                        a[pr * m + c] -= f * a[pk * m + c];
                    }
                }
            }
        }
        FactorOutcome::Ok(Lu { m, a, perm })
    }

    fn solve(&self, rhs: &[f64], out: &mut [f64]) {
        let m = self.m;
        for k in 0..m {
            let mut v = rhs[self.perm[k]];
            for c in 0..k {
                v -= self.a[self.perm[k] * m + c] * out[c];
            }
            out[k] = v;
        }
        for k in (0..m).rev() {
            let mut v = out[k];
            for c in (k + 1)..m {
                v -= self.a[self.perm[k] * m + c] * out[c];
            }
            out[k] = v / self.a[self.perm[k] * m + k];
        }
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// (m + 1) x (n + 1), row-major. Row m is the reduced-cost row; column n
    /// is the rhs. Cell (m, n) holds minus the current objective.
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.n + 1) + c]
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * (self.n + 1) + c] = v;
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.n + 1;
        let pv = self.a[pr * w + pc];
        let inv = 1.0 / pv;
        for c in 0..w {
            self.a[pr * w + c] *= inv;
        }
        for r in 0..=self.m {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                self.a[r * w + c] -= f * self.a[pr * w + c];
            }
            // Stamp out roundoff in the pivot column.
            self.a[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    fn objective(&self) -> f64 {
        -self.at(self.m, self.n)
    }
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

/// Simplex driver bound to one standard form and one phase cost vector.
struct Engine<'a> {
    sf: &'a StandardForm,
    tab: Tableau,
    /// Phase cost over all standard columns.
    cost: Vec<f64>,
    /// Columns at or beyond this index never enter (bars artificials in
    /// phase 2).
    enter_limit: usize,
}

impl Engine<'_> {
    /// Recompute the whole tableau from the original standard-form data and
    /// the current basis. Clears all accumulated pivot error.
    fn rebuild(&mut self) -> Result<()> {
        let m = self.sf.m;
        let n = self.sf.n_total;
        if m == 0 {
            for j in 0..n {
                self.tab.set(m, j, self.cost[j]);
            }
            self.tab.set(m, n, 0.0);
            return Ok(());
        }
        // Factor the basis, repairing dependent columns: a column that LU
        // finds linearly dependent is swapped for the unit column of a row
        // that has not pivoted yet (its slack or artificial), which always
        // restores independence. The ejected variable becomes nonbasic at 0.
        let lu = loop {
            let basis = self.tab.basis.clone();
            let mut bmat = vec![0.0; m * m];
            for (k, &bj) in basis.iter().enumerate() {
                for i in 0..m {
                    bmat[i * m + k] = self.sf.rows[i][bj];
                }
            }
            match Lu::factor(bmat, m) {
                FactorOutcome::Ok(lu) => break lu,
                FactorOutcome::Singular { dependent_col, free_row } => {
                    let unit = [self.sf.slack_col[free_row], self.sf.art_col[free_row]]
                        .into_iter()
                        .find(|&c| c != usize::MAX && !self.tab.basis.contains(&c));
                    let Some(unit) = unit else {
                        return Err(Error::SolverFailure(
                            "numerically singular basis beyond repair".into(),
                        ));
                    };
                    self.tab.basis[dependent_col] = unit;
                }
            }
        };
        let basis = self.tab.basis.clone();
        let mut col = vec![0.0; m];
        let mut solved = vec![0.0; m];
        // Body columns: B^{-1} A_j.
        for j in 0..n {
            for i in 0..m {
                col[i] = self.sf.rows[i][j];
            }
            lu.solve(&col, &mut solved);
            for i in 0..m {
                self.tab.set(i, j, solved[i]);
            }
        }
        // Rhs: B^{-1} b, kept exact; small negatives (Harris slack fallout)
        // are repaired by dual pivots at optimality.
        lu.solve(&self.sf.b, &mut solved);
        for i in 0..m {
            self.tab.set(i, self.tab.n, solved[i]);
        }
        // Reduced costs and objective.
        let cb: Vec<f64> = basis.iter().map(|&j| self.cost[j]).collect();
        for j in 0..=n {
            let mut z = if j < n { self.cost[j] } else { 0.0 };
            for i in 0..m {
                z -= cb[i] * self.tab.at(i, j);
            }
            self.tab.set(m, j, z);
        }
        // Basic columns are exactly unit vectors now; stamp them.
        for (k, &bj) in basis.iter().enumerate() {
            for i in 0..m {
                self.tab.set(i, bj, if i == k { 1.0 } else { 0.0 });
            }
            self.tab.set(m, bj, 0.0);
        }
        Ok(())
    }

    fn pick_entering(&self, bland: bool) -> Option<usize> {
        if bland {
            (0..self.enter_limit).find(|&j| self.tab.at(self.tab.m, j) < -COST_TOL)
        } else {
            let mut best = -COST_TOL;
            let mut pick = None;
            for j in 0..self.enter_limit {
                let c = self.tab.at(self.tab.m, j);
                if c < best {
                    best = c;
                    pick = Some(j);
                }
            }
            pick
        }
    }

    /// Two-pass Harris ratio test with slack escalation. Pass one finds the
    /// minimum ratio with a slack; pass two picks, among rows within the
    /// slack, the largest pivot element (or the smallest basis index in
    /// Bland mode). When even the best in-slack pivot is tiny, the slack is
    /// widened so a numerically safe row can leave instead; the transient
    /// infeasibility this admits is repaired by dual pivots at optimality.
    fn pick_leaving(&self, pc: usize, bland: bool) -> Option<usize> {
        let m = self.tab.m;
        let mut any = false;
        for r in 0..m {
            if self.tab.at(r, pc) > PIVOT_TOL {
                any = true;
                break;
            }
        }
        if !any {
            return None;
        }
        const SLACKS: [f64; 3] = [RATIO_SLACK, 1e-7, 1e-5];
        let mut fallback = None;
        for (round, slack) in SLACKS.iter().enumerate() {
            let mut theta = f64::INFINITY;
            for r in 0..m {
                let a = self.tab.at(r, pc);
                if a > PIVOT_TOL {
                    theta = theta.min((self.tab.at(r, self.tab.n).max(0.0) + slack) / a);
                }
            }
            let mut pick: Option<usize> = None;
            for r in 0..m {
                let a = self.tab.at(r, pc);
                if a > PIVOT_TOL && self.tab.at(r, self.tab.n).max(0.0) / a <= theta {
                    pick = match pick {
                        None => Some(r),
                        Some(cur) => {
                            let better = if bland {
                                self.tab.basis[r] < self.tab.basis[cur]
                            } else {
                                a > self.tab.at(cur, pc)
                            };
                            Some(if better { r } else { cur })
                        }
                    };
                }
            }
            let pr = pick.expect("a positive column entry exists");
            fallback = Some(pr);
            if self.tab.at(pr, pc) >= 1e-5 || round + 1 == SLACKS.len() {
                return Some(pr);
            }
        }
        fallback
    }

    /// One dual-simplex pivot repairing the most negative basic value while
    /// reduced costs stay nonnegative. Returns false when the rhs is clean.
    fn dual_polish_step(&mut self) -> Result<bool> {
        let m = self.tab.m;
        let mut pr = None;
        let mut worst = -1e-11;
        for r in 0..m {
            let v = self.tab.at(r, self.tab.n);
            if v < worst {
                worst = v;
                pr = Some(r);
            }
        }
        let Some(pr) = pr else {
            return Ok(false);
        };
        let mut pick = None;
        let mut best = f64::INFINITY;
        for j in 0..self.enter_limit {
            let a = self.tab.at(pr, j);
            if a < -PIVOT_TOL {
                let ratio = self.tab.at(self.tab.m, j).max(0.0) / -a;
                if ratio < best {
                    best = ratio;
                    pick = Some(j);
                }
            }
        }
        let Some(pc) = pick else {
            return Err(Error::SolverFailure(
                "could not restore primal feasibility at the optimal basis".into(),
            ));
        };
        self.tab.pivot(pr, pc);
        Ok(true)
    }

    fn run(&mut self) -> Result<RunOutcome> {
        let max_iters = 20_000 + 200 * (self.tab.m + self.tab.n);
        let mut bland = false;
        let mut stall = 0usize;
        let mut since_rebuild = 0usize;
        let mut polish_rounds = 0usize;
        let mut last_obj = self.tab.objective();

        for _ in 0..max_iters {
            let Some(pc) = self.pick_entering(bland) else {
                // Verify optimality against a fresh tableau when pivots have
                // accumulated since the last rebuild.
                if since_rebuild > 0 {
                    self.rebuild()?;
                    since_rebuild = 0;
                    if self.pick_entering(bland).is_some() {
                        continue;
                    }
                }
                // Repair any Harris-slack infeasibility with dual pivots,
                // then re-verify from fresh data.
                let mut polished = false;
                for _ in 0..500 {
                    if !self.dual_polish_step()? {
                        break;
                    }
                    polished = true;
                }
                if polished {
                    polish_rounds += 1;
                    if polish_rounds > 8 {
                        return Err(Error::SolverFailure(
                            "primal/dual polishing failed to converge".into(),
                        ));
                    }
                    self.rebuild()?;
                    since_rebuild = 0;
                    continue;
                }
                return Ok(RunOutcome::Optimal);
            };
            let Some(pr) = self.pick_leaving(pc, bland) else {
                if since_rebuild > 0 {
                    self.rebuild()?;
                    since_rebuild = 0;
                    continue;
                }
                return Ok(RunOutcome::Unbounded);
            };

            if std::env::var("LP_TRACE").is_ok() {
                let pv = self.tab.at(pr, pc);
                if pv.abs() < 1e-5 {
                    eprintln!("tiny pivot {pv:.3e} at row {pr} col {pc} (bland {bland}, stall {stall})");
                }
            }
            self.tab.pivot(pr, pc);
            since_rebuild += 1;
            if since_rebuild >= REBUILD_EVERY {
                self.rebuild()?;
                since_rebuild = 0;
            }

            let obj = self.tab.objective();
            if obj < last_obj - 1e-12 {
                stall = 0;
                bland = false;
                last_obj = obj;
            } else {
                stall += 1;
                if stall == STALL_LIMIT && !bland {
                    bland = true;
                    // A stalled run is where pivot error piles up; start the
                    // Bland escape from exact data.
                    self.rebuild()?;
                    since_rebuild = 0;
                }
            }
        }
        Err(Error::SolverFailure("simplex iteration limit exceeded".into()))
    }
}

/// Solve a linear program with the two-phase primal simplex.
///
/// Infeasible and unbounded are normal statuses. An `Err` means the solver
/// itself failed (iteration limit, unrecoverable numerics).
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let sf = standardize(lp);
    let m = sf.m;
    let n = sf.n_total;
    let w = n + 1;

    let mut tab = Tableau { m, n, a: vec![0.0; (m + 1) * w], basis: vec![0; m] };
    for r in 0..m {
        for c in 0..n {
            tab.set(r, c, sf.rows[r][c]);
        }
        tab.set(r, n, sf.b[r]);
    }

    // Initial basis: slack for Le rows, artificial otherwise.
    {
        let mut next_art = sf.artificial_start;
        for r in 0..m {
            if sf.slack_col[r] != usize::MAX && sf.slack_sign[r] > 0.0 {
                tab.basis[r] = sf.slack_col[r];
            } else {
                tab.basis[r] = next_art;
                next_art += 1;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    if sf.artificial_start < n {
        let mut phase1_cost = vec![0.0; n];
        for c in phase1_cost.iter_mut().skip(sf.artificial_start) {
            *c = 1.0;
        }
        let mut engine = Engine { sf: &sf, tab, cost: phase1_cost, enter_limit: n };
        engine.rebuild()?;
        match engine.run()? {
            RunOutcome::Optimal => {}
            RunOutcome::Unbounded => {
                return Err(Error::SolverFailure("phase-1 objective unbounded".into()));
            }
        }
        if engine.tab.objective() > FEAS_TOL {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
        }
        // Drive remaining basic artificials out where the row has support.
        for r in 0..m {
            if engine.tab.basis[r] >= sf.artificial_start {
                let pc = (0..sf.artificial_start)
                    .find(|&c| engine.tab.at(r, c).abs() > PIVOT_TOL);
                if let Some(pc) = pc {
                    engine.tab.pivot(r, pc);
                }
                // Otherwise the row is redundant; the artificial stays basic at zero.
            }
        }
        tab = engine.tab;
    }

    // Phase 2 with the real objective; artificial columns are barred.
    let mut engine =
        Engine { sf: &sf, tab, cost: sf.cost.clone(), enter_limit: sf.artificial_start };
    engine.rebuild()?;
    match engine.run()? {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return Ok(LpSolution::non_optimal(LpStatus::Unbounded)),
    }

    match extract_solution(lp, &sf, &engine.tab) {
        Ok(sol) => Ok(sol),
        Err(_) => {
            // One rescue pass: refresh the tableau and polish once more.
            engine.rebuild()?;
            engine.run()?;
            extract_solution(lp, &sf, &engine.tab)
        }
    }
}

fn extract_solution(lp: &LinearProgram, sf: &StandardForm, tab: &Tableau) -> Result<LpSolution> {
    let m = sf.m;
    let n = sf.n_total;

    // Standard-form primal.
    let mut z = vec![0.0; n];
    for r in 0..m {
        z[tab.basis[r]] = tab.at(r, n).max(0.0);
    }

    // Standard-form duals from reduced costs of identity columns.
    let mut y = vec![0.0; m];
    for r in 0..m {
        if sf.slack_col[r] != usize::MAX {
            let rc = tab.at(tab.m, sf.slack_col[r]);
            y[r] = if sf.slack_sign[r] > 0.0 { -rc } else { rc };
        }
    }
    // Rows without slack (equalities) read the dual off the artificial column.
    {
        let mut next_art = sf.artificial_start;
        for r in 0..m {
            let has_art = sf.slack_col[r] == usize::MAX || sf.slack_sign[r] < 0.0;
            if has_art {
                if sf.slack_col[r] == usize::MAX {
                    y[r] = -tab.at(tab.m, next_art);
                }
                next_art += 1;
            }
        }
    }

    // Map primal back to original variables.
    let nvars = lp.num_vars();
    let mut x = sf.shift.clone();
    for (col, &(j, sign)) in sf.col_map.iter().enumerate() {
        x[j] += sign * z[col];
    }
    for v in x.iter_mut().take(nvars) {
        if v.abs() < 1e-13 {
            *v = 0.0;
        }
    }

    // Residuals against the original data.
    let mut primal_residual = 0.0_f64;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(&x).map(|(a, v)| a * v).sum();
        let viol = match c.relation {
            Relation::Le => (lhs - c.rhs).max(0.0),
            Relation::Ge => (c.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        primal_residual = primal_residual.max(viol);
    }
    for (j, bnd) in lp.bounds.iter().enumerate() {
        if bnd.lower.is_finite() {
            primal_residual = primal_residual.max(bnd.lower - x[j]);
        }
        if let Some(u) = bnd.upper {
            primal_residual = primal_residual.max(x[j] - u);
        }
    }

    let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    // Duality gap and complementary slackness in standard form.
    let dual_obj_std: f64 = y.iter().zip(&sf.b).map(|(yi, bi)| yi * bi).sum();
    let shift_cost: f64 = lp.objective.iter().zip(&sf.shift).map(|(c, s)| c * s).sum();
    let primal_obj_std = objective - shift_cost;
    let dual_gap = (primal_obj_std - dual_obj_std).abs();

    let mut complementarity = 0.0_f64;
    for j in 0..n {
        let rc = tab.at(tab.m, j);
        complementarity = complementarity.max((rc * z[j]).abs());
    }
    for r in 0..m {
        if sf.slack_col[r] != usize::MAX {
            complementarity = complementarity.max((y[r] * z[sf.slack_col[r]]).abs());
        }
    }

    // Reported duals: original rows only, unflipped and unscaled.
    let mut dual = vec![0.0; lp.constraints.len()];
    for r in 0..m {
        let (orig, flip) = sf.row_map[r];
        if orig != usize::MAX {
            dual[orig] = flip * y[r] / sf.row_scale[r];
        }
    }

    let scale = 1.0 + objective.abs();
    if primal_residual > 1e-9 * scale || dual_gap > 1e-8 * scale || complementarity > 1e-8 * scale {
        return Err(Error::SolverFailure(format!(
            "optimal basis failed verification: primal residual {primal_residual:.3e}, \
             dual gap {dual_gap:.3e}, complementarity {complementarity:.3e}"
        )));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal: x,
        dual,
        objective,
        primal_residual,
        dual_gap,
        complementarity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_ok(lp: &LinearProgram) -> LpSolution {
        let s = solve(lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        s
    }

    #[test]
    fn minimize_x_above_one() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.ge(vec![1.0], 1.0);
        let s = solve_ok(&lp);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
        assert!((s.objective - 1.0).abs() < 1e-9);
        // dual for the single >= row: y = 1
        assert!((s.dual[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn maximize_x_below_five() {
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.le(vec![1.0], 5.0);
        let s = solve_ok(&lp);
        assert!((s.primal[0] - 5.0).abs() < 1e-9);
        assert!((s.objective + 5.0).abs() < 1e-9);
    }

    #[test]
    fn two_by_two_vertex() {
        // min x + y st x + 2y >= 4, 3x + y >= 6 -> (1.6, 1.2), objective 2.8
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.ge(vec![1.0, 2.0], 4.0).ge(vec![3.0, 1.0], 6.0);
        let s = solve_ok(&lp);
        assert!((s.primal[0] - 1.6).abs() < 1e-9);
        assert!((s.primal[1] - 1.2).abs() < 1e-9);
        assert!((s.objective - 2.8).abs() < 1e-9);
        // duals solve y1 + 3 y2 = 1, 2 y1 + y2 = 1
        assert!((s.dual[0] - 0.4).abs() < 1e-9);
        assert!((s.dual[1] - 0.2).abs() < 1e-9);
        assert!(s.dual_gap < 1e-8);
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.ge(vec![1.0], 3.0).le(vec![1.0], 1.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.ge(vec![1.0], 1.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_constraints_and_free_vars() {
        // min t st t >= 3 - x, t >= x - 1, x = 2 fixed
        let mut lp = LinearProgram::new(vec![0.0, 1.0]);
        lp.eq(vec![1.0, 0.0], 2.0);
        lp.ge(vec![1.0, 1.0], 3.0); // t >= 3 - x
        lp.ge(vec![-1.0, 1.0], -1.0); // t >= x - 1
        lp.free_var(1);
        let s = solve_ok(&lp);
        assert!((s.primal[0] - 2.0).abs() < 1e-9);
        assert!((s.primal[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn free_variable_can_go_negative() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.ge(vec![1.0], -4.0);
        lp.free_var(0);
        let s = solve_ok(&lp);
        assert!((s.primal[0] + 4.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_respected() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.bounds[0].upper = Some(2.0);
        lp.bounds[1].upper = Some(3.5);
        lp.le(vec![1.0, 1.0], 100.0);
        let s = solve_ok(&lp);
        assert!((s.primal[0] - 2.0).abs() < 1e-9);
        assert!((s.primal[1] - 3.5).abs() < 1e-9);
    }

    #[test]
    fn shifted_lower_bounds() {
        // min x + y with x >= -2, y >= 5
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.bounds[0].lower = -2.0;
        lp.bounds[1].lower = 5.0;
        let s = solve_ok(&lp);
        assert!((s.primal[0] + 2.0).abs() < 1e-9);
        assert!((s.primal[1] - 5.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_rows_are_harmless() {
        // x + y = 1 twice, plus minimize x
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.eq(vec![1.0, 1.0], 1.0);
        lp.eq(vec![1.0, 1.0], 1.0);
        let s = solve_ok(&lp);
        assert!(s.primal[0].abs() < 1e-9);
        assert!((s.primal[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_transport_like_program() {
        // A tiny assignment polytope: heavily degenerate.
        let n = 4usize;
        let mut obj = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                obj[i * n + j] = ((i * 7 + j * 13) % 5) as f64;
            }
        }
        let mut lp = LinearProgram::new(obj);
        for i in 0..n {
            let mut row = vec![0.0; n * n];
            for j in 0..n {
                row[i * n + j] = 1.0;
            }
            lp.eq(row, 0.25);
        }
        for j in 0..n {
            let mut row = vec![0.0; n * n];
            for i in 0..n {
                row[i * n + j] = 1.0;
            }
            lp.eq(row, 0.25);
        }
        let s = solve_ok(&lp);
        assert!(s.dual_gap < 1e-8);
        assert!(s.primal_residual < 1e-9);
    }

    #[test]
    fn deterministic_output() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0, 0.5]);
        lp.ge(vec![1.0, 1.0, 1.0], 1.0).le(vec![2.0, 1.0, 3.0], 4.0);
        let a = solve_ok(&lp);
        let b = solve_ok(&lp);
        assert_eq!(a.primal, b.primal);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }
}
