//! Sparse linear programs and a bounded-variable primal simplex solver.
//!
//! The solver is self-contained and deterministic: Dantzig pricing with a
//! Bland's-rule fallback after a degeneracy streak, equilibration scaling,
//! and a two-phase start with artificial variables. It is meant for
//! desk-scale instances where a verifiable reference algorithm beats an
//! external dependency; [`oracle::oracle_solve`] provides an independent
//! enumeration oracle for tiny instances.

pub mod oracle;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Direction of one constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// A sparse linear program, minimization form.
///
/// Variables carry bounds `[lower, upper]` defaulting to `[0, +inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LPInstance {
    pub num_vars: usize,
    /// Objective coefficients, length `num_vars`.
    pub objective: Vec<f64>,
    /// Row-major triplets `(row, col, coefficient)`.
    pub triplets: Vec<(usize, usize, f64)>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LPInstance {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            triplets: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    pub fn num_rows(&self) -> usize {
        self.senses.len()
    }

    /// Appends a constraint row and returns its index.
    pub fn add_row(&mut self, sense: RowSense, rhs: f64, terms: &[(usize, f64)]) -> usize {
        let row = self.senses.len();
        for &(col, coef) in terms {
            if coef != 0.0 {
                self.triplets.push((row, col, coef));
            }
        }
        self.senses.push(sense);
        self.rhs.push(rhs);
        row
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.lower[col] = lower;
        self.upper[col] = upper;
    }

    /// Checks the structural invariants of the instance.
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.objective.len() != self.num_vars
            || self.lower.len() != self.num_vars
            || self.upper.len() != self.num_vars
        {
            return Err(SolverError::BadInstance(
                "objective/bounds length must equal num_vars".into(),
            ));
        }
        if self.rhs.len() != self.senses.len() {
            return Err(SolverError::BadInstance("rhs/senses length mismatch".into()));
        }
        let m = self.senses.len();
        for &(row, col, val) in &self.triplets {
            if row >= m || col >= self.num_vars {
                return Err(SolverError::BadInstance(format!(
                    "triplet ({row}, {col}) out of range"
                )));
            }
            if !val.is_finite() {
                return Err(SolverError::BadInstance(format!(
                    "non-finite coefficient at ({row}, {col})"
                )));
            }
        }
        if self.rhs.iter().any(|b| !b.is_finite()) {
            return Err(SolverError::BadInstance("non-finite rhs".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(SolverError::BadInstance("non-finite objective".into()));
        }
        for j in 0..self.num_vars {
            if self.lower[j] > self.upper[j] {
                return Err(SolverError::BadInstance(format!(
                    "variable {j}: lower {} > upper {}",
                    self.lower[j], self.upper[j]
                )));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(SolverError::BadInstance(format!("variable {j}: NaN bound")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Result of a solve.
///
/// For `Infeasible` the objective holds the residual infeasibility of the
/// phase-one optimum; for `Unbounded` it is `-inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LPSolution {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    /// Per-row duals (shadow prices d objective / d rhs); diagnostics only.
    pub row_duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-7,
            opt_tol: 1e-8,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid LP instance: {0}")]
    BadInstance(String),
    #[error("oracle limited to 12 variables and 12 rows, got {vars} x {rows}")]
    OracleSize { vars: usize, rows: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

/// Column-compressed copy of the constraint matrix plus working bounds.
struct Core {
    m: usize,
    col_start: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// Scaled right-hand side.
    b: Vec<f64>,
    /// First artificial column index; columns >= this are artificial.
    first_artificial: usize,
}

impl Core {
    fn ncols(&self) -> usize {
        self.col_start.len() - 1
    }

    fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        (&self.col_rows[s..e], &self.col_vals[s..e])
    }
}

struct Workspace {
    state: Vec<VarState>,
    basis: Vec<usize>,
    x: Vec<f64>,
    /// Dense row-major inverse of the basis matrix.
    binv: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
    pivot_row: Vec<f64>,
    iterations: usize,
    degenerate_streak: usize,
    bland: bool,
}

const PIVOT_TOL: f64 = 1e-9;
const DEGENERACY_STREAK_LIMIT: usize = 40;
const REFRESH_INTERVAL: usize = 128;

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Solves the LP with a bounded-variable primal simplex.
///
/// Deterministic: identical instances produce an identical pivot sequence
/// and bit-identical solutions.
pub fn solve(lp: &LPInstance, opts: &SolveOptions) -> Result<LPSolution, SolverError> {
    lp.validate()?;
    let m = lp.num_rows();
    let n = lp.num_vars;

    // Trivial case: no rows, each variable sits at its cheapest bound.
    if m == 0 {
        let mut primal = vec![0.0; n];
        for j in 0..n {
            let c = lp.objective[j];
            let v = if c > 0.0 {
                lp.lower[j]
            } else if c < 0.0 {
                lp.upper[j]
            } else if lp.lower[j].is_finite() {
                lp.lower[j]
            } else {
                lp.upper[j].min(0.0).max(lp.lower[j])
            };
            if !v.is_finite() && c != 0.0 {
                return Ok(LPSolution {
                    status: SolveStatus::Unbounded,
                    primal: vec![0.0; n],
                    objective: f64::NEG_INFINITY,
                    row_duals: vec![],
                    iterations: 0,
                });
            }
            primal[j] = if v.is_finite() { v } else { 0.0 };
        }
        let objective = dot(&lp.objective, &primal);
        return Ok(LPSolution {
            status: SolveStatus::Optimal,
            primal,
            objective,
            row_duals: vec![],
            iterations: 0,
        });
    }

    let (row_scale, col_scale) = equilibrate(lp);
    let (mut core, mut ws, n_artificial) = build_core(lp, &row_scale, &col_scale);

    let mut phase1_cost = vec![0.0; core.ncols()];
    for j in core.first_artificial..core.ncols() {
        phase1_cost[j] = 1.0;
    }

    // Phase 1: drive artificial infeasibility to zero.
    if n_artificial > 0 {
        let end = iterate(&core, &mut ws, &phase1_cost, opts, true)?;
        match end {
            PhaseEnd::IterationLimit => {
                return Ok(finish(lp, &core, &ws, &row_scale, &col_scale, SolveStatus::IterationLimit));
            }
            PhaseEnd::Unbounded => {
                return Err(SolverError::Numerical(
                    "phase-one objective unbounded below".into(),
                ));
            }
            PhaseEnd::Optimal => {}
        }
        let infeasibility: f64 = (core.first_artificial..core.ncols())
            .map(|j| ws.x[j].abs())
            .sum();
        let b_norm = core.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if infeasibility > opts.feas_tol * (1.0 + b_norm) {
            let mut out = finish(lp, &core, &ws, &row_scale, &col_scale, SolveStatus::Infeasible);
            out.objective = unscaled_residual(lp, &out.primal);
            return Ok(out);
        }
        pivot_out_artificials(&core, &mut ws);
        for j in core.first_artificial..core.ncols() {
            core.lb[j] = 0.0;
            core.ub[j] = 0.0;
            if !matches!(ws.state[j], VarState::Basic(_)) {
                ws.state[j] = VarState::AtLower;
                ws.x[j] = 0.0;
            }
        }
    }

    // Phase 2: optimize the real objective.
    let mut phase2_cost = vec![0.0; core.ncols()];
    for (j, c) in phase2_cost.iter_mut().enumerate().take(n) {
        *c = lp.objective[j] * col_scale[j];
    }
    ws.bland = false;
    ws.degenerate_streak = 0;
    let end = iterate(&core, &mut ws, &phase2_cost, opts, false)?;
    let status = match end {
        PhaseEnd::Optimal => SolveStatus::Optimal,
        PhaseEnd::Unbounded => SolveStatus::Unbounded,
        PhaseEnd::IterationLimit => SolveStatus::IterationLimit,
    };

    if status == SolveStatus::Optimal {
        polish(lp, &core, &mut ws, opts)?;
    }

    let mut out = finish(lp, &core, &ws, &row_scale, &col_scale, status);
    if status == SolveStatus::Optimal {
        compute_duals(&core, &mut ws, &phase2_cost, &row_scale, &mut out.row_duals);
    } else if status == SolveStatus::Unbounded {
        out.objective = f64::NEG_INFINITY;
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Infinity-norm equilibration: one row pass, one column pass.
fn equilibrate(lp: &LPInstance) -> (Vec<f64>, Vec<f64>) {
    let m = lp.num_rows();
    let n = lp.num_vars;
    let mut row_scale = vec![0.0f64; m];
    for &(r, _, v) in &lp.triplets {
        row_scale[r] = row_scale[r].max(v.abs());
    }
    for s in row_scale.iter_mut() {
        *s = if *s > 0.0 { 1.0 / *s } else { 1.0 };
    }
    let mut col_scale = vec![0.0f64; n];
    for &(r, c, v) in &lp.triplets {
        col_scale[c] = col_scale[c].max((v * row_scale[r]).abs());
    }
    for s in col_scale.iter_mut() {
        *s = if *s > 0.0 { 1.0 / *s } else { 1.0 };
    }
    (row_scale, col_scale)
}

/// Builds the scaled column-compressed core, the slack columns, the crash
/// basis, and whatever artificial columns the crash basis still needs.
fn build_core(
    lp: &LPInstance,
    row_scale: &[f64],
    col_scale: &[f64],
) -> (Core, Workspace, usize) {
    let m = lp.num_rows();
    let n = lp.num_vars;

    // Column-sorted copy of the scaled matrix.
    let mut triplets: Vec<(usize, usize, f64)> = lp
        .triplets
        .iter()
        .map(|&(r, c, v)| (r, c, v * row_scale[r] * col_scale[c]))
        .collect();
    triplets.sort_by_key(|&(r, c, _)| (c, r));

    let n_slack = lp
        .senses
        .iter()
        .filter(|s| !matches!(s, RowSense::Eq))
        .count();
    let capacity = n + n_slack + m;
    let mut col_start = Vec::with_capacity(capacity + 1);
    let mut col_rows = Vec::with_capacity(triplets.len() + n_slack + m);
    let mut col_vals = Vec::with_capacity(triplets.len() + n_slack + m);
    let mut lb = Vec::with_capacity(capacity);
    let mut ub = Vec::with_capacity(capacity);

    col_start.push(0);
    let mut it = triplets.iter().peekable();
    for j in 0..n {
        let mut row_seen: Option<usize> = None;
        while let Some(&&(r, c, v)) = it.peek() {
            if c != j {
                break;
            }
            it.next();
            // Merge duplicate entries for the same cell.
            if row_seen == Some(r) {
                *col_vals.last_mut().unwrap() += v;
            } else {
                col_rows.push(r);
                col_vals.push(v);
                row_seen = Some(r);
            }
        }
        col_start.push(col_rows.len());
        lb.push(lp.lower[j] / col_scale[j]);
        ub.push(lp.upper[j] / col_scale[j]);
    }

    // Slack columns: `Le` rows get s in [0, inf), `Ge` rows s in (-inf, 0].
    let mut slack_col_of_row = vec![usize::MAX; m];
    for (r, sense) in lp.senses.iter().enumerate() {
        if matches!(sense, RowSense::Eq) {
            continue;
        }
        slack_col_of_row[r] = col_start.len() - 1;
        col_rows.push(r);
        col_vals.push(1.0);
        col_start.push(col_rows.len());
        match sense {
            RowSense::Le => {
                lb.push(0.0);
                ub.push(f64::INFINITY);
            }
            RowSense::Ge => {
                lb.push(f64::NEG_INFINITY);
                ub.push(0.0);
            }
            RowSense::Eq => unreachable!(),
        }
    }

    let b: Vec<f64> = lp.rhs.iter().zip(row_scale).map(|(v, s)| v * s).collect();

    // Nonbasic start: every column at a finite bound, free columns at zero.
    let structural_cols = col_start.len() - 1;
    let mut state = Vec::with_capacity(capacity);
    let mut x = Vec::with_capacity(capacity);
    for j in 0..structural_cols {
        if lb[j].is_finite() {
            state.push(VarState::AtLower);
            x.push(lb[j]);
        } else if ub[j].is_finite() {
            state.push(VarState::AtUpper);
            x.push(ub[j]);
        } else {
            state.push(VarState::Free);
            x.push(0.0);
        }
    }

    let mut residual = b.clone();
    for j in 0..structural_cols {
        if x[j] != 0.0 {
            let (s, e) = (col_start[j], col_start[j + 1]);
            for k in s..e {
                residual[col_rows[k]] -= col_vals[k] * x[j];
            }
        }
    }

    // Crash basis: a row's own slack when the residual fits its bounds,
    // otherwise an artificial column.
    let mut basis = vec![usize::MAX; m];
    let mut artificial_rows = Vec::new();
    for r in 0..m {
        let js = slack_col_of_row[r];
        if js != usize::MAX && residual[r] >= lb[js] && residual[r] <= ub[js] {
            basis[r] = js;
            state[js] = VarState::Basic(r);
            x[js] = residual[r];
        } else {
            artificial_rows.push(r);
        }
    }
    let first_artificial = col_start.len() - 1;
    let mut art_sign = Vec::with_capacity(artificial_rows.len());
    for &r in &artificial_rows {
        let sign = if residual[r] >= 0.0 { 1.0 } else { -1.0 };
        let j = col_start.len() - 1;
        col_rows.push(r);
        col_vals.push(sign);
        col_start.push(col_rows.len());
        lb.push(0.0);
        ub.push(f64::INFINITY);
        basis[r] = j;
        state.push(VarState::Basic(r));
        x.push(residual[r].abs());
        art_sign.push(sign);
    }

    // The crash basis matrix is diagonal with entries +-1.
    let mut binv = vec![0.0; m * m];
    for r in 0..m {
        let j = basis[r];
        let diag = if j >= first_artificial {
            art_sign[j - first_artificial]
        } else {
            1.0
        };
        binv[r * m + r] = diag;
    }

    let n_artificial = artificial_rows.len();
    let core = Core {
        m,
        col_start,
        col_rows,
        col_vals,
        lb,
        ub,
        b,
        first_artificial,
    };
    let ws = Workspace {
        state,
        basis,
        x,
        binv,
        y: vec![0.0; m],
        w: vec![0.0; m],
        pivot_row: vec![0.0; m],
        iterations: 0,
        degenerate_streak: 0,
        bland: false,
    };
    (core, ws, n_artificial)
}

/// Runs simplex iterations until optimality, unboundedness, or the
/// iteration limit. `phase1` forbids unboundedness (the phase-one
/// objective is bounded below by zero).
fn iterate(
    core: &Core,
    ws: &mut Workspace,
    cost: &[f64],
    opts: &SolveOptions,
    phase1: bool,
) -> Result<PhaseEnd, SolverError> {
    let m = core.m;
    loop {
        if ws.iterations >= opts.max_iter {
            return Ok(PhaseEnd::IterationLimit);
        }
        if ws.iterations % REFRESH_INTERVAL == REFRESH_INTERVAL - 1 {
            refresh_basics(core, ws)?;
        }

        // Pricing: y = c_B B^-1, then reduced costs per nonbasic column.
        price_duals(core, ws, cost);
        let entering = select_entering(core, ws, cost, opts.opt_tol);
        let Some((j_in, increase)) = entering else {
            return Ok(PhaseEnd::Optimal);
        };

        // Pivot column in the current basis: w = B^-1 a_j.
        compute_pivot_column(core, ws, j_in);

        let dir = if increase { 1.0 } else { -1.0 };
        let mut t_best = core.ub[j_in] - core.lb[j_in]; // bound flip distance
        if !t_best.is_finite() {
            t_best = f64::INFINITY;
        }
        let mut leaving: Option<usize> = None;
        let mut leaving_pivot = 0.0f64;
        for i in 0..m {
            let wi = ws.w[i];
            if wi.abs() <= PIVOT_TOL {
                continue;
            }
            let k = ws.basis[i];
            let slope = dir * wi; // basic value moves at -slope per unit step
            let limit = if slope > 0.0 {
                if core.lb[k].is_finite() {
                    (ws.x[k] - core.lb[k]) / slope
                } else {
                    continue;
                }
            } else if core.ub[k].is_finite() {
                (ws.x[k] - core.ub[k]) / slope
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let better = limit < t_best - 1e-12 * (1.0 + t_best.abs().min(1e12));
            let tie = !better && limit <= t_best + 1e-12 * (1.0 + t_best.abs().min(1e12));
            let replace = if better {
                true
            } else if tie && t_best.is_finite() {
                if ws.bland {
                    // Bland: smallest basic variable index leaves.
                    leaving.map_or(true, |r| ws.basis[i] < ws.basis[r])
                } else {
                    // Stability: largest pivot magnitude among ties.
                    wi.abs() > leaving_pivot.abs()
                }
            } else {
                false
            };
            if replace {
                t_best = limit.min(t_best);
                leaving = Some(i);
                leaving_pivot = wi;
            }
        }

        if !t_best.is_finite() {
            if phase1 {
                return Err(SolverError::Numerical(
                    "unbounded direction in phase one".into(),
                ));
            }
            return Ok(PhaseEnd::Unbounded);
        }

        ws.iterations += 1;
        let step = dir * t_best;
        match leaving {
            None => {
                // Bound flip: the entering column travels to its other bound.
                for i in 0..m {
                    let k = ws.basis[i];
                    ws.x[k] -= step * ws.w[i];
                }
                ws.x[j_in] += step;
                ws.state[j_in] = if increase {
                    ws.x[j_in] = core.ub[j_in];
                    VarState::AtUpper
                } else {
                    ws.x[j_in] = core.lb[j_in];
                    VarState::AtLower
                };
            }
            Some(r) => {
                for i in 0..m {
                    if i != r {
                        let k = ws.basis[i];
                        ws.x[k] -= step * ws.w[i];
                    }
                }
                let k_out = ws.basis[r];
                // The leaving variable lands exactly on the bound it hit.
                if dir * ws.w[r] > 0.0 {
                    ws.x[k_out] = core.lb[k_out];
                    ws.state[k_out] = VarState::AtLower;
                } else {
                    ws.x[k_out] = core.ub[k_out];
                    ws.state[k_out] = VarState::AtUpper;
                }
                // Artificials never re-enter once they leave the basis.
                if k_out >= core.first_artificial {
                    // fixed out by zero-width bounds in phase transitions;
                    // mark here too so phase 1 cannot bring it back
                    ws.state[k_out] = VarState::AtLower;
                    ws.x[k_out] = 0.0;
                }
                ws.x[j_in] += step;
                ws.basis[r] = j_in;
                ws.state[j_in] = VarState::Basic(r);
                update_inverse(core, ws, r)?;
            }
        }

        if t_best <= 1e-10 {
            ws.degenerate_streak += 1;
            if ws.degenerate_streak > DEGENERACY_STREAK_LIMIT {
                ws.bland = true;
            }
        } else {
            ws.degenerate_streak = 0;
            ws.bland = false;
        }
    }
}

fn price_duals(core: &Core, ws: &mut Workspace, cost: &[f64]) {
    let m = core.m;
    for v in ws.y.iter_mut() {
        *v = 0.0;
    }
    for i in 0..m {
        let cb = cost[ws.basis[i]];
        if cb != 0.0 {
            let row = &ws.binv[i * m..(i + 1) * m];
            for (k, yv) in ws.y.iter_mut().enumerate() {
                *yv += cb * row[k];
            }
        }
    }
}

fn reduced_cost(core: &Core, y: &[f64], cost: &[f64], j: usize) -> f64 {
    let (rows, vals) = core.col(j);
    let mut d = cost[j];
    for (r, v) in rows.iter().zip(vals) {
        d -= y[*r] * v;
    }
    d
}

/// Chooses the entering column, or `None` at optimality. Returns the
/// column and whether it increases from its current value.
fn select_entering(
    core: &Core,
    ws: &Workspace,
    cost: &[f64],
    opt_tol: f64,
) -> Option<(usize, bool)> {
    let mut best: Option<(usize, bool)> = None;
    let mut best_violation = opt_tol;
    // Artificial columns never enter: once nonbasic they are dropped.
    for j in 0..core.first_artificial {
        let (violation, increase) = match ws.state[j] {
            VarState::Basic(_) => continue,
            _ if core.lb[j] == core.ub[j] => continue, // fixed
            VarState::AtLower => {
                let d = reduced_cost(core, &ws.y, cost, j);
                (-d, true)
            }
            VarState::AtUpper => {
                let d = reduced_cost(core, &ws.y, cost, j);
                (d, false)
            }
            VarState::Free => {
                let d = reduced_cost(core, &ws.y, cost, j);
                (d.abs(), d < 0.0)
            }
        };
        if violation > best_violation {
            if ws.bland {
                return Some((j, increase));
            }
            best_violation = violation;
            best = Some((j, increase));
        }
    }
    best
}

fn compute_pivot_column(core: &Core, ws: &mut Workspace, j: usize) {
    let m = core.m;
    let (rows, vals) = core.col(j);
    for i in 0..m {
        let row = &ws.binv[i * m..(i + 1) * m];
        let mut acc = 0.0;
        for (r, v) in rows.iter().zip(vals) {
            acc += row[*r] * v;
        }
        ws.w[i] = acc;
    }
}

/// Rank-one update of the dense inverse after a pivot on row `r`.
fn update_inverse(core: &Core, ws: &mut Workspace, r: usize) -> Result<(), SolverError> {
    let m = core.m;
    let pivot = ws.w[r];
    if pivot.abs() <= PIVOT_TOL {
        return Err(SolverError::Numerical(format!(
            "pivot {pivot:.3e} below tolerance"
        )));
    }
    let inv_pivot = 1.0 / pivot;
    {
        let row = &mut ws.binv[r * m..(r + 1) * m];
        for v in row.iter_mut() {
            *v *= inv_pivot;
        }
        ws.pivot_row.copy_from_slice(row);
    }
    for i in 0..m {
        if i == r {
            continue;
        }
        let factor = ws.w[i];
        if factor == 0.0 {
            continue;
        }
        let row = &mut ws.binv[i * m..(i + 1) * m];
        for (v, p) in row.iter_mut().zip(&ws.pivot_row) {
            *v -= factor * p;
        }
    }
    Ok(())
}

/// Recomputes basic values from the inverse, and refactorizes the inverse
/// first if the primal residual has drifted.
fn refresh_basics(core: &Core, ws: &mut Workspace) -> Result<(), SolverError> {
    let resid = basic_residual(core, ws);
    if resid > 1e-9 {
        refactorize(core, ws)?;
    }
    let m = core.m;
    let mut rhs = core.b.clone();
    for j in 0..core.ncols() {
        if matches!(ws.state[j], VarState::Basic(_)) || ws.x[j] == 0.0 {
            continue;
        }
        let (rows, vals) = core.col(j);
        for (r, v) in rows.iter().zip(vals) {
            rhs[*r] -= v * ws.x[j];
        }
    }
    for i in 0..m {
        let row = &ws.binv[i * m..(i + 1) * m];
        ws.x[ws.basis[i]] = dot(row, &rhs);
    }
    Ok(())
}

/// Max-norm of `A x - b` over rows, in scaled units.
fn basic_residual(core: &Core, ws: &Workspace) -> f64 {
    let mut resid: Vec<f64> = core.b.iter().map(|v| -v).collect();
    for j in 0..core.ncols() {
        if ws.x[j] == 0.0 {
            continue;
        }
        let (rows, vals) = core.col(j);
        for (r, v) in rows.iter().zip(vals) {
            resid[*r] += v * ws.x[j];
        }
    }
    resid.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Rebuilds the dense inverse from the basis columns by Gauss-Jordan
/// elimination with partial pivoting.
fn refactorize(core: &Core, ws: &mut Workspace) -> Result<(), SolverError> {
    let m = core.m;
    let mut mat = vec![0.0f64; m * m];
    for (col_pos, &j) in ws.basis.iter().enumerate() {
        let (rows, vals) = core.col(j);
        for (r, v) in rows.iter().zip(vals) {
            mat[*r * m + col_pos] = *v;
        }
    }
    let mut inv = vec![0.0f64; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for col in 0..m {
        let mut piv = col;
        let mut best = mat[col * m + col].abs();
        for r in col + 1..m {
            let v = mat[r * m + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= 1e-12 {
            return Err(SolverError::Numerical("singular basis".into()));
        }
        if piv != col {
            for k in 0..m {
                mat.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
        }
        let inv_p = 1.0 / mat[col * m + col];
        for k in 0..m {
            mat[col * m + k] *= inv_p;
            inv[col * m + k] *= inv_p;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = mat[r * m + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..m {
                mat[r * m + k] -= f * mat[col * m + k];
                inv[r * m + k] -= f * inv[col * m + k];
            }
        }
    }
    // Gauss-Jordan produced the inverse of B in column-of-basis order:
    // inv * B = I where B columns follow `basis`. binv rows must map
    // B x_B = rhs to x_B in basis order, which is exactly inv.
    ws.binv.copy_from_slice(&inv);
    Ok(())
}

/// One degenerate pass that swaps basic artificials for structural
/// columns where a usable pivot exists; leftover rows are redundant.
fn pivot_out_artificials(core: &Core, ws: &mut Workspace) {
    let m = core.m;
    for r in 0..m {
        if ws.basis[r] < core.first_artificial {
            continue;
        }
        let mut found = None;
        for j in 0..core.first_artificial {
            if matches!(ws.state[j], VarState::Basic(_)) || core.lb[j] == core.ub[j] {
                continue;
            }
            let (rows, vals) = core.col(j);
            let mut val = 0.0;
            for (rr, v) in rows.iter().zip(vals) {
                val += ws.binv[r * m + rr] * v;
            }
            if val.abs() > 1e-7 {
                found = Some(j);
                break;
            }
        }
        if let Some(j) = found {
            // Degenerate swap: the entering column keeps its value, the
            // artificial leaves at zero. The pivot element was screened
            // at 1e-7, well above the pivot tolerance.
            compute_pivot_column(core, ws, j);
            let k_out = ws.basis[r];
            ws.state[k_out] = VarState::AtLower;
            ws.x[k_out] = 0.0;
            ws.basis[r] = j;
            ws.state[j] = VarState::Basic(r);
            update_inverse(core, ws, r).expect("screened pivot");
        }
    }
}

/// Final cleanup at optimality: refresh basic values from a fresh
/// factorization when the residual warrants it.
fn polish(
    lp: &LPInstance,
    core: &Core,
    ws: &mut Workspace,
    opts: &SolveOptions,
) -> Result<(), SolverError> {
    let _ = lp;
    if basic_residual(core, ws) > 0.5 * opts.feas_tol {
        refactorize(core, ws)?;
        refresh_basics(core, ws)?;
    }
    Ok(())
}

fn compute_duals(
    core: &Core,
    ws: &mut Workspace,
    cost: &[f64],
    row_scale: &[f64],
    out: &mut Vec<f64>,
) {
    price_duals(core, ws, cost);
    out.clear();
    out.extend(ws.y.iter().zip(row_scale).map(|(y, s)| y * s));
}

fn unscaled_residual(lp: &LPInstance, x: &[f64]) -> f64 {
    let m = lp.num_rows();
    let mut act = vec![0.0f64; m];
    for &(r, c, v) in &lp.triplets {
        act[r] += v * x[c];
    }
    let mut total = 0.0;
    for r in 0..m {
        let gap = act[r] - lp.rhs[r];
        let violation = match lp.senses[r] {
            RowSense::Le => gap.max(0.0),
            RowSense::Ge => (-gap).max(0.0),
            RowSense::Eq => gap.abs(),
        };
        total += violation;
    }
    total
}

fn finish(
    lp: &LPInstance,
    _core: &Core,
    ws: &Workspace,
    _row_scale: &[f64],
    col_scale: &[f64],
    status: SolveStatus,
) -> LPSolution {
    let n = lp.num_vars;
    let mut primal = vec![0.0; n];
    for j in 0..n {
        primal[j] = ws.x[j] * col_scale[j];
    }
    let objective = dot(&lp.objective, &primal);
    LPSolution {
        status,
        primal,
        objective,
        row_duals: vec![0.0; lp.num_rows()],
        iterations: ws.iterations,
    }
}

/// Dual objective value for a solved instance; used by tests to check
/// the duality gap. Bound contributions use the returned primal point's
/// active bounds.
pub fn dual_objective(lp: &LPInstance, solution: &LPSolution) -> f64 {
    let mut value = dot(&solution.row_duals, &lp.rhs);
    // reduced costs d = c - y^T A
    let mut d = lp.objective.clone();
    for &(r, c, v) in &lp.triplets {
        d[c] -= solution.row_duals[r] * v;
    }
    for j in 0..lp.num_vars {
        let dj = d[j];
        if dj > 0.0 && lp.lower[j].is_finite() {
            value += dj * lp.lower[j];
        } else if dj < 0.0 && lp.upper[j].is_finite() {
            value += dj * lp.upper[j];
        }
        // otherwise the bound term is zero at an optimal basis
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_default(lp: &LPInstance) -> LPSolution {
        solve(lp, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn single_bound_maximization() {
        // min -x s.t. x <= 5, x >= 0
        let mut lp = LPInstance::new(1);
        lp.objective[0] = -1.0;
        lp.add_row(RowSense::Le, 5.0, &[(0, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.primal[0] - 5.0).abs() < 1e-9);
        assert!((sol.objective + 5.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_binding_constraint() {
        // min x + y s.t. x + y >= 1, x, y >= 0
        let mut lp = LPInstance::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(RowSense::Ge, 1.0, &[(0, 1.0), (1, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_system() {
        // x <= -1 with x >= 0
        let mut lp = LPInstance::new(1);
        lp.add_row(RowSense::Le, -1.0, &[(0, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert!(sol.objective > 0.0, "reports residual infeasibility");
    }

    #[test]
    fn unbounded_ray() {
        // min -x, x >= 0, no upper bound
        let mut lp = LPInstance::new(1);
        lp.objective[0] = -1.0;
        lp.add_row(RowSense::Ge, 0.0, &[(0, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_row_and_free_variable() {
        // min x + 2y s.t. x + y = 3, y free in [-10, 10], x >= 0
        let mut lp = LPInstance::new(2);
        lp.objective = vec![1.0, 2.0];
        lp.set_bounds(1, -10.0, 10.0);
        lp.add_row(RowSense::Eq, 3.0, &[(0, 1.0), (1, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Optimal);
        // cheapest: y at its lower bound, x = 13
        assert!((sol.objective - (13.0 - 20.0)).abs() < 1e-8, "{}", sol.objective);
    }

    #[test]
    fn upper_bounded_variables_flip() {
        // min -x - 2y s.t. x + y <= 3, x in [0, 2], y in [0, 2]
        let mut lp = LPInstance::new(2);
        lp.objective = vec![-1.0, -2.0];
        lp.set_bounds(0, 0.0, 2.0);
        lp.set_bounds(1, 0.0, 2.0);
        lp.add_row(RowSense::Le, 3.0, &[(0, 1.0), (1, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective + 5.0).abs() < 1e-8); // y = 2, x = 1
    }

    #[test]
    fn duality_gap_closes() {
        let mut lp = LPInstance::new(3);
        lp.objective = vec![2.0, 3.0, 1.5];
        lp.add_row(RowSense::Ge, 4.0, &[(0, 1.0), (1, 1.0)]);
        lp.add_row(RowSense::Ge, 3.0, &[(1, 1.0), (2, 2.0)]);
        lp.add_row(RowSense::Le, 10.0, &[(0, 1.0), (1, 2.0), (2, 1.0)]);
        let sol = solve_default(&lp);
        assert_eq!(sol.status, SolveStatus::Optimal);
        let gap = (sol.objective - dual_objective(&lp, &sol)).abs();
        assert!(gap <= 1e-8 * (1.0 + sol.objective.abs()), "gap {gap}");
    }

    #[test]
    fn deterministic_pivot_sequence() {
        let mut lp = LPInstance::new(4);
        lp.objective = vec![1.0, -2.0, 0.5, 3.0];
        lp.set_bounds(1, 0.0, 4.0);
        lp.add_row(RowSense::Le, 8.0, &[(0, 2.0), (1, 1.0), (2, 1.0)]);
        lp.add_row(RowSense::Ge, 2.0, &[(1, 1.0), (3, 1.0)]);
        lp.add_row(RowSense::Eq, 5.0, &[(0, 1.0), (2, 1.0), (3, 1.0)]);
        let a = solve_default(&lp);
        let b = solve_default(&lp);
        assert_eq!(a, b);
    }
}
