//! Brute-force LP oracle for tiny instances.
//!
//! Enumerates every basic solution of the equality form (a basis choice
//! plus an at-bound assignment of the nonbasic columns) and keeps the
//! best feasible one. Infinite bounds are boxed at a large magnitude `M`;
//! unboundedness is detected by re-running with a larger box and checking
//! whether the optimum keeps improving. Exponential in the instance size,
//! which is why it is capped at 12 variables and 12 rows.

use super::{LPInstance, LPSolution, RowSense, SolveStatus, SolverError};

const ORACLE_MAX: usize = 12;
const BOX_FACTOR: f64 = 1e7;

/// Exact reference solve by enumeration of basic solutions.
///
/// Independent of the simplex implementation: dense Gaussian elimination
/// over explicitly enumerated bases. Row duals are not computed.
pub fn oracle_solve(lp: &LPInstance) -> Result<LPSolution, SolverError> {
    if lp.num_vars > ORACLE_MAX || lp.num_rows() > ORACLE_MAX {
        return Err(SolverError::OracleSize {
            vars: lp.num_vars,
            rows: lp.num_rows(),
        });
    }
    lp.validate()?;

    let scale = instance_scale(lp);
    let m1 = scale * BOX_FACTOR;
    let first = enumerate_best(lp, m1);
    let Some((obj1, x1)) = first else {
        return Ok(LPSolution {
            status: SolveStatus::Infeasible,
            primal: vec![0.0; lp.num_vars],
            objective: f64::INFINITY,
            row_duals: vec![0.0; lp.num_rows()],
            iterations: 0,
        });
    };
    let (obj2, _) = enumerate_best(lp, 4.0 * m1).expect("larger box stays feasible");
    if obj2 < obj1 - 1e-6 * (1.0 + obj1.abs()) {
        return Ok(LPSolution {
            status: SolveStatus::Unbounded,
            primal: x1,
            objective: f64::NEG_INFINITY,
            row_duals: vec![0.0; lp.num_rows()],
            iterations: 0,
        });
    }
    Ok(LPSolution {
        status: SolveStatus::Optimal,
        primal: x1,
        objective: obj1,
        row_duals: vec![0.0; lp.num_rows()],
        iterations: 0,
    })
}

fn instance_scale(lp: &LPInstance) -> f64 {
    let mut s = 1.0f64;
    for b in &lp.rhs {
        s = s.max(b.abs());
    }
    for v in lp.lower.iter().chain(&lp.upper) {
        if v.is_finite() {
            s = s.max(v.abs());
        }
    }
    s
}

/// Best feasible basic solution of the boxed instance, or `None` when no
/// basis is feasible. Returns the objective and the structural point.
fn enumerate_best(lp: &LPInstance, box_bound: f64) -> Option<(f64, Vec<f64>)> {
    let m = lp.num_rows();
    let n = lp.num_vars;

    // Equality form: structural columns then one slack per inequality row.
    let mut ncols = n;
    let mut slack_of_row = vec![usize::MAX; m];
    for (r, sense) in lp.senses.iter().enumerate() {
        if !matches!(sense, RowSense::Eq) {
            slack_of_row[r] = ncols;
            ncols += 1;
        }
    }

    let mut dense = vec![0.0f64; m * ncols];
    for &(r, c, v) in &lp.triplets {
        dense[r * ncols + c] += v;
    }
    for (r, &js) in slack_of_row.iter().enumerate() {
        if js != usize::MAX {
            dense[r * ncols + js] = 1.0;
        }
    }

    let mut lb = vec![0.0f64; ncols];
    let mut ub = vec![0.0f64; ncols];
    for j in 0..n {
        lb[j] = if lp.lower[j].is_finite() {
            lp.lower[j]
        } else {
            -box_bound
        };
        ub[j] = if lp.upper[j].is_finite() {
            lp.upper[j]
        } else {
            box_bound
        };
    }
    for (r, &js) in slack_of_row.iter().enumerate() {
        if js == usize::MAX {
            continue;
        }
        match lp.senses[r] {
            RowSense::Le => {
                lb[js] = 0.0;
                ub[js] = box_bound;
            }
            RowSense::Ge => {
                lb[js] = -box_bound;
                ub[js] = 0.0;
            }
            RowSense::Eq => unreachable!(),
        }
    }

    let mut cost = vec![0.0f64; ncols];
    cost[..n].copy_from_slice(&lp.objective);

    // No rows: minimize the separable box objective directly.
    if m == 0 {
        let mut x = vec![0.0f64; ncols];
        for j in 0..ncols {
            x[j] = if cost[j] > 0.0 { lb[j] } else { ub[j] };
        }
        let obj = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        return Some((obj, x[..n].to_vec()));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;

    // More equality rows than columns: no basis exists. Generic data is
    // inconsistent there, which enumeration reports as infeasible.
    if m > ncols {
        return None;
    }

    let mut basis: Vec<usize> = (0..m).collect();
    loop {
        if let Some(lu) = factorize(&dense, ncols, &basis) {
            search_assignments(lp, &dense, ncols, &basis, &lu, &lb, &ub, &cost, &mut best);
        }
        if !next_combination(&mut basis, ncols) {
            break;
        }
    }

    best.map(|(obj, x)| (obj, x[..n].to_vec()))
}

/// LU factors of the m x m basis matrix with partial pivoting, or `None`
/// when the basis is singular.
struct Lu {
    m: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

fn factorize(dense: &[f64], ncols: usize, basis: &[usize]) -> Option<Lu> {
    let m = basis.len();
    let mut lu = vec![0.0f64; m * m];
    for (k, &j) in basis.iter().enumerate() {
        for r in 0..m {
            lu[r * m + k] = dense[r * ncols + j];
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    for col in 0..m {
        let mut piv = col;
        let mut best = lu[col * m + col].abs();
        for r in col + 1..m {
            let v = lu[r * m + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= 1e-11 {
            return None;
        }
        if piv != col {
            perm.swap(piv, col);
            for k in 0..m {
                lu.swap(piv * m + k, col * m + k);
            }
        }
        let inv_p = 1.0 / lu[col * m + col];
        for r in col + 1..m {
            let f = lu[r * m + col] * inv_p;
            lu[r * m + col] = f;
            if f != 0.0 {
                for k in col + 1..m {
                    lu[r * m + k] -= f * lu[col * m + k];
                }
            }
        }
    }
    Some(Lu { m, lu, perm })
}

impl Lu {
    fn solve(&self, rhs: &[f64], out: &mut Vec<f64>) {
        let m = self.m;
        out.clear();
        out.extend(self.perm.iter().map(|&p| rhs[p]));
        for r in 1..m {
            let mut acc = out[r];
            for k in 0..r {
                acc -= self.lu[r * m + k] * out[k];
            }
            out[r] = acc;
        }
        for r in (0..m).rev() {
            let mut acc = out[r];
            for k in r + 1..m {
                acc -= self.lu[r * m + k] * out[k];
            }
            out[r] = acc / self.lu[r * m + r];
        }
    }
}

/// Tries every at-bound assignment of the nonbasic columns for one basis.
#[allow(clippy::too_many_arguments)]
fn search_assignments(
    lp: &LPInstance,
    dense: &[f64],
    ncols: usize,
    basis: &[usize],
    lu: &Lu,
    lb: &[f64],
    ub: &[f64],
    cost: &[f64],
    best: &mut Option<(f64, Vec<f64>)>,
) {
    let m = lp.num_rows();
    let in_basis: Vec<bool> = {
        let mut v = vec![false; ncols];
        for &j in basis {
            v[j] = true;
        }
        v
    };
    let nonbasic: Vec<usize> = (0..ncols).filter(|j| !in_basis[*j]).collect();
    // Columns with two distinct bounds get both assignments; fixed
    // columns only their single value.
    let choice_cols: Vec<usize> = nonbasic
        .iter()
        .copied()
        .filter(|&j| ub[j] > lb[j])
        .collect();
    let n_choices = 1usize << choice_cols.len();

    let mut x = vec![0.0f64; ncols];
    let mut rhs = vec![0.0f64; m];
    let mut xb = Vec::with_capacity(m);
    for mask in 0..n_choices {
        for &j in &nonbasic {
            x[j] = lb[j];
        }
        for (bit, &j) in choice_cols.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                x[j] = ub[j];
            }
        }
        for r in 0..m {
            rhs[r] = lp.rhs[r];
        }
        for &j in &nonbasic {
            if x[j] != 0.0 {
                for r in 0..m {
                    rhs[r] -= dense[r * ncols + j] * x[j];
                }
            }
        }
        lu.solve(&rhs, &mut xb);
        // The tolerance follows the magnitude of each bound, so the huge
        // artificial box faces are forgiving while real bounds stay tight.
        let feasible = basis.iter().zip(&xb).all(|(&j, &v)| {
            v >= lb[j] - 1e-9 * (1.0 + lb[j].abs()) && v <= ub[j] + 1e-9 * (1.0 + ub[j].abs())
        });
        if !feasible {
            continue;
        }
        for (&j, &v) in basis.iter().zip(&xb) {
            x[j] = v;
        }
        let obj: f64 = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
        let better = match best {
            None => true,
            Some((cur, _)) => obj < *cur - 1e-12 * (1.0 + cur.abs()),
        };
        if better {
            *best = Some((obj, x.clone()));
        }
    }
}

/// Advances `indices` to the next lexicographic m-combination of `0..n`.
fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let m = indices.len();
    if m == 0 || m > n {
        return false;
    }
    let mut i = m;
    while i > 0 {
        i -= 1;
        if indices[i] < n - (m - i) {
            indices[i] += 1;
            for k in i + 1..m {
                indices[k] = indices[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{solve, SolveOptions};

    #[test]
    fn agrees_with_simplex_on_spec_cases() {
        // min -x s.t. x <= 5
        let mut lp = LPInstance::new(1);
        lp.objective[0] = -1.0;
        lp.add_row(RowSense::Le, 5.0, &[(0, 1.0)]);
        let o = oracle_solve(&lp).unwrap();
        assert_eq!(o.status, SolveStatus::Optimal);
        assert!((o.objective + 5.0).abs() < 1e-9);

        // min x+y s.t. x+y >= 1
        let mut lp = LPInstance::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(RowSense::Ge, 1.0, &[(0, 1.0), (1, 1.0)]);
        let o = oracle_solve(&lp).unwrap();
        assert!((o.objective - 1.0).abs() < 1e-9);
        let s = solve(&lp, &SolveOptions::default()).unwrap();
        assert!((o.objective - s.objective).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LPInstance::new(1);
        lp.add_row(RowSense::Le, -1.0, &[(0, 1.0)]);
        assert_eq!(oracle_solve(&lp).unwrap().status, SolveStatus::Infeasible);

        let mut lp = LPInstance::new(1);
        lp.objective[0] = -1.0;
        lp.add_row(RowSense::Ge, 0.0, &[(0, 1.0)]);
        assert_eq!(oracle_solve(&lp).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn rejects_oversized_instances() {
        let lp = LPInstance::new(13);
        assert!(matches!(
            oracle_solve(&lp),
            Err(SolverError::OracleSize { vars: 13, .. })
        ));
    }

    #[test]
    fn equality_rows_and_upper_bounds() {
        // min -2x - y s.t. x + y = 4, x <= 3, y <= 3
        let mut lp = LPInstance::new(2);
        lp.objective = vec![-2.0, -1.0];
        lp.set_bounds(0, 0.0, 3.0);
        lp.set_bounds(1, 0.0, 3.0);
        lp.add_row(RowSense::Eq, 4.0, &[(0, 1.0), (1, 1.0)]);
        let o = oracle_solve(&lp).unwrap();
        assert_eq!(o.status, SolveStatus::Optimal);
        assert!((o.objective + 7.0).abs() < 1e-9); // x = 3, y = 1
    }
}
