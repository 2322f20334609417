//! Dense two-phase simplex method with Bland's rule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `min c·z` subject to `A_eq z = b_eq`, `A_ub z ≤ b_ub`, and `z_i ≥ 0`
/// unless `free[i]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    /// Empty means every variable is non-negative.
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub z: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("row {row} has {found} coefficients, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("{rows} constraint rows but {rhs} right-hand sides")]
    RhsLength { rows: usize, rhs: usize },
    #[error("free flags cover {found} variables, expected {expected}")]
    FreeLength { expected: usize, found: usize },
    #[error("non-finite coefficient")]
    NonFinite,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 50_000;

impl LpProblem {
    fn check(&self) -> Result<(), LpError> {
        let nv = self.objective.len();
        for (rows, rhs) in [(&self.a_eq, &self.b_eq), (&self.a_ub, &self.b_ub)] {
            if rows.len() != rhs.len() {
                return Err(LpError::RhsLength {
                    rows: rows.len(),
                    rhs: rhs.len(),
                });
            }
            for (row, coeffs) in rows.iter().enumerate() {
                if coeffs.len() != nv {
                    return Err(LpError::RowLength {
                        row,
                        expected: nv,
                        found: coeffs.len(),
                    });
                }
            }
        }
        if !self.free.is_empty() && self.free.len() != nv {
            return Err(LpError::FreeLength {
                expected: nv,
                found: self.free.len(),
            });
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.a_eq.iter().chain(&self.a_ub).flatten().all(|v| v.is_finite())
            && self.b_eq.iter().chain(&self.b_ub).all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFinite);
        }
        Ok(())
    }

    fn is_free(&self, i: usize) -> bool {
        self.free.get(i).copied().unwrap_or(false)
    }
}

struct Tableau {
    // rows × (cols + 1); the last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · z` over the current feasible basis using columns
    /// `allowed`. Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        let rhs = self.cols;
        for _ in 0..MAX_ITERATIONS {
            // Reduced costs: c_j − c_B · column_j.
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j] - self.t.iter().zip(&self.basis).map(|(row, &b)| cost[b] * row[j]).sum::<f64>();
                reduced < -COST_TOL
            });
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.t.iter().enumerate() {
                if row[c] > PIVOT_TOL {
                    let ratio = row[rhs] / row[c];
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
        log::warn!("simplex iteration limit reached");
        true
    }

    fn value_of(&self, col: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(0.0, |r| self.t[r][self.cols])
    }
}

pub fn solve(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.check()?;
    let nv = p.objective.len();

    // Column layout: one or two columns per original variable (free ones are
    // split into positive and negative parts), then slacks, then artificials.
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(nv);
    let mut cols = 0;
    for i in 0..nv {
        if p.is_free(i) {
            var_cols.push((cols, Some(cols + 1)));
            cols += 2;
        } else {
            var_cols.push((cols, None));
            cols += 1;
        }
    }
    let structural = cols;
    let n_ub = p.a_ub.len();
    let n_rows = p.a_eq.len() + n_ub;
    let slack0 = structural;
    let art0 = slack0 + n_ub;
    let total = art0 + n_rows;

    let mut t = Vec::with_capacity(n_rows);
    let mut basis = Vec::with_capacity(n_rows);
    let rows = p
        .a_ub
        .iter()
        .zip(&p.b_ub)
        .map(|(a, &b)| (a, b, true))
        .chain(p.a_eq.iter().zip(&p.b_eq).map(|(a, &b)| (a, b, false)));
    let mut ub_index = 0;
    for (r, (a, b, is_ub)) in rows.enumerate() {
        let mut row = vec![0.0; total + 1];
        for (i, &(pos, neg)) in var_cols.iter().enumerate() {
            row[pos] = a[i];
            if let Some(neg) = neg {
                row[neg] = -a[i];
            }
        }
        let mut rhs = b;
        if is_ub {
            row[slack0 + ub_index] = 1.0;
            ub_index += 1;
        }
        if rhs < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            rhs = -rhs;
        }
        row[art0 + r] = 1.0;
        row[total] = rhs;
        t.push(row);
        basis.push(art0 + r);
    }
    let mut tab = Tableau { t, basis, cols: total };

    // Rows whose slack already carries +1 start with the slack in the basis.
    for r in 0..n_ub {
        if tab.t[r][slack0 + r] == 1.0 {
            tab.basis[r] = slack0 + r;
            tab.t[r][art0 + r] = 0.0;
        }
    }

    let mut phase1_cost = vec![0.0; total];
    for c in phase1_cost.iter_mut().skip(art0) {
        *c = 1.0;
    }
    let all = vec![true; total];
    tab.optimize(&phase1_cost, &all);
    let infeasibility: f64 = (art0..total).map(|c| tab.value_of(c)).sum();
    let scale = 1.0 + p.b_eq.iter().chain(&p.b_ub).fold(0.0f64, |a, b| a.max(b.abs()));
    if infeasibility > FEASIBILITY_TOL * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            z: vec![0.0; nv],
            value: f64::NAN,
        });
    }

    // Drive artificials out of the basis; drop rows that turn out redundant.
    let mut r = 0;
    while r < tab.t.len() {
        if tab.basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&c| tab.t[r][c].abs() > PIVOT_TOL) {
                tab.pivot(r, c);
            } else {
                tab.t.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    let mut cost = vec![0.0; total];
    for (i, &(pos, neg)) in var_cols.iter().enumerate() {
        cost[pos] = p.objective[i];
        if let Some(neg) = neg {
            cost[neg] = -p.objective[i];
        }
    }
    let allowed: Vec<bool> = (0..total).map(|c| c < art0).collect();
    let bounded = tab.optimize(&cost, &allowed);

    let z: Vec<f64> = var_cols
        .iter()
        .map(|&(pos, neg)| tab.value_of(pos) - neg.map_or(0.0, |n| tab.value_of(n)))
        .collect();
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            z,
            value: f64::NEG_INFINITY,
        });
    }
    let value = z.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_of_two_lower_bounds() {
        // min d s.t. d ≥ 0.3, d ≥ 0.1
        let p = LpProblem {
            objective: vec![1.0],
            a_ub: vec![vec![-1.0], vec![-1.0]],
            b_ub: vec![-0.3, -0.1],
            ..Default::default()
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 0.3).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        // min x s.t. x ≥ 1, x ≤ 0
        let p = LpProblem {
            objective: vec![1.0],
            a_ub: vec![vec![-1.0], vec![1.0]],
            b_ub: vec![-1.0, 0.0],
            ..Default::default()
        };
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let p = LpProblem {
            objective: vec![-1.0, 0.0],
            a_ub: vec![vec![-1.0, 1.0]],
            b_ub: vec![1.0],
            ..Default::default()
        };
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_and_equality() {
        // min x + y s.t. x − y = −2, y ≤ 3, x free, y ≥ 0 → x = −2, y = 0.
        let p = LpProblem {
            objective: vec![1.0, 1.0],
            a_eq: vec![vec![1.0, -1.0]],
            b_eq: vec![-2.0],
            a_ub: vec![vec![0.0, 1.0]],
            b_ub: vec![3.0],
            free: vec![true, false],
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.z[0] + 2.0).abs() < 1e-12 && s.z[1].abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let p = LpProblem {
            objective: vec![1.0, 2.0],
            a_eq: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            b_eq: vec![1.0, 2.0],
            ..Default::default()
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = LpProblem {
            objective: vec![1.0, 1.0],
            a_ub: vec![vec![1.0]],
            b_ub: vec![1.0],
            ..Default::default()
        };
        assert!(matches!(solve(&p), Err(LpError::RowLength { .. })));
    }
}
