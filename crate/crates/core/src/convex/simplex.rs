//! Dense two-phase primal simplex for small equality-form LPs
//!
//! ```text
//! minimize cᵀλ  subject to  Aλ = b,  λ ≥ 0
//! ```
//!
//! Entering and leaving variables follow Bland's rule (lowest index), which
//! rules out cycling on degenerate vertices.

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { solution: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.rows[i][e] = 0.0;
            self.rhs[i] -= f * prhs;
            if self.rhs[i].abs() < PIVOT_EPS * 1e-3 {
                self.rhs[i] = 0.0;
            }
        }
        self.basis[r] = e;
    }

    /// Minimize `cost` over the current basis, considering only columns in
    /// `allowed` as entering candidates. Returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        let m = self.rows.len();
        let limit = 50 * (m + allowed + 10) * (m + allowed + 10);
        for _ in 0..limit {
            // reduced costs d_j = c_j - c_Bᵀ B⁻¹ A_j
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    d -= cost[self.basis[i]] * self.rows[i][j];
                }
                if d < -PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][e];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - PIVOT_EPS
                                || (ratio <= br + PIVOT_EPS && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, e),
            }
        }
        true
    }
}

/// Solve `min cᵀλ s.t. Aλ = b, λ ≥ 0` where `a` is given row by row.
pub fn solve_equality_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert_eq!(b.len(), m);
    debug_assert!(a.iter().all(|r| r.len() == n));

    // Phase 1: artificials n..n+m, with rows flipped so that b ≥ 0.
    let scale = 1.0 + b.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row: Vec<f64> = a[i].iter().map(|v| sign * v).collect();
        row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        rows.push(row);
        rhs.push(sign * b[i]);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };
    let mut phase1 = vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|v| *v = 1.0);
    t.optimize(&phase1, n + m);
    let infeas: f64 = (0..m)
        .filter(|&i| t.basis[i] >= n)
        .map(|i| t.rhs[i])
        .sum();
    if infeas > FEAS_EPS * scale {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis where possible. Rows with
    // no usable pivot are redundant and keep a zero-valued artificial.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.basis.contains(&j) && t.rows[i][j].abs() > 1e-9) {
                t.pivot(i, j);
            }
        }
    }

    // Phase 2 over the original columns only.
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    if !t.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut solution = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            solution[t.basis[i]] = t.rhs[i].max(0.0);
        }
    }
    let value = solution.iter().zip(c).map(|(x, ci)| x * ci).sum();
    LpOutcome::Optimal { solution, value }
}
