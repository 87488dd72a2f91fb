//! Small dense linear programs solved by the two-phase simplex method.
//!
//! Problems are stated as
//!
//! ```text
//! maximise    c·x
//! subject to  A_eq x  = b_eq
//!             A_ge x >= b_ge
//!             lower <= x <= upper      (either side may be infinite)
//! ```
//!
//! and rewritten into `min c'·y, A'y = b', y >= 0` over a dense tableau.
//! Pricing is Dantzig's rule until `2·(m + n)` consecutive degenerate pivots
//! have been seen, after which Bland's rule is used for the rest of the
//! phase. Exceeding `10·(m + n)²` pivots yields [`LpStatus::Indeterminate`].

use crate::error::{Error, Result};
use crate::model::UnembeddingSet;

/// Pivot and reduced-cost tolerance.
pub const PIVOT_TOL: f64 = 1e-9;

/// Upper bound on the margin variable of a co-argmax program.
pub const MARGIN_CAP: f64 = 1e6;

const ZERO_CLEAN: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq_rows: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    ge_rows: Vec<Vec<f64>>,
    ge_rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// Maximise `objective·x`. Variables start with bounds `[0, +inf)`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            ge_rows: Vec::new(),
            ge_rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn equal(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn at_least(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ge_rows.push(row);
        self.ge_rhs.push(rhs);
        self
    }

    /// Stored as `-row·x >= -rhs`.
    pub fn at_most(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.at_least(row.into_iter().map(|a| -a).collect(), -rhs)
    }

    pub fn bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_eq(&self) -> usize {
        self.eq_rows.len()
    }

    pub fn num_ge(&self) -> usize {
        self.ge_rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn eq_constraints(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.eq_rows.iter().map(Vec::as_slice).zip(self.eq_rhs.iter().copied())
    }

    pub fn ge_constraints(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.ge_rows.iter().map(Vec::as_slice).zip(self.ge_rhs.iter().copied())
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::invalid("linear program has no variables"));
        }
        let finite = |v: &[f64], what: &str| match v.iter().find(|x| !x.is_finite()) {
            Some(&value) => Err(Error::NonFinite {
                context: what.to_string(),
                value,
            }),
            None => Ok(()),
        };
        finite(&self.objective, "objective")?;
        for row in self.eq_rows.iter().chain(&self.ge_rows) {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            finite(row, "constraint row")?;
        }
        finite(&self.eq_rhs, "equality rhs")?;
        finite(&self.ge_rhs, "inequality rhs")?;
        for (v, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi {
                return Err(Error::invalid(format!(
                    "variable {v} has unusable bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap reached; no verdict.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Meaningful only when `status` is optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LpSolution {
    /// Largest violation of any constraint or bound by `x`.
    pub fn max_violation(&self, lp: &LinearProgram) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(&self.x).map(|(a, x)| a * x).sum::<f64>();
        let eq = lp.eq_constraints().map(|(r, b)| (dot(r) - b).abs());
        let ge = lp.ge_constraints().map(|(r, b)| (b - dot(r)).max(0.0));
        let bounds = self
            .x
            .iter()
            .zip(lp.lower.iter().zip(&lp.upper))
            .map(|(&x, (&lo, &hi))| (lo - x).max(x - hi).max(0.0));
        eq.chain(ge).chain(bounds).fold(0.0, f64::max)
    }
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + y`
    Shift { col: usize, offset: f64 },
    /// `x = offset - y`
    Mirror { col: usize, offset: f64 },
    /// `x = y⁺ - y⁻`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Sense {
    Eq,
    Ge,
    Le,
}

struct StdRow {
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
    sense: Sense,
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries, right-hand side last.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum RunOutcome {
    Optimal,
    Unbounded,
    Capped,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64]) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                    if v.abs() < ZERO_CLEAN {
                        *v = 0.0;
                    }
                }
                row[c] = 0.0;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(cost);
        let n = self.ncols;
        for row in self.rows.iter_mut() {
            if row[n] < 0.0 && row[n] > -PIVOT_TOL {
                row[n] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs for `cost` under the current basis; last entry holds
    /// minus the objective value.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        d.push(0.0);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, &a) in d.iter_mut().zip(&self.rows[r]) {
                    *dj -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        d
    }

    /// Minimise over columns with `allowed[j]`.
    fn run(&mut self, d: &mut [f64], allowed: &[bool], pivots: &mut usize, cap: usize) -> RunOutcome {
        let size = self.rows.len() + self.ncols;
        let degenerate_limit = 2 * size;
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            let candidates = (0..self.ncols).filter(|&j| allowed[j] && d[j] < -PIVOT_TOL);
            let entering = if bland {
                candidates.min()
            } else {
                // first minimum wins, so ties go to the lowest index
                candidates.fold(None, |best: Option<usize>, j| match best {
                    Some(b) if d[b] <= d[j] => Some(b),
                    _ => Some(j),
                })
            };
            let Some(c) = entering else {
                return RunOutcome::Optimal;
            };
            if *pivots >= cap {
                return RunOutcome::Capped;
            }

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        let tie = (ratio - best).abs() <= PIVOT_TOL * (1.0 + best.abs());
                        let better = if tie {
                            if bland {
                                self.basis[r] < self.basis[br]
                            } else {
                                a > self.rows[br][c]
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((r, step)) = leave else {
                return RunOutcome::Unbounded;
            };
            if step <= PIVOT_TOL {
                degenerate_run += 1;
                if degenerate_run > degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c, d);
            *pivots += 1;
        }
    }
}

fn failed(status: LpStatus, n: usize, pivots: usize) -> LpSolution {
    LpSolution {
        status,
        x: vec![0.0; n],
        objective: f64::NAN,
        pivots,
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();

    // Column layout for the original variables. Intervals that straddle zero
    // are split so the origin stays a natural starting point.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut bound_rows = Vec::new();
    for v in 0..n {
        let (lo, hi) = (lp.lower[v], lp.upper[v]);
        let map = if lo.is_finite() && lo >= 0.0 {
            let col = ncols;
            ncols += 1;
            if hi.is_finite() {
                bound_rows.push(StdRow {
                    coeffs: vec![(col, 1.0)],
                    rhs: hi - lo,
                    sense: Sense::Le,
                });
            }
            VarMap::Shift { col, offset: lo }
        } else if hi.is_finite() && hi <= 0.0 {
            let col = ncols;
            ncols += 1;
            if lo.is_finite() {
                bound_rows.push(StdRow {
                    coeffs: vec![(col, 1.0)],
                    rhs: hi - lo,
                    sense: Sense::Le,
                });
            }
            VarMap::Mirror { col, offset: hi }
        } else {
            let (pos, neg) = (ncols, ncols + 1);
            ncols += 2;
            if hi.is_finite() {
                bound_rows.push(StdRow {
                    coeffs: vec![(pos, 1.0), (neg, -1.0)],
                    rhs: hi,
                    sense: Sense::Le,
                });
            }
            if lo.is_finite() {
                bound_rows.push(StdRow {
                    coeffs: vec![(pos, -1.0), (neg, 1.0)],
                    rhs: -lo,
                    sense: Sense::Le,
                });
            }
            VarMap::Split { pos, neg }
        };
        maps.push(map);
    }
    let structural = ncols;

    let substitute = |row: &[f64], rhs: f64, sense: Sense| {
        let mut coeffs = Vec::new();
        let mut rhs = rhs;
        for (&a, map) in row.iter().zip(&maps) {
            if a == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shift { col, offset } => {
                    coeffs.push((col, a));
                    rhs -= a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    coeffs.push((col, -a));
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        StdRow { coeffs, rhs, sense }
    };
    let mut std_rows: Vec<StdRow> = lp
        .eq_constraints()
        .map(|(r, b)| substitute(r, b, Sense::Eq))
        .chain(lp.ge_constraints().map(|(r, b)| substitute(r, b, Sense::Ge)))
        .collect();
    std_rows.extend(bound_rows);

    let m = std_rows.len();
    let slack_cols: Vec<Option<usize>> = std_rows
        .iter()
        .map(|row| {
            (row.sense != Sense::Eq).then(|| {
                ncols += 1;
                ncols - 1
            })
        })
        .collect();

    // Rows whose slack enters with +1 after sign normalisation start basic on
    // that slack; the rest get an artificial column.
    let mut dense: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut natural: Vec<Option<usize>> = Vec::with_capacity(m);
    for (row, slack) in std_rows.iter().zip(&slack_cols) {
        let mut coeffs = vec![0.0; ncols];
        for &(c, a) in &row.coeffs {
            coeffs[c] += a;
        }
        let mut rhs = row.rhs;
        if let Some(s) = *slack {
            coeffs[s] = if row.sense == Sense::Le { 1.0 } else { -1.0 };
        }
        let surplus_only = slack.is_some_and(|s| coeffs[s] == -1.0);
        if rhs < 0.0 || (rhs == 0.0 && surplus_only) {
            rhs = -rhs;
            coeffs.iter_mut().for_each(|a| *a = -*a);
        }
        natural.push(slack.filter(|&s| coeffs[s] == 1.0));
        coeffs.push(rhs);
        dense.push(coeffs);
    }
    let first_artificial = ncols;
    let n_art = natural.iter().filter(|s| s.is_none()).count();
    let total = ncols + n_art;
    let mut basis = Vec::with_capacity(m);
    let mut next_art = first_artificial;
    for (row, nat) in dense.iter_mut().zip(&natural) {
        let rhs = row.pop().expect("rhs present");
        row.resize(total, 0.0);
        match nat {
            Some(s) => basis.push(*s),
            None => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        row.push(rhs);
    }

    let mut tab = Tableau {
        rows: dense,
        basis,
        ncols: total,
    };
    let size = m + total;
    let cap = 10 * size * size;
    let mut pivots = 0;

    if n_art > 0 {
        let mut cost = vec![0.0; total];
        cost[first_artificial..].iter_mut().for_each(|c| *c = 1.0);
        let mut d = tab.reduced_costs(&cost);
        let allowed = vec![true; total];
        match tab.run(&mut d, &allowed, &mut pivots, cap) {
            RunOutcome::Optimal => {}
            RunOutcome::Capped => return Ok(failed(LpStatus::Indeterminate, n, pivots)),
            // the phase-one objective is bounded below by zero
            RunOutcome::Unbounded => return Ok(failed(LpStatus::Indeterminate, n, pivots)),
        }
        let infeasibility = -d[total];
        let scale = 1.0 + tab.rows.iter().map(|r| r[total].abs()).fold(0.0, f64::max);
        if infeasibility > PIVOT_TOL * scale {
            return Ok(failed(LpStatus::Infeasible, n, pivots));
        }

        // Drive artificials out of the basis; rows where that is impossible
        // are linear combinations of the others and are dropped.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] < first_artificial {
                r += 1;
                continue;
            }
            let best = (0..first_artificial)
                .filter(|&c| tab.rows[r][c].abs() > PIVOT_TOL)
                .max_by(|&a, &b| {
                    tab.rows[r][a]
                        .abs()
                        .partial_cmp(&tab.rows[r][b].abs())
                        .expect("finite tableau")
                        .then(b.cmp(&a))
                });
            match best {
                Some(c) => {
                    let mut scratch = vec![0.0; total + 1];
                    tab.pivot(r, c, &mut scratch);
                    pivots += 1;
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        }
    }

    let mut cost = vec![0.0; total];
    for (&c, map) in lp.objective.iter().zip(&maps) {
        match *map {
            VarMap::Shift { col, .. } => cost[col] = -c,
            VarMap::Mirror { col, .. } => cost[col] = c,
            VarMap::Split { pos, neg } => {
                cost[pos] = -c;
                cost[neg] = c;
            }
        }
    }
    let mut d = tab.reduced_costs(&cost);
    let allowed: Vec<bool> = (0..total).map(|j| j < first_artificial).collect();
    match tab.run(&mut d, &allowed, &mut pivots, cap) {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return Ok(failed(LpStatus::Unbounded, n, pivots)),
        RunOutcome::Capped => return Ok(failed(LpStatus::Indeterminate, n, pivots)),
    }

    let mut y = vec![0.0; total];
    for (r, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.rows[r][total];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, offset } => offset + y[col],
            VarMap::Mirror { col, offset } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    debug_assert!(structural <= first_artificial);
    let objective = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        pivots,
    })
}

/// The margin-maximising program behind a co-argmax query for labels `i`, `j`.
///
/// Variables are the embedding coordinates `f_0..f_{d-1}` followed by the
/// margin `t`: maximise `t` subject to `(g_i - g_j)·f = 0`,
/// `(g_i - g_k)·f - t >= 0` for every `k ∉ {i, j}`, `f ∈ [-1, 1]^d` and
/// `t <= MARGIN_CAP`.
pub fn coargmax_lp(u: &UnembeddingSet, i: usize, j: usize) -> Result<LinearProgram> {
    u.check_index(i)?;
    u.check_index(j)?;
    if i == j {
        return Err(Error::invalid("tie query needs two distinct labels"));
    }
    let d = u.dim();
    let gi = u.vector(i).as_slice();
    let diff = |k: usize| -> Vec<f64> {
        gi.iter()
            .zip(u.vector(k).as_slice())
            .map(|(a, b)| a - b)
            .collect()
    };

    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    let mut tie = diff(j);
    tie.push(0.0);
    lp.equal(tie, 0.0);
    for k in (0..u.k()).filter(|&k| k != i && k != j) {
        let mut row = diff(k);
        row.push(-1.0);
        lp.at_least(row, 0.0);
    }
    for m in 0..d {
        lp.bounds(m, -1.0, 1.0);
    }
    lp.bounds(d, f64::NEG_INFINITY, MARGIN_CAP);
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn optimal(lp: &LinearProgram) -> LpSolution {
        let s = solve(lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal, "{s:?}");
        assert!(s.max_violation(lp) < 1e-9, "violation {}", s.max_violation(lp));
        s
    }

    #[test]
    fn single_bounded_variable() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.at_most(vec![1.0], 5.0);
        let s = optimal(&lp);
        assert!((s.x[0] - 5.0).abs() < 1e-12);
        assert!((s.objective - 5.0).abs() < 1e-12);
    }

    #[test]
    fn negative_margin_case() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.bounds(0, f64::NEG_INFINITY, 10.0);
        lp.at_most(vec![1.0], -1.0);
        let s = optimal(&lp);
        assert!((s.objective + 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_two_variable_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.at_most(vec![1.0, 0.0], 4.0)
            .at_most(vec![0.0, 2.0], 12.0)
            .at_most(vec![3.0, 2.0], 18.0);
        let s = optimal(&lp);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        assert!((s.objective - 36.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_free_variables() {
        // max x - y, x + y = 1, x free, y in [-2, 3] -> x = 3, y = -2
        let mut lp = LinearProgram::maximize(vec![1.0, -1.0]);
        lp.equal(vec![1.0, 1.0], 1.0).free(0).bounds(1, -2.0, 3.0);
        let s = optimal(&lp);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.x[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_and_mirrored_bounds() {
        // max -x + y with x in [2, 5], y in [-7, -3] -> x = 2, y = -3
        let mut lp = LinearProgram::maximize(vec![-1.0, 1.0]);
        lp.bounds(0, 2.0, 5.0).bounds(1, -7.0, -3.0);
        lp.at_least(vec![1.0, 1.0], -10.0);
        let s = optimal(&lp);
        assert_eq!(s.x, vec![2.0, -3.0]);
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.at_most(vec![1.0, 1.0], 1.0).at_least(vec![1.0, 1.0], 2.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.at_least(vec![1.0, -1.0], 0.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.equal(vec![1.0, 1.0], 2.0).equal(vec![2.0, 2.0], 4.0).at_most(vec![0.0, 1.0], 1.5);
        let s = optimal(&lp);
        assert!((s.objective - 3.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_malformed_programs() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.at_least(vec![1.0], 0.0);
        assert!(matches!(solve(&lp), Err(Error::DimensionMismatch { .. })));
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.at_least(vec![f64::NAN], 0.0);
        assert!(matches!(solve(&lp), Err(Error::NonFinite { .. })));
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.bounds(0, 2.0, 1.0);
        assert!(solve(&lp).is_err());
        assert!(solve(&LinearProgram::maximize(vec![])).is_err());
    }

    #[test]
    fn cycling_prone_problem_terminates() {
        // Beale's example, which cycles under the textbook Dantzig rule
        let mut lp = LinearProgram::maximize(vec![0.75, -150.0, 0.02, -6.0]);
        lp.at_most(vec![0.25, -60.0, -0.04, 9.0], 0.0)
            .at_most(vec![0.5, -90.0, -0.02, 3.0], 0.0)
            .at_most(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let s = optimal(&lp);
        assert!((s.objective - 0.05).abs() < 1e-9, "{}", s.objective);
    }

    #[test]
    fn coargmax_program_shape() {
        let u = UnembeddingSet::from_unnamed_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]])
            .unwrap();
        let lp = coargmax_lp(&u, 0, 1).unwrap();
        assert_eq!(lp.num_vars(), 3);
        assert_eq!(lp.num_eq(), 1);
        assert_eq!(lp.num_ge(), 1);
        assert_eq!(lp.lower(), &[-1.0, -1.0, f64::NEG_INFINITY]);
        assert_eq!(lp.upper(), &[1.0, 1.0, MARGIN_CAP]);
        assert!(coargmax_lp(&u, 1, 1).is_err());
        assert!(coargmax_lp(&u, 1, 3).is_err());
    }

    #[test]
    fn coargmax_program_on_fixtures() {
        let c = fixtures::centered_unembeddings();
        let s = optimal(&coargmax_lp(&c, 2, 3).unwrap());
        assert!(s.objective > geometry::DEFAULT_TIE_EPS);
        // witness lies on the tie line spanned by (-3, 1)
        assert!((s.x[0] + 3.0 * s.x[1]).abs() < 1e-9);

        let u = fixtures::unrestricted_unembeddings();
        let s = optimal(&coargmax_lp(&u, 0, 1).unwrap());
        assert_eq!(
            s.objective > geometry::DEFAULT_TIE_EPS,
            geometry::coargmax_oracle_2d(&u, 0, 1).unwrap()
        );

        let unit = fixtures::centered_unit_unembeddings();
        let s = optimal(&coargmax_lp(&unit, 1, 3).unwrap());
        assert!(s.objective <= geometry::MARGIN_NOISE_FLOOR, "{}", s.objective);
    }

    #[test]
    fn two_labels_hit_the_margin_cap() {
        let u = UnembeddingSet::from_unnamed_rows(vec![vec![1.0, 2.0], vec![3.0, -1.0]]).unwrap();
        let s = optimal(&coargmax_lp(&u, 0, 1).unwrap());
        assert_eq!(s.objective, MARGIN_CAP);
    }

    #[test]
    fn deterministic_pivots() {
        let u = fixtures::centered_unembeddings();
        let lp = coargmax_lp(&u, 2, 1).unwrap();
        assert_eq!(solve(&lp).unwrap(), solve(&lp).unwrap());
    }

    /// Random programs built around a known feasible point.
    fn random_feasible(rng: &mut ChaCha8Rng) -> (LinearProgram, Vec<f64>) {
        let n = rng.gen_range(1..8);
        let point: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let objective = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut lp = LinearProgram::maximize(objective);
        for v in 0..n {
            lp.bounds(v, point[v] - rng.gen_range(0.1..4.0), point[v] + rng.gen_range(0.1..4.0));
        }
        for _ in 0..rng.gen_range(0..12) {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let at: f64 = row.iter().zip(&point).map(|(a, x)| a * x).sum();
            lp.at_least(row, at - rng.gen_range(0.0..1.0));
        }
        if n > 1 && rng.gen_bool(0.5) {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let at: f64 = row.iter().zip(&point).map(|(a, x)| a * x).sum();
            lp.equal(row, at);
        }
        (lp, point)
    }

    #[test]
    fn random_feasible_programs_reach_the_known_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let (lp, point) = random_feasible(&mut rng);
            let s = optimal(&lp);
            let at: f64 = lp.objective().iter().zip(&point).map(|(c, x)| c * x).sum();
            assert!(s.objective >= at - 1e-9, "{} < {at}", s.objective);
        }
    }

    proptest! {
        #[test]
        fn box_programs_pick_the_sign_corner(c in prop::collection::vec(-5.0f64..5.0, 1..10)) {
            let mut lp = LinearProgram::maximize(c.clone());
            for v in 0..c.len() {
                lp.bounds(v, -1.0, 1.0);
            }
            let s = solve(&lp).unwrap();
            prop_assert_eq!(s.status, LpStatus::Optimal);
            let best: f64 = c.iter().map(|v| v.abs()).sum();
            prop_assert!((s.objective - best).abs() < 1e-9);
        }
    }
}
