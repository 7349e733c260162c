//! A small dense linear-programming layer: two-phase primal simplex with
//! row duals.
//!
//! The solver is deliberately self-contained and deterministic. Problem
//! sizes in this crate stay at desk scale (hundreds of rows, a few thousand
//! columns), where a dense tableau with Dantzig pricing and a Bland
//! anti-cycling fallback is plenty. Duals are read off the final cost row
//! under each row's initial unit column, so the callers that need exact
//! multipliers (the distortion LP, the packing LPs) get them for free.

use thiserror::Error;

/// Default tolerance for optimality/duality residual checks.
pub const EPS_LP: f64 = 1e-7;

const EPS_PIVOT: f64 = 1e-9;
const EPS_COST: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The solver finished but the solution failed its own feasibility or
    /// complementary-slackness verification; values are reported as-is.
    Numerical,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LpError {
    #[error("coefficient reference out of range (row {row}, col {col})")]
    OutOfRange { row: usize, col: usize },
    #[error("non-finite coefficient encountered")]
    NonFinite,
    #[error("variable {0} has an empty bound interval")]
    BadBounds(usize),
    #[error("variable {0} has an infinite lower bound (free variables are not supported)")]
    FreeVariable(usize),
}

/// A linear program over nonnegative-by-default variables.
#[derive(Clone, Debug)]
pub struct LpProblem {
    sense: Sense,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    row_sense: Vec<RowSense>,
    rhs: Vec<f64>,
    entries: Vec<(usize, usize, f64)>,
}

impl LpProblem {
    pub fn new(sense: Sense, num_vars: usize) -> Self {
        LpProblem {
            sense,
            objective: vec![0.0; num_vars],
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            row_sense: Vec::new(),
            rhs: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn set_objective(&mut self, col: usize, coeff: f64) {
        self.objective[col] = coeff;
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        self.lower[col] = lower;
        self.upper[col] = upper;
    }

    /// Append a row `Σ coeff·x {≤,=,≥} rhs`; returns its index.
    pub fn add_row(&mut self, sense: RowSense, rhs: f64, terms: &[(usize, f64)]) -> usize {
        let row = self.rhs.len();
        self.row_sense.push(sense);
        self.rhs.push(rhs);
        for &(col, coeff) in terms {
            if coeff != 0.0 {
                self.entries.push((row, col, coeff));
            }
        }
        row
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let m = self.num_rows();
        for &(row, col, coeff) in &self.entries {
            if row >= m || col >= n {
                return Err(LpError::OutOfRange { row, col });
            }
            if !coeff.is_finite() {
                return Err(LpError::NonFinite);
            }
        }
        if self.objective.iter().chain(self.rhs.iter()).any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for j in 0..n {
            if !self.lower[j].is_finite() {
                return Err(LpError::FreeVariable(j));
            }
            if self.upper[j] < self.lower[j] || self.upper[j].is_nan() {
                return Err(LpError::BadBounds(j));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per user row, in the Lagrangian sign convention:
    /// for maximization, ≤-rows get nonnegative duals; for minimization,
    /// ≥-rows get nonnegative duals. `objective = Σ duals·rhs` holds for
    /// problems with zero lower bounds.
    pub row_duals: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    fn empty(status: LpStatus, n: usize, m: usize) -> Self {
        LpSolution { status, primal: vec![0.0; n], row_duals: vec![0.0; m], objective: f64::NAN }
    }
}

/// Solve a linear program. `eps` bounds the accepted feasibility and
/// complementary-slackness residuals; a solve whose verification exceeds
/// them comes back as [`LpStatus::Numerical`] rather than silently wrong.
pub fn solve_lp(p: &LpProblem, eps: f64) -> Result<LpSolution, LpError> {
    p.validate()?;
    let n = p.num_vars();
    let m_user = p.num_rows();

    // Shift lower bounds to zero and add internal rows for finite uppers.
    let mut row_sense = p.row_sense.clone();
    let mut rhs = p.rhs.clone();
    let mut dense: Vec<Vec<f64>> = vec![vec![0.0; n]; m_user];
    for &(row, col, coeff) in &p.entries {
        dense[row][col] += coeff;
    }
    for (row, r) in rhs.iter_mut().enumerate() {
        for col in 0..n {
            *r -= dense[row][col] * p.lower[col];
        }
    }
    for col in 0..n {
        if p.upper[col].is_finite() {
            let mut extra = vec![0.0; n];
            extra[col] = 1.0;
            dense.push(extra);
            row_sense.push(RowSense::Le);
            rhs.push(p.upper[col] - p.lower[col]);
        }
    }
    let m = rhs.len();

    let max_sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let cost: Vec<f64> = p.objective.iter().map(|c| c * max_sign).collect();

    // Normalize rows to nonnegative rhs.
    let mut flip = vec![1.0f64; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            flip[i] = -1.0;
            rhs[i] = -rhs[i];
            for v in dense[i].iter_mut() {
                *v = -*v;
            }
            row_sense[i] = match row_sense[i] {
                RowSense::Le => RowSense::Ge,
                RowSense::Ge => RowSense::Le,
                RowSense::Eq => RowSense::Eq,
            };
        }
    }

    // Column layout: structural | one slack/surplus per row | artificials.
    let mut unit_col = vec![0usize; m]; // column whose initial basis row is i
    let mut n_aux = 0usize;
    for s in &row_sense {
        n_aux += 1;
        if *s != RowSense::Le {
            n_aux += 1; // surplus plus artificial
        }
    }
    let total = n + n_aux;
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    let mut is_artificial = vec![false; total];
    {
        let mut next = n;
        for i in 0..m {
            let mut row = vec![0.0; total + 1];
            row[..n].copy_from_slice(&dense[i]);
            row[total] = rhs[i];
            match row_sense[i] {
                RowSense::Le => {
                    row[next] = 1.0;
                    basis[i] = next;
                    unit_col[i] = next;
                    next += 1;
                }
                RowSense::Ge => {
                    row[next] = -1.0;
                    next += 1;
                    row[next] = 1.0;
                    is_artificial[next] = true;
                    basis[i] = next;
                    unit_col[i] = next;
                    next += 1;
                }
                RowSense::Eq => {
                    row[next] = 1.0;
                    is_artificial[next] = true;
                    basis[i] = next;
                    unit_col[i] = next;
                    next += 1;
                }
            }
            tab.push(row);
        }
    }

    // Reduced-cost rows for both phases; rhs cell tracks −objective.
    let mut cost1 = vec![0.0f64; total + 1];
    let mut cost2 = vec![0.0f64; total + 1];
    for (j, c) in cost.iter().enumerate() {
        cost2[j] = *c;
    }
    for j in 0..total {
        if is_artificial[j] {
            cost1[j] = 1.0;
        }
    }
    for i in 0..m {
        if is_artificial[basis[i]] {
            for j in 0..=total {
                cost1[j] -= tab[i][j];
            }
        }
    }

    let need_phase1 = (0..m).any(|i| is_artificial[basis[i]]);
    let mut sol = LpSolution::empty(LpStatus::Optimal, n, m_user);

    let bmax = rhs.iter().cloned().fold(0.0, f64::max);
    if need_phase1 {
        match run_simplex(&mut tab, &mut cost1, Some(&mut cost2), &mut basis, &is_artificial, true)
        {
            SimplexOutcome::Optimal => {}
            SimplexOutcome::Unbounded => unreachable!("phase 1 is bounded below"),
            SimplexOutcome::IterationLimit => {
                sol.status = LpStatus::Numerical;
                return Ok(sol);
            }
        }
        let infeas = -cost1[total];
        if infeas > 1e-8 * (1.0 + bmax) {
            sol.status = LpStatus::Infeasible;
            return Ok(sol);
        }
        // Push any artificial still basic out of the basis where possible.
        for i in 0..m {
            if is_artificial[basis[i]] {
                if let Some(col) = (0..total)
                    .find(|&j| !is_artificial[j] && tab[i][j].abs() > EPS_PIVOT)
                {
                    pivot(&mut tab, &mut cost1, Some(&mut cost2), i, col);
                    basis[i] = col;
                }
            }
        }
    }

    match run_simplex(&mut tab, &mut cost2, None, &mut basis, &is_artificial, false) {
        SimplexOutcome::Optimal => {}
        SimplexOutcome::Unbounded => {
            sol.status = LpStatus::Unbounded;
            return Ok(sol);
        }
        SimplexOutcome::IterationLimit => {
            sol.status = LpStatus::Numerical;
            return Ok(sol);
        }
    }

    // Primal values (shift lower bounds back in).
    let mut x = vec![0.0f64; total];
    for i in 0..m {
        x[basis[i]] = tab[i][total];
    }
    for j in 0..n {
        sol.primal[j] = x[j] + p.lower[j];
    }
    sol.objective = (0..n).map(|j| p.objective[j] * sol.primal[j]).sum();

    // Duals from the cost row under each row's initial unit column.
    let mut y_internal = vec![0.0f64; m];
    for i in 0..m {
        y_internal[i] = -cost2[unit_col[i]];
    }
    for i in 0..m_user {
        sol.row_duals[i] = max_sign * flip[i] * y_internal[i];
    }

    // Verification: primal feasibility, sign conditions, duality gap.
    let mut ok = true;
    for i in 0..m {
        let lhs: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
        let scale = 1.0 + rhs[i].abs() + lhs.abs();
        let resid = match row_sense[i] {
            RowSense::Le => lhs - rhs[i],
            RowSense::Ge => rhs[i] - lhs,
            RowSense::Eq => (lhs - rhs[i]).abs(),
        };
        if resid > eps * scale {
            ok = false;
        }
        // Complementary slackness: positive dual forces a tight row.
        if y_internal[i].abs() > eps && resid.abs() < f64::INFINITY {
            let slack = match row_sense[i] {
                RowSense::Eq => 0.0,
                _ => (rhs[i] - lhs).abs(),
            };
            if slack * y_internal[i].abs() > eps * scale * (1.0 + y_internal[i].abs()) {
                ok = false;
            }
        }
    }
    let internal_obj: f64 = (0..n).map(|j| cost[j] * x[j]).sum();
    let dual_obj: f64 = (0..m).map(|i| y_internal[i] * rhs[i]).sum();
    if (internal_obj - dual_obj).abs() > eps * (1.0 + internal_obj.abs()) {
        ok = false;
    }
    if !ok {
        sol.status = LpStatus::Numerical;
    }
    Ok(sol)
}

enum SimplexOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

fn run_simplex(
    tab: &mut [Vec<f64>],
    cost: &mut [f64],
    mut shadow: Option<&mut Vec<f64>>,
    basis: &mut [usize],
    is_artificial: &[bool],
    allow_artificial: bool,
) -> SimplexOutcome {
    let m = tab.len();
    let total = cost.len() - 1;
    let max_iter = 10_000 + 200 * (m + total);
    let stall_limit = 4 * (m + total) + 50;
    let mut bland = false;
    let mut stall = 0usize;
    let mut best = f64::INFINITY;

    for _ in 0..max_iter {
        // Entering column.
        let mut enter = None;
        if bland {
            for j in 0..total {
                if (!is_artificial[j] || allow_artificial) && cost[j] < -EPS_COST {
                    enter = Some(j);
                    break;
                }
            }
        } else {
            let mut best_c = -EPS_COST;
            for j in 0..total {
                if (!is_artificial[j] || allow_artificial) && cost[j] < best_c {
                    best_c = cost[j];
                    enter = Some(j);
                }
            }
        }
        let Some(enter) = enter else {
            return SimplexOutcome::Optimal;
        };

        // Ratio test; ties resolved toward the smallest basic index.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let a = tab[i][enter];
            if a > EPS_PIVOT {
                let ratio = tab[i][total] / a;
                let better = ratio < best_ratio - 1e-12
                    || (ratio < best_ratio + 1e-12
                        && leave.is_none_or(|l| basis[i] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return SimplexOutcome::Unbounded;
        };

        pivot(tab, cost, shadow.as_deref_mut(), leave, enter);
        basis[leave] = enter;

        let obj = -cost[total];
        if obj < best - 1e-12 * (1.0 + obj.abs()) {
            best = obj;
            stall = 0;
        } else {
            stall += 1;
            if stall > stall_limit {
                bland = true;
            }
        }
    }
    SimplexOutcome::IterationLimit
}

fn pivot(
    tab: &mut [Vec<f64>],
    cost: &mut [f64],
    shadow: Option<&mut Vec<f64>>,
    row: usize,
    col: usize,
) {
    let total = cost.len() - 1;
    let inv = 1.0 / tab[row][col];
    for v in tab[row].iter_mut() {
        *v *= inv;
    }
    for i in 0..tab.len() {
        if i != row {
            let f = tab[i][col];
            if f != 0.0 {
                for j in 0..=total {
                    tab[i][j] -= f * tab[row][j];
                }
                tab[i][col] = 0.0;
            }
        }
    }
    let f = cost[col];
    if f != 0.0 {
        for j in 0..=total {
            cost[j] -= f * tab[row][j];
        }
        cost[col] = 0.0;
    }
    if let Some(sh) = shadow {
        let f = sh[col];
        if f != 0.0 {
            for j in 0..=total {
                sh[j] -= f * tab[row][j];
            }
            sh[col] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn max_with_single_upper_row() {
        let mut p = LpProblem::new(Sense::Maximize, 1);
        p.set_objective(0, 1.0);
        p.add_row(RowSense::Le, 3.0, &[(0, 1.0)]);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.row_duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn min_with_single_lower_row() {
        let mut p = LpProblem::new(Sense::Minimize, 1);
        p.set_objective(0, 1.0);
        p.add_row(RowSense::Ge, 1.0, &[(0, 1.0)]);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 1.0).abs() < 1e-9);
        assert!((s.row_duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let mut p = LpProblem::new(Sense::Maximize, 1);
        p.set_objective(0, 1.0);
        p.add_row(RowSense::Le, -1.0, &[(0, 1.0)]);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut p = LpProblem::new(Sense::Maximize, 1);
        p.set_objective(0, 1.0);
        p.add_row(RowSense::Ge, 1.0, &[(0, 1.0)]);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_row_and_duals() {
        // max x + 2y s.t. x + y = 2, y ≤ 1 → (1, 1), obj 3.
        let mut p = LpProblem::new(Sense::Maximize, 2);
        p.set_objective(0, 1.0);
        p.set_objective(1, 2.0);
        p.add_row(RowSense::Eq, 2.0, &[(0, 1.0), (1, 1.0)]);
        p.add_row(RowSense::Le, 1.0, &[(1, 1.0)]);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        // y·b reproduces the objective.
        let via_duals = s.row_duals[0] * 2.0 + s.row_duals[1] * 1.0;
        assert!((via_duals - 3.0).abs() < 1e-9);
    }

    #[test]
    fn finite_bounds() {
        let mut p = LpProblem::new(Sense::Maximize, 1);
        p.set_objective(0, 1.0);
        p.set_bounds(0, 2.0, 5.0);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert!((s.primal[0] - 5.0).abs() < 1e-9);

        let mut q = LpProblem::new(Sense::Minimize, 1);
        q.set_objective(0, 1.0);
        q.set_bounds(0, 2.0, 5.0);
        let s2 = solve_lp(&q, EPS_LP).unwrap();
        assert!((s2.primal[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_free_variables_and_bad_entries() {
        let mut p = LpProblem::new(Sense::Minimize, 1);
        p.set_bounds(0, f64::NEG_INFINITY, 1.0);
        assert!(matches!(solve_lp(&p, EPS_LP), Err(LpError::FreeVariable(0))));

        let mut q = LpProblem::new(Sense::Minimize, 1);
        q.add_row(RowSense::Le, 1.0, &[(1, 1.0)]);
        assert!(matches!(solve_lp(&q, EPS_LP), Err(LpError::OutOfRange { .. })));
    }

    fn random_feasible(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (LpProblem, Vec<f64>) {
        let mut p = LpProblem::new(Sense::Maximize, n);
        let x0: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0).collect();
        for j in 0..n {
            p.set_objective(j, rng.gen::<f64>() * 4.0 - 2.0);
        }
        for _ in 0..m {
            let coeffs: Vec<(usize, f64)> =
                (0..n).map(|j| (j, rng.gen::<f64>() * 2.0 - 0.5)).collect();
            let lhs: f64 = coeffs.iter().map(|(j, c)| c * x0[*j]).sum();
            p.add_row(RowSense::Le, lhs + rng.gen::<f64>(), &coeffs);
        }
        (p, x0)
    }

    #[test]
    fn weak_duality_and_gap_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let (p, _) = random_feasible(&mut rng, 6, 8);
            let s = solve_lp(&p, EPS_LP).unwrap();
            if s.status != LpStatus::Optimal {
                assert_eq!(s.status, LpStatus::Unbounded);
                continue;
            }
            let dual_obj: f64 = (0..p.num_rows()).map(|i| s.row_duals[i] * p.rhs[i]).sum();
            // Strong duality within tolerance; duals are dual-feasible for max.
            assert!((dual_obj - s.objective).abs() <= EPS_LP * (1.0 + s.objective.abs()));
            assert!(s.row_duals.iter().all(|&y| y >= -EPS_LP));
        }
    }

    #[test]
    fn objective_scaling_preserves_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (p, _) = random_feasible(&mut rng, 5, 6);
            let s = solve_lp(&p, EPS_LP).unwrap();
            if s.status != LpStatus::Optimal {
                continue;
            }
            let alpha = 3.5;
            let mut scaled = p.clone();
            for j in 0..p.num_vars() {
                scaled.set_objective(j, p.objective[j] * alpha);
            }
            let s2 = solve_lp(&scaled, EPS_LP).unwrap();
            assert_eq!(s2.status, LpStatus::Optimal);
            assert!((s2.objective - alpha * s.objective).abs() <= 1e-6 * (1.0 + s2.objective.abs()));
            // The original argmax stays optimal for the scaled problem.
            let val: f64 =
                (0..p.num_vars()).map(|j| scaled.objective[j] * s.primal[j]).sum();
            assert!((val - s2.objective).abs() <= 1e-6 * (1.0 + s2.objective.abs()));
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling-prone instance (Beale); Bland fallback must finish.
        let mut p = LpProblem::new(Sense::Minimize, 4);
        for (j, c) in [-0.75, 150.0, -0.02, 6.0].iter().enumerate() {
            p.set_objective(j, *c);
        }
        p.add_row(RowSense::Le, 0.0, &[(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)]);
        p.add_row(RowSense::Le, 0.0, &[(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)]);
        p.add_row(RowSense::Le, 1.0, &[(2, 1.0)]);
        let s = solve_lp(&p, EPS_LP).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - (-0.05)).abs() < 1e-9);
    }
}
