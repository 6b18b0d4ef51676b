//! Dense two-phase simplex over exact rationals.
//!
//! Problems are small (tens of variables and constraints), so a full tableau
//! is kept and every pivot is exact. Bland's rule picks both the entering and
//! the leaving variable, which rules out cycling on degenerate vertices.

use num_traits::{One, Signed, Zero};

use super::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Rational>, value: Rational },
}

impl LpOutcome {
    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

/// `maximize objective·x` subject to the constraints.
///
/// Variables are non-negative unless marked free. Without an objective the
/// solver stops after phase one and returns any feasible point.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Option<Vec<Rational>>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            free: vec![false; n_vars],
            constraints: Vec::new(),
            objective: None,
        }
    }

    /// All variables unrestricted in sign.
    pub fn free(n_vars: usize) -> Self {
        Self {
            free: vec![true; n_vars],
            ..Self::new(n_vars)
        }
    }

    pub fn set_free(&mut self, var: usize, free: bool) -> &mut Self {
        self.free[var] = free;
        self
    }

    pub fn add(&mut self, constraint: Constraint) -> &mut Self {
        assert_eq!(constraint.coeffs.len(), self.n_vars, "constraint width");
        self.constraints.push(constraint);
        self
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> &mut Self {
        assert_eq!(objective.len(), self.n_vars, "objective width");
        self.objective = Some(objective);
        self
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn solve(&self) -> LpOutcome {
        let mut layout = Layout::new(&self.free);
        let mut tab = Tableau::build(&self.constraints, &mut layout);

        // Phase one: maximize -sum(artificials).
        let mut phase1 = vec![Rational::zero(); tab.n_cols];
        for &a in &tab.artificial {
            phase1[a] = -Rational::one();
        }
        tab.set_objective(&phase1);
        match tab.run(&vec![false; tab.n_cols]) {
            Pivoted::Optimal => {}
            // Phase one is bounded above by zero.
            Pivoted::Unbounded => unreachable!("phase one cannot be unbounded"),
        }
        if tab.objective_value().is_negative() {
            return LpOutcome::Infeasible;
        }
        tab.evict_artificials();

        let mut blocked = vec![false; tab.n_cols];
        for &a in &tab.artificial {
            blocked[a] = true;
        }

        let value = match &self.objective {
            None => Rational::zero(),
            Some(c) => {
                let mut costs = vec![Rational::zero(); tab.n_cols];
                for (j, cj) in c.iter().enumerate() {
                    let (pos, neg) = layout.columns[j];
                    costs[pos] = cj.clone();
                    if let Some(neg) = neg {
                        costs[neg] = -cj.clone();
                    }
                }
                tab.set_objective(&costs);
                if let Pivoted::Unbounded = tab.run(&blocked) {
                    return LpOutcome::Unbounded;
                }
                tab.objective_value()
            }
        };

        let cols = tab.primal();
        let x = layout
            .columns
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &cols[pos] - &cols[neg],
                None => cols[pos].clone(),
            })
            .collect();
        LpOutcome::Optimal { x, value }
    }
}

/// Maps user variables onto non-negative tableau columns.
struct Layout {
    columns: Vec<(usize, Option<usize>)>,
    next: usize,
}

impl Layout {
    fn new(free: &[bool]) -> Self {
        let mut next = 0;
        let columns = free
            .iter()
            .map(|&f| {
                let pos = next;
                next += 1;
                let neg = f.then(|| {
                    next += 1;
                    next - 1
                });
                (pos, neg)
            })
            .collect();
        Self { columns, next }
    }

    fn alloc(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }
}

enum Pivoted {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j`.
    reduced: Vec<Rational>,
    /// `-c_B B^-1 b`, i.e. the negated objective value.
    neg_value: Rational,
    artificial: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn build(constraints: &[Constraint], layout: &mut Layout) -> Self {
        // Slack, surplus and artificial columns come after the structural ones.
        let mut plan = Vec::with_capacity(constraints.len());
        for c in constraints {
            let flip = c.rhs.is_negative();
            let relation = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            let slack = match relation {
                Relation::Eq => None,
                _ => Some(layout.alloc()),
            };
            plan.push((flip, relation, slack));
        }
        let mut artificial = Vec::new();
        let mut art_of_row = Vec::with_capacity(constraints.len());
        for (_, relation, _) in &plan {
            if *relation == Relation::Le {
                art_of_row.push(None);
            } else {
                let a = layout.alloc();
                artificial.push(a);
                art_of_row.push(Some(a));
            }
        }
        let n_cols = layout.next;

        let mut rows = Vec::with_capacity(constraints.len());
        let mut rhs = Vec::with_capacity(constraints.len());
        let mut basis = Vec::with_capacity(constraints.len());
        for (i, c) in constraints.iter().enumerate() {
            let (flip, relation, slack) = plan[i];
            let sign = if flip { -Rational::one() } else { Rational::one() };
            let mut row = vec![Rational::zero(); n_cols];
            for (j, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (pos, neg) = layout.columns[j];
                row[pos] = a * &sign;
                if let Some(neg) = neg {
                    row[neg] = -(a * &sign);
                }
            }
            match (relation, slack) {
                (Relation::Le, Some(s)) => {
                    row[s] = Rational::one();
                    basis.push(s);
                }
                (Relation::Ge, Some(s)) => {
                    row[s] = -Rational::one();
                }
                _ => {}
            }
            if let Some(a) = art_of_row[i] {
                row[a] = Rational::one();
                basis.push(a);
            }
            rows.push(row);
            rhs.push(&c.rhs * &sign);
        }

        Self {
            rows,
            rhs,
            basis,
            reduced: vec![Rational::zero(); n_cols],
            neg_value: Rational::zero(),
            artificial,
            n_cols,
        }
    }

    fn set_objective(&mut self, costs: &[Rational]) {
        let mut reduced = costs.to_vec();
        let mut neg_value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *r -= cb * a;
                }
            }
            neg_value -= cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.neg_value = neg_value;
    }

    fn objective_value(&self) -> Rational {
        -self.neg_value.clone()
    }

    fn run(&mut self, blocked: &[bool]) -> Pivoted {
        loop {
            let entering = (0..self.n_cols).find(|&j| !blocked[j] && self.reduced[j].is_positive());
            let Some(col) = entering else {
                return Pivoted::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Pivoted::Unbounded;
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for a in self.rows[row].iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        self.rhs[row] *= &inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for (a, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        let f = self.reduced[col].clone();
        if !f.is_zero() {
            for (r, p) in self.reduced.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *r -= &f * p;
                }
            }
            self.neg_value -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// After a feasible phase one, pivots zero-valued artificials out of the
    /// basis; rows where that is impossible are redundant and dropped.
    fn evict_artificials(&mut self) {
        let is_art = {
            let mut v = vec![false; self.n_cols];
            for &a in &self.artificial {
                v[a] = true;
            }
            v
        };
        let mut i = 0;
        while i < self.rows.len() {
            if !is_art[self.basis[i]] {
                i += 1;
                continue;
            }
            match (0..self.n_cols).find(|&j| !is_art[j] && !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n_cols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }
}
