//! Dense tableau simplex for the cycle-packing LP
//!
//!   max 1^T y   s.t.   sum_{C ∋ v} y_C <= c_v  (finite-cost v),   y >= 0,
//!
//! which is the dual of the fractional DFVS LP. The slack basis is feasible
//! because costs are nonnegative, and new cycles enter as columns without
//! disturbing feasibility, so cutting planes on the primal become column
//! generation here. Primal values are the simplex multipliers, read off
//! the reduced costs of the slack columns.
//!
//! Pivoting follows Bland's rule, so degenerate instances terminate.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) trait Scalar: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn cmp_value(&self, o: &Self) -> Ordering;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn cmp_value(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

pub(crate) const FLOAT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &BigRational) -> Self {
        crate::rational::to_f64(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    fn cmp_value(&self, o: &Self) -> Ordering {
        self.total_cmp(o)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum SimplexError {
    /// A column with no positive entry can enter: the packing LP is
    /// unbounded, i.e. the covering LP is infeasible.
    Unbounded(usize),
    PivotCap,
}

#[derive(Clone, Debug)]
pub(crate) struct PackingSimplex<T: Scalar> {
    m: usize,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    reduced: Vec<T>,
    objective: T,
    basis: Vec<usize>,
    pivots: usize,
}

impl<T: Scalar> PackingSimplex<T> {
    /// One row per capacity, slack basis.
    pub fn new(capacities: &[T]) -> Self {
        let m = capacities.len();
        let rows = (0..m)
            .map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        PackingSimplex {
            m,
            rows,
            rhs: capacities.to_vec(),
            reduced: vec![T::zero(); m],
            objective: T::zero(),
            basis: (0..m).collect(),
            pivots: 0,
        }
    }

    pub fn column_count(&self) -> usize {
        self.reduced.len() - self.m
    }

    /// Adds a packing column with unit objective covering `members` (row
    /// indices). Returns the column's index among the added columns.
    pub fn add_column(&mut self, members: &[usize]) -> usize {
        for i in 0..self.m {
            let mut v = T::zero();
            for &r in members {
                let e = &self.rows[i][r];
                if !e.is_zero() {
                    v = v.add(e);
                }
            }
            self.rows[i].push(v);
        }
        let mut rc = T::zero();
        for &r in members {
            rc = rc.add(&self.reduced[r]);
        }
        self.reduced.push(rc.sub(&T::one()));
        self.reduced.len() - 1 - self.m
    }

    pub fn solve(&mut self, pivot_cap: usize) -> Result<(), SimplexError> {
        loop {
            let Some(enter) = (0..self.reduced.len()).find(|&j| self.reduced[j].is_neg()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][enter];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].div(a);
                let better = match &leave {
                    None => true,
                    Some((r, best)) => match ratio.cmp_value(best) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[i] < self.basis[*r],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Err(SimplexError::Unbounded(enter));
            };
            if self.pivots >= pivot_cap {
                return Err(SimplexError::PivotCap);
            }
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.pivots += 1;
        let p = self.rows[r][j].clone();
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&c| !self.rows[r][c].is_zero()).collect();
        for &c in &nz {
            self.rows[r][c] = self.rows[r][c].div(&p);
        }
        self.rhs[r] = self.rhs[r].div(&p);
        let pivot_row: Vec<(usize, T)> = nz.iter().map(|&c| (c, self.rows[r][c].clone())).collect();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.rows[i][j].clone();
            if f.is_zero() {
                continue;
            }
            for (c, v) in &pivot_row {
                self.rows[i][*c] = self.rows[i][*c].sub(&f.mul(v));
            }
            self.rows[i][j] = T::zero();
            self.rhs[i] = self.rhs[i].sub(&f.mul(&pivot_rhs));
        }
        let f = self.reduced[j].clone();
        if !f.is_zero() {
            for (c, v) in &pivot_row {
                self.reduced[*c] = self.reduced[*c].sub(&f.mul(v));
            }
            self.reduced[j] = T::zero();
            self.objective = self.objective.sub(&f.mul(&pivot_rhs));
        }
        self.basis[r] = j;
    }

    /// Simplex multipliers of the capacity rows: the covering LP's primal.
    pub fn multipliers(&self) -> Vec<T> {
        self.reduced[..self.m].to_vec()
    }

    /// Values of the added columns.
    pub fn column_values(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.column_count()];
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.m {
                out[b - self.m] = self.rhs[i].clone();
            }
        }
        out
    }

    pub fn objective(&self) -> &T {
        &self.objective
    }
}
