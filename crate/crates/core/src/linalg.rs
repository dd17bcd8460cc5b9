//! Exact linear algebra: matrices over Q or Q(zeta_n), Smith normal form,
//! kernels, cokernels, minimal polynomials and lattice congruence solving.

use crate::scalar::{Cyc, Rat};
use num_bigint::BigInt;
use num_traits::{Euclid, One, Signed, Zero};
use std::fmt;

pub trait Field: Clone + PartialEq + fmt::Debug {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_neg(&self) -> Self;
    fn f_inv(&self) -> Option<Self>;
    fn f_is_zero(&self) -> bool;
}

impl Field for Rat {
    fn f_zero() -> Self {
        Rat::zero()
    }
    fn f_one() -> Self {
        Rat::one()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Field for Cyc {
    fn f_zero() -> Self {
        Cyc::zero()
    }
    fn f_one() -> Self {
        Cyc::one()
    }
    fn f_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn f_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn f_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn f_neg(&self) -> Self {
        self.neg()
    }
    fn f_inv(&self) -> Option<Self> {
        self.inv()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Clone, PartialEq)]
pub struct Mat<F: Field> {
    pub rows: usize,
    pub cols: usize,
    e: Vec<F>,
}

impl<F: Field> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.at(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F: Field> Mat<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            e: vec![F::f_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, F::f_one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut e = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            e.extend(row);
        }
        Mat { rows: r, cols: c, e }
    }

    pub fn at(&self, i: usize, j: usize) -> &F {
        &self.e[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.e[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.at(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, o.rows);
        let mut m: Mat<F> = Mat::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.f_is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a.f_mul(o.at(k, j));
                    let v = m.at(i, j).f_add(&t);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::f_zero();
                for j in 0..self.cols {
                    acc = acc.f_add(&self.at(i, j).f_mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Mat<F>) -> Mat<F> {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let mut m = self.clone();
        for i in 0..self.e.len() {
            m.e[i] = self.e[i].f_add(&o.e[i]);
        }
        m
    }

    pub fn sub(&self, o: &Mat<F>) -> Mat<F> {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let mut m = self.clone();
        for i in 0..self.e.len() {
            m.e[i] = self.e[i].f_sub(&o.e[i]);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.f_is_zero())
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Mat<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut piv = None;
            for i in r..m.rows {
                if !m.at(i, c).f_is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            if p != r {
                for j in 0..m.cols {
                    let a = m.at(r, j).clone();
                    let b = m.at(p, j).clone();
                    m.set(r, j, b);
                    m.set(p, j, a);
                }
            }
            let inv = m.at(r, c).f_inv().unwrap();
            for j in 0..m.cols {
                let v = m.at(r, j).f_mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.at(i, c).f_is_zero() {
                    let factor = m.at(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.at(i, j).f_sub(&factor.f_mul(m.at(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Echelonized basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let mut basis = vec![];
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![F::f_zero(); self.cols];
            v[free] = F::f_one();
            for (ri, &p) in pivots.iter().enumerate() {
                v[p] = r.at(ri, free).f_neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Representatives of target / column span, chosen greedily among standard
    /// basis vectors (deterministic).
    pub fn cokernel_basis(&self) -> Vec<Vec<F>> {
        let rank = self.rank();
        let mut reps: Vec<Vec<F>> = vec![];
        let mut current = self.clone();
        let mut cur_rank = rank;
        for k in 0..self.rows {
            if cur_rank == self.rows {
                break;
            }
            // try appending e_k as an extra column
            let mut ext = Mat::zero(self.rows, current.cols + 1);
            for i in 0..self.rows {
                for j in 0..current.cols {
                    ext.set(i, j, current.at(i, j).clone());
                }
            }
            ext.set(k, current.cols, F::f_one());
            if ext.rank() > cur_rank {
                let mut v = vec![F::f_zero(); self.rows];
                v[k] = F::f_one();
                reps.push(v);
                current = ext;
                cur_rank += 1;
            }
        }
        reps
    }

    /// Solve self * x = b exactly. Returns one solution if consistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![F::f_zero(); self.cols];
        for (ri, &p) in pivots.iter().enumerate() {
            x[p] = r.at(ri, self.cols).clone();
        }
        Some(x)
    }

    /// Express b in terms of the given spanning vectors (columns); None if outside span.
    pub fn from_cols(cols: Vec<Vec<F>>) -> Mat<F> {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        let mut m = Mat::zero(r, c);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..r {
                m.set(i, j, col[i].clone());
            }
        }
        m
    }
}

/// Monic polynomial over F, coefficients low-to-high.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F: Field>(pub Vec<F>);

impl<F: Field> Poly<F> {
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn eval_matrix(&self, m: &Mat<F>) -> Mat<F> {
        let n = m.rows;
        let mut acc = Mat::zero(n, n);
        let mut p: Mat<F> = Mat::identity(n);
        for c in &self.0 {
            if !c.f_is_zero() {
                let mut term = p.clone();
                for i in 0..term.e.len() {
                    term.e[i] = term.e[i].f_mul(c);
                }
                acc = acc.add(&term);
            }
            p = p.mul(m);
        }
        acc
    }

    /// Divide by (x - lambda); returns quotient if remainder is zero.
    pub fn divide_linear(&self, lambda: &F) -> Option<Poly<F>> {
        let mut quo = vec![F::f_zero(); self.0.len() - 1];
        let mut carry = F::f_zero();
        for i in (0..self.0.len()).rev() {
            let c = self.0[i].f_add(&carry);
            if i == 0 {
                if c.f_is_zero() {
                    return Some(Poly(quo));
                }
                return None;
            }
            quo[i - 1] = c.clone();
            carry = c.f_mul(lambda);
        }
        unreachable!()
    }
}

/// Monic minimal polynomial of a square matrix over its field.
pub fn minimal_polynomial<F: Field>(m: &Mat<F>) -> Poly<F> {
    assert_eq!(m.rows, m.cols, "minimal polynomial of a non-square matrix");
    let n = m.rows;
    // find the first linear dependence among I, m, m^2, ... (flattened)
    let mut powers: Vec<Mat<F>> = vec![Mat::identity(n)];
    loop {
        let k = powers.len();
        let next = powers.last().unwrap().mul(m);
        // solve: next = sum c_i powers[i]?
        let cols: Vec<Vec<F>> = powers.iter().map(|p| p.e.clone()).collect();
        let a = Mat::from_cols(cols);
        if let Some(c) = a.solve(&next.e) {
            // x^k - sum c_i x^i
            let mut coeffs = vec![F::f_zero(); k + 1];
            for (i, ci) in c.into_iter().enumerate() {
                coeffs[i] = ci.f_neg();
            }
            coeffs[k] = F::f_one();
            return Poly(coeffs);
        }
        powers.push(next);
    }
}

/// Multiplicity of lambda as a root of the minimal polynomial of m.
pub fn eigenvalue_multiplicity<F: Field>(m: &Mat<F>, lambda: &F) -> usize {
    let mut p = minimal_polynomial(m);
    let mut mult = 0;
    while let Some(q) = p.divide_linear(lambda) {
        mult += 1;
        if q.0.is_empty() {
            break;
        }
        p = q;
    }
    mult
}

// ---------------------------------------------------------------------------
// Integer matrices
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    e: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            e: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut e = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            e.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        IntMat { rows: r, cols: c, e }
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.e[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.e[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.at(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &IntMat) -> IntMat {
        assert_eq!(self.cols, o.rows);
        let mut m = IntMat::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.at(i, j) + self.at(i, k) * o.at(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn sub(&self, o: &IntMat) -> IntMat {
        assert!(self.rows == o.rows && self.cols == o.cols);
        let mut m = self.clone();
        for i in 0..m.e.len() {
            m.e[i] = &self.e[i] - &o.e[i];
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    pub fn to_rat(&self) -> Mat<Rat> {
        let mut m = Mat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, Rat::from(self.at(i, j).clone()));
            }
        }
        m
    }

    pub fn mul_rat_vec(&self, v: &[Rat]) -> Vec<Rat> {
        self.to_rat().mul_vec(v)
    }

    /// Fraction-free Bareiss rank.
    pub fn rank(&self) -> usize {
        let mut m = self.e.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<BigInt>, i: usize, j: usize| m[i * cols + j].clone();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let mut piv = None;
            for i in r..rows {
                if !at(&m, i, c).is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            if p != r {
                for j in 0..cols {
                    m.swap(r * cols + j, p * cols + j);
                }
            }
            let pivot = at(&m, r, c);
            for i in (r + 1)..rows {
                for j in 0..cols {
                    if j == c {
                        continue;
                    }
                    let v = (&pivot * at(&m, i, j) - at(&m, i, c) * at(&m, r, j)) / &prev;
                    m[i * cols + j] = v;
                }
                m[i * cols + c] = BigInt::zero();
            }
            prev = pivot;
            r += 1;
        }
        r
    }

    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        // Bareiss determinant
        let n = self.rows;
        let mut m = self.e.clone();
        let mut prev = BigInt::one();
        let mut sign = BigInt::one();
        for k in 0..n {
            if m[k * n + k].is_zero() {
                let mut found = false;
                for i in (k + 1)..n {
                    if !m[i * n + k].is_zero() {
                        for j in 0..n {
                            m.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                        found = true;
                        break;
                    }
                }
                if !found {
                    return BigInt::zero();
                }
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = (&m[k * n + k] * &m[i * n + j] - &m[i * n + k] * &m[k * n + j]) / &prev;
                    m[i * n + j] = v;
                }
                m[i * n + k] = BigInt::zero();
            }
            prev = m[k * n + k].clone();
        }
        sign * m[(n - 1) * n + (n - 1)].clone()
    }
}

/// U * m * V = D with U, V unimodular and D diagonal with a divisibility chain.
pub struct Snf {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

pub fn smith_normal_form(m: &IntMat) -> Snf {
    let mut d = m.clone();
    let mut u = IntMat::identity(m.rows);
    let mut v = IntMat::identity(m.cols);
    let rows = m.rows;
    let cols = m.cols;

    let swap_rows = |d: &mut IntMat, u: &mut IntMat, a: usize, b: usize| {
        for j in 0..d.cols {
            let x = d.at(a, j).clone();
            let y = d.at(b, j).clone();
            d.set(a, j, y);
            d.set(b, j, x);
        }
        for j in 0..u.cols {
            let x = u.at(a, j).clone();
            let y = u.at(b, j).clone();
            u.set(a, j, y);
            u.set(b, j, x);
        }
    };
    let swap_cols = |d: &mut IntMat, v: &mut IntMat, a: usize, b: usize| {
        for i in 0..d.rows {
            let x = d.at(i, a).clone();
            let y = d.at(i, b).clone();
            d.set(i, a, y);
            d.set(i, b, x);
        }
        for i in 0..v.rows {
            let x = v.at(i, a).clone();
            let y = v.at(i, b).clone();
            v.set(i, a, y);
            v.set(i, b, x);
        }
    };
    // row_op: row a -= q * row b  (on d and u)
    let row_op = |d: &mut IntMat, u: &mut IntMat, a: usize, b: usize, q: &BigInt| {
        for j in 0..d.cols {
            let x = d.at(a, j) - q * d.at(b, j);
            d.set(a, j, x);
        }
        for j in 0..u.cols {
            let x = u.at(a, j) - q * u.at(b, j);
            u.set(a, j, x);
        }
    };
    let col_op = |d: &mut IntMat, v: &mut IntMat, a: usize, b: usize, q: &BigInt| {
        for i in 0..d.rows {
            let x = d.at(i, a) - q * d.at(i, b);
            d.set(i, a, x);
        }
        for i in 0..v.rows {
            let x = v.at(i, a) - q * v.at(i, b);
            v.set(i, a, x);
        }
    };

    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        // find a nonzero pivot with minimal absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d.at(i, j).is_zero() {
                    match &best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if d.at(i, j).abs() < d.at(*bi, *bj).abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        if pi != t {
            swap_rows(&mut d, &mut u, t, pi);
        }
        if pj != t {
            swap_cols(&mut d, &mut v, t, pj);
        }
        // clear row and column t
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in (t + 1)..rows {
                if !d.at(i, t).is_zero() {
                    let q = d.at(i, t).div_euclid(d.at(t, t));
                    row_op(&mut d, &mut u, i, t, &q);
                    if !d.at(i, t).is_zero() {
                        // remainder smaller than pivot: swap up and restart
                        swap_rows(&mut d, &mut u, t, i);
                        dirty = true;
                    }
                }
            }
            for j in (t + 1)..cols {
                if !d.at(t, j).is_zero() {
                    let q = d.at(t, j).div_euclid(d.at(t, t));
                    col_op(&mut d, &mut v, j, t, &q);
                    if !d.at(t, j).is_zero() {
                        swap_cols(&mut d, &mut v, t, j);
                        dirty = true;
                    }
                }
            }
        }
        t += 1;
    }
    // fix signs
    for i in 0..n {
        if d.at(i, i).is_negative() {
            for j in 0..cols {
                let x = -d.at(i, j);
                d.set(i, j, x);
            }
            for j in 0..rows {
                let x = -u.at(i, j);
                u.set(i, j, x);
            }
        }
    }
    // enforce divisibility chain d_i | d_{i+1}
    loop {
        let mut fixed = true;
        for i in 0..n.saturating_sub(1) {
            let a = d.at(i, i).clone();
            let b = d.at(i + 1, i + 1).clone();
            if !a.is_zero() && !(&b % &a).is_zero() {
                // standard trick: add column i+1 to column i, then re-reduce the 2x2 block
                for r in 0..d.rows {
                    let x = d.at(r, i) + d.at(r, i + 1);
                    d.set(r, i, x);
                }
                for r in 0..v.rows {
                    let x = v.at(r, i) + v.at(r, i + 1);
                    v.set(r, i, x);
                }
                // clear the block again with gcd pivoting on rows i..=i+1, cols i..=i+1
                let sub = gcd_fix(&mut d, &mut u, &mut v, i);
                assert!(sub, "divisibility pass");
                fixed = false;
            } else if a.is_zero() && !b.is_zero() {
                swap_rows(&mut d, &mut u, i, i + 1);
                swap_cols(&mut d, &mut v, i, i + 1);
                fixed = false;
            }
        }
        if fixed {
            break;
        }
    }
    Snf { u, d, v }
}

// Re-diagonalize starting at position t (helper for the divisibility pass).
fn gcd_fix(d: &mut IntMat, u: &mut IntMat, v: &mut IntMat, t: usize) -> bool {
    let rows = d.rows;
    let cols = d.cols;
    let mut progress = true;
    while progress {
        progress = false;
        // pick min abs pivot in (t.., t..)
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d.at(i, j).is_zero() {
                    match &best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if d.at(i, j).abs() < d.at(*bi, *bj).abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { return true };
        if pi != t {
            for j in 0..cols {
                let x = d.at(t, j).clone();
                let y = d.at(pi, j).clone();
                d.set(t, j, y);
                d.set(pi, j, x);
            }
            for j in 0..u.cols {
                let x = u.at(t, j).clone();
                let y = u.at(pi, j).clone();
                u.set(t, j, y);
                u.set(pi, j, x);
            }
        }
        if pj != t {
            for i in 0..rows {
                let x = d.at(i, t).clone();
                let y = d.at(i, pj).clone();
                d.set(i, t, y);
                d.set(i, pj, x);
            }
            for i in 0..v.rows {
                let x = v.at(i, t).clone();
                let y = v.at(i, pj).clone();
                v.set(i, t, y);
                v.set(i, pj, x);
            }
        }
        for i in (t + 1)..rows {
            if !d.at(i, t).is_zero() {
                let q = d.at(i, t).div_euclid(d.at(t, t));
                for j in 0..cols {
                    let x = d.at(i, j) - &q * d.at(t, j);
                    d.set(i, j, x);
                }
                for j in 0..u.cols {
                    let x = u.at(i, j) - &q * u.at(t, j);
                    u.set(i, j, x);
                }
                if !d.at(i, t).is_zero() {
                    progress = true;
                }
            }
        }
        for j in (t + 1)..cols {
            if !d.at(t, j).is_zero() {
                let q = d.at(t, j).div_euclid(d.at(t, t));
                for i in 0..rows {
                    let x = d.at(i, j) - &q * d.at(i, t);
                    d.set(i, j, x);
                }
                for i in 0..v.rows {
                    let x = v.at(i, j) - &q * v.at(i, t);
                    v.set(i, j, x);
                }
                if !d.at(t, j).is_zero() {
                    progress = true;
                }
            }
        }
        if !progress {
            // row/col t clean; normalize sign and recurse into the block below
            if d.at(t, t).is_negative() {
                for j in 0..cols {
                    let x = -d.at(t, j);
                    d.set(t, j, x);
                }
                for j in 0..u.cols {
                    let x = -u.at(t, j);
                    u.set(t, j, x);
                }
            }
            if t + 1 < rows.min(cols) {
                return gcd_fix(d, u, v, t + 1);
            }
            return true;
        }
    }
    true
}

/// Finitely generated abelian group in invariant-factor form.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j + 1 < self.torsion.len() && self.torsion[j + 1] == self.torsion[i] {
                j += 1;
            }
            let count = j - i + 1;
            if count == 1 {
                parts.push(format!("Z{}", self.torsion[i]));
            } else {
                parts.push(format!("Z{}^{}", self.torsion[i], count));
            }
            i = j + 1;
        }
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Z^rows / column span of m.
pub fn cokernel_group(m: &IntMat) -> AbelianGroup {
    let snf = smith_normal_form(m);
    let n = m.rows.min(m.cols);
    let mut torsion = vec![];
    let mut nonzero = 0;
    for i in 0..n {
        let d = snf.d.at(i, i);
        if !d.is_zero() {
            nonzero += 1;
            if *d > BigInt::one() {
                torsion.push(d.clone());
            }
        }
    }
    AbelianGroup {
        free_rank: m.rows - nonzero,
        torsion,
    }
}

/// Solutions of m x = t (mod Z^rows) on the torus R^cols / Z^cols:
/// finitely many basepoints plus an integer direction lattice.
#[derive(Clone, Debug)]
pub struct AffineSolutionFamily {
    pub basepoints: Vec<Vec<Rat>>,
    pub directions: IntMat,
}

pub fn reduce_mod_1(x: &Rat) -> Rat {
    let f = x.floor();
    x - f
}

pub fn solve_congruence(m: &IntMat, t: &[Rat]) -> Option<AffineSolutionFamily> {
    assert_eq!(t.len(), m.rows);
    let snf = smith_normal_form(m);
    let n = m.rows.min(m.cols);
    // with y = V^-1 x: D y = U t (mod Z^rows)
    let s = snf.u.mul_rat_vec(t);
    let mut finite: Vec<(usize, Vec<Rat>)> = vec![]; // (coordinate, choices)
    let mut free: Vec<usize> = vec![];
    for k in 0..m.cols {
        if k < n && !snf.d.at(k, k).is_zero() {
            let d = Rat::from(snf.d.at(k, k).clone());
            // y_k = (s_k + j)/d for j = 0..d-1
            let mut choices = vec![];
            let dnum = snf.d.at(k, k).clone();
            let mut j = BigInt::zero();
            while j < dnum {
                let y = (&s[k] + Rat::from(j.clone())) / &d;
                choices.push(reduce_mod_1(&y));
                j += 1;
            }
            choices.sort();
            finite.push((k, choices));
        } else {
            free.push(k);
        }
    }
    // consistency on zero rows: s_k must be integral
    for k in 0..m.rows {
        let zero_row = k >= n || snf.d.at(k, k).is_zero();
        if zero_row && !s[k].is_integer() {
            return None;
        }
    }
    // directions: columns V e_k for free k
    let mut directions = IntMat::zero(m.cols, free.len());
    for (jj, &k) in free.iter().enumerate() {
        for i in 0..m.cols {
            directions.set(i, jj, snf.v.at(i, k).clone());
        }
    }
    // basepoints: all combinations of finite choices, mapped by V
    let mut ys: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m.cols]];
    for (k, choices) in &finite {
        let mut next = vec![];
        for y in &ys {
            for c in choices {
                let mut y2 = y.clone();
                y2[*k] = c.clone();
                next.push(y2);
            }
        }
        ys = next;
    }
    let mut basepoints: Vec<Vec<Rat>> = ys
        .into_iter()
        .map(|y| {
            snf.v
                .mul_rat_vec(&y)
                .iter()
                .map(reduce_mod_1)
                .collect::<Vec<_>>()
        })
        .collect();
    basepoints.sort();
    Some(AffineSolutionFamily {
        basepoints,
        directions,
    })
}

impl AffineSolutionFamily {
    pub fn dim(&self) -> usize {
        self.directions.cols
    }

    pub fn component_count(&self) -> usize {
        self.basepoints.len()
    }
}

/// Does x lie on the affine subtorus (base + span(dirs)) mod Z^n?
/// dirs is n x d; membership means dirs * theta = x - base + k for some integer k.
pub fn on_subtorus(base: &[Rat], dirs: &IntMat, x: &[Rat]) -> bool {
    let diff: Vec<Rat> = x.iter().zip(base.iter()).map(|(a, b)| a - b).collect();
    solve_congruence(dirs, &diff).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    fn rmat(rows: &[Vec<i64>]) -> Mat<Rat> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rint(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::<Rat>::identity(3).rank(), 3);
        // strictly upper-triangular with superdiagonal -2, -1 (A11_2 - Id)
        let m = rmat(&[vec![0, -2, 1], vec![0, 0, -1], vec![0, 0, 0]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(Mat::<Rat>::zero(2, 2).rank(), 0);
    }

    #[test]
    fn kernel_and_cokernel_examples() {
        let m = rmat(&[vec![0, -2, 1], vec![0, 0, -1], vec![0, 0, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![rint(1), rint(0), rint(0)]); // e1 direction
        let c = m.cokernel_basis();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0], vec![rint(0), rint(0), rint(1)]); // e3 direction
        // (u Id2 - Id2) with u = zeta_3 is invertible
        let u = Cyc::zeta(3);
        let d = u.sub(&Cyc::one());
        let m2 = Mat::from_rows(vec![
            vec![d.clone(), Cyc::zero()],
            vec![Cyc::zero(), d.clone()],
        ]);
        assert!(m2.kernel_basis().is_empty());
        assert_eq!(Mat::<Rat>::zero(2, 2).kernel_basis().len(), 2);
        assert_eq!(Mat::<Rat>::identity(3).cokernel_basis().len(), 0);
        assert_eq!(Mat::<Rat>::zero(3, 3).cokernel_basis().len(), 3);
        assert_eq!(m.rank() + m.kernel_basis().len(), m.cols);
    }

    #[test]
    fn snf_examples() {
        let m = IntMat::from_rows_i64(&[vec![2, 0], vec![0, 3]]);
        let snf = smith_normal_form(&m);
        assert_eq!(*snf.d.at(0, 0), BigInt::from(1));
        assert_eq!(*snf.d.at(1, 1), BigInt::from(6));
        assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d);
        assert_eq!(snf.u.det().abs(), BigInt::one());
        assert_eq!(snf.v.det().abs(), BigInt::one());

        let z = IntMat::zero(2, 2);
        let s = smith_normal_form(&z);
        assert!(s.d.is_zero());
        assert_eq!(s.u, IntMat::identity(2));
        assert_eq!(s.v, IntMat::identity(2));
    }

    #[test]
    fn minimal_polynomial_examples() {
        let a112 = rmat(&[vec![1, -2, 1], vec![0, 1, -1], vec![0, 0, 1]]);
        let p = minimal_polynomial(&a112);
        // (x-1)^3 = x^3 - 3x^2 + 3x - 1
        assert_eq!(p.0, vec![rint(-1), rint(3), rint(-3), rint(1)]);
        assert!(p.eval_matrix(&a112).is_zero());
        assert_eq!(eigenvalue_multiplicity(&a112, &rint(1)), 3);

        let id = Mat::<Rat>::identity(2);
        assert_eq!(minimal_polynomial(&id).0, vec![rint(-1), rint(1)]);
        assert_eq!(eigenvalue_multiplicity(&id, &rint(1)), 1);

        // B1 = (u^-2) with u = i: single entry -1, minimal polynomial x + 1
        let u = Cyc::i();
        let b1 = Mat::from_rows(vec![vec![u.pow(-2)]]);
        let p = minimal_polynomial(&b1);
        assert_eq!(p.0, vec![Cyc::one(), Cyc::one()]);

        // A20_2 with u = i: eigenvalues u^-1 = -i, so multiplicity of 1 is 0
        let ui = Cyc::i().pow(-1);
        let a202 = Mat::from_rows(vec![
            vec![ui.clone(), ui.neg()],
            vec![Cyc::zero(), ui.clone()],
        ]);
        assert_eq!(eigenvalue_multiplicity(&a202, &Cyc::one()), 0);
    }

    #[test]
    fn cokernel_group_examples() {
        let z = IntMat::zero(2, 2);
        assert_eq!(
            cokernel_group(&z),
            AbelianGroup {
                free_rank: 2,
                torsion: vec![]
            }
        );
        let m = IntMat::from_rows_i64(&[vec![3, 0], vec![0, 1]]);
        let g = cokernel_group(&m);
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.torsion, vec![BigInt::from(3)]);
        assert_eq!(g.to_string(), "Z3");
    }

    #[test]
    fn solve_congruence_examples() {
        // 2 Id, t = 0: 4 basepoints, no directions
        let m = IntMat::from_rows_i64(&[vec![2, 0], vec![0, 2]]);
        let f = solve_congruence(&m, &[rint(0), rint(0)]).unwrap();
        assert_eq!(f.component_count(), 4);
        assert_eq!(f.dim(), 0);

        // m = 0, t = 1/2: no solutions
        let z = IntMat::zero(1, 1);
        assert!(solve_congruence(&z, &[rat(1, 2)]).is_none());

        // m = [[1,1],[0,2]], t = (0,1): 2 solution points
        let m = IntMat::from_rows_i64(&[vec![1, 1], vec![0, 2]]);
        let f = solve_congruence(&m, &[rint(0), rint(1)]).unwrap();
        assert_eq!(f.component_count(), 2);
        assert_eq!(f.dim(), 0);
        for b in &f.basepoints {
            let im = m.mul_rat_vec(b);
            assert!((im[0].clone() - rint(0)).is_integer());
            assert!((im[1].clone() - rint(1)).is_integer());
        }
    }
}

/// Reusable exact linear solver: factors the matrix once, then solves many
/// right-hand sides by a single matrix-vector product.
pub struct Solver<F: Field> {
    /// row-operation matrix with E * A in reduced row echelon form
    e: Mat<F>,
    pivots: Vec<usize>,
    cols: usize,
    rank: usize,
    rows: usize,
}

impl<F: Field> Solver<F> {
    pub fn new(a: &Mat<F>) -> Solver<F> {
        let rows = a.rows;
        let cols = a.cols;
        let mut m = a.clone();
        let mut e: Mat<F> = Mat::identity(rows);
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let mut piv = None;
            for i in r..rows {
                if !m.at(i, c).f_is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            if p != r {
                for j in 0..cols {
                    let x = m.at(r, j).clone();
                    let y = m.at(p, j).clone();
                    m.set(r, j, y);
                    m.set(p, j, x);
                }
                for j in 0..rows {
                    let x = e.at(r, j).clone();
                    let y = e.at(p, j).clone();
                    e.set(r, j, y);
                    e.set(p, j, x);
                }
            }
            let inv = m.at(r, c).f_inv().unwrap();
            for j in 0..cols {
                let v = m.at(r, j).f_mul(&inv);
                m.set(r, j, v);
            }
            for j in 0..rows {
                let v = e.at(r, j).f_mul(&inv);
                e.set(r, j, v);
            }
            for i in 0..rows {
                if i != r && !m.at(i, c).f_is_zero() {
                    let f = m.at(i, c).clone();
                    for j in 0..cols {
                        let v = m.at(i, j).f_sub(&f.f_mul(m.at(r, j)));
                        m.set(i, j, v);
                    }
                    for j in 0..rows {
                        let v = e.at(i, j).f_sub(&f.f_mul(e.at(r, j)));
                        e.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Solver {
            e,
            pivots,
            cols,
            rank: r,
            rows,
        }
    }

    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let y = self.e.mul_vec(b);
        for i in self.rank..self.rows {
            if !y[i].f_is_zero() {
                return None;
            }
        }
        let mut x = vec![F::f_zero(); self.cols];
        for (ri, &p) in self.pivots.iter().enumerate() {
            x[p] = y[ri].clone();
        }
        Some(x)
    }
}

/// Incrementally maintained reduced echelon basis of a growing span.
pub struct Echelon<F: Field> {
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Echelon<F> {
        Echelon {
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Echelon<F> {
        let mut e = Echelon::new();
        for r in rows {
            e.insert(r.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of v after reduction against the current rows.
    pub fn reduce(&self, mut v: Vec<F>) -> Vec<F> {
        for (r, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if !v[p].f_is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(r.iter()) {
                    *x = x.f_sub(&f.f_mul(y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.f_is_zero())
    }

    /// Insert v; returns true if the rank grew.
    pub fn insert(&mut self, v: Vec<F>) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.f_is_zero()) else {
            return false;
        };
        let inv = r[p].f_inv().unwrap();
        for x in r.iter_mut() {
            *x = x.f_mul(&inv);
        }
        // back-substitute into existing rows
        for (row, &rp) in self.rows.iter_mut().zip(self.pivots.iter()) {
            let _ = rp;
            if !row[p].f_is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(r.iter()) {
                    *x = x.f_sub(&f.f_mul(y));
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}
