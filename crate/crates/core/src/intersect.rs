//! Signed intersection counts of transverse affine cycles in flat mapping
//! tori, homology-class checks for boundaries, and linking numbers computed
//! from piecewise-affine cobordisms with deck-group averaging.
//!
//! Ambient coordinates are (t, x1, y1, x2, y2, x3, y3); the positive
//! orientation is that ordered frame.

use crate::linalg::{solve_congruence, IntMat, Mat};
use crate::scalar::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// An affine torus inside a level set {t0} x T^6, with an oriented rational
/// frame (7-vectors; the t-component of level cycles is zero).
#[derive(Clone, Debug)]
pub struct LevelCycle {
    pub t0: Rat,
    pub base: Vec<Rat>,
    pub frame: Vec<Vec<Rat>>,
}

/// A formal sum of level cycles with signs.
#[derive(Clone, Debug)]
pub struct CycleSum {
    pub pieces: Vec<(LevelCycle, i32)>,
}

/// An oriented affine slab: a t-interval times an affine torus, carried by an
/// affine section t |-> base(t). Piecewise-affine profiles are encoded by the
/// section value and velocity at the level sets where intersections occur.
#[derive(Clone, Debug)]
pub struct Slab {
    pub base_at: Vec<Rat>,
    pub t_at: Rat,
    pub velocity: Vec<Rat>,
    /// torus directions of the slab cross-section (6 rows, integer columns)
    pub dirs: IntMat,
    /// oriented frame of the slab (7-vectors)
    pub frame: Vec<Vec<Rat>>,
    pub t_min: Rat,
    pub t_max: Rat,
}

/// Cobordism: weighted slabs with a declared boundary.
#[derive(Clone, Debug)]
pub struct Cobordism {
    pub slabs: Vec<(Slab, Rat)>,
    pub boundary: CycleSum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntersectError {
    NotTransverse,
}

impl std::fmt::Display for IntersectError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "a positive-dimensional intersection family exists")
    }
}

/// Signed intersection points of a slab with a level cycle; each point gets
/// the sign of det[frame_slab | frame_cycle] against the ambient orientation.
pub fn slab_level_intersections(
    slab: &Slab,
    cycle: &LevelCycle,
) -> Result<Vec<(Vec<Rat>, i32)>, IntersectError> {
    if cycle.t0 < slab.t_min || cycle.t0 > slab.t_max {
        return Ok(vec![]);
    }
    let dt = &cycle.t0 - &slab.t_at;
    let section: Vec<Rat> = slab
        .base_at
        .iter()
        .zip(slab.velocity.iter())
        .map(|(b, v)| b + &dt * v)
        .collect();
    let cyc_dirs = spatial_int_dirs(&cycle.frame);
    let d1 = slab.dirs.cols;
    let d2 = cyc_dirs.cols;
    let mut m = IntMat::zero(6, d1 + d2);
    for i in 0..6 {
        for j in 0..d1 {
            m.set(i, j, slab.dirs.at(i, j).clone());
        }
        for j in 0..d2 {
            m.set(i, d1 + j, -cyc_dirs.at(i, j).clone());
        }
    }
    let t: Vec<Rat> = cycle
        .base
        .iter()
        .zip(section.iter())
        .map(|(c, s)| c - s)
        .collect();
    let Some(fam) = solve_congruence(&m, &t) else {
        return Ok(vec![]);
    };
    if fam.dim() > 0 {
        return Err(IntersectError::NotTransverse);
    }
    let mut cols: Vec<Vec<Rat>> = vec![];
    cols.extend(slab.frame.iter().cloned());
    cols.extend(cycle.frame.iter().cloned());
    if cols.len() != 7 {
        return Err(IntersectError::NotTransverse);
    }
    let det = det_rat(&cols);
    if det.is_zero() {
        return Err(IntersectError::NotTransverse);
    }
    let sign = if det.is_positive() { 1 } else { -1 };
    let mut points = vec![];
    for b in &fam.basepoints {
        let theta = &b[..d1];
        let mut p = vec![cycle.t0.clone()];
        for i in 0..6 {
            let mut x = section[i].clone();
            for (j, th) in theta.iter().enumerate() {
                x += Rat::from(slab.dirs.at(i, j).clone()) * th;
            }
            p.push(crate::linalg::reduce_mod_1(&x));
        }
        points.push((p, sign));
    }
    Ok(points)
}

fn spatial_int_dirs(frame: &[Vec<Rat>]) -> IntMat {
    let mut m = IntMat::zero(6, frame.len());
    for (j, f) in frame.iter().enumerate() {
        assert!(f[0].is_zero(), "level cycle frame has a t-component");
        for i in 0..6 {
            assert!(f[i + 1].is_integer(), "expected integer directions");
            m.set(i, j, f[i + 1].numer().clone());
        }
    }
    m
}

fn det_rat(cols: &[Vec<Rat>]) -> Rat {
    let n = cols.len();
    let mut m = Mat::zero(n, n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            m.set(i, j, c[i].clone());
        }
    }
    let mut den = BigInt::one();
    for j in 0..n {
        for i in 0..n {
            den = num_integer::lcm(den.clone(), m.at(i, j).denom().clone());
        }
    }
    let mut im = IntMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = m.at(i, j) * Rat::from(den.clone());
            im.set(i, j, v.numer().clone());
        }
    }
    let d = im.det();
    Rat::new(d, num_traits::pow::pow(den, n))
}

/// All signed intersections of the cobordism pieces with a target cycle.
pub fn intersection_points(
    c: &Cobordism,
    target: &LevelCycle,
) -> Result<Vec<(Vec<Rat>, i32)>, IntersectError> {
    let mut out = vec![];
    for (s, _) in &c.slabs {
        out.extend(slab_level_intersections(s, target)?);
    }
    Ok(out)
}

/// H_3 class of a level cycle inside its level set: the integer 3-vector
/// wedge of its directions over the 20 coordinate triples.
pub fn h3_class(cycle: &LevelCycle) -> Vec<BigInt> {
    let dirs = spatial_int_dirs(&cycle.frame);
    let triples = crate::forms::lattice_monos(3);
    let mut out = vec![];
    for t in triples {
        let rows: Vec<usize> = (0..6).filter(|k| t & (1 << k) != 0).collect();
        out.push(minor3(&dirs, &rows));
    }
    out
}

fn minor3(m: &IntMat, rows: &[usize]) -> BigInt {
    let a = |i: usize, j: usize| m.at(rows[i], j);
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Compare the homology class of a formal sum of level cycles against a
/// target sum (all in one level set).
pub fn boundary_class_check(given: &CycleSum, target: &CycleSum) -> bool {
    let acc = |sum: &CycleSum| -> Vec<BigInt> {
        let mut total = vec![BigInt::zero(); 20];
        for (c, sgn) in &sum.pieces {
            for (i, v) in h3_class(c).iter().enumerate() {
                total[i] += v * BigInt::from(*sgn);
            }
        }
        total
    };
    acc(given) == acc(target)
}

/// A deck transformation used for averaging: an affine map of the torus
/// factor, fixing the circle coordinate.
#[derive(Clone, Debug)]
pub struct DeckMap {
    pub linear: IntMat,
    pub shift: Vec<Rat>,
}

impl DeckMap {
    pub fn identity() -> DeckMap {
        DeckMap {
            linear: IntMat::identity(6),
            shift: vec![Rat::zero(); 6],
        }
    }

    pub fn apply_cycle(&self, c: &LevelCycle) -> LevelCycle {
        let base: Vec<Rat> = self
            .linear
            .mul_rat_vec(&c.base)
            .iter()
            .zip(self.shift.iter())
            .map(|(a, b)| crate::linalg::reduce_mod_1(&(a + b)))
            .collect();
        let frame: Vec<Vec<Rat>> = c
            .frame
            .iter()
            .map(|f| {
                let spatial = self.linear.mul_rat_vec(&f[1..].to_vec());
                let mut v = vec![f[0].clone()];
                v.extend(spatial);
                v
            })
            .collect();
        LevelCycle {
            t0: c.t0.clone(),
            base,
            frame,
        }
    }
}

/// Weighted signed-intersection sum implementing a quotient averaging
/// computation: sum over deck maps g of weight(g) times the signed count of
/// the cobordism slabs against g-translates of the target cycles.
pub fn linking_number(
    c: &Cobordism,
    target: &[(LevelCycle, i32)],
    averaging: &[(DeckMap, Rat)],
) -> Result<Rat, IntersectError> {
    let mut total = Rat::zero();
    for (g, w) in averaging {
        for (cycle, sign) in target {
            let moved = g.apply_cycle(cycle);
            for (slab, sw) in &c.slabs {
                let pts = slab_level_intersections(slab, &moved)?;
                for (_, s) in pts {
                    total += w * sw * Rat::from(BigInt::from(s * sign));
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    fn e(i: usize) -> Vec<Rat> {
        let mut v = vec![rint(0); 7];
        v[i] = rint(1);
        v
    }

    fn axis_slab(cols: [usize; 3]) -> Slab {
        let mut dirs = IntMat::zero(6, 3);
        for (j, &c) in cols.iter().enumerate() {
            dirs.set(c, j, BigInt::from(1));
        }
        Slab {
            base_at: vec![rint(0); 6],
            t_at: rint(0),
            velocity: vec![rint(0); 6],
            dirs,
            frame: vec![e(0), e(cols[0] + 1), e(cols[1] + 1), e(cols[2] + 1)],
            t_min: rint(-1),
            t_max: rint(1),
        }
    }

    #[test]
    fn parallel_disjoint_tori_are_empty() {
        let slab = axis_slab([0, 1, 2]);
        let cycle = LevelCycle {
            t0: rint(0),
            base: vec![rint(0), rint(0), rint(0), rat(1, 2), rat(1, 2), rat(1, 2)],
            frame: vec![e(1), e(2), e(3)],
        };
        let pts = slab_level_intersections(&slab, &cycle).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn complementary_axes_meet_once_positively() {
        let slab = axis_slab([0, 1, 2]);
        let cycle = LevelCycle {
            t0: rint(0),
            base: vec![rint(0); 6],
            frame: vec![e(4), e(5), e(6)],
        };
        let pts = slab_level_intersections(&slab, &cycle).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].1, 1);
    }

    #[test]
    fn overlapping_families_report_not_transverse() {
        let slab = axis_slab([0, 1, 2]);
        let cycle = LevelCycle {
            t0: rint(0),
            base: vec![rint(0); 6],
            frame: vec![e(1), e(5), e(6)],
        };
        assert_eq!(
            slab_level_intersections(&slab, &cycle),
            Err(IntersectError::NotTransverse)
        );
    }

    #[test]
    fn boundary_class_examples() {
        let n = LevelCycle {
            t0: rint(0),
            base: vec![rint(0); 6],
            frame: vec![e(1), e(2), e(3)],
        };
        let n2 = LevelCycle {
            t0: rint(0),
            base: vec![rat(1, 2), rint(0), rint(0), rint(0), rint(0), rint(0)],
            frame: vec![e(1), e(2), e(3)],
        };
        let a = CycleSum {
            pieces: vec![(n.clone(), 1), (n2.clone(), -1)],
        };
        let b = CycleSum { pieces: vec![] };
        assert!(boundary_class_check(&a, &b));
        let c = CycleSum {
            pieces: vec![(n.clone(), 2), (n2.clone(), -1)],
        };
        assert!(!boundary_class_check(&c, &b));
    }
}
