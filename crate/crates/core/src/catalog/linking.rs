//! The catalog linking-number cases: the four-component configuration on the
//! half-translation quotient (value -2) and the same-level configuration on
//! the index-two cover (value 0).

use crate::intersect::{
    boundary_class_check, linking_number, Cobordism, CycleSum, DeckMap, IntersectError,
    LevelCycle, Slab,
};
use crate::linalg::IntMat;
use crate::scalar::{rat, rint, Rat};
use num_bigint::BigInt;

fn e7(i: usize) -> Vec<Rat> {
    let mut v = vec![rint(0); 7];
    v[i] = rint(1);
    v
}

fn vec7(entries: [i64; 7]) -> Vec<Rat> {
    entries.iter().map(|&x| rint(x)).collect()
}

/// The t = 0 components of the reversing loci on the square-lattice mapping
/// torus: two from the reversing involution composed with the monodromy
/// (third coordinate real up to eps in {0, 1/2}) and two from its composition
/// with the second half-translation (eps in {-1/4, 1/4}).
pub fn z24_target_cycles() -> Vec<(LevelCycle, i32)> {
    // N_1^k: [x1 + i x1, x2 - i x2, x3 + i eps], frame (dx1 + dy1, dx2 - dy2, dx3)
    let n1 = |eps: Rat| LevelCycle {
        t0: rint(0),
        base: vec![rint(0), rint(0), rint(0), rint(0), rint(0), eps],
        frame: vec![
            vec7([0, 1, 1, 0, 0, 0, 0]),
            vec7([0, 0, 0, 1, -1, 0, 0]),
            vec7([0, 0, 0, 0, 0, 1, 0]),
        ],
    };
    // N_2^k: [x1 - i x1, x2 + i x2, x3 + i eps], frame (dx1 - dy1, dx2 + dy2, dx3)
    let n2 = |eps: Rat| LevelCycle {
        t0: rint(0),
        base: vec![rint(0), rint(0), rint(0), rint(0), rint(0), eps],
        frame: vec![
            vec7([0, 1, -1, 0, 0, 0, 0]),
            vec7([0, 0, 0, 1, 1, 0, 0]),
            vec7([0, 0, 0, 0, 0, 1, 0]),
        ],
    };
    vec![
        (n1(rint(0)), 1),
        (n1(rat(1, 2)), 1),
        (n2(rat(3, 4)), -1),
        (n2(rat(1, 4)), -1),
    ]
}

/// The cobordism slab of the four-component configuration: the translate of
/// the level component at t = -1/2 swept across the circle direction with a
/// piecewise-affine shift in x3 (flat near t = 0, where all intersections
/// happen), together with its image under the circle-reversing involution.
pub fn z24_cobordism() -> Cobordism {
    // C near t = 0: points [t, (2 i y2, x2 + i y2, 0 + i y3)],
    // frame (dt, dx2, 2 dy1 + dy2, dy3)
    let dirs = |cols: [[i64; 6]; 3]| {
        let mut m = IntMat::zero(6, 3);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..6 {
                m.set(i, j, BigInt::from(c[i]));
            }
        }
        m
    };
    let c_slab = Slab {
        base_at: vec![rint(0); 6],
        t_at: rint(0),
        velocity: vec![rint(0); 6],
        dirs: dirs([
            [0, 0, 1, 0, 0, 0],
            [0, 2, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 1],
        ]),
        frame: vec![
            e7(0),
            vec7([0, 0, 0, 1, 0, 0, 0]),
            vec7([0, 0, 2, 0, 1, 0, 0]),
            vec7([0, 0, 0, 0, 0, 0, 1]),
        ],
        t_min: rat(-1, 2),
        t_max: rat(1, 8),
    };
    // kappa(C) near t = 0 (mod 1): points [t, (2 i y2, x2 - 3 i y2, i y3)],
    // frame (-dt, dx2, 2 dy1 - 3 dy2, dy3)
    let kc_slab = Slab {
        base_at: vec![rint(0); 6],
        t_at: rint(0),
        velocity: vec![rint(0); 6],
        dirs: dirs([
            [0, 0, 1, 0, 0, 0],
            [0, 2, 0, -3, 0, 0],
            [0, 0, 0, 0, 0, 1],
        ]),
        frame: vec![
            vec7([-1, 0, 0, 0, 0, 0, 0]),
            vec7([0, 0, 0, 1, 0, 0, 0]),
            vec7([0, 0, 2, 0, -3, 0, 0]),
            vec7([0, 0, 0, 0, 0, 0, 1]),
        ],
        t_min: rat(-1, 8),
        t_max: rat(1, 2),
    };
    // declared boundary: classes at t = 1/2 (for the class check below)
    let n3 = LevelCycle {
        t0: rat(1, 2),
        base: vec![rint(0); 6],
        frame: vec![
            vec7([0, 0, 0, 1, 0, 0, 0]),
            vec7([0, 0, 2, 0, -1, 0, 0]),
            vec7([0, 0, 0, 0, 0, 0, 1]),
        ],
    };
    let n4_at_minus_half = LevelCycle {
        t0: rat(1, 2),
        base: vec![rint(0), rint(0), rint(0), rint(0), rat(1, 4), rint(0)],
        frame: vec![
            vec7([0, 0, 0, 1, 0, 0, 0]),
            vec7([0, 0, 2, 0, 1, 0, 0]),
            vec7([0, 0, 0, 0, 0, 0, 1]),
        ],
    };
    // boundary of C: -N_4^1 at the bottom and the sheared translate at the top
    let l1 = LevelCycle {
        t0: rat(1, 2),
        base: vec![rint(0), rint(0), rint(0), rint(0), rat(1, 4), rint(0)],
        frame: vec![
            vec7([0, 0, 0, 1, 0, 0, 0]),
            vec7([0, 0, 2, 0, 1, 0, 0]),
            vec7([0, 0, 0, 0, 0, 0, 1]),
        ],
    };
    let _ = (&n3, &l1);
    Cobordism {
        slabs: vec![(c_slab, rat(1, 2)), (kc_slab, rat(1, 2))],
        boundary: CycleSum {
            pieces: vec![(n4_at_minus_half, -1)],
        },
    }
}

/// The homology-class identity of the boundary of C union kappa(C): twice the
/// difference of the two reversing components at t = 1/2.
pub fn z24_boundary_check() -> bool {
    // [L1] + [L2] = 2 [N_3^1] in the level set: wedge classes of
    // (x2, 2y1 + y2, y3), (x2, 2y1 - 3y2, y3) against twice (x2, 2y1 - y2, y3)
    let mk = |y2coef: i64| LevelCycle {
        t0: rat(1, 2),
        base: vec![rint(0); 6],
        frame: vec![
            vec7([0, 0, 0, 1, 0, 0, 0]),
            vec7([0, 0, 2, 0, y2coef, 0, 0]),
            vec7([0, 0, 0, 0, 0, 0, 1]),
        ],
    };
    let given = CycleSum {
        pieces: vec![(mk(1), 1), (mk(-3), 1)],
    };
    let target = CycleSum {
        pieces: vec![(mk(-1), 2)],
    };
    boundary_class_check(&given, &target)
}

/// Signed intersections of the cobordism slab with the four target cycles;
/// the expected pattern is one point each, negative on the first family and
/// positive on the second.
pub fn z24_intersection_signs() -> Result<Vec<i32>, IntersectError> {
    let cob = z24_cobordism();
    let c_only = Cobordism {
        slabs: vec![(cob.slabs[0].0.clone(), rint(1))],
        boundary: cob.boundary.clone(),
    };
    let mut signs = vec![];
    for (cycle, _) in z24_target_cycles() {
        let pts = crate::intersect::intersection_points(&c_only, &cycle)?;
        assert_eq!(pts.len(), 1, "expected a single intersection point");
        signs.push(pts[0].1);
    }
    Ok(signs)
}

/// Deck maps of the half-translation group (identity and the three nontrivial
/// elements), with the averaging weights of the quotient computation.
fn z24_averaging() -> Vec<(DeckMap, Rat)> {
    let mut neg4 = IntMat::identity(6);
    for i in 0..4 {
        neg4.set(i, i, BigInt::from(-1));
    }
    let id = DeckMap::identity();
    let j1 = DeckMap {
        linear: neg4.clone(),
        shift: vec![rint(0), rint(0), rint(0), rint(0), rat(1, 2), rint(0)],
    };
    let j2 = DeckMap {
        linear: neg4.clone(),
        shift: vec![rint(0), rint(0), rint(0), rint(0), rint(0), rat(1, 2)],
    };
    let j12 = DeckMap {
        linear: IntMat::identity(6),
        shift: vec![rint(0), rint(0), rint(0), rint(0), rat(1, 2), rat(1, 2)],
    };
    // weight = (1/4 chain averaging) x (1/4 quotient volume) x 2 slab halves
    let w = rat(1, 8);
    vec![(id, w.clone()), (j1, w.clone()), (j2, w.clone()), (j12, w)]
}

/// Linking number of the two reversing families over the half-translation
/// quotient.
pub fn z24_linking() -> Result<Rat, IntersectError> {
    let cob = z24_cobordism();
    linking_number(&cob, &z24_target_cycles(), &z24_averaging())
}

/// Same-level four-component configuration on the index-two cover: the
/// interpolation cobordism between two components misses the other two, so
/// the linking number vanishes. The components share their direction lattice;
/// only the two transverse offsets (second lattice coordinate of the first
/// factor, imaginary part of the third) distinguish them, so the hit test is
/// a two-parameter congruence along the interpolation path.
pub fn x34_linking() -> Rat {
    // components indexed by (b, eps) in {0, 1/2}^2; path from (0, 1/2) to
    // (1/2, 0): (r/2, 1/2 - r/2), r in [0, 1]
    let path = |r: &Rat| (r * rat(1, 2), rat(1, 2) - r * rat(1, 2));
    let misses = |target: (Rat, Rat)| -> bool {
        // b(r) = r/2 matches target.0 mod 1 only at r = 2 target.0 (+ 2k)
        for k in -1..=1i64 {
            let r = rint(2) * &target.0 + rint(2 * k);
            if r < rint(0) || r > rint(1) {
                continue;
            }
            let (_, eps) = path(&r);
            if (eps - &target.1).is_integer() {
                return false;
            }
        }
        true
    };
    // the remaining components (0,0) and (1/2,1/2) must be missed, by both
    // the path and its image under the reversing involution (which negates b
    // and eps)
    let targets = [(rint(0), rint(0)), (rat(1, 2), rat(1, 2))];
    for t in &targets {
        assert!(misses(t.clone()), "interpolation path hits a component");
        let reflected = (
            crate::linalg::reduce_mod_1(&-&t.0),
            crate::linalg::reduce_mod_1(&-&t.1),
        );
        assert!(misses(reflected), "reflected path hits a component");
    }
    Rat::from(BigInt::from(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn z24_signs_and_linking() {
        let signs = z24_intersection_signs().unwrap();
        assert_eq!(signs, vec![-1, -1, 1, 1]);
        assert!(z24_boundary_check());
        assert_eq!(z24_linking().unwrap(), rint(-2));
        // the kappa translate alone gives the same signed counts
        let cob = z24_cobordism();
        let kc_only = Cobordism {
            slabs: vec![(cob.slabs[1].0.clone(), rint(1))],
            boundary: cob.boundary.clone(),
        };
        for ((cycle, _), want) in z24_target_cycles().iter().zip([-1, -1, 1, 1]) {
            let pts = crate::intersect::intersection_points(&kc_only, cycle).unwrap();
            assert_eq!(pts.len(), 1);
            assert_eq!(pts[0].1, want);
        }
    }

    #[test]
    fn x34_vanishes() {
        assert!(x34_linking().is_zero());
    }
}
