//! The torus models and affine self-maps used by the built-in catalog.

use crate::scalar::{rat, Cyc, Rat};
use crate::torus::{ComplexLattice, SesquilinearAffineMap, TorusModel};
use num_traits::Zero;

fn zero_mat() -> [[Cyc; 3]; 3] {
    [
        [Cyc::zero(), Cyc::zero(), Cyc::zero()],
        [Cyc::zero(), Cyc::zero(), Cyc::zero()],
        [Cyc::zero(), Cyc::zero(), Cyc::zero()],
    ]
}

fn zero_t() -> [Rat; 6] {
    [
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
    ]
}

/// Torus models: k = 1 hexagonal, k = 2 square, k = 3 index-two sublattice in
/// the first coordinate.
pub fn torus_model(k: u32) -> TorusModel {
    let sq = || ComplexLattice {
        v1: Cyc::one(),
        v2: Cyc::i(),
    };
    let hex = || ComplexLattice {
        v1: Cyc::one(),
        v2: Cyc::zeta(3),
    };
    let half = || ComplexLattice {
        v1: Cyc::one().add(&Cyc::i()),
        v2: Cyc::one().sub(&Cyc::i()),
    };
    match k {
        1 => TorusModel {
            name: "T6_1".into(),
            lattices: [hex(), hex(), hex()],
        },
        2 => TorusModel {
            name: "T6_2".into(),
            lattices: [sq(), sq(), sq()],
        },
        3 => TorusModel {
            name: "T6_3".into(),
            lattices: [half(), sq(), sq()],
        },
        _ => panic!("unknown torus model {}", k),
    }
}

/// Complex rotation (u z1, u z2, u^-2 z3) with u = zeta_a.
pub fn rotation(a: u32) -> SesquilinearAffineMap {
    let u = Cyc::zeta(a);
    let mut m = zero_mat();
    m[0][0] = u.clone();
    m[1][1] = u.clone();
    m[2][2] = u.pow(-2);
    SesquilinearAffineMap {
        a: m,
        b: zero_mat(),
        t: zero_t(),
    }
}

/// (z1, z2 - z1, z3)
pub fn shear() -> SesquilinearAffineMap {
    let mut m = zero_mat();
    m[0][0] = Cyc::one();
    m[1][0] = Cyc::one().neg();
    m[1][1] = Cyc::one();
    m[2][2] = Cyc::one();
    SesquilinearAffineMap {
        a: m,
        b: zero_mat(),
        t: zero_t(),
    }
}

/// (-z1, -z2, z3)
pub fn xi() -> SesquilinearAffineMap {
    let mut m = zero_mat();
    m[0][0] = Cyc::from_int(-1);
    m[1][1] = Cyc::from_int(-1);
    m[2][2] = Cyc::one();
    SesquilinearAffineMap {
        a: m,
        b: zero_mat(),
        t: zero_t(),
    }
}

/// (-zbar1, zbar2 + zbar1, -zbar3)
pub fn eta() -> SesquilinearAffineMap {
    let mut m = zero_mat();
    m[0][0] = Cyc::from_int(-1);
    m[1][0] = Cyc::one();
    m[1][1] = Cyc::one();
    m[2][2] = Cyc::from_int(-1);
    SesquilinearAffineMap {
        a: zero_mat(),
        b: m,
        t: zero_t(),
    }
}

/// (-z1, -z2, z3 + 1/2)
pub fn zeta1() -> SesquilinearAffineMap {
    let mut s = xi();
    s.t[4] = rat(1, 2);
    s
}

/// (-z1, -z2, z3 + i/2)
pub fn zeta2() -> SesquilinearAffineMap {
    let mut s = xi();
    s.t[5] = rat(1, 2);
    s
}

pub fn identity_map() -> SesquilinearAffineMap {
    let mut m = zero_mat();
    m[0][0] = Cyc::one();
    m[1][1] = Cyc::one();
    m[2][2] = Cyc::one();
    SesquilinearAffineMap {
        a: m,
        b: zero_mat(),
        t: zero_t(),
    }
}

/// outer o inner; the inner map must have no translation part.
pub fn compose(
    outer: &SesquilinearAffineMap,
    inner: &SesquilinearAffineMap,
) -> SesquilinearAffineMap {
    assert!(
        inner.t.iter().all(|x| x.is_zero()),
        "compose: inner translation unsupported"
    );
    let mut a = zero_mat();
    let mut b = zero_mat();
    for p in 0..3 {
        for q in 0..3 {
            let mut av = Cyc::zero();
            let mut bv = Cyc::zero();
            for r in 0..3 {
                av = av.add(&outer.a[p][r].mul(&inner.a[r][q]));
                av = av.add(&outer.b[p][r].mul(&inner.b[r][q].conj()));
                bv = bv.add(&outer.a[p][r].mul(&inner.b[r][q]));
                bv = bv.add(&outer.b[p][r].mul(&inner.a[r][q].conj()));
            }
            a[p][q] = av;
            b[p][q] = bv;
        }
    }
    SesquilinearAffineMap {
        a,
        b,
        t: outer.t.clone(),
    }
}

/// The mapping diffeomorphism: shear composed with the order-a rotation.
/// The same complex formula descends to each torus model, so k is unused
/// beyond documentation.
pub fn monodromy(_k: u32, a: u32) -> SesquilinearAffineMap {
    compose(&shear(), &rotation(a))
}
