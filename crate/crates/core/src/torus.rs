//! Flat 6-tori with complex structure, their affine self-maps, fixed loci,
//! and connected components of fixed loci inside mapping tori.

use crate::linalg::{on_subtorus, reduce_mod_1, solve_congruence, IntMat};
use crate::scalar::{Cyc, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

/// Z-basis of a lattice in C, components in a cyclotomic field.
#[derive(Clone, Debug)]
pub struct ComplexLattice {
    pub v1: Cyc,
    pub v2: Cyc,
}

#[derive(Clone, Debug)]
pub struct TorusModel {
    pub name: String,
    pub lattices: [ComplexLattice; 3],
}

impl TorusModel {
    pub fn complexifier(&self) -> crate::forms::Complexifier {
        crate::forms::Complexifier {
            v1: [
                self.lattices[0].v1.clone(),
                self.lattices[1].v1.clone(),
                self.lattices[2].v1.clone(),
            ],
            v2: [
                self.lattices[0].v2.clone(),
                self.lattices[1].v2.clone(),
                self.lattices[2].v2.clone(),
            ],
        }
    }
}

/// z |-> A z + B zbar + translation, translation in lattice coordinates.
#[derive(Clone, Debug)]
pub struct SesquilinearAffineMap {
    pub a: [[Cyc; 3]; 3],
    pub b: [[Cyc; 3]; 3],
    pub t: [Rat; 6],
}

impl SesquilinearAffineMap {
    pub fn pullback(&self) -> crate::forms::FormPullback {
        crate::forms::FormPullback::new(&self.a, &self.b)
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.a.iter().flatten().all(|c| c.is_zero())
    }

    /// Apply to a complex point (components in the cyclotomic field).
    pub fn apply_complex(&self, z: &[Cyc; 3]) -> [Cyc; 3] {
        let mut out = [Cyc::zero(), Cyc::zero(), Cyc::zero()];
        for p in 0..3 {
            let mut acc = Cyc::zero();
            for q in 0..3 {
                acc = acc.add(&self.a[p][q].mul(&z[q]));
                acc = acc.add(&self.b[p][q].mul(&z[q].conj()));
            }
            out[p] = acc;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorusMapError {
    NonIntegral,
    CommutationFailure,
    NotInvariant,
}

impl fmt::Display for TorusMapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorusMapError::NonIntegral => write!(f, "map does not preserve the lattice"),
            TorusMapError::CommutationFailure => {
                write!(f, "commutation precondition with the monodromy fails")
            }
            TorusMapError::NotInvariant => write!(f, "map does not permute the components"),
        }
    }
}

/// x |-> M x + t on the 6-torus in lattice coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RealAffineMap {
    pub m: IntMat,
    pub t: Vec<Rat>,
}

impl RealAffineMap {
    pub fn identity(n: usize) -> RealAffineMap {
        RealAffineMap {
            m: IntMat::identity(n),
            t: vec![Rat::zero(); n],
        }
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        self.m
            .mul_rat_vec(x)
            .iter()
            .zip(self.t.iter())
            .map(|(a, b)| reduce_mod_1(&(a + b)))
            .collect()
    }

    /// self after other: (self o other)(x) = M_s (M_o x + t_o) + t_s.
    pub fn compose(&self, other: &RealAffineMap) -> RealAffineMap {
        let m = self.m.mul(&other.m);
        let mt = self.m.mul_rat_vec(&other.t);
        let t = mt
            .iter()
            .zip(self.t.iter())
            .map(|(a, b)| reduce_mod_1(&(a + b)))
            .collect();
        RealAffineMap { m, t }
    }

    pub fn inverse(&self) -> RealAffineMap {
        // integer matrix with det +-1
        let n = self.m.rows;
        let rat = self.m.to_rat();
        let mut inv = crate::linalg::Mat::<Rat>::zero(n, n);
        for j in 0..n {
            let mut e = vec![Rat::zero(); n];
            e[j] = Rat::from(BigInt::from(1));
            let col = rat.solve(&e).expect("singular lattice map");
            for i in 0..n {
                inv.set(i, j, col[i].clone());
            }
        }
        let mut mi = IntMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = inv.at(i, j);
                assert!(v.is_integer(), "inverse not integral");
                mi.set(i, j, v.numer().clone());
            }
        }
        let ti = mi.mul_rat_vec(&self.t);
        RealAffineMap {
            m: mi,
            t: ti.iter().map(|x| reduce_mod_1(&-x)).collect(),
        }
    }

    pub fn eq_mod_lattice(&self, other: &RealAffineMap) -> bool {
        if self.m != other.m {
            return false;
        }
        self.t
            .iter()
            .zip(other.t.iter())
            .all(|(a, b)| (a - b).is_integer())
    }
}

/// Express a complex number as an integral combination of two lattice generators.
fn lattice_coords(c: &Cyc, v1: &Cyc, v2: &Cyc) -> Option<(BigInt, BigInt)> {
    // [Re v1, Re v2; Im v1, Im v2] (alpha, beta) = (Re c, Im c)
    let det = v1.mul(&v2.conj()).sub(&v2.mul(&v1.conj())); // = -2i * (Re v1 Im v2 - Re v2 Im v1) .. compute directly
    let dinv = det.inv()?;
    // alpha = (c v2bar - cbar v2)/det, beta = (v1 cbar - v1bar c)/det
    let alpha = c.mul(&v2.conj()).sub(&c.conj().mul(v2)).mul(&dinv);
    let beta = v1.mul(&c.conj()).sub(&v1.conj().mul(c)).mul(&dinv);
    let ar = alpha.as_rat()?;
    let br = beta.as_rat()?;
    if ar.is_integer() && br.is_integer() {
        Some((ar.numer().clone(), br.numer().clone()))
    } else {
        None
    }
}

/// Lattice-coordinate avatar of a sesquilinear affine map.
pub fn realify(
    map: &SesquilinearAffineMap,
    torus: &TorusModel,
) -> Result<RealAffineMap, TorusMapError> {
    let mut m = IntMat::zero(6, 6);
    for q in 0..3 {
        let gens = [
            torus.lattices[q].v1.clone(),
            torus.lattices[q].v2.clone(),
        ];
        for (gi, g) in gens.iter().enumerate() {
            // image of the real vector g e_q
            for p in 0..3 {
                let img = map.a[p][q].mul(g).add(&map.b[p][q].mul(&g.conj()));
                if img.is_zero() {
                    continue;
                }
                let (al, be) = lattice_coords(&img, &torus.lattices[p].v1, &torus.lattices[p].v2)
                    .ok_or(TorusMapError::NonIntegral)?;
                m.set(2 * p, 2 * q + gi, al);
                m.set(2 * p + 1, 2 * q + gi, be);
            }
        }
    }
    Ok(RealAffineMap {
        m,
        t: map.t.iter().map(reduce_mod_1).collect(),
    })
}

/// Connected affine subtorus of the 6-torus.
#[derive(Clone, Debug)]
pub struct AffineSubtorus {
    pub basepoint: Vec<Rat>,
    pub directions: IntMat,
    pub orientation: Option<Vec<Vec<Rat>>>,
}

impl AffineSubtorus {
    pub fn dim(&self) -> usize {
        self.directions.cols
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        on_subtorus(&self.basepoint, &self.directions, x)
    }
}

/// Connected components of the fixed-point set {x : g(x) = x}.
pub fn fixed_locus(g: &RealAffineMap) -> Vec<AffineSubtorus> {
    let n = g.m.rows;
    let mi = g.m.sub(&IntMat::identity(n));
    let t: Vec<Rat> = g.t.iter().map(|x| -x).collect();
    match solve_congruence(&mi, &t) {
        None => vec![],
        Some(fam) => fam
            .basepoints
            .iter()
            .map(|b| AffineSubtorus {
                basepoint: b.clone(),
                directions: fam.directions.clone(),
                orientation: None,
            })
            .collect(),
    }
}

/// Fiber type of a fixed component inside a mapping torus.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberKind {
    /// component contained in a level set {t0} x N: a flat subtorus
    LevelTorus { level: Rat },
    /// component sweeping the t-direction: mapping torus of the s-th return map
    ReturnMapTorus { windings: usize, return_map: IntMat, is_torus: bool },
}

/// One connected component of a fixed locus inside the mapping torus.
#[derive(Clone, Debug)]
pub struct FixedComponent {
    pub id: String,
    pub fiber: FiberKind,
    /// for level components: the subtorus; for sweeping components: the fiber
    /// subtori in orbit order (basepoints of the t = 0, 1, ..., s-1 slices)
    pub pieces: Vec<AffineSubtorus>,
    pub genus: usize,
}

impl FixedComponent {
    pub fn dim(&self) -> usize {
        match &self.fiber {
            FiberKind::LevelTorus { .. } => self.pieces[0].dim(),
            FiberKind::ReturnMapTorus { .. } => self.pieces[0].dim() + 1,
        }
    }
}

pub enum SymmetryKind {
    /// commutes with the monodromy: [t, p] -> [t, g(p)]
    Commuting,
    /// reverses the circle direction: [t, p] -> [1 - t, g(p)]
    Reversing,
}

/// Connected components of Fix(iota) or Fix(kappa) in the mapping torus of F.
///
/// For a commuting generator the components of Fix(g) in the fiber are grouped
/// into orbits of the monodromy; an orbit of length s becomes one component,
/// the mapping torus of the s-th return map. For a reversing generator the
/// components sit in the level sets t = 0 (from Fix(g o F)) and t = 1/2
/// (from Fix(g)).
pub fn mapping_torus_fixed_components(
    kind: SymmetryKind,
    inner: &SesquilinearAffineMap,
    monodromy: &SesquilinearAffineMap,
    torus: &TorusModel,
) -> Result<Vec<FixedComponent>, TorusMapError> {
    let g = realify(inner, torus)?;
    let f = realify(monodromy, torus)?;
    match kind {
        SymmetryKind::Commuting => {
            if !g.compose(&f).eq_mod_lattice(&f.compose(&g)) {
                return Err(TorusMapError::CommutationFailure);
            }
            let fix = fixed_locus(&g);
            // orbits of the components under x -> F^{-1}(x)
            let finv = f.inverse();
            let mut used = vec![false; fix.len()];
            let mut comps = vec![];
            let locate = |x: &[Rat], fix: &[AffineSubtorus]| -> usize {
                for (i, c) in fix.iter().enumerate() {
                    if c.contains(x) {
                        return i;
                    }
                }
                panic!("fixed locus not closed under the monodromy");
            };
            for start in 0..fix.len() {
                if used[start] {
                    continue;
                }
                let mut orbit = vec![start];
                used[start] = true;
                let mut cur = finv.apply(&fix[start].basepoint);
                loop {
                    let idx = locate(&cur, &fix);
                    if idx == start {
                        break;
                    }
                    used[idx] = true;
                    orbit.push(idx);
                    cur = finv.apply(&cur);
                }
                let s = orbit.len();
                // return map = F^s restricted to the subtorus, in its direction basis
                let mut fs = RealAffineMap::identity(6);
                for _ in 0..s {
                    fs = f.compose(&fs);
                }
                let dirs = &fix[start].directions;
                let image = fs.m.mul(dirs);
                // solve dirs * R = image
                let d = dirs.cols;
                let mut r = IntMat::zero(d, d);
                let dr = dirs.to_rat();
                for j in 0..d {
                    let col: Vec<Rat> = (0..6).map(|i| Rat::from(image.at(i, j).clone())).collect();
                    let sol = dr.solve(&col).expect("return map leaves the fiber");
                    for i in 0..d {
                        assert!(sol[i].is_integer());
                        r.set(i, j, sol[i].numer().clone());
                    }
                }
                let is_torus = r == IntMat::identity(d);
                comps.push(FixedComponent {
                    id: format!("C{}", comps.len() + 1),
                    fiber: FiberKind::ReturnMapTorus {
                        windings: s,
                        return_map: r,
                        is_torus,
                    },
                    pieces: orbit.iter().map(|&i| fix[i].clone()).collect(),
                    genus: 1,
                });
            }
            Ok(comps)
        }
        SymmetryKind::Reversing => {
            let finv = realify(monodromy, torus)?.inverse();
            if !g.compose(&f).eq_mod_lattice(&finv.compose(&g)) {
                return Err(TorusMapError::CommutationFailure);
            }
            let mut comps = vec![];
            let at_zero = fixed_locus(&g.compose(&f));
            for c in at_zero {
                comps.push(FixedComponent {
                    id: format!("N{}", comps.len() + 1),
                    fiber: FiberKind::LevelTorus { level: Rat::zero() },
                    pieces: vec![c],
                    genus: 1,
                });
            }
            let at_half = fixed_locus(&g);
            for c in at_half {
                comps.push(FixedComponent {
                    id: format!("N{}", comps.len() + 1),
                    fiber: FiberKind::LevelTorus {
                        level: crate::scalar::rat(1, 2),
                    },
                    pieces: vec![c],
                    genus: 1,
                });
            }
            Ok(comps)
        }
    }
}

/// How a symmetry permutes a list of fixed components.
#[derive(Clone, Debug)]
pub struct ComponentPermutation {
    /// image index per component
    pub perm: Vec<usize>,
    /// for fixed components of a reversing symmetry: the circle direction is reversed
    pub reverses_theta: Vec<bool>,
}

impl ComponentPermutation {
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = vec![];
        for s in 0..self.perm.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut cur = self.perm[s];
            while cur != s {
                seen[cur] = true;
                c.push(cur);
                cur = self.perm[cur];
            }
            out.push(c);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Action of a symmetry on the components of a fixed locus. `reversing`
/// records whether the symmetry reverses the mapping-torus circle.
pub fn symmetry_on_components(
    sym: &SesquilinearAffineMap,
    torus: &TorusModel,
    comps: &[FixedComponent],
    reversing: bool,
) -> Result<ComponentPermutation, TorusMapError> {
    let s = realify(sym, torus)?;
    let mut perm = vec![usize::MAX; comps.len()];
    for (i, c) in comps.iter().enumerate() {
        let img = s.apply(&c.pieces[0].basepoint);
        let mut tgt = None;
        for (j, c2) in comps.iter().enumerate() {
            if c2.pieces.iter().any(|p| p.contains(&img)) {
                tgt = Some(j);
                break;
            }
        }
        perm[i] = tgt.ok_or(TorusMapError::NotInvariant)?;
    }
    let reverses = comps
        .iter()
        .enumerate()
        .map(|(i, _)| reversing && perm[i] == i)
        .collect();
    Ok(ComponentPermutation {
        perm,
        reverses_theta: reverses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::maps;
    use crate::scalar::{rat, rint};

    #[test]
    fn realify_xi_on_t2() {
        let torus = maps::torus_model(2);
        let xi = maps::xi();
        let r = realify(&xi, &torus).unwrap();
        let expect = IntMat::from_rows_i64(&[
            vec![-1, 0, 0, 0, 0, 0],
            vec![0, -1, 0, 0, 0, 0],
            vec![0, 0, -1, 0, 0, 0],
            vec![0, 0, 0, -1, 0, 0],
            vec![0, 0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 0, 1],
        ]);
        assert_eq!(r.m, expect);
        assert!(r.t.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn realify_r4_on_t2() {
        let torus = maps::torus_model(2);
        let r4 = maps::rotation(4);
        let r = realify(&r4, &torus).unwrap();
        let expect = IntMat::from_rows_i64(&[
            vec![0, -1, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0, 0],
            vec![0, 0, 0, -1, 0, 0],
            vec![0, 0, 1, 0, 0, 0],
            vec![0, 0, 0, 0, -1, 0],
            vec![0, 0, 0, 0, 0, -1],
        ]);
        assert_eq!(r.m, expect);
    }

    #[test]
    fn realify_f_on_t2() {
        let torus = maps::torus_model(2);
        let f = maps::shear();
        let r = realify(&f, &torus).unwrap();
        let mut expect = IntMat::identity(6);
        expect.set(2, 0, BigInt::from(-1));
        expect.set(3, 1, BigInt::from(-1));
        assert_eq!(r.m, expect);
    }

    #[test]
    fn realify_is_functorial() {
        let torus = maps::torus_model(2);
        let f = maps::monodromy(2, 4);
        let eta = maps::eta();
        let a = realify(&maps::compose(&f, &eta), &torus).unwrap();
        let b = realify(&f, &torus).unwrap().compose(&realify(&eta, &torus).unwrap());
        assert!(a.eq_mod_lattice(&b));
    }

    #[test]
    fn fixed_locus_examples() {
        let torus = maps::torus_model(2);
        // eta_2: two 3-dimensional components
        let eta = realify(&maps::eta(), &torus).unwrap();
        let fix = fixed_locus(&eta);
        assert_eq!(fix.len(), 2);
        assert!(fix.iter().all(|c| c.dim() == 3));
        // xi_2: 16 two-dimensional components
        let xi = realify(&maps::xi(), &torus).unwrap();
        let fix = fixed_locus(&xi);
        assert_eq!(fix.len(), 16);
        assert!(fix.iter().all(|c| c.dim() == 2));
        // translation by 1/2 in x3: empty
        let tr = RealAffineMap {
            m: IntMat::identity(6),
            t: vec![
                rint(0),
                rint(0),
                rint(0),
                rint(0),
                rat(1, 2),
                rint(0),
            ],
        };
        assert!(fixed_locus(&tr).is_empty());
    }

    #[test]
    fn iota_components() {
        // (xi_1, F_{1,3}): 4 components, one a genuine mapping torus
        let torus = maps::torus_model(1);
        let comps = mapping_torus_fixed_components(
            SymmetryKind::Commuting,
            &maps::xi(),
            &maps::monodromy(1, 3),
            &torus,
        )
        .unwrap();
        assert_eq!(comps.len(), 4);
        let nontorus: Vec<_> = comps
            .iter()
            .filter(|c| matches!(&c.fiber, FiberKind::ReturnMapTorus { is_torus: false, .. }))
            .collect();
        assert_eq!(nontorus.len(), 1);
        let mut windings: Vec<usize> = comps
            .iter()
            .map(|c| match &c.fiber {
                FiberKind::ReturnMapTorus { windings, .. } => *windings,
                _ => 0,
            })
            .collect();
        windings.sort();
        assert_eq!(windings, vec![1, 3, 6, 6]);

        // (xi_2, F_{2,4}): 10 components, 4 mapping tori of -Id
        let torus = maps::torus_model(2);
        let comps = mapping_torus_fixed_components(
            SymmetryKind::Commuting,
            &maps::xi(),
            &maps::monodromy(2, 4),
            &torus,
        )
        .unwrap();
        assert_eq!(comps.len(), 10);
        let minus_id: Vec<_> = comps
            .iter()
            .filter(|c| match &c.fiber {
                FiberKind::ReturnMapTorus {
                    return_map,
                    is_torus: false,
                    ..
                } => *return_map == IntMat::from_rows_i64(&[vec![-1, 0], vec![0, -1]]),
                _ => false,
            })
            .collect();
        assert_eq!(minus_id.len(), 4);

        // (eta_2, F_{2,4}): 4 level components, two at t=0 and two at t=1/2
        let comps = mapping_torus_fixed_components(
            SymmetryKind::Reversing,
            &maps::eta(),
            &maps::monodromy(2, 4),
            &torus,
        )
        .unwrap();
        assert_eq!(comps.len(), 4);
        let zeros = comps
            .iter()
            .filter(|c| matches!(&c.fiber, FiberKind::LevelTorus { level } if level.is_zero()))
            .count();
        assert_eq!(zeros, 2);
        assert!(comps.iter().all(|c| c.dim() == 3));
    }

    #[test]
    fn kappa_permutes_iota_components() {
        use num_traits::Zero;
        // on M_{2,4}: kappa fixes the four half-lattice components listed first by the
        // catalog order and swaps the rest in three 2-cycles
        let torus = maps::torus_model(2);
        let comps = crate::catalog::iota_components(2, 4);
        let p = symmetry_on_components(&maps::eta(), &torus, &comps, true).unwrap();
        let mut cycles: Vec<Vec<usize>> = p.cycles().into_iter().filter(|c| c.len() > 1).collect();
        cycles.sort();
        assert_eq!(cycles, vec![vec![4, 7], vec![5, 8], vec![6, 9]]);
        for j in 0..4 {
            assert_eq!(p.perm[j], j);
        }

        // on M_{1,a}: identity permutation
        let torus = maps::torus_model(1);
        let comps = crate::catalog::iota_components(1, 3);
        let p = symmetry_on_components(&maps::eta(), &torus, &comps, true).unwrap();
        assert!(p.is_identity());

        // identity map: identity permutation
        let idmap = maps::identity_map();
        let p = symmetry_on_components(&idmap, &torus, &comps, false).unwrap();
        assert!(p.is_identity());
    }
}
