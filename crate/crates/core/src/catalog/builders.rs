//! Assembly of the catalog entries: mapping tori, one-step resolutions of the
//! circle-reversing quotients, and two-step resolutions through the
//! commuting quotient.

use super::maps;
use crate::algebra::{
    build_resolution, invariant_flat_base_with_vectors, AlgebraBase, Cls, CompModel, Component,
    InvolutionData, MtBase, ResolvedAlgebra,
};
use crate::forms::{CForm, Mono, RForm};
use crate::linalg::{IntMat, Mat};
use crate::mtc::MappingTorus;
use crate::scalar::{rat, Cyc, Rat};
use crate::torus::{
    mapping_torus_fixed_components, realify, symmetry_on_components, FiberKind, FixedComponent,
    SymmetryKind,
};
use num_traits::Zero;

pub fn mapping_torus(k: u32, a: u32) -> MappingTorus {
    MappingTorus::new(
        &format!("M_{}_{}", k, a),
        maps::torus_model(k),
        maps::monodromy(k, a),
    )
}

/// Orient 3 direction columns so the calibration form is positive on them.
fn orient_level_dirs(mt: &MappingTorus, dirs: &mut IntMat) {
    let cx = mt.torus.complexifier();
    let psi = cx.to_lattice(&CForm::monomial(Mono { zi: 7, zb: 0 }).real_part());
    let r = restrict_top3(&psi, dirs);
    assert!(!r.is_zero(), "calibration degenerate on a level component");
    if r.sign() < 0 {
        swap_cols(dirs, 0, 1);
    }
}

/// Orient 2 fiber columns so the fiber area form is positive on them.
fn orient_fiber_dirs(mt: &MappingTorus, dirs: &mut IntMat) {
    let cx = mt.torus.complexifier();
    let area = cx.to_lattice(
        &CForm::monomial(Mono { zi: 4, zb: 4 }).scale(&Cyc::i().scale(&rat(1, 2))),
    );
    let r = restrict_top2(&area, dirs);
    assert!(!r.is_zero(), "fiber area degenerate");
    if r.sign() < 0 {
        swap_cols(dirs, 0, 1);
    }
}

fn swap_cols(m: &mut IntMat, a: usize, b: usize) {
    for i in 0..m.rows {
        let x = m.at(i, a).clone();
        let y = m.at(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn restrict_top3(f: &RForm, dirs: &IntMat) -> Cyc {
    // coefficient of the full 3-subset of a 6x3 restriction
    let v = crate::catalog::builders::restrict_coeffs(f, dirs);
    v.last().cloned().unwrap_or_else(Cyc::zero)
}

fn restrict_top2(f: &RForm, dirs: &IntMat) -> Cyc {
    let v = restrict_coeffs(f, dirs);
    v.last().cloned().unwrap_or_else(Cyc::zero)
}

pub(crate) fn restrict_coeffs(f: &RForm, dirs: &IntMat) -> Vec<Cyc> {
    // minor-determinant pullback, top coefficient last (subsets are ordered)
    use crate::forms::{lattice_monos, subsets};
    let d = dirs.cols;
    let deg = f.deg;
    let target = subsets(d, deg);
    let source = lattice_monos(deg);
    let mut out = vec![Cyc::zero(); target.len()];
    for (ti, t) in target.iter().enumerate() {
        let tcols: Vec<usize> = (0..d).filter(|k| t & (1 << k) != 0).collect();
        for (si, s) in source.iter().enumerate() {
            if f.coeffs[si].is_zero() {
                continue;
            }
            let srows: Vec<usize> = (0..6).filter(|k| s & (1 << k) != 0).collect();
            let det = minor3(dirs, &srows, &tcols);
            if !det.is_zero() {
                out[ti] = out[ti].add(&f.coeffs[si].scale(&Rat::from(det)));
            }
        }
    }
    out
}

fn minor3(m: &IntMat, rows: &[usize], cols: &[usize]) -> num_bigint::BigInt {
    use num_bigint::BigInt;
    use num_traits::One;
    match rows.len() {
        0 => BigInt::one(),
        1 => m.at(rows[0], cols[0]).clone(),
        2 => {
            m.at(rows[0], cols[0]) * m.at(rows[1], cols[1])
                - m.at(rows[0], cols[1]) * m.at(rows[1], cols[0])
        }
        3 => {
            let a = |i: usize, j: usize| m.at(rows[i], cols[j]);
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        _ => unreachable!(),
    }
}

/// Level components of the reversing fixed locus of `inner` on the mapping
/// torus, ordered by (level, basepoint).
fn level_components(
    mt: &MappingTorus,
    inner: &crate::torus::SesquilinearAffineMap,
    id_prefix: &str,
    start: usize,
    cover_degree: u32,
) -> Vec<Component> {
    let comps = mapping_torus_fixed_components(
        SymmetryKind::Reversing,
        inner,
        &mt.monodromy,
        &mt.torus,
    )
    .expect("reversing locus");
    let mut out = vec![];
    for (i, c) in comps.iter().enumerate() {
        let FiberKind::LevelTorus { level } = &c.fiber else {
            panic!("expected level components")
        };
        let piece = &c.pieces[0];
        let mut dirs = piece.directions.clone();
        assert_eq!(dirs.cols, 3, "reversing locus component not 3-dimensional");
        orient_level_dirs(mt, &mut dirs);
        out.push(Component {
            id: format!("{}{}", id_prefix, start + i),
            model: CompModel::Level {
                level: level.clone(),
                base: piece.basepoint.clone(),
                dirs,
                quot: None,
            },
            genus: 1,
            cover_degree,
            theta_sign: 1,
            kappa_partner: usize::MAX,
            pd: vec![],
            volume: Cyc::zero(),
            y_symbol: format!("y{}", start + i),
        });
    }
    out
}

/// X^1_{k,a}: the mapping torus divided by the circle-reversing involution,
/// resolved along its fixed locus.
pub fn x1_algebra(k: u32, a: u32) -> ResolvedAlgebra {
    let name = format!("X1_{}_{}", k, a);
    let mt = mapping_torus(k, a);
    let base = MtBase::new(
        &name,
        mapping_torus(k, a),
        &[(maps::eta(), true, "kappa".into())],
        2,
    );
    let comps = level_components(&mt, &maps::eta(), "N", 1, 1);
    let mut comps = comps;
    for (i, c) in comps.iter_mut().enumerate() {
        c.kappa_partner = i;
    }
    build_resolution(&name, AlgebraBase::Mt(base), comps).expect("x1 build")
}

/// Z_{k,4}: the quotient by the reversing involution together with the two
/// commuting half-translations; components are orbit classes of the upstairs
/// pieces, double-covered by them.
pub fn z_algebra(k: u32) -> ResolvedAlgebra {
    let name = format!("Z_{}_4", k);
    let mt = mapping_torus(k, 4);
    let base = MtBase::new(
        &name,
        mapping_torus(k, 4),
        &[
            (maps::eta(), true, "kappa".into()),
            (maps::zeta1(), false, "j1".into()),
            (maps::zeta2(), false, "j2".into()),
        ],
        8,
    );
    // upstairs pieces: Fix(kappa), Fix(j1 kappa) and Fix(j2 kappa)
    let fam_kappa = level_components(&mt, &maps::eta(), "K", 0, 2);
    let fam_j1 = level_components(&mt, &maps::compose(&maps::zeta1(), &maps::eta()), "A", 0, 2);
    let fam_j2 = level_components(&mt, &maps::compose(&maps::zeta2(), &maps::eta()), "B", 0, 2);
    let mut pieces: Vec<Component> = vec![];
    pieces.extend(fam_kappa);
    pieces.extend(fam_j1);
    pieces.extend(fam_j2);
    // group into <j1, j2> orbits
    let j1 = realify(&maps::zeta1(), &mt.torus).unwrap();
    let j2 = realify(&maps::zeta2(), &mt.torus).unwrap();
    let contains = |c: &Component, x: &[Rat]| -> bool {
        let CompModel::Level { base, dirs, .. } = &c.model else {
            unreachable!()
        };
        crate::linalg::on_subtorus(base, dirs, x)
    };
    let level_of = |c: &Component| -> Rat {
        let CompModel::Level { level, .. } = &c.model else {
            unreachable!()
        };
        level.clone()
    };
    let base_of = |c: &Component| -> Vec<Rat> {
        let CompModel::Level { base, .. } = &c.model else {
            unreachable!()
        };
        base.clone()
    };
    let mut used = vec![false; pieces.len()];
    let mut groups: Vec<Vec<usize>> = vec![];
    for i in 0..pieces.len() {
        if used[i] {
            continue;
        }
        let mut orbit = vec![i];
        used[i] = true;
        for g in [&j1, &j2] {
            let mut new_points = vec![];
            for &idx in &orbit {
                new_points.push(g.apply(&base_of(&pieces[idx])));
            }
            for p in new_points {
                for j in 0..pieces.len() {
                    if !used[j]
                        && level_of(&pieces[j]) == level_of(&pieces[i])
                        && contains(&pieces[j], &p)
                    {
                        used[j] = true;
                        orbit.push(j);
                    }
                }
            }
        }
        groups.push(orbit);
    }
    // order groups by (level, family order); the representative is the first piece
    groups.sort_by_key(|g| {
        let lv = level_of(&pieces[g[0]]);
        let fam = pieces[g[0]].id.chars().next().unwrap();
        let fam_rank = match fam {
            'K' => 0,
            'A' => 1,
            'B' => 2,
            _ => 3,
        };
        (lv, fam_rank)
    });
    let mut comps = vec![];
    for (gi, g) in groups.iter().enumerate() {
        let mut c = pieces[g[0]].clone();
        c.id = format!("N{}", gi + 1);
        c.kappa_partner = gi;
        c.y_symbol = format!("y{}", gi + 1);
        // the deck transformation stabilizing this piece acts freely on it;
        // the downstairs component carries the invariant cohomology
        let CompModel::Level {
            base: pb,
            dirs,
            level,
            ..
        } = &c.model
        else {
            unreachable!()
        };
        let j12 = j1.compose(&j2);
        let mut quot = None;
        for g in [&j1, &j2, &j12] {
            if crate::linalg::on_subtorus(pb, dirs, &g.apply(pb)) {
                // solve dirs * q = M_g * dirs
                let image = g.m.mul(dirs);
                let dr = dirs.to_rat();
                let mut q = IntMat::zero(3, 3);
                for jj in 0..3 {
                    let col: Vec<Rat> =
                        (0..6).map(|i| Rat::from(image.at(i, jj).clone())).collect();
                    let sol = dr.solve(&col).expect("stabilizer does not preserve piece");
                    for ii in 0..3 {
                        assert!(sol[ii].is_integer());
                        q.set(ii, jj, sol[ii].numer().clone());
                    }
                }
                quot = Some(q);
                break;
            }
        }
        let quot = Some(quot.expect("no stabilizing deck transformation found"));
        c.model = CompModel::Level {
            level: level.clone(),
            base: pb.clone(),
            dirs: dirs.clone(),
            quot,
        };
        comps.push(c);
    }
    build_resolution(&name, AlgebraBase::Mt(base), comps).expect("z build")
}

/// Sweep components of the commuting fixed locus, with catalog ordering and
/// the reversing-symmetry bookkeeping (partner and theta sign).
pub fn iota_sweep_components(k: u32, a: u32) -> Vec<Component> {
    let mt = mapping_torus(k, a);
    let fixed: Vec<FixedComponent> = super::iota_components(k, a);
    let perm = symmetry_on_components(&maps::eta(), &mt.torus, &fixed, true).expect("kappa acts");
    let f_real = &mt.f_real;
    let mut out = vec![];
    for (i, c) in fixed.iter().enumerate() {
        let FiberKind::ReturnMapTorus { windings, .. } = &c.fiber else {
            panic!("expected sweep components")
        };
        let piece = &c.pieces[0];
        let mut dirs = piece.directions.clone();
        assert_eq!(dirs.cols, 2);
        orient_fiber_dirs(&mt, &mut dirs);
        // return map in the oriented fiber basis: dirs * R = F^s * dirs
        let mut fs = crate::torus::RealAffineMap::identity(6);
        for _ in 0..*windings {
            fs = f_real.compose(&fs);
        }
        let image = fs.m.mul(&dirs);
        let dr = dirs.to_rat();
        let mut r = IntMat::zero(2, 2);
        for j in 0..2 {
            let col: Vec<Rat> = (0..6).map(|i| Rat::from(image.at(i, j).clone())).collect();
            let sol = dr.solve(&col).expect("return map");
            for i2 in 0..2 {
                assert!(sol[i2].is_integer());
                r.set(i2, j, sol[i2].numer().clone());
            }
        }
        out.push(Component {
            id: format!("L{}", i + 1),
            model: CompModel::Sweep {
                windings: *windings,
                fiber_base: piece.basepoint.clone(),
                fiber_dirs: dirs,
                return_map: r,
            },
            genus: 1,
            cover_degree: 1,
            theta_sign: if perm.perm[i] == i { -1 } else { 1 },
            kappa_partner: perm.perm[i],
            pd: vec![],
            volume: Cyc::zero(),
            y_symbol: format!("yl{}", i + 1),
        });
    }
    out
}

/// Ytilde_{k,a}: the resolution of the quotient by the commuting involution.
pub fn y_algebra(k: u32, a: u32) -> ResolvedAlgebra {
    let name = format!("Y_{}_{}", k, a);
    let base = MtBase::new(
        &name,
        mapping_torus(k, a),
        &[(maps::xi(), false, "iota".into())],
        2,
    );
    let comps = iota_sweep_components(k, a);
    build_resolution(&name, AlgebraBase::Mt(base), comps).expect("y build")
}

pub struct TwoStep {
    pub algebra: ResolvedAlgebra,
    /// p1 of the first stage in the flat-base coordinates
    pub p1_base: Vec<Cyc>,
    /// first-stage algebra (kept for reporting)
    pub first: ResolvedAlgebra,
}

/// X^2_{k,a}: resolve the commuting quotient, then divide by the lifted
/// reversing involution and resolve its genus-3 fixed locus.
pub fn x2_algebra(k: u32, a: u32) -> TwoStep {
    let name = format!("X2_{}_{}", k, a);
    let first = y_algebra(k, a);
    let perm: Vec<usize> = first.comps.iter().map(|c| c.kappa_partner).collect();
    let sigma: Vec<i32> = first.comps.iter().map(|c| c.theta_sign).collect();
    let data = InvolutionData {
        map: maps::eta(),
        reversing: true,
        perm,
        sigma,
    };
    let action = first.involution_action(&data);
    let (flat, vectors) = invariant_flat_base_with_vectors(&first, &name, &action);
    // p1 of the first stage, expressed in the invariant basis
    let zero4 = vec![Cyc::zero(); first.base.dims()[4]];
    let p1_first = first.pontryagin(&zero4);
    let p1_flat = Mat::from_cols(vectors[4].clone())
        .solve(&first.flatten(&p1_first))
        .expect("p1 not invariant");
    // second-stage components: genus-3 surfaces times a circle
    let (count, volume) = match k {
        1 => (2usize, Cyc::from_int(3)),
        2 => (4usize, Cyc::from_int(2)),
        _ => panic!("no two-step entry for k = {}", k),
    };
    // Poincare duals from the level-set pairing, expressed in flat H^4:
    // k=1: PD[K_p] = -8/sqrt3 ds(Im[dz123]);
    // k=2: PD[K_1] = PD[K_2] = 2(-b1 + b2), PD[K_3] = PD[K_4] = -2(b1 + b2)
    //      with b1 = ds(Im[dz123]), b2 = ds(Im[dz12b3]).
    let express4 = |cls: &Cls| -> Vec<Cyc> {
        Mat::from_cols(vectors[4].clone())
            .solve(&first.flatten(cls))
            .expect("class not invariant")
    };
    let base_h4_class = |label: &str| -> Cls {
        let mut c = first.zero_cls(4);
        let idx = (0..first.base.dims()[4])
            .find(|&i| first.base.label(4, i) == label)
            .unwrap_or_else(|| panic!("missing base class {}", label));
        c.base[idx] = Cyc::one();
        c
    };
    let mut comps = vec![];
    for p in 0..count {
        let pd_first: Cls = match k {
            1 => {
                let b1 = base_h4_class("ds(Im[dz123])");
                first.scale(&b1, &Cyc::from_int(-8).mul(&Cyc::sqrt3().inv().unwrap()))
            }
            _ => {
                let b1 = base_h4_class("ds(Im[dz123])");
                let b2 = base_h4_class("ds(Im[dz12b3])");
                if p < 2 {
                    first.add(
                        &first.scale(&b1, &Cyc::from_int(-2)),
                        &first.scale(&b2, &Cyc::from_int(2)),
                    )
                } else {
                    first.add(
                        &first.scale(&b1, &Cyc::from_int(-2)),
                        &first.scale(&b2, &Cyc::from_int(-2)),
                    )
                }
            }
        };
        comps.push(Component {
            id: format!("K{}", p + 1),
            model: CompModel::SurfaceCircle { genus: 3 },
            genus: 3,
            cover_degree: 1,
            theta_sign: 1,
            kappa_partner: p,
            pd: express4(&pd_first),
            volume: volume.clone(),
            y_symbol: format!("y{}", p + 1),
        });
    }
    let algebra = build_resolution(&name, AlgebraBase::Flat(flat), comps).expect("x2 build");
    TwoStep {
        algebra,
        p1_base: p1_flat,
        first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rint;

    #[test]
    fn x1_24_pipeline() {
        let alg = x1_algebra(2, 4);
        assert_eq!(alg.betti(), vec![1, 0, 4, 17, 17, 4, 0, 1]);
        // volumes: every component has volume 2
        for c in &alg.comps {
            assert_eq!(c.volume, Cyc::from_int(2), "volume of {}", c.id);
        }
        // PD[N1] = -b1 + b2 in the base H^4 basis
        let b1 = (0..alg.base.dims()[4])
            .find(|&i| alg.base.label(4, i) == "ds(Im[dz123])")
            .unwrap();
        let b2 = (0..alg.base.dims()[4])
            .find(|&i| alg.base.label(4, i) == "ds(Im[dz12b3])")
            .unwrap();
        let pd = &alg.comps[0].pd;
        assert_eq!(pd[b1], Cyc::from_int(-1));
        assert_eq!(pd[b2], Cyc::from_int(1));
        // p1 = 12 ds(Im[dz123])
        let zero4 = vec![Cyc::zero(); alg.base.dims()[4]];
        let p1 = alg.pontryagin(&zero4);
        for (i, v) in p1.base.iter().enumerate() {
            let want = if i == b1 { Cyc::from_int(12) } else { Cyc::zero() };
            assert_eq!(*v, want, "p1 coefficient of {}", alg.base.label(4, i));
        }
        // pairing = -24, constant in s
        let pairing = alg.pont_pairing(&zero4, "s");
        assert_eq!(pairing.constant, Cyc::from_int(-24));
        assert!(pairing.terms.is_empty());
        // gram: diagonal -4 at s = 0 wait: -2*vol = -4
        let gram = alg.h2_gram("s");
        assert!(gram.negdef_at_0);
        for i in 0..4 {
            assert_eq!(gram.entries[i][i].constant, Cyc::from_int(-4));
        }
        let _ = rint(0);
    }

    #[test]
    fn x2_pipelines() {
        // k = 1, a = 3: second Betti pair (2, 25)
        let ts = x2_algebra(1, 3);
        assert_eq!(ts.algebra.betti(), vec![1, 0, 2, 25, 25, 2, 0, 1]);
        // pairing: -12 sqrt3 - 18 - 16 s2 (y1 + y2)
        let pairing = ts.algebra.pont_pairing(&ts.p1_base, "s2");
        let want = Cyc::from_int(-18).sub(&Cyc::sqrt3().scale(&rint(12)));
        assert_eq!(pairing.constant, want);
        assert_eq!(pairing.terms.len(), 2);
        for (_, v) in &pairing.terms {
            assert_eq!(*v, Cyc::from_int(-16));
        }
        assert!(pairing.negative_for_all_s());
        // gram: diagonal -6 at s = 0
        let gram = ts.algebra.h2_gram("s2");
        assert!(gram.negdef_at_0);
        for i in 0..2 {
            assert_eq!(gram.entries[i][i].constant, Cyc::from_int(-6));
        }

        // k = 2, a = 4: (7, 46)
        let ts = x2_algebra(2, 4);
        assert_eq!(ts.algebra.betti(), vec![1, 0, 7, 46, 46, 7, 0, 1]);
        let pairing = ts.algebra.pont_pairing(&ts.p1_base, "s2");
        assert_eq!(pairing.constant, Cyc::from_int(-48));
        assert_eq!(pairing.terms.len(), 4);
        assert!(pairing.negative_for_all_s());
        let gram = ts.algebra.h2_gram("s2");
        assert!(gram.negdef_at_0);
    }

    #[test]
    fn x1_all_betti() {
        assert_eq!(x1_algebra(1, 3).betti()[2..4], [3, 11]);
        assert_eq!(x1_algebra(1, 6).betti()[2..4], [2, 10]);
        assert_eq!(x1_algebra(3, 4).betti()[2..4], [8, 29]);
        assert_eq!(z_algebra(2).betti()[2..4], [4, 9]);
        assert_eq!(z_algebra(3).betti()[2..4], [8, 13]);
    }
}
