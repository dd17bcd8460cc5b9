//! Formality certificates: the minimal-polynomial eigenvalue obstruction for
//! mapping tori, the kernel E4 of the wedge on Sym^2 H^2, the full
//! symmetrization and B8, Bianchi-Massey evaluation from intersection and
//! linking data, and the triple-Massey criterion.

use crate::algebra::ResolvedAlgebra;
use crate::linalg::{Echelon, Mat};
use crate::scalar::{Cyc, Rat};
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Formal,
    NonFormal,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct FormalityCertificate {
    pub verdict: Verdict,
    pub witness: String,
}

/// Non-formality of a mapping torus from the multiplicity of 1 as a root of
/// the minimal polynomial of the monodromy action on H^m, provided the lower
/// kernels vanish.
pub struct EigenvalueCriterionInput {
    /// dimensions of K^n = ker(F* - Id) on H^n for 1 <= n <= m-1
    pub lower_kernel_dims: Vec<usize>,
    /// F* on H^m as a block-diagonal list of matrices
    pub blocks: Vec<Mat<Cyc>>,
    pub degree: usize,
}

pub fn eigenvalue_one_check(input: &EigenvalueCriterionInput) -> FormalityCertificate {
    if input.lower_kernel_dims.iter().any(|&d| d != 0) {
        return FormalityCertificate {
            verdict: Verdict::Inconclusive,
            witness: "lower kernels are nonzero".into(),
        };
    }
    let mult = input
        .blocks
        .iter()
        .map(|b| crate::linalg::eigenvalue_multiplicity(b, &Cyc::one()))
        .max()
        .unwrap_or(0);
    if mult >= 2 {
        FormalityCertificate {
            verdict: Verdict::NonFormal,
            witness: format!(
                "eigenvalue 1 has multiplicity {} in the minimal polynomial on H^{}",
                mult, input.degree
            ),
        }
    } else {
        FormalityCertificate {
            verdict: Verdict::Inconclusive,
            witness: format!("eigenvalue 1 has multiplicity {} <= 1", mult),
        }
    }
}

// ---------------------------------------------------------------------------
// symmetric powers of H^2
// ---------------------------------------------------------------------------

/// Ordered pairs (i <= j) indexing Sym^2 of an n-dimensional space.
pub fn sym2_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = vec![];
    for i in 0..n {
        for j in i..n {
            v.push((i, j));
        }
    }
    v
}

/// Degree-4 monomials in n variables as sorted index quadruples.
pub fn sym4_monos(n: usize) -> Vec<[usize; 4]> {
    let mut v = vec![];
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for d in c..n {
                    v.push([a, b, c, d]);
                }
            }
        }
    }
    v
}

/// The wedge map Sym^2 H^2 -> H^4 of a resolved algebra, as a matrix in the
/// flattened H^4 coordinates (columns indexed by sym2_pairs).
pub fn wedge_matrix(alg: &ResolvedAlgebra) -> (Mat<Cyc>, Vec<(usize, usize)>) {
    let n = alg.dims(2);
    let pairs = sym2_pairs(n);
    let h4 = alg.dims(4);
    let mut m = Mat::zero(h4, pairs.len());
    for (col, (i, j)) in pairs.iter().enumerate() {
        let a = alg.basis_cls(2, *i);
        let b = alg.basis_cls(2, *j);
        let prod = alg.mul(&a, &b);
        let flat = alg.flatten(&prod);
        for (r, v) in flat.iter().enumerate() {
            m.set(r, col, v.clone());
        }
    }
    (m, pairs)
}

/// E4 = ker(wedge: Sym^2 H^2 -> H^4), echelonized.
pub struct E4Space {
    pub pairs: Vec<(usize, usize)>,
    pub basis: Vec<Vec<Cyc>>,
    pub labels: Vec<String>,
}

pub fn e4_kernel(alg: &ResolvedAlgebra) -> E4Space {
    let (m, pairs) = wedge_matrix(alg);
    let kernel = m.kernel_basis();
    let h2_labels: Vec<String> = (0..alg.dims(2)).map(|i| alg.label(2, i)).collect();
    // prefer single off-diagonal monomials, then signed pairs of squares
    let n = pairs.len();
    let mut labeled: Vec<(String, Vec<Cyc>)> = vec![];
    let span = Echelon::from_rows(&kernel);
    let dim = span.rank();
    let mut acc: Echelon<Cyc> = Echelon::new();
    let mut consider = |cand: Vec<Cyc>, label: String, labeled: &mut Vec<(String, Vec<Cyc>)>, acc: &mut Echelon<Cyc>| {
        if labeled.len() == dim || !span.contains(&cand) {
            return;
        }
        if acc.insert(cand.clone()) {
            labeled.push((label, cand));
        }
    };
    for (idx, (i, j)) in pairs.iter().enumerate() {
        if i == j {
            continue;
        }
        let mut e = vec![Cyc::zero(); n];
        e[idx] = Cyc::one();
        consider(
            e,
            format!("{}.{}", h2_labels[*i], h2_labels[*j]),
            &mut labeled,
            &mut acc,
        );
    }
    // integer combinations of squares: c_a a^2 - c_b b^2 with small c
    for ca in 1..=2i64 {
        for cb in 1..=2i64 {
            for a in 0..h2_labels.len() {
                for b in 0..h2_labels.len() {
                    if a == b {
                        continue;
                    }
                    let ia = pairs.iter().position(|&(x, y)| x == a && y == a).unwrap();
                    let ib = pairs.iter().position(|&(x, y)| x == b && y == b).unwrap();
                    let mut e = vec![Cyc::zero(); n];
                    e[ia] = Cyc::from_int(ca);
                    e[ib] = Cyc::from_int(-cb);
                    let label = if ca == 1 && cb == 1 {
                        format!("{}^2-{}^2", h2_labels[a], h2_labels[b])
                    } else {
                        format!(
                            "{}*{}^2-{}*{}^2",
                            ca, h2_labels[a], cb, h2_labels[b]
                        )
                    };
                    consider(e, label, &mut labeled, &mut acc);
                }
            }
        }
    }
    for (i, v) in kernel.iter().enumerate() {
        consider(v.clone(), format!("k{}", i), &mut labeled, &mut acc);
    }
    E4Space {
        pairs,
        labels: labeled.iter().map(|(l, _)| l.clone()).collect(),
        basis: labeled.into_iter().map(|(_, v)| v).collect(),
    }
}

/// Full symmetrization Sym^2(Sym^2 H^2) -> Sym^4 H^2 applied to the products
/// of two Sym^2 coordinate vectors.
pub fn full_symmetrization(
    n: usize,
    pairs: &[(usize, usize)],
    x: &[Cyc],
    y: &[Cyc],
) -> Vec<Cyc> {
    let monos = sym4_monos(n);
    let mut out = vec![Cyc::zero(); monos.len()];
    for (ia, (a1, a2)) in pairs.iter().enumerate() {
        if x[ia].is_zero() {
            continue;
        }
        for (ib, (b1, b2)) in pairs.iter().enumerate() {
            if y[ib].is_zero() {
                continue;
            }
            let mut key = [*a1, *a2, *b1, *b2];
            key.sort();
            let pos = monos.iter().position(|m| *m == key).unwrap();
            out[pos] = out[pos].add(&x[ia].mul(&y[ib]));
        }
    }
    out
}

/// B8 = ker(S restricted to Sym^2 E4), with a reducer to the normal form
/// modulo products involving the off-diagonal part.
pub struct B8Space {
    /// basis vectors in Sym^2(E4) coordinates (pairs of E4 indices, i <= j)
    pub basis: Vec<Vec<Cyc>>,
    pub e4_pairs: Vec<(usize, usize)>,
}

pub fn b8_kernel(alg: &ResolvedAlgebra, e4: &E4Space) -> B8Space {
    let n = alg.dims(2);
    let k = e4.basis.len();
    let e4_pairs = sym2_pairs(k);
    let monos = sym4_monos(n);
    let mut m = Mat::zero(monos.len(), e4_pairs.len());
    for (col, (i, j)) in e4_pairs.iter().enumerate() {
        let s = full_symmetrization(n, &e4.pairs, &e4.basis[*i], &e4.basis[*j]);
        for (r, v) in s.iter().enumerate() {
            m.set(r, col, v.clone());
        }
    }
    let kernel = m.kernel_basis();
    B8Space {
        basis: kernel,
        e4_pairs,
    }
}

/// Kind of an E4 basis element, detected from its Sym^2 coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleKind {
    /// off-diagonal product of two distinct Thom generators: gamma is chosen
    /// zero and alpha^2 vanishes at form level
    CrossTerm,
    /// square difference c_a x_a^2 - c_b x_b^2
    SquareDiff { a: usize, b: usize },
}

/// Classify E4 basis vectors as cross terms or square differences.
pub fn classify_e4(e4: &E4Space) -> Vec<OracleKind> {
    e4.basis
        .iter()
        .map(|v| {
            let mut diag: Vec<(usize, Cyc)> = vec![];
            let mut off = false;
            for (idx, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (i, j) = e4.pairs[idx];
                if i == j {
                    diag.push((i, c.clone()));
                } else {
                    off = true;
                }
            }
            if !off && diag.len() == 2 {
                OracleKind::SquareDiff {
                    a: diag[0].0,
                    b: diag[1].0,
                }
            } else {
                OracleKind::CrossTerm
            }
        })
        .collect()
}

/// The pairing oracle: for each anchor group of square differences (the
/// generators sharing a common anchor index), the value of
/// [(gamma(m_first) - gamma(m_second)) ^ alpha^2(m_anchor-difference)],
/// which the support conventions reduce to 8 times a linking number.
pub struct PairingOracle {
    pub group_values: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub enum OracleError {
    OracleGap(String),
}

/// Anchor grouping of the square-difference generators: elements sharing the
/// index that occurs in every difference of the group.
pub fn anchor_groups(kinds: &[OracleKind]) -> Vec<Vec<usize>> {
    use std::collections::BTreeMap;
    let mut by_anchor: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, k) in kinds.iter().enumerate() {
        if let OracleKind::SquareDiff { a, .. } = k {
            by_anchor.entry(*a).or_default().push(i);
        }
    }
    by_anchor.into_values().collect()
}

/// Coefficients of a B8 element on the off-diagonal same-group pairs, per
/// group, after checking that the diagonal and cross-group coefficients
/// vanish (the combinatorial normal form).
pub fn b8_normal_form(
    b8: &B8Space,
    kinds: &[OracleKind],
    groups: &[Vec<usize>],
    vector: &[Cyc],
) -> Result<Vec<Vec<Rat>>, OracleError> {
    let mut out = vec![vec![]; groups.len()];
    for (idx, (i, j)) in b8.e4_pairs.iter().enumerate() {
        let c = &vector[idx];
        if c.is_zero() {
            continue;
        }
        let (ki, kj) = (&kinds[*i], &kinds[*j]);
        let both_sq = matches!(ki, OracleKind::SquareDiff { .. })
            && matches!(kj, OracleKind::SquareDiff { .. });
        if !both_sq {
            continue; // gamma(n) = 0 and alpha^2(n) = 0 by support
        }
        let gi = groups.iter().position(|g| g.contains(i));
        let gj = groups.iter().position(|g| g.contains(j));
        match (gi, gj) {
            (Some(a), Some(b)) if a == b => {
                if i == j {
                    return Err(OracleError::OracleGap(
                        "diagonal square-difference pair in B8".into(),
                    ));
                }
                let r = c
                    .as_rat()
                    .ok_or_else(|| OracleError::OracleGap("irrational coefficient".into()))?;
                out[a].push(r);
            }
            _ => {} // cross-group supports are disjoint
        }
    }
    // each group total must vanish (coefficient of the anchor fourth power)
    for (g, coeffs) in out.iter().enumerate() {
        let total: Rat = coeffs.iter().fold(Rat::zero(), |acc, x| acc + x);
        if !total.is_zero() {
            return Err(OracleError::OracleGap(format!(
                "group {} coefficients do not sum to zero",
                g
            )));
        }
    }
    Ok(out)
}

/// Evaluate the Bianchi-Massey tensor on the B8 basis. Off-diagonal kernel
/// elements contribute nothing (disjoint supports); within an anchor group
/// the evaluation collapses, by the sum-zero constraint, to multiples of the
/// group linking value.
pub fn bianchi_massey(
    e4: &E4Space,
    b8: &B8Space,
    oracle: &PairingOracle,
) -> Result<(FormalityCertificate, Vec<Rat>), OracleError> {
    let kinds = classify_e4(e4);
    let groups = anchor_groups(&kinds);
    if oracle.group_values.len() != groups.len() {
        return Err(OracleError::OracleGap(format!(
            "oracle covers {} groups, expected {}",
            oracle.group_values.len(),
            groups.len()
        )));
    }
    let mut values = vec![];
    for b in &b8.basis {
        let nf = b8_normal_form(b8, &kinds, &groups, b)?;
        let mut acc = Rat::zero();
        for (g, coeffs) in nf.iter().enumerate() {
            // F(x) = (sum of all but the last off-diagonal coefficients) V_g;
            // with the sum-zero constraint this is -lambda_last V_g
            if let Some(last) = coeffs.last() {
                acc += -last * &oracle.group_values[g];
            }
        }
        values.push(acc);
    }
    let vanishes = values.iter().all(|v| v.is_zero());
    Ok((
        FormalityCertificate {
            verdict: if vanishes {
                Verdict::Formal
            } else {
                Verdict::NonFormal
            },
            witness: if vanishes {
                format!(
                    "Bianchi-Massey tensor vanishes on a {}-dimensional B8",
                    b8.basis.len()
                )
            } else {
                "Bianchi-Massey tensor is nonzero".into()
            },
        },
        values,
    ))
}

/// Triple Massey nonvanishing from a linking number: the pairing of the
/// Massey class against the difference of Thom classes equals 8 times the
/// linking number, and annihilates the indeterminacy ideal.
pub fn triple_massey_from_linking(lk: &Rat) -> (Rat, Verdict) {
    let value = lk * Rat::from(num_bigint::BigInt::from(8));
    let verdict = if value.is_zero() {
        Verdict::Inconclusive
    } else {
        Verdict::NonFormal
    };
    (value, verdict)
}

/// Formality for small b2: when b2 <= 3 and the quadratic form against the
/// calibration class is nondegenerate, H^2 -> H^5 is an isomorphism.
pub fn low_b2_formality(alg: &ResolvedAlgebra) -> FormalityCertificate {
    let b2 = alg.dims(2);
    if b2 > 3 {
        return FormalityCertificate {
            verdict: Verdict::Inconclusive,
            witness: format!("b2 = {} > 3", b2),
        };
    }
    let gram = alg.h2_gram("s");
    if gram.negdef_at_0 {
        FormalityCertificate {
            verdict: Verdict::Formal,
            witness: format!(
                "b2 = {} <= 3 and the quadratic form at s = 0 is negative definite",
                b2
            ),
        }
    } else {
        FormalityCertificate {
            verdict: Verdict::Inconclusive,
            witness: "quadratic form degenerate at s = 0".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    #[test]
    fn symmetrization_formulas() {
        // m_{ij} . m_{ik} with m_{ij} = x_i^2 - x_j^2 in 4 variables:
        // x_i^4 - x_i^2 x_k^2 - x_i^2 x_j^2 + x_j^2 x_k^2
        let n = 4;
        let pairs = sym2_pairs(n);
        let idx = |a: usize, b: usize| pairs.iter().position(|&(x, y)| (x, y) == (a, b)).unwrap();
        let mut m12 = vec![Cyc::zero(); pairs.len()];
        m12[idx(0, 0)] = Cyc::one();
        m12[idx(1, 1)] = Cyc::from_int(-1);
        let mut m13 = vec![Cyc::zero(); pairs.len()];
        m13[idx(0, 0)] = Cyc::one();
        m13[idx(2, 2)] = Cyc::from_int(-1);
        let s = full_symmetrization(n, &pairs, &m12, &m13);
        let monos = sym4_monos(n);
        let pos = |key: [usize; 4]| monos.iter().position(|m| *m == key).unwrap();
        assert_eq!(s[pos([0, 0, 0, 0])], Cyc::one());
        assert_eq!(s[pos([0, 0, 2, 2])], Cyc::from_int(-1));
        assert_eq!(s[pos([0, 0, 1, 1])], Cyc::from_int(-1));
        assert_eq!(s[pos([1, 1, 2, 2])], Cyc::one());

        // m_{5p} . m_{5q} with m_{5p} = 2 y_5^2 - y_p^2:
        // 4 y5^4 - 2 y5^2 yq^2 - 2 y5^2 yp^2 + yp^2 yq^2
        let n = 3; // variables y5, y6, y7 as 0, 1, 2
        let pairs = sym2_pairs(n);
        let idx = |a: usize, b: usize| pairs.iter().position(|&(x, y)| (x, y) == (a, b)).unwrap();
        let mut m56 = vec![Cyc::zero(); pairs.len()];
        m56[idx(0, 0)] = Cyc::from_int(2);
        m56[idx(1, 1)] = Cyc::from_int(-1);
        let mut m57 = vec![Cyc::zero(); pairs.len()];
        m57[idx(0, 0)] = Cyc::from_int(2);
        m57[idx(2, 2)] = Cyc::from_int(-1);
        let s = full_symmetrization(n, &pairs, &m56, &m57);
        let monos = sym4_monos(n);
        let pos = |key: [usize; 4]| monos.iter().position(|m| *m == key).unwrap();
        assert_eq!(s[pos([0, 0, 0, 0])], Cyc::from_int(4));
        assert_eq!(s[pos([0, 0, 2, 2])], Cyc::from_int(-2));
        assert_eq!(s[pos([0, 0, 1, 1])], Cyc::from_int(-2));
        assert_eq!(s[pos([1, 1, 2, 2])], Cyc::one());

        // (a . a) . (a . a) -> a^4
        let n = 1;
        let pairs = sym2_pairs(n);
        let aa = vec![Cyc::one()];
        let s = full_symmetrization(n, &pairs, &aa, &aa);
        assert_eq!(s, vec![Cyc::one()]);
    }

    #[test]
    fn triple_massey_values() {
        let (v, verdict) = triple_massey_from_linking(&rat(-2, 1));
        assert_eq!(v, rint(-16));
        assert_eq!(verdict, Verdict::NonFormal);
        let (v, verdict) = triple_massey_from_linking(&Rat::zero());
        assert!(v.is_zero());
        assert_eq!(verdict, Verdict::Inconclusive);
    }
}
