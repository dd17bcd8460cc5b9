//! Exterior algebra of a complex 3-torus in two bases: complex monomials
//! dz_I ^ dzbar_J and real lattice monomials, with exact change of basis.

use crate::linalg::Mat;
use crate::scalar::{Cyc, Rat};
use std::fmt;

/// Monomial dz_I ^ dzbar_J on C^3, I and J bitmasks over {0,1,2}.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Mono {
    pub zi: u8,
    pub zb: u8,
}

impl Mono {
    pub fn deg(&self) -> usize {
        (self.zi.count_ones() + self.zb.count_ones()) as usize
    }

    pub fn one() -> Mono {
        Mono { zi: 0, zb: 0 }
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deg() == 0 {
            return write!(f, "1");
        }
        write!(f, "dz")?;
        for k in 0..3 {
            if self.zi & (1 << k) != 0 {
                write!(f, "{}", k + 1)?;
            }
        }
        for k in 0..3 {
            if self.zb & (1 << k) != 0 {
                write!(f, "b{}", k + 1)?;
            }
        }
        Ok(())
    }
}

/// All monomials of a given degree, ordered lexicographically on (zi, zb).
pub fn monos_of_degree(m: usize) -> &'static [Mono] {
    static TABLE: std::sync::OnceLock<Vec<Vec<Mono>>> = std::sync::OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut table = vec![vec![]; 7];
        for zi in 0u8..8 {
            for zb in 0u8..8 {
                let mono = Mono { zi, zb };
                table[mono.deg()].push(mono);
            }
        }
        for v in &mut table {
            v.sort();
        }
        table
    });
    &t[m]
}

pub fn mono_index(m: &Mono) -> usize {
    monos_of_degree(m.deg()).iter().position(|x| x == m).unwrap()
}

/// Sign of merging two disjoint increasing index sets (bitmasks):
/// number of transpositions to interleave b past a.
fn merge_sign(a: u8, b: u8) -> i32 {
    let mut swaps = 0;
    for k in 0..8 {
        if b & (1 << k) != 0 {
            // count elements of a greater than k
            let higher = a >> (k + 1);
            swaps += higher.count_ones();
        }
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Wedge of monomials: None if they share a factor, else (sign, product).
pub fn mono_wedge(a: &Mono, b: &Mono) -> Option<(i32, Mono)> {
    if a.zi & b.zi != 0 || a.zb & b.zb != 0 {
        return None;
    }
    // (dzI1 dzbJ1)(dzI2 dzbJ2): move dzI2 (|I2| forms) past dzbJ1 (|J1| forms)
    let mut sign = if (a.zb.count_ones() * b.zi.count_ones()) % 2 == 0 {
        1
    } else {
        -1
    };
    sign *= merge_sign(a.zi, b.zi);
    sign *= merge_sign(a.zb, b.zb);
    Some((
        sign,
        Mono {
            zi: a.zi | b.zi,
            zb: a.zb | b.zb,
        },
    ))
}

/// A complex-valued form of pure degree in the monomial basis.
#[derive(Clone, PartialEq)]
pub struct CForm {
    pub deg: usize,
    pub coeffs: Vec<Cyc>,
}

impl fmt::Debug for CForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl CForm {
    pub fn zero(deg: usize) -> CForm {
        CForm {
            deg,
            coeffs: vec![Cyc::zero(); monos_of_degree(deg).len()],
        }
    }

    pub fn monomial(m: Mono) -> CForm {
        let mut f = CForm::zero(m.deg());
        f.coeffs[mono_index(&m)] = Cyc::one();
        f
    }

    pub fn from_terms(deg: usize, terms: &[(Cyc, Mono)]) -> CForm {
        let mut f = CForm::zero(deg);
        for (c, m) in terms {
            assert_eq!(m.deg(), deg);
            let i = mono_index(m);
            f.coeffs[i] = f.coeffs[i].add(c);
        }
        f
    }

    pub fn add(&self, o: &CForm) -> CForm {
        assert_eq!(self.deg, o.deg);
        CForm {
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &CForm) -> CForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> CForm {
        CForm {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Cyc) -> CForm {
        CForm {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn wedge(&self, o: &CForm) -> CForm {
        let deg = self.deg + o.deg;
        let mut out = CForm::zero(deg);
        let ma = monos_of_degree(self.deg);
        let mb = monos_of_degree(o.deg);
        for (i, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in o.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                if let Some((sign, m)) = mono_wedge(&ma[i], &mb[j]) {
                    let k = mono_index(&m);
                    let mut t = ca.mul(cb);
                    if sign < 0 {
                        t = t.neg();
                    }
                    out.coeffs[k] = out.coeffs[k].add(&t);
                }
            }
        }
        out
    }

    /// Complex conjugate form.
    pub fn conj(&self) -> CForm {
        let ms = monos_of_degree(self.deg);
        let mut out = CForm::zero(self.deg);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = ms[i];
            let swapped = Mono {
                zi: m.zb,
                zb: m.zi,
            };
            let sign = if (m.zi.count_ones() * m.zb.count_ones()) % 2 == 0 {
                1
            } else {
                -1
            };
            let k = mono_index(&swapped);
            let mut t = c.conj();
            if sign < 0 {
                t = t.neg();
            }
            out.coeffs[k] = out.coeffs[k].add(&t);
        }
        out
    }

    pub fn real_part(&self) -> CForm {
        self.add(&self.conj()).scale(&Cyc::from_rat(crate::scalar::rat(1, 2)))
    }

    pub fn imag_part(&self) -> CForm {
        let d = self.sub(&self.conj());
        d.scale(&Cyc::i().scale(&crate::scalar::rint(2)).inv().unwrap())
    }

    pub fn is_real_form(&self) -> bool {
        self.conj() == *self
    }

    pub fn display(&self) -> String {
        let ms = monos_of_degree(self.deg);
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({})*{}", c, ms[i]));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Pullback data of an affine map z -> Az + B zbar + t on 1-forms.
/// The translation does not act on cohomology.
#[derive(Clone, Debug)]
pub struct FormPullback {
    /// images of dz_1, dz_2, dz_3: (coeffs on dz_q, coeffs on dzbar_q)
    pub dz_images: Vec<CForm>,
    pub dzb_images: Vec<CForm>,
}

impl FormPullback {
    /// a, b: row-major 3x3 matrices of the map z |-> a z + b zbar + t.
    pub fn new(a: &[[Cyc; 3]; 3], b: &[[Cyc; 3]; 3]) -> FormPullback {
        let mut dz_images = vec![];
        let mut dzb_images = vec![];
        for p in 0..3 {
            let mut img = CForm::zero(1);
            for q in 0..3 {
                let mz = Mono {
                    zi: 1 << q,
                    zb: 0,
                };
                let mb = Mono {
                    zi: 0,
                    zb: 1 << q,
                };
                img.coeffs[mono_index(&mz)] = img.coeffs[mono_index(&mz)].add(&a[p][q]);
                img.coeffs[mono_index(&mb)] = img.coeffs[mono_index(&mb)].add(&b[p][q]);
            }
            dzb_images.push(img.conj());
            dz_images.push(img);
        }
        FormPullback {
            dz_images,
            dzb_images,
        }
    }

    pub fn apply(&self, f: &CForm) -> CForm {
        let ms = monos_of_degree(f.deg);
        let mut out = CForm::zero(f.deg);
        for (i, c) in f.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = ms[i];
            let mut acc = CForm::monomial(Mono::one()).scale(c);
            for k in 0..3 {
                if m.zi & (1 << k) != 0 {
                    acc = acc.wedge(&self.dz_images[k]);
                }
            }
            for k in 0..3 {
                if m.zb & (1 << k) != 0 {
                    acc = acc.wedge(&self.dzb_images[k]);
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Matrix of the action on degree-m monomials (columns = images).
    pub fn matrix(&self, deg: usize) -> Mat<Cyc> {
        let ms = monos_of_degree(deg);
        let mut m = Mat::zero(ms.len(), ms.len());
        for (j, mono) in ms.iter().enumerate() {
            let img = self.apply(&CForm::monomial(*mono));
            for i in 0..ms.len() {
                m.set(i, j, img.coeffs[i].clone());
            }
        }
        m
    }
}

/// Real lattice monomials: subsets of the 6 lattice 1-forms
/// (dx1, dy1, dx2, dy2, dx3, dy3), as bitmasks, ordered lexicographically.
pub fn lattice_monos(m: usize) -> &'static [u8] {
    static TABLE: std::sync::OnceLock<Vec<Vec<u8>>> = std::sync::OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut table = vec![vec![]; 8];
        for s in 0u8..64 {
            let d = s.count_ones() as usize;
            table[d].push(s);
        }
        table
    });
    if m < t.len() {
        &t[m]
    } else {
        &[]
    }
}

pub fn lattice_mono_index(m: usize, s: u8) -> usize {
    lattice_monos(m).iter().position(|&x| x == s).unwrap()
}

/// Subsets of {0..n-1} of size m as bitmasks, ordered (n <= 8).
pub fn subsets(n: usize, m: usize) -> Vec<u8> {
    (0u16..(1u16 << n))
        .filter(|s| s.count_ones() as usize == m)
        .map(|s| s as u8)
        .collect()
}

pub fn lattice_merge_sign(a: u8, b: u8) -> i32 {
    merge_sign(a, b)
}

pub fn lattice_mono_name(s: u8) -> String {
    let names = ["dx1", "dy1", "dx2", "dy2", "dx3", "dy3"];
    let mut parts = vec![];
    for (k, n) in names.iter().enumerate() {
        if s & (1 << k) != 0 {
            parts.push(*n);
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("^")
    }
}

/// Real form of pure degree in lattice-monomial coordinates; coefficients are
/// conjugation-fixed cyclotomic numbers (elements of the real subfield).
#[derive(Clone, PartialEq)]
pub struct RForm {
    pub deg: usize,
    pub coeffs: Vec<Cyc>,
}

impl fmt::Debug for RForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = lattice_monos(self.deg);
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({})*{}", c, lattice_mono_name(ms[i])));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl RForm {
    pub fn zero(deg: usize) -> RForm {
        RForm {
            deg,
            coeffs: vec![Cyc::zero(); lattice_monos(deg).len()],
        }
    }

    pub fn add(&self, o: &RForm) -> RForm {
        assert_eq!(self.deg, o.deg);
        RForm {
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> RForm {
        RForm {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, o: &RForm) -> RForm {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Cyc) -> RForm {
        RForm {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn wedge(&self, o: &RForm) -> RForm {
        let deg = self.deg + o.deg;
        // beyond degree 6 every monomial pair overlaps, so the result is the empty zero form
        let mut out = RForm::zero(deg);
        let ma = lattice_monos(self.deg);
        let mb = lattice_monos(o.deg);
        for (i, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in o.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                if ma[i] & mb[j] != 0 {
                    continue;
                }
                let sign = merge_sign(ma[i], mb[j]);
                let m = ma[i] | mb[j];
                let k = lattice_mono_index(deg, m);
                let mut t = ca.mul(cb);
                if sign < 0 {
                    t = t.neg();
                }
                out.coeffs[k] = out.coeffs[k].add(&t);
            }
        }
        out
    }

    /// Coefficient of the full top monomial dx1^dy1^...^dy3 (deg must be 6).
    pub fn top_coefficient(&self) -> Cyc {
        assert_eq!(self.deg, 6);
        self.coeffs[lattice_mono_index(6, 0b111111)].clone()
    }
}

/// Change of basis between complex monomials and lattice monomials for a
/// given choice of lattice generators per complex coordinate.
#[derive(Clone)]
pub struct Complexifier {
    /// dz_p = v1_p dx_p + v2_p dy_p; dzbar from conjugates.
    pub v1: [Cyc; 3],
    pub v2: [Cyc; 3],
}

impl Complexifier {
    /// images of the 6 complex 1-forms (dz1..dz3, dzb1..dzb3) as RForms
    fn one_forms(&self) -> Vec<RForm> {
        let mut out = vec![];
        for p in 0..3 {
            let mut f = RForm::zero(1);
            f.coeffs[2 * p] = self.v1[p].clone();
            f.coeffs[2 * p + 1] = self.v2[p].clone();
            out.push(f);
        }
        for p in 0..3 {
            let mut f = RForm::zero(1);
            f.coeffs[2 * p] = self.v1[p].conj();
            f.coeffs[2 * p + 1] = self.v2[p].conj();
            out.push(f);
        }
        out
    }

    pub fn to_lattice(&self, f: &CForm) -> RForm {
        let ones = self.one_forms();
        let ms = monos_of_degree(f.deg);
        let mut out = RForm::zero(f.deg);
        for (i, c) in f.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = ms[i];
            let mut acc = RForm {
                deg: 0,
                coeffs: vec![c.clone()],
            };
            for k in 0..3 {
                if m.zi & (1 << k) != 0 {
                    acc = acc.wedge(&ones[k]);
                }
            }
            for k in 0..3 {
                if m.zb & (1 << k) != 0 {
                    acc = acc.wedge(&ones[3 + k]);
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Inverse change of basis: expand a lattice form in complex monomials.
    pub fn to_complex(&self, f: &RForm) -> CForm {
        // dx_p, dy_p in terms of dz_p, dzbar_p: invert the 2x2 block
        let mut dx = vec![];
        let mut dy = vec![];
        for p in 0..3 {
            let a = self.v1[p].clone();
            let b = self.v2[p].clone();
            let det = a.mul(&b.conj()).sub(&b.mul(&a.conj()));
            let dinv = det.inv().expect("lattice basis degenerate");
            // dx = (conj(b) dz - b dzb)/det ; dy = (-conj(a) dz + a dzb)/det
            let mz = CForm::monomial(Mono {
                zi: 1 << p,
                zb: 0,
            });
            let mb = CForm::monomial(Mono {
                zi: 0,
                zb: 1 << p,
            });
            dx.push(
                mz.scale(&b.conj().mul(&dinv))
                    .add(&mb.scale(&b.mul(&dinv).neg())),
            );
            dy.push(
                mz.scale(&a.conj().mul(&dinv).neg())
                    .add(&mb.scale(&a.mul(&dinv))),
            );
        }
        let ms = lattice_monos(f.deg);
        let mut out = CForm::zero(f.deg);
        for (i, c) in f.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut acc = CForm::monomial(Mono::one()).scale(c);
            for k in 0..6 {
                if ms[i] & (1 << k) != 0 {
                    let form = if k % 2 == 0 { &dx[k / 2] } else { &dy[k / 2] };
                    acc = acc.wedge(form);
                }
            }
            out = out.add(&acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    #[test]
    fn dims() {
        assert_eq!(monos_of_degree(0).len(), 1);
        assert_eq!(monos_of_degree(1).len(), 6);
        assert_eq!(monos_of_degree(2).len(), 15);
        assert_eq!(monos_of_degree(3).len(), 20);
        assert_eq!(monos_of_degree(6).len(), 1);
    }

    #[test]
    fn wedge_antisymmetry() {
        let dz1 = CForm::monomial(Mono { zi: 1, zb: 0 });
        let dzb2 = CForm::monomial(Mono { zi: 0, zb: 2 });
        let a = dz1.wedge(&dzb2);
        let b = dzb2.wedge(&dz1);
        assert_eq!(a, b.neg());
        assert!(dz1.wedge(&dz1).is_zero());
    }

    #[test]
    fn conj_of_squares() {
        // conj(dz1 ^ dzb1) = -(dz1 ^ dzb1)
        let m = CForm::monomial(Mono { zi: 1, zb: 1 });
        assert_eq!(m.conj(), m.neg());
        // conj is an involution on a random-ish combination
        let x = m
            .scale(&Cyc::zeta(12))
            .add(&CForm::monomial(Mono { zi: 2, zb: 1 }).scale(&Cyc::from_rat(rat(2, 3))));
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn re_im_of_dz123() {
        // Re(dz123) ^ Im(dz123) = -(i/2) dz_{1 1b 2 2b 3 3b}
        //                       = +(i/2) dz123 ^ dzb123 (odd reordering)
        let w = CForm::monomial(Mono { zi: 7, zb: 0 });
        let re = w.real_part();
        let im = w.imag_part();
        let prod = re.wedge(&im);
        let top = CForm::monomial(Mono { zi: 7, zb: 7 });
        let expected = top.scale(&Cyc::i().scale(&rat(1, 2)));
        assert_eq!(prod, expected);
    }

    #[test]
    fn complexify_square_lattice() {
        // Gamma_2 = Z<1,i>: i dz ^ dzb = 2 dx ^ dy per coordinate
        let c = Complexifier {
            v1: [Cyc::one(), Cyc::one(), Cyc::one()],
            v2: [Cyc::i(), Cyc::i(), Cyc::i()],
        };
        let m = CForm::monomial(Mono { zi: 1, zb: 1 }).scale(&Cyc::i());
        let r = c.to_lattice(&m);
        let mut expect = RForm::zero(2);
        expect.coeffs[lattice_mono_index(2, 0b000011)] = Cyc::from_int(2);
        assert_eq!(r, expect);
        // round trip
        let back = c.to_complex(&r);
        assert_eq!(back, m);
    }

    #[test]
    fn complexify_hex_lattice_volume() {
        // Gamma_1 = Z<1, w>, w = zeta_3: dz^dzb = -i sqrt3 dx^dy
        let w = Cyc::zeta(3);
        let c = Complexifier {
            v1: [Cyc::one(), Cyc::one(), Cyc::one()],
            v2: [w.clone(), w.clone(), w.clone()],
        };
        let m = CForm::monomial(Mono { zi: 1, zb: 1 });
        let r = c.to_lattice(&m);
        let coeff = r.coeffs[lattice_mono_index(2, 0b000011)].clone();
        assert_eq!(coeff, Cyc::i().neg().mul(&Cyc::sqrt3()));
        // dz_{1 1b 2 2b 3 3b} = (-i sqrt3)^3 dx^6 = 3 sqrt3 i dx^6, and the
        // holomorphic-first monomial dz123^dzb123 is its negative
        let top = CForm::monomial(Mono { zi: 7, zb: 7 });
        let rt = c.to_lattice(&top);
        assert_eq!(
            rt.top_coefficient(),
            Cyc::sqrt3().scale(&rint(-3)).mul(&Cyc::i())
        );
    }

    #[test]
    fn pullback_f_map() {
        // f(z) = (z1, z2 - z1, z3): F*(dz2) = dz2 - dz1
        let one = Cyc::one;
        let zero = Cyc::zero;
        let a = [
            [one(), zero(), zero()],
            [one().neg(), one(), zero()],
            [zero(), zero(), one()],
        ];
        let b = [
            [zero(), zero(), zero()],
            [zero(), zero(), zero()],
            [zero(), zero(), zero()],
        ];
        let pb = FormPullback::new(&a, &b);
        let img = pb.apply(&CForm::monomial(Mono { zi: 2, zb: 0 }));
        let expect = CForm::monomial(Mono { zi: 2, zb: 0 })
            .sub(&CForm::monomial(Mono { zi: 1, zb: 0 }));
        assert_eq!(img, expect);
    }
}
