//! Exact scalars: arbitrary-precision rationals and cyclotomic field elements.
//!
//! All cohomology computations in this crate run over Q or over a cyclotomic
//! field Q(zeta_n). Conductor 12 is enough for the built-in catalog: it
//! contains the third, fourth and sixth roots of unity as well as sqrt(3).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

pub fn euler_phi(n: u32) -> usize {
    (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count()
}

fn poly_trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// Quotient and remainder of polynomial division over Q; divisor must be monic-scalable.
fn poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem: Vec<Rat> = num.to_vec();
    poly_trim(&mut rem);
    let mut dv = den.to_vec();
    poly_trim(&mut dv);
    let dd = dv.len() - 1;
    let lead = dv[dd].clone();
    assert!(!lead.is_zero(), "division by zero polynomial");
    if rem.len() < dv.len() {
        return (vec![Rat::zero()], rem);
    }
    let mut quo = vec![Rat::zero(); rem.len() - dd];
    while rem.len() > dd && !(rem.len() == 1 && rem[0].is_zero()) {
        let rd = rem.len() - 1;
        if rd < dd {
            break;
        }
        let c = &rem[rd] / &lead;
        quo[rd - dd] = c.clone();
        for i in 0..=dd {
            let t = &dv[i] * &c;
            rem[rd - dd + i] = &rem[rd - dd + i] - &t;
        }
        poly_trim(&mut rem);
        if rem.iter().all(|x| x.is_zero()) {
            rem = vec![Rat::zero()];
            break;
        }
    }
    poly_trim(&mut quo);
    (quo, rem)
}

/// Coefficients (low degree first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Vec<Rat> {
    // x^n - 1 divided by all lower cyclotomic polynomials of divisor index
    let mut p = vec![Rat::zero(); n as usize + 1];
    p[0] = -Rat::one();
    p[n as usize] = Rat::one();
    for d in 1..n {
        if n % d == 0 {
            let q = cyclotomic_poly(d);
            let (quo, rem) = poly_divmod(&p, &q);
            assert!(rem.iter().all(|c| c.is_zero()), "cyclotomic division");
            p = quo;
        }
    }
    p
}

/// Element of Q(zeta_n), stored as a polynomial in zeta_n of degree < phi(n).
#[derive(Clone)]
pub struct Cyc {
    n: u32,
    c: Vec<Rat>,
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        let m = num_integer::lcm(self.n, other.n);
        self.embed(m).c == other.embed(m).c
    }
}

impl Eq for Cyc {}

impl Cyc {
    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn from_rat(r: Rat) -> Cyc {
        Cyc { n: 1, c: vec![r] }
    }

    pub fn from_int(k: i64) -> Cyc {
        Cyc::from_rat(rint(k))
    }

    pub fn zero() -> Cyc {
        Cyc::from_rat(Rat::zero())
    }

    pub fn one() -> Cyc {
        Cyc::from_rat(Rat::one())
    }

    /// zeta_n, a primitive n-th root of unity.
    pub fn zeta(n: u32) -> Cyc {
        assert!(n >= 1);
        if n == 1 {
            return Cyc::one();
        }
        let mut c = vec![Rat::zero(); euler_phi(n)];
        if c.len() == 1 {
            // n = 2: zeta = -1
            c[0] = -Rat::one();
        } else {
            c[1] = Rat::one();
        }
        Cyc { n, c }
    }

    /// The imaginary unit, zeta_4.
    pub fn i() -> Cyc {
        Cyc::zeta(4)
    }

    /// sqrt(3) = zeta_12 + zeta_12^-1.
    pub fn sqrt3() -> Cyc {
        let z = Cyc::zeta(12);
        z.pow(1).add(&z.pow(-1))
    }

    fn reduce(n: u32, mut poly: Vec<Rat>) -> Cyc {
        let phi = euler_phi(n);
        if poly.len() > phi {
            let modulus = cyclotomic_poly(n);
            let (_, rem) = poly_divmod(&poly, &modulus);
            poly = rem;
        }
        poly.resize(phi, Rat::zero());
        Cyc { n, c: poly }
    }

    /// Reinterpret in Q(zeta_m) for n | m.
    pub fn embed(&self, m: u32) -> Cyc {
        assert!(m % self.n == 0, "no embedding Q(z{}) -> Q(z{})", self.n, m);
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let mut poly = vec![Rat::zero(); (self.c.len() - 1) * step + 1];
        for (i, co) in self.c.iter().enumerate() {
            poly[i * step] = co.clone();
        }
        Cyc::reduce(m, poly)
    }

    fn align(&self, other: &Cyc) -> (Cyc, Cyc) {
        if self.n == other.n {
            return (self.clone(), other.clone());
        }
        let m = num_integer::lcm(self.n, other.n);
        (self.embed(m), other.embed(m))
    }

    pub fn add(&self, o: &Cyc) -> Cyc {
        let (a, b) = self.align(o);
        let c = a
            .c
            .iter()
            .zip(b.c.iter())
            .map(|(x, y)| x + y)
            .collect::<Vec<_>>();
        Cyc { n: a.n, c }
    }

    pub fn sub(&self, o: &Cyc) -> Cyc {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Cyc {
        Cyc {
            n: self.n,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, o: &Cyc) -> Cyc {
        let (a, b) = self.align(o);
        let mut poly = vec![Rat::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let t = x * y;
                poly[i + j] = &poly[i + j] + &t;
            }
        }
        Cyc::reduce(a.n, poly)
    }

    pub fn scale(&self, r: &Rat) -> Cyc {
        Cyc {
            n: self.n,
            c: self.c.iter().map(|x| x * r).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x]/Phi_n.
    pub fn inv(&self) -> Option<Cyc> {
        if self.is_zero() {
            return None;
        }
        let modulus = cyclotomic_poly(self.n);
        // extended gcd of self.c and modulus over Q[x]
        let mut r0 = modulus.clone();
        let mut r1 = self.c.clone();
        poly_trim(&mut r1);
        let mut s0 = vec![Rat::zero()];
        let mut s1 = vec![Rat::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, r) = poly_divmod(&r0, &r1);
            // s2 = s0 - q*s1
            let mut qs1 = vec![Rat::zero(); q.len() + s1.len()];
            for (i, x) in q.iter().enumerate() {
                for (j, y) in s1.iter().enumerate() {
                    let t = x * y;
                    qs1[i + j] = &qs1[i + j] + &t;
                }
            }
            let ln = s0.len().max(qs1.len());
            let mut s2 = vec![Rat::zero(); ln];
            for (i, v) in s0.iter().enumerate() {
                s2[i] = s2[i].clone() + v;
            }
            for (i, v) in qs1.iter().enumerate() {
                s2[i] = &s2[i] - v;
            }
            poly_trim(&mut s2);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 = gcd (a nonzero constant since Phi_n is irreducible), s0 * self = r0 mod Phi
        assert!(r0.len() == 1 && !r0[0].is_zero(), "inverse in cyclotomic field");
        let g = r0[0].clone();
        let inv_poly = s0.iter().map(|x| x / &g).collect::<Vec<_>>();
        Some(Cyc::reduce(self.n, inv_poly))
    }

    /// Galois action zeta |-> zeta^k, gcd(k, n) = 1.
    pub fn galois(&self, k: u32) -> Cyc {
        assert_eq!(num_integer::gcd(k, self.n), 1);
        let mut poly = vec![Rat::zero(); (self.c.len() - 1) * k as usize + 1];
        for (i, co) in self.c.iter().enumerate() {
            if !co.is_zero() {
                let e = (i as u32 * k) % self.n;
                // accumulate zeta^e
                if poly.len() <= e as usize {
                    poly.resize(e as usize + 1, Rat::zero());
                }
                poly[e as usize] = &poly[e as usize] + co;
            }
        }
        Cyc::reduce(self.n, poly)
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Cyc {
        if self.n == 1 {
            return self.clone();
        }
        self.galois(self.n - 1)
    }

    pub fn pow(&self, k: i64) -> Cyc {
        if k == 0 {
            return Cyc::one();
        }
        let base = if k < 0 {
            self.inv().expect("pow of zero")
        } else {
            self.clone()
        };
        let mut acc = Cyc::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn real_part(&self) -> Cyc {
        self.add(&self.conj()).scale(&rat(1, 2))
    }

    pub fn imag_part(&self) -> Cyc {
        // (x - conj x) / 2i
        let d = self.sub(&self.conj());
        let two_i = Cyc::i().scale(&rint(2)).embed(num_integer::lcm(4, d.n.max(1)));
        d.mul(&two_i.inv().unwrap())
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.c.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// For real elements of conductor dividing 12: the pair (a, b) with value a + b*sqrt(3).
    pub fn as_sqrt3_pair(&self) -> Option<(Rat, Rat)> {
        if 12 % self.n != 0 {
            return None;
        }
        let e = self.embed(12);
        // real elements of Q(zeta_12): c2 = 0 and c1 = -2 c3; value = c0 + (c1/2) sqrt3
        if !e.c[2].is_zero() {
            return None;
        }
        let minus2c3 = &e.c[3] * &rint(-2);
        if e.c[1] != minus2c3 {
            return None;
        }
        Some((e.c[0].clone(), &e.c[1] / &rint(2)))
    }

    /// Sign of a real element (conductor dividing 12). Panics if not real.
    pub fn sign(&self) -> i32 {
        let (a, b) = self
            .as_sqrt3_pair()
            .expect("sign of a non-real cyclotomic element");
        let sa = rat_sign(&a);
        let sb = rat_sign(&b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // compare a^2 with 3 b^2
        let a2 = &a * &a;
        let b23 = &b * &b * rint(3);
        if a2 > b23 {
            sa
        } else {
            sb
        }
    }
}

fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{}", fmt_rat(&r));
        }
        if let Some((a, b)) = self.as_sqrt3_pair() {
            if a.is_zero() {
                if b.is_one() {
                    return write!(f, "sqrt3");
                }
                if b == -Rat::one() {
                    return write!(f, "-sqrt3");
                }
                return write!(f, "{}*sqrt3", fmt_rat(&b));
            }
            let bs = if b.is_one() {
                "sqrt3".to_string()
            } else if b == -Rat::one() {
                "-sqrt3".to_string()
            } else {
                format!("{}*sqrt3", fmt_rat(&b))
            };
            if bs.starts_with('-') {
                return write!(f, "{}{}", fmt_rat(&a), bs);
            }
            return write!(f, "{}+{}", fmt_rat(&a), bs);
        }
        let mut parts = vec![];
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i == 0 {
                parts.push(fmt_rat(c));
            } else if i == 1 {
                parts.push(format!("{}*z{}", fmt_rat(c), self.n));
            } else {
                parts.push(format!("{}*z{}^{}", fmt_rat(c), self.n, i));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join("+").replace("+-", "-"))
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parse catalog scalar expressions: rationals, `i`, `s3` (sqrt 3), `z{n}`,
/// `z{n}^{k}`, products with `*` and sums with `+`/`-`.
pub fn parse_scalar(s: &str) -> Result<Cyc, String> {
    let s = s.trim();
    let mut total = Cyc::zero();
    let mut term = String::new();
    let mut sign = 1i64;
    let mut started = false;
    let flush = |term: &str, sign: i64, total: &mut Cyc| -> Result<(), String> {
        if term.is_empty() {
            return Ok(());
        }
        let mut acc = Cyc::from_int(sign);
        for factor in term.split('*') {
            let f = factor.trim();
            if f.is_empty() {
                return Err(format!("empty factor in {:?}", term));
            }
            let v = if f == "i" {
                Cyc::i()
            } else if f == "s3" || f == "sqrt3" {
                Cyc::sqrt3()
            } else if let Some(rest) = f.strip_prefix('z') {
                let (n, k) = match rest.split_once('^') {
                    Some((n, k)) => (
                        n.parse::<u32>().map_err(|e| e.to_string())?,
                        k.parse::<i64>().map_err(|e| e.to_string())?,
                    ),
                    None => (rest.parse::<u32>().map_err(|e| e.to_string())?, 1),
                };
                Cyc::zeta(n).pow(k)
            } else if let Some((num, den)) = f.split_once('/') {
                Cyc::from_rat(BigRational::new(
                    num.trim().parse::<BigInt>().map_err(|e| e.to_string())?,
                    den.trim().parse::<BigInt>().map_err(|e| e.to_string())?,
                ))
            } else {
                Cyc::from_rat(Rat::from(
                    f.parse::<BigInt>().map_err(|e| format!("{}: {:?}", e, f))?,
                ))
            };
            acc = acc.mul(&v);
        }
        *total = total.add(&acc);
        Ok(())
    };
    for ch in s.chars() {
        match ch {
            '+' if started => {
                flush(&term, sign, &mut total)?;
                term.clear();
                sign = 1;
            }
            '-' if started && !term.is_empty() => {
                flush(&term, sign, &mut total)?;
                term.clear();
                sign = -1;
            }
            '-' if !started || term.is_empty() => {
                sign = -sign;
                started = true;
            }
            ' ' => {}
            _ => {
                term.push(ch);
                started = true;
            }
        }
    }
    flush(&term, sign, &mut total)?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        let p12 = cyclotomic_poly(12);
        let expect: Vec<Rat> = [1, 0, -1, 0, 1].iter().map(|&k| rint(k)).collect();
        assert_eq!(p12, expect);
        assert_eq!(cyclotomic_poly(4), vec![rint(1), rint(0), rint(1)]);
    }

    #[test]
    fn roots_of_unity() {
        for n in [1u32, 2, 3, 4, 6, 12] {
            let z = Cyc::zeta(n);
            assert_eq!(z.pow(n as i64), Cyc::one(), "zeta_{}^{} = 1", n, n);
            if n > 1 {
                assert_ne!(z.pow(n as i64 / 2 + (n as i64 & 1)), Cyc::one());
            }
        }
        assert_eq!(Cyc::i().mul(&Cyc::i()), Cyc::from_int(-1));
    }

    #[test]
    fn conjugation_involution_and_embedding() {
        let z = Cyc::zeta(12);
        let x = z.pow(5).add(&Cyc::from_rat(rat(3, 7)));
        assert_eq!(x.conj().conj(), x);
        let y = Cyc::zeta(3);
        assert_eq!(y.embed(12).mul(&y.embed(12)).add(&y.embed(12)).add(&Cyc::one()), Cyc::zero());
    }

    #[test]
    fn sqrt3_squares_to_three() {
        let s = Cyc::sqrt3();
        assert_eq!(s.mul(&s), Cyc::from_int(3));
        assert!(s.is_real());
        assert_eq!(s.sign(), 1);
        assert_eq!(s.sub(&Cyc::from_int(2)).sign(), -1);
        assert_eq!(s.sub(&Cyc::from_rat(rat(3, 2))).sign(), 1);
    }

    #[test]
    fn inverse() {
        let x = Cyc::zeta(12).add(&Cyc::from_int(2));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Cyc::one());
    }

    #[test]
    fn parse_expressions() {
        assert_eq!(parse_scalar("3/4").unwrap(), Cyc::from_rat(rat(3, 4)));
        assert_eq!(parse_scalar("-1").unwrap(), Cyc::from_int(-1));
        assert_eq!(parse_scalar("z4").unwrap(), Cyc::i());
        assert_eq!(parse_scalar("z12^4").unwrap(), Cyc::zeta(3).embed(12));
        assert_eq!(
            parse_scalar("1 - 2*s3").unwrap(),
            Cyc::one().sub(&Cyc::sqrt3().scale(&rint(2)))
        );
        assert_eq!(parse_scalar("8*s3").unwrap().to_string(), "8*sqrt3");
        assert_eq!(parse_scalar("-3/8*s3").unwrap().to_string(), "-3/8*sqrt3");
    }
}
