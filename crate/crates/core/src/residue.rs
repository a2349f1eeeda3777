//! The residue field `F_q` (with `q ≡ 1 mod 4`), its canonical primitive
//! root, discrete logarithms, and the order-4 character `η` on residues.
//!
//! Elements are small integer codes; every field operation is a table
//! lookup. Prime fields use the code `a mod p`; quadratic extensions
//! `F_p[x]/(x² − n)` use `a0 + a1·p` with `n` the least non-residue mod `p`.

use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::HeckeCoeff;

/// Largest supported field size; tables are `q²` entries.
pub const MAX_Q: u32 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ResidueElem(u32);

impl ResidueElem {
    pub const ZERO: ResidueElem = ResidueElem(0);
    pub const ONE: ResidueElem = ResidueElem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// `i^k` for `k` mod 4, with `i = √−1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct UnitI(u8);

impl UnitI {
    pub const ONE: UnitI = UnitI(0);
    pub const I: UnitI = UnitI(1);
    pub const MINUS_ONE: UnitI = UnitI(2);
    pub const MINUS_I: UnitI = UnitI(3);

    pub fn new(k: i64) -> Self {
        UnitI(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn inv(self) -> Self {
        UnitI((4 - self.0) % 4)
    }

    pub fn pow(self, n: i64) -> Self {
        UnitI::new(self.0 as i64 * n)
    }

    pub fn to_coeff(self) -> HeckeCoeff {
        self.into()
    }
}

impl Mul for UnitI {
    type Output = UnitI;
    fn mul(self, rhs: UnitI) -> UnitI {
        UnitI((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for UnitI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

impl Serialize for UnitI {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct ResidueField {
    q: u32,
    p: u32,
    degree: u32,
    /// `n` with `x² = n` defining the quadratic extension; unused when `degree == 1`.
    nonresidue: u32,
    zeta: ResidueElem,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut f) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        f += 1;
    }
    (rest == 1).then_some((p, f))
}

fn smallest_nonresidue(p: u32) -> u32 {
    let squares: Vec<bool> = {
        let mut s = vec![false; p as usize];
        for x in 1..p {
            s[((x * x) % p) as usize] = true;
        }
        s
    };
    (2..p).find(|&n| !squares[n as usize]).expect("odd prime has a non-residue")
}

impl ResidueField {
    /// Builds `F_q` with the smallest generator (by code) as `ζ`.
    pub fn new(q: u32) -> Result<Self> {
        let mut field = Self::tables(q)?;
        let zeta = (1..q).map(ResidueElem).find(|&g| field.order(g) == q - 1).expect("cyclic group has a generator");
        field.set_generator(zeta);
        Ok(field)
    }

    /// Builds `F_q` with a caller-chosen generator, given by its code.
    pub fn with_generator(q: u32, code: u32) -> Result<Self> {
        let mut field = Self::tables(q)?;
        let g = ResidueElem(code);
        if code == 0 || code >= q || field.order(g) != q - 1 {
            return Err(Error::NotAGenerator(format!("code {code} in F_{q}")));
        }
        field.set_generator(g);
        Ok(field)
    }

    fn tables(q: u32) -> Result<Self> {
        let bad = |reason| Err(Error::InadmissibleQ { q: q as u64, reason });
        if q.is_multiple_of(2) {
            return bad("q must be odd");
        }
        if q < 5 || !(q - 1).is_multiple_of(4) {
            return bad("4 must divide q - 1");
        }
        let Some((p, degree)) = prime_power(q) else {
            return bad("q must be a prime power");
        };
        if degree > 2 {
            return bad("only prime fields and quadratic extensions are supported");
        }
        if q > MAX_Q {
            return bad("q exceeds the table size limit");
        }
        let nonresidue = if degree == 2 { smallest_nonresidue(p) } else { 0 };
        let n = q as usize;
        let digits = |c: u32| (c % p, c / p);
        let code = |a0: u32, a1: u32| a0 + a1 * p;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        let mut neg = vec![0; n];
        for a in 0..q {
            let (a0, a1) = digits(a);
            neg[a as usize] = code((p - a0) % p, (p - a1) % p);
            for b in 0..q {
                let (b0, b1) = digits(b);
                add[a as usize * n + b as usize] = code((a0 + b0) % p, (a1 + b1) % p);
                let (a0, a1, b0, b1, nr) = (a0 as u64, a1 as u64, b0 as u64, b1 as u64, nonresidue as u64);
                let pp = p as u64;
                let c0 = (a0 * b0 + nr * ((a1 * b1) % pp)) % pp;
                let c1 = (a0 * b1 + a1 * b0) % pp;
                mul[a as usize * n + b as usize] = code(c0 as u32, c1 as u32);
            }
        }
        let mut inv = vec![0; n];
        for a in 1..q {
            inv[a as usize] = (1..q).find(|&b| mul[a as usize * n + b as usize] == 1).expect("field");
        }
        Ok(ResidueField {
            q,
            p,
            degree,
            nonresidue,
            zeta: ResidueElem::ONE,
            add,
            mul,
            neg,
            inv,
            exp: Vec::new(),
            log: Vec::new(),
        })
    }

    fn set_generator(&mut self, g: ResidueElem) {
        let n = (self.q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![0; self.q as usize];
        let mut x = ResidueElem::ONE;
        for k in 0..n {
            exp.push(x.0);
            log[x.0 as usize] = k as u32;
            x = self.mul(x, g);
        }
        self.zeta = g;
        self.exp = exp;
        self.log = log;
    }

    fn order(&self, g: ResidueElem) -> u32 {
        let mut x = g;
        let mut k = 1;
        while x != ResidueElem::ONE {
            x = self.mul(x, g);
            k += 1;
            if k > self.q {
                return 0;
            }
        }
        k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The fixed primitive `(q−1)`-st root of unity.
    pub fn zeta(&self) -> ResidueElem {
        self.zeta
    }

    pub fn elements(&self) -> impl Iterator<Item = ResidueElem> {
        (0..self.q).map(ResidueElem)
    }

    pub fn units(&self) -> impl Iterator<Item = ResidueElem> {
        (1..self.q).map(ResidueElem)
    }

    pub fn elem(&self, code: u32) -> ResidueElem {
        assert!(code < self.q, "code {code} out of range for F_{}", self.q);
        ResidueElem(code)
    }

    pub fn from_int(&self, n: i64) -> ResidueElem {
        ResidueElem(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: ResidueElem, b: ResidueElem) -> ResidueElem {
        ResidueElem(self.add[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: ResidueElem, b: ResidueElem) -> ResidueElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: ResidueElem, b: ResidueElem) -> ResidueElem {
        ResidueElem(self.mul[a.0 as usize * self.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: ResidueElem) -> ResidueElem {
        ResidueElem(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: ResidueElem) -> Result<ResidueElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ResidueElem(self.inv[a.0 as usize]))
    }

    pub fn pow(&self, a: ResidueElem, n: i64) -> Result<ResidueElem> {
        if a.is_zero() {
            return match n {
                0 => Ok(ResidueElem::ONE),
                n if n > 0 => Ok(ResidueElem::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        Ok(self.zeta_pow(self.log(a)? as i64 * n))
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> ResidueElem {
        ResidueElem(self.exp[k.rem_euclid(self.q as i64 - 1) as usize])
    }

    /// Discrete logarithm to base `ζ`, in `0..q−1`.
    pub fn log(&self, a: ResidueElem) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::ZeroResidue);
        }
        Ok(self.log[a.0 as usize])
    }

    pub fn is_square(&self, a: ResidueElem) -> Result<bool> {
        Ok(self.log(a)? % 2 == 0)
    }

    /// `η(x) = i^k` where `x = ζ^k`.
    pub fn eta(&self, x: ResidueElem) -> Result<UnitI> {
        Ok(UnitI::new(self.log(x)? as i64))
    }

    /// The quadratic character, as `±1`.
    pub fn sgn(&self, x: ResidueElem) -> Result<UnitI> {
        Ok(if self.is_square(x)? { UnitI::ONE } else { UnitI::MINUS_ONE })
    }

    /// `Σ_{x ≠ 0} η(x²)`.
    pub fn char_sum_eta_squares(&self) -> HeckeCoeff {
        self.units().map(|x| self.eta(self.mul(x, x)).expect("unit").to_coeff()).sum()
    }

    pub fn format(&self, a: ResidueElem) -> String {
        if self.degree == 1 {
            return a.0.to_string();
        }
        let (a0, a1) = (a.0 % self.p, a.0 / self.p);
        match (a0, a1) {
            (a0, 0) => a0.to_string(),
            (0, 1) => "x".into(),
            (0, a1) => format!("{a1}x"),
            (a0, 1) => format!("{a0}+x"),
            (a0, a1) => format!("{a0}+{a1}x"),
        }
    }

    /// Generator of `x² = n` for quadratic extensions.
    pub fn defining_nonresidue(&self) -> Option<u32> {
        (self.degree == 2).then_some(self.nonresidue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    /// Smallest element of multiplicative order q−1, by brute-force powering
    /// with plain integer arithmetic (prime q only).
    fn brute_primitive_root(q: u64) -> u64 {
        (2..q)
            .find(|&g| {
                let mut x = 1;
                (1..q - 1).all(|_| {
                    x = x * g % q;
                    x != 1
                })
            })
            .unwrap()
    }

    #[test]
    fn canonical_generator_matches_brute_force() {
        for q in [5u32, 13, 17, 29, 37, 41] {
            let f = ResidueField::new(q).unwrap();
            assert_eq!(f.zeta().code() as u64, brute_primitive_root(q as u64), "q = {q}");
        }
        assert_eq!(ResidueField::new(5).unwrap().zeta().code(), 2);
        assert_eq!(ResidueField::new(13).unwrap().zeta().code(), 2);
    }

    #[test]
    fn rejects_inadmissible_q() {
        for q in [4u32, 7, 3, 2, 15, 21, 8, 81] {
            assert!(ResidueField::new(q).is_err(), "q = {q}");
        }
        assert!(matches!(ResidueField::new(4), Err(Error::InadmissibleQ { reason: "q must be odd", .. })));
        assert!(matches!(ResidueField::new(7), Err(Error::InadmissibleQ { reason: "4 must divide q - 1", .. })));
        // 45 ≡ 1 mod 4 but is not a prime power.
        assert!(matches!(ResidueField::new(45), Err(Error::InadmissibleQ { reason: "q must be a prime power", .. })));
    }

    #[test]
    fn quadratic_extension_is_a_field() {
        for q in [9u32, 25, 49] {
            let f = ResidueField::new(q).unwrap();
            assert_eq!(f.degree(), 2);
            for a in f.units() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), ResidueElem::ONE);
            }
            for a in f.elements() {
                for b in f.elements() {
                    for c in [f.zeta(), f.elem(q - 1), f.elem(3)] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn log_inverts_exp() {
        for q in [5u32, 9, 13, 17, 25] {
            let f = ResidueField::new(q).unwrap();
            for x in f.units() {
                assert_eq!(f.zeta_pow(f.log(x).unwrap() as i64), x);
            }
            assert_eq!(f.log(ResidueElem::ZERO), Err(Error::ZeroResidue));
        }
    }

    #[test]
    fn eta_examples() {
        let f = ResidueField::new(13).unwrap();
        let z = f.zeta();
        assert_eq!(f.eta(z).unwrap(), UnitI::I);
        assert_eq!(f.eta(f.mul(z, z)).unwrap(), UnitI::MINUS_ONE);
        assert_eq!(f.eta(ResidueElem::ONE).unwrap(), UnitI::ONE);
        assert!(f.eta(ResidueElem::ZERO).is_err());
    }

    #[test]
    fn sgn_examples() {
        let f = ResidueField::new(5).unwrap();
        assert_eq!(f.sgn(f.zeta()).unwrap(), UnitI::MINUS_ONE);
        assert_eq!(f.sgn(f.mul(f.zeta(), f.zeta())).unwrap(), UnitI::ONE);
        assert_eq!(f.sgn(f.from_int(4)).unwrap(), UnitI::ONE);
        assert!(f.sgn(ResidueElem::ZERO).is_err());
    }

    #[test]
    fn eta_is_an_order_four_character() {
        for q in [5u32, 9, 13, 17] {
            let f = ResidueField::new(q).unwrap();
            let mut image = std::collections::HashSet::new();
            for x in f.units() {
                image.insert(f.eta(x).unwrap());
                assert_eq!(f.sgn(x).unwrap(), f.eta(x).unwrap().pow(2));
                for y in f.units() {
                    assert_eq!(f.eta(f.mul(x, y)).unwrap(), f.eta(x).unwrap() * f.eta(y).unwrap());
                }
            }
            assert_eq!(image.len(), 4);
            assert!(f.units().any(|x| f.eta(x).unwrap().pow(2) != UnitI::ONE));
        }
    }

    #[test]
    fn eta_square_sums_vanish() {
        // Enumeration oracle: count squares-of-units by their η² value.
        for q in [5u32, 9, 13, 17, 29] {
            let f = ResidueField::new(q).unwrap();
            let (mut plus, mut minus) = (0, 0);
            for x in f.units() {
                let k = f.log(f.mul(x, x)).unwrap();
                assert_eq!(k % 2, 0);
                if k.is_multiple_of(4) {
                    plus += 1
                } else {
                    minus += 1
                }
            }
            assert_eq!(plus, minus, "q = {q}");
            assert!(f.char_sum_eta_squares().is_zero(), "q = {q}");
        }
    }

    #[test]
    fn alternative_generator() {
        let f = ResidueField::with_generator(5, 3).unwrap();
        assert_eq!(f.zeta().code(), 3);
        assert_eq!(f.eta(f.elem(3)).unwrap(), UnitI::I);
        assert!(ResidueField::with_generator(5, 4).is_err());
        assert!(ResidueField::with_generator(5, 0).is_err());
    }

    #[test]
    fn unit_i_arithmetic() {
        assert_eq!(UnitI::I * UnitI::I, UnitI::MINUS_ONE);
        assert_eq!(UnitI::I.inv(), UnitI::MINUS_I);
        assert_eq!(UnitI::MINUS_I.pow(-3), UnitI::MINUS_I.inv().pow(3));
        assert_eq!(UnitI::new(-1), UnitI::MINUS_I);
    }
}
