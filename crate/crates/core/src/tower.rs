//! Truncated Laurent series model of the tower `F = F_q((t))`, `E2`, `E4`
//! with `π₂² = −t` and `π₄⁴ = −ζt`.
//!
//! Every field in the tower is totally ramified over `F`, so an element of
//! `E` is a Laurent series in its own uniformizer `π_E` with coefficients in
//! `F_q`. Multiplication never needs the defining relation; it only enters
//! when moving between `F` and `E` ([`LaurentElem::lift_to`],
//! [`LaurentElem::norm_to_f`], [`LaurentElem::trace_to_f`]).
//!
//! An element carries `r ≤ N` known digits after its leading term, i.e. it is
//! `π^v (c₀ + c₁π + … + c_{r−1}π^{r−1}) + O(π^{v+r})`. Exact zero is a separate
//! state, and so is a value whose known digits all cancelled: the latter is
//! only known to be `O(π^k)` and every attempt to read its valuation fails
//! with [`Error::PrecisionExhausted`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::residue::{ResidueElem, ResidueField, UnitI};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FieldTag {
    F,
    E2,
    E4,
}

impl FieldTag {
    /// Ramification index over `F`.
    pub fn ramification(self) -> i64 {
        match self {
            FieldTag::F => 1,
            FieldTag::E2 => 2,
            FieldTag::E4 => 4,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldTag::F => "F",
            FieldTag::E2 => "E2",
            FieldTag::E4 => "E4",
        })
    }
}

/// A valuation normalized so that `ord(t) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(Ratio<i64>);

impl Valuation {
    pub fn new(num: i64, den: i64) -> Self {
        Valuation(Ratio::new(num, den))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Shared arithmetic context: residue field, relative precision cap `N`,
/// and the fixed fourth root of unity `i₄ = ζ^((q−1)/4)` defining `σ₄`.
#[derive(Debug)]
pub struct Tower {
    field: ResidueField,
    precision: usize,
    i4: ResidueElem,
}

pub type TowerRef = Arc<Tower>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Div,
}

impl Tower {
    pub fn new(field: ResidueField, precision: usize) -> Result<TowerRef> {
        if precision == 0 {
            return Err(Error::Config("precision must be positive".into()));
        }
        let i4 = field.zeta_pow((field.q() as i64 - 1) / 4);
        Ok(Arc::new(Tower { field, precision, i4 }))
    }

    pub fn with_q(q: u32, precision: usize) -> Result<TowerRef> {
        Tower::new(ResidueField::new(q)?, precision)
    }

    pub fn field(&self) -> &ResidueField {
        &self.field
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn zeta(&self) -> ResidueElem {
        self.field.zeta()
    }

    pub fn i4(&self) -> ResidueElem {
        self.i4
    }

    /// `κ` with `π_E^e = κ·t`: `−1` for `E2`, `−ζ` for `E4`.
    fn kappa(&self, tag: FieldTag) -> ResidueElem {
        let f = &self.field;
        match tag {
            FieldTag::F => ResidueElem::ONE,
            FieldTag::E2 => f.neg(ResidueElem::ONE),
            FieldTag::E4 => f.neg(f.zeta()),
        }
    }

    /// Root of unity `ω` with `σ(π_E) = ω·π_E`.
    fn galois_root(&self, tag: FieldTag) -> ResidueElem {
        match tag {
            FieldTag::F => ResidueElem::ONE,
            FieldTag::E2 => self.field.neg(ResidueElem::ONE),
            FieldTag::E4 => self.i4,
        }
    }

    pub fn zero(self: &Arc<Self>, tag: FieldTag) -> LaurentElem {
        LaurentElem { tower: self.clone(), tag, body: Body::Zero }
    }

    pub fn one(self: &Arc<Self>, tag: FieldTag) -> LaurentElem {
        self.monomial(tag, ResidueElem::ONE, 0)
    }

    pub fn constant(self: &Arc<Self>, tag: FieldTag, c: ResidueElem) -> LaurentElem {
        self.monomial(tag, c, 0)
    }

    pub fn int(self: &Arc<Self>, tag: FieldTag, n: i64) -> LaurentElem {
        self.constant(tag, self.field.from_int(n))
    }

    /// `c·π^exp` known to full relative precision.
    pub fn monomial(self: &Arc<Self>, tag: FieldTag, c: ResidueElem, exp: i64) -> LaurentElem {
        if c.is_zero() {
            return self.zero(tag);
        }
        let mut coeffs = vec![ResidueElem::ZERO; self.precision];
        coeffs[0] = c;
        LaurentElem { tower: self.clone(), tag, body: Body::Series { lead: exp, coeffs } }
    }

    pub fn uniformizer(self: &Arc<Self>, tag: FieldTag) -> LaurentElem {
        self.monomial(tag, ResidueElem::ONE, 1)
    }

    /// `ζ` as a constant of the given field.
    pub fn zeta_in(self: &Arc<Self>, tag: FieldTag) -> LaurentElem {
        self.constant(tag, self.zeta())
    }

    /// The base uniformizer `t` viewed in `tag`.
    pub fn t(self: &Arc<Self>, tag: FieldTag) -> LaurentElem {
        self.monomial(FieldTag::F, ResidueElem::ONE, 1).lift_to(tag).expect("F lifts")
    }

    /// `π^lead · Σ coeffs[j] π^j + O(π^(lead + coeffs.len()))`.
    ///
    /// Digits beyond the precision cap are dropped; leading zeros are
    /// absorbed into the exponent.
    pub fn series(self: &Arc<Self>, tag: FieldTag, lead: i64, coeffs: Vec<ResidueElem>) -> LaurentElem {
        let abs = lead + coeffs.len() as i64;
        self.normalize(tag, lead, coeffs, abs)
    }

    /// Like [`Tower::series`] but the listed digits are exact: missing
    /// digits up to the precision cap are zero.
    pub fn polynomial(self: &Arc<Self>, tag: FieldTag, lead: i64, coeffs: &[ResidueElem]) -> LaurentElem {
        let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
            return self.zero(tag);
        };
        let mut digits = coeffs[first..].to_vec();
        digits.resize(self.precision.max(digits.len()), ResidueElem::ZERO);
        digits.truncate(self.precision);
        LaurentElem { tower: self.clone(), tag, body: Body::Series { lead: lead + first as i64, coeffs: digits } }
    }

    fn normalize(self: &Arc<Self>, tag: FieldTag, lead: i64, mut coeffs: Vec<ResidueElem>, abs: i64) -> LaurentElem {
        let body = match coeffs.iter().position(|c| !c.is_zero()) {
            None => Body::Vanished(abs),
            Some(k) => {
                coeffs.drain(..k);
                coeffs.truncate(self.precision);
                Body::Series { lead: lead + k as i64, coeffs }
            }
        };
        LaurentElem { tower: self.clone(), tag, body }
    }

    pub fn random_unit<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R, tag: FieldTag) -> LaurentElem {
        let q = self.field.q();
        let mut coeffs: Vec<ResidueElem> = (0..self.precision).map(|_| self.field.elem(rng.gen_range(0..q))).collect();
        coeffs[0] = self.field.elem(rng.gen_range(1..q));
        LaurentElem { tower: self.clone(), tag, body: Body::Series { lead: 0, coeffs } }
    }

    /// `1 + w` with `w ∈ 𝔭` random.
    pub fn random_one_unit<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R, tag: FieldTag) -> LaurentElem {
        let u = self.random_unit(rng, tag);
        let mut coeffs = u.coeffs().to_vec();
        coeffs[0] = ResidueElem::ONE;
        self.series(tag, 0, coeffs)
    }

    /// A random element of valuation `ord_norm ≥ min_ord` (possibly zero).
    pub fn random_integral<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R, tag: FieldTag, min_ord: i64) -> LaurentElem {
        if rng.gen_ratio(1, 8) {
            return self.zero(tag);
        }
        let shift = min_ord + rng.gen_range(0..3);
        self.random_unit(rng, tag).shift(shift)
    }

    /// Square root of an `F`-unit whose residue is a square, normalized so
    /// that the residue of the root is `ζ^(k/2)` where the residue of `n` is `ζ^k`.
    pub fn sqrt_f_unit(self: &Arc<Self>, n: &LaurentElem) -> Result<LaurentElem> {
        if n.tag != FieldTag::F {
            return Err(Error::TagMismatch(n.tag, FieldTag::F));
        }
        if !n.is_unit()? {
            return Err(Error::Membership(format!("{n} is not a unit")));
        }
        let k = self.field.log(n.residue()?)?;
        if k % 2 == 1 {
            return Err(Error::Membership(format!("{n} has a non-square residue")));
        }
        let root0 = self.field.zeta_pow(k as i64 / 2);
        let u = n * &self.constant(FieldTag::F, self.field.inv(self.field.mul(root0, root0))?);
        // y² = u with y₀ = 1: 2y_k = u_k − Σ_{0<i<k} y_i y_{k−i}.
        let f = &self.field;
        let uc = u.coeffs();
        let half = f.inv(f.from_int(2))?;
        let mut y = vec![ResidueElem::ZERO; uc.len()];
        y[0] = ResidueElem::ONE;
        for k in 1..uc.len() {
            let mut acc = uc[k];
            for i in 1..k {
                acc = f.sub(acc, f.mul(y[i], y[k - i]));
            }
            y[k] = f.mul(acc, half);
        }
        let root = self.series(FieldTag::F, 0, y);
        Ok(&root * &self.constant(FieldTag::F, root0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    Zero,
    /// All known digits cancelled: the value is `O(π^k)`.
    Vanished(i64),
    Series {
        lead: i64,
        coeffs: Vec<ResidueElem>,
    },
}

#[derive(Clone)]
pub struct LaurentElem {
    tower: TowerRef,
    tag: FieldTag,
    body: Body,
}

impl LaurentElem {
    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn tower(&self) -> &TowerRef {
        &self.tower
    }

    pub fn is_exact_zero(&self) -> bool {
        self.body == Body::Zero
    }

    /// True when the value is indistinguishable from zero: exact zero or
    /// precision exhausted.
    pub fn is_negligible(&self) -> bool {
        !matches!(self.body, Body::Series { .. })
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.body, Body::Vanished(_))
    }

    /// Known digits after the leading term (empty unless a series).
    pub fn coeffs(&self) -> &[ResidueElem] {
        match &self.body {
            Body::Series { coeffs, .. } => coeffs,
            _ => &[],
        }
    }

    /// Exponent up to which the value is known; `None` for exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.body {
            Body::Zero => None,
            Body::Vanished(a) => Some(*a),
            Body::Series { lead, coeffs } => Some(lead + coeffs.len() as i64),
        }
    }

    pub fn ord_norm(&self) -> Result<i64> {
        match &self.body {
            Body::Zero => Err(Error::ZeroElement),
            Body::Vanished(a) => Err(Error::PrecisionExhausted(*a)),
            Body::Series { lead, .. } => Ok(*lead),
        }
    }

    pub fn ord(&self) -> Result<Valuation> {
        Ok(Valuation::new(self.ord_norm()?, self.tag.ramification()))
    }

    /// Decides `ord_norm ≥ k`, failing only when the known digits run out first.
    pub fn ord_at_least(&self, k: i64) -> Result<bool> {
        match &self.body {
            Body::Zero => Ok(true),
            Body::Series { lead, .. } => Ok(*lead >= k),
            Body::Vanished(a) if *a >= k => Ok(true),
            Body::Vanished(a) => Err(Error::PrecisionExhausted(*a)),
        }
    }

    pub fn is_integral(&self) -> Result<bool> {
        self.ord_at_least(0)
    }

    pub fn in_maximal_ideal(&self) -> Result<bool> {
        self.ord_at_least(1)
    }

    pub fn is_unit(&self) -> Result<bool> {
        match &self.body {
            Body::Zero => Ok(false),
            Body::Series { lead, .. } => Ok(*lead == 0),
            Body::Vanished(a) if *a >= 1 => Ok(false),
            Body::Vanished(a) => Err(Error::PrecisionExhausted(*a)),
        }
    }

    /// Image in the residue field of an integral element.
    pub fn residue(&self) -> Result<ResidueElem> {
        if !self.is_integral()? {
            return Err(Error::Membership(format!("{self} is not integral")));
        }
        match &self.body {
            Body::Series { lead: 0, coeffs } => Ok(coeffs[0]),
            Body::Vanished(a) if *a < 1 => Err(Error::PrecisionExhausted(*a)),
            _ => Ok(ResidueElem::ZERO),
        }
    }

    /// Leading coefficient of a nonzero element.
    pub fn leading_coeff(&self) -> Result<ResidueElem> {
        self.ord_norm()?;
        Ok(self.coeffs()[0])
    }

    /// Multiplication by `π^n`.
    pub fn shift(&self, n: i64) -> LaurentElem {
        let body = match &self.body {
            Body::Zero => Body::Zero,
            Body::Vanished(a) => Body::Vanished(a + n),
            Body::Series { lead, coeffs } => Body::Series { lead: lead + n, coeffs: coeffs.clone() },
        };
        LaurentElem { tower: self.tower.clone(), tag: self.tag, body }
    }

    /// Multiplication by a residue-field scalar.
    pub fn scale(&self, c: ResidueElem) -> LaurentElem {
        let f = self.tower.field();
        match &self.body {
            Body::Series { lead, coeffs } if !c.is_zero() => LaurentElem {
                tower: self.tower.clone(),
                tag: self.tag,
                body: Body::Series { lead: *lead, coeffs: coeffs.iter().map(|&x| f.mul(x, c)).collect() },
            },
            Body::Series { .. } => self.tower.zero(self.tag),
            _ => self.clone(),
        }
    }

    fn check_tag(&self, other: &LaurentElem) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::TagMismatch(self.tag, other.tag));
        }
        Ok(())
    }

    fn sum(&self, other: &LaurentElem) -> LaurentElem {
        assert_eq!(self.tag, other.tag, "adding elements of different fields");
        let tower = &self.tower;
        match (&self.body, &other.body) {
            (Body::Zero, _) => other.clone(),
            (_, Body::Zero) => self.clone(),
            (Body::Vanished(a), Body::Vanished(b)) => {
                LaurentElem { tower: tower.clone(), tag: self.tag, body: Body::Vanished(*a.min(b)) }
            }
            (Body::Vanished(a), Body::Series { lead, coeffs }) | (Body::Series { lead, coeffs }, Body::Vanished(a)) => {
                let abs = (*a).min(lead + coeffs.len() as i64);
                if *lead >= abs {
                    return LaurentElem { tower: tower.clone(), tag: self.tag, body: Body::Vanished(abs) };
                }
                tower.normalize(self.tag, *lead, coeffs[..(abs - lead) as usize].to_vec(), abs)
            }
            (Body::Series { lead: l1, coeffs: c1 }, Body::Series { lead: l2, coeffs: c2 }) => {
                let abs = (l1 + c1.len() as i64).min(l2 + c2.len() as i64);
                let lo = *l1.min(l2);
                if lo >= abs {
                    return LaurentElem { tower: tower.clone(), tag: self.tag, body: Body::Vanished(abs) };
                }
                let f = tower.field();
                let mut out = vec![ResidueElem::ZERO; (abs - lo) as usize];
                for (l, c) in [(*l1, c1), (*l2, c2)] {
                    let start = ((l - lo) as usize).min(out.len());
                    for (slot, &x) in out[start..].iter_mut().zip(c.iter()) {
                        *slot = f.add(*slot, x);
                    }
                }
                tower.normalize(self.tag, lo, out, abs)
            }
        }
    }

    fn product(&self, other: &LaurentElem) -> LaurentElem {
        assert_eq!(self.tag, other.tag, "multiplying elements of different fields");
        let body = match (&self.body, &other.body) {
            (Body::Zero, _) | (_, Body::Zero) => Body::Zero,
            (Body::Vanished(a), Body::Vanished(b)) => Body::Vanished(a + b),
            (Body::Vanished(a), Body::Series { lead, .. }) | (Body::Series { lead, .. }, Body::Vanished(a)) => {
                Body::Vanished(a + lead)
            }
            (Body::Series { lead: l1, coeffs: c1 }, Body::Series { lead: l2, coeffs: c2 }) => {
                let f = self.tower.field();
                let r = c1.len().min(c2.len());
                let mut out = vec![ResidueElem::ZERO; r];
                // Exact polynomials carry long runs of trailing zero digits.
                let n1 = significant_len(&c1[..r]);
                let n2 = significant_len(&c2[..r]);
                for (i, &a) in c1[..n1].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, &b) in c2[..n2.min(r - i)].iter().enumerate() {
                        if !b.is_zero() {
                            out[i + j] = f.add(out[i + j], f.mul(a, b));
                        }
                    }
                }
                Body::Series { lead: l1 + l2, coeffs: out }
            }
        };
        LaurentElem { tower: self.tower.clone(), tag: self.tag, body }
    }

    pub fn inv(&self) -> Result<LaurentElem> {
        match &self.body {
            Body::Zero => Err(Error::DivisionByZero),
            Body::Vanished(a) => Err(Error::PrecisionExhausted(*a)),
            Body::Series { lead, coeffs } => {
                let f = self.tower.field();
                let c0_inv = f.inv(coeffs[0])?;
                let nonzero: Vec<(usize, ResidueElem)> =
                    coeffs.iter().copied().enumerate().skip(1).filter(|(_, c)| !c.is_zero()).collect();
                let mut out = vec![ResidueElem::ZERO; coeffs.len()];
                out[0] = c0_inv;
                for k in 1..coeffs.len() {
                    let mut acc = ResidueElem::ZERO;
                    for &(j, c) in nonzero.iter().take_while(|(j, _)| *j <= k) {
                        acc = f.add(acc, f.mul(c, out[k - j]));
                    }
                    out[k] = f.neg(f.mul(acc, c0_inv));
                }
                Ok(LaurentElem {
                    tower: self.tower.clone(),
                    tag: self.tag,
                    body: Body::Series { lead: -lead, coeffs: out },
                })
            }
        }
    }

    pub fn checked_div(&self, other: &LaurentElem) -> Result<LaurentElem> {
        self.check_tag(other)?;
        Ok(self.product(&other.inv()?))
    }

    pub fn pow(&self, n: i64) -> Result<LaurentElem> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut base = self.clone();
        let mut acc = self.tower.one(self.tag);
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.product(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.product(&base);
            }
        }
        Ok(acc)
    }

    /// Field arithmetic with every failure mode surfaced: mismatched fields,
    /// division by zero, and results whose known digits all cancelled.
    pub fn arith(&self, other: &LaurentElem, kind: ArithKind) -> Result<LaurentElem> {
        self.check_tag(other)?;
        let out = match kind {
            ArithKind::Add => self.sum(other),
            ArithKind::Sub => self.sum(&-other),
            ArithKind::Mul => self.product(other),
            ArithKind::Div => self.checked_div(other)?,
        };
        match out.body {
            Body::Vanished(a) => Err(Error::PrecisionExhausted(a)),
            _ => Ok(out),
        }
    }

    /// `σ^k` where `σ` generates `Gal(E/F)`: `π₂ ↦ −π₂`, `π₄ ↦ i₄π₄`.
    pub fn galois(&self, k: i64) -> Result<LaurentElem> {
        let e = self.tag.ramification();
        if self.tag == FieldTag::F {
            return if k == 0 { Ok(self.clone()) } else { Err(Error::GaloisOnBase(k)) };
        }
        let Body::Series { lead, coeffs } = &self.body else {
            return Ok(self.clone());
        };
        let f = self.tower.field();
        let omega = self.tower.galois_root(self.tag);
        let k = k.rem_euclid(e);
        let powers: Vec<ResidueElem> = (0..e).map(|i| f.pow(omega, i).expect("root of unity")).collect();
        let coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| f.mul(c, powers[((lead + j as i64) * k).rem_euclid(e) as usize]))
            .collect();
        Ok(LaurentElem { tower: self.tower.clone(), tag: self.tag, body: Body::Series { lead: *lead, coeffs } })
    }

    /// Image of an `F` element in `E` via `t = κ⁻¹π^e`.
    pub fn lift_to(&self, tag: FieldTag) -> Result<LaurentElem> {
        if self.tag != FieldTag::F {
            if self.tag == tag {
                return Ok(self.clone());
            }
            return Err(Error::TagMismatch(self.tag, FieldTag::F));
        }
        let tower = &self.tower;
        let e = tag.ramification();
        let body = match &self.body {
            Body::Zero => Body::Zero,
            Body::Vanished(a) => Body::Vanished(a * e),
            Body::Series { lead, coeffs } => {
                let f = tower.field();
                let kappa_inv = f.inv(tower.kappa(tag))?;
                let len = (coeffs.len() * e as usize).min(tower.precision);
                let mut out = vec![ResidueElem::ZERO; len];
                let mut scale = f.pow(kappa_inv, *lead)?;
                for (j, &c) in coeffs.iter().enumerate() {
                    let idx = j * e as usize;
                    if idx >= len {
                        break;
                    }
                    out[idx] = f.mul(c, scale);
                    scale = f.mul(scale, kappa_inv);
                }
                Body::Series { lead: lead * e, coeffs: out }
            }
        };
        Ok(LaurentElem { tower: tower.clone(), tag, body })
    }

    /// Rewrites an element of `E` lying in `F` as a series in `t`.
    fn descend(&self) -> Result<LaurentElem> {
        let tower = &self.tower;
        let e = self.tag.ramification();
        let body = match &self.body {
            Body::Zero => Body::Zero,
            Body::Vanished(a) => Body::Vanished(Integer::div_ceil(a, &e)),
            Body::Series { lead, coeffs } => {
                let f = tower.field();
                let kappa = tower.kappa(self.tag);
                let abs = Integer::div_ceil(&(lead + coeffs.len() as i64), &e);
                if lead.rem_euclid(e) != 0 {
                    return Err(Error::NotInBaseField(self.to_string()));
                }
                let t_lead = lead / e;
                let mut out = vec![ResidueElem::ZERO; (abs - t_lead) as usize];
                for (j, &c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let exp = lead + j as i64;
                    if exp.rem_euclid(e) != 0 {
                        return Err(Error::NotInBaseField(self.to_string()));
                    }
                    let k = exp / e;
                    out[(k - t_lead) as usize] = f.mul(c, f.pow(kappa, k)?);
                }
                return Ok(tower.normalize(FieldTag::F, t_lead, out, abs));
            }
        };
        Ok(LaurentElem { tower: tower.clone(), tag: FieldTag::F, body })
    }

    /// `N_{E/F}`: product of all Galois conjugates (identity on `F`).
    pub fn norm_to_f(&self) -> Result<LaurentElem> {
        if self.tag == FieldTag::F {
            return Ok(self.clone());
        }
        let mut acc = self.clone();
        for k in 1..self.tag.ramification() {
            acc = acc.product(&self.galois(k)?);
        }
        acc.descend()
    }

    /// `Tr_{E/F}`: sum of all Galois conjugates (identity on `F`).
    pub fn trace_to_f(&self) -> Result<LaurentElem> {
        if self.tag == FieldTag::F {
            return Ok(self.clone());
        }
        let mut acc = self.clone();
        for k in 1..self.tag.ramification() {
            acc = acc.sum(&self.galois(k)?);
        }
        acc.descend()
    }

    /// The character `η` on `F^×`: trivial on `t` and on `1 + 𝔭_F`, with `η(ζ) = i`.
    pub fn eta_f(&self) -> Result<UnitI> {
        if self.tag != FieldTag::F {
            return Err(Error::TagMismatch(self.tag, FieldTag::F));
        }
        self.tower.field().eta(self.leading_coeff()?)
    }
}

/// Length of `c` without its trailing zero digits.
fn significant_len(c: &[ResidueElem]) -> usize {
    c.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1)
}

impl PartialEq for LaurentElem {
    /// Equality up to the known digits of both sides.
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && (self - other).is_negligible()
    }
}

impl fmt::Display for LaurentElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 8;
        let field = self.tower.field();
        match &self.body {
            Body::Zero => write!(f, "{}: 0", self.tag),
            Body::Vanished(a) => write!(f, "{}: O(π^{a})", self.tag),
            Body::Series { lead, coeffs } => {
                let terms: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, &c)| {
                        let c = field.format(c);
                        match j {
                            0 => c,
                            1 => format!("{c}·π"),
                            j => format!("{c}·π^{j}"),
                        }
                    })
                    .collect();
                let tail = if terms.len() > SHOWN { " + …" } else { "" };
                write!(f, "{}: π^{lead} · ({}{tail})", self.tag, terms[..terms.len().min(SHOWN)].join(" + "))
            }
        }
    }
}

impl fmt::Debug for LaurentElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for LaurentElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Neg for &LaurentElem {
    type Output = LaurentElem;
    fn neg(self) -> LaurentElem {
        let m1 = self.tower.field().neg(ResidueElem::ONE);
        self.scale(m1)
    }
}

impl Neg for LaurentElem {
    type Output = LaurentElem;
    fn neg(self) -> LaurentElem {
        -&self
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&LaurentElem> for &LaurentElem {
            type Output = LaurentElem;
            fn $method(self, rhs: &LaurentElem) -> LaurentElem {
                $body(self, rhs)
            }
        }
        impl $trait<LaurentElem> for LaurentElem {
            type Output = LaurentElem;
            fn $method(self, rhs: LaurentElem) -> LaurentElem {
                $body(&self, &rhs)
            }
        }
        impl $trait<&LaurentElem> for LaurentElem {
            type Output = LaurentElem;
            fn $method(self, rhs: &LaurentElem) -> LaurentElem {
                $body(&self, rhs)
            }
        }
    };
}

// Operators panic on mismatched fields; `arith` reports it as an error.
forward_binop!(Add, add, |a: &LaurentElem, b: &LaurentElem| a.sum(b));
forward_binop!(Sub, sub, |a: &LaurentElem, b: &LaurentElem| a.sum(&-b));
forward_binop!(Mul, mul, |a: &LaurentElem, b: &LaurentElem| a.product(b));

/// Samples units of `E` and reports whether `η²∘N_{E2/F}` (for `E2`) or
/// `η∘N_{E4/F}` (for `E4`) is trivial on all of them. Every residue class is
/// covered, both as a bare constant and with `random_per_class` random
/// higher-order tails.
pub fn norm_unit_image_check<R: Rng + ?Sized>(
    tower: &TowerRef,
    tag: FieldTag,
    rng: &mut R,
    random_per_class: usize,
) -> Result<bool> {
    let power = match tag {
        FieldTag::E2 => 2,
        FieldTag::E4 => 1,
        FieldTag::F => return Err(Error::TagMismatch(tag, FieldTag::E2)),
    };
    for c in tower.field().units() {
        let base = tower.constant(tag, c);
        let mut samples = vec![base.clone(), &base * &(tower.one(tag) + tower.uniformizer(tag))];
        for _ in 0..random_per_class {
            samples.push(&base * &tower.random_one_unit(rng, tag));
        }
        for u in samples {
            if u.norm_to_f()?.eta_f()?.pow(power) != UnitI::ONE {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tower(q: u32) -> TowerRef {
        Tower::with_q(q, 40).unwrap()
    }

    #[test]
    fn uniformizer_relations() {
        let tw = tower(5);
        let p2 = tw.uniformizer(FieldTag::E2);
        let minus_t = -tw.t(FieldTag::E2);
        assert_eq!(&p2 * &p2, minus_t);
        let sq = &p2 * &p2;
        assert_eq!(sq.ord_norm().unwrap(), 2);
        assert_eq!(sq.leading_coeff().unwrap(), ResidueElem::ONE);
        assert_eq!(tw.t(FieldTag::E2).leading_coeff().unwrap(), tw.field().from_int(-1));

        let p4 = tw.uniformizer(FieldTag::E4);
        let zt = tw.zeta_in(FieldTag::E4) * tw.t(FieldTag::E4);
        assert_eq!(p4.pow(4).unwrap(), -zt);
    }

    #[test]
    fn cancellation_shifts_the_lead() {
        let tw = tower(5);
        let one = tw.one(FieldTag::E2);
        let x = &one + &tw.uniformizer(FieldTag::E2);
        let d = x.arith(&one, ArithKind::Sub).unwrap();
        assert_eq!(d, tw.uniformizer(FieldTag::E2));
        assert_eq!(d.ord_norm().unwrap(), 1);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let tw = tower(5);
        let x = tw.random_unit(&mut ChaCha8Rng::seed_from_u64(1), FieldTag::E4);
        assert_eq!(x.arith(&x, ArithKind::Sub), Err(Error::PrecisionExhausted(40)));
        let v = &x - &x;
        assert!(v.is_exhausted());
        assert_eq!(v.ord(), Err(Error::PrecisionExhausted(40)));
        assert!(v.in_maximal_ideal().unwrap());
        assert!(!v.is_unit().unwrap());
        assert_eq!(tw.zero(FieldTag::F).ord(), Err(Error::ZeroElement));
        assert_eq!(x.arith(&tw.zero(FieldTag::E4), ArithKind::Div), Err(Error::DivisionByZero));
        assert!(matches!(
            x.arith(&tw.one(FieldTag::E2), ArithKind::Add),
            Err(Error::TagMismatch(FieldTag::E4, FieldTag::E2))
        ));
    }

    #[test]
    fn valuations() {
        let tw = tower(13);
        let p4 = tw.uniformizer(FieldTag::E4);
        assert_eq!(p4.ord().unwrap(), Valuation::new(1, 4));
        assert_eq!(p4.ord_norm().unwrap(), 1);
        assert_eq!(p4.pow(-2).unwrap().ord_norm().unwrap(), -2);
        let t2 = tw.t(FieldTag::E2);
        assert_eq!(t2.ord().unwrap(), Valuation::new(1, 1));
        assert_eq!(t2.ord_norm().unwrap(), 2);
    }

    #[test]
    fn galois_examples() {
        let tw = tower(5);
        let p2 = tw.uniformizer(FieldTag::E2);
        assert_eq!(p2.galois(1).unwrap(), -&p2);
        let p4 = tw.uniformizer(FieldTag::E4);
        assert_eq!(p4.galois(1).unwrap().pow(4).unwrap(), p4.pow(4).unwrap());
        assert_eq!(p4.galois(1).unwrap(), p4.scale(tw.i4()));

        // σ₂(a + bπ₂) = a − bπ₂ for a, b ∈ F.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = tw.random_unit(&mut rng, FieldTag::F).lift_to(FieldTag::E2).unwrap();
        let b = tw.random_unit(&mut rng, FieldTag::F).lift_to(FieldTag::E2).unwrap();
        let x = &a + &(&b * &p2);
        assert_eq!(x.galois(1).unwrap(), &a - &(&b * &p2));

        assert_eq!(tw.one(FieldTag::F).galois(1), Err(Error::GaloisOnBase(1)));
    }

    #[test]
    fn norm_and_trace_examples() {
        let tw = tower(5);
        let f = tw.field();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // N(a + bπ₂) = a² + t b².
        let a = tw.random_unit(&mut rng, FieldTag::F);
        let b = tw.random_unit(&mut rng, FieldTag::F);
        let x = a.lift_to(FieldTag::E2).unwrap() + b.lift_to(FieldTag::E2).unwrap() * tw.uniformizer(FieldTag::E2);
        let expect = &(&a * &a) + &(&tw.t(FieldTag::F) * &(&b * &b));
        assert_eq!(x.norm_to_f().unwrap(), expect);

        // N(π₄) = i₄^(0+1+2+3)·π₄⁴ = ζt.
        let n = tw.uniformizer(FieldTag::E4).norm_to_f().unwrap();
        assert_eq!(n, tw.zeta_in(FieldTag::F) * tw.t(FieldTag::F));
        assert_eq!(tw.uniformizer(FieldTag::E2).norm_to_f().unwrap(), tw.t(FieldTag::F));

        assert_eq!(tw.one(FieldTag::E4).trace_to_f().unwrap(), tw.int(FieldTag::F, 4));
        assert_eq!(tw.one(FieldTag::E2).trace_to_f().unwrap(), tw.int(FieldTag::F, 2));
        assert!(tw.uniformizer(FieldTag::E4).trace_to_f().unwrap().is_negligible());
        assert_eq!(f.from_int(4), tw.one(FieldTag::E4).trace_to_f().unwrap().residue().unwrap());
    }

    #[test]
    fn eta_f_examples() {
        let tw = tower(13);
        let f = tw.field();
        assert_eq!(tw.t(FieldTag::F).eta_f().unwrap(), UnitI::ONE);
        let z2 = tw.constant(FieldTag::F, f.mul(f.zeta(), f.zeta()));
        assert_eq!(z2.eta_f().unwrap(), UnitI::MINUS_ONE);
        let one_t3 = tw.one(FieldTag::F) + tw.t(FieldTag::F).pow(3).unwrap();
        assert_eq!((tw.zeta_in(FieldTag::F) * one_t3).eta_f().unwrap(), UnitI::I);
        assert_eq!(tw.zero(FieldTag::F).eta_f(), Err(Error::ZeroElement));
    }

    #[test]
    fn norm_unit_images() {
        for q in [5, 13, 17, 9] {
            let tw = tower(q);
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            assert!(norm_unit_image_check(&tw, FieldTag::E2, &mut rng, 3).unwrap());
            assert!(norm_unit_image_check(&tw, FieldTag::E4, &mut rng, 3).unwrap());
        }
        // η∘N_{E2/F} alone is not trivial on units: N(ζ) = ζ², η(ζ²) = −1.
        let tw = tower(5);
        let n = tw.zeta_in(FieldTag::E2).norm_to_f().unwrap();
        assert_eq!(n.eta_f().unwrap(), UnitI::MINUS_ONE);
        let one_p = tw.one(FieldTag::E2) + tw.uniformizer(FieldTag::E2);
        assert_eq!(one_p.norm_to_f().unwrap(), tw.one(FieldTag::F) + tw.t(FieldTag::F));
    }

    #[test]
    fn sqrt_of_square_class_units() {
        let tw = tower(13);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let y = tw.random_unit(&mut rng, FieldTag::F);
            let n = &y * &y;
            let r = tw.sqrt_f_unit(&n).unwrap();
            assert_eq!(&r * &r, n);
        }
        assert!(tw.sqrt_f_unit(&tw.zeta_in(FieldTag::F)).is_err());
    }

    #[test]
    fn display_format() {
        let tw = tower(5);
        let x = tw.polynomial(FieldTag::E2, -1, &[tw.field().from_int(3), ResidueElem::ZERO, ResidueElem::ONE]);
        assert_eq!(x.to_string(), "E2: π^-1 · (3 + 1·π^2)");
        assert_eq!(tw.zero(FieldTag::F).to_string(), "F: 0");
    }
}
