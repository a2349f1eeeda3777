//! The block model of `G̃⁰(F) = GL2(E2) × E4^×` and its compact subgroups.
//!
//! `G⁰(F)` is cut out by `N_{E2/F}(det g₂) · N_{E4/F}(g₄) = 1`; the ambient
//! `GL8` is never built.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::residue::{ResidueElem, UnitI};
use crate::tower::{FieldTag, LaurentElem, TowerRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SubgroupVariant {
    /// The full stabilizer `G⁰(F)_{x₀} = K̃⁰ ∩ G⁰(F)`.
    Stabilizer,
    /// The parahoric `G⁰(F)_{x₀,0}`.
    Parahoric,
}

impl SubgroupVariant {
    pub const ALL: [SubgroupVariant; 2] = [SubgroupVariant::Stabilizer, SubgroupVariant::Parahoric];

    pub fn name(self) -> &'static str {
        match self {
            SubgroupVariant::Stabilizer => "stabilizer",
            SubgroupVariant::Parahoric => "parahoric",
        }
    }
}

impl fmt::Display for SubgroupVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `[[a, b], [c, d]]` over one field of the tower.
#[derive(Clone, PartialEq)]
pub struct Mat2 {
    pub a: LaurentElem,
    pub b: LaurentElem,
    pub c: LaurentElem,
    pub d: LaurentElem,
}

impl Mat2 {
    pub fn new(a: LaurentElem, b: LaurentElem, c: LaurentElem, d: LaurentElem) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity(tower: &TowerRef, tag: FieldTag) -> Self {
        Mat2::diag(tower.one(tag), tower.one(tag))
    }

    pub fn diag(a: LaurentElem, d: LaurentElem) -> Self {
        let z = a.tower().zero(a.tag());
        Mat2 { a, b: z.clone(), c: z, d }
    }

    /// `[[0, b], [c, 0]]`.
    pub fn antidiag(b: LaurentElem, c: LaurentElem) -> Self {
        let z = b.tower().zero(b.tag());
        Mat2 { a: z.clone(), b, c, d: z }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn det(&self) -> LaurentElem {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn inv(&self) -> Result<Mat2> {
        let di = self.det().inv()?;
        Ok(Mat2 { a: &self.d * &di, b: -(&self.b * &di), c: -(&self.c * &di), d: &self.a * &di })
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, PartialEq)]
pub struct GroupElem {
    pub g2: Mat2,
    pub g4: LaurentElem,
}

/// Diagonal torus element `(diag(x, y), z)`.
#[derive(Clone, PartialEq)]
pub struct TorusElem {
    pub x: LaurentElem,
    pub y: LaurentElem,
    pub z: LaurentElem,
}

impl TorusElem {
    pub fn new(x: LaurentElem, y: LaurentElem, z: LaurentElem) -> Self {
        assert_eq!(x.tag(), FieldTag::E2);
        assert_eq!(y.tag(), FieldTag::E2);
        assert_eq!(z.tag(), FieldTag::E4);
        TorusElem { x, y, z }
    }

    /// Constant torus element with residue-field entries.
    pub fn constants(tower: &TowerRef, x: ResidueElem, y: ResidueElem, z: ResidueElem) -> Self {
        TorusElem::new(
            tower.constant(FieldTag::E2, x),
            tower.constant(FieldTag::E2, y),
            tower.constant(FieldTag::E4, z),
        )
    }

    pub fn to_group(&self) -> GroupElem {
        GroupElem { g2: Mat2::diag(self.x.clone(), self.y.clone()), g4: self.z.clone() }
    }
}

impl fmt::Debug for TorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl GroupElem {
    pub fn new(g2: Mat2, g4: LaurentElem) -> Self {
        assert_eq!(g2.a.tag(), FieldTag::E2);
        assert_eq!(g4.tag(), FieldTag::E4);
        GroupElem { g2, g4 }
    }

    pub fn tower(&self) -> &TowerRef {
        self.g4.tower()
    }

    pub fn identity(tower: &TowerRef) -> Self {
        GroupElem::new(Mat2::identity(tower, FieldTag::E2), tower.one(FieldTag::E4))
    }

    /// `s̃ = ((0 1; −1 0), 1)`.
    pub fn s_tilde(tower: &TowerRef) -> Self {
        GroupElem::new(Mat2::antidiag(tower.one(FieldTag::E2), tower.int(FieldTag::E2, -1)), tower.one(FieldTag::E4))
    }

    /// `s̃′ = ((0 π₂⁻¹; −π₂ 0), 1)`.
    pub fn s_prime_tilde(tower: &TowerRef) -> Self {
        let p = tower.uniformizer(FieldTag::E2);
        GroupElem::new(Mat2::antidiag(p.inv().expect("nonzero"), -p), tower.one(FieldTag::E4))
    }

    /// `z̃ = (diag(ζπ₂, π₂), π₄⁻²)`.
    pub fn z_tilde(tower: &TowerRef) -> Self {
        let p = tower.uniformizer(FieldTag::E2);
        let g4 = tower.uniformizer(FieldTag::E4).pow(-2).expect("nonzero");
        GroupElem::new(Mat2::diag(p.scale(tower.zeta()), p), g4)
    }

    /// `ε̃ = (diag(−1, 1), 1)`.
    pub fn epsilon_tilde(tower: &TowerRef) -> Self {
        TorusElem::new(tower.int(FieldTag::E2, -1), tower.one(FieldTag::E2), tower.one(FieldTag::E4)).to_group()
    }

    /// `u(x) = ((1 x; 0 1), 1)`.
    pub fn upper(x: LaurentElem) -> Self {
        let tw = x.tower().clone();
        GroupElem::new(
            Mat2::new(tw.one(FieldTag::E2), x, tw.zero(FieldTag::E2), tw.one(FieldTag::E2)),
            tw.one(FieldTag::E4),
        )
    }

    /// `((1 0; c 1), 1)`.
    pub fn lower(c: LaurentElem) -> Self {
        let tw = c.tower().clone();
        GroupElem::new(
            Mat2::new(tw.one(FieldTag::E2), tw.zero(FieldTag::E2), c, tw.one(FieldTag::E2)),
            tw.one(FieldTag::E4),
        )
    }

    pub fn mul(&self, o: &GroupElem) -> GroupElem {
        GroupElem { g2: self.g2.mul(&o.g2), g4: &self.g4 * &o.g4 }
    }

    pub fn inv(&self) -> Result<GroupElem> {
        Ok(GroupElem { g2: self.g2.inv()?, g4: self.g4.inv()? })
    }

    pub fn pow(&self, n: i64) -> Result<GroupElem> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = GroupElem::identity(self.tower());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, o: &GroupElem) -> Result<GroupElem> {
        Ok(self.mul(o).mul(&self.inv()?).mul(&o.inv()?))
    }

    /// `self · h · self⁻¹`.
    pub fn conjugate(&self, h: &GroupElem) -> Result<GroupElem> {
        Ok(self.mul(h).mul(&self.inv()?))
    }

    /// The diagonal part, when both off-diagonal entries vanish.
    pub fn as_torus(&self) -> Option<TorusElem> {
        (self.g2.b.is_negligible() && self.g2.c.is_negligible())
            .then(|| TorusElem::new(self.g2.a.clone(), self.g2.d.clone(), self.g4.clone()))
    }

    /// `N_{E2/F}(det g₂) · N_{E4/F}(g₄) = 1` up to precision.
    pub fn in_g0(&self) -> Result<bool> {
        let n = self.g2.det().norm_to_f()? * self.g4.norm_to_f()?;
        Ok(n == n.tower().one(FieldTag::F))
    }

    /// Membership in `I₂ × I₄`.
    pub fn in_iwahori(&self) -> Result<bool> {
        let m = &self.g2;
        Ok(m.a.is_unit()? && m.d.is_unit()? && m.b.is_integral()? && m.c.in_maximal_ideal()? && self.g4.is_unit()?)
    }

    /// `(det g₂ mod 𝔭)·(g₄ mod 𝔭)²` on `I₂ × I₄`; the parahoric is its kernel
    /// inside the stabilizer.
    pub fn chi(&self) -> Result<ResidueElem> {
        if !self.in_iwahori()? {
            return Err(Error::Membership(format!("{self} is not in I2 x I4")));
        }
        let f = self.tower().field();
        let r4 = self.g4.residue()?;
        Ok(f.mul(self.g2.det().residue()?, f.mul(r4, r4)))
    }

    pub fn in_k0(&self, v: SubgroupVariant) -> Result<bool> {
        if !self.in_iwahori()? || !self.in_g0()? {
            return Ok(false);
        }
        Ok(match v {
            SubgroupVariant::Stabilizer => true,
            SubgroupVariant::Parahoric => self.chi()? == ResidueElem::ONE,
        })
    }

    /// `ρ⁰(g) = η(N_{E2/F}(d))`.
    pub fn rho0(&self, v: SubgroupVariant) -> Result<UnitI> {
        if !self.in_k0(v)? {
            return Err(Error::Membership(format!("{self} is not in K0 ({v})")));
        }
        self.g2.d.norm_to_f()?.eta_f()
    }

    /// Factors `g = k₁ · m̂ · k₂` with `k₁, k₂ ∈ I₂ × I₄` and `m̂` monomial.
    pub fn iwahori_decompose(&self) -> Result<(GroupElem, MonomialData, GroupElem)> {
        iwahori_decompose(self)
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {})", self.g2, self.g4)
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GroupElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl TorusElem {
    pub fn in_km0(&self, v: SubgroupVariant) -> Result<bool> {
        if !(self.x.is_unit()? && self.y.is_unit()? && self.z.is_unit()?) {
            return Ok(false);
        }
        self.to_group().in_k0(v)
    }

    /// `ρ_{M⁰}(x, y, z) = η(N_{E2/F}(y))`.
    pub fn rho_m0(&self, v: SubgroupVariant) -> Result<UnitI> {
        if !self.in_km0(v)? {
            return Err(Error::Membership(format!("{self:?} is not in K_M0 ({v})")));
        }
        self.y.norm_to_f()?.eta_f()
    }
}

/// `m̂ = (diag(π₂^m, π₂^n), π₄^k)` or `((0 π₂^m; −π₂^n 0), π₄^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialData {
    pub antidiagonal: bool,
    pub m: i64,
    pub n: i64,
    pub k: i64,
}

impl MonomialData {
    pub fn to_group(self, tower: &TowerRef) -> GroupElem {
        let p = |e| tower.monomial(FieldTag::E2, ResidueElem::ONE, e);
        let g2 =
            if self.antidiagonal { Mat2::antidiag(p(self.m), -p(self.n)) } else { Mat2::diag(p(self.m), p(self.n)) };
        GroupElem::new(g2, tower.monomial(FieldTag::E4, ResidueElem::ONE, self.k))
    }
}

/// Entry weight `2·ord` shifted by the Iwahori filtration: `b` counts as
/// half a step deeper and `c` half a step shallower. Negligible entries never pivot.
fn pivot_weight(x: &LaurentElem, offset: i64) -> Option<i64> {
    x.ord_norm().ok().map(|v| 2 * v + offset)
}

fn elementary_upper(tower: &TowerRef, beta: LaurentElem) -> Mat2 {
    Mat2::new(tower.one(FieldTag::E2), beta, tower.zero(FieldTag::E2), tower.one(FieldTag::E2))
}

fn elementary_lower(tower: &TowerRef, gamma: LaurentElem) -> Mat2 {
    Mat2::new(tower.one(FieldTag::E2), tower.zero(FieldTag::E2), gamma, tower.one(FieldTag::E2))
}

fn iwahori_decompose(g: &GroupElem) -> Result<(GroupElem, MonomialData, GroupElem)> {
    let tw = g.tower().clone();
    let m = &g.g2;
    let weights = [pivot_weight(&m.a, 0), pivot_weight(&m.d, 0), pivot_weight(&m.b, 1), pivot_weight(&m.c, -1)];
    // Ties prefer the diagonal, then row order.
    let pivot = (0..4)
        .filter_map(|i| weights[i].map(|w| (w, i)))
        .min()
        .ok_or_else(|| Error::PrecisionExhausted(m.a.abs_precision().unwrap_or(0)))?
        .1;
    let mut left = Mat2::identity(&tw, FieldTag::E2);
    let mut right = Mat2::identity(&tw, FieldTag::E2);
    let mut cur = m.clone();
    let zero = tw.zero(FieldTag::E2);
    // Left op L: cur ← L·cur, left ← left·L⁻¹. Right op R: cur ← cur·R, right ← R⁻¹·right.
    match pivot {
        0 => {
            let gamma = cur.c.checked_div(&cur.a)?;
            cur = elementary_lower(&tw, -&gamma).mul(&cur);
            left = left.mul(&elementary_lower(&tw, gamma));
            let beta = cur.b.checked_div(&cur.a)?;
            cur = cur.mul(&elementary_upper(&tw, -&beta));
            right = elementary_upper(&tw, beta).mul(&right);
            cur.b = zero.clone();
            cur.c = zero;
        }
        1 => {
            let beta = cur.b.checked_div(&cur.d)?;
            cur = elementary_upper(&tw, -&beta).mul(&cur);
            left = left.mul(&elementary_upper(&tw, beta));
            let gamma = cur.c.checked_div(&cur.d)?;
            cur = cur.mul(&elementary_lower(&tw, -&gamma));
            right = elementary_lower(&tw, gamma).mul(&right);
            cur.b = zero.clone();
            cur.c = zero;
        }
        2 => {
            let gamma = cur.a.checked_div(&cur.b)?;
            cur = cur.mul(&elementary_lower(&tw, -&gamma));
            right = elementary_lower(&tw, gamma).mul(&right);
            let gamma = cur.d.checked_div(&cur.b)?;
            cur = elementary_lower(&tw, -&gamma).mul(&cur);
            left = left.mul(&elementary_lower(&tw, gamma));
            cur.a = zero.clone();
            cur.d = zero;
        }
        _ => {
            let beta = cur.a.checked_div(&cur.c)?;
            cur = elementary_upper(&tw, -&beta).mul(&cur);
            left = left.mul(&elementary_upper(&tw, beta));
            let beta = cur.d.checked_div(&cur.c)?;
            cur = cur.mul(&elementary_upper(&tw, -&beta));
            right = elementary_upper(&tw, beta).mul(&right);
            cur.a = zero.clone();
            cur.d = zero;
        }
    }
    let antidiagonal = pivot >= 2;
    let (e1, e2) = if antidiagonal { (cur.b.clone(), -&cur.c) } else { (cur.a.clone(), cur.d.clone()) };
    let (m_exp, n_exp, k_exp) = (e1.ord_norm()?, e2.ord_norm()?, g.g4.ord_norm()?);
    let u1 = e1.shift(-m_exp);
    let u2 = e2.shift(-n_exp);
    left = left.mul(&Mat2::diag(u1, u2));
    let mono = MonomialData { antidiagonal, m: m_exp, n: n_exp, k: k_exp };
    let k1 = GroupElem::new(left, g.g4.shift(-k_exp));
    let k2 = GroupElem::new(right, tw.one(FieldTag::E4));
    Ok((k1, mono, k2))
}

/// Random unit `w/σ₂(w)` of norm one in `E2`.
fn random_norm_one<R: Rng + ?Sized>(tower: &TowerRef, rng: &mut R) -> LaurentElem {
    let w = tower.random_unit(rng, FieldTag::E2);
    &w * &w.galois(1).expect("E2").inv().expect("unit")
}

/// A unit `y ∈ E2` with `N(y) = n` for an `F`-unit `n` of square residue.
/// `sign` picks between the two residues `±ȳ`.
fn norm_preimage<R: Rng + ?Sized>(tower: &TowerRef, rng: &mut R, n: &LaurentElem, sign: bool) -> Result<LaurentElem> {
    let y = tower.sqrt_f_unit(n)?.lift_to(FieldTag::E2)? * random_norm_one(tower, rng);
    Ok(if sign { -y } else { y })
}

/// Random element of `K_{M⁰}` for the given variant.
pub fn random_km0<R: Rng + ?Sized>(tower: &TowerRef, rng: &mut R, v: SubgroupVariant) -> Result<TorusElem> {
    let x = tower.random_unit(rng, FieldTag::E2);
    let z = tower.random_unit(rng, FieldTag::E4);
    let n = (x.norm_to_f()? * z.norm_to_f()?).inv()?;
    let sign = rng.gen_bool(0.5);
    let mut y = norm_preimage(tower, rng, &n, sign)?;
    let t = TorusElem::new(x.clone(), y.clone(), z.clone());
    if v == SubgroupVariant::Parahoric && t.to_group().chi()? != ResidueElem::ONE {
        y = -y;
    }
    Ok(TorusElem::new(x, y, z))
}

/// Random element of `I₂ × I₄` (no determinant condition).
pub fn random_iwahori<R: Rng + ?Sized>(tower: &TowerRef, rng: &mut R) -> GroupElem {
    let g2 = Mat2::new(
        tower.random_unit(rng, FieldTag::E2),
        tower.random_integral(rng, FieldTag::E2, 0),
        tower.random_integral(rng, FieldTag::E2, 1),
        tower.random_unit(rng, FieldTag::E2),
    );
    GroupElem::new(g2, tower.random_unit(rng, FieldTag::E4))
}

/// Random element of `K⁰` for the given variant.
pub fn random_k0<R: Rng + ?Sized>(tower: &TowerRef, rng: &mut R, v: SubgroupVariant) -> Result<GroupElem> {
    let g = random_iwahori(tower, rng);
    let n = (g.g2.det().norm_to_f()? * g.g4.norm_to_f()?).inv()?;
    let sign = rng.gen_bool(0.5);
    let y = norm_preimage(tower, rng, &n, sign)?;
    let one = tower.one(FieldTag::E2);
    let mut fix = GroupElem::new(Mat2::diag(y, one), tower.one(FieldTag::E4));
    if v == SubgroupVariant::Parahoric && fix.mul(&g).chi()? != ResidueElem::ONE {
        fix.g2.a = -&fix.g2.a;
    }
    Ok(fix.mul(&g))
}

/// Every residue triple `(x̄, ȳ, z̄)` allowed in `K_{M⁰}` has `sgn(x̄ȳ) = 1`.
///
/// The norm condition reduces to `(x̄ȳ)² z̄⁴ = 1`; the parahoric also
/// imposes `x̄ȳ z̄² = 1`.
pub fn epsilon_fks_trivial(tower: &TowerRef, v: SubgroupVariant) -> Result<bool> {
    let f = tower.field();
    let units: Vec<ResidueElem> = f.units().collect();
    for &x in &units {
        for &y in &units {
            let xy = f.mul(x, y);
            for &z in &units {
                let z2 = f.mul(z, z);
                let allowed = match v {
                    SubgroupVariant::Stabilizer => f.mul(f.mul(xy, xy), f.mul(z2, z2)) == ResidueElem::ONE,
                    SubgroupVariant::Parahoric => f.mul(xy, z2) == ResidueElem::ONE,
                };
                if allowed && f.sgn(xy)? != UnitI::ONE {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::Tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tower() -> TowerRef {
        Tower::with_q(5, 24).unwrap()
    }

    #[test]
    fn named_elements() {
        let tw = tower();
        let s = GroupElem::s_tilde(&tw);
        let minus =
            GroupElem::new(Mat2::diag(tw.int(FieldTag::E2, -1), tw.int(FieldTag::E2, -1)), tw.one(FieldTag::E4));
        assert_eq!(s.mul(&s), minus);
        let p = tw.uniformizer(FieldTag::E2);
        let ss = s.mul(&GroupElem::s_prime_tilde(&tw));
        let expect = GroupElem::new(Mat2::diag(-&p, -p.inv().unwrap()), tw.one(FieldTag::E4));
        assert_eq!(ss, expect);
        for g in [s, GroupElem::s_prime_tilde(&tw), GroupElem::z_tilde(&tw), GroupElem::epsilon_tilde(&tw)] {
            assert!(g.in_g0().unwrap(), "{g}");
        }
    }

    #[test]
    fn commutator_of_s_and_z() {
        let tw = tower();
        let c = GroupElem::s_tilde(&tw).commutator(&GroupElem::z_tilde(&tw)).unwrap();
        let zeta = tw.zeta_in(FieldTag::E2);
        let expect = TorusElem::new(zeta.inv().unwrap(), zeta, tw.one(FieldTag::E4));
        let t = c.as_torus().unwrap();
        assert_eq!(t, expect);
        for v in SubgroupVariant::ALL {
            assert!(t.in_km0(v).unwrap());
            assert_eq!(t.rho_m0(v).unwrap(), UnitI::MINUS_ONE);
        }
    }

    #[test]
    fn membership_examples() {
        let tw = tower();
        let f = tw.field();
        let x = tw.random_unit(&mut ChaCha8Rng::seed_from_u64(2), FieldTag::E2);
        assert!(GroupElem::upper(x).in_iwahori().unwrap());
        assert!(!GroupElem::s_tilde(&tw).in_iwahori().unwrap());
        assert!(GroupElem::lower(tw.uniformizer(FieldTag::E2)).in_iwahori().unwrap());

        let eps = GroupElem::epsilon_tilde(&tw);
        assert!(eps.in_k0(SubgroupVariant::Stabilizer).unwrap());
        assert!(!eps.in_k0(SubgroupVariant::Parahoric).unwrap());
        let z = GroupElem::z_tilde(&tw);
        assert!(!z.in_k0(SubgroupVariant::Stabilizer).unwrap());

        let m1 = f.from_int(-1);
        let t = TorusElem::constants(&tw, m1, m1, ResidueElem::ONE);
        assert!(t.in_km0(SubgroupVariant::Parahoric).unwrap());
        assert_eq!(t.rho_m0(SubgroupVariant::Parahoric).unwrap(), UnitI::ONE);
        let t = TorusElem::constants(&tw, f.zeta(), ResidueElem::ONE, ResidueElem::ONE);
        for v in SubgroupVariant::ALL {
            assert!(!t.in_km0(v).unwrap());
        }
        let u = GroupElem::upper(tw.one(FieldTag::E2));
        assert_eq!(u.rho0(SubgroupVariant::Parahoric).unwrap(), UnitI::ONE);
        assert!(matches!(z.rho0(SubgroupVariant::Stabilizer), Err(Error::Membership(_))));
    }

    #[test]
    fn decompose_lower_unipotent() {
        let tw = tower();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = tw.random_unit(&mut rng, FieldTag::E2);
        let g = GroupElem::lower(x.clone());
        let (k1, mono, k2) = g.iwahori_decompose().unwrap();
        assert_eq!(mono.to_group(&tw), GroupElem::s_tilde(&tw));
        let xi = x.inv().unwrap();
        let one = tw.one(FieldTag::E2);
        let e1 = GroupElem::new(Mat2::new(-&xi, -&one, tw.zero(FieldTag::E2), -&x), tw.one(FieldTag::E4));
        assert_eq!(k1, e1);
        assert_eq!(k2, GroupElem::upper(xi));
    }

    #[test]
    fn decompose_trivial_cases() {
        let tw = tower();
        let x = tw.random_integral(&mut ChaCha8Rng::seed_from_u64(9), FieldTag::E2, 0);
        let (_, mono, _) = GroupElem::upper(x).iwahori_decompose().unwrap();
        assert_eq!(mono, MonomialData { antidiagonal: false, m: 0, n: 0, k: 0 });
        let sp = GroupElem::s_prime_tilde(&tw);
        let (k1, mono, k2) = sp.iwahori_decompose().unwrap();
        assert_eq!(mono.to_group(&tw), sp);
        assert_eq!(k1, GroupElem::identity(&tw));
        assert_eq!(k2, GroupElem::identity(&tw));
    }

    #[test]
    fn decompose_roundtrips() {
        let tw = tower();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gens = [GroupElem::s_tilde(&tw), GroupElem::s_prime_tilde(&tw), GroupElem::z_tilde(&tw)];
        for _ in 0..60 {
            let mut g = random_iwahori(&tw, &mut rng);
            for _ in 0..rng.gen_range(0..5) {
                g = g.mul(&gens[rng.gen_range(0..3)]).mul(&random_iwahori(&tw, &mut rng));
            }
            let (k1, mono, k2) = g.iwahori_decompose().unwrap();
            assert!(k1.in_iwahori().unwrap() && k2.in_iwahori().unwrap());
            assert_eq!(k1.mul(&mono.to_group(&tw)).mul(&k2), g);
        }
    }

    #[test]
    fn characters_are_homomorphisms() {
        let tw = tower();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for v in SubgroupVariant::ALL {
            for _ in 0..200 {
                let a = random_k0(&tw, &mut rng, v).unwrap();
                let b = random_k0(&tw, &mut rng, v).unwrap();
                assert!(a.in_k0(v).unwrap());
                assert_eq!(a.mul(&b).rho0(v).unwrap(), a.rho0(v).unwrap() * b.rho0(v).unwrap());
            }
            for _ in 0..50 {
                let t = random_km0(&tw, &mut rng, v).unwrap();
                assert_eq!(t.to_group().rho0(v).unwrap(), t.rho_m0(v).unwrap());
            }
        }
        for _ in 0..50 {
            let a = random_iwahori(&tw, &mut rng);
            let b = random_iwahori(&tw, &mut rng);
            let f = tw.field();
            assert_eq!(a.mul(&b).chi().unwrap(), f.mul(a.chi().unwrap(), b.chi().unwrap()));
        }
    }

    #[test]
    fn commutator_is_lift_independent() {
        let tw = tower();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let s = GroupElem::s_tilde(&tw);
        let z = GroupElem::z_tilde(&tw);
        for v in SubgroupVariant::ALL {
            for _ in 0..40 {
                let k = random_km0(&tw, &mut rng, v).unwrap().to_group();
                let k2 = random_km0(&tw, &mut rng, v).unwrap().to_group();
                let c = s.mul(&k).commutator(&z.mul(&k2)).unwrap().as_torus().unwrap();
                assert!(c.in_km0(v).unwrap());
                assert_eq!(c.rho_m0(v).unwrap(), UnitI::MINUS_ONE);
            }
        }
    }

    #[test]
    fn normalizers_preserve_km0_and_rho() {
        let tw = tower();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let s = GroupElem::s_tilde(&tw);
        let z = GroupElem::z_tilde(&tw);
        for v in SubgroupVariant::ALL {
            for _ in 0..40 {
                let t = random_km0(&tw, &mut rng, v).unwrap();
                for n in [&s, &z] {
                    let c = n.conjugate(&t.to_group()).unwrap().as_torus().unwrap();
                    assert!(c.in_km0(v).unwrap());
                }
                let c = s.inv().unwrap().conjugate(&t.to_group()).unwrap().as_torus().unwrap();
                assert_eq!(c.rho_m0(v).unwrap(), t.rho_m0(v).unwrap());
            }
        }
    }

    #[test]
    fn epsilon_triviality() {
        for q in [5, 13, 9] {
            let tw = Tower::with_q(q, 8).unwrap();
            for v in SubgroupVariant::ALL {
                assert!(epsilon_fks_trivial(&tw, v).unwrap());
            }
        }
    }
}
