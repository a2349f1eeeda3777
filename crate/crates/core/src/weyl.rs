//! The group `W(ρ_{M⁰}) = ⟨s, s′⟩ × ⟨z⟩ (× ⟨ε⟩)`.
//!
//! `⟨s, s′⟩` is infinite dihedral; `z` and `ε` are central and written on
//! the right of the normal form.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groupmodel::{GroupElem, SubgroupVariant, TorusElem};
use crate::hnf::{integer_kernel, Lattice};
use crate::tower::{FieldTag, TowerRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    S,
    SPrime,
}

impl Gen {
    pub fn other(self) -> Gen {
        match self {
            Gen::S => Gen::SPrime,
            Gen::SPrime => Gen::S,
        }
    }

    pub fn lift(self, tower: &TowerRef) -> GroupElem {
        match self {
            Gen::S => GroupElem::s_tilde(tower),
            Gen::SPrime => GroupElem::s_prime_tilde(tower),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::S => "s",
            Gen::SPrime => "s'",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeylElem {
    word: Vec<Gen>,
    zexp: i64,
    ebit: bool,
}

impl WeylElem {
    pub fn identity() -> Self {
        WeylElem::default()
    }

    pub fn gen(g: Gen) -> Self {
        WeylElem { word: vec![g], zexp: 0, ebit: false }
    }

    pub fn s() -> Self {
        WeylElem::gen(Gen::S)
    }

    pub fn s_prime() -> Self {
        WeylElem::gen(Gen::SPrime)
    }

    pub fn z() -> Self {
        WeylElem { word: Vec::new(), zexp: 1, ebit: false }
    }

    pub fn e() -> Self {
        WeylElem { word: Vec::new(), zexp: 0, ebit: true }
    }

    /// Alternating word of the given length starting with `first`.
    pub fn alternating(first: Gen, len: usize) -> Self {
        let word = (0..len).map(|i| if i % 2 == 0 { first } else { first.other() }).collect();
        WeylElem { word, zexp: 0, ebit: false }
    }

    pub fn from_parts(word: Vec<Gen>, zexp: i64, ebit: bool) -> Self {
        let mut w = WeylElem { word: Vec::new(), zexp, ebit };
        for g in word {
            w.push(g);
        }
        w
    }

    pub fn word(&self) -> &[Gen] {
        &self.word
    }

    pub fn zexp(&self) -> i64 {
        self.zexp
    }

    pub fn ebit(&self) -> bool {
        self.ebit
    }

    fn push(&mut self, g: Gen) {
        if self.word.last() == Some(&g) {
            self.word.pop();
        } else {
            self.word.push(g);
        }
    }

    pub fn mul(&self, o: &WeylElem) -> WeylElem {
        let mut out = self.clone();
        for &g in &o.word {
            out.push(g);
        }
        out.zexp += o.zexp;
        out.ebit ^= o.ebit;
        out
    }

    pub fn inv(&self) -> WeylElem {
        WeylElem { word: self.word.iter().rev().copied().collect(), zexp: -self.zexp, ebit: self.ebit }
    }

    pub fn pow(&self, n: i64) -> WeylElem {
        let base = if n < 0 { self.inv() } else { self.clone() };
        (0..n.unsigned_abs()).fold(WeylElem::identity(), |acc, _| acc.mul(&base))
    }

    /// Length of the reduced word; `z` and `ε` have length zero.
    pub fn plength(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty() && self.zexp == 0 && !self.ebit
    }

    /// The dihedral part of the normal form.
    pub fn dihedral_part(&self) -> WeylElem {
        WeylElem { word: self.word.clone(), zexp: 0, ebit: false }
    }

    /// `ε` lies in `K_{M⁰}` for the stabilizer, so it is trivial in `W` there.
    pub fn for_variant(&self, v: SubgroupVariant) -> WeylElem {
        match v {
            SubgroupVariant::Stabilizer => WeylElem { ebit: false, ..self.clone() },
            SubgroupVariant::Parahoric => self.clone(),
        }
    }

    /// Letter lifts in word order, then `z̃^zexp`, then `ε̃^ebit`.
    pub fn lift(&self, tower: &TowerRef) -> GroupElem {
        let mut g = GroupElem::identity(tower);
        for &l in &self.word {
            g = g.mul(&l.lift(tower));
        }
        if self.zexp != 0 {
            g = g.mul(&GroupElem::z_tilde(tower).pow(self.zexp).expect("invertible"));
        }
        if self.ebit {
            g = g.mul(&GroupElem::epsilon_tilde(tower));
        }
        g
    }
}

impl fmt::Display for WeylElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.word.iter().map(Gen::to_string).collect();
        match self.zexp {
            0 => {}
            1 => parts.push("z".into()),
            n => parts.push(format!("z^{n}")),
        }
        if self.ebit {
            parts.push("e".into());
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("."))
        }
    }
}

impl FromStr for WeylElem {
    type Err = Error;

    /// Parses dot-separated factors `s`, `s'`, `z`, `z^k`, `e`, `1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut w = WeylElem::identity();
        for tok in s.trim().split('.') {
            let factor = match tok.trim() {
                "1" => WeylElem::identity(),
                "s" => WeylElem::s(),
                "s'" => WeylElem::s_prime(),
                "z" => WeylElem::z(),
                "e" => WeylElem::e(),
                t => match t.strip_prefix("z^") {
                    Some(n) => WeylElem::z().pow(n.parse().map_err(|_| Error::Parse(s.into()))?),
                    None => return Err(Error::Parse(s.into())),
                },
            };
            w = w.mul(&factor);
        }
        Ok(w)
    }
}

impl Serialize for WeylElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The finite set of elements exercised by the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    /// Maximum dihedral word length.
    pub words: usize,
    /// Maximum `|zexp|`.
    pub z: i64,
    pub variant: SubgroupVariant,
}

impl Window {
    pub fn dihedral(&self) -> Vec<WeylElem> {
        let mut out = vec![WeylElem::identity()];
        for len in 1..=self.words {
            out.push(WeylElem::alternating(Gen::S, len));
            out.push(WeylElem::alternating(Gen::SPrime, len));
        }
        out
    }

    pub fn elements(&self) -> Vec<WeylElem> {
        let ebits: &[bool] = match self.variant {
            SubgroupVariant::Stabilizer => &[false],
            SubgroupVariant::Parahoric => &[false, true],
        };
        let mut out = Vec::new();
        for w in self.dihedral() {
            for zexp in -self.z..=self.z {
                for &ebit in ebits {
                    out.push(WeylElem { word: w.word.clone(), zexp, ebit });
                }
            }
        }
        out
    }

    pub fn contains(&self, w: &WeylElem) -> bool {
        w.plength() <= self.words && w.zexp.abs() <= self.z && (self.variant == SubgroupVariant::Parahoric || !w.ebit)
    }

    pub fn scaled(&self, factor: usize) -> Window {
        Window { words: self.words * factor, z: self.z * factor as i64, variant: self.variant }
    }
}

/// `H_{M⁰}(x, y, z) = (ord_norm x, ord_norm y, ord_norm z)`.
pub fn h_m0(t: &TorusElem) -> Result<[i64; 3]> {
    Ok([t.x.ord_norm()?, t.y.ord_norm()?, t.z.ord_norm()?])
}

/// `H_{M⁰}` of the lift of `w`, which must be diagonal.
pub fn h_m0_of(tower: &TowerRef, w: &WeylElem) -> Result<[i64; 3]> {
    let g = w.lift(tower);
    let t = g.as_torus().ok_or_else(|| Error::Membership(format!("lift of {w} is not diagonal")))?;
    h_m0(&t)
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub congruence_hnf: Vec<Vec<i64>>,
    pub span_hnf: Vec<Vec<i64>>,
    pub hnf_equal: bool,
    pub norm_condition_triples: usize,
    pub norm_condition_agrees: bool,
}

impl LatticeReport {
    pub fn pass(&self) -> bool {
        self.hnf_equal && self.norm_condition_agrees
    }
}

/// The congruence lattice `{n : n₁+n₂+n₃ = 0, 2 | n₃}`, as the projection of
/// the kernel of `(n₁, n₂, n₃, k) ↦ (n₁+n₂+n₃, n₃ − 2k)`.
pub fn congruence_lattice() -> Lattice<i64> {
    let kernel = integer_kernel(&[vec![1, 1, 1, 0], vec![0, 0, 1, -2]]);
    Lattice::span(kernel).project(3)
}

pub fn image_lattice() -> Lattice<i64> {
    Lattice::span(vec![vec![1, 1, -2], vec![1, -1, 0]])
}

/// Whether `π_F^{n₁+n₂+n₃}·ζ^{n₃}` lies in `(1 + 𝔭_F)⟨ζ²⟩`, evaluated on
/// `N_{E2/F}(π₂^{n₁+n₂})·N_{E4/F}(π₄^{n₃})`.
pub fn norm_condition(tower: &TowerRef, n: [i64; 3]) -> Result<bool> {
    let p2 = tower.uniformizer(FieldTag::E2).pow(n[0] + n[1])?;
    let p4 = tower.uniformizer(FieldTag::E4).pow(n[2])?;
    let v = p2.norm_to_f()? * p4.norm_to_f()?;
    if v.ord_norm()? != 0 {
        return Ok(false);
    }
    tower.field().is_square(v.residue()?)
}

pub fn lattice_check(tower: &TowerRef) -> Result<LatticeReport> {
    let cong = congruence_lattice();
    let span = image_lattice();
    let mut agrees = true;
    let mut count = 0;
    for a in -4..=4 {
        for b in -4..=4 {
            for c in -4..=4 {
                count += 1;
                agrees &= cong.contains(&[a, b, c]) == norm_condition(tower, [a, b, c])?;
            }
        }
    }
    Ok(LatticeReport {
        hnf_equal: cong == span,
        congruence_hnf: cong.basis().to_vec(),
        span_hnf: span.basis().to_vec(),
        norm_condition_triples: count,
        norm_condition_agrees: agrees,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub variant: SubgroupVariant,
    pub facts: Vec<(String, bool)>,
}

impl StructureReport {
    pub fn pass(&self) -> bool {
        self.facts.iter().all(|(_, ok)| *ok)
    }
}

/// Is `g` a torus element lying in `K_{M⁰}`?
fn trivial_in_w(g: &GroupElem, v: SubgroupVariant) -> Result<bool> {
    match g.as_torus() {
        Some(t) => t.in_km0(v),
        None => Ok(false),
    }
}

/// Matrix-level confirmation of the presentation of `W(ρ_{M⁰})`.
pub fn group_structure_check(tower: &TowerRef, v: SubgroupVariant, bound: i64) -> Result<StructureReport> {
    let s = GroupElem::s_tilde(tower);
    let sp = GroupElem::s_prime_tilde(tower);
    let z = GroupElem::z_tilde(tower);
    let eps = GroupElem::epsilon_tilde(tower);
    let mut facts = vec![
        ("s^2 = 1".to_string(), trivial_in_w(&s.mul(&s), v)?),
        ("s'^2 = 1".to_string(), trivial_in_w(&sp.mul(&sp), v)?),
        ("z commutes with s".to_string(), trivial_in_w(&s.commutator(&z)?, v)?),
        ("z commutes with s'".to_string(), trivial_in_w(&sp.commutator(&z)?, v)?),
    ];
    let eps_nontrivial = !trivial_in_w(&eps, v)?;
    match v {
        SubgroupVariant::Stabilizer => facts.push(("e is trivial".to_string(), !eps_nontrivial)),
        SubgroupVariant::Parahoric => {
            facts.push(("e is nontrivial".to_string(), eps_nontrivial));
            facts.push(("e^2 = 1".to_string(), trivial_in_w(&eps.mul(&eps), v)?));
            facts.push(("e commutes with s".to_string(), trivial_in_w(&s.commutator(&eps)?, v)?));
            facts.push(("e commutes with s'".to_string(), trivial_in_w(&sp.commutator(&eps)?, v)?));
            facts.push(("e commutes with z".to_string(), trivial_in_w(&z.commutator(&eps)?, v)?));
        }
    }
    let mut ss_ok = true;
    let mut z_ok = true;
    let ss = s.mul(&sp);
    let mut ss_n = GroupElem::identity(tower);
    let mut z_n = GroupElem::identity(tower);
    for n in 1..=bound {
        ss_n = ss_n.mul(&ss);
        z_n = z_n.mul(&z);
        let h = h_m0(&ss_n.as_torus().expect("diagonal"))?;
        ss_ok &= h == [n, -n, 0] && !trivial_in_w(&ss_n, v)?;
        // Every lift of an element of ⟨s, s′⟩ has H_{M⁰} third coordinate 0.
        let h = h_m0(&z_n.as_torus().expect("diagonal"))?;
        z_ok &= h == [n, n, -2 * n] && !trivial_in_w(&z_n, v)?;
    }
    facts.push((format!("(ss')^n nontrivial for 1 <= n <= {bound}"), ss_ok));
    facts.push((format!("z^n outside <s, s'> for 1 <= n <= {bound}"), z_ok));
    Ok(StructureReport { variant: v, facts })
}
