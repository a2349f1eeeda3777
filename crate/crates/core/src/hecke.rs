//! Hecke-algebra computations for `(K⁰, ρ⁰)`: coset transversals, double
//! coset classification, pointwise convolution, and the 2-cocycle `μ` with
//! its commutator pairing `β`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupmodel::{random_km0, GroupElem, Mat2, MonomialData, SubgroupVariant};
use crate::residue::{ResidueElem, UnitI};
use crate::tower::{FieldTag, TowerRef};
use crate::weyl::{Gen, WeylElem, Window};
use crate::HeckeCoeff;

/// Largest transversal checked pairwise for disjointness; longer words are
/// validated letter by letter.
const PAIRWISE_LIMIT: usize = 200;

/// `φ_w`: supported on `K⁰ŵK⁰`, equal to `scale` at `ŵ = lift(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeBasisFn {
    pub w: WeylElem,
    pub scale: HeckeCoeff,
}

impl HeckeBasisFn {
    pub fn new(w: WeylElem) -> Self {
        HeckeBasisFn { w, scale: HeckeCoeff::one() }
    }
}

/// `g = k1 · lift(w) · k2` with `k1, k2 ∈ K⁰`.
#[derive(Clone, Debug)]
pub struct Classified {
    pub w: WeylElem,
    pub k1: GroupElem,
    pub k2: GroupElem,
}

/// `ρ⁰` read off the lower-right entry without re-checking membership.
fn rho0_value(k: &GroupElem) -> Result<UnitI> {
    k.g2.d.norm_to_f()?.eta_f()
}

pub struct HeckeContext {
    tower: TowerRef,
    window: Window,
    reps: Mutex<HashMap<Vec<Gen>, Arc<Vec<GroupElem>>>>,
    lifts: Mutex<HashMap<WeylElem, Arc<(GroupElem, GroupElem)>>>,
}

impl HeckeContext {
    pub fn new(tower: TowerRef, window: Window) -> Self {
        HeckeContext { tower, window, reps: Mutex::new(HashMap::new()), lifts: Mutex::new(HashMap::new()) }
    }

    /// `(lift(w), lift(w)⁻¹)`, memoized.
    fn lift_pair(&self, w: &WeylElem) -> Result<Arc<(GroupElem, GroupElem)>> {
        if let Some(p) = self.lifts.lock().expect("poisoned").get(w) {
            return Ok(p.clone());
        }
        let g = w.lift(&self.tower);
        let gi = g.inv()?;
        let pair = Arc::new((g, gi));
        self.lifts.lock().expect("poisoned").insert(w.clone(), pair.clone());
        Ok(pair)
    }

    pub fn tower(&self) -> &TowerRef {
        &self.tower
    }

    pub fn variant(&self) -> SubgroupVariant {
        self.window.variant
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Transversal of `K⁰/(K⁰ ∩ ŝK⁰ŝ⁻¹)` for a single letter: `u(x̄)` for `s`
    /// and `l(π₂c̄)` for `s′`, with `x̄, c̄` running over `F_q`.
    pub fn letter_reps(&self, g: Gen) -> Vec<GroupElem> {
        let tw = &self.tower;
        tw.field()
            .elements()
            .map(|c| match g {
                Gen::S => GroupElem::upper(tw.constant(FieldTag::E2, c)),
                Gen::SPrime => GroupElem::lower(tw.monomial(FieldTag::E2, c, 1)),
            })
            .collect()
    }

    /// Transversal of `K⁰/(K⁰ ∩ ŵK⁰ŵ⁻¹)`. For a reduced word `x₁⋯x_L`
    /// the cosets `hK⁰` in `K⁰ŵK⁰` are `h = r₁x̂₁ ⋯ r_Lx̂_L` with `r_i` running over
    /// the letter transversals; the returned elements are `hŵ⁻¹`.
    pub fn coset_reps(&self, w: &WeylElem) -> Result<Arc<Vec<GroupElem>>> {
        if w.plength() > self.window.words {
            return Err(Error::Window(format!("{w} has length above {}", self.window.words)));
        }
        let key = w.word().to_vec();
        if let Some(r) = self.reps.lock().expect("poisoned").get(&key) {
            return Ok(r.clone());
        }
        let tw = &self.tower;
        let mut hs = vec![GroupElem::identity(tw)];
        for &letter in w.word() {
            let lifted = letter.lift(tw);
            let reps = self.letter_reps(letter);
            let lifted = &lifted;
            hs = hs.iter().flat_map(|h| reps.iter().map(move |r| h.mul(r).mul(lifted))).collect();
        }
        let dihedral_inv = w.dihedral_part().lift(tw).inv()?;
        let reps: Vec<GroupElem> = hs.iter().map(|h| h.mul(&dihedral_inv)).collect();
        self.validate_transversal(w, &reps)?;
        let reps = Arc::new(reps);
        self.reps.lock().expect("poisoned").insert(key, reps.clone());
        Ok(reps)
    }

    fn validate_transversal(&self, w: &WeylElem, reps: &[GroupElem]) -> Result<()> {
        let v = self.variant();
        let expected = (self.tower.field().q() as usize).pow(w.plength() as u32);
        if reps.len() != expected {
            return Err(Error::Transversal(format!("{w}: {} reps, expected {expected}", reps.len())));
        }
        for k in reps {
            if !k.in_k0(v)? {
                return Err(Error::Transversal(format!("{w}: {k} is not in K0")));
            }
        }
        let check = |ws: &WeylElem, reps: &[GroupElem]| -> Result<()> {
            let hat = ws.lift(&self.tower);
            let hat_inv = hat.inv()?;
            for (i, a) in reps.iter().enumerate() {
                let a_inv = a.inv()?;
                for b in &reps[i + 1..] {
                    if hat_inv.mul(&a_inv).mul(b).mul(&hat).in_k0(v)? {
                        return Err(Error::Transversal(format!("{ws}: duplicate coset")));
                    }
                }
            }
            Ok(())
        };
        if reps.len() <= PAIRWISE_LIMIT {
            check(&w.dihedral_part(), reps)
        } else {
            for &letter in w.word() {
                check(&WeylElem::gen(letter), &self.letter_reps(letter))?;
            }
            Ok(())
        }
    }

    /// Names the double coset `K⁰gK⁰` and exhibits `g = k1 · lift(w) · k2`.
    pub fn classify(&self, g: &GroupElem) -> Result<Classified> {
        let tw = &self.tower;
        let (k1, mono, k2) = g.iwahori_decompose()?;
        let w0 = weyl_of_monomial(mono)?;
        if !self.window.scaled(2).contains(&w0) {
            return Err(Error::Window(format!("{w0} lies outside the classification window")));
        }
        // m̂ = ŵ₀·d with d a unit torus element; absorb d into k2.
        let d = self.lift_pair(&w0)?.1.mul(&mono.to_group(tw));
        let k2 = d.mul(&k2);
        // Fix the determinant: k1 ↦ k1·t, k2 ↦ ŵ₀⁻¹t⁻¹ŵ₀·k2 with t = (x_F, 1, 1).
        let n = k1.g2.det().norm_to_f()? * k1.g4.norm_to_f()?;
        let mut x = tw.sqrt_f_unit(&n.inv()?)?.lift_to(FieldTag::E2)?;
        if self.variant() == SubgroupVariant::Parahoric {
            let f = tw.field();
            if f.mul(x.residue()?, k1.chi()?) != ResidueElem::ONE {
                x = -x;
            }
        }
        let one2 = tw.one(FieldTag::E2);
        let one4 = tw.one(FieldTag::E4);
        let t = GroupElem::new(Mat2::diag(x.clone(), one2.clone()), one4.clone());
        let x_inv = x.inv()?;
        let t_inv_conj = if mono.antidiagonal {
            GroupElem::new(Mat2::diag(one2, x_inv), one4)
        } else {
            GroupElem::new(Mat2::diag(x_inv, one2), one4)
        };
        let k1 = k1.mul(&t);
        let mut k2 = t_inv_conj.mul(&k2);
        let mut w = w0;
        if self.variant() == SubgroupVariant::Parahoric && k2.chi()? != ResidueElem::ONE {
            // k2 = ε̃·(ε̃⁻¹k2) and χ(ε̃) = −1.
            w = w.mul(&WeylElem::e());
            k2 = GroupElem::epsilon_tilde(tw).inv()?.mul(&k2);
        }
        Ok(Classified { w, k1, k2 })
    }

    /// The `w` of [`classify`](Self::classify) without building `k1, k2`.
    ///
    /// `χ` is multiplicative on `I₂ × I₄`, so the `ε`-bit is
    /// `χ(k1)·χ(d)·χ(k2)`: the determinant fix contributes `χ(k1)` through
    /// the sign choice of `x`.
    pub fn classify_double_coset(&self, g: &GroupElem) -> Result<WeylElem> {
        let (k1, mono, k2) = g.iwahori_decompose()?;
        let w0 = weyl_of_monomial(mono)?;
        if !self.window.scaled(2).contains(&w0) {
            return Err(Error::Window(format!("{w0} lies outside the classification window")));
        }
        if self.variant() == SubgroupVariant::Stabilizer {
            return Ok(w0);
        }
        let d = self.lift_pair(&w0)?.1.mul(&mono.to_group(&self.tower));
        let f = self.tower.field();
        let c = f.mul(f.mul(k1.chi()?, d.chi()?), k2.chi()?);
        Ok(if c == ResidueElem::ONE { w0 } else { w0.mul(&WeylElem::e()) })
    }

    /// `φ(g) = ρ⁰(k1)·scale·ρ⁰(k2)` on the support, zero elsewhere.
    pub fn eval(&self, phi: &HeckeBasisFn, g: &GroupElem) -> Result<HeckeCoeff> {
        let c = self.classify(g)?;
        if c.w != phi.w.for_variant(self.variant()) {
            return Ok(HeckeCoeff::zero());
        }
        let u = rho0_value(&c.k1)? * rho0_value(&c.k2)?;
        Ok(HeckeCoeff::from(u) * phi.scale.clone())
    }

    /// `(φ₁ * φ₂)(g) = Σ_{h ∈ K⁰ŵ₁K⁰/K⁰} φ₁(h)·φ₂(h⁻¹g)` with `h = kŵ₁`.
    pub fn convolve_at(&self, a: &HeckeBasisFn, b: &HeckeBasisFn, g: &GroupElem) -> Result<HeckeCoeff> {
        let lifted = self.lift_pair(&a.w)?;
        let hat = &lifted.0;
        let mut acc = HeckeCoeff::zero();
        for k in self.coset_reps(&a.w)?.iter() {
            let h = k.mul(hat);
            let first = self.eval(a, &h)?;
            if first.is_zero() {
                continue;
            }
            acc += first * self.eval(b, &h.inv()?.mul(g))?;
        }
        Ok(acc)
    }

    /// The double cosets making up `K⁰ŵ₁K⁰ŵ₂K⁰ = ⋃_k K⁰ŵ₁kŵ₂K⁰`, `k` over
    /// the transversal for `w₂`.
    pub fn double_coset_product(&self, w1: &WeylElem, w2: &WeylElem) -> Result<BTreeSet<WeylElem>> {
        let h1 = self.lift_pair(w1)?;
        let h2 = self.lift_pair(w2)?;
        let mut out = BTreeSet::new();
        for k in self.coset_reps(w2)?.iter() {
            out.insert(self.classify_double_coset(&h1.0.mul(k).mul(&h2.0))?);
        }
        Ok(out)
    }

    /// Every plength-additive pair of the window gives one double coset,
    /// namely that of the product. Returns the number of pairs checked and
    /// the failures.
    pub fn additive_pairs_check(&self) -> Result<(usize, Vec<String>)> {
        let elems = self.window.elements();
        let mut count = 0;
        let mut failures = Vec::new();
        for w1 in &elems {
            for w2 in &elems {
                let prod = w1.mul(w2);
                if prod.plength() != w1.plength() + w2.plength() {
                    continue;
                }
                count += 1;
                let set = self.double_coset_product(w1, w2)?;
                if set.len() != 1 || !set.contains(&prod) {
                    failures.push(format!("({w1}, {w2}) -> {}", fmt_set(&set)));
                }
            }
        }
        Ok((count, failures))
    }

    /// For every pair with words of length at most 2 and central parts
    /// `1, z^±1, ε`: every double coset in the product other than that of
    /// `w₁w₂` carries a zero convolution value, and `w₁w₂` a nonzero one.
    pub fn omega_check(&self) -> Result<OmegaReport> {
        // Convolving length-2 elements classifies words of length up to 6.
        let (words, z) = (self.window.words.max(3), self.window.z.max(2));
        if (words, z) != (self.window.words, self.window.z) {
            let wide = HeckeContext::new(self.tower.clone(), Window { words, z, variant: self.variant() });
            return wide.omega_check();
        }
        let small = Window { words: 2, z: 0, variant: self.variant() };
        let mut central = vec![WeylElem::identity(), WeylElem::z(), WeylElem::z().inv()];
        if self.variant() == SubgroupVariant::Parahoric {
            central.extend(central.clone().iter().map(|c| c.mul(&WeylElem::e())));
        }
        let elems: Vec<WeylElem> =
            small.dihedral().iter().flat_map(|w| central.iter().map(move |c| w.mul(c))).collect();
        let mut pairs = 0;
        let mut failures = Vec::new();
        for w1 in &elems {
            for w2 in &elems {
                pairs += 1;
                let (a, b) = (HeckeBasisFn::new(w1.clone()), HeckeBasisFn::new(w2.clone()));
                let prod = w1.mul(w2);
                for w in self.double_coset_product(w1, w2)? {
                    let value = self.convolve_at(&a, &b, &w.lift(&self.tower))?;
                    let ok = if w == prod { !value.is_zero() } else { value.is_zero() };
                    if !ok {
                        failures.push(format!("({w1}, {w2}) at {w}: {value}"));
                    }
                }
            }
        }
        let s = HeckeBasisFn::new(WeylElem::s());
        let sp = HeckeBasisFn::new(WeylElem::s_prime());
        let at_s = self.convolve_at(&s, &s, &GroupElem::s_tilde(&self.tower))?;
        let at_sp = self.convolve_at(&sp, &sp, &GroupElem::s_prime_tilde(&self.tower))?;
        Ok(OmegaReport { pairs, failures, phi_s_sq_at_s: at_s, phi_sp_sq_at_sp: at_sp })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub pairs: usize,
    pub failures: Vec<String>,
    pub phi_s_sq_at_s: HeckeCoeff,
    pub phi_sp_sq_at_sp: HeckeCoeff,
}

impl OmegaReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.phi_s_sq_at_s.is_zero() && self.phi_sp_sq_at_sp.is_zero()
    }
}

pub fn fmt_set(set: &BTreeSet<WeylElem>) -> String {
    let items: Vec<String> = set.iter().map(WeylElem::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

/// Reads the Weyl element off a normalized monomial. Diagonal monomials are
/// `(ss′)^j z^l` with `(m, n, k) = (j + l, l − j, −2l)`; antidiagonal ones are
/// `s` times the diagonal monomial with `m, n` swapped.
pub fn weyl_of_monomial(mono: MonomialData) -> Result<WeylElem> {
    let (m, n) = if mono.antidiagonal { (mono.n, mono.m) } else { (mono.m, mono.n) };
    if mono.k % 2 != 0 {
        return Err(Error::Classification(format!("odd E4 valuation in {mono:?}")));
    }
    let l = -mono.k / 2;
    let j = m - l;
    if n != l - j {
        return Err(Error::Classification(format!("{mono:?} is not in the support")));
    }
    let ss = WeylElem::s().mul(&WeylElem::s_prime()).pow(j);
    let w = ss.mul(&WeylElem::z().pow(l));
    Ok(if mono.antidiagonal { WeylElem::s().mul(&w) } else { w })
}

/// 64-bit FNV-1a, used to derive per-element seeds that do not depend on
/// the standard library's hasher.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// `μ(w₁, w₂) = ρ_{M⁰}(L(w₁w₂)⁻¹ L(w₁) L(w₂))` for a lift family `L`.
///
/// The canonical family is [`WeylElem::lift`]; a perturbed family replaces
/// `L(w)` by `lift(w)·k_w` with `k_w ∈ K_{M⁰}` drawn deterministically from
/// the seed and `w`. `L(1)` is always the identity.
pub struct CocycleTable {
    tower: TowerRef,
    variant: SubgroupVariant,
    seed: Option<u64>,
    lifts: Mutex<HashMap<WeylElem, GroupElem>>,
    memo: Mutex<HashMap<(WeylElem, WeylElem), UnitI>>,
}

impl CocycleTable {
    pub fn canonical(tower: TowerRef, variant: SubgroupVariant) -> Self {
        CocycleTable::build(tower, variant, None)
    }

    pub fn perturbed(tower: TowerRef, variant: SubgroupVariant, seed: u64) -> Self {
        CocycleTable::build(tower, variant, Some(seed))
    }

    fn build(tower: TowerRef, variant: SubgroupVariant, seed: Option<u64>) -> Self {
        CocycleTable { tower, variant, seed, lifts: Mutex::new(HashMap::new()), memo: Mutex::new(HashMap::new()) }
    }

    pub fn variant(&self) -> SubgroupVariant {
        self.variant
    }

    pub fn tower(&self) -> &TowerRef {
        &self.tower
    }

    pub fn lift(&self, w: &WeylElem) -> Result<GroupElem> {
        let w = w.for_variant(self.variant);
        if let Some(g) = self.lifts.lock().expect("poisoned").get(&w) {
            return Ok(g.clone());
        }
        let mut g = w.lift(&self.tower);
        if let (Some(seed), false) = (self.seed, w.is_identity()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(w.to_string().as_bytes()));
            g = g.mul(&random_km0(&self.tower, &mut rng, self.variant)?.to_group());
        }
        self.lifts.lock().expect("poisoned").insert(w, g.clone());
        Ok(g)
    }

    pub fn mu(&self, a: &WeylElem, b: &WeylElem) -> Result<UnitI> {
        let key = (a.for_variant(self.variant), b.for_variant(self.variant));
        if let Some(&u) = self.memo.lock().expect("poisoned").get(&key) {
            return Ok(u);
        }
        let disc = self.lift(&key.0.mul(&key.1))?.inv()?.mul(&self.lift(&key.0)?).mul(&self.lift(&key.1)?);
        let t = disc
            .as_torus()
            .ok_or_else(|| Error::Membership(format!("lift discrepancy at ({}, {}) is not diagonal", key.0, key.1)))?;
        let u = t.rho_m0(self.variant)?;
        self.memo.lock().expect("poisoned").insert(key, u);
        Ok(u)
    }

    /// `β(u, v) = μ(u, v)·μ(v, u)⁻¹` for commuting `u, v`.
    pub fn beta(&self, u: &WeylElem, v: &WeylElem) -> Result<UnitI> {
        let (u, v) = (u.for_variant(self.variant), v.for_variant(self.variant));
        if u.mul(&v) != v.mul(&u) {
            return Err(Error::NonCommuting(u.to_string(), v.to_string()));
        }
        Ok(self.mu(&u, &v)? * self.mu(&v, &u)?.inv())
    }

    /// `ρ_{M⁰}` of the commutator of the two lifts; equals `β` directly.
    pub fn commutator_pairing(&self, u: &WeylElem, v: &WeylElem) -> Result<UnitI> {
        let c = self.lift(u)?.commutator(&self.lift(v)?)?;
        let t = c.as_torus().ok_or_else(|| Error::Membership(format!("[{u}, {v}] is not diagonal")))?;
        t.rho_m0(self.variant)
    }

    /// A commuting pair with `β ≠ 1`. `β` is unchanged by coboundaries, so
    /// such a pair shows `[μ] ≠ 1`; the same pair shows no lift family can
    /// make the lifts of `u` and `v` commute.
    pub fn nontriviality_certificate(&self, window: &Window) -> Result<Certificate> {
        let (s, z) = (WeylElem::s(), WeylElem::z());
        let b = self.beta(&s, &z)?;
        if b != UnitI::ONE {
            return Ok(Certificate { pair: Some((s, z)), beta: b });
        }
        let elems = window.elements();
        for u in &elems {
            for v in &elems {
                if u.mul(v) == v.mul(u) {
                    let b = self.beta(u, v)?;
                    if b != UnitI::ONE {
                        return Ok(Certificate { pair: Some((u.clone(), v.clone())), beta: b });
                    }
                }
            }
        }
        Ok(Certificate { pair: None, beta: UnitI::ONE })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// `None` when no non-trivial pairing was found in the window.
    pub pair: Option<(WeylElem, WeylElem)>,
    pub beta: UnitI,
}

#[derive(Clone, Debug, Serialize)]
pub struct NegativeControl {
    pub families: usize,
    /// Families whose lifts of `s` and `z` multiply as `n_s n_z = n_{sz}` and `n_z n_s = n_{zs}`.
    pub multiplicative: usize,
    /// Families in which the lifts of `s` and `z` commute in the group.
    pub commuting: usize,
}

impl NegativeControl {
    pub fn pass(&self) -> bool {
        self.multiplicative == 0 && self.commuting == 0
    }
}

/// Samples lift families and records whether any of them is multiplicative
/// on both plength-additive products `s·z` and `z·s`.
pub fn negative_control(tower: &TowerRef, v: SubgroupVariant, seed: u64, families: usize) -> Result<NegativeControl> {
    let (s, z) = (WeylElem::s(), WeylElem::z());
    let mut multiplicative = 0;
    let mut commuting = 0;
    for i in 0..families {
        let table = CocycleTable::perturbed(tower.clone(), v, seed.wrapping_add(i as u64));
        if table.mu(&s, &z)? == UnitI::ONE && table.mu(&z, &s)? == UnitI::ONE {
            multiplicative += 1;
        }
        let c = table.lift(&s)?.commutator(&table.lift(&z)?)?;
        if c == GroupElem::identity(tower) {
            commuting += 1;
        }
    }
    Ok(NegativeControl { families, multiplicative, commuting })
}
