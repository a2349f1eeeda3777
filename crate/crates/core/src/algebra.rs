//! Iwahori-Hecke algebras of Coxeter systems, twisted group algebras and
//! their crossed products, over any commutative coefficient ring.
//!
//! Action convention: `Ω` acts on the Coxeter generators on the left, and
//! the crossed product commutes `T_w` past `e_ω` as
//! `T_w e_ω = e_ω T_{ω⁻¹(w)}`, i.e. `Ω` acts on the Hecke factor from the
//! right.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Neg, Sub};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::groupmodel::SubgroupVariant;
use crate::hecke::CocycleTable;
use crate::residue::UnitI;
use crate::tower::TowerRef;
use crate::weyl::{WeylElem, Window};
use crate::HeckeCoeff;

/// Coefficient rings accepted by the algebra kernel.
pub trait Ring:
    Clone + PartialEq + Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync + 'static
{
}

impl<T> Ring for T where
    T: Clone + PartialEq + Debug + Zero + One + Neg<Output = T> + Sub<Output = T> + Send + Sync + 'static
{
}

fn add_term<K: Ord, R: Ring>(map: &mut BTreeMap<K, R>, key: K, c: R) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let sum = e.get().clone() + c;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Coxeter systems

/// A Coxeter system on generators `0..n`; `None` in the matrix is `∞`.
pub struct CoxeterSystem {
    m: Vec<Vec<Option<u32>>>,
    normal: Mutex<HashMap<Vec<usize>, Vec<usize>>>,
}

impl CoxeterSystem {
    pub fn new(m: Vec<Vec<Option<u32>>>) -> Result<Self> {
        let n = m.len();
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config("Coxeter matrix is not square".into()));
            }
            for (j, &e) in row.iter().enumerate() {
                if e != m[j][i] {
                    return Err(Error::Config(format!("Coxeter matrix is not symmetric at ({i}, {j})")));
                }
                let ok = if i == j { e == Some(1) } else { e.is_none_or(|e| e >= 2) };
                if !ok {
                    return Err(Error::Config(format!("bad Coxeter matrix entry {e:?} at ({i}, {j})")));
                }
            }
        }
        Ok(CoxeterSystem { m, normal: Mutex::new(HashMap::new()) })
    }

    /// The system with no generators; its group is trivial.
    pub fn trivial() -> Self {
        CoxeterSystem::new(Vec::new()).expect("empty matrix is valid")
    }

    /// Type `Ã₁`: the infinite dihedral group.
    pub fn affine_a1() -> Self {
        CoxeterSystem::new(vec![vec![Some(1), None], vec![None, Some(1)]]).expect("valid")
    }

    /// The finite dihedral group of order `2m`.
    pub fn dihedral(m: u32) -> Result<Self> {
        CoxeterSystem::new(vec![vec![Some(1), Some(m)], vec![Some(m), Some(1)]])
    }

    /// Type `A_n`: the symmetric group `S_{n+1}`.
    pub fn type_a(n: usize) -> Self {
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        Some(if i == j {
                            1
                        } else if i.abs_diff(j) == 1 {
                            3
                        } else {
                            2
                        })
                    })
                    .collect()
            })
            .collect();
        CoxeterSystem::new(m).expect("valid")
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn order(&self, s: usize, t: usize) -> Option<u32> {
        self.m[s][t]
    }

    /// Words reachable from `w` by braid moves.
    fn braid_class(&self, w: &[usize]) -> HashSet<Vec<usize>> {
        let mut seen = HashSet::from([w.to_vec()]);
        let mut queue = VecDeque::from([w.to_vec()]);
        while let Some(u) = queue.pop_front() {
            for i in 0..u.len().saturating_sub(1) {
                let (s, t) = (u[i], u[i + 1]);
                let Some(m) = self.m[s][t].map(|m| m as usize) else { continue };
                if s == t || i + m > u.len() {
                    continue;
                }
                let alt = |k: usize, a: usize, b: usize| if k.is_multiple_of(2) { a } else { b };
                if (0..m).all(|k| u[i + k] == alt(k, s, t)) {
                    let mut v = u.clone();
                    for k in 0..m {
                        v[i + k] = alt(k, t, s);
                    }
                    if seen.insert(v.clone()) {
                        queue.push_back(v);
                    }
                }
            }
        }
        seen
    }

    /// The lexicographically least reduced word for the element `w` names.
    ///
    /// Uses the braid-move solution of the word problem: a word is reduced
    /// iff nothing braid-equivalent to it contains a repeated letter.
    pub fn normal_form(&self, w: &[usize]) -> Result<Vec<usize>> {
        if let Some(&bad) = w.iter().find(|&&s| s >= self.rank()) {
            return Err(Error::Config(format!("generator {bad} out of range")));
        }
        if let Some(nf) = self.normal.lock().expect("poisoned").get(w) {
            return Ok(nf.clone());
        }
        let mut cur = w.to_vec();
        'outer: loop {
            let class = self.braid_class(&cur);
            for u in &class {
                if let Some(i) = u.windows(2).position(|p| p[0] == p[1]) {
                    cur = [&u[..i], &u[i + 2..]].concat();
                    continue 'outer;
                }
            }
            let nf = class.into_iter().min().expect("class is nonempty");
            self.normal.lock().expect("poisoned").insert(w.to_vec(), nf.clone());
            return Ok(nf);
        }
    }

    pub fn length(&self, w: &[usize]) -> Result<usize> {
        Ok(self.normal_form(w)?.len())
    }

    pub fn is_normal(&self, w: &[usize]) -> Result<bool> {
        Ok(self.normal_form(w)? == w)
    }

    /// Group product in normal form.
    pub fn mul(&self, a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
        self.normal_form(&[a, b].concat())
    }
}

// ---------------------------------------------------------------------------
// Hecke algebras

/// `Σ c_w T_w`, keyed by normal-form words.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericHeckeElem<R> {
    terms: BTreeMap<Vec<usize>, R>,
}

impl<R: Ring> GenericHeckeElem<R> {
    pub fn zero() -> Self {
        GenericHeckeElem { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        GenericHeckeElem::basis(Vec::new())
    }

    /// `T_w`; the key is not validated until it is multiplied.
    pub fn basis(w: Vec<usize>) -> Self {
        GenericHeckeElem { terms: BTreeMap::from([(w, R::one())]) }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<usize>, R)>) -> Self {
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            add_term(&mut map, w, c);
        }
        GenericHeckeElem { terms: map }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, R> {
        &self.terms
    }

    pub fn coeff(&self, w: &[usize]) -> R {
        self.terms.get(w).cloned().unwrap_or_else(R::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        GenericHeckeElem::from_terms(self.terms.iter().chain(&o.terms).map(|(w, c)| (w.clone(), c.clone())))
    }

    pub fn scale(&self, c: &R) -> Self {
        GenericHeckeElem::from_terms(self.terms.iter().map(|(w, d)| (w.clone(), c.clone() * d.clone())))
    }
}

/// `H(W, q)` with the quadratic relation `T_s² = q_s T_1 + (q_s − 1) T_s`.
pub struct HeckeAlgebra<R> {
    cox: Arc<CoxeterSystem>,
    params: Vec<R>,
}

impl<R: Ring> HeckeAlgebra<R> {
    /// Parameters must agree on generators joined by an odd braid relation.
    pub fn new(cox: Arc<CoxeterSystem>, params: Vec<R>) -> Result<Self> {
        if params.len() != cox.rank() {
            return Err(Error::Config(format!("{} parameters for {} generators", params.len(), cox.rank())));
        }
        for s in 0..cox.rank() {
            for t in 0..cox.rank() {
                if cox.order(s, t).is_some_and(|m| m % 2 == 1) && params[s] != params[t] {
                    return Err(Error::Config(format!("q_{s} ≠ q_{t} for conjugate generators")));
                }
            }
        }
        Ok(HeckeAlgebra { cox, params })
    }

    pub fn coxeter(&self) -> &Arc<CoxeterSystem> {
        &self.cox
    }

    pub fn params(&self) -> &[R] {
        &self.params
    }

    fn check_keys(&self, a: &GenericHeckeElem<R>) -> Result<()> {
        for w in a.terms.keys() {
            if !self.cox.is_normal(w)? {
                return Err(Error::NotReduced(w.clone()));
            }
        }
        Ok(())
    }

    /// `T_s · x`.
    fn left_gen(&self, s: usize, x: &GenericHeckeElem<R>) -> Result<GenericHeckeElem<R>> {
        let q = &self.params[s];
        let mut out = BTreeMap::new();
        for (w, c) in &x.terms {
            let sw = self.cox.mul(&[s], w)?;
            if sw.len() > w.len() {
                add_term(&mut out, sw, c.clone());
            } else {
                add_term(&mut out, sw, q.clone() * c.clone());
                add_term(&mut out, w.clone(), (q.clone() - R::one()) * c.clone());
            }
        }
        Ok(GenericHeckeElem { terms: out })
    }

    /// `T_w · x` for a reduced word `w`.
    pub fn left_mul_basis(&self, w: &[usize], x: &GenericHeckeElem<R>) -> Result<GenericHeckeElem<R>> {
        let mut acc = x.clone();
        for &s in w.iter().rev() {
            acc = self.left_gen(s, &acc)?;
        }
        Ok(acc)
    }

    pub fn mul(&self, a: &GenericHeckeElem<R>, b: &GenericHeckeElem<R>) -> Result<GenericHeckeElem<R>> {
        self.check_keys(a)?;
        self.check_keys(b)?;
        let mut out = GenericHeckeElem::zero();
        for (u, c) in &a.terms {
            out = out.add(&self.left_mul_basis(u, b)?.scale(c));
        }
        Ok(out)
    }
}

/// Product in `H(W, q)` with parameters indexed by generator.
pub fn hecke_mul<R: Ring>(
    cox: &Arc<CoxeterSystem>,
    a: &GenericHeckeElem<R>,
    b: &GenericHeckeElem<R>,
    params: &[R],
) -> Result<GenericHeckeElem<R>> {
    HeckeAlgebra::new(cox.clone(), params.to_vec())?.mul(a, b)
}

// ---------------------------------------------------------------------------
// Groups and cocycles

pub trait Group: Clone + Ord + Hash + Debug + Display + Send + Sync + 'static {
    fn identity() -> Self;
    fn op(&self, o: &Self) -> Self;
    fn inverse(&self) -> Self;
}

impl Group for WeylElem {
    fn identity() -> Self {
        WeylElem::identity()
    }

    fn op(&self, o: &Self) -> Self {
        self.mul(o)
    }

    fn inverse(&self) -> Self {
        self.inv()
    }
}

/// `Z/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cyclic<const N: u32>(u32);

impl<const N: u32> Cyclic<N> {
    pub fn new(k: i64) -> Self {
        Cyclic(k.rem_euclid(N as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..N).map(Cyclic)
    }
}

impl<const N: u32> Display for Cyclic<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const N: u32> Group for Cyclic<N> {
    fn identity() -> Self {
        Cyclic(0)
    }

    fn op(&self, o: &Self) -> Self {
        Cyclic((self.0 + o.0) % N)
    }

    fn inverse(&self) -> Self {
        Cyclic((N - self.0) % N)
    }
}

/// Direct product, written `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Product<A, B>(pub A, pub B);

impl<A: Display, B: Display> Display for Product<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

impl<A: Group, B: Group> Group for Product<A, B> {
    fn identity() -> Self {
        Product(A::identity(), B::identity())
    }

    fn op(&self, o: &Self) -> Self {
        Product(self.0.op(&o.0), self.1.op(&o.1))
    }

    fn inverse(&self) -> Self {
        Product(self.0.inverse(), self.1.inverse())
    }
}

/// A normalized 2-cocycle `G × G → R^×`.
pub trait Cocycle<G, R>: Send + Sync {
    fn mu(&self, a: &G, b: &G) -> Result<R>;
}

/// The constant cocycle `1`.
pub struct TrivialCocycle;

impl<G, R: Ring> Cocycle<G, R> for TrivialCocycle {
    fn mu(&self, _: &G, _: &G) -> Result<R> {
        Ok(R::one())
    }
}

/// Any closure `(a, b) ↦ μ(a, b)`.
pub struct FnCocycle<F>(pub F);

impl<G, R, F> Cocycle<G, R> for FnCocycle<F>
where
    F: Fn(&G, &G) -> R + Send + Sync,
{
    fn mu(&self, a: &G, b: &G) -> Result<R> {
        Ok((self.0)(a, b))
    }
}

/// The cocycle of a lift table, valued in `Z[i]`.
impl Cocycle<WeylElem, HeckeCoeff> for CocycleTable {
    fn mu(&self, a: &WeylElem, b: &WeylElem) -> Result<HeckeCoeff> {
        Ok(CocycleTable::mu(self, a, b)?.to_coeff())
    }
}

/// `μ(a, b)μ(ab, c) = μ(a, bc)μ(b, c)` for one triple.
pub fn cocycle_identity_holds<G: Group, R: Ring>(mu: &dyn Cocycle<G, R>, a: &G, b: &G, c: &G) -> Result<bool> {
    let lhs = mu.mu(a, b)? * mu.mu(&a.op(b), c)?;
    let rhs = mu.mu(a, &b.op(c))? * mu.mu(b, c)?;
    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// Twisted group algebras

pub type CocycleRef<G, R> = Arc<dyn Cocycle<G, R>>;

/// `Σ c_g e_g` in `R[G, μ]`; carries its cocycle.
#[derive(Clone)]
pub struct TwistedElem<G, R> {
    terms: BTreeMap<G, R>,
    cocycle: CocycleRef<G, R>,
}

impl<G: Group, R: Ring> TwistedElem<G, R> {
    pub fn zero(cocycle: &CocycleRef<G, R>) -> Self {
        TwistedElem { terms: BTreeMap::new(), cocycle: cocycle.clone() }
    }

    pub fn basis(cocycle: &CocycleRef<G, R>, g: G) -> Self {
        TwistedElem::from_terms(cocycle, [(g, R::one())])
    }

    pub fn from_terms(cocycle: &CocycleRef<G, R>, terms: impl IntoIterator<Item = (G, R)>) -> Self {
        let mut map = BTreeMap::new();
        for (g, c) in terms {
            add_term(&mut map, g, c);
        }
        TwistedElem { terms: map, cocycle: cocycle.clone() }
    }

    pub fn terms(&self) -> &BTreeMap<G, R> {
        &self.terms
    }

    pub fn coeff(&self, g: &G) -> R {
        self.terms.get(g).cloned().unwrap_or_else(R::zero)
    }

    pub fn cocycle(&self) -> &CocycleRef<G, R> {
        &self.cocycle
    }

    pub fn scale(&self, c: &R) -> Self {
        TwistedElem::from_terms(&self.cocycle, self.terms.iter().map(|(g, d)| (g.clone(), c.clone() * d.clone())))
    }
}

impl<G: Group, R: Ring> PartialEq for TwistedElem<G, R> {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.cocycle, &o.cocycle) && self.terms == o.terms
    }
}

impl<G: Group, R: Ring> Debug for TwistedElem<G, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(g, c)| (g.to_string(), c))).finish()
    }
}

/// `e_u e_v = μ(u, v) e_{uv}`, extended bilinearly.
pub fn twisted_mul<G: Group, R: Ring>(a: &TwistedElem<G, R>, b: &TwistedElem<G, R>) -> Result<TwistedElem<G, R>> {
    if !Arc::ptr_eq(&a.cocycle, &b.cocycle) {
        return Err(Error::CocycleMismatch);
    }
    let mut out = BTreeMap::new();
    for (u, c) in &a.terms {
        for (v, d) in &b.terms {
            let m = a.cocycle.mu(u, v)?;
            add_term(&mut out, u.op(v), m * c.clone() * d.clone());
        }
    }
    Ok(TwistedElem { terms: out, cocycle: a.cocycle.clone() })
}

// ---------------------------------------------------------------------------
// Crossed products

/// A left action of `G` on the generators of a Coxeter system.
pub trait GeneratorAction<G>: Send + Sync {
    fn act(&self, g: &G, s: usize) -> usize;
}

/// Every element fixes every generator.
pub struct TrivialAction;

impl<G> GeneratorAction<G> for TrivialAction {
    fn act(&self, _: &G, s: usize) -> usize {
        s
    }
}

/// `Z/2` exchanging generators `0` and `1` of a rank-2 system.
pub struct SwapGenerators;

impl GeneratorAction<Cyclic<2>> for SwapGenerators {
    fn act(&self, g: &Cyclic<2>, s: usize) -> usize {
        if g.value() == 1 && s < 2 {
            1 - s
        } else {
            s
        }
    }
}

/// The extended affine Hecke algebra `R[Z/2] ⋉ H(Ã₁, q)` of `PGL₂`.
pub fn extended_affine_a1<R: Ring>(q: R) -> Result<CrossedProduct<Cyclic<2>, R>> {
    let hecke = HeckeAlgebra::new(Arc::new(CoxeterSystem::affine_a1()), vec![q.clone(), q])?;
    let elems: Vec<_> = Cyclic::<2>::all().collect();
    CrossedProduct::new(hecke, Arc::new(TrivialCocycle), Arc::new(SwapGenerators), &elems)
}

/// `R[Ω, μ] ⋉ H(W, q)` with basis `e_ω T_w`.
pub struct CrossedProduct<G, R> {
    hecke: HeckeAlgebra<R>,
    cocycle: CocycleRef<G, R>,
    action: Arc<dyn GeneratorAction<G>>,
}

/// `Σ c e_ω T_w`, keyed by `(ω, normal form of w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElem<G: Ord, R> {
    terms: BTreeMap<(G, Vec<usize>), R>,
}

impl<G: Group, R: Ring> CrossedElem<G, R> {
    pub fn zero() -> Self {
        CrossedElem { terms: BTreeMap::new() }
    }

    pub fn basis(g: G, w: Vec<usize>) -> Self {
        CrossedElem::from_terms([((g, w), R::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((G, Vec<usize>), R)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            add_term(&mut map, k, c);
        }
        CrossedElem { terms: map }
    }

    pub fn terms(&self) -> &BTreeMap<(G, Vec<usize>), R> {
        &self.terms
    }
}

impl<G: Group, R: Ring> CrossedProduct<G, R> {
    /// Checks that the action is a homomorphism into the automorphisms of
    /// the Coxeter system preserving the parameters, on the sample `elems`.
    pub fn new(
        hecke: HeckeAlgebra<R>,
        cocycle: CocycleRef<G, R>,
        action: Arc<dyn GeneratorAction<G>>,
        elems: &[G],
    ) -> Result<Self> {
        let cox = hecke.coxeter().clone();
        let n = cox.rank();
        for g in elems {
            let img: Vec<usize> = (0..n).map(|s| action.act(g, s)).collect();
            let mut sorted = img.clone();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::ActionInconsistent(format!("{g} does not permute the generators")));
            }
            for s in 0..n {
                if hecke.params()[img[s]] != hecke.params()[s] {
                    return Err(Error::ActionInconsistent(format!("{g} moves q_{s}")));
                }
                for t in 0..n {
                    if cox.order(img[s], img[t]) != cox.order(s, t) {
                        return Err(Error::ActionInconsistent(format!("{g} breaks m({s}, {t})")));
                    }
                }
            }
            for h in elems {
                for s in 0..n {
                    if action.act(&g.op(h), s) != action.act(g, action.act(h, s)) {
                        return Err(Error::ActionInconsistent(format!("not a homomorphism at ({g}, {h})")));
                    }
                }
            }
        }
        if (0..n).any(|s| action.act(&G::identity(), s) != s) {
            return Err(Error::ActionInconsistent("identity acts non-trivially".into()));
        }
        Ok(CrossedProduct { hecke, cocycle, action })
    }

    pub fn hecke(&self) -> &HeckeAlgebra<R> {
        &self.hecke
    }

    pub fn cocycle(&self) -> &CocycleRef<G, R> {
        &self.cocycle
    }

    fn act_word(&self, g: &G, w: &[usize]) -> Result<Vec<usize>> {
        let img: Vec<usize> = w.iter().map(|&s| self.action.act(g, s)).collect();
        self.hecke.coxeter().normal_form(&img)
    }

    /// `(e_ω T_w)(e_ω′ T_w′) = μ(ω, ω′) e_{ωω′} T_{ω′⁻¹(w)} T_w′`.
    pub fn mul(&self, a: &CrossedElem<G, R>, b: &CrossedElem<G, R>) -> Result<CrossedElem<G, R>> {
        let mut out = BTreeMap::new();
        for ((g, w), c) in &a.terms {
            for ((h, x), d) in &b.terms {
                let m = self.cocycle.mu(g, h)? * c.clone() * d.clone();
                let moved = self.act_word(&h.inverse(), w)?;
                let prod = self.hecke.mul(&GenericHeckeElem::basis(moved), &GenericHeckeElem::basis(x.clone()))?;
                let gh = g.op(h);
                for (y, e) in prod.terms {
                    add_term(&mut out, (gh.clone(), y), m.clone() * e);
                }
            }
        }
        Ok(CrossedElem { terms: out })
    }
}

// ---------------------------------------------------------------------------
// The example: `C[W(ρ_{M⁰}), μ]` with trivial affine part

/// The twisted group algebra of `W(ρ_{M⁰})` with the cocycle of the
/// canonical lift table, realized both directly and as a crossed product
/// over the trivial Coxeter system.
pub struct ExampleAlgebra {
    table: Arc<CocycleTable>,
    cocycle: CocycleRef<WeylElem, HeckeCoeff>,
    crossed: CrossedProduct<WeylElem, HeckeCoeff>,
}

pub fn build_example_algebra(tower: &TowerRef, v: SubgroupVariant) -> Result<ExampleAlgebra> {
    let table = Arc::new(CocycleTable::canonical(tower.clone(), v));
    let cocycle: CocycleRef<WeylElem, HeckeCoeff> = table.clone();
    let hecke = HeckeAlgebra::new(Arc::new(CoxeterSystem::trivial()), Vec::new())?;
    let crossed = CrossedProduct::new(hecke, cocycle.clone(), Arc::new(TrivialAction), &[])?;
    Ok(ExampleAlgebra { table, cocycle, crossed })
}

impl ExampleAlgebra {
    pub fn variant(&self) -> SubgroupVariant {
        self.table.variant()
    }

    pub fn table(&self) -> &CocycleTable {
        &self.table
    }

    pub fn cocycle(&self) -> &CocycleRef<WeylElem, HeckeCoeff> {
        &self.cocycle
    }

    pub fn crossed(&self) -> &CrossedProduct<WeylElem, HeckeCoeff> {
        &self.crossed
    }

    pub fn basis(&self, w: &WeylElem) -> TwistedElem<WeylElem, HeckeCoeff> {
        TwistedElem::basis(&self.cocycle, w.for_variant(self.variant()))
    }

    /// `e_w⁻¹ = μ(w, w⁻¹)⁻¹ e_{w⁻¹}`.
    pub fn basis_inverse(&self, w: &WeylElem) -> Result<TwistedElem<WeylElem, HeckeCoeff>> {
        let w = w.for_variant(self.variant());
        let m: UnitI = self.table.mu(&w, &w.inv())?;
        Ok(TwistedElem::from_terms(&self.cocycle, [(w.inv(), m.inv().to_coeff())]))
    }

    pub fn mul(
        &self,
        a: &TwistedElem<WeylElem, HeckeCoeff>,
        b: &TwistedElem<WeylElem, HeckeCoeff>,
    ) -> Result<TwistedElem<WeylElem, HeckeCoeff>> {
        twisted_mul(a, b)
    }

    /// The coefficient of `e_{uv}` in `e_u e_v`.
    pub fn structure_constant(&self, u: &WeylElem, v: &WeylElem) -> Result<(WeylElem, HeckeCoeff)> {
        let p = twisted_mul(&self.basis(u), &self.basis(v))?;
        let (w, c) = p.terms().iter().next().ok_or_else(|| Error::Membership(format!("e_{u}·e_{v} vanished")))?;
        Ok((w.clone(), c.clone()))
    }

    /// `(u, v, uv, μ(u, v))` over the window, in window order.
    pub fn structure_constants(&self, window: &Window) -> Result<Vec<(WeylElem, WeylElem, WeylElem, HeckeCoeff)>> {
        let elems = window.elements();
        let mut rows = Vec::with_capacity(elems.len() * elems.len());
        for u in &elems {
            for v in &elems {
                let (w, c) = self.structure_constant(u, v)?;
                rows.push((u.clone(), v.clone(), w, c));
            }
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::Tower;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Z = i64;

    fn small_elem(rng: &mut ChaCha8Rng, cox: &CoxeterSystem, max_len: usize) -> GenericHeckeElem<Z> {
        let terms = (0..rng.gen_range(1..4)).map(|_| {
            let len = rng.gen_range(0..=max_len);
            let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..cox.rank())).collect();
            (cox.normal_form(&w).unwrap(), rng.gen_range(-3..=3))
        });
        GenericHeckeElem::from_terms(terms)
    }

    #[test]
    fn normal_forms() {
        let a2 = CoxeterSystem::type_a(2);
        assert_eq!(a2.normal_form(&[1, 0, 1]).unwrap(), vec![0, 1, 0]);
        assert_eq!(a2.normal_form(&[0, 1, 0, 1]).unwrap(), vec![1, 0]);
        assert_eq!(a2.normal_form(&[0, 1, 0, 1, 0, 1]).unwrap(), Vec::<usize>::new());
        let a1 = CoxeterSystem::affine_a1();
        assert_eq!(a1.length(&[0, 1, 0, 1, 0]).unwrap(), 5);
        assert_eq!(a1.normal_form(&[0, 1, 1, 0]).unwrap(), Vec::<usize>::new());
        let b2 = CoxeterSystem::dihedral(4).unwrap();
        assert_eq!(b2.normal_form(&[1, 0, 1, 0]).unwrap(), vec![0, 1, 0, 1]);
        assert!(CoxeterSystem::new(vec![vec![Some(1), Some(2)], vec![Some(3), Some(1)]]).is_err());
    }

    #[test]
    fn a3_has_24_elements() {
        let a3 = CoxeterSystem::type_a(3);
        let mut seen = HashSet::from([Vec::new()]);
        let mut frontier = vec![Vec::new()];
        while let Some(w) = frontier.pop() {
            for s in 0..3 {
                let sw = a3.mul(&[s], &w).unwrap();
                if seen.insert(sw.clone()) {
                    frontier.push(sw);
                }
            }
        }
        assert_eq!(seen.len(), 24);
        assert_eq!(seen.iter().map(Vec::len).max(), Some(6));
    }

    #[test]
    fn quadratic_relation() {
        let cox = Arc::new(CoxeterSystem::affine_a1());
        let h = HeckeAlgebra::new(cox, vec![5i64, 5]).unwrap();
        let ts = GenericHeckeElem::basis(vec![0]);
        let p = h.mul(&ts, &ts).unwrap();
        assert_eq!(p, GenericHeckeElem::from_terms([(vec![], 5), (vec![0], 4)]));
        let p = h.mul(&ts, &GenericHeckeElem::basis(vec![1])).unwrap();
        assert_eq!(p, GenericHeckeElem::basis(vec![0, 1]));
    }

    #[test]
    fn parameter_one_is_the_group_algebra() {
        let cox = Arc::new(CoxeterSystem::type_a(2));
        let h = HeckeAlgebra::new(cox.clone(), vec![1i64, 1]).unwrap();
        let ts = GenericHeckeElem::basis(vec![0]);
        assert_eq!(h.mul(&ts, &ts).unwrap(), GenericHeckeElem::one());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let u =
                cox.normal_form(&(0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect::<Vec<_>>()).unwrap();
            let w =
                cox.normal_form(&(0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect::<Vec<_>>()).unwrap();
            let p = h.mul(&GenericHeckeElem::basis(u.clone()), &GenericHeckeElem::basis(w.clone())).unwrap();
            assert_eq!(p, GenericHeckeElem::basis(cox.mul(&u, &w).unwrap()));
        }
    }

    #[test]
    fn hecke_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (cox, params) in [
            (CoxeterSystem::affine_a1(), vec![5i64, 7]),
            (CoxeterSystem::type_a(2), vec![4, 4]),
            (CoxeterSystem::dihedral(4).unwrap(), vec![3, 2]),
        ] {
            let h = HeckeAlgebra::new(Arc::new(cox), params).unwrap();
            for _ in 0..100 {
                let [a, b, c] = [(); 3].map(|_| small_elem(&mut rng, h.coxeter(), 4));
                let left = h.mul(&h.mul(&a, &b).unwrap(), &c).unwrap();
                let right = h.mul(&a, &h.mul(&b, &c).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let cox = Arc::new(CoxeterSystem::type_a(2));
        assert!(HeckeAlgebra::new(cox.clone(), vec![2i64, 3]).is_err());
        let h = HeckeAlgebra::new(cox, vec![2i64, 2]).unwrap();
        let bad = GenericHeckeElem::basis(vec![1, 0, 1]);
        assert_eq!(h.mul(&bad, &GenericHeckeElem::one()), Err(Error::NotReduced(vec![1, 0, 1])));
    }

    type V4 = Product<Cyclic<2>, Cyclic<2>>;

    fn v4() -> Vec<V4> {
        Cyclic::<2>::all().flat_map(|a| Cyclic::<2>::all().map(move |b| Product(a, b))).collect()
    }

    /// `(−1)^{a₁b₂}`: bilinear, hence a cocycle, and not symmetric.
    fn sign_cocycle() -> CocycleRef<V4, Z> {
        Arc::new(FnCocycle(|a: &V4, b: &V4| if a.0.value() * b.1.value() == 1 { -1 } else { 1 }))
    }

    fn assoc_failures<G: Group>(mu: &CocycleRef<G, Z>, elems: &[G]) -> usize {
        let mut bad = 0;
        for a in elems {
            for b in elems {
                for c in elems {
                    let [ea, eb, ec] = [a, b, c].map(|g| TwistedElem::basis(mu, g.clone()));
                    let l = twisted_mul(&twisted_mul(&ea, &eb).unwrap(), &ec).unwrap();
                    let r = twisted_mul(&ea, &twisted_mul(&eb, &ec).unwrap()).unwrap();
                    bad += usize::from(l != r);
                }
            }
        }
        bad
    }

    #[test]
    fn twisted_algebra_of_v4() {
        let mu = sign_cocycle();
        assert_eq!(assoc_failures(&mu, &v4()), 0);
        let (x, y) = (Product(Cyclic::new(1), Cyclic::new(0)), Product(Cyclic::new(0), Cyclic::new(1)));
        let xy = twisted_mul(&TwistedElem::basis(&mu, x), &TwistedElem::basis(&mu, y)).unwrap();
        let yx = twisted_mul(&TwistedElem::basis(&mu, y), &TwistedElem::basis(&mu, x)).unwrap();
        assert_eq!(xy, yx.scale(&-1));
    }

    #[test]
    fn broken_cocycle_breaks_associativity() {
        let good = sign_cocycle();
        let target = (Product(Cyclic::new(1), Cyclic::new(1)), Product(Cyclic::new(1), Cyclic::new(0)));
        let broken: CocycleRef<V4, Z> = Arc::new(FnCocycle(move |a: &V4, b: &V4| {
            let m = good.mu(a, b).unwrap();
            if (*a, *b) == target {
                -m
            } else {
                m
            }
        }));
        assert!(assoc_failures(&broken, &v4()) > 0);
    }

    #[test]
    fn mismatched_handles() {
        let (m1, m2) = (sign_cocycle(), sign_cocycle());
        let g = Product(Cyclic::new(1), Cyclic::new(1));
        let r = twisted_mul(&TwistedElem::basis(&m1, g), &TwistedElem::basis(&m2, g));
        assert_eq!(r.err(), Some(Error::CocycleMismatch));
    }

    #[test]
    fn crossed_product_extended_affine_a1() {
        let cox = Arc::new(CoxeterSystem::affine_a1());
        let mu: CocycleRef<Cyclic<2>, Z> = Arc::new(TrivialCocycle);
        let h = HeckeAlgebra::new(cox.clone(), vec![3i64, 3]).unwrap();
        let elems: Vec<_> = Cyclic::<2>::all().collect();
        let cp = CrossedProduct::new(h, mu, Arc::new(SwapGenerators), &elems).unwrap();
        let r = Cyclic::new(1);
        // e_r T_0 e_r = T_1 since r conjugates s₀ to s₁.
        let p = cp.mul(&CrossedElem::basis(r, vec![]), &CrossedElem::basis(r, vec![])).unwrap();
        assert_eq!(p, CrossedElem::basis(Cyclic::new(0), vec![]));
        let p = cp.mul(&CrossedElem::basis(r, vec![0]), &CrossedElem::basis(r, vec![])).unwrap();
        assert_eq!(p, CrossedElem::basis(Cyclic::new(0), vec![1]));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let random = |rng: &mut ChaCha8Rng| {
            CrossedElem::from_terms((0..rng.gen_range(1..3)).map(|_| {
                let w: Vec<usize> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect();
                ((Cyclic::new(rng.gen_range(0..2)), cox.normal_form(&w).unwrap()), rng.gen_range(-2i64..=2))
            }))
        };
        for _ in 0..100 {
            let [a, b, c] = [(); 3].map(|_| random(&mut rng));
            let l = cp.mul(&cp.mul(&a, &b).unwrap(), &c).unwrap();
            let r = cp.mul(&a, &cp.mul(&b, &c).unwrap()).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn inconsistent_action_is_rejected() {
        let h = HeckeAlgebra::new(Arc::new(CoxeterSystem::affine_a1()), vec![3i64, 5]).unwrap();
        let elems: Vec<_> = Cyclic::<2>::all().collect();
        let r = CrossedProduct::new(h, Arc::new(TrivialCocycle), Arc::new(SwapGenerators), &elems);
        assert!(matches!(r.err(), Some(Error::ActionInconsistent(_))));
    }

    #[test]
    fn example_commutator_is_minus_one() {
        let tower = Tower::with_q(5, 24).unwrap();
        for v in SubgroupVariant::ALL {
            let alg = build_example_algebra(&tower, v).unwrap();
            let (s, z) = (WeylElem::s(), WeylElem::z());
            let c = [alg.basis(&s), alg.basis(&z), alg.basis_inverse(&s).unwrap(), alg.basis_inverse(&z).unwrap()]
                .into_iter()
                .reduce(|a, b| alg.mul(&a, &b).unwrap())
                .unwrap();
            assert_eq!(c, alg.basis(&WeylElem::identity()).scale(&HeckeCoeff::from_int(BigInt::from(-1))));
            let (w, c) = alg.structure_constant(&s, &s).unwrap();
            assert!(w.is_identity());
            assert_eq!(c, HeckeCoeff::from_int(BigInt::from(1)));
        }
    }
}
