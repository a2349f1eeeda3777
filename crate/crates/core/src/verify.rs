//! Batch verification: runs every module check under one configuration and
//! collects the outcomes into a serializable report.

use std::collections::BTreeSet;
use std::fmt::{self, Display};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    self, build_example_algebra, cocycle_identity_holds, twisted_mul, CocycleRef, CoxeterSystem, CrossedElem, Cyclic,
    FnCocycle, GenericHeckeElem, HeckeAlgebra, Product, TwistedElem,
};
use crate::error::{Error, Result};
use crate::generic::{self, Functional, Level};
use crate::groupmodel::{epsilon_fks_trivial, GroupElem, SubgroupVariant, TorusElem};
use crate::hecke::{fmt_set, fnv1a, negative_control, CocycleTable, HeckeBasisFn, HeckeContext};
use crate::residue::{ResidueElem, ResidueField, UnitI};
use crate::tower::{norm_unit_image_check, FieldTag, Tower, TowerRef, Valuation};
use crate::weyl::{self, WeylElem, Window};
use crate::HeckeCoeff;

/// How the crossed product is assembled; printed in every report header.
pub const ACTION_CONVENTION: &str =
    "crossed product: T_w e_ω = e_ω T_{ω⁻¹(w)} (Ω acts on the Hecke factor from the right)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantChoice {
    Stabilizer,
    Parahoric,
    Both,
}

impl VariantChoice {
    pub fn name(self) -> &'static str {
        match self {
            VariantChoice::Stabilizer => "stabilizer",
            VariantChoice::Parahoric => "parahoric",
            VariantChoice::Both => "both",
        }
    }

    pub fn includes(self, v: SubgroupVariant) -> bool {
        match self {
            VariantChoice::Both => true,
            VariantChoice::Stabilizer => v == SubgroupVariant::Stabilizer,
            VariantChoice::Parahoric => v == SubgroupVariant::Parahoric,
        }
    }
}

impl FromStr for VariantChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stabilizer" => Ok(VariantChoice::Stabilizer),
            "parahoric" => Ok(VariantChoice::Parahoric),
            "both" => Ok(VariantChoice::Both),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub q: u32,
    pub precision: usize,
    pub variant: VariantChoice,
    pub window_words: usize,
    pub window_z: i64,
    pub seed: u64,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            q: 5,
            precision: 40,
            variant: VariantChoice::Both,
            window_words: 4,
            window_z: 2,
            seed: 0x5eed,
            format: Format::Text,
        }
    }
}

impl Config {
    pub const MIN_PRECISION: usize = 16;
    pub const MAX_WINDOW_WORDS: usize = 4;
    pub const MAX_WINDOW_Z: i64 = 4;

    pub fn validate(&self) -> Result<TowerRef> {
        if self.precision < Self::MIN_PRECISION {
            return Err(Error::Config(format!("precision {} is below {}", self.precision, Self::MIN_PRECISION)));
        }
        if self.window_words > Self::MAX_WINDOW_WORDS {
            return Err(Error::Config(format!(
                "window word length {} exceeds {}",
                self.window_words,
                Self::MAX_WINDOW_WORDS
            )));
        }
        if !(0..=Self::MAX_WINDOW_Z).contains(&self.window_z) {
            return Err(Error::Config(format!(
                "window |zexp| bound {} outside 0..={}",
                self.window_z,
                Self::MAX_WINDOW_Z
            )));
        }
        Tower::with_q(self.q, self.precision)
    }

    pub fn window(&self, v: SubgroupVariant) -> Window {
        Window { words: self.window_words, z: self.window_z, variant: v }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "skipped-out-of-scope")]
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub module: &'static str,
    pub paper_anchor: &'static str,
    pub inputs: String,
    pub expected: String,
    pub got: String,
    pub status: Status,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: Config,
    pub conventions: Vec<&'static str>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    /// `0` when nothing failed, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.all_pass())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One header line, then one line per check.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let s = &self.summary;
        let mut out = format!(
            "q={} N={} variant={} window=({}, {}) seed={}: {} checks, {} pass, {} fail, {} skipped; {}\n",
            c.q,
            c.precision,
            c.variant.name(),
            c.window_words,
            c.window_z,
            c.seed,
            s.total,
            s.pass,
            s.fail,
            s.skipped,
            ACTION_CONVENTION
        );
        for ch in &self.checks {
            let mark = match ch.status {
                Status::Pass => "✓",
                Status::Fail => "✗",
                Status::Skipped => "-",
            };
            out += &format!(
                "{mark} {} [{}] {}: expected {}, got {}\n",
                ch.id, ch.paper_anchor, ch.inputs, ch.expected, ch.got
            );
        }
        out
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    Residue,
    Norms,
    Genericity,
    Epsilon,
    Subgroups,
    Weyl,
    Lattice,
    Cocycle,
    Convolution,
    Omega,
    Algebra,
}

impl Section {
    /// Execution order of a full run.
    pub const ALL: [Section; 11] = [
        Section::Residue,
        Section::Norms,
        Section::Genericity,
        Section::Epsilon,
        Section::Subgroups,
        Section::Weyl,
        Section::Lattice,
        Section::Cocycle,
        Section::Convolution,
        Section::Omega,
        Section::Algebra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Residue => "residue",
            Section::Norms => "norms",
            Section::Genericity => "genericity",
            Section::Epsilon => "epsilon",
            Section::Subgroups => "subgroups",
            Section::Weyl => "weyl",
            Section::Lattice => "lattice",
            Section::Cocycle => "cocycle",
            Section::Convolution => "convolution",
            Section::Omega => "omega",
            Section::Algebra => "algebra",
        }
    }
}

impl Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Section {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Section::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Parse(s.to_string()))
    }
}

fn gi(n: i64) -> HeckeCoeff {
    HeckeCoeff::from_int(BigInt::from(n))
}

/// `(got, passed)` or a hard error, which fails the check.
type Outcome = Result<(String, bool)>;

fn eq_outcome<T: PartialEq + Display>(got: T, expected: T) -> Outcome {
    let ok = got == expected;
    Ok((got.to_string(), ok))
}

struct Runner<'a> {
    cfg: &'a Config,
    tower: TowerRef,
    checks: Vec<Check>,
}

impl Runner<'_> {
    fn rng(&self, id: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ fnv1a(id.as_bytes()))
    }

    fn push(
        &mut self,
        id: String,
        module: &'static str,
        anchor: &'static str,
        inputs: String,
        expected: String,
        outcome: Option<Outcome>,
    ) {
        let (got, status) = match outcome {
            None => ("-".to_string(), Status::Skipped),
            Some(Ok((got, true))) => (got, Status::Pass),
            Some(Ok((got, false))) => (got, Status::Fail),
            Some(Err(e)) => (format!("error: {e}"), Status::Fail),
        };
        self.checks.push(Check { id, module, paper_anchor: anchor, inputs, expected, got, status });
    }

    fn check(
        &mut self,
        id: &str,
        module: &'static str,
        anchor: &'static str,
        inputs: impl Into<String>,
        expected: impl Display,
        f: impl FnOnce(&Self) -> Outcome,
    ) {
        let outcome = f(self);
        self.push(id.to_string(), module, anchor, inputs.into(), expected.to_string(), Some(outcome));
    }

    /// One check per subgroup variant; deselected variants are recorded as skipped.
    fn per_variant(
        &mut self,
        id: &str,
        module: &'static str,
        anchor: &'static str,
        inputs: impl Into<String>,
        expected: impl Display,
        f: impl Fn(&Self, SubgroupVariant) -> Outcome,
    ) {
        let (inputs, expected) = (inputs.into(), expected.to_string());
        for v in SubgroupVariant::ALL {
            let outcome = self.cfg.variant.includes(v).then(|| f(self, v));
            self.push(format!("{id}[{v}]"), module, anchor, inputs.clone(), expected.clone(), outcome);
        }
    }

    fn run(&mut self, section: Section) {
        match section {
            Section::Residue => self.residue(),
            Section::Norms => self.norms(),
            Section::Genericity => self.genericity(),
            Section::Epsilon => self.epsilon(),
            Section::Subgroups => self.subgroups(),
            Section::Weyl => self.weyl(),
            Section::Lattice => self.lattice(),
            Section::Cocycle => self.cocycle(),
            Section::Convolution => self.convolution(),
            Section::Omega => self.omega(),
            Section::Algebra => self.algebra(),
        }
    }

    fn residue(&mut self) {
        const M: &str = "residue";
        let q = self.cfg.q;
        self.check("residue.zeta_order", M, "generator of the residue units", format!("q={q}"), q - 1, |r| {
            let f = r.tower.field();
            let order = (1..q).find(|&k| f.pow(f.zeta(), k as i64).ok() == Some(ResidueElem::ONE));
            eq_outcome(order.unwrap_or(0), q - 1)
        });
        for (k, expected, anchor) in [
            (0, UnitI::ONE, "quartic character on 1"),
            (1, UnitI::I, "quartic character on the generator"),
            (2, UnitI::MINUS_ONE, "quartic character on the generator squared"),
        ] {
            self.check(&format!("residue.eta_zeta^{k}"), M, anchor, format!("ζ^{k}"), expected, |r| {
                let f = r.tower.field();
                eq_outcome(f.eta(f.zeta_pow(k))?, expected)
            });
        }
        self.check("residue.sgn_zeta", M, "quadratic character on the generator", "ζ", UnitI::MINUS_ONE, |r| {
            let f = r.tower.field();
            eq_outcome(f.sgn(f.zeta())?, UnitI::MINUS_ONE)
        });
        for q in [5, 13, 17] {
            self.check(
                &format!("residue.char_sum_eta_squares[q={q}]"),
                M,
                "character sum of the squared quartic character",
                format!("q={q}"),
                0,
                |_| eq_outcome(ResidueField::new(q)?.char_sum_eta_squares(), gi(0)),
            );
        }
    }

    fn norms(&mut self) {
        const M: &str = "tower";
        self.check("tower.pi2_squared", M, "defining relation of E2", "π2²", "-t", |r| {
            let p = r.tower.uniformizer(FieldTag::E2);
            let v = &p * &p;
            let ok = v == -r.tower.t(FieldTag::E2);
            Ok((v.to_string(), ok))
        });
        self.check("tower.pi4_fourth", M, "defining relation of E4", "π4⁴", "-ζt", |r| {
            let v = r.tower.uniformizer(FieldTag::E4).pow(4)?;
            let ok = v == -(r.tower.zeta_in(FieldTag::E4) * r.tower.t(FieldTag::E4));
            Ok((v.to_string(), ok))
        });
        self.check("tower.norm_pi4", M, "norm of the E4 uniformizer", "N(π4)", "ζt", |r| {
            let v = r.tower.uniformizer(FieldTag::E4).norm_to_f()?;
            let ok = v == r.tower.zeta_in(FieldTag::F) * r.tower.t(FieldTag::F);
            Ok((v.to_string(), ok))
        });
        self.check("tower.trace_one_e4", M, "trace from E4 of 1", "Tr(1)", 4, |r| {
            let v = r.tower.one(FieldTag::E4).trace_to_f()?;
            let ok = v == r.tower.int(FieldTag::F, 4);
            Ok((v.to_string(), ok))
        });
        self.check("tower.eta_f_t", M, "quartic character trivial on the uniformizer", "η(t)", UnitI::ONE, |r| {
            eq_outcome(r.tower.t(FieldTag::F).eta_f()?, UnitI::ONE)
        });
        self.check(
            "tower.eta_f_zeta_sq_tail",
            M,
            "quartic character on a unit",
            "η(ζ²(1+t³))",
            UnitI::MINUS_ONE,
            |r| {
                let tw = &r.tower;
                let x = tw.constant(FieldTag::F, tw.field().zeta_pow(2))
                    * (tw.one(FieldTag::F) + tw.t(FieldTag::F).pow(3)?);
                eq_outcome(x.eta_f()?, UnitI::MINUS_ONE)
            },
        );
        for (tag, what) in [(FieldTag::E2, "η²∘N on E2 units"), (FieldTag::E4, "η∘N on E4 units")] {
            let id = format!("norms.unit_image[{tag}]");
            self.check(&id, M, "norm images of units lie in the kernel", what, true, |r| {
                let mut rng = r.rng(&id);
                let per_class = 100usize.div_ceil(r.cfg.q as usize - 1);
                eq_outcome(norm_unit_image_check(&r.tower, tag, &mut rng, per_class)?, true)
            });
        }
    }

    fn genericity(&mut self) {
        const M: &str = "generic";
        for (level, count, anchor) in [
            (Level::G1MinusG0, 12, "genericity at the first level"),
            (Level::G2MinusG1, 40, "genericity at the second level"),
        ] {
            let target = level.target();
            self.check(
                &format!("genericity.{level:?}"),
                M,
                anchor,
                format!("{count} root pairs"),
                format!("{count} × ord {target}"),
                |r| {
                    let rep = generic::check_ge1(&r.tower, level)?;
                    let bad: Vec<_> =
                        rep.roots.iter().filter(|x| x.ord != Some(target)).map(|x| x.root.clone()).collect();
                    let got = if bad.is_empty() {
                        format!("{} × ord {target}", rep.roots.len())
                    } else {
                        format!("off target at {}", bad.join(" "))
                    };
                    Ok((got, rep.pass && rep.roots.len() == count))
                },
            );
        }
        for (functional, shift, expected) in [
            (Functional::X0Star, 0, Valuation::new(0, 1)),
            (Functional::X1Star, 0, Valuation::new(0, 1)),
            (Functional::X1Star, 1, Valuation::new(1, 1)),
        ] {
            self.check(
                &format!("genericity.witness[{functional:?},shift={shift}]"),
                M,
                "non-degeneracy witness on the previous level",
                format!("t^{shift}·witness"),
                expected,
                |r| eq_outcome(generic::check_ge0_witness(&r.tower, functional, shift)?, expected),
            );
        }
        self.check(
            "genericity.level2_values",
            M,
            "values of the second-level pairing",
            "ord-normalized leading terms",
            "[-2, -1, 1, 2]",
            |r| {
                let v = generic::level2_value_set(&r.tower)?;
                let ok = v == [-2, -1, 1, 2];
                Ok((format!("{v:?}"), ok))
            },
        );
    }

    fn epsilon(&mut self) {
        self.per_variant(
            "epsilon.fks_trivial",
            "groupmodel",
            "triviality of the sign character on K0",
            "all residue triples",
            true,
            |r, v| eq_outcome(epsilon_fks_trivial(&r.tower, v)?, true),
        );
    }

    fn subgroups(&mut self) {
        const M: &str = "groupmodel";
        self.check(
            "subgroups.commutator_s_z",
            M,
            "commutator of the lifts of s and z",
            "[s̃, z̃]",
            "(ζ^-1, ζ, 1)",
            |r| {
                let tw = &r.tower;
                let f = tw.field();
                let c = GroupElem::s_tilde(tw).commutator(&GroupElem::z_tilde(tw))?;
                let target = TorusElem::constants(tw, f.zeta_pow(-1), f.zeta(), ResidueElem::ONE).to_group();
                let ok = c == target;
                Ok((if ok { "(ζ^-1, ζ, 1)".into() } else { c.to_string() }, ok))
            },
        );
        self.per_variant(
            "subgroups.rho_commutator",
            M,
            "ρ on the commutator of the lifts",
            "ρ_M0([s̃, z̃])",
            UnitI::MINUS_ONE,
            |r, v| {
                let tw = &r.tower;
                let c = GroupElem::s_tilde(tw).commutator(&GroupElem::z_tilde(tw))?;
                let t = c.as_torus().ok_or_else(|| Error::Membership("commutator is not diagonal".into()))?;
                eq_outcome(t.rho_m0(v)?, UnitI::MINUS_ONE)
            },
        );
        self.per_variant(
            "subgroups.epsilon_in_k0",
            M,
            "the sign element and the two compact subgroups",
            "ε̃ ∈ K0",
            "stabilizer: true, parahoric: false",
            |r, v| {
                let got = GroupElem::epsilon_tilde(&r.tower).in_k0(v)?;
                Ok((got.to_string(), got == (v == SubgroupVariant::Stabilizer)))
            },
        );
        self.per_variant(
            "subgroups.z_not_in_k0",
            M,
            "the translation lift is not compact",
            "z̃ ∈ K0",
            false,
            |r, v| eq_outcome(GroupElem::z_tilde(&r.tower).in_k0(v)?, false),
        );
        self.check(
            "subgroups.lower_unipotent",
            M,
            "Iwahori factorization of a lower unipotent",
            "((1 0; ζ 1), 1)",
            "monomial part s̃",
            |r| {
                let tw = &r.tower;
                let g = GroupElem::lower(tw.zeta_in(FieldTag::E2));
                let (k1, m, k2) = g.iwahori_decompose()?;
                let ok = m.to_group(tw) == GroupElem::s_tilde(tw)
                    && k1.in_iwahori()?
                    && k2.in_iwahori()?
                    && k1.mul(&m.to_group(tw)).mul(&k2) == g;
                Ok((format!("{m:?}"), ok))
            },
        );
    }

    fn weyl(&mut self) {
        const M: &str = "weyl";
        self.per_variant(
            "weyl.group_structure",
            M,
            "structure of the extended affine Weyl group",
            "s, s', z, ε; n ≤ 50",
            "all facts hold",
            |r, v| {
                let rep = weyl::group_structure_check(&r.tower, v, 50)?;
                let bad: Vec<_> = rep.facts.iter().filter(|(_, ok)| !ok).map(|(f, _)| f.clone()).collect();
                let got = if bad.is_empty() {
                    format!("{} facts hold", rep.facts.len())
                } else {
                    format!("failed: {}", bad.join("; "))
                };
                Ok((got, rep.pass()))
            },
        );
        for (w, expected) in [("s.z^3", 1), ("s.s'.s", 3), ("1", 0), ("s.s'.s.s'.s.s'", 6)] {
            self.check(&format!("weyl.plength[{w}]"), M, "length on the extended group", w, expected, |_| {
                eq_outcome(w.parse::<WeylElem>()?.plength(), expected)
            });
        }
        for (w, expected) in [("z", [1, 1, -2]), ("s.s'", [1, -1, 0]), ("1", [0, 0, 0])] {
            self.check(&format!("weyl.h_m0[{w}]"), M, "valuation map on the torus", w, format!("{expected:?}"), |r| {
                let got = weyl::h_m0_of(&r.tower, &w.parse()?)?;
                Ok((format!("{got:?}"), got == expected))
            });
        }
    }

    fn lattice(&mut self) {
        self.check(
            "lattice.hnf_and_norm_condition",
            "weyl",
            "image of the valuation map",
            "|n_i| ≤ 4",
            "HNFs equal, conditions agree",
            |r| {
                let rep = weyl::lattice_check(&r.tower)?;
                let got = format!(
                    "HNF {:?} vs {:?}, {} triples agree: {}",
                    rep.congruence_hnf, rep.span_hnf, rep.norm_condition_triples, rep.norm_condition_agrees
                );
                Ok((got, rep.pass()))
            },
        );
    }

    fn cocycle(&mut self) {
        const M: &str = "hecke";
        let (s, z) = (WeylElem::s(), WeylElem::z());
        self.per_variant(
            "cocycle.certificate",
            M,
            "non-triviality of the cocycle",
            "window",
            "((s, z), -1)",
            |r, v| {
                let t = CocycleTable::canonical(r.tower.clone(), v);
                let c = t.nontriviality_certificate(&r.cfg.window(v))?;
                let got = match &c.pair {
                    Some((a, b)) => format!("(({a}, {b}), {})", c.beta),
                    None => "none".into(),
                };
                Ok((got.clone(), got == "((s, z), -1)"))
            },
        );
        self.per_variant(
            "cocycle.commutator_pairing",
            M,
            "commutator of the lifts of s and z",
            "ρ_M0([L(s), L(z)])",
            UnitI::MINUS_ONE,
            |r, v| {
                eq_outcome(CocycleTable::canonical(r.tower.clone(), v).commutator_pairing(&s, &z)?, UnitI::MINUS_ONE)
            },
        );
        self.per_variant(
            "cocycle.beta_perturbed",
            M,
            "non-triviality of the cocycle",
            "β(s, z), 20 perturbed lift families",
            "-1 in all 20",
            |r, v| {
                let mut hits = 0;
                for i in 0..20u64 {
                    let t = CocycleTable::perturbed(r.tower.clone(), v, r.cfg.seed.wrapping_add(i));
                    hits += usize::from(t.beta(&s, &z)? == UnitI::MINUS_ONE);
                }
                Ok((format!("-1 in {hits}"), hits == 20))
            },
        );
        self.per_variant(
            "cocycle.values",
            M,
            "cocycle values on generators",
            "μ(s, s), β(z, z²)",
            "1, 1",
            |r, v| {
                let t = CocycleTable::canonical(r.tower.clone(), v);
                let (a, b) = (t.mu(&s, &s)?, t.beta(&z, &z.pow(2))?);
                Ok((format!("{a}, {b}"), a == UnitI::ONE && b == UnitI::ONE))
            },
        );
        self.per_variant(
            "cocycle.beta_s_e",
            M,
            "the sign element contributes no obstruction",
            "β(s, ε)",
            UnitI::ONE,
            |r, v| eq_outcome(CocycleTable::canonical(r.tower.clone(), v).beta(&s, &WeylElem::e())?, UnitI::ONE),
        );
        self.per_variant(
            "cocycle.normalized",
            M,
            "normalization of the cocycle",
            "μ(1, w), μ(w, 1) on the window",
            "all 1",
            |r, v| {
                let t = CocycleTable::canonical(r.tower.clone(), v);
                let one = WeylElem::identity();
                let mut bad = 0;
                for w in r.cfg.window(v).elements() {
                    bad += usize::from(t.mu(&one, &w)? != UnitI::ONE) + usize::from(t.mu(&w, &one)? != UnitI::ONE);
                }
                Ok((format!("{bad} exceptions"), bad == 0))
            },
        );
        let id = "cocycle.identity";
        self.per_variant(id, M, "cocycle identity", "500 random window triples", "holds on all 500", |r, v| {
            let mut rng = r.rng(&format!("{id}[{v}]"));
            let t = CocycleTable::canonical(r.tower.clone(), v);
            let elems = r.cfg.window(v).elements();
            let mut ok = 0;
            for _ in 0..500 {
                let [a, b, c] = [(); 3].map(|_| elems.choose(&mut rng).expect("window is nonempty").clone());
                let lhs = t.mu(&a, &b)? * t.mu(&a.mul(&b), &c)?;
                let rhs = t.mu(&a, &b.mul(&c))? * t.mu(&b, &c)?;
                ok += usize::from(lhs == rhs);
            }
            Ok((format!("holds on {ok}"), ok == 500))
        });
        self.per_variant(
            "cocycle.negative_control",
            M,
            "no lift family is multiplicative",
            "40 perturbed lift families",
            "0 multiplicative, 0 commuting",
            |r, v| {
                let nc = negative_control(&r.tower, v, r.cfg.seed, 40)?;
                Ok((
                    format!("{} multiplicative, {} commuting", nc.multiplicative, nc.commuting),
                    nc.pass() && nc.families == 40,
                ))
            },
        );
    }

    fn convolution(&mut self) {
        const M: &str = "hecke";
        let q = self.cfg.q as i64;
        let (s, sp) = (WeylElem::s(), WeylElem::s_prime());
        let cases = [
            ("s", s.clone(), "s̃", s.clone(), 0),
            ("s'", sp.clone(), "s̃'", sp.clone(), 0),
            ("s", s.clone(), "1", WeylElem::identity(), q),
        ];
        for (name, w, at, g, expected) in cases {
            self.per_variant(
                &format!("convolution.phi_{name}_sq_at_{at}"),
                M,
                "vanishing of the square of a simple reflection",
                format!("(φ_{name} * φ_{name})({at})"),
                expected,
                |r, v| {
                    let ctx = HeckeContext::new(r.tower.clone(), r.cfg.window(v));
                    let phi = HeckeBasisFn::new(w.clone());
                    eq_outcome(ctx.convolve_at(&phi, &phi, &g.lift(&r.tower))?, gi(expected))
                },
            );
        }
        let products = [("s", "s", "{1, s}"), ("s", "s'", "{s.s'}"), ("z", "s", "{s.z}"), ("z", "z^-1", "{1}")];
        for (a, b, expected) in products {
            self.per_variant(
                &format!("convolution.double_coset[{a},{b}]"),
                M,
                "products of double cosets",
                format!("K0 {a} K0 {b} K0"),
                expected,
                |r, v| {
                    let ctx = HeckeContext::new(r.tower.clone(), r.cfg.window(v));
                    let got: BTreeSet<WeylElem> = ctx.double_coset_product(&a.parse()?, &b.parse()?)?;
                    let got = fmt_set(&got);
                    Ok((got.clone(), got == expected))
                },
            );
        }
        self.per_variant(
            "convolution.classify_lower",
            M,
            "double coset of a lower unipotent",
            "((1 0; ζ 1), 1)",
            "s",
            |r, v| {
                let ctx = HeckeContext::new(r.tower.clone(), r.cfg.window(v));
                let w = ctx.classify_double_coset(&GroupElem::lower(r.tower.zeta_in(FieldTag::E2)))?;
                eq_outcome(w, WeylElem::s())
            },
        );
    }

    fn omega(&mut self) {
        const M: &str = "hecke";
        self.per_variant(
            "omega.additive_pairs",
            M,
            "length-additive products are single double cosets",
            "window pairs",
            "0 failures",
            |r, v| {
                let ctx = HeckeContext::new(r.tower.clone(), r.cfg.window(v));
                let (pairs, failures) = ctx.additive_pairs_check()?;
                let got = match failures.first() {
                    None => format!("{pairs} pairs, 0 failures"),
                    Some(f) => format!("{pairs} pairs, {} failures, first {f}", failures.len()),
                };
                Ok((got, failures.is_empty()))
            },
        );
        self.per_variant("omega.support", M, "the Hecke algebra is supported on Ω", "window", "pass", |r, v| {
            let ctx = HeckeContext::new(r.tower.clone(), r.cfg.window(v));
            let rep = ctx.omega_check()?;
            let got = format!(
                "{} pairs, {} failures, (φ_s*φ_s)(s̃) = {}, (φ_s'*φ_s')(s̃') = {}",
                rep.pairs,
                rep.failures.len(),
                rep.phi_s_sq_at_s,
                rep.phi_sp_sq_at_sp
            );
            Ok((got, rep.pass()))
        });
    }

    fn algebra(&mut self) {
        const M: &str = "algebra";
        let q = self.cfg.q as i64;
        self.check(
            "algebra.quadratic_relation",
            M,
            "abstract Hecke algebra",
            "T_s·T_s in H(Ã1, q)",
            format!("{q}·T_1 + {}·T_s", q - 1),
            |_| {
                let cox = Arc::new(CoxeterSystem::affine_a1());
                let h = HeckeAlgebra::new(cox, vec![gi(q), gi(q)])?;
                let ts = GenericHeckeElem::basis(vec![0]);
                let p = h.mul(&ts, &ts)?;
                let ok = p == GenericHeckeElem::from_terms([(vec![], gi(q)), (vec![0], gi(q - 1))]);
                Ok((format!("{:?}", p.terms()), ok))
            },
        );
        let id = "algebra.hecke_associativity";
        self.check(
            id,
            M,
            "abstract Hecke algebra",
            "100 random triples in H(Ã1, q) and H(A2, q)",
            "associative on all",
            |r| {
                let mut rng = r.rng(id);
                let mut ok = 0;
                for cox in [CoxeterSystem::affine_a1(), CoxeterSystem::type_a(2)] {
                    let h = HeckeAlgebra::new(Arc::new(cox), vec![gi(q), gi(q)])?;
                    for _ in 0..100 {
                        let [a, b, c] = [(); 3].map(|_| random_hecke(&mut rng, h.coxeter()));
                        let (a, b, c) = (a?, b?, c?);
                        ok += usize::from(h.mul(&h.mul(&a, &b)?, &c)? == h.mul(&a, &h.mul(&b, &c)?)?);
                    }
                }
                Ok((format!("{ok} of 200"), ok == 200))
            },
        );
        let id = "algebra.crossed_associativity";
        self.check(
            id,
            M,
            "crossed product with the twisted group algebra",
            "100 random triples in C[Z/2] ⋉ H(Ã1, q)",
            "associative on all",
            |r| {
                let mut rng = r.rng(id);
                let cp = algebra::extended_affine_a1(gi(q))?;
                let mut ok = 0;
                for _ in 0..100 {
                    let [a, b, c] = [(); 3].map(|_| random_crossed(&mut rng, cp.hecke().coxeter()));
                    let (a, b, c) = (a?, b?, c?);
                    ok += usize::from(cp.mul(&cp.mul(&a, &b)?, &c)? == cp.mul(&a, &cp.mul(&b, &c)?)?);
                }
                Ok((format!("{ok} of 100"), ok == 100))
            },
        );
        self.check(
            "algebra.broken_cocycle",
            M,
            "twisted group algebra",
            "sign cocycle on (Z/2)², one value negated",
            "intact: associative; broken: not",
            |_| {
                type V4 = Product<Cyclic<2>, Cyclic<2>>;
                let elems: Vec<V4> =
                    Cyclic::<2>::all().flat_map(|a| Cyclic::<2>::all().map(move |b| Product(a, b))).collect();
                let sign = |a: &V4, b: &V4| if a.0.value() * b.1.value() == 1 { gi(-1) } else { gi(1) };
                let good: CocycleRef<V4, HeckeCoeff> = Arc::new(FnCocycle(sign));
                let target = (elems[3], elems[2]);
                let broken: CocycleRef<V4, HeckeCoeff> =
                    Arc::new(FnCocycle(
                        move |a: &V4, b: &V4| if (*a, *b) == target { -sign(a, b) } else { sign(a, b) },
                    ));
                let failures = |mu: &CocycleRef<V4, HeckeCoeff>| -> Result<usize> {
                    let mut bad = 0;
                    for a in &elems {
                        for b in &elems {
                            for c in &elems {
                                bad += usize::from(!cocycle_identity_holds(mu.as_ref(), a, b, c)?);
                                let [ea, eb, ec] = [a, b, c].map(|g| TwistedElem::basis(mu, *g));
                                bad += usize::from(
                                    twisted_mul(&twisted_mul(&ea, &eb)?, &ec)?
                                        != twisted_mul(&ea, &twisted_mul(&eb, &ec)?)?,
                                );
                            }
                        }
                    }
                    Ok(bad)
                };
                let (g, b) = (failures(&good)?, failures(&broken)?);
                Ok((format!("intact: {g} failures; broken: {b} failures"), g == 0 && b > 0))
            },
        );
        let id = "algebra.example_associativity";
        self.per_variant(
            id,
            M,
            "twisted group algebra of Ω",
            "100 random triples on the window",
            "associative on all",
            |r, v| {
                let mut rng = r.rng(&format!("{id}[{v}]"));
                let alg = build_example_algebra(&r.tower, v)?;
                let elems = r.cfg.window(v).elements();
                let mut ok = 0;
                for _ in 0..100 {
                    let [a, b, c] = [(); 3].map(|_| {
                        let terms: Vec<_> = (0..rng.gen_range(1..3))
                            .map(|_| {
                                (elems.choose(&mut rng).expect("window is nonempty").clone(), gi(rng.gen_range(-2..=2)))
                            })
                            .collect();
                        TwistedElem::from_terms(alg.cocycle(), terms)
                    });
                    ok += usize::from(alg.mul(&alg.mul(&a, &b)?, &c)? == alg.mul(&a, &alg.mul(&b, &c)?)?);
                }
                Ok((format!("{ok} of 100"), ok == 100))
            },
        );
        self.per_variant(
            "algebra.example_commutator",
            M,
            "twisted group algebra of Ω",
            "e_s e_z e_s⁻¹ e_z⁻¹",
            "-e_1",
            |r, v| {
                let alg = build_example_algebra(&r.tower, v)?;
                let (s, z) = (WeylElem::s(), WeylElem::z());
                let mut acc = alg.basis(&s);
                for f in [alg.basis(&z), alg.basis_inverse(&s)?, alg.basis_inverse(&z)?] {
                    acc = alg.mul(&acc, &f)?;
                }
                let ok = acc == alg.basis(&WeylElem::identity()).scale(&gi(-1));
                Ok((format!("{acc:?}"), ok))
            },
        );
        self.per_variant(
            "algebra.structure_constants",
            M,
            "twisted group algebra of Ω",
            "e_s·e_z, e_s·e_s",
            "μ(s, z)·e_{s.z}, e_1",
            |r, v| {
                let alg = build_example_algebra(&r.tower, v)?;
                let (s, z) = (WeylElem::s(), WeylElem::z());
                let (w1, c1) = alg.structure_constant(&s, &z)?;
                let (w2, c2) = alg.structure_constant(&s, &s)?;
                let mu = alg.table().mu(&s, &z)?.to_coeff();
                let ok = w1 == s.mul(&z) && c1 == mu && w2.is_identity() && c2 == gi(1);
                Ok((format!("{c1}·e_{w1}, {c2}·e_{w2}"), ok))
            },
        );
        self.per_variant(
            "algebra.crossed_reduces_to_twisted",
            M,
            "the example as a crossed product",
            "window pairs, trivial affine part",
            "products agree",
            |r, v| {
                let alg = build_example_algebra(&r.tower, v)?;
                let elems = Window { words: 2, z: 1, variant: v }.elements();
                let mut bad = 0;
                for a in &elems {
                    for b in &elems {
                        let tw = alg.mul(&alg.basis(a), &alg.basis(b))?;
                        let cp = alg
                            .crossed()
                            .mul(&CrossedElem::basis(a.clone(), vec![]), &CrossedElem::basis(b.clone(), vec![]))?;
                        let as_crossed =
                            CrossedElem::from_terms(tw.terms().iter().map(|(g, c)| ((g.clone(), vec![]), c.clone())));
                        bad += usize::from(cp != as_crossed);
                    }
                }
                Ok((format!("{bad} disagreements"), bad == 0))
            },
        );
    }
}

fn random_hecke(rng: &mut ChaCha8Rng, cox: &CoxeterSystem) -> Result<GenericHeckeElem<HeckeCoeff>> {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..4) {
        let w: Vec<usize> = (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..cox.rank())).collect();
        terms.push((
            cox.normal_form(&w)?,
            HeckeCoeff::new(BigInt::from(rng.gen_range(-3..=3)), BigInt::from(rng.gen_range(-3..=3))),
        ));
    }
    Ok(GenericHeckeElem::from_terms(terms))
}

fn random_crossed(rng: &mut ChaCha8Rng, cox: &CoxeterSystem) -> Result<CrossedElem<Cyclic<2>, HeckeCoeff>> {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..3) {
        let w: Vec<usize> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect();
        terms.push(((Cyclic::new(rng.gen_range(0..2)), cox.normal_form(&w)?), gi(rng.gen_range(-2..=2))));
    }
    Ok(CrossedElem::from_terms(terms))
}

/// Runs the given sections in order.
pub fn run_sections(cfg: &Config, sections: &[Section]) -> Result<Report> {
    let tower = cfg.validate()?;
    let mut runner = Runner { cfg, tower, checks: Vec::new() };
    for &s in sections {
        runner.run(s);
    }
    let checks = runner.checks;
    let count = |st: Status| checks.iter().filter(|c| c.status == st).count();
    let summary = Summary {
        total: checks.len(),
        pass: count(Status::Pass),
        fail: count(Status::Fail),
        skipped: count(Status::Skipped),
    };
    Ok(Report { config: cfg.clone(), conventions: vec![ACTION_CONVENTION], checks, summary })
}

pub fn run_all(cfg: &Config) -> Result<Report> {
    run_sections(cfg, &Section::ALL)
}

/// Structure constants of the example algebra over the window, as CSV
/// rows `u, v, uv, re, im`.
pub fn structure_constant_rows(cfg: &Config) -> Result<Vec<[String; 5]>> {
    let tower = cfg.validate()?;
    let mut rows = Vec::new();
    for v in SubgroupVariant::ALL.into_iter().filter(|&v| cfg.variant.includes(v)) {
        let alg = build_example_algebra(&tower, v)?;
        for (a, b, ab, c) in alg.structure_constants(&cfg.window(v))? {
            rows.push([a.to_string(), b.to_string(), ab.to_string(), c.re.to_string(), c.im.to_string()]);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Config {
        Config { window_words: 2, window_z: 1, ..Config::default() }
    }

    #[test]
    fn config_validation() {
        assert!(matches!(Config { q: 7, ..small() }.validate(), Err(Error::InadmissibleQ { .. })));
        assert!(matches!(Config { precision: 8, ..small() }.validate(), Err(Error::Config(_))));
        assert!(matches!(Config { window_words: 5, ..small() }.validate(), Err(Error::Config(_))));
        assert!(small().validate().is_ok());
        assert_eq!("parahoric".parse::<VariantChoice>().unwrap(), VariantChoice::Parahoric);
        assert_eq!("omega".parse::<Section>().unwrap(), Section::Omega);
        assert!("bogus".parse::<Section>().is_err());
    }

    #[test]
    fn cheap_sections_pass() {
        let cfg = small();
        let r = run_sections(
            &cfg,
            &[Section::Residue, Section::Norms, Section::Genericity, Section::Lattice, Section::Subgroups],
        )
        .unwrap();
        for c in &r.checks {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.to_text().lines().count(), r.checks.len() + 1);
    }

    #[test]
    fn variant_filter_skips() {
        let cfg = Config { variant: VariantChoice::Parahoric, ..small() };
        let r = run_sections(&cfg, &[Section::Epsilon]).unwrap();
        let st: Vec<_> = r.checks.iter().map(|c| (c.id.as_str(), c.status)).collect();
        assert_eq!(
            st,
            [("epsilon.fks_trivial[stabilizer]", Status::Skipped), ("epsilon.fks_trivial[parahoric]", Status::Pass)]
        );
    }

    #[test]
    fn failing_check_sets_exit_code() {
        let mut r = run_sections(&small(), &[Section::Lattice]).unwrap();
        r.checks[0].status = Status::Fail;
        r.summary.fail = 1;
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_text().lines().nth(1).unwrap().starts_with('✗'));
    }
}
