//! Genericity of the depth-¼ and depth-½ characters, checked on coroots of
//! the diagonal torus of `GL8` through its eigencoordinates.
//!
//! Over a splitting field, `F^⊕8 ≅ E2 ⊕ E2 ⊕ E4` decomposes into eight
//! eigenlines indexed by a block and a Galois index. The coroot of the root
//! `(i, j)` is `E_ii − E_jj`, so a diagonal functional pairs with it as the
//! difference of its weights at `i` and `j`.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::tower::{FieldTag, LaurentElem, TowerRef, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Block {
    E2Slot1,
    E2Slot2,
    E4,
}

impl Block {
    pub fn degree(self) -> i64 {
        match self {
            Block::E4 => 4,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EigenCoordinate {
    pub block: Block,
    pub galois_index: i64,
}

impl EigenCoordinate {
    pub fn new(block: Block, galois_index: i64) -> Self {
        assert!((0..block.degree()).contains(&galois_index), "galois index out of range");
        EigenCoordinate { block, galois_index }
    }

    /// All eight coordinates.
    pub fn all() -> Vec<EigenCoordinate> {
        [Block::E2Slot1, Block::E2Slot2, Block::E4]
            .into_iter()
            .flat_map(|b| (0..b.degree()).map(move |k| EigenCoordinate::new(b, k)))
            .collect()
    }
}

impl fmt::Display for EigenCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.block {
            Block::E2Slot1 => "E2.1",
            Block::E2Slot2 => "E2.2",
            Block::E4 => "E4",
        };
        write!(f, "{b}[{}]", self.galois_index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Functional {
    X0Star,
    X1Star,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Level {
    /// Roots of `G¹` that are not roots of `G⁰`.
    G1MinusG0,
    /// Roots of `GL8` that are not roots of `G¹`.
    G2MinusG1,
}

impl Level {
    pub fn functional(self) -> Functional {
        match self {
            Level::G1MinusG0 => Functional::X0Star,
            Level::G2MinusG1 => Functional::X1Star,
        }
    }

    /// Target valuation of the pairing on every root at this level.
    pub fn target(self) -> Valuation {
        match self {
            Level::G1MinusG0 => Valuation::new(-1, 4),
            Level::G2MinusG1 => Valuation::new(-1, 2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RootPair {
    pub i: EigenCoordinate,
    pub j: EigenCoordinate,
    pub level: Level,
}

impl RootPair {
    pub fn swapped(self) -> RootPair {
        RootPair { i: self.j, j: self.i, level: self.level }
    }
}

/// Roots of `G⁰ = Res GL2(E2)`: same Galois index, different slots.
fn in_g0(i: EigenCoordinate, j: EigenCoordinate) -> bool {
    let e2 = |b| matches!(b, Block::E2Slot1 | Block::E2Slot2);
    e2(i.block) && e2(j.block) && i.block != j.block && i.galois_index == j.galois_index
}

/// Ordered root pairs at the given level: 12 for `G¹ ∖ G⁰`, 40 for `GL8 ∖ G¹`.
pub fn root_pairs(level: Level) -> Vec<RootPair> {
    let coords = EigenCoordinate::all();
    let mut out = Vec::new();
    for &i in &coords {
        for &j in &coords {
            if i == j || in_g0(i, j) {
                continue;
            }
            let both_e4 = i.block == Block::E4 && j.block == Block::E4;
            let pair_level = if both_e4 { Level::G1MinusG0 } else { Level::G2MinusG1 };
            if pair_level == level {
                out.push(RootPair { i, j, level });
            }
        }
    }
    out
}

/// The diagonal weight of `X0*` or `X1*` at one eigencoordinate.
pub fn weight(tower: &TowerRef, c: EigenCoordinate, functional: Functional) -> Result<LaurentElem> {
    let (tag, active) = match (functional, c.block) {
        (Functional::X0Star, Block::E4) => (FieldTag::E4, true),
        (Functional::X0Star, _) => (FieldTag::E4, false),
        (Functional::X1Star, Block::E4) => (FieldTag::E2, false),
        (Functional::X1Star, _) => (FieldTag::E2, true),
    };
    if !active {
        return Ok(tower.zero(tag));
    }
    tower.uniformizer(tag).inv()?.galois(c.galois_index)
}

pub fn pairing_on_coroot(tower: &TowerRef, r: RootPair) -> Result<LaurentElem> {
    let f = r.level.functional();
    Ok(weight(tower, r.i, f)? - weight(tower, r.j, f)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct RootValuation {
    pub root: String,
    pub value: LaurentElem,
    pub ord: Option<Valuation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityReport {
    pub level: Level,
    pub target: Valuation,
    pub roots: Vec<RootValuation>,
    pub pass: bool,
}

/// Pairs the functional with every coroot at `level`; passes iff every
/// valuation equals the target exactly.
pub fn check_ge1(tower: &TowerRef, level: Level) -> Result<GenericityReport> {
    let target = level.target();
    let mut roots = Vec::new();
    let mut pass = true;
    for r in root_pairs(level) {
        let value = pairing_on_coroot(tower, r)?;
        let ord = value.ord().ok();
        pass &= ord == Some(target);
        roots.push(RootValuation { root: format!("({}, {})", r.i, r.j), value, ord });
    }
    Ok(GenericityReport { level, target, roots, pass })
}

/// Valuation of the functional on its explicit witness Lie element, scaled
/// by `t^shift`: `X0*(0, π₄)` at level 0 and `X1*(diag(π₂, 0), 0)` at level 1.
pub fn check_ge0_witness(tower: &TowerRef, functional: Functional, shift: i64) -> Result<Valuation> {
    let value = match functional {
        Functional::X0Star => {
            let p4 = tower.uniformizer(FieldTag::E4);
            (p4.inv()? * &p4).trace_to_f()?
        }
        Functional::X1Star => {
            // Lie(det) of diag(π₂, 0) is its trace π₂.
            let p2 = tower.uniformizer(FieldTag::E2);
            (p2.inv()? * &p2).trace_to_f()?
        }
    };
    (value * tower.t(FieldTag::F).pow(shift)?).ord()
}

/// Distinct values of the level-2 pairings, as multiples `c·π₂⁻¹`.
pub fn level2_value_set(tower: &TowerRef) -> Result<Vec<i64>> {
    let f = tower.field();
    let p2_inv = tower.uniformizer(FieldTag::E2).inv()?;
    let candidates = [-2, -1, 1, 2];
    let mut seen = Vec::new();
    for r in root_pairs(Level::G2MinusG1) {
        let v = pairing_on_coroot(tower, r)?;
        let c = candidates
            .into_iter()
            .find(|&c| v == p2_inv.scale(f.from_int(c)))
            .ok_or_else(|| crate::Error::Membership(format!("unexpected pairing value {v}")))?;
        if !seen.contains(&c) {
            seen.push(c);
        }
    }
    seen.sort_unstable();
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::ResidueElem;
    use crate::tower::Tower;

    fn tower() -> TowerRef {
        Tower::with_q(5, 24).unwrap()
    }

    #[test]
    fn pair_counts() {
        assert_eq!(EigenCoordinate::all().len(), 8);
        assert_eq!(root_pairs(Level::G1MinusG0).len(), 12);
        assert_eq!(root_pairs(Level::G2MinusG1).len(), 40);
        // 56 roots of GL8, 4 of them in G⁰.
        let g0 = EigenCoordinate::all()
            .iter()
            .flat_map(|&i| EigenCoordinate::all().into_iter().map(move |j| (i, j)))
            .filter(|&(i, j)| in_g0(i, j))
            .count();
        assert_eq!(g0, 4);
    }

    #[test]
    fn weight_examples() {
        let tw = tower();
        let p4 = tw.uniformizer(FieldTag::E4);
        let p2 = tw.uniformizer(FieldTag::E2);
        let w = weight(&tw, EigenCoordinate::new(Block::E4, 0), Functional::X0Star).unwrap();
        assert_eq!(w, p4.inv().unwrap());
        let w = weight(&tw, EigenCoordinate::new(Block::E2Slot1, 1), Functional::X1Star).unwrap();
        assert_eq!(w, -p2.inv().unwrap());
        let w = weight(&tw, EigenCoordinate::new(Block::E4, 1), Functional::X1Star).unwrap();
        assert!(w.is_exact_zero());
    }

    #[test]
    fn pairing_examples() {
        let tw = tower();
        let f = tw.field();
        let e4 = |k| EigenCoordinate::new(Block::E4, k);
        let r = RootPair { i: e4(0), j: e4(1), level: Level::G1MinusG0 };
        let v = pairing_on_coroot(&tw, r).unwrap();
        // σ₄(π₄⁻¹) = i₄⁻¹π₄⁻¹ = −i₄π₄⁻¹.
        let expect = tw.uniformizer(FieldTag::E4).inv().unwrap().scale(f.add(ResidueElem::ONE, tw.i4()));
        assert_eq!(v, expect);
        assert_eq!(v.ord().unwrap(), Valuation::new(-1, 4));

        let p2_inv = tw.uniformizer(FieldTag::E2).inv().unwrap();
        let r = RootPair {
            i: EigenCoordinate::new(Block::E2Slot1, 0),
            j: EigenCoordinate::new(Block::E2Slot2, 1),
            level: Level::G2MinusG1,
        };
        assert_eq!(pairing_on_coroot(&tw, r).unwrap(), p2_inv.scale(f.from_int(2)));
        let r = RootPair { i: EigenCoordinate::new(Block::E2Slot1, 0), j: e4(0), level: Level::G2MinusG1 };
        assert_eq!(pairing_on_coroot(&tw, r).unwrap(), p2_inv);
    }

    #[test]
    fn ge1_holds_at_both_levels() {
        for q in [5, 13] {
            let tw = Tower::with_q(q, 16).unwrap();
            for level in [Level::G1MinusG0, Level::G2MinusG1] {
                let rep = check_ge1(&tw, level).unwrap();
                assert!(rep.pass, "{level:?} at q = {q}");
            }
            assert_eq!(level2_value_set(&tw).unwrap(), vec![-2, -1, 1, 2]);
        }
    }

    #[test]
    fn antisymmetry_and_galois_stability() {
        let tw = tower();
        for level in [Level::G1MinusG0, Level::G2MinusG1] {
            for r in root_pairs(level) {
                let a = pairing_on_coroot(&tw, r).unwrap();
                let b = pairing_on_coroot(&tw, r.swapped()).unwrap();
                assert_eq!(a, -b);
            }
        }
        let values: Vec<LaurentElem> =
            root_pairs(Level::G1MinusG0).into_iter().map(|r| pairing_on_coroot(&tw, r).unwrap()).collect();
        for v in &values {
            let moved = v.galois(1).unwrap();
            assert!(values.contains(&moved));
        }
    }

    #[test]
    fn witnesses() {
        let tw = tower();
        assert_eq!(check_ge0_witness(&tw, Functional::X0Star, 0).unwrap(), Valuation::new(0, 1));
        assert_eq!(check_ge0_witness(&tw, Functional::X1Star, 0).unwrap(), Valuation::new(0, 1));
        assert_eq!(check_ge0_witness(&tw, Functional::X1Star, 1).unwrap(), Valuation::new(1, 1));
        assert_eq!(check_ge0_witness(&tw, Functional::X0Star, -2).unwrap(), Valuation::new(-2, 1));
    }
}
