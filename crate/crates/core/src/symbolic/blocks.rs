use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SymbolicError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// An opaque Cantor space.
    Cantor,
    Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Zero,
    Positive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub label: String,
    pub kind: BlockKind,
    pub measure: Measure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrowKind {
    /// Homeomorphism between Cantor blocks; `via` lists the named maps in the
    /// order they are applied.
    Bijection { via: Vec<String> },
    /// The whole source goes to a single point.
    ConstantOntoPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub to: String,
    pub kind: ArrowKind,
}

impl Arrow {
    pub fn bijection(to: &str, via: &[&str]) -> Self {
        Arrow { to: to.to_string(), kind: ArrowKind::Bijection { via: via.iter().map(|s| s.to_string()).collect() } }
    }

    pub fn constant(to: &str) -> Self {
        Arrow { to: to.to_string(), kind: ArrowKind::ConstantOntoPoint }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ArrowKind::Bijection { via } => {
                let names: Vec<&str> = via.iter().rev().map(String::as_str).collect();
                write!(f, "-[{}]-> {}", names.join("∘"), self.to)
            }
            ArrowKind::ConstantOntoPoint => write!(f, "-> {}", self.to),
        }
    }
}

/// Self-map of a disjoint union of Cantor blocks and points, described one
/// block at a time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSystem {
    blocks: Vec<Block>,
    arrows: BTreeMap<String, Arrow>,
}

impl BlockSystem {
    /// Checks that arrows are total, go Cantor → Cantor as bijections and
    /// anything → point as constants.
    pub fn new(blocks: Vec<Block>, arrows: Vec<(String, Arrow)>) -> Result<Self, SymbolicError> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if !seen.insert(b.label.clone()) {
                return Err(SymbolicError::DuplicateLabel(b.label.clone()));
            }
        }
        let mut map = BTreeMap::new();
        for (from, arrow) in arrows {
            let src =
                blocks.iter().find(|b| b.label == from).ok_or_else(|| SymbolicError::UnknownBlock(from.clone()))?;
            let dst = blocks
                .iter()
                .find(|b| b.label == arrow.to)
                .ok_or_else(|| SymbolicError::UnknownBlock(arrow.to.clone()))?;
            let bad = |why| SymbolicError::BadArrow { from: from.clone(), to: arrow.to.clone(), why };
            match (&arrow.kind, src.kind, dst.kind) {
                (ArrowKind::Bijection { via }, BlockKind::Cantor, BlockKind::Cantor) if !via.is_empty() => {}
                (ArrowKind::Bijection { .. }, BlockKind::Cantor, BlockKind::Cantor) => {
                    return Err(bad("unnamed bijection"))
                }
                (ArrowKind::Bijection { .. }, _, _) => return Err(bad("bijections join two Cantor blocks")),
                (ArrowKind::ConstantOntoPoint, _, BlockKind::Point) => {}
                (ArrowKind::ConstantOntoPoint, _, BlockKind::Cantor) => {
                    return Err(bad("constant arrows end at a point"))
                }
            }
            if map.insert(from.clone(), arrow).is_some() {
                return Err(SymbolicError::DuplicateArrow(from));
            }
        }
        if let Some(b) = blocks.iter().find(|b| !map.contains_key(&b.label)) {
            return Err(SymbolicError::MissingArrow(b.label.clone()));
        }
        Ok(BlockSystem { blocks, arrows: map })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, label: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn arrow(&self, label: &str) -> Option<&Arrow> {
        self.arrows.get(label)
    }

    /// Copy with one measure tag changed.
    pub fn with_measure(&self, label: &str, measure: Measure) -> Result<BlockSystem, SymbolicError> {
        let mut blocks = self.blocks.clone();
        let b = blocks
            .iter_mut()
            .find(|b| b.label == label)
            .ok_or_else(|| SymbolicError::UnknownBlock(label.to_string()))?;
        b.measure = measure;
        BlockSystem::new(blocks, self.arrows.clone().into_iter().collect())
    }

    /// Copy with the arrow out of `label` replaced.
    pub fn with_arrow(&self, label: &str, arrow: Arrow) -> Result<BlockSystem, SymbolicError> {
        let mut arrows = self.arrows.clone();
        arrows.insert(label.to_string(), arrow);
        BlockSystem::new(self.blocks.clone(), arrows.into_iter().collect())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BlockSystem) -> Result<BlockSystem, SymbolicError> {
        if self.blocks != inner.blocks {
            return Err(SymbolicError::DomainMismatch);
        }
        let arrows = inner
            .arrows
            .iter()
            .map(|(from, first)| {
                let second = &self.arrows[&first.to];
                let kind = match (&first.kind, &second.kind) {
                    (ArrowKind::Bijection { via: a }, ArrowKind::Bijection { via: b }) => {
                        ArrowKind::Bijection { via: a.iter().chain(b).cloned().collect() }
                    }
                    _ => ArrowKind::ConstantOntoPoint,
                };
                (from.clone(), Arrow { to: second.to.clone(), kind })
            })
            .collect();
        BlockSystem::new(self.blocks.clone(), arrows)
    }

    /// Preimage of a union of whole blocks. Exact because every arrow is onto
    /// its target.
    pub fn preimage(&self, targets: &BTreeSet<String>) -> BTreeSet<String> {
        self.arrows.iter().filter(|(_, a)| targets.contains(&a.to)).map(|(from, _)| from.clone()).collect()
    }

    pub fn measure_of(&self, labels: &BTreeSet<String>) -> Measure {
        labels.iter().filter_map(|l| self.block(l)).map(|b| b.measure).max().unwrap_or(Measure::Zero)
    }

    /// Measure tag of the fiber `f⁻¹(x)` for any single point `x` of block
    /// `label`. Inside a Cantor block only bijections arrive, each
    /// contributing one point.
    pub fn point_fiber_measure(&self, label: &str) -> Measure {
        match self.block(label).map(|b| b.kind) {
            Some(BlockKind::Point) => self.measure_of(&self.preimage(&BTreeSet::from([label.to_string()]))),
            _ => Measure::Zero,
        }
    }
}

impl fmt::Display for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            writeln!(f, "{} {}", b.label, self.arrows[&b.label])?;
        }
        Ok(())
    }
}

fn cantor(label: &str, measure: Measure) -> Block {
    Block { label: label.to_string(), kind: BlockKind::Cantor, measure }
}

fn point(label: &str) -> Block {
    Block { label: label.to_string(), kind: BlockKind::Point, measure: Measure::Zero }
}

fn ex4_blocks() -> Vec<Block> {
    vec![
        cantor("C_hat", Measure::Positive),
        cantor("C1", Measure::Zero),
        cantor("C2", Measure::Zero),
        cantor("C3", Measure::Zero),
        point("x0"),
        point("x1"),
        point("x2"),
        point("x3"),
    ]
}

fn bij(to: &str, via: &[&str]) -> Arrow {
    Arrow::bijection(to, via)
}

fn constant(to: &str) -> Arrow {
    Arrow::constant(to)
}

fn system(arrows: Vec<(&str, Arrow)>) -> BlockSystem {
    BlockSystem::new(ex4_blocks(), arrows.into_iter().map(|(l, a)| (l.to_string(), a)).collect())
        .expect("the built-in system is well formed")
}

/// `Ĉ → C1 → C2 → C3 → x0 → x1 → x2 → x3 → x0`, with `Ĉ` of positive measure.
pub fn ex4_g() -> BlockSystem {
    system(vec![
        ("C_hat", bij("C1", &["phi1"])),
        ("C1", bij("C2", &["phi2"])),
        ("C2", bij("C3", &["phi3"])),
        ("C3", constant("x0")),
        ("x0", constant("x1")),
        ("x1", constant("x2")),
        ("x2", constant("x3")),
        ("x3", constant("x0")),
    ])
}

/// `Ĉ → C2 → x0 → x2 → x0` and `C1 → C3 → x1 → x3 → x1`.
pub fn ex4_expected_f() -> BlockSystem {
    system(vec![
        ("C_hat", bij("C2", &["phi1", "phi2"])),
        ("C2", constant("x0")),
        ("x0", constant("x2")),
        ("x2", constant("x0")),
        ("C1", bij("C3", &["phi2", "phi3"])),
        ("C3", constant("x1")),
        ("x1", constant("x3")),
        ("x3", constant("x1")),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub f: BlockSystem,
    /// `f⁻²(x0)` as whole blocks.
    pub second_preimage: BTreeSet<String>,
    pub assertions: Vec<Assertion>,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.holds)
    }
}

/// Squares `g` and checks that `f = g²` matches `expected` while meeting the
/// measure analogue of the certificate at `x0`.
pub fn block_verify(g: &BlockSystem, expected: &BlockSystem, x0: &str) -> Result<BlockReport, SymbolicError> {
    let f = g.compose(g)?;
    let mut assertions = Vec::new();
    let push = |assertions: &mut Vec<Assertion>, name: &str, holds: bool, detail: String| {
        assertions.push(Assertion { name: name.to_string(), holds, detail });
    };

    let mismatched: Vec<String> = f
        .blocks()
        .iter()
        .filter(|b| f.arrow(&b.label) != expected.arrow(&b.label))
        .map(|b| format!("{} {}", b.label, f.arrows[&b.label]))
        .collect();
    push(
        &mut assertions,
        "g composed with g gives the expected f",
        mismatched.is_empty() && f.blocks == expected.blocks,
        mismatched.join("; "),
    );

    let image = f.arrow(x0).ok_or_else(|| SymbolicError::UnknownBlock(x0.to_string()))?.to.clone();
    push(&mut assertions, "f(x0) != x0", image != x0, format!("f({x0}) = {image}"));

    let fiber1 = f.preimage(&BTreeSet::from([x0.to_string()]));
    let fiber2 = f.preimage(&fiber1);
    let positive = f.measure_of(&fiber2) == Measure::Positive;
    push(
        &mut assertions,
        "f^-2(x0) has positive measure",
        positive,
        format!("f^-2({x0}) = {{{}}}", fiber2.iter().cloned().collect::<Vec<_>>().join(", ")),
    );

    let heavy: Vec<&str> = f
        .blocks()
        .iter()
        .filter(|b| b.label != x0 && f.point_fiber_measure(&b.label) != Measure::Zero)
        .map(|b| b.label.as_str())
        .collect();
    push(&mut assertions, "f^-1(x) has measure zero for x != x0", heavy.is_empty(), heavy.join(", "));

    let premises = assertions.iter().all(|a| a.holds);
    push(
        &mut assertions,
        "measure analogue would certify f, yet f = g^2",
        premises,
        if premises {
            "a square root exists although the measure criterion holds".into()
        } else {
            "premises fail".into()
        },
    );
    Ok(BlockReport { f, second_preimage: fiber2, assertions })
}

pub fn block_verify_ex4() -> BlockReport {
    block_verify(&ex4_g(), &ex4_expected_f(), "x0").expect("built-in system")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_must_be_total_and_typed() {
        let missing = BlockSystem::new(ex4_blocks(), vec![("x0".into(), constant("x1"))]);
        assert!(matches!(missing, Err(SymbolicError::MissingArrow(_))));
        let typed = BlockSystem::new(
            vec![point("p"), cantor("C", Measure::Zero)],
            vec![("p".into(), bij("C", &["h"])), ("C".into(), constant("p"))],
        );
        assert!(matches!(typed, Err(SymbolicError::BadArrow { .. })));
    }

    #[test]
    fn square_of_g_lists_both_chains() {
        let f = ex4_g().compose(&ex4_g()).unwrap();
        assert_eq!(f, ex4_expected_f());
        assert_eq!(f.arrow("C_hat").unwrap().to_string(), "-[phi2∘phi1]-> C2");
    }
}
