//! Solvability facts, their closure over the model lattice, and the pairwise
//! relations between models that the closure supports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelId;
use crate::problems::ProblemKind;

/// The six problems used as witnesses between models.
pub const WITNESSES: [ProblemKind; 6] = [
    ProblemKind::TriangleRoundTrip,
    ProblemKind::FlipFlopFlip,
    ProblemKind::Newcomer,
    ProblemKind::Spinning,
    ProblemKind::AngleShift,
    ProblemKind::Pseudo,
];

/// Built-in facts.
pub const DEFAULT_FACTS: &str = include_str!("../data/facts.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFact {
    pub problem: ProblemKind,
    pub model: ModelId,
    pub solvable: bool,
    pub lemma: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum RelmapError {
    #[error("contradiction on {problem} in {model}: '{solvable_by}' makes it solvable, '{unsolvable_by}' unsolvable")]
    Contradiction { problem: ProblemKind, model: ModelId, solvable_by: String, unsolvable_by: String },
    #[error("no relation between {0} and {1} is consistent with the facts")]
    Inconsistent(ModelId, ModelId),
    #[error("facts file: {0}")]
    Parse(String),
}

pub fn parse_facts(json: &str) -> Result<Vec<WitnessFact>, RelmapError> {
    serde_json::from_str(json).map_err(|e| RelmapError::Parse(e.to_string()))
}

pub fn default_facts() -> Vec<WitnessFact> {
    parse_facts(DEFAULT_FACTS).expect("embedded facts parse")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solvability {
    Solvable,
    Unsolvable,
    Unknown,
}

/// Per (problem, model) solvability, with the fact each value came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvabilityMatrix {
    cells: BTreeMap<(ProblemKind, ModelId), (bool, String)>,
}

impl SolvabilityMatrix {
    pub fn get(&self, p: ProblemKind, m: ModelId) -> Solvability {
        match self.cells.get(&(p, m)) {
            Some((true, _)) => Solvability::Solvable,
            Some((false, _)) => Solvability::Unsolvable,
            None => Solvability::Unknown,
        }
    }

    /// Tag of the fact the value of a cell derives from.
    pub fn source(&self, p: ProblemKind, m: ModelId) -> Option<&str> {
        self.cells.get(&(p, m)).map(|(_, s)| s.as_str())
    }

    pub fn count(&self, p: ProblemKind, s: Solvability) -> usize {
        ModelId::all().into_iter().filter(|&m| self.get(p, m) == s).count()
    }

    pub fn unknown_cells(&self) -> usize {
        WITNESSES.iter().map(|&p| self.count(p, Solvability::Unknown)).sum()
    }

    fn set(&mut self, p: ProblemKind, m: ModelId, solvable: bool, lemma: &str) -> Result<(), RelmapError> {
        match self.cells.get(&(p, m)) {
            Some((v, _)) if *v == solvable => Ok(()),
            Some((_, other)) => {
                let (solvable_by, unsolvable_by) =
                    if solvable { (lemma.to_string(), other.clone()) } else { (other.clone(), lemma.to_string()) };
                Err(RelmapError::Contradiction { problem: p, model: m, solvable_by, unsolvable_by })
            }
            None => {
                self.cells.insert((p, m), (solvable, lemma.to_string()));
                Ok(())
            }
        }
    }
}

/// Closes the facts: solvable in M carries up to every stronger model,
/// unsolvable in M carries down to every weaker one. The structural order is
/// transitive, so one pass per fact reaches the fixpoint.
pub fn close(facts: &[WitnessFact]) -> Result<SolvabilityMatrix, RelmapError> {
    let mut mx = SolvabilityMatrix { cells: BTreeMap::new() };
    for f in facts {
        for m in ModelId::all() {
            let reached = if f.solvable { f.model.structural_leq(m) } else { m.structural_leq(f.model) };
            if reached {
                mx.set(f.problem, m, f.solvable, &f.lemma)?;
            }
        }
    }
    Ok(mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    /// The first model is strictly more powerful.
    Greater,
    Less,
    Orthogonal,
    Equivalent,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Greater => ">",
            Relation::Less => "<",
            Relation::Orthogonal => "⊥",
            Relation::Equivalent => "≡",
        }
    }

    pub fn mirrored(self) -> Relation {
        match self {
            Relation::Greater => Relation::Less,
            Relation::Less => Relation::Greater,
            r => r,
        }
    }

    pub fn from_symbol(s: char) -> Option<Relation> {
        Some(match s {
            '>' => Relation::Greater,
            '<' => Relation::Less,
            '⊥' => Relation::Orthogonal,
            '≡' => Relation::Equivalent,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCell {
    pub m1: ModelId,
    pub m2: ModelId,
    pub candidates: BTreeSet<Relation>,
    /// Tag shown for the m1-side separation (a problem solvable in m1 but
    /// not in m2); by default the first such problem in witness order.
    pub witness_m1: Option<ProblemKind>,
    pub witness_m2: Option<ProblemKind>,
    /// Every problem solvable in m1 but not in m2.
    pub all_m1: Vec<ProblemKind>,
    pub all_m2: Vec<ProblemKind>,
}

impl RelationCell {
    pub fn proven(&self) -> Option<Relation> {
        (self.candidates.len() == 1).then(|| *self.candidates.iter().next().expect("one candidate"))
    }

    /// Witness tags used by the remaining candidates.
    pub fn witnesses(&self) -> BTreeSet<ProblemKind> {
        self.witness_m1.iter().chain(self.witness_m2.iter()).copied().collect()
    }
}

fn separating(matrix: &SolvabilityMatrix, yes: ModelId, no: ModelId) -> Vec<ProblemKind> {
    WITNESSES
        .iter()
        .copied()
        .filter(|&p| matrix.get(p, yes) == Solvability::Solvable && matrix.get(p, no) == Solvability::Unsolvable)
        .collect()
}

pub fn relation_candidates(m1: ModelId, m2: ModelId, matrix: &SolvabilityMatrix) -> Result<RelationCell, RelmapError> {
    use Relation::*;
    let mut c: BTreeSet<Relation> = [Greater, Less, Orthogonal, Equivalent].into_iter().collect();
    if m2.structural_leq(m1) {
        c.remove(&Less);
        c.remove(&Orthogonal);
    }
    if m1.structural_leq(m2) {
        c.remove(&Greater);
        c.remove(&Orthogonal);
    }
    let all_m1 = separating(matrix, m1, m2);
    let all_m2 = separating(matrix, m2, m1);
    if !all_m1.is_empty() {
        c.remove(&Equivalent);
        c.remove(&Less);
    }
    if !all_m2.is_empty() {
        c.remove(&Equivalent);
        c.remove(&Greater);
    }
    if c.is_empty() {
        return Err(RelmapError::Inconsistent(m1, m2));
    }
    Ok(RelationCell { m1, m2, candidates: c, witness_m1: all_m1.first().copied(), witness_m2: all_m2.first().copied(), all_m1, all_m2 })
}

/// Row models of the triangular table, top to bottom.
pub const ROWS: [&str; 11] =
    ["OBLOT^A", "FSTA^A", "FCOM^A", "LUMI^A", "OBLOT^S", "FSTA^S", "FCOM^S", "LUMI^S", "OBLOT^F", "FSTA^F", "FCOM^F"];
/// Column models, left to right. Row k pairs with the first 11 − k columns.
pub const COLS: [&str; 11] =
    ["LUMI^F", "FCOM^F", "FSTA^F", "OBLOT^F", "LUMI^S", "FCOM^S", "FSTA^S", "OBLOT^S", "LUMI^A", "FCOM^A", "FSTA^A"];

fn parse_model(s: &str) -> ModelId {
    s.parse().expect("static model name")
}

/// The 66 (row, column) pairs of the table.
pub fn table_pairs() -> Vec<(ModelId, ModelId)> {
    let mut v = Vec::with_capacity(66);
    for (k, r) in ROWS.iter().enumerate() {
        for c in &COLS[..11 - k] {
            v.push((parse_model(r), parse_model(c)));
        }
    }
    v
}

/// Relations that hold in the transparent framework for the multi-candidate
/// cells; taken from that framework's literature, not derived here.
const TRANSPARENT: &[(&str, &str, Relation)] = &[
    ("FSTA^A", "FCOM^F", Relation::Less),
    ("FCOM^A", "FCOM^S", Relation::Less),
    ("FCOM^A", "OBLOT^S", Relation::Orthogonal),
    ("LUMI^A", "FCOM^F", Relation::Less),
    ("LUMI^A", "LUMI^S", Relation::Equivalent),
    ("LUMI^A", "FCOM^S", Relation::Greater),
    ("LUMI^A", "FSTA^S", Relation::Greater),
    ("LUMI^A", "OBLOT^S", Relation::Greater),
    ("FSTA^S", "FCOM^F", Relation::Less),
    ("LUMI^S", "FCOM^F", Relation::Less),
    ("FSTA^F", "FCOM^F", Relation::Less),
    ("FCOM^F", "LUMI^F", Relation::Equivalent),
];

/// Display preferences where the table names a witness other than the first
/// valid one: (row, column, tag shown for the row-side separation).
const PREFERRED_ROW_WITNESS: &[(&str, &str, ProblemKind)] = &[
    ("FCOM^A", "OBLOT^F", ProblemKind::Newcomer),
    ("FCOM^A", "OBLOT^S", ProblemKind::Newcomer),
    ("FCOM^S", "OBLOT^F", ProblemKind::Newcomer),
];

/// Applies a display preference if the preferred problem really separates
/// the pair in that direction.
fn apply_preference(cell: &mut RelationCell) {
    for &(r, c, p) in PREFERRED_ROW_WITNESS {
        if parse_model(r) == cell.m1 && parse_model(c) == cell.m2 && cell.all_m1.contains(&p) {
            cell.witness_m1 = Some(p);
        }
    }
}

pub fn transparent_annotation(m1: ModelId, m2: ModelId) -> Option<Relation> {
    TRANSPARENT.iter().find(|(a, b, _)| parse_model(a) == m1 && parse_model(b) == m2).map(|&(_, _, r)| r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub cell: RelationCell,
    pub transparent: Option<Relation>,
}

impl TableCell {
    /// Compact rendering: symbols, witness tags, transparent relation.
    pub fn text(&self) -> String {
        let mut s: String = self.cell.candidates.iter().map(|r| r.symbol()).collect::<Vec<_>>().join("|");
        let tags: Vec<&str> = self.cell.witnesses().iter().map(|p| p.tag()).collect();
        if !tags.is_empty() {
            let _ = write!(s, " {}", tags.join(","));
        }
        if self.cell.candidates.len() > 1 {
            if let Some(t) = self.transparent {
                let _ = write!(s, " [{}]", t.symbol());
            }
        }
        s
    }
}

pub fn derive_table(facts: &[WitnessFact]) -> Result<Vec<TableCell>, RelmapError> {
    let mx = close(facts)?;
    table_pairs()
        .into_iter()
        .map(|(r, c)| {
            let mut cell = relation_candidates(r, c, &mx)?;
            apply_preference(&mut cell);
            Ok(TableCell { cell, transparent: transparent_annotation(r, c) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

pub fn emit_table(cells: &[TableCell], format: Format) -> String {
    match format {
        Format::Text => emit_text(cells),
        Format::Csv => emit_csv(cells),
    }
}

fn emit_text(cells: &[TableCell]) -> String {
    let texts: Vec<String> = cells.iter().map(TableCell::text).collect();
    let width = texts.iter().map(|t| t.chars().count()).max().unwrap_or(0).max(7);
    let pad = |s: &str| format!("{s}{}", " ".repeat(width - s.chars().count()));
    let mut out = String::new();
    let _ = write!(out, "{}", pad(""));
    for c in COLS {
        let _ = write!(out, "  {}", pad(c));
    }
    out.push('\n');
    let mut k = 0;
    for (i, r) in ROWS.iter().enumerate() {
        let _ = write!(out, "{}", pad(r));
        for _ in 0..11 - i {
            let _ = write!(out, "  {}", pad(&texts[k]));
            k += 1;
        }
        out = out.trim_end().to_string();
        out.push('\n');
    }
    out
}

fn emit_csv(cells: &[TableCell]) -> String {
    let mut out = String::from("row,col,candidates,witnesses,transparent\n");
    for tc in cells {
        let cand: String = tc.cell.candidates.iter().map(|r| r.symbol()).collect::<Vec<_>>().join(" ");
        let tags: Vec<&str> = tc.cell.witnesses().iter().map(|p| p.tag()).collect();
        let tr = tc.transparent.map(|r| r.symbol()).unwrap_or("");
        let _ = writeln!(out, "{},{},{},{},{}", tc.cell.m1, tc.cell.m2, cand, tags.join(" "), tr);
    }
    out
}

/// Expected table, row by row, each cell as "symbols [tags]" with symbols
/// drawn from < > ⊥ ≡ and tags comma-separated.
const EXPECTED: [&str; 11] = [
    "< trt; < trt; < trt; < spi; < trt; < trt; < trt; < pse; < trt; < trt; < trt",
    "< nwc; <⊥ nwc; < spi; ⊥ trt,spi; < nwc; ⊥ nwc,fff; < pse; ⊥ pse,trt; < nwc; ⊥ nwc,fff",
    "< fff; < fff; ⊥ fff,nwc; ⊥ nwc,spi; < fff; <≡; ⊥ fff,nwc; >⊥ nwc; < fff",
    "< ash; <⊥ ash; ⊥ ash,nwc; ⊥ ash,trt; <≡; >⊥ fff; >⊥ nwc; >⊥ trt",
    "< trt; < trt; < trt; < spi; < trt; < trt; < trt",
    "< nwc; <⊥ nwc; < spi; ⊥ trt,spi; < nwc; ⊥ nwc,fff",
    "< fff; < fff; ⊥ fff,nwc; ⊥ spi,nwc; < fff",
    "< ash; <⊥ ash; ⊥ ash,nwc; ⊥ ash,trt",
    "< trt; < trt; < trt",
    "< nwc; <⊥ nwc",
    "<≡",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedCell {
    pub candidates: BTreeSet<Relation>,
    pub tags: BTreeSet<ProblemKind>,
}

pub fn expected_table() -> Vec<((ModelId, ModelId), ExpectedCell)> {
    let pairs = table_pairs();
    let cells: Vec<ExpectedCell> = EXPECTED
        .iter()
        .flat_map(|row| row.split(';'))
        .map(|cell| {
            let cell = cell.trim();
            let (sym, tags) = cell.split_once(' ').unwrap_or((cell, ""));
            ExpectedCell {
                candidates: sym.chars().map(|c| Relation::from_symbol(c).expect("static symbol")).collect(),
                tags: tags.split(',').filter(|t| !t.is_empty()).map(|t| t.parse().expect("static tag")).collect(),
            }
        })
        .collect();
    assert_eq!(cells.len(), pairs.len());
    pairs.into_iter().zip(cells).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub m1: ModelId,
    pub m2: ModelId,
    pub expected: String,
    pub derived: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vs {}: expected '{}', derived '{}'", self.m1, self.m2, self.expected, self.derived)
    }
}

/// Compares derived cells with the expected table: candidate sets and shown
/// witness tag sets must match exactly, and every shown tag must separate
/// the pair in its direction.
pub fn check_table(cells: &[TableCell]) -> Vec<Mismatch> {
    let render = |c: &BTreeSet<Relation>, t: &BTreeSet<ProblemKind>| {
        let mut s: String = c.iter().map(|r| r.symbol()).collect();
        let tags: Vec<&str> = t.iter().map(|p| p.tag()).collect();
        if !tags.is_empty() {
            s = format!("{s} {}", tags.join(","));
        }
        s
    };
    expected_table()
        .into_iter()
        .zip(cells)
        .filter_map(|(((m1, m2), exp), got)| {
            let tags = got.cell.witnesses();
            let valid = got.cell.witness_m1.is_none_or(|p| got.cell.all_m1.contains(&p))
                && got.cell.witness_m2.is_none_or(|p| got.cell.all_m2.contains(&p));
            if valid && got.cell.m1 == m1 && got.cell.m2 == m2 && exp.candidates == got.cell.candidates && exp.tags == tags {
                None
            } else {
                Some(Mismatch {
                    m1,
                    m2,
                    expected: render(&exp.candidates, &exp.tags),
                    derived: render(&got.cell.candidates, &tags),
                })
            }
        })
        .collect()
}
