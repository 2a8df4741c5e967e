//! Bound ledger and upper-bound propagation.
//!
//! The ledger maps `(space signature, d)` to the best known lower and upper
//! bound on the packing number. Upper bounds spread to neighbouring
//! parameters through a data-driven rule table:
//!
//! * `lengthen q`: adding a `q`-ary coordinate at most multiplies the bound by `q`.
//! * `trade p q`: replacing a `p`-ary coordinate by a `q`-ary one multiplies
//!   the bound by at most `q/p` (rounded down).
//! * `delete q`: adding a `q`-ary coordinate while raising `d` by one cannot
//!   increase the bound, since deleting that coordinate loses at most one
//!   unit of distance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::MixedSpace;

/// Alphabet sizes with their block lengths, increasing alphabet, no empty blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature(Vec<(u32, usize)>);

impl Signature {
    pub fn new(blocks: impl IntoIterator<Item = (u32, usize)>) -> Result<Self> {
        let mut map: BTreeMap<u32, usize> = BTreeMap::new();
        for (k, a) in blocks {
            if k < 2 {
                return Err(Error::InvalidSpace(format!("alphabet size {k} is below 2")));
            }
            if map.insert(k, a).is_some() {
                return Err(Error::InvalidSpace(format!("alphabet size {k} appears twice")));
            }
        }
        Ok(Signature(map.into_iter().filter(|&(_, a)| a > 0).collect()))
    }

    /// Binary-ternary signature with `b` binary and `t` ternary coordinates.
    pub fn binary_ternary(b: usize, t: usize) -> Self {
        Signature::new([(2, b), (3, t)]).expect("valid alphabets")
    }

    pub fn of(space: &MixedSpace) -> Self {
        Signature(space.blocks().iter().map(|b| (b.alphabet, b.length)).collect())
    }

    pub fn blocks(&self) -> &[(u32, usize)] {
        &self.0
    }

    pub fn length_of(&self, alphabet: u32) -> usize {
        self.0.iter().find(|(k, _)| *k == alphabet).map_or(0, |&(_, a)| a)
    }

    fn adjusted(&self, alphabet: u32, delta: isize) -> Option<Self> {
        let cur = self.length_of(alphabet) as isize + delta;
        if cur < 0 {
            return None;
        }
        let mut map: BTreeMap<u32, usize> = self.0.iter().copied().collect();
        map.insert(alphabet, cur as usize);
        Signature::new(map).ok()
    }

    /// The space with this signature, if it is nonempty.
    pub fn space(&self) -> Result<MixedSpace> {
        MixedSpace::new(&self.0)
    }
}

/// `k` list and `alpha` list, e.g. `2,3` and `7,1`.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.0.iter().map(|(k, _)| k.to_string()).collect();
        let alphas: Vec<String> = self.0.iter().map(|(_, a)| a.to_string()).collect();
        write!(f, "{} {}", ks.join(","), alphas.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LedgerKey {
    pub signature: Signature,
    pub d: usize,
}

impl LedgerKey {
    pub fn bt(b: usize, t: usize, d: usize) -> Self {
        LedgerKey {
            signature: Signature::binary_ternary(b, t),
            d,
        }
    }
}

impl fmt::Display for LedgerKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.signature, self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// Computed by the exact solver.
    Solved,
    /// Supplied from outside (a published value).
    Anchor,
    /// No information beyond the trivial bounds.
    Trivial,
    /// Derived by a rule from another entry's upper bound.
    Rule { rule: String, parent: LedgerKey },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Solved => f.write_str("solved"),
            Provenance::Anchor => f.write_str("anchor"),
            Provenance::Trivial => f.write_str("trivial"),
            Provenance::Rule { rule, parent } => {
                let ks: Vec<String> = parent.signature.0.iter().map(|(k, _)| k.to_string()).collect();
                let alphas: Vec<String> =
                    parent.signature.0.iter().map(|(_, a)| a.to_string()).collect();
                write!(f, "{rule}:{}/{}/{}", ks.join(","), alphas.join(","), parent.d)
            }
        }
    }
}

fn parse_signature(ks: &str, alphas: &str) -> Result<Signature> {
    let ks: Vec<&str> = ks.split(',').collect();
    let alphas: Vec<&str> = alphas.split(',').collect();
    if ks.len() != alphas.len() {
        return Err(Error::InvalidArgument(format!(
            "{} alphabet sizes but {} lengths",
            ks.len(),
            alphas.len()
        )));
    }
    let pairs = ks
        .iter()
        .zip(&alphas)
        .map(|(k, a)| {
            let k: u32 = k.parse().map_err(|_| Error::InvalidArgument(format!("bad alphabet size `{k}`")))?;
            let a: usize = a.parse().map_err(|_| Error::InvalidArgument(format!("bad length `{a}`")))?;
            Ok((k, a))
        })
        .collect::<Result<Vec<_>>>()?;
    Signature::new(pairs)
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solved" => Ok(Provenance::Solved),
            "anchor" => Ok(Provenance::Anchor),
            "trivial" => Ok(Provenance::Trivial),
            _ => {
                let bad = || Error::InvalidArgument(format!("unknown provenance `{s}`"));
                let (rule, parent) = s.split_once(':').ok_or_else(bad)?;
                let parts: Vec<&str> = parent.split('/').collect();
                if parts.len() != 3 {
                    return Err(bad());
                }
                let d = parts[2].parse().map_err(|_| bad())?;
                Ok(Provenance::Rule {
                    rule: rule.to_string(),
                    parent: LedgerKey {
                        signature: parse_signature(parts[0], parts[1])?,
                        d,
                    },
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundEntry {
    pub lower: usize,
    pub upper: usize,
    /// Where the upper bound came from.
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundLedger {
    entries: BTreeMap<LedgerKey, BoundEntry>,
}

impl BoundLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &LedgerKey) -> Option<&BoundEntry> {
        self.entries.get(key)
    }

    pub fn upper(&self, key: &LedgerKey) -> Option<usize> {
        self.get(key).map(|e| e.upper)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LedgerKey, &BoundEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges bounds into an entry, keeping the tighter side of each.
    pub fn record(&mut self, key: LedgerKey, lower: usize, upper: usize, provenance: Provenance) -> Result<()> {
        if lower > upper {
            return Err(Error::Ledger {
                line: 0,
                message: format!("{key}: lower bound {lower} exceeds upper bound {upper}"),
            });
        }
        match self.entries.get_mut(&key) {
            Some(e) => {
                let lower = e.lower.max(lower);
                if upper < e.upper {
                    e.upper = upper;
                    e.provenance = provenance;
                }
                if lower > e.upper {
                    return Err(Error::Ledger {
                        line: 0,
                        message: format!("{key}: lower bound {lower} exceeds upper bound {}", e.upper),
                    });
                }
                e.lower = lower;
            }
            None => {
                self.entries.insert(key, BoundEntry { lower, upper, provenance });
            }
        }
        Ok(())
    }

    /// Reads `k-spec alpha-spec d lower upper provenance` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ledger = BoundLedger::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Ledger { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            }
            let signature = parse_signature(fields[0], fields[1]).map_err(|e| err(e.to_string()))?;
            let num = |s: &str, what: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(format!("{what} `{s}` is not a nonnegative integer")))
            };
            let d = num(fields[2], "distance")?;
            let lower = num(fields[3], "lower bound")?;
            let upper = num(fields[4], "upper bound")?;
            let provenance: Provenance = fields[5].parse().map_err(|e: Error| err(e.to_string()))?;
            ledger
                .record(LedgerKey { signature, d }, lower, upper, provenance)
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(ledger)
    }

    /// Inverse of [`parse`](Self::parse), one entry per line in key order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, e) in &self.entries {
            out.push_str(&format!("{key} {} {} {}\n", e.lower, e.upper, e.provenance));
        }
        out
    }

    /// Follows provenance links from `key` back to a non-rule entry.
    pub fn chain(&self, key: &LedgerKey) -> Vec<LedgerKey> {
        let mut out = vec![key.clone()];
        let mut seen = BTreeSet::from([key.clone()]);
        let mut cur = key.clone();
        while let Some(BoundEntry {
            provenance: Provenance::Rule { parent, .. },
            ..
        }) = self.entries.get(&cur)
        {
            if !seen.insert(parent.clone()) {
                break;
            }
            out.push(parent.clone());
            cur = parent.clone();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum RuleForm {
    Lengthen { alphabet: u32 },
    Trade { from: u32, to: u32 },
    Delete { alphabet: u32 },
}

impl RuleForm {
    /// Target key and derived upper bound, if the rule applies.
    fn apply(&self, key: &LedgerKey, upper: usize) -> Option<(LedgerKey, usize)> {
        match *self {
            RuleForm::Lengthen { alphabet } => Some((
                LedgerKey {
                    signature: key.signature.adjusted(alphabet, 1)?,
                    d: key.d,
                },
                upper.checked_mul(alphabet as usize)?,
            )),
            RuleForm::Trade { from, to } => {
                let signature = key.signature.adjusted(from, -1)?.adjusted(to, 1)?;
                Some((
                    LedgerKey { signature, d: key.d },
                    upper.checked_mul(to as usize)? / from as usize,
                ))
            }
            RuleForm::Delete { alphabet } => Some((
                LedgerKey {
                    signature: key.signature.adjusted(alphabet, 1)?,
                    d: key.d + 1,
                },
                upper,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub name: String,
    pub form: RuleForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleTable {
    rules: Vec<Rule>,
}

/// Rules reproducing the published binary-ternary tables.
pub const DEFAULT_RULES: &str = "\
# name  form      args
ii      lengthen  2
ii      lengthen  3
iv      trade     2 3
vi      delete    3
";

impl Default for RuleTable {
    fn default() -> Self {
        RuleTable::parse(DEFAULT_RULES).expect("built-in rule table parses")
    }
}

impl RuleTable {
    /// One rule per line: `name lengthen q`, `name trade p q` or `name delete q`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| Error::Ledger {
                line: i + 1,
                message: format!("rule table: {message}"),
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<u32> {
                s.parse::<u32>()
                    .ok()
                    .filter(|&q| q >= 2)
                    .ok_or_else(|| err("alphabet sizes must be integers of at least 2"))
            };
            let form = match (f.get(1).copied(), f.len()) {
                (Some("lengthen"), 3) => RuleForm::Lengthen { alphabet: num(f[2])? },
                (Some("delete"), 3) => RuleForm::Delete { alphabet: num(f[2])? },
                (Some("trade"), 4) => {
                    let (from, to) = (num(f[2])?, num(f[3])?);
                    if from == to {
                        return Err(err("trade needs two different alphabets"));
                    }
                    RuleForm::Trade { from, to }
                }
                _ => return Err(err("expected `name lengthen q`, `name trade p q` or `name delete q`")),
            };
            rules.push(Rule {
                name: f[0].to_string(),
                form,
            });
        }
        Ok(RuleTable { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Keeps only the rules with the given names.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        for n in names {
            if !self.rules.iter().any(|r| r.name == *n) {
                return Err(Error::InvalidArgument(format!("unknown rule `{n}`")));
            }
        }
        Ok(RuleTable {
            rules: self
                .rules
                .iter()
                .filter(|r| names.contains(&r.name.as_str()))
                .cloned()
                .collect(),
        })
    }
}

/// Cells that propagation may create or tighten.
#[derive(Debug, Clone, Default)]
pub struct Grid {
    cells: BTreeSet<LedgerKey>,
}

impl Grid {
    pub fn binary_ternary(
        b: std::ops::RangeInclusive<usize>,
        t: std::ops::RangeInclusive<usize>,
        d: std::ops::RangeInclusive<usize>,
    ) -> Self {
        let mut cells = BTreeSet::new();
        for bi in b {
            for ti in t.clone() {
                for di in d.clone() {
                    cells.insert(LedgerKey::bt(bi, ti, di));
                }
            }
        }
        Grid { cells }
    }

    pub fn contains(&self, key: &LedgerKey) -> bool {
        self.cells.contains(key)
    }
}

/// Applies the rules until no upper bound in the grid can be lowered.
///
/// New entries start with lower bound 1; existing lower bounds are kept.
pub fn propagate_bounds(ledger: &BoundLedger, rules: &RuleTable, grid: &Grid) -> Result<BoundLedger> {
    let mut out = ledger.clone();
    loop {
        let mut changed = false;
        let snapshot: Vec<(LedgerKey, usize)> =
            out.entries.iter().map(|(k, e)| (k.clone(), e.upper)).collect();
        for (key, upper) in snapshot {
            for rule in &rules.rules {
                let Some((target, value)) = rule.form.apply(&key, upper) else {
                    continue;
                };
                if !grid.contains(&target) {
                    continue;
                }
                let improves = out.entries.get(&target).map_or(true, |e| value < e.upper);
                if improves {
                    let lower = out.entries.get(&target).map_or(1, |e| e.lower).min(value);
                    if out.entries.get(&target).is_some_and(|e| e.lower > value) {
                        return Err(Error::Ledger {
                            line: 0,
                            message: format!(
                                "rule {} gives {target} upper bound {value} below its lower bound",
                                rule.name
                            ),
                        });
                    }
                    out.entries.insert(
                        target,
                        BoundEntry {
                            lower,
                            upper: value,
                            provenance: Provenance::Rule {
                                rule: rule.name.clone(),
                                parent: key.clone(),
                            },
                        },
                    );
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

/// The two published exact values used as anchors for the corollary tables.
pub fn default_anchors() -> BoundLedger {
    BoundLedger::parse(DEFAULT_ANCHORS).expect("built-in anchors parse")
}

pub const DEFAULT_ANCHORS: &str = "\
# k-spec alpha-spec d lower upper provenance
2,3 7,1 3 26 26 anchor
2,3 4,3 3 28 28 anchor
";

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::binary_ternary(1..=10, 1..=5, 3..=4)
    }

    fn table() -> BoundLedger {
        propagate_bounds(&default_anchors(), &RuleTable::default(), &grid()).unwrap()
    }

    #[test]
    fn lengthening_from_26() {
        let t = table();
        assert_eq!(t.upper(&LedgerKey::bt(8, 1, 3)), Some(52));
        assert_eq!(t.upper(&LedgerKey::bt(9, 1, 3)), Some(104));
        assert_eq!(t.upper(&LedgerKey::bt(10, 1, 3)), Some(208));
    }

    #[test]
    fn trade_from_26() {
        assert_eq!(table().upper(&LedgerKey::bt(6, 2, 3)), Some(39));
    }

    #[test]
    fn deletion_into_d4() {
        let t = table();
        assert_eq!(t.upper(&LedgerKey::bt(7, 2, 4)), Some(26));
        assert_eq!(t.upper(&LedgerKey::bt(4, 4, 4)), Some(28));
    }

    #[test]
    fn idempotent_and_acyclic() {
        let t = table();
        let again = propagate_bounds(&t, &RuleTable::default(), &grid()).unwrap();
        assert_eq!(t, again);
        for (key, entry) in t.iter() {
            assert!(entry.lower <= entry.upper);
            let chain = t.chain(key);
            let root = chain.last().unwrap();
            assert!(matches!(t.get(root).unwrap().provenance, Provenance::Anchor));
        }
    }

    #[test]
    fn ledger_text_round_trip() {
        let t = table();
        assert_eq!(BoundLedger::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn ledger_errors() {
        assert!(matches!(BoundLedger::parse("2,3 7,1 3 26\n"), Err(Error::Ledger { line: 1, .. })));
        assert!(BoundLedger::parse("2,3 7,1 3 27 26 anchor\n").is_err());
        assert!(BoundLedger::parse("2,3 7 3 26 26 anchor\n").is_err());
        assert!(BoundLedger::parse("2,3 7,1 3 26 26 guess\n").is_err());
    }

    #[test]
    fn rule_selection() {
        let rules = RuleTable::default().select(&["ii"]).unwrap();
        assert_eq!(rules.rules().len(), 2);
        assert!(RuleTable::default().select(&["ix"]).is_err());
        let only_ii = propagate_bounds(&default_anchors(), &rules, &grid()).unwrap();
        assert_eq!(only_ii.upper(&LedgerKey::bt(6, 2, 3)), None);
        assert!(RuleTable::parse("x trade 2 2\n").is_err());
        assert!(RuleTable::parse("x widen 2\n").is_err());
    }
}
