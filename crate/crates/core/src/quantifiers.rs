//! Monotone generalized quantifiers of type ⟨k⟩, given per universe size by a
//! membership oracle over subsets of `M^k`.
//!
//! A subset of `M^k` is a `u64` bitmask: bit `i` stands for the `i`-th tuple
//! in lexicographic order, so only `n^k ≤ 64` is representable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU8, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest `n^k` for which subsets of `M^k` fit a mask.
pub const MAX_CELLS: usize = 64;
/// Default bound on `n^k` when enumerating all subsets of `M^k`.
pub const DEFAULT_MEMBER_CELLS: usize = 20;
const CACHE_SIZES: usize = 17;

/// Number of tuples in `M^k` for `|M| = n`.
pub fn cells(n: usize, k: usize) -> Result<usize> {
    let c = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if c > MAX_CELLS as u128 {
        return Err(Error::cap(format!("|M|^{k} for |M|={n}"), c, MAX_CELLS as u128));
    }
    Ok(c as usize)
}

pub fn full_mask(cells: usize) -> u64 {
    if cells == 64 {
        u64::MAX
    } else {
        (1u64 << cells) - 1
    }
}

/// Position of a tuple in lexicographic order.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`tuple_index`].
pub fn tuple_at(n: usize, k: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

/// All masks over `cells` bits with exactly `m` bits set, ascending.
fn masks_of_weight(cells: usize, m: usize) -> Vec<u64> {
    if m > cells {
        return Vec::new();
    }
    if m == 0 {
        return vec![0];
    }
    let limit = full_mask(cells);
    let mut out = Vec::new();
    let mut v: u64 = full_mask(m);
    loop {
        out.push(v);
        // next mask with the same popcount
        let t = v | (v - 1);
        let Some(next) = t.checked_add(1) else { break };
        let w = next | (((!t & next) - 1) >> (v.trailing_zeros() + 1));
        if w > limit || w < v {
            break;
        }
        v = w;
    }
    out
}

/// Which sizes a Q_S quantifier singles out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeSet {
    pub sizes: BTreeSet<usize>,
    /// When set the represented set is the complement of `sizes`.
    pub complement: bool,
}

impl SizeSet {
    pub fn contains(&self, n: usize) -> bool {
        self.sizes.contains(&n) != self.complement
    }
}

#[derive(Debug, Clone)]
pub enum QuantifierKind {
    /// `A ≠ ∅`.
    Exists,
    /// `A = M^k`.
    Forall,
    /// `|A| ≥ m`.
    AtLeast(usize),
    /// `|A| > |M^k| / 2`.
    Most,
    /// `∅ ≠ A ⊆ M` on finite universes.
    Q1,
    /// `A = M` when `|M| ∈ S`, otherwise `A ≠ ∅`.
    Qs(SizeSet),
    /// Accepts nothing.
    Never,
    /// Explicit accepted subsets per universe size.
    Extensional(BTreeMap<usize, BTreeSet<u64>>),
    /// Accepts `A` iff the inner quantifier rejects the complement of `A`.
    Dual(Arc<Quantifier>),
}

pub struct Quantifier {
    name: String,
    arity: usize,
    kind: QuantifierKind,
    // 0 = unknown, 1 = monotone, 2 = not monotone
    monotone: [AtomicU8; CACHE_SIZES],
}

impl fmt::Debug for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Quantifier")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Quantifier {
    pub fn new(name: impl Into<String>, arity: usize, kind: QuantifierKind) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Precondition("quantifier arity must be at least 1".into()));
        }
        Ok(Quantifier {
            name: name.into(),
            arity,
            kind,
            monotone: Default::default(),
        })
    }

    pub fn exists() -> Self {
        Self::new("exists", 1, QuantifierKind::Exists).expect("arity 1")
    }

    pub fn forall() -> Self {
        Self::new("forall", 1, QuantifierKind::Forall).expect("arity 1")
    }

    pub fn forall_k(k: usize) -> Result<Self> {
        let name = if k == 1 { "forall".to_string() } else { format!("forall{k}") };
        Self::new(name, k, QuantifierKind::Forall)
    }

    pub fn at_least(m: usize) -> Self {
        Self::new(format!("atleast{m}"), 1, QuantifierKind::AtLeast(m)).expect("arity 1")
    }

    pub fn most() -> Self {
        Self::new("most", 1, QuantifierKind::Most).expect("arity 1")
    }

    pub fn q1() -> Self {
        Self::new("q1", 1, QuantifierKind::Q1).expect("arity 1")
    }

    pub fn never() -> Self {
        Self::new("never", 1, QuantifierKind::Never).expect("arity 1")
    }

    /// Q_S; the canonical name is `qs_2_3`, or `qsnot_2_3` for a complemented set.
    pub fn qs(sizes: impl IntoIterator<Item = usize>, complement: bool) -> Self {
        let sizes: BTreeSet<usize> = sizes.into_iter().collect();
        let mut name = String::from(if complement { "qsnot" } else { "qs" });
        for s in &sizes {
            name.push_str(&format!("_{s}"));
        }
        Self::new(name, 1, QuantifierKind::Qs(SizeSet { sizes, complement })).expect("arity 1")
    }

    pub fn extensional(name: impl Into<String>, arity: usize, table: BTreeMap<usize, BTreeSet<u64>>) -> Result<Self> {
        Self::new(name, arity, QuantifierKind::Extensional(table))
    }

    /// The dual `Q^d`, named `<name>^d`.
    pub fn dual(q: &Arc<Quantifier>) -> Self {
        Quantifier {
            name: format!("{}^d", q.name),
            arity: q.arity,
            kind: QuantifierKind::Dual(Arc::clone(q)),
            monotone: Default::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &QuantifierKind {
        &self.kind
    }

    /// Whether `(M, A) ∈ Q` for `|M| = n`.
    pub fn accepts(&self, n: usize, a: u64) -> Result<bool> {
        let c = cells(n, self.arity)?;
        let full = full_mask(c);
        let a = a & full;
        let size = a.count_ones() as usize;
        Ok(match &self.kind {
            QuantifierKind::Exists | QuantifierKind::Q1 => a != 0,
            QuantifierKind::Forall => a == full,
            QuantifierKind::AtLeast(m) => size >= *m,
            QuantifierKind::Most => 2 * size > c,
            QuantifierKind::Qs(s) => {
                if s.contains(n) {
                    a == full
                } else {
                    a != 0
                }
            }
            QuantifierKind::Never => false,
            QuantifierKind::Extensional(table) => table
                .get(&n)
                .ok_or_else(|| Error::UndefinedSize {
                    name: self.name.clone(),
                    size: n,
                })?
                .contains(&a),
            QuantifierKind::Dual(inner) => !inner.accepts(n, full & !a)?,
        })
    }

    /// `Q_M` as masks, ascending. Enumerates all subsets of `M^k` unless a
    /// closed form exists, so `n^k` is bounded by `max_cells`.
    pub fn members_capped(&self, n: usize, max_cells: usize) -> Result<Vec<u64>> {
        let c = cells(n, self.arity)?;
        let full = full_mask(c);
        let by_weight = |from: usize| -> Vec<u64> {
            let mut out: Vec<u64> = (from..=c).flat_map(|m| masks_of_weight(c, m)).collect();
            out.sort_unstable();
            out
        };
        let mut out = match &self.kind {
            QuantifierKind::Exists | QuantifierKind::Q1 => by_weight(1),
            QuantifierKind::Forall => vec![full],
            QuantifierKind::AtLeast(m) => by_weight(*m),
            QuantifierKind::Most => by_weight(c / 2 + 1),
            QuantifierKind::Qs(s) if s.contains(n) => vec![full],
            QuantifierKind::Qs(_) => by_weight(1),
            QuantifierKind::Never => vec![],
            QuantifierKind::Extensional(_) | QuantifierKind::Dual(_) => {
                if c > max_cells {
                    return Err(Error::cap(
                        format!("subsets of M^{} enumerated for `{}`", self.arity, self.name),
                        1u128 << c,
                        1u128 << max_cells,
                    ));
                }
                let mut out = Vec::new();
                for a in 0..=full {
                    if self.accepts(n, a)? {
                        out.push(a);
                    }
                }
                out
            }
        };
        out.sort_unstable();
        Ok(out)
    }

    pub fn members(&self, n: usize) -> Result<Vec<u64>> {
        self.members_capped(n, DEFAULT_MEMBER_CELLS)
    }

    /// The ⊆-minimal members of `Q_M`. Requires monotonicity at this size.
    pub fn minimal_members(&self, n: usize) -> Result<Vec<u64>> {
        if !self.is_monotone_on(n)? {
            return Err(Error::NotMonotone {
                name: self.name.clone(),
                size: n,
            });
        }
        let c = cells(n, self.arity)?;
        let full = full_mask(c);
        Ok(match &self.kind {
            QuantifierKind::Exists | QuantifierKind::Q1 => masks_of_weight(c, 1),
            QuantifierKind::Forall => vec![full],
            QuantifierKind::AtLeast(m) => masks_of_weight(c, *m),
            QuantifierKind::Most => masks_of_weight(c, c / 2 + 1),
            QuantifierKind::Qs(s) if s.contains(n) => vec![full],
            QuantifierKind::Qs(_) => masks_of_weight(c, 1),
            QuantifierKind::Never => vec![],
            QuantifierKind::Extensional(_) | QuantifierKind::Dual(_) => {
                let members = self.members(n)?;
                let set: BTreeSet<u64> = members.iter().copied().collect();
                members
                    .into_iter()
                    .filter(|&a| (0..c).all(|i| a & (1 << i) == 0 || !set.contains(&(a & !(1 << i)))))
                    .collect()
            }
        })
    }

    /// Whether `Q_M` is closed under supersets. Cached per size.
    pub fn is_monotone_on(&self, n: usize) -> Result<bool> {
        if let Some(slot) = self.monotone.get(n) {
            match slot.load(Ordering::Relaxed) {
                1 => return Ok(true),
                2 => return Ok(false),
                _ => {}
            }
        }
        let verdict = match &self.kind {
            QuantifierKind::Extensional(_) | QuantifierKind::Dual(_) => {
                let c = cells(n, self.arity)?;
                let members = self.members(n)?;
                let set: BTreeSet<u64> = members.iter().copied().collect();
                // single-element extensions suffice for upward closure
                members
                    .iter()
                    .all(|&a| (0..c).all(|i| a & (1 << i) != 0 || set.contains(&(a | (1 << i)))))
            }
            _ => true,
        };
        if let Some(slot) = self.monotone.get(n) {
            slot.store(if verdict { 1 } else { 2 }, Ordering::Relaxed);
        }
        Ok(verdict)
    }

    /// `(∅ ∉ Q_M, M^k ∈ Q_M)`.
    pub fn check_nontriviality(&self, n: usize) -> Result<(bool, bool)> {
        let c = cells(n, self.arity)?;
        Ok((!self.accepts(n, 0)?, self.accepts(n, full_mask(c))?))
    }
}

/// Named quantifiers plus the builtin name patterns.
///
/// Builtin names: `exists`, `forall`, `forall<k>`, `atleast<m>`, `most`,
/// `q1`, `never`, `qs_<s>_…` and `qsnot_<s>_…`. Any resolvable name may be
/// suffixed with `^d` for its dual.
#[derive(Debug, Clone, Default)]
pub struct QuantifierRegistry {
    named: BTreeMap<String, Arc<Quantifier>>,
}

impl QuantifierRegistry {
    pub fn with_builtins() -> Self {
        let mut reg = QuantifierRegistry::default();
        for q in [
            Quantifier::exists(),
            Quantifier::forall(),
            Quantifier::most(),
            Quantifier::q1(),
            Quantifier::never(),
        ] {
            reg.register(q);
        }
        reg
    }

    pub fn register(&mut self, q: Quantifier) -> Arc<Quantifier> {
        let q = Arc::new(q);
        self.named.insert(q.name.clone(), Arc::clone(&q));
        q
    }

    /// Registered names, sorted.
    pub fn names(&self) -> Vec<String> {
        self.named.keys().cloned().collect()
    }

    pub fn resolve(&self, name: &str) -> Result<Arc<Quantifier>> {
        if let Some(q) = self.named.get(name) {
            return Ok(Arc::clone(q));
        }
        if let Some(inner) = name.strip_suffix("^d") {
            return Ok(Arc::new(Quantifier::dual(&self.resolve(inner)?)));
        }
        let unknown = || Error::UnknownQuantifier(name.to_string());
        let number = |s: &str| -> Result<usize> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(unknown());
            }
            s.parse().map_err(|_| unknown())
        };
        if let Some(k) = name.strip_prefix("forall") {
            let k = number(k)?;
            return Quantifier::forall_k(k).map(Arc::new).map_err(|_| unknown());
        }
        if let Some(m) = name.strip_prefix("atleast") {
            return Ok(Arc::new(Quantifier::at_least(number(m)?)));
        }
        for (prefix, complement) in [("qsnot", true), ("qs", false)] {
            if let Some(rest) = name.strip_prefix(prefix) {
                if rest.is_empty() {
                    return Ok(Arc::new(Quantifier::qs([], complement)));
                }
                let Some(rest) = rest.strip_prefix('_') else { continue };
                let sizes = rest.split('_').map(number).collect::<Result<Vec<_>>>()?;
                return Ok(Arc::new(Quantifier::qs(sizes, complement)));
            }
        }
        Err(unknown())
    }

    /// Loads an extensional quantifier and registers it.
    pub fn load_extensional(&mut self, text: &str) -> Result<Arc<Quantifier>> {
        Ok(self.register(parse_extensional(text)?))
    }
}

/// Parses the extensional quantifier format:
///
/// ```text
/// quant name/k
/// on 2 = {{0},{1},{0,1}}
/// on 3 = {{(0,0),(0,1)}, {}}
/// ```
pub fn parse_extensional(text: &str) -> Result<Quantifier> {
    let mut header: Option<(String, usize)> = None;
    let mut table: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("quant ") {
            let (name, k) = rest
                .trim()
                .split_once('/')
                .ok_or_else(|| Error::format(line_no, "expected `quant name/k`"))?;
            let k: usize = k.trim().parse().map_err(|_| Error::format(line_no, "bad arity"))?;
            if k == 0 {
                return Err(Error::format(line_no, "arity must be at least 1"));
            }
            header = Some((name.trim().to_string(), k));
            continue;
        }
        let Some(rest) = line.strip_prefix("on ") else {
            return Err(Error::format(line_no, format!("unexpected line `{line}`")));
        };
        let (_, k) = header
            .as_ref()
            .ok_or_else(|| Error::format(line_no, "`on` before `quant` header"))?;
        let (n, sets) = rest
            .split_once('=')
            .ok_or_else(|| Error::format(line_no, "expected `on n = {...}`"))?;
        let n: usize = n.trim().parse().map_err(|_| Error::format(line_no, "bad size"))?;
        if n == 0 {
            return Err(Error::format(line_no, "universe size must be at least 1"));
        }
        cells(n, *k).map_err(|e| Error::format(line_no, e.to_string()))?;
        let masks = parse_set_family(sets.trim(), n, *k).map_err(|msg| Error::format(line_no, msg))?;
        table.insert(n, masks);
    }
    let (name, k) = header.ok_or_else(|| Error::format(1, "missing `quant name/k` header"))?;
    Quantifier::extensional(name, k, table)
}

fn parse_set_family(text: &str, n: usize, k: usize) -> std::result::Result<BTreeSet<u64>, String> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or("expected `{...}`")?;
    let mut out = BTreeSet::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('{').ok_or("expected `{` opening a set")?;
        let close = body_start.find('}').ok_or("unclosed set")?;
        let body = &body_start[..close];
        out.insert(parse_set(body, n, k)?);
        rest = body_start[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(out)
}

fn parse_set(body: &str, n: usize, k: usize) -> std::result::Result<u64, String> {
    let mut mask = 0u64;
    let body = body.trim();
    if body.is_empty() {
        return Ok(0);
    }
    let elem = |s: &str| -> std::result::Result<usize, String> {
        let v: usize = s.trim().parse().map_err(|_| format!("bad element `{}`", s.trim()))?;
        if v >= n {
            return Err(format!("element {v} outside universe of size {n}"));
        }
        Ok(v)
    };
    if k == 1 {
        for item in body.split(',') {
            mask |= 1 << elem(item)?;
        }
        return Ok(mask);
    }
    let mut rest = body;
    while !rest.is_empty() {
        let t = rest.strip_prefix('(').ok_or("expected `(` opening a tuple")?;
        let close = t.find(')').ok_or("unclosed tuple")?;
        let tuple = t[..close].split(',').map(elem).collect::<std::result::Result<Vec<_>, _>>()?;
        if tuple.len() != k {
            return Err(format!("tuple of length {} in a quantifier of arity {k}", tuple.len()));
        }
        mask |= 1 << tuple_index(n, &tuple);
        rest = t[close + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(mask)
}

/// Renders a mask as `{0,2}` or `{(0,1),(1,1)}`.
pub fn format_subset(n: usize, k: usize, mask: u64) -> String {
    let items: Vec<String> = (0..64)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| {
            let t = tuple_at(n, k, i);
            if k == 1 {
                t[0].to_string()
            } else {
                format!("({})", t.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            }
        })
        .collect();
    format!("{{{}}}", items.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(elems: &[usize]) -> u64 {
        elems.iter().fold(0, |m, &e| m | 1 << e)
    }

    #[test]
    fn weight_masks() {
        assert_eq!(masks_of_weight(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(masks_of_weight(3, 0), vec![0]);
        assert_eq!(masks_of_weight(2, 3), Vec::<u64>::new());
        assert_eq!(masks_of_weight(64, 64), vec![u64::MAX]);
        assert_eq!(masks_of_weight(4, 1).len(), 4);
    }

    #[test]
    fn members_of_builtins() {
        assert_eq!(
            Quantifier::exists().members(2).unwrap(),
            vec![set(&[0]), set(&[1]), set(&[0, 1])]
        );
        assert_eq!(Quantifier::forall().members(2).unwrap(), vec![set(&[0, 1])]);
        assert_eq!(
            Quantifier::most().members(3).unwrap(),
            vec![set(&[0, 1]), set(&[0, 2]), set(&[1, 2]), set(&[0, 1, 2])]
        );
    }

    #[test]
    fn minimal_members_of_builtins() {
        assert_eq!(Quantifier::exists().minimal_members(2).unwrap(), vec![set(&[0]), set(&[1])]);
        assert_eq!(Quantifier::forall_k(2).unwrap().minimal_members(2).unwrap(), vec![0b1111]);
        assert_eq!(
            Quantifier::most().minimal_members(3).unwrap(),
            vec![set(&[0, 1]), set(&[0, 2]), set(&[1, 2])]
        );
    }

    #[test]
    fn monotonicity() {
        assert!(Quantifier::most().is_monotone_on(3).unwrap());
        assert!(Quantifier::forall().is_monotone_on(2).unwrap());
        let q = Quantifier::extensional("only0", 1, BTreeMap::from([(2, BTreeSet::from([set(&[0])]))])).unwrap();
        assert!(!q.is_monotone_on(2).unwrap());
        // cached answer is stable
        assert!(!q.is_monotone_on(2).unwrap());
        assert!(matches!(q.minimal_members(2), Err(Error::NotMonotone { .. })));
        assert!(matches!(q.accepts(3, 0), Err(Error::UndefinedSize { .. })));
    }

    #[test]
    fn nontriviality() {
        for n in 1..=3 {
            assert_eq!(Quantifier::exists().check_nontriviality(n).unwrap(), (true, true));
        }
        assert_eq!(Quantifier::never().check_nontriviality(2).unwrap(), (true, false));
        let qs = Quantifier::qs([2], false);
        assert_eq!(qs.check_nontriviality(2).unwrap(), (true, true));
        assert!(!qs.accepts(2, set(&[0])).unwrap());
        assert!(qs.accepts(3, set(&[0])).unwrap());
        assert_eq!(Quantifier::at_least(3).check_nontriviality(2).unwrap(), (true, false));
    }

    #[test]
    fn duals() {
        let e = Arc::new(Quantifier::exists());
        let d = Quantifier::dual(&e);
        assert_eq!(d.name(), "exists^d");
        for n in 1..=4 {
            assert_eq!(d.members(n).unwrap(), Quantifier::forall().members(n).unwrap());
        }
        let most = Arc::new(Quantifier::most());
        assert_eq!(Quantifier::dual(&most).members(3).unwrap(), most.members(3).unwrap());
        // at even size the dual of most is "at least half"
        assert_eq!(Quantifier::dual(&most).members(2).unwrap(), Quantifier::exists().members(2).unwrap());
    }

    #[test]
    fn registry_patterns() {
        let reg = QuantifierRegistry::with_builtins();
        assert_eq!(reg.resolve("atleast2").unwrap().name(), "atleast2");
        assert_eq!(reg.resolve("forall2").unwrap().arity(), 2);
        assert_eq!(reg.resolve("qs_2_3").unwrap().name(), "qs_2_3");
        assert_eq!(reg.resolve("qsnot_2").unwrap().name(), "qsnot_2");
        assert_eq!(reg.resolve("most^d^d").unwrap().name(), "most^d^d");
        assert!(matches!(reg.resolve("mostly"), Err(Error::UnknownQuantifier(_))));
        assert!(reg.resolve("forall0").is_err());
        assert!(reg.resolve("atleast").is_err());
    }

    #[test]
    fn extensional_file() {
        let text = "# two sizes\nquant half/1\non 2 = {{0},{1},{0,1}}\non 3 = {{}, {0,1,2}}\n";
        let q = parse_extensional(text).unwrap();
        assert_eq!(q.name(), "half");
        assert_eq!(q.members(2).unwrap(), Quantifier::exists().members(2).unwrap());
        assert_eq!(q.members(3).unwrap(), vec![0, 0b111]);
        let pairs = parse_extensional("quant p/2\non 2 = {{(0,0),(1,1)}}").unwrap();
        assert_eq!(pairs.members(2).unwrap(), vec![0b1001]);
        assert!(parse_extensional("quant p/2\non 2 = {{(0,3)}}").is_err());
        assert!(parse_extensional("on 2 = {}").is_err());
    }

    #[test]
    fn subset_formatting() {
        assert_eq!(format_subset(3, 1, set(&[0, 2])), "{0,2}");
        assert_eq!(format_subset(2, 2, 0b1001), "{(0,0),(1,1)}");
    }
}
