//! Property sweeps: each property is checked on every instance of a declared
//! space (or on seeded random instances), and failures are reported with the
//! structure, team and formulas involved.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::EvalConfig;
use crate::syntax::{Dialect, Signature};

pub mod generate;
mod probe;
mod sweep;

pub use generate::{random_formula, Binder, FormulaSpace, RANDOM_VARS};
pub use sweep::{check_equiv, run_sweep};

/// The checkable properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// `M, ∅ ⊨ φ`.
    EmptyTeam,
    /// `M, X ⊨ φ` and `Y ⊆ X` imply `M, Y ⊨ φ`.
    DownwardClosure,
    /// Truth depends only on the restriction of the team to `FV(φ)`.
    Locality,
    /// A first-order formula holds of a team iff of each of its assignments.
    Flatness,
    /// `[exists x]`/`[forall x]` agree with the native quantifiers.
    GqFaithfulness,
    /// `Qx(ψ ∨ φ) ≡ Qxψ ∨ φ` and `Qx(ψ ∧ φ) ≡ Qxψ ∧ φ` for `x ∉ FV(φ)`.
    ConnectiveLemma,
    /// An ESO(Q) sentence agrees with its normal form.
    NormalForm,
    /// The flattened normal form is flat and agrees with the source.
    Flattening,
    /// An ESO(Q) sentence agrees with its D(Q) translation.
    MainTheorem,
    /// `M, X ⊨ φ` iff `(M, rel(X))` satisfies the ESO(Q) translation.
    Translation,
    /// `perp(y;x̄;y)` agrees with `dep(x̄,y)`.
    DepFromIndep,
    /// Dual quantifiers: the defining identity, involution, and `¬Qx⊥ ⇔ Q^d x⊤`.
    Dual,
    /// The guarded translation agrees with the source where `Q` may accept nothing.
    SmallTrick,
    /// Full and minimal-witness quantifier search agree.
    MinimalWitness,
    /// Two sentences agree on every structure.
    Equivalence,
}

impl Property {
    pub const ALL: [Property; 15] = [
        Property::EmptyTeam,
        Property::DownwardClosure,
        Property::Locality,
        Property::Flatness,
        Property::GqFaithfulness,
        Property::ConnectiveLemma,
        Property::NormalForm,
        Property::Flattening,
        Property::MainTheorem,
        Property::Translation,
        Property::DepFromIndep,
        Property::Dual,
        Property::SmallTrick,
        Property::MinimalWitness,
        Property::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::EmptyTeam => "empty-team",
            Property::DownwardClosure => "downward-closure",
            Property::Locality => "locality",
            Property::Flatness => "flatness",
            Property::GqFaithfulness => "gq-faithfulness",
            Property::ConnectiveLemma => "connective-lemma",
            Property::NormalForm => "normal-form",
            Property::Flattening => "flattening",
            Property::MainTheorem => "main-theorem",
            Property::Translation => "translation",
            Property::DepFromIndep => "dep-from-indep",
            Property::Dual => "dual",
            Property::SmallTrick => "small-trick",
            Property::MinimalWitness => "minimal-witness",
            Property::Equivalence => "equivalence",
        }
    }

    /// The dialect formulas are generated or parsed in unless overridden.
    pub fn default_dialect(self) -> Dialect {
        match self {
            Property::Flatness => Dialect::Fo,
            Property::NormalForm
            | Property::Flattening
            | Property::MainTheorem
            | Property::SmallTrick
            | Property::Equivalence => Dialect::Eso,
            _ => Dialect::Dq,
        }
    }

    /// Properties whose instances are sentences checked on structures.
    pub fn is_sentence_property(self) -> bool {
        matches!(
            self,
            Property::NormalForm | Property::Flattening | Property::MainTheorem | Property::SmallTrick | Property::Equivalence
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown property `{s}`")))
    }
}

/// Where the formulas of a sweep come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaSource {
    /// Every formula of the standard space up to this depth.
    Exhaustive { depth: usize },
    /// Given formulas. In sentence properties `[Q ` stands for each
    /// quantifier of the sweep in turn.
    Explicit(Vec<String>),
    /// `count` random formulas, each checked on the whole instance space.
    RandomFormulas { seed: u64, count: u64, depth: usize },
    /// `count` random (structure, team, formula) instances.
    RandomInstances { seed: u64, count: u64, depth: usize },
}

impl FormulaSource {
    pub fn seed(&self) -> Option<u64> {
        match self {
            FormulaSource::RandomFormulas { seed, .. } | FormulaSource::RandomInstances { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// Upper bounds checked before a sweep starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub structures: u64,
    pub teams: u64,
    pub formulas: u64,
    pub instances: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            structures: 1 << 16,
            teams: 1 << 16,
            formulas: 1 << 20,
            instances: 1 << 32,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub property: Property,
    pub signature: Signature,
    pub sizes: Vec<usize>,
    /// Quantifiers used by generated formulas, the connective lemma, the
    /// `[Q ` placeholder, and the dual checks.
    pub quantifiers: Vec<String>,
    pub source: FormulaSource,
    pub dialect: Dialect,
    /// Variables of generated formulas and team domains.
    pub vars: Vec<String>,
    pub config: EvalConfig,
    pub caps: Caps,
    /// Keep going after the first counterexample.
    pub collect_all: bool,
}

impl SweepSpec {
    /// Defaults: signature `P/1`, size 2, depth-2 exhaustive source over `x`, `y`.
    pub fn new(property: Property) -> Self {
        SweepSpec {
            property,
            signature: Signature::new().with_relation("P", 1).expect("valid signature"),
            sizes: vec![2],
            quantifiers: Vec::new(),
            source: FormulaSource::Exhaustive { depth: 2 },
            dialect: property.default_dialect(),
            vars: vec!["x".into(), "y".into()],
            config: EvalConfig::default(),
            caps: Caps::default(),
            collect_all: false,
        }
    }

    pub fn signature(mut self, sig: Signature) -> Self {
        self.signature = sig;
        self
    }

    pub fn sizes(mut self, sizes: impl IntoIterator<Item = usize>) -> Self {
        self.sizes = sizes.into_iter().collect();
        self
    }

    pub fn quantifiers<S: Into<String>>(mut self, qs: impl IntoIterator<Item = S>) -> Self {
        self.quantifiers = qs.into_iter().map(Into::into).collect();
        self
    }

    pub fn source(mut self, source: FormulaSource) -> Self {
        self.source = source;
        self
    }

    pub fn explicit<S: Into<String>>(self, formulas: impl IntoIterator<Item = S>) -> Self {
        self.source(FormulaSource::Explicit(formulas.into_iter().map(Into::into).collect()))
    }

    pub fn dialect(mut self, dialect: Dialect) -> Self {
        self.dialect = dialect;
        self
    }

    pub fn vars<S: Into<String>>(mut self, vars: impl IntoIterator<Item = S>) -> Self {
        self.vars = vars.into_iter().map(Into::into).collect();
        self
    }

    pub fn config(mut self, cfg: EvalConfig) -> Self {
        self.config = cfg;
        self
    }

    pub fn caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn collect_all(mut self, yes: bool) -> Self {
        self.collect_all = yes;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let Caps {
            structures,
            teams,
            formulas,
            instances,
        } = self.caps;
        if structures == 0 || teams == 0 || formulas == 0 || instances == 0 {
            return Err(Error::Precondition("caps must be positive".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::Precondition("no universe sizes given".into()));
        }
        if self.sizes.contains(&0) {
            return Err(Error::Precondition("universe sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Counterexample,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Counterexample => "counterexample",
        })
    }
}

/// One failing instance. Structures and teams use the file formats of
/// [`crate::model`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub structure: Option<String>,
    pub team: Option<String>,
    /// The second team of two-team properties: the subteam for downward
    /// closure, the restriction for locality.
    pub other_team: Option<String>,
    pub formulas: Vec<String>,
    pub lhs: bool,
    pub rhs: bool,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counterexample: {}", self.detail)?;
        for (i, phi) in self.formulas.iter().enumerate() {
            writeln!(f, "  formula {}: {phi}", i + 1)?;
        }
        writeln!(f, "  lhs: {}  rhs: {}", self.lhs, self.rhs)?;
        let block = |f: &mut fmt::Formatter<'_>, label: &str, text: &Option<String>| -> fmt::Result {
            if let Some(text) = text {
                writeln!(f, "  {label}:")?;
                for line in text.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
            Ok(())
        };
        block(f, "structure", &self.structure)?;
        block(f, "team", &self.team)?;
        block(f, "other team", &self.other_team)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub property: Property,
    pub instances: u64,
    /// Size of the declared instance space, computed before the sweep.
    pub expected_instances: u64,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
    pub seed: Option<u64>,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn first_counterexample(&self) -> Option<&Counterexample> {
        self.counterexamples.first()
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property: {}", self.property)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(f, "instances: {} of {}", self.instances, self.expected_instances)?;
        match self.seed {
            Some(seed) => writeln!(f, "seed: {seed}")?,
            None => writeln!(f, "seed: none")?,
        }
        writeln!(f, "elapsed: {} ms", self.elapsed.as_millis())?;
        for c in &self.counterexamples {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
