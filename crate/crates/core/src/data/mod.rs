//! Dataset types, the latent-group taxonomy, assumption configuration and
//! CSV ingestion.
//!
//! Outcomes are stored as `Option<T>`: a value is present exactly when the
//! unit is selected in that period. Datasets are validated on construction
//! and immutable afterwards.

mod csv_io;

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use csv_io::{
    load_multi_csv, load_panel_csv, load_rcs_csv, read_multi_csv, read_panel_csv, read_panel_rows,
    read_rcs_csv, write_multi_csv, write_panel_csv, write_rcs_csv, Loaded, RowReport,
};

/// Machine-readable warning attached to loads and estimation results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningCode {
    DroppedOutcome,
    MonotonicityViolatedInSample,
    NegativeProportionClamped,
    ProportionClamped,
    VacuousIdentification,
    MissingPeriodRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

impl Warning {
    pub fn new(code: WarningCode, message: impl Into<String>) -> Self {
        Warning {
            code,
            message: message.into(),
        }
    }
}

/// One unit of a two-period panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelRecord<T> {
    pub id: String,
    pub d: bool,
    pub s0: bool,
    pub s1: bool,
    pub y0: Option<T>,
    pub y1: Option<T>,
}

impl<T: Scalar> PanelRecord<T> {
    /// Outcome change; only defined for units observed in both periods.
    pub fn delta_y(&self) -> Option<T> {
        match (self.y0, self.y1) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelDataset<T> {
    units: Vec<PanelRecord<T>>,
}

impl<T: Scalar> PanelDataset<T> {
    /// Validates that the set is non-empty and outcomes are present exactly
    /// where the unit is selected.
    pub fn new(units: Vec<PanelRecord<T>>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::EmptyFile);
        }
        for (i, u) in units.iter().enumerate() {
            if u.s0 != u.y0.is_some() || u.s1 != u.y1.is_some() {
                return Err(Error::MalformedRow {
                    line: i as u64 + 1,
                    reason: format!("unit {}: outcome presence disagrees with selection", u.id),
                });
            }
        }
        Ok(PanelDataset { units })
    }

    pub fn units(&self) -> &[PanelRecord<T>] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Number of units matching the optional filters.
    pub fn count(&self, d: Option<bool>, s0: Option<bool>, s1: Option<bool>) -> usize {
        self.units
            .iter()
            .filter(|u| matches(u.d, d) && matches(u.s0, s0) && matches(u.s1, s1))
            .count()
    }

    /// ΔY for arm `d` among units observed in both periods, in data order.
    pub fn delta_y(&self, d: bool) -> Vec<T> {
        self.units
            .iter()
            .filter(|u| u.d == d)
            .filter_map(|u| u.delta_y())
            .collect()
    }

    /// Y0 of units selected at baseline, filtered on arm and post selection.
    pub fn y0(&self, d: Option<bool>, s1: Option<bool>) -> Vec<T> {
        self.units
            .iter()
            .filter(|u| matches(u.d, d) && matches(u.s1, s1))
            .filter_map(|u| u.y0)
            .collect()
    }

    /// Y1 of units selected in the post period, filtered on arm and baseline
    /// selection.
    pub fn y1(&self, d: Option<bool>, s0: Option<bool>) -> Vec<T> {
        self.units
            .iter()
            .filter(|u| matches(u.d, d) && matches(u.s0, s0))
            .filter_map(|u| u.y1)
            .collect()
    }

    /// Same units with outcomes mapped through `f`.
    pub fn map_outcomes<U: Scalar>(&self, f: impl Fn(T) -> U) -> PanelDataset<U> {
        PanelDataset {
            units: self
                .units
                .iter()
                .map(|u| PanelRecord {
                    id: u.id.clone(),
                    d: u.d,
                    s0: u.s0,
                    s1: u.s1,
                    y0: u.y0.map(&f),
                    y1: u.y1.map(&f),
                })
                .collect(),
        }
    }
}

fn matches(v: bool, filter: Option<bool>) -> bool {
    filter.is_none_or(|f| f == v)
}

/// Observed counts by (S0, S1, D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCounts {
    counts: [[[usize; 2]; 2]; 2],
}

impl CellCounts {
    pub fn get(&self, s0: bool, s1: bool, d: bool) -> usize {
        self.counts[s0 as usize][s1 as usize][d as usize]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().flatten().sum()
    }

    /// `(s0, s1, d, count)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (bool, bool, bool, usize)> + '_ {
        (0..8).map(move |k| {
            let (s0, s1, d) = (k & 4 != 0, k & 2 != 0, k & 1 != 0);
            (s0, s1, d, self.get(s0, s1, d))
        })
    }
}

impl Serialize for CellCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            s0: u8,
            s1: u8,
            d: u8,
            count: usize,
        }
        serializer.collect_seq(self.iter().map(|(s0, s1, d, count)| Entry {
            s0: s0 as u8,
            s1: s1 as u8,
            d: d as u8,
            count,
        }))
    }
}

pub fn cell_counts<T: Scalar>(data: &PanelDataset<T>) -> CellCounts {
    let mut c = CellCounts::default();
    for u in data.units() {
        c.counts[u.s0 as usize][u.s1 as usize][u.d as usize] += 1;
    }
    c
}

/// Latent selection strata, named by (S0(0), S1(0), S1(1)) with O for
/// observed and N for not observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LatentGroup {
    NNN,
    NNO,
    NON,
    NOO,
    ONN,
    ONO,
    OON,
    OOO,
}

impl LatentGroup {
    pub const ALL: [LatentGroup; 8] = [
        LatentGroup::NNN,
        LatentGroup::NNO,
        LatentGroup::NON,
        LatentGroup::NOO,
        LatentGroup::ONN,
        LatentGroup::ONO,
        LatentGroup::OON,
        LatentGroup::OOO,
    ];

    pub fn from_selection(s0: bool, s1_untreated: bool, s1_treated: bool) -> Self {
        Self::ALL[(s0 as usize) << 2 | (s1_untreated as usize) << 1 | s1_treated as usize]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LatentGroup::NNN => "NNN",
            LatentGroup::NNO => "NNO",
            LatentGroup::NON => "NON",
            LatentGroup::NOO => "NOO",
            LatentGroup::ONN => "ONN",
            LatentGroup::ONO => "ONO",
            LatentGroup::OON => "OON",
            LatentGroup::OOO => "OOO",
        }
    }
}

impl fmt::Display for LatentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotonicityDirection {
    /// Treatment never switches selection off.
    Positive,
    /// Treatment never switches selection on.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionAssumption {
    WithoutMonotonicity,
    WithMonotonicity(MonotonicityDirection),
}

/// Outcome mean-dominance flags used by the other-group bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MeanDominance {
    /// OOO dominates ONO among untreated (ONO bounds).
    pub a: bool,
    /// Ordering used by the NNO bounds.
    pub b: bool,
    /// Ordering used by the NOO bounds.
    pub c: bool,
}

/// Identifying assumptions in force for an estimate. No-anticipation and
/// parallel trends for the target group are always maintained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AssumptionSet {
    pub selection: SelectionAssumption,
    pub joint_independence: bool,
    pub mean_dominance: MeanDominance,
}

impl AssumptionSet {
    pub fn without_monotonicity() -> Self {
        AssumptionSet {
            selection: SelectionAssumption::WithoutMonotonicity,
            joint_independence: false,
            mean_dominance: MeanDominance::default(),
        }
    }

    pub fn monotone(direction: MonotonicityDirection) -> Self {
        AssumptionSet {
            selection: SelectionAssumption::WithMonotonicity(direction),
            ..Self::without_monotonicity()
        }
    }

    pub fn positive() -> Self {
        Self::monotone(MonotonicityDirection::Positive)
    }

    pub fn negative() -> Self {
        Self::monotone(MonotonicityDirection::Negative)
    }

    pub fn with_joint_independence(mut self) -> Self {
        self.joint_independence = true;
        self
    }

    pub fn with_dominance(mut self, dominance: MeanDominance) -> Self {
        self.mean_dominance = dominance;
        self
    }

    pub fn is_positive(&self) -> bool {
        self.selection == SelectionAssumption::WithMonotonicity(MonotonicityDirection::Positive)
    }

    /// Short label: `nomono`, `mono-pos` or `mono-neg`.
    pub fn label(&self) -> &'static str {
        match self.selection {
            SelectionAssumption::WithoutMonotonicity => "nomono",
            SelectionAssumption::WithMonotonicity(MonotonicityDirection::Positive) => "mono-pos",
            SelectionAssumption::WithMonotonicity(MonotonicityDirection::Negative) => "mono-neg",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "nomono" => Ok(Self::without_monotonicity()),
            "mono-pos" => Ok(Self::positive()),
            "mono-neg" => Ok(Self::negative()),
            other => Err(Error::InvalidConfig(format!(
                "unknown assumption set {other:?} (expected nomono, mono-pos or mono-neg)"
            ))),
        }
    }
}

impl Serialize for AssumptionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            selection: &'static str,
            joint_independence: bool,
            mean_dominance: Vec<&'static str>,
        }
        let m = self.mean_dominance;
        let dom = [(m.a, "a"), (m.b, "b"), (m.c, "c")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect();
        Repr {
            selection: self.label(),
            joint_independence: self.joint_independence,
            mean_dominance: dom,
        }
        .serialize(serializer)
    }
}

/// One row of a repeated cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsRecord<T> {
    pub id: String,
    pub t: bool,
    pub d: bool,
    pub s: bool,
    pub y: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcsDataset<T> {
    rows: Vec<RcsRecord<T>>,
}

impl<T: Scalar> RcsDataset<T> {
    /// Requires both periods to be sampled and outcome presence to match
    /// selection.
    pub fn new(rows: Vec<RcsRecord<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyFile);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.s != r.y.is_some() {
                return Err(Error::MalformedRow {
                    line: i as u64 + 1,
                    reason: format!("row {}: outcome presence disagrees with selection", r.id),
                });
            }
        }
        let post = rows.iter().filter(|r| r.t).count();
        if post == 0 || post == rows.len() {
            return Err(Error::DegenerateSampling(format!(
                "share of post-period rows is {}",
                post as f64 / rows.len() as f64
            )));
        }
        Ok(RcsDataset { rows })
    }

    /// Skips the sampling check; rows must already satisfy the outcome rule.
    pub(crate) fn from_rows_unchecked(rows: Vec<RcsRecord<T>>) -> Self {
        RcsDataset { rows }
    }

    pub fn rows(&self) -> &[RcsRecord<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Share of rows sampled in the post period.
    pub fn lambda(&self) -> f64 {
        self.rows.iter().filter(|r| r.t).count() as f64 / self.rows.len() as f64
    }

    pub fn count(&self, d: bool, t: bool, s: Option<bool>) -> usize {
        self.rows
            .iter()
            .filter(|r| r.d == d && r.t == t && matches(r.s, s))
            .count()
    }

    /// Observed outcomes in cell (d, t), in data order.
    pub fn outcomes(&self, d: bool, t: bool) -> Vec<T> {
        self.rows
            .iter()
            .filter(|r| r.d == d && r.t == t)
            .filter_map(|r| r.y)
            .collect()
    }
}

/// One row of a long-format panel with staggered adoption.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiRecord<T> {
    pub id: String,
    /// First treated period; 0 marks never-treated units.
    pub gvar: u32,
    pub t: u32,
    pub s: bool,
    pub y: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPeriodPanel<T> {
    rows: Vec<MultiRecord<T>>,
    last_period: u32,
}

impl<T: Scalar> MultiPeriodPanel<T> {
    /// Checks gvar consistency, unique (id, t) pairs and a baseline row for
    /// every id.
    pub fn new(rows: Vec<MultiRecord<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyFile);
        }
        let mut gvar: HashMap<&str, u32> = HashMap::new();
        let mut seen: HashMap<(&str, u32), ()> = HashMap::new();
        for (i, r) in rows.iter().enumerate() {
            if r.s != r.y.is_some() {
                return Err(Error::MalformedRow {
                    line: i as u64 + 1,
                    reason: format!("unit {}: outcome presence disagrees with selection", r.id),
                });
            }
            if *gvar.entry(&r.id).or_insert(r.gvar) != r.gvar {
                return Err(Error::InconsistentGvar { id: r.id.clone() });
            }
            if seen.insert((&r.id, r.t), ()).is_some() {
                return Err(Error::DuplicatePeriod {
                    id: r.id.clone(),
                    period: r.t,
                });
            }
        }
        // Report the first id (in data order) lacking a baseline row.
        for r in &rows {
            if !seen.contains_key(&(r.id.as_str(), 0)) {
                return Err(Error::MissingBaseline { id: r.id.clone() });
            }
        }
        let last_period = rows.iter().map(|r| r.t).max().unwrap_or(0);
        Ok(MultiPeriodPanel { rows, last_period })
    }

    pub fn rows(&self) -> &[MultiRecord<T>] {
        &self.rows
    }

    /// Largest period index present.
    pub fn last_period(&self) -> u32 {
        self.last_period
    }

    /// Distinct ids in order of first appearance.
    pub fn ids(&self) -> Vec<&str> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for r in &self.rows {
            if seen.insert(r.id.as_str(), ()).is_none() {
                out.push(r.id.as_str());
            }
        }
        out
    }

    /// Number of distinct units.
    pub fn n_units(&self) -> usize {
        self.ids().len()
    }
}
