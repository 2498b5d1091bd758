//! Rating ingestion, validation and cleaning.
//!
//! A [`RatingDataset`] is a sparse count tensor: for every (condition, user)
//! pair it stores how many times each score of the five-point ACR scale was
//! given. Counts are additionally kept per stimulus when the input carries a
//! stimulus column, so that outlier screening can be grouped per stimulus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use thiserror::Error;

use crate::error::{Error, Result};

/// Number of categories on the ACR scale.
pub const SCALE_LEN: usize = 5;

/// A single ACR vote, guaranteed to be in `1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(u8);

impl Score {
    pub const MIN: Score = Score(1);
    pub const MAX: Score = Score(5);

    pub fn new(value: i64) -> Option<Self> {
        (1..=5).contains(&value).then_some(Score(value as u8))
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based position on the scale.
    #[inline]
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < SCALE_LEN);
        Score(index as u8 + 1)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Histogram of votes over the five scale points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ScoreCounts([u32; SCALE_LEN]);

impl ScoreCounts {
    pub fn from_array(counts: [u32; SCALE_LEN]) -> Self {
        ScoreCounts(counts)
    }

    /// Histogram of raw vote values. Values outside `1..=5` are rejected.
    pub fn from_votes(votes: &[u8]) -> Option<Self> {
        let mut counts = ScoreCounts::default();
        for &v in votes {
            counts.add(Score::new(i64::from(v))?, 1);
        }
        Some(counts)
    }

    #[inline]
    pub fn add(&mut self, score: Score, count: u32) {
        self.0[score.index()] += count;
    }

    #[inline]
    pub fn get(&self, score: Score) -> u32 {
        self.0[score.index()]
    }

    pub fn as_array(&self) -> &[u32; SCALE_LEN] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    /// Sum of vote values.
    pub fn sum(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1) * u64::from(c))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn mean(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| self.sum() as f64 / n as f64)
    }

    pub fn merge(&mut self, other: &ScoreCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
    }

    /// Votes in ascending order.
    pub fn sorted_votes(&self) -> impl Iterator<Item = u8> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i as u8 + 1, c as usize))
    }
}

/// One row of a ratings table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatingRecord {
    pub condition_id: String,
    pub user_id: String,
    pub score: Score,
    pub stimulus_id: Option<String>,
}

impl RatingRecord {
    pub fn new(
        condition_id: impl Into<String>,
        user_id: impl Into<String>,
        score: Score,
        stimulus_id: Option<String>,
    ) -> Result<Self> {
        let condition_id = condition_id.into();
        let user_id = user_id.into();
        if condition_id.is_empty() {
            return Err(Error::Degenerate("empty condition_id".into()));
        }
        if user_id.is_empty() {
            return Err(Error::Degenerate("empty user_id".into()));
        }
        Ok(RatingRecord {
            condition_id,
            user_id,
            score,
            stimulus_id: stimulus_id.filter(|s| !s.is_empty()),
        })
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed row at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("missing required column `{0}` in header")]
    MissingColumn(String),

    #[error("missing field `{field}` at line {line}")]
    MissingField { field: String, line: u64 },

    #[error("score `{value}` is not an integer at line {line}")]
    NotInteger { value: String, line: u64 },

    #[error("score out of range at line {line}: {value} is not in 1..=5")]
    ScoreRange { value: i64, line: u64 },

    #[error("mos `{value}` is not a number at line {line}")]
    NotNumber { value: String, line: u64 },

    #[error("mos out of range at line {line}: {value} is not in [1, 5]")]
    MosRange { value: f64, line: u64 },

    #[error("duplicate condition `{condition}` at line {line}")]
    Duplicate { condition: String, line: u64 },

    #[error("input contains no data rows")]
    Empty,
}

impl LoadError {
    /// Input line the error refers to, when known.
    pub fn line(&self) -> Option<u64> {
        match self {
            LoadError::Csv { line, .. }
            | LoadError::MissingField { line, .. }
            | LoadError::NotInteger { line, .. }
            | LoadError::ScoreRange { line, .. }
            | LoadError::NotNumber { line, .. }
            | LoadError::MosRange { line, .. }
            | LoadError::Duplicate { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Header names of the columns read from input tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnNames {
    pub condition: String,
    pub user: String,
    pub score: String,
    pub stimulus: String,
    pub mos: String,
}

impl Default for ColumnNames {
    fn default() -> Self {
        ColumnNames {
            condition: "condition_id".into(),
            user: "user_id".into(),
            score: "score".into(),
            stimulus: "stimulus_id".into(),
            mos: "mos".into(),
        }
    }
}

impl ColumnNames {
    /// Applies overrides of the form `condition=NAME,user=NAME,...`.
    ///
    /// Recognised keys: `condition`, `user`, `score`, `stimulus`, `mos`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, name) = part.split_once('=').ok_or_else(|| {
                Error::Config(format!("column override `{part}` is not KEY=NAME"))
            })?;
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(Error::Config(format!("empty column name for `{key}`")));
            }
            match key.trim() {
                "condition" => self.condition = name,
                "user" => self.user = name,
                "score" => self.score = name,
                "stimulus" => self.stimulus = name,
                "mos" => self.mos = name,
                other => return Err(Error::Config(format!("unknown column key `{other}`"))),
            }
        }
        Ok(self)
    }
}

/// Dialect and column naming of an input table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSchema {
    pub delimiter: u8,
    pub columns: ColumnNames,
}

impl Default for TableSchema {
    fn default() -> Self {
        TableSchema {
            delimiter: b',',
            columns: ColumnNames::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadSummary {
    pub rows: usize,
    pub conditions: usize,
    pub users: usize,
}

/// Votes of one user for one condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UserVotes {
    pub user: usize,
    pub counts: ScoreCounts,
}

/// All votes for one condition, split by user. Users without votes are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionTable {
    pub users: Vec<UserVotes>,
    total: u64,
    sum: u64,
}

impl ConditionTable {
    /// `N_x`, the number of votes for this condition.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Sum of all vote values.
    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn counts(&self) -> ScoreCounts {
        let mut c = ScoreCounts::default();
        for u in &self.users {
            c.merge(&u.counts);
        }
        c
    }

    pub fn user(&self, user: usize) -> Option<&UserVotes> {
        self.users
            .binary_search_by_key(&user, |u| u.user)
            .ok()
            .map(|i| &self.users[i])
    }
}

/// Finest-grained storage unit: counts for (condition, user, stimulus).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub condition: usize,
    pub user: usize,
    pub stimulus: Option<usize>,
    pub counts: ScoreCounts,
}

type CellKey = (String, String, Option<String>);

/// Sparse vote-count tensor. Immutable once built.
///
/// Conditions, users and stimuli are indexed in lexicographic order of their
/// ids, which makes the layout independent of input row order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatingDataset {
    label: String,
    conditions: Vec<String>,
    users: Vec<String>,
    stimuli: Vec<String>,
    cells: Vec<Cell>,
    tables: Vec<ConditionTable>,
}

impl RatingDataset {
    pub fn from_records<I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = RatingRecord>,
    {
        let mut map: BTreeMap<CellKey, ScoreCounts> = BTreeMap::new();
        for r in records {
            map.entry((r.condition_id, r.user_id, r.stimulus_id))
                .or_default()
                .add(r.score, 1);
        }
        Ok(Self::assemble("dataset".into(), map)?)
    }

    fn assemble(label: String, map: BTreeMap<CellKey, ScoreCounts>) -> Result<Self, LoadError> {
        let map: BTreeMap<_, _> = map.into_iter().filter(|(_, c)| !c.is_empty()).collect();
        if map.is_empty() {
            return Err(LoadError::Empty);
        }
        let conditions: Vec<String> = map
            .keys()
            .map(|k| k.0.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let users: Vec<String> = map
            .keys()
            .map(|k| k.1.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let stimuli: Vec<String> = map
            .keys()
            .filter_map(|k| k.2.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let find = |v: &[String], s: &str| v.binary_search_by(|p| p.as_str().cmp(s)).unwrap();

        let cells: Vec<Cell> = map
            .iter()
            .map(|((c, u, s), counts)| Cell {
                condition: find(&conditions, c),
                user: find(&users, u),
                stimulus: s.as_deref().map(|s| find(&stimuli, s)),
                counts: *counts,
            })
            .collect();

        let mut per_cond: Vec<BTreeMap<usize, ScoreCounts>> =
            vec![BTreeMap::new(); conditions.len()];
        for cell in &cells {
            per_cond[cell.condition]
                .entry(cell.user)
                .or_default()
                .merge(&cell.counts);
        }
        let tables = per_cond
            .into_iter()
            .map(|m| {
                let users: Vec<UserVotes> = m
                    .into_iter()
                    .map(|(user, counts)| UserVotes { user, counts })
                    .collect();
                let total = users.iter().map(|u| u.counts.total()).sum();
                let sum = users.iter().map(|u| u.counts.sum()).sum();
                ConditionTable { users, total, sum }
            })
            .collect();

        Ok(RatingDataset {
            label,
            conditions,
            users,
            stimuli,
            cells,
            tables,
        })
    }

    fn cell_map(&self) -> BTreeMap<CellKey, ScoreCounts> {
        self.cells
            .iter()
            .map(|c| {
                (
                    (
                        self.conditions[c.condition].clone(),
                        self.users[c.user].clone(),
                        c.stimulus.map(|s| self.stimuli[s].clone()),
                    ),
                    c.counts,
                )
            })
            .collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn conditions(&self) -> &[String] {
        &self.conditions
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn num_conditions(&self) -> usize {
        self.conditions.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_votes(&self) -> u64 {
        self.tables.iter().map(|t| t.total).sum()
    }

    pub fn condition_index(&self, id: &str) -> Option<usize> {
        self.conditions
            .binary_search_by(|c| c.as_str().cmp(id))
            .ok()
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.users.binary_search_by(|u| u.as_str().cmp(id)).ok()
    }

    pub(crate) fn require_condition(&self, id: &str) -> Result<usize> {
        self.condition_index(id)
            .ok_or_else(|| Error::UnknownCondition(id.to_string()))
    }

    /// Per-user votes of the condition at `index`.
    pub fn table(&self, index: usize) -> &ConditionTable {
        &self.tables[index]
    }

    pub fn tables(&self) -> &[ConditionTable] {
        &self.tables
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// True when every vote carries a stimulus id.
    pub fn has_stimuli(&self) -> bool {
        self.cells.iter().all(|c| c.stimulus.is_some())
    }

    /// `N_{x,u,q}` as a histogram; `None` if the user never rated the condition.
    pub fn user_counts(&self, condition: &str, user: &str) -> Option<ScoreCounts> {
        let x = self.condition_index(condition)?;
        let u = self.user_index(user)?;
        self.tables[x].user(u).map(|v| v.counts)
    }

    pub fn votes_per_condition(&self) -> Vec<u64> {
        self.tables.iter().map(|t| t.total).collect()
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn csv_error(e: csv::Error) -> LoadError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => LoadError::Io(io),
        kind => LoadError::Csv {
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn open_table<R: Read>(
    source: R,
    schema: &TableSchema,
) -> Result<(csv::Reader<R>, csv::StringRecord), LoadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.is_empty() {
        return Err(LoadError::Empty);
    }
    if let Some(first) = headers.get(0) {
        if let Some(stripped) = first.strip_prefix('\u{feff}') {
            let mut fixed: Vec<String> = headers.iter().map(str::to_string).collect();
            fixed[0] = stripped.to_string();
            headers = csv::StringRecord::from(fixed);
        }
    }
    Ok((rdr, headers))
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, LoadError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| LoadError::MissingColumn(name.to_string()))
}

fn field<'r>(record: &'r csv::StringRecord, idx: usize, name: &str) -> Result<&'r str, LoadError> {
    match record.get(idx) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(LoadError::MissingField {
            field: name.to_string(),
            line: record_line(record),
        }),
    }
}

/// Reads a delimited ratings table.
///
/// Required columns are condition, user and score; a stimulus column is used
/// when present. Extra columns are ignored. Repeated (condition, user, score)
/// rows accumulate.
pub fn load_ratings<R: Read>(
    source: R,
    schema: &TableSchema,
) -> Result<(RatingDataset, LoadSummary), LoadError> {
    let cols = &schema.columns;
    let (mut rdr, headers) = open_table(source, schema)?;
    let ci = column(&headers, &cols.condition)?;
    let ui = column(&headers, &cols.user)?;
    let si = column(&headers, &cols.score)?;
    let sti = headers.iter().position(|h| h == cols.stimulus);

    let mut map: BTreeMap<CellKey, ScoreCounts> = BTreeMap::new();
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        let condition = field(&record, ci, &cols.condition)?;
        let user = field(&record, ui, &cols.user)?;
        let raw = field(&record, si, &cols.score)?;
        let value: i64 = raw.parse().map_err(|_| LoadError::NotInteger {
            value: raw.to_string(),
            line,
        })?;
        let score = Score::new(value).ok_or(LoadError::ScoreRange { value, line })?;
        let stimulus = match sti {
            Some(i) => record.get(i).filter(|s| !s.is_empty()).map(str::to_string),
            None => None,
        };
        map.entry((condition.to_string(), user.to_string(), stimulus))
            .or_default()
            .add(score, 1);
        rows += 1;
    }
    let ds = RatingDataset::assemble("dataset".into(), map)?;
    let summary = LoadSummary {
        rows,
        conditions: ds.num_conditions(),
        users: ds.num_users(),
    };
    Ok((ds, summary))
}

/// Ground-truth MOS per condition, typically from a laboratory test.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReferenceMos {
    mos: BTreeMap<String, f64>,
}

/// Result of matching a reference table against a rating dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceCheck {
    /// Conditions present in both.
    pub shared: usize,
    /// Reference conditions absent from the ratings.
    pub orphans: Vec<String>,
    /// Rated conditions without a reference value.
    pub unreferenced: Vec<String>,
}

impl ReferenceMos {
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut mos = BTreeMap::new();
        for (i, (c, v)) in pairs.into_iter().enumerate() {
            let line = i as u64 + 1;
            if !(1.0..=5.0).contains(&v) {
                return Err(LoadError::MosRange { value: v, line }.into());
            }
            let c = c.into();
            if mos.insert(c.clone(), v).is_some() {
                return Err(LoadError::Duplicate { condition: c, line }.into());
            }
        }
        Ok(ReferenceMos { mos })
    }

    pub fn get(&self, condition: &str) -> Option<f64> {
        self.mos.get(condition).copied()
    }

    pub fn len(&self) -> usize {
        self.mos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mos.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.mos.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn check_against(&self, ds: &RatingDataset) -> ReferenceCheck {
        let orphans: Vec<String> = self
            .mos
            .keys()
            .filter(|c| ds.condition_index(c).is_none())
            .cloned()
            .collect();
        let unreferenced: Vec<String> = ds
            .conditions()
            .iter()
            .filter(|c| !self.mos.contains_key(*c))
            .cloned()
            .collect();
        ReferenceCheck {
            shared: self.mos.len() - orphans.len(),
            orphans,
            unreferenced,
        }
    }
}

/// Reads a `condition_id,mos` table.
///
/// Conditions missing from the rating data are not an error here; see
/// [`ReferenceMos::check_against`].
pub fn load_reference<R: Read>(source: R, schema: &TableSchema) -> Result<ReferenceMos, LoadError> {
    let cols = &schema.columns;
    let (mut rdr, headers) = open_table(source, schema)?;
    let ci = column(&headers, &cols.condition)?;
    let mi = column(&headers, &cols.mos)?;
    let mut mos = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        let condition = field(&record, ci, &cols.condition)?;
        let raw = field(&record, mi, &cols.mos)?;
        let value: f64 = raw.parse().map_err(|_| LoadError::NotNumber {
            value: raw.to_string(),
            line,
        })?;
        if !(1.0..=5.0).contains(&value) {
            return Err(LoadError::MosRange { value, line });
        }
        if mos.insert(condition.to_string(), value).is_some() {
            return Err(LoadError::Duplicate {
                condition: condition.to_string(),
                line,
            });
        }
    }
    if mos.is_empty() {
        return Err(LoadError::Empty);
    }
    Ok(ReferenceMos { mos })
}

/// Grouping unit for outlier screening.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutlierScope {
    #[default]
    PerCondition,
    PerStimulus,
}

impl std::str::FromStr for OutlierScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "condition" | "per-condition" => Ok(OutlierScope::PerCondition),
            "stimulus" | "per-stimulus" => Ok(OutlierScope::PerStimulus),
            other => Err(Error::Config(format!("unknown outlier scope `{other}`"))),
        }
    }
}

/// Quantile of sorted data by linear interpolation between order statistics
/// (position `(len - 1) * p`).
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Median and interquartile range of a vote histogram.
pub fn median_iqr(counts: &ScoreCounts) -> Option<(f64, f64)> {
    if counts.is_empty() {
        return None;
    }
    let sorted: Vec<f64> = counts.sorted_votes().map(f64::from).collect();
    let q1 = quantile_linear(&sorted, 0.25);
    let q3 = quantile_linear(&sorted, 0.75);
    Some((quantile_linear(&sorted, 0.5), q3 - q1))
}

/// Which scale points of a group count as extreme outliers.
///
/// A vote `v` is an outlier when `|v - median| >= k * IQR`. When the IQR is
/// zero, only votes different from the median are flagged.
pub fn outlier_mask(counts: &ScoreCounts, k: f64) -> [bool; SCALE_LEN] {
    let mut mask = [false; SCALE_LEN];
    let Some((median, iqr)) = median_iqr(counts) else {
        return mask;
    };
    for (i, flag) in mask.iter_mut().enumerate() {
        let dist = (i as f64 + 1.0 - median).abs();
        *flag = if iqr == 0.0 {
            dist > 0.0
        } else {
            dist >= k * iqr
        };
    }
    mask
}

/// Removes extreme outliers within each scope group, returning the cleaned
/// dataset and the number of removed votes.
pub fn remove_outliers_iqr(
    ds: &RatingDataset,
    k: f64,
    scope: OutlierScope,
) -> Result<(RatingDataset, u64)> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Config(format!(
            "outlier factor must be positive, got {k}"
        )));
    }
    if scope == OutlierScope::PerStimulus && !ds.has_stimuli() {
        return Err(Error::Config(
            "per-stimulus outlier scope requires a stimulus id on every vote".into(),
        ));
    }
    let group_of = |c: &Cell| match scope {
        OutlierScope::PerCondition => (c.condition, None),
        OutlierScope::PerStimulus => (c.condition, c.stimulus),
    };
    let mut groups: BTreeMap<(usize, Option<usize>), ScoreCounts> = BTreeMap::new();
    for cell in ds.cells() {
        groups
            .entry(group_of(cell))
            .or_default()
            .merge(&cell.counts);
    }
    let masks: BTreeMap<_, _> = groups
        .iter()
        .map(|(g, counts)| (*g, outlier_mask(counts, k)))
        .collect();

    let mut removed = 0u64;
    let mut map = ds.cell_map();
    for (cell, counts) in ds.cells().iter().zip(map.values_mut()) {
        let mask = &masks[&group_of(cell)];
        let mut kept = *counts.as_array();
        for (i, slot) in kept.iter_mut().enumerate() {
            if mask[i] {
                removed += u64::from(*slot);
                *slot = 0;
            }
        }
        *counts = ScoreCounts::from_array(kept);
    }
    let cleaned = RatingDataset::assemble(ds.label.clone(), map)?;
    Ok((cleaned, removed))
}

/// `P(U = u | x)`: share of the condition's votes contributed by each user.
pub fn empirical_user_prob(ds: &RatingDataset, condition: &str) -> Result<BTreeMap<String, f64>> {
    let x = ds.require_condition(condition)?;
    let table = ds.table(x);
    let total = table.total() as f64;
    Ok(table
        .users
        .iter()
        .map(|u| (ds.users()[u.user].clone(), u.counts.total() as f64 / total))
        .collect())
}

/// `P(Q = q | x, u)` over the five scale points.
pub fn empirical_score_dist(
    ds: &RatingDataset,
    condition: &str,
    user: &str,
) -> Result<[f64; SCALE_LEN]> {
    ds.require_condition(condition)?;
    let counts = ds
        .user_counts(condition, user)
        .ok_or_else(|| Error::NoVotes {
            condition: condition.to_string(),
            user: user.to_string(),
        })?;
    let total = counts.total() as f64;
    Ok(counts.as_array().map(|c| f64::from(c) / total))
}
