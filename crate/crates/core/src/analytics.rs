//! Degree statistics, activity rankings and repeated-transaction groups.

use crate::net::{NetError, PlaceId, PlaceTransitionNet, Side, TransitionId};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("CCDF of an empty multiset is undefined")]
    EmptyMultiset,
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeSide {
    Pre,
    Post,
    Both,
}

/// One nonzero count per place, in place order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeMultiset {
    pub side: DegreeSide,
    pub counts: Vec<u64>,
}

pub fn degree_multiset(net: &PlaceTransitionNet, side: DegreeSide) -> Result<DegreeMultiset, AnalyticsError> {
    net.require_sealed()?;
    let pre = net.side(Side::Pre);
    let post = net.side(Side::Post);
    let counts = (0..net.num_places())
        .map(|p| {
            let (a, b) = (pre.row_nnz(p) as u64, post.row_nnz(p) as u64);
            match side {
                DegreeSide::Pre => a,
                DegreeSide::Post => b,
                DegreeSide::Both => a + b,
            }
        })
        .collect();
    Ok(DegreeMultiset { side, counts })
}

/// Points `(x, P(L > x))`, x strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfSeries {
    pub points: Vec<(u64, f64)>,
}

/// Evaluates the CCDF at 0 and at every distinct value.
pub fn ccdf(values: &[u64]) -> Result<CcdfSeries, AnalyticsError> {
    if values.is_empty() {
        return Err(AnalyticsError::EmptyMultiset);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mut points = Vec::new();
    if sorted[0] > 0 {
        points.push((0, 1.0));
    }
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        while i < n && sorted[i] == x {
            i += 1;
        }
        points.push((x, (n - i) as f64 / n as f64));
    }
    Ok(CcdfSeries { points })
}

impl CcdfSeries {
    /// `x,ccdf` rows; probabilities carry 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,ccdf\n");
        for &(x, p) in &self.points {
            let _ = writeln!(out, "{x},{}", format_probability(p));
        }
        out
    }
}

fn format_probability(p: f64) -> String {
    if p == 0.0 {
        return "0.00000000000000".to_owned();
    }
    let decimals = (14 - p.log10().floor() as i32).max(0) as usize;
    format!("{p:.decimals$}")
}

/// Activity of one place in the ranking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityRow {
    pub place: PlaceId,
    pub pre_nnz: usize,
    pub post_nnz: usize,
}

/// At most `k` places by `pre_nnz + post_nnz` descending, ties by id.
pub fn top_k_active(net: &PlaceTransitionNet, k: usize) -> Result<Vec<ActivityRow>, AnalyticsError> {
    if k == 0 {
        return Err(AnalyticsError::ZeroK);
    }
    net.require_sealed()?;
    let pre = net.side(Side::Pre);
    let post = net.side(Side::Post);
    let mut rows: Vec<ActivityRow> = net
        .places()
        .map(|p| ActivityRow {
            place: p,
            pre_nnz: pre.row_nnz(p.index()),
            post_nnz: post.row_nnz(p.index()),
        })
        .collect();
    let key = |r: &ActivityRow| (std::cmp::Reverse(r.pre_nnz + r.post_nnz), r.place);
    if k < rows.len() {
        rows.select_nth_unstable_by_key(k - 1, key);
        rows.truncate(k);
    }
    rows.sort_unstable_by_key(key);
    Ok(rows)
}

/// Places that receive but never spend.
pub fn accumulate_only(net: &PlaceTransitionNet) -> Result<Vec<PlaceId>, AnalyticsError> {
    net.require_sealed()?;
    let pre = net.side(Side::Pre);
    let post = net.side(Side::Post);
    Ok(net
        .places()
        .filter(|p| pre.row_nnz(p.index()) == 0 && post.row_nnz(p.index()) > 0)
        .collect())
}

/// Transitions with identical `pre` and `post` columns, values included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatGroups {
    /// Each group ascending and of size ≥ 2; groups ordered by first member.
    pub groups: Vec<Vec<TransitionId>>,
    /// Group members beyond the first, summed over groups.
    pub repetition_count: usize,
    pub num_transitions: usize,
    /// `repetition_count / num_transitions`, 0 for an empty net.
    pub fraction: f64,
}

impl RepeatGroups {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

type ColumnKey<'a> = (&'a [u32], &'a [u32], &'a [u32], &'a [u32]);

pub fn repeated_groups(net: &PlaceTransitionNet) -> Result<RepeatGroups, AnalyticsError> {
    net.require_sealed()?;
    let pre = net.side(Side::Pre);
    let post = net.side(Side::Post);
    let n = net.num_transitions();
    let mut first_of: FxHashMap<ColumnKey<'_>, usize> = FxHashMap::default();
    let mut members: Vec<Vec<TransitionId>> = Vec::new();
    for t in 0..n {
        let key = (pre.col_rows(t), pre.col_values(t), post.col_rows(t), post.col_values(t));
        let slot = *first_of.entry(key).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[slot].push(TransitionId::new(t));
    }
    // slots are created in first-member order, so groups come out sorted
    let groups: Vec<Vec<TransitionId>> = members.into_iter().filter(|g| g.len() >= 2).collect();
    let repetition_count = groups.iter().map(|g| g.len() - 1).sum();
    Ok(RepeatGroups {
        groups,
        repetition_count,
        num_transitions: n,
        fraction: if n == 0 { 0.0 } else { repetition_count as f64 / n as f64 },
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub places: usize,
    pub transitions: usize,
    pub pre_arcs: usize,
    pub post_arcs: usize,
    pub accumulate_only: usize,
    pub disposable: usize,
}

pub fn summary(net: &PlaceTransitionNet) -> Result<SummaryReport, AnalyticsError> {
    Ok(SummaryReport {
        places: net.num_places(),
        transitions: net.num_transitions(),
        pre_arcs: net.arc_count(Side::Pre),
        post_arcs: net.arc_count(Side::Post),
        accumulate_only: accumulate_only(net)?.len(),
        disposable: net
            .places()
            .filter(|p| net.side(Side::Pre).row_nnz(p.index()) == 1 && net.side(Side::Post).row_nnz(p.index()) == 1)
            .count(),
    })
}
