//! Scale sampling and multi-scale sweeps with NMI relevance series.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cover::Cover;
use crate::criteria::GlobalKind;
use crate::error::{Error, Result};
use crate::global::{detect_global, GlobalOptions};
use crate::graph::Graph;
use crate::local::LocalKind;
use crate::math;
use crate::metrics::{nmi, windowed_from_pairs};
use crate::overlap::{detect_local, LocalOptions};
use crate::walk::DEFAULT_TAU;

/// Lower end used for local criteria when none is given; alpha must stay
/// positive.
pub const LOCAL_MIN_VALUE: f64 = 0.01;

/// Share of the AFG domain bound used by [`afg_floor`].
pub const AFG_FLOOR_FRACTION: f64 = 0.99;

/// Lower AFG end close to the asymptote `r -> -min_i d_i`, where the
/// weakest node's shifted strength vanishes. Coarse (macro) structure is
/// only reachable near it.
pub fn afg_floor(g: &Graph) -> f64 {
    -AFG_FLOOR_FRACTION * g.min_strength()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    Rb,
    Afg,
    So,
    Rn,
    Lfk,
    Hlslw,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 6] = [
        CriterionKind::Rb,
        CriterionKind::Afg,
        CriterionKind::So,
        CriterionKind::Rn,
        CriterionKind::Lfk,
        CriterionKind::Hlslw,
    ];

    pub fn global(self) -> Option<GlobalKind> {
        match self {
            CriterionKind::Rb => Some(GlobalKind::Rb),
            CriterionKind::Afg => Some(GlobalKind::Afg),
            CriterionKind::So => Some(GlobalKind::So),
            CriterionKind::Rn => Some(GlobalKind::Rn),
            CriterionKind::Lfk | CriterionKind::Hlslw => None,
        }
    }

    pub fn local(self) -> Option<LocalKind> {
        match self {
            CriterionKind::Lfk => Some(LocalKind::Lfk),
            CriterionKind::Hlslw => Some(LocalKind::Hlslw),
            _ => None,
        }
    }

    /// Whether larger parameter values give finer communities; stability
    /// is the only criterion that works the other way round.
    pub fn descending(self) -> bool {
        self != CriterionKind::So
    }

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Rb => "rb",
            CriterionKind::Afg => "afg",
            CriterionKind::So => "so",
            CriterionKind::Rn => "rn",
            CriterionKind::Lfk => "lfk",
            CriterionKind::Hlslw => "hlslw",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::Argument(format!("unknown criterion `{s}` (expected rb, afg, so, rn, lfk or hlslw)")))
    }
}

/// `X` logarithmically spaced values from `a` down to `min_value`, denser
/// near the low end: `min + (a - min)(1 - ln i / ln X)` for `i = 1..=X`.
pub fn sample_scales_between(min_value: f64, a: f64, x: usize) -> Result<Vec<f64>> {
    if x < 2 {
        return Err(Error::Argument(format!("X must be at least 2, got {x}")));
    }
    if !a.is_finite() || !min_value.is_finite() || a <= min_value {
        return Err(Error::Argument(format!("need min_value < A, got min_value = {min_value}, A = {a}")));
    }
    let lx = math::ln(x as f64);
    let span = a - min_value;
    Ok((1..=x)
        .map(|i| {
            if i == x {
                min_value
            } else {
                min_value + span * (1.0 - math::ln(i as f64) / lx)
            }
        })
        .collect())
}

/// [`sample_scales_between`] with a lower end of 0.
pub fn sample_scales(a: f64, x: usize) -> Result<Vec<f64>> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::Argument(format!("A must be > 0, got {a}")));
    }
    sample_scales_between(0.0, a, x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePlan {
    pub kind: CriterionKind,
    pub a: f64,
    pub x: usize,
    pub min_value: f64,
}

impl ScalePlan {
    /// Plan with the default lower end: 0, or [`LOCAL_MIN_VALUE`] for local
    /// criteria.
    pub fn new(kind: CriterionKind, a: f64, x: usize) -> Result<Self> {
        let min_value = if kind.local().is_some() { LOCAL_MIN_VALUE } else { 0.0 };
        ScalePlan { kind, a, x, min_value }.checked()
    }

    pub fn with_min_value(self, min_value: f64) -> Result<Self> {
        ScalePlan { min_value, ..self }.checked()
    }

    fn checked(self) -> Result<Self> {
        sample_scales_between(self.min_value, self.a, self.x)?;
        if self.kind.local().is_some() && (self.min_value.is_nan() || self.min_value <= 0.0) {
            return Err(Error::Argument(format!(
                "local criteria need min_value > 0 (alpha must stay positive), got {}",
                self.min_value
            )));
        }
        if matches!(self.kind, CriterionKind::Rb | CriterionKind::Rn | CriterionKind::So) && self.min_value < 0.0 {
            return Err(Error::Argument(format!("{} scales must be >= 0, got min_value {}", self.kind, self.min_value)));
        }
        Ok(self)
    }

    /// Values in sampled order (descending).
    pub fn values(&self) -> Vec<f64> {
        sample_scales_between(self.min_value, self.a, self.x).expect("plan validated on construction")
    }

    /// Indices into [`ScalePlan::values`] in execution order, from fine to
    /// coarse.
    pub fn execution_order(&self) -> Vec<usize> {
        if self.kind.descending() {
            (0..self.x).collect()
        } else {
            (0..self.x).rev().collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    /// Walk-network threshold (stability only).
    pub tau: f64,
    pub seed: u64,
    pub global: GlobalOptions,
    pub local: LocalOptions,
    /// Ground-truth community sets to score every scale against.
    pub truths: Vec<Cover>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            tau: DEFAULT_TAU,
            seed: 0,
            global: GlobalOptions::default(),
            local: LocalOptions::default(),
            truths: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleRecord {
    pub param: f64,
    pub cover: Cover,
    pub quality: f64,
    /// Single-node moves made at this scale (global criteria only).
    pub node_moves: Option<usize>,
}

impl ScaleRecord {
    pub fn community_count(&self) -> usize {
        self.cover.len()
    }
}

/// Per-scale results in sampled order with the relevance series aligned
/// to them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub kind: CriterionKind,
    pub records: Vec<ScaleRecord>,
    /// NMI with the previous record; 1 for the first.
    pub nmi_prev: Vec<f64>,
    pub nmi_w3: Vec<f64>,
    pub nmi_w5: Vec<f64>,
    /// One series per ground truth.
    pub nmi_truth: Vec<Vec<f64>>,
}

impl SweepReport {
    pub fn truth_names(&self) -> Vec<String> {
        (1..=self.nmi_truth.len()).map(|k| format!("nmi_truth_{k}")).collect()
    }
}

/// Runs the plan from fine to coarse and reports in sampled order.
pub fn sweep(g: &Graph, plan: &ScalePlan, opts: &SweepOptions) -> Result<SweepReport> {
    let plan = plan.checked()?;
    for t in &opts.truths {
        if t.node_count() != g.node_count() {
            return Err(Error::Argument(format!(
                "ground truth covers {} nodes, graph has {}",
                t.node_count(),
                g.node_count()
            )));
        }
    }
    let values = plan.values();
    let order = plan.execution_order();
    let params: Vec<f64> = order.iter().map(|&i| values[i]).collect();

    let executed: Vec<ScaleRecord> = if let Some(kind) = plan.kind.global() {
        detect_global(g, kind, &params, opts.tau, opts.seed, &opts.global)?
            .into_iter()
            .map(|r| ScaleRecord {
                param: r.param,
                cover: Cover::from_partition(&r.partition),
                quality: r.quality,
                node_moves: Some(r.node_moves),
            })
            .collect()
    } else {
        let kind = plan.kind.local().expect("every kind is global or local");
        detect_local(g, kind, &params, &opts.local)?
            .into_iter()
            .map(|r| ScaleRecord {
                param: r.param,
                cover: r.cover,
                quality: r.quality,
                node_moves: None,
            })
            .collect()
    };

    let mut slots: Vec<Option<ScaleRecord>> = (0..values.len()).map(|_| None).collect();
    for (rec, &i) in executed.into_iter().zip(&order) {
        slots[i] = Some(rec);
    }
    let records: Vec<ScaleRecord> = slots.into_iter().map(|r| r.expect("every index executed once")).collect();

    let pairs = records
        .windows(2)
        .map(|w| nmi(&w[0].cover, &w[1].cover))
        .collect::<Result<Vec<_>>>()?;
    let nmi_prev = windowed_from_pairs(&pairs, 2)?;
    let nmi_w3 = windowed_from_pairs(&pairs, 3)?;
    let nmi_w5 = windowed_from_pairs(&pairs, 5)?;
    let nmi_truth = opts
        .truths
        .iter()
        .map(|t| {
            records
                .iter()
                .map(|r| if r.cover.is_empty() { Ok(0.0) } else { nmi(&r.cover, t) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        kind: plan.kind,
        records,
        nmi_prev,
        nmi_w3,
        nmi_w5,
        nmi_truth,
    })
}
