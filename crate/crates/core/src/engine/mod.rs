//! Greatest-fixpoint iteration of the composed relation operators.
//!
//! Three operators share one shape, `(γ × ζ)^* ∘ lift(Lₙ) ∘ … ∘ lift(L₁)`,
//! walking the type stack from the innermost layer outwards:
//!
//! * linear-time behaviour: polynomial layers use `Rel(F)`, branching layers
//!   use the extension lifting on the system side only;
//! * common trace: branching layers use the double extension lifting;
//! * bisimilarity (Bool): branching layers use the Egli-Milner lifting.
//!
//! Iteration starts from the top relation and is truncated at ω.

mod consistency;

use std::collections::{HashMap, HashSet};

use crate::branching::BranchVal;
use crate::error::{Error, Result};
use crate::lifting::{lift_double_extension, lift_egli_milner, lift_extension, lift_poly_on};
use crate::polyfunctor::{for_each_leaf, PolyTerm, StateId, DEFAULT_ENUM_CAP};
use crate::relation::{first_violation, max_gap, reindex, ValRel};
use crate::semiring::{self, ExtNat, SemiringKind, SemiringValue};
use crate::system::{linear_part, Layer, SpecSystem, System};

pub use consistency::check_monad_consistency;

/// A relation between the states of two coalgebras.
pub type StateRel = ValRel<StateId, StateId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Behaviour,
    Common,
    Bisimulation,
}

/// One application of the behaviour, common-trace or bisimulation operator,
/// with the carriers of every intermediate lifted relation precomputed.
#[derive(Debug, Clone)]
pub struct Operator {
    mode: Mode,
    kind: SemiringKind,
    layers: Vec<Layer>,
    /// `left[i]`: distinct values occurring below the first `i` layers.
    left: Vec<Vec<PolyTerm>>,
    right: Vec<Vec<PolyTerm>>,
    /// Right-hand level paired with each left level.
    right_level: Vec<usize>,
    left_states: Vec<StateId>,
    right_states: Vec<StateId>,
    left_top: HashMap<StateId, PolyTerm>,
    right_top: HashMap<StateId, PolyTerm>,
}

fn occurring_levels(layers: &[Layer], tops: &[PolyTerm], states: &[StateId]) -> Result<Vec<Vec<PolyTerm>>> {
    let mut levels = Vec::with_capacity(layers.len() + 1);
    let mut current = dedup(tops.iter().cloned());
    for layer in layers {
        let mut next = Vec::new();
        for t in &current {
            match layer {
                Layer::Poly(e) => for_each_leaf(e, t, &mut |l| next.push(l.clone()))?,
                Layer::Branch => match t {
                    PolyTerm::Branch(b) => next.extend(b.keys().cloned()),
                    other => return Err(Error::Type(format!("expected a branching value, found `{other}`"))),
                },
            }
        }
        levels.push(current);
        current = dedup(next);
    }
    // innermost level: every state, so the iterate can be read off directly
    levels.push(states.iter().cloned().map(PolyTerm::StateRef).collect());
    Ok(levels)
}

fn dedup(terms: impl IntoIterator<Item = PolyTerm>) -> Vec<PolyTerm> {
    let mut seen = HashSet::new();
    terms.into_iter().filter(|t| seen.insert(t.clone())).collect()
}

fn branch_values(terms: &[PolyTerm]) -> Vec<BranchVal> {
    terms
        .iter()
        .map(|t| match t {
            PolyTerm::Branch(b) => b.clone(),
            _ => unreachable!("levels under a branching layer hold branching values"),
        })
        .collect()
}

impl Operator {
    fn build(mode: Mode, left: &System, right: &System, right_layers: &[Layer], cap: usize) -> Result<Self> {
        let layers = left.stack().layers.clone();
        let left_top: Vec<PolyTerm> = left.transitions().map(|(_, t)| t.clone()).collect();
        let right_top: Vec<PolyTerm> = right.transitions().map(|(_, t)| t.clone()).collect();
        let top_map = |s: &System| -> HashMap<StateId, PolyTerm> { s.transitions().map(|(c, t)| (c.clone(), t.clone())).collect() };
        let left_levels = occurring_levels(&layers, &left_top, left.states())?;
        let right_levels = occurring_levels(right_layers, &right_top, right.states())?;

        let mut right_level = Vec::with_capacity(layers.len() + 1);
        let mut j = 0;
        right_level.push(0);
        for layer in &layers {
            if mode != Mode::Behaviour || !matches!(layer, Layer::Branch) {
                j += 1;
            }
            right_level.push(j);
        }

        for (i, rows) in left_levels.iter().enumerate() {
            let cols = &right_levels[right_level[i]];
            let count = rows.len() as u128 * cols.len() as u128;
            if count > cap as u128 {
                return Err(Error::CombinatorialLimit { count, cap });
            }
        }

        Ok(Operator {
            mode,
            kind: left.kind(),
            layers,
            left: left_levels,
            right: right_levels,
            right_level,
            left_states: left.states().to_vec(),
            right_states: right.states().to_vec(),
            left_top: top_map(left),
            right_top: top_map(right),
        })
    }

    /// Linear-time behaviour operator of `sys` against `spec`.
    pub fn behaviour(sys: &System, spec: &SpecSystem, cap: usize) -> Result<Self> {
        let linear = linear_part(sys.stack())?;
        if spec.stack().layers != linear.layers {
            return Err(Error::StackMismatch(format!(
                "specification stack {} is not the linear part {} of the system stack",
                spec.stack(),
                linear
            )));
        }
        Self::build(Mode::Behaviour, sys, spec, &spec.stack().layers, cap)
    }

    /// Common-trace operator over two systems of the same stack.
    pub fn common_trace(a: &System, b: &System, cap: usize) -> Result<Self> {
        if a.stack() != b.stack() {
            return Err(Error::StackMismatch(format!("{} vs {}", a.stack(), b.stack())));
        }
        Self::build(Mode::Common, a, b, &b.stack().layers, cap)
    }

    /// Bisimulation operator over two boolean systems of the same stack.
    pub fn bisimulation(a: &System, b: &System, cap: usize) -> Result<Self> {
        for s in [a, b] {
            if s.kind() != SemiringKind::Bool {
                return Err(Error::kind_mismatch(SemiringKind::Bool, s.kind()));
            }
        }
        if a.stack() != b.stack() {
            return Err(Error::StackMismatch(format!("{} vs {}", a.stack(), b.stack())));
        }
        Self::build(Mode::Bisimulation, a, b, &b.stack().layers, cap)
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn top(&self) -> Result<StateRel> {
        ValRel::top(self.kind, self.left_states.clone(), self.right_states.clone())
    }

    /// Apply the operator once.
    pub fn apply(&self, rel: &StateRel) -> Result<StateRel> {
        if rel.kind() != self.kind {
            return Err(Error::kind_mismatch(self.kind, rel.kind()));
        }
        if rel.rows() != self.left_states.as_slice() || rel.cols() != self.right_states.as_slice() {
            return Err(Error::CarrierMismatch("relation is not over the operator's state sets".into()));
        }
        let mut lifted = rel.map_keys(|c| PolyTerm::StateRef(c.clone()), |z| PolyTerm::StateRef(z.clone()))?;
        for i in (0..self.layers.len()).rev() {
            let rows = &self.left[i];
            let cols = &self.right[self.right_level[i]];
            lifted = match &self.layers[i] {
                Layer::Poly(e) => lift_poly_on(e, &lifted, rows.clone(), cols.clone())?,
                Layer::Branch => match self.mode {
                    Mode::Behaviour => lift_extension(&lifted, &branch_values(rows))?,
                    Mode::Common => lift_double_extension(&lifted, &branch_values(rows), &branch_values(cols))?,
                    Mode::Bisimulation => lift_egli_milner(&lifted, &branch_values(rows), &branch_values(cols))?,
                },
            };
        }
        reindex(
            self.left_states.clone(),
            self.right_states.clone(),
            |c| self.left_top[c].clone(),
            |z| self.right_top[z].clone(),
            &lifted,
        )
    }

    /// The `d`-th iterate from the top relation.
    pub fn iterate(&self, d: usize) -> Result<StateRel> {
        let mut r = self.top()?;
        for _ in 0..d {
            r = self.apply(&r)?;
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixpointOptions {
    /// Defaults to `10·|C|·|Z| + 10`.
    pub max_iterations: Option<usize>,
    /// Convergence tolerance for Prob iterates.
    pub tolerance: f64,
    /// Stop early once every entry is strictly below this value.
    pub threshold: Option<SemiringValue>,
    /// Tropical entries above this cost that are still moving are reported
    /// as diverging.
    pub divergence_cap: u64,
    /// Bound on the size of any materialised lifted relation.
    pub enum_cap: usize,
}

impl Default for FixpointOptions {
    fn default() -> Self {
        FixpointOptions {
            max_iterations: None,
            tolerance: 1e-9,
            threshold: None,
            divergence_cap: 1_000_000,
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }
}

impl FixpointOptions {
    fn validate(&self, kind: SemiringKind) -> Result<()> {
        if self.max_iterations == Some(0) {
            return Err(Error::Validation("max_iterations must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::Validation(format!("tolerance {} must be nonnegative", self.tolerance)));
        }
        if let Some(t) = self.threshold {
            if t.kind() != kind {
                return Err(Error::kind_mismatch(kind, t.kind()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// A tropical entry kept growing past the divergence cap.
    Diverged,
    /// Every entry fell strictly below the threshold.
    BelowThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixpointReport {
    /// Last iterate. For Prob this over-approximates the greatest fixpoint.
    pub result: StateRel,
    pub iterations: usize,
    pub converged: bool,
    /// Gap between the last two iterates.
    pub final_gap: f64,
    pub stop: StopReason,
}

fn settled(kind: SemiringKind, gap: f64, tolerance: f64) -> bool {
    match kind {
        SemiringKind::Prob => gap <= tolerance,
        _ => gap == 0.0,
    }
}

fn diverging(rel: &StateRel, gap: f64, cap: u64) -> bool {
    gap > 0.0
        && rel
            .entries()
            .any(|(_, _, v)| matches!(v, SemiringValue::Tropical(ExtNat::Fin(n)) if n > cap))
}

fn below_threshold(rel: &StateRel, threshold: SemiringValue) -> Result<bool> {
    for (_, _, v) in rel.entries() {
        if semiring::leq(threshold, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Iterate `op` from the top relation until the iterates settle.
pub fn greatest_fixpoint(op: &Operator, opts: &FixpointOptions) -> Result<FixpointReport> {
    opts.validate(op.kind())?;
    let mut current = op.top()?;
    let max = opts
        .max_iterations
        .unwrap_or(10 * op.left_states.len() * op.right_states.len() + 10);
    let mut gap = 0.0;
    for i in 1..=max {
        let next = op.apply(&current)?;
        if let Some((r, c)) = first_violation(&next, &current)? {
            return Err(Error::MonotonicityViolation { iteration: i, row: r.to_string(), col: c.to_string() });
        }
        gap = max_gap(&next, &current)?;
        current = next;
        let stop = if settled(op.kind(), gap, opts.tolerance) {
            Some(StopReason::Converged)
        } else if op.kind() == SemiringKind::Tropical && diverging(&current, gap, opts.divergence_cap) {
            Some(StopReason::Diverged)
        } else {
            match opts.threshold {
                Some(t) if below_threshold(&current, t)? => Some(StopReason::BelowThreshold),
                _ => None,
            }
        };
        if let Some(stop) = stop {
            return Ok(FixpointReport {
                result: current,
                iterations: i,
                converged: stop == StopReason::Converged,
                final_gap: gap,
                stop,
            });
        }
    }
    Ok(FixpointReport { result: current, iterations: max, converged: false, final_gap: gap, stop: StopReason::MaxIterations })
}

/// One application of the behaviour operator to `rel`.
pub fn step_operator(sys: &System, spec: &SpecSystem, rel: &StateRel) -> Result<StateRel> {
    Operator::behaviour(sys, spec, DEFAULT_ENUM_CAP)?.apply(rel)
}

/// Linear-time behaviour of every system state against every spec state.
pub fn behaviour(sys: &System, spec: &SpecSystem, opts: &FixpointOptions) -> Result<FixpointReport> {
    greatest_fixpoint(&Operator::behaviour(sys, spec, opts.enum_cap)?, opts)
}

/// Extent to which pairs of states share a maximal trace.
pub fn common_trace(a: &System, b: &System, opts: &FixpointOptions) -> Result<FixpointReport> {
    greatest_fixpoint(&Operator::common_trace(a, b, opts.enum_cap)?, opts)
}

/// Bisimilarity between two boolean systems.
pub fn bisimilarity(a: &System, b: &System) -> Result<FixpointReport> {
    bisimilarity_with(a, b, &FixpointOptions::default())
}

pub fn bisimilarity_with(a: &System, b: &System, opts: &FixpointOptions) -> Result<FixpointReport> {
    greatest_fixpoint(&Operator::bisimulation(a, b, opts.enum_cap)?, opts)
}
