//! The functional view of a cooperative repair scheme.
//!
//! Every code in this crate is linear in the message vector, so each stored
//! symbol and each transmitted repair symbol is a linear functional of the
//! `B` message symbols. [`LinearRepairScheme`] exposes those functionals per
//! repair context; the eavesdropper, lemma and stability machinery only ever
//! look at codes through this trait.

use crate::entropy::ObservationSet;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Mat;
use crate::params::{enumerate_contexts, CodeParams, NodeId, RepairContext};

pub trait LinearRepairScheme: Sync {
    fn params(&self) -> &CodeParams;

    fn field(&self) -> &Field;

    /// Short name used in reports.
    fn name(&self) -> &str;

    /// The `α` functionals stored on `node`.
    fn storage_observations(&self, node: NodeId) -> Result<ObservationSet>;

    /// The `β` functionals `helper` sends to `failed` under `ctx`.
    fn repair_observations(&self, ctx: &RepairContext, helper: NodeId, failed: NodeId) -> Result<ObservationSet>;

    /// The `β′` functionals group member `from` sends to `to` under `ctx`.
    fn exchange_observations(&self, ctx: &RepairContext, from: NodeId, to: NodeId) -> Result<ObservationSet>;

    /// Every context this scheme defines a repair for, restricted to groups
    /// containing `member` when given.
    fn contexts(&self, member: Option<NodeId>) -> Vec<RepairContext> {
        enumerate_contexts(self.params(), member)
    }

    /// All repair downloads of `node` across every context it can be repaired in.
    fn downloads(&self, node: NodeId) -> Result<ObservationSet> {
        let mut out = ObservationSet::empty(self.field(), self.params().file_size);
        for ctx in self.contexts(Some(node)) {
            for &h in ctx.helpers() {
                out.extend_dedup(&self.repair_observations(&ctx, h, node)?)?;
            }
            for &c in ctx.group() {
                if c != node {
                    out.extend_dedup(&self.exchange_observations(&ctx, c, node)?)?;
                }
            }
        }
        Ok(out)
    }

    /// Everything `helper` ever sends to `failed`, over all contexts.
    ///
    /// For a stable scheme this is exactly `β` functionals.
    fn repair_data(&self, helper: NodeId, failed: NodeId) -> Result<ObservationSet> {
        if helper == failed {
            return Err(Error::SelfRepair(helper));
        }
        let mut out = ObservationSet::empty(self.field(), self.params().file_size);
        for ctx in self.contexts(Some(failed)) {
            if ctx.helpers().contains(&helper) {
                out.extend_dedup(&self.repair_observations(&ctx, helper, failed)?)?;
            }
        }
        Ok(out)
    }
}

/// Two contexts in which the same helper sends different functionals to the
/// same failed node.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityWitness {
    pub helper: NodeId,
    pub failed: NodeId,
    pub first_context: RepairContext,
    pub first: Mat,
    pub second_context: RepairContext,
    pub second: Mat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityVerdict {
    Stable { contexts: usize, transfers: usize },
    Unstable(Box<StabilityWitness>),
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::Stable { .. })
    }
}

/// Checks that the repair functional from each helper to each failed node is
/// the same in every context containing both.
pub fn stability_certificate<S: LinearRepairScheme + ?Sized>(scheme: &S) -> Result<StabilityVerdict> {
    let n = scheme.params().n;
    let mut seen: Vec<Option<(RepairContext, Mat)>> = vec![None; (n + 1) * (n + 1)];
    let contexts = scheme.contexts(None);
    let mut transfers = 0;
    for ctx in &contexts {
        for &f in ctx.group() {
            for &h in ctx.helpers() {
                let rows = match scheme.repair_observations(ctx, h, f) {
                    Ok(o) => o.rows().clone(),
                    Err(Error::Unsupported(_)) => continue,
                    Err(e) => return Err(e),
                };
                transfers += 1;
                let slot = &mut seen[h * (n + 1) + f];
                match slot {
                    None => *slot = Some((ctx.clone(), rows)),
                    Some((first_ctx, first)) => {
                        if *first != rows {
                            return Ok(StabilityVerdict::Unstable(Box::new(StabilityWitness {
                                helper: h,
                                failed: f,
                                first_context: first_ctx.clone(),
                                first: first.clone(),
                                second_context: ctx.clone(),
                                second: rows,
                            })));
                        }
                    }
                }
            }
        }
    }
    Ok(StabilityVerdict::Stable { contexts: contexts.len(), transfers })
}
