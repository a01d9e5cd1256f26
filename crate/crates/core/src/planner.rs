//! Detector planning: how many detectors meet a target detection rate, how to
//! position them, and what is certified about the answer.

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::colgen::{refine_with, ColgenOptions, RefinementRecord};
use crate::covers::{CoverMode, CoverSummary};
use crate::decomp::equilibrium_attack;
use crate::error::{Error, Result};
use crate::game::{regime, GameParams, Regime};
use crate::model::{DetectionModel, IndexSet};
use crate::strategies::{cyclic_strategy, MixedStrategy, Rational, Side};
use crate::target::Alpha;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeWarning {
    /// `b1 >= n*`.
    TrivialGame,
    /// `b2 = m*`.
    BoundaryAttack,
    /// `b2 > m*`.
    LargeAttack,
}

impl RegimeWarning {
    pub fn message(self) -> &'static str {
        match self {
            RegimeWarning::TrivialGame => "complete monitoring (trivial game): b1 >= n*, every attack is detected",
            RegimeWarning::BoundaryAttack => {
                "b2 = m*: boundary case; the equilibrium guarantees still hold except that \
                 equilibrium inspection need not monitor every component"
            }
            RegimeWarning::LargeAttack => {
                "b2 > m*: equilibrium structure results do not apply; only the b1/n* \
                 detection-rate floor of the inspection strategy is guaranteed"
            }
        }
    }
}

pub fn regime_diagnostics(params: GameParams, n_star: usize, m_star: usize) -> Vec<RegimeWarning> {
    let mut out = Vec::new();
    if params.b1 >= n_star {
        out.push(RegimeWarning::TrivialGame);
    }
    if params.b2 == m_star {
        out.push(RegimeWarning::BoundaryAttack);
    } else if params.b2 > m_star {
        out.push(RegimeWarning::LargeAttack);
    }
    out
}

/// Closed-form certificates of the cover-based plan, exact in rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanCertificates {
    /// `⌈α |S'|⌉`.
    pub b1: usize,
    /// `⌈α |T'|⌉`: no plan with fewer detectors can meet `α`.
    pub b1_lower: usize,
    pub gap: usize,
    /// `b1 b2 (1/max{b1,|T'|} − 1/|S'|)`.
    pub epsilon: Rational,
    /// `1 − max{b1,|T'|}/|S'|`, at least zero.
    pub relative_loss_bound: Rational,
    /// Worst-case detection rate `min(b1/|S'|, 1)` of the cyclic plan.
    pub guaranteed_rate: Rational,
}

/// Certificates from the cover size `s`, packing size `t`, target and attack
/// budget alone.
pub fn plan_certificates(s: usize, t: usize, alpha: Alpha, b2: usize) -> Result<PlanCertificates> {
    if s == 0 || t == 0 {
        return Err(Error::CoverSize(format!("|S'| = {s}, |T'| = {t}")));
    }
    let b1 = alpha.ceil_times(s);
    let b1_lower = alpha.ceil_times(t);
    let top = Rational::from_integer(b1.max(t) as i64);
    let sr = Rational::from_integer(s as i64);
    let b1r = Rational::from_integer(b1 as i64);
    let epsilon = b1r * Rational::from_integer(b2 as i64) * (top.recip() - sr.recip());
    let loss = Rational::one() - top / sr;
    Ok(PlanCertificates {
        b1,
        b1_lower,
        gap: b1.saturating_sub(b1_lower),
        epsilon: epsilon.max(Rational::zero()),
        relative_loss_bound: loss.max(Rational::zero()),
        guaranteed_rate: (b1r / sr).min(Rational::one()),
    })
}

#[derive(Clone, Debug)]
pub struct RefinedPlan {
    pub b1: usize,
    pub rate: f64,
    pub sigma1: MixedStrategy,
    /// Equilibrium attack for the plan's `b2`; only built when `b2 < m*`.
    pub sigma2: Option<MixedStrategy>,
    pub records: Vec<RefinementRecord>,
}

#[derive(Clone, Debug)]
pub struct PlanReport {
    pub alpha: Alpha,
    pub b2: usize,
    pub cover_mode: CoverMode,
    pub covers: CoverSummary,
    pub certificates: PlanCertificates,
    /// False when `b2 > m*`: only the rate floor is claimed then.
    pub claims_valid: bool,
    pub regime: Regime,
    pub warnings: Vec<RegimeWarning>,
    pub sigma1: MixedStrategy,
    pub sigma2: MixedStrategy,
    pub refined: Option<RefinedPlan>,
}

impl PlanReport {
    pub fn b1(&self) -> usize {
        self.certificates.b1
    }

    pub fn gap(&self) -> Option<usize> {
        self.claims_valid.then_some(self.certificates.gap)
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.claims_valid.then(|| self.certificates.epsilon.to_f64().unwrap_or(f64::NAN))
    }

    pub fn relative_loss_bound(&self) -> Option<f64> {
        self.claims_valid.then(|| self.certificates.relative_loss_bound.to_f64().unwrap_or(f64::NAN))
    }
}

fn check_b2(model: &DetectionModel, b2: usize) -> Result<()> {
    if b2 == 0 || b2 > model.component_count() {
        return Err(Error::Budget(format!(
            "b2 must lie in [1, {}], got {b2}",
            model.component_count()
        )));
    }
    Ok(())
}

/// Attack base for the cyclic plan: the packing, padded with the remaining
/// components in index order when `b2` exceeds it.
fn attack_base(covers: &CoverSummary, b2: usize, components: usize) -> Vec<usize> {
    let mut base: Vec<usize> = covers.packing.iter().collect();
    if b2 > base.len() {
        base.extend((0..components).filter(|e| !covers.packing.contains(*e)).take(b2 - base.len()));
    }
    base
}

/// Cover-based plan: `⌈α|S'|⌉` detectors on the cyclic strategy over the
/// cover `S'`, against the cyclic attack over the packing `T'`.
pub fn plan_approx(model: &DetectionModel, alpha: Alpha, b2: usize, cover_mode: CoverMode) -> Result<PlanReport> {
    check_b2(model, b2)?;
    let covers = CoverSummary::compute(model, cover_mode)?;
    plan_from_covers(model, alpha, b2, cover_mode, covers)
}

fn plan_from_covers(
    model: &DetectionModel,
    alpha: Alpha,
    b2: usize,
    cover_mode: CoverMode,
    covers: CoverSummary,
) -> Result<PlanReport> {
    let certificates = plan_certificates(covers.n_star, covers.m_star, alpha, b2)?;
    let b1 = certificates.b1;
    let sigma1 = if b1 == 0 {
        MixedStrategy::pure(Side::Defender, 0, IndexSet::empty())?
    } else {
        cyclic_strategy(Side::Defender, covers.cover.as_slice(), b1)?.to_f64()
    };
    let base = attack_base(&covers, b2, model.component_count());
    let sigma2 = cyclic_strategy(Side::Attacker, &base, b2)?.to_f64();
    let params = GameParams::new(b1, b2);
    Ok(PlanReport {
        alpha,
        b2,
        cover_mode,
        claims_valid: b2 <= covers.m_star,
        regime: regime(params, covers.n_star, covers.m_star),
        warnings: regime_diagnostics(params, covers.n_star, covers.m_star),
        certificates,
        covers,
        sigma1,
        sigma2,
        refined: None,
    })
}

/// Cover-based plan followed by the column-generation refinement, which finds
/// the fewest detectors whose equilibrium rate meets `α`.
pub fn plan_exact(model: &DetectionModel, alpha: Alpha, b2: usize, tol: f64, opts: ColgenOptions) -> Result<PlanReport> {
    check_b2(model, b2)?;
    let covers = CoverSummary::compute(model, CoverMode::Exact)?;
    let mut report = plan_from_covers(model, alpha, b2, CoverMode::Exact, covers.clone())?;
    let outcome = refine_with(model, alpha, b2, tol, opts, covers)?;
    let selected = outcome
        .selected()
        .cloned()
        .ok_or_else(|| Error::Numerical("refinement selected no detector count".into()))?;
    let sigma2 = if b2 < outcome.covers.m_star {
        Some(equilibrium_attack(
            model,
            &selected.duals,
            selected.b1,
            b2,
            outcome.covers.m_star,
        )?)
    } else {
        None
    };
    report.refined = Some(RefinedPlan {
        b1: selected.b1,
        rate: selected.rate,
        sigma1: selected.sigma1,
        sigma2,
        records: outcome.records,
    });
    Ok(report)
}
