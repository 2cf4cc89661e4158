//! Genus-labelled surfaces, simple 2+1 cobordisms, chains of them, and Cerf
//! moves as a rewrite system on chains.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{a, b, AlgebraError, SurfaceAutomorphism, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BordObject {
    Empty,
    Surface(usize),
}

impl fmt::Display for BordObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BordObject::Empty => write!(f, "∅"),
            BordObject::Surface(g) => write!(f, "Σ{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BordismError {
    #[error("boundary mismatch: {left} vs {right}")]
    BoundaryMismatch { left: BordObject, right: BordObject },
    #[error("invalid chain at step {step}: {reason}")]
    InvalidChain { step: usize, reason: String },
    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),
    #[error("attaching circle must live on genus >= 1 and be homologically nontrivial")]
    BadCircle,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The circle ψ(a₁) on Σ_g, remembered through ψ so that the quotient surface
/// inherits the basis (ψ(a_i), ψ(b_i))_{i≥2}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttachingCircle {
    psi: SurfaceAutomorphism,
}

impl AttachingCircle {
    pub fn new(psi: SurfaceAutomorphism) -> Result<Self, BordismError> {
        if psi.genus() == 0 {
            return Err(BordismError::BadCircle);
        }
        let c = AttachingCircle { psi };
        if c.word().abelianization().iter().all(|&x| x == 0) {
            return Err(BordismError::BadCircle);
        }
        Ok(c)
    }

    pub fn canonical(genus: usize) -> Self {
        AttachingCircle::new(SurfaceAutomorphism::identity(genus)).expect("a1 is nontrivial")
    }

    pub fn genus(&self) -> usize {
        self.psi.genus()
    }

    pub fn transport(&self) -> &SurfaceAutomorphism {
        &self.psi
    }

    pub fn word(&self) -> Word {
        self.psi.images()[0].clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimpleCobordism {
    Cyl(SurfaceAutomorphism),
    Attach2(AttachingCircle),
    Attach1(AttachingCircle),
    Cap3,
    Cap0,
}

impl SimpleCobordism {
    pub fn source(&self) -> BordObject {
        match self {
            SimpleCobordism::Cyl(phi) => BordObject::Surface(phi.genus()),
            SimpleCobordism::Attach2(c) => BordObject::Surface(c.genus()),
            SimpleCobordism::Attach1(c) => BordObject::Surface(c.genus() - 1),
            SimpleCobordism::Cap3 => BordObject::Surface(0),
            SimpleCobordism::Cap0 => BordObject::Empty,
        }
    }

    pub fn target(&self) -> BordObject {
        match self {
            SimpleCobordism::Cyl(phi) => BordObject::Surface(phi.genus()),
            SimpleCobordism::Attach2(c) => BordObject::Surface(c.genus() - 1),
            SimpleCobordism::Attach1(c) => BordObject::Surface(c.genus()),
            SimpleCobordism::Cap3 => BordObject::Empty,
            SimpleCobordism::Cap0 => BordObject::Surface(0),
        }
    }

    pub fn cyl(phi: SurfaceAutomorphism) -> Self {
        SimpleCobordism::Cyl(phi)
    }

    pub fn attach2(psi: SurfaceAutomorphism) -> Result<Self, BordismError> {
        Ok(SimpleCobordism::Attach2(AttachingCircle::new(psi)?))
    }

    pub fn attach1(psi: SurfaceAutomorphism) -> Result<Self, BordismError> {
        Ok(SimpleCobordism::Attach1(AttachingCircle::new(psi)?))
    }

    pub fn adjoint(&self) -> Self {
        match self {
            SimpleCobordism::Cyl(phi) => SimpleCobordism::Cyl(phi.inverse()),
            SimpleCobordism::Attach2(c) => SimpleCobordism::Attach1(c.clone()),
            SimpleCobordism::Attach1(c) => SimpleCobordism::Attach2(c.clone()),
            SimpleCobordism::Cap3 => SimpleCobordism::Cap0,
            SimpleCobordism::Cap0 => SimpleCobordism::Cap3,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SimpleCobordism::Cyl(_) => "cyl",
            SimpleCobordism::Attach2(_) => "attach2",
            SimpleCobordism::Attach1(_) => "attach1",
            SimpleCobordism::Cap3 => "cap3",
            SimpleCobordism::Cap0 => "cap0",
        }
    }

    pub fn automorphism(&self) -> Option<&SurfaceAutomorphism> {
        match self {
            SimpleCobordism::Cyl(phi) => Some(phi),
            SimpleCobordism::Attach2(c) | SimpleCobordism::Attach1(c) => Some(c.transport()),
            _ => None,
        }
    }

    /// Equality with automorphisms compared in Aut(π₁Σ).
    pub fn surface_eq(&self, other: &SimpleCobordism) -> bool {
        if self.kind_name() != other.kind_name() || self.source() != other.source() {
            return false;
        }
        match (self.automorphism(), other.automorphism()) {
            (Some(x), Some(y)) => x.surface_eq(y),
            (None, None) => true,
            _ => false,
        }
    }

    fn signature(&self) -> (u8, Option<Vec<Vec<i64>>>) {
        let tag = match self {
            SimpleCobordism::Cyl(_) => 0,
            SimpleCobordism::Attach2(_) => 1,
            SimpleCobordism::Attach1(_) => 2,
            SimpleCobordism::Cap3 => 3,
            SimpleCobordism::Cap0 => 4,
        };
        (tag, self.automorphism().map(|p| p.abelian_matrix()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CobordismChain {
    source: BordObject,
    target: BordObject,
    steps: Vec<SimpleCobordism>,
}

impl CobordismChain {
    pub fn new(steps: Vec<SimpleCobordism>) -> Result<Self, BordismError> {
        let Some(first) = steps.first() else {
            return Err(BordismError::InvalidChain {
                step: 0,
                reason: "an empty chain needs an explicit object; use CobordismChain::identity".into(),
            });
        };
        let source = first.source();
        for (i, w) in steps.windows(2).enumerate() {
            if w[0].target() != w[1].source() {
                return Err(BordismError::InvalidChain {
                    step: i + 1,
                    reason: format!("target {} of step {i} differs from source {}", w[0].target(), w[1].source()),
                });
            }
        }
        let target = steps.last().unwrap().target();
        Ok(CobordismChain { source, target, steps })
    }

    pub fn identity(obj: BordObject) -> Self {
        CobordismChain { source: obj, target: obj, steps: Vec::new() }
    }

    pub fn source(&self) -> BordObject {
        self.source
    }

    pub fn target(&self) -> BordObject {
        self.target
    }

    pub fn steps(&self) -> &[SimpleCobordism] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn objects(&self) -> Vec<BordObject> {
        let mut out = vec![self.source];
        out.extend(self.steps.iter().map(|s| s.target()));
        out
    }

    pub fn validate(&self) -> Result<(), BordismError> {
        let mut cur = self.source;
        for (i, s) in self.steps.iter().enumerate() {
            if s.source() != cur {
                return Err(BordismError::InvalidChain {
                    step: i,
                    reason: format!("expected source {cur}, found {}", s.source()),
                });
            }
            cur = s.target();
        }
        if cur != self.target {
            return Err(BordismError::InvalidChain {
                step: self.steps.len(),
                reason: format!("chain ends at {cur}, declared target {}", self.target),
            });
        }
        Ok(())
    }

    pub fn compose(&self, other: &CobordismChain) -> Result<Self, BordismError> {
        if self.target != other.source {
            return Err(BordismError::BoundaryMismatch { left: self.target, right: other.source });
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Ok(CobordismChain { source: self.source, target: other.target, steps })
    }

    pub fn adjoint(&self) -> Self {
        CobordismChain {
            source: self.target,
            target: self.source,
            steps: self.steps.iter().rev().map(SimpleCobordism::adjoint).collect(),
        }
    }

    pub fn surface_eq(&self, other: &CobordismChain) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.steps.len() == other.steps.len()
            && self.steps.iter().zip(&other.steps).all(|(x, y)| x.surface_eq(y))
    }

    fn signature(&self) -> (BordObject, Vec<(u8, Option<Vec<Vec<i64>>>)>) {
        (self.source, self.steps.iter().map(SimpleCobordism::signature).collect())
    }

    fn with_replaced(&self, at: usize, len: usize, new: Vec<SimpleCobordism>) -> Self {
        let mut steps = self.steps[..at].to_vec();
        steps.extend(new);
        steps.extend_from_slice(&self.steps[at + len..]);
        CobordismChain { source: self.source, target: self.target, steps }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    CylMerge,
    CylSplit,
    CylAbsorbPre,
    CylAbsorbPost,
    CritCancel,
    CritCreate,
    CritSwitch,
}

/// A located Cerf move. Absorb moves with `emit = Some(φ)` run in the
/// opposite direction and split a cylinder Cyl(φ) off an attachment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CerfMove {
    /// (Cyl φ, Cyl ψ) → Cyl(ψ∘φ)
    CylMerge { at: usize },
    /// Cyl(φ) → (Cyl(first), Cyl(φ∘first⁻¹))
    CylSplit { at: usize, first: SurfaceAutomorphism },
    /// Cylinder on the higher-genus side of an attachment.
    CylAbsorbPre { at: usize, emit: Option<SurfaceAutomorphism> },
    /// Cylinder on the lower-genus side of an attachment.
    CylAbsorbPost { at: usize, emit: Option<SurfaceAutomorphism> },
    /// (Attach1 α, Attach2 β) → Cyl(φ) for a single-intersection pair.
    CritCancel { at: usize },
    /// Cyl(φ) → (Attach1 α, Attach2 β); the pair must cancel back to φ.
    CritCreate { at: usize, alpha: SurfaceAutomorphism, beta: SurfaceAutomorphism },
    /// Two attachments of the same index trade places. `inverse` selects the
    /// direction of the handle exchange used to rewrite the first circle.
    CritSwitch { at: usize, inverse: bool },
    /// (Attach1 ψ, Attach2 ψ∘H₁₂) ↔ (Attach2 a₁, Attach1 a₁). `transport = Some(ψ)`
    /// runs from right to left.
    CritSwitchMixed { at: usize, transport: Option<SurfaceAutomorphism> },
}

impl CerfMove {
    pub fn kind(&self) -> MoveKind {
        match self {
            CerfMove::CylMerge { .. } => MoveKind::CylMerge,
            CerfMove::CylSplit { .. } => MoveKind::CylSplit,
            CerfMove::CylAbsorbPre { .. } => MoveKind::CylAbsorbPre,
            CerfMove::CylAbsorbPost { .. } => MoveKind::CylAbsorbPost,
            CerfMove::CritCancel { .. } => MoveKind::CritCancel,
            CerfMove::CritCreate { .. } => MoveKind::CritCreate,
            CerfMove::CritSwitch { .. } | CerfMove::CritSwitchMixed { .. } => MoveKind::CritSwitch,
        }
    }

    pub fn position(&self) -> usize {
        match self {
            CerfMove::CylMerge { at }
            | CerfMove::CylSplit { at, .. }
            | CerfMove::CylAbsorbPre { at, .. }
            | CerfMove::CylAbsorbPost { at, .. }
            | CerfMove::CritCancel { at }
            | CerfMove::CritCreate { at, .. }
            | CerfMove::CritSwitch { at, .. }
            | CerfMove::CritSwitchMixed { at, .. } => *at,
        }
    }

    /// Number of steps the move consumes in the chain it applies to.
    pub fn span(&self) -> usize {
        match self {
            CerfMove::CylSplit { .. } | CerfMove::CritCreate { .. } => 1,
            CerfMove::CylAbsorbPre { emit: Some(_), .. } | CerfMove::CylAbsorbPost { emit: Some(_), .. } => 1,
            _ => 2,
        }
    }

    /// Number of steps the move produces.
    pub fn output_span(&self) -> usize {
        match self {
            CerfMove::CylMerge { .. } | CerfMove::CritCancel { .. } => 1,
            CerfMove::CylAbsorbPre { emit: None, .. } | CerfMove::CylAbsorbPost { emit: None, .. } => 1,
            _ => 2,
        }
    }

    pub fn describe(&self) -> String {
        let extra = match self {
            CerfMove::CylAbsorbPre { emit: Some(_), .. } | CerfMove::CylAbsorbPost { emit: Some(_), .. } => " (emit)",
            CerfMove::CritSwitch { inverse: true, .. } => " (inverse)",
            CerfMove::CritSwitchMixed { transport: None, .. } => " (mixed)",
            CerfMove::CritSwitchMixed { transport: Some(_), .. } => " (mixed, reverse)",
            _ => "",
        };
        format!("{:?}@{}{}", self.kind(), self.position(), extra)
    }
}

fn not_applicable<T>(msg: impl Into<String>) -> Result<T, BordismError> {
    Err(BordismError::MoveNotApplicable(msg.into()))
}

fn step_at(c: &CobordismChain, i: usize) -> Result<&SimpleCobordism, BordismError> {
    c.steps.get(i).ok_or_else(|| BordismError::MoveNotApplicable(format!("position {i} is out of range")))
}

/// φ on Σ_{g-1} whose inverse images are kill(χ(x_{j+2})) and whose images
/// are kill(χ⁻¹(x_{j+2})), provided χ(a₁) reduces to b₁^{±1} once a₁ is deleted.
pub fn cancellation_automorphism(chi: &SurfaceAutomorphism) -> Result<SurfaceAutomorphism, BordismError> {
    let g = chi.genus();
    if g == 0 {
        return not_applicable("cancellation needs genus >= 1");
    }
    let w = chi.images()[0].delete_generator(a(1)).cyclically_reduce();
    if w.letters() != [b(1)] && w.letters() != [-b(1)] {
        return not_applicable(format!("the circles do not meet once: chi(a1) = {}", chi.images()[0]));
    }
    let inv = chi.images()[2..].iter().map(Word::kill_first_handle).collect();
    let img = chi.inverse_images()[2..].iter().map(Word::kill_first_handle).collect();
    SurfaceAutomorphism::new(g - 1, img, inv)
        .map_err(|e| BordismError::MoveNotApplicable(format!("induced map is not an automorphism: {e}")))
}

/// ψ₁ ∘ ψ̂₂ ∘ H ∘ ψ̂₂⁻¹ with H the first handle exchange (or its inverse).
fn switched_first(psi1: &SurfaceAutomorphism, psi2: &SurfaceAutomorphism, inverse: bool) -> SurfaceAutomorphism {
    let g = psi1.genus();
    let lifted = psi2.lift();
    let mut h = SurfaceAutomorphism::handle_swap(g, 1);
    if inverse {
        h = h.inverse();
    }
    lifted
        .inverse()
        .compose(&h)
        .and_then(|x| x.compose(&lifted))
        .and_then(|x| x.compose(psi1))
        .expect("same genus")
}

pub fn cerf_apply(c: &CobordismChain, m: &CerfMove) -> Result<CobordismChain, BordismError> {
    use SimpleCobordism::*;
    let at = m.position();
    let out = match m {
        CerfMove::CylMerge { .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Cyl(phi), Cyl(psi)) => c.with_replaced(at, 2, vec![Cyl(phi.compose(psi)?)]),
            _ => return not_applicable("CylMerge needs two cylinders"),
        },
        CerfMove::CylSplit { first, .. } => match step_at(c, at)? {
            Cyl(phi) if phi.genus() == first.genus() => {
                let rest = first.inverse().compose(phi)?;
                c.with_replaced(at, 1, vec![Cyl(first.clone()), Cyl(rest)])
            }
            _ => return not_applicable("CylSplit needs a cylinder of matching genus"),
        },
        CerfMove::CylAbsorbPre { emit: None, .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Cyl(phi), Attach2(circ)) => {
                let psi = circ.transport().compose(&phi.inverse())?;
                c.with_replaced(at, 2, vec![SimpleCobordism::attach2(psi)?])
            }
            (Attach1(circ), Cyl(phi)) => {
                let psi = circ.transport().compose(phi)?;
                c.with_replaced(at, 2, vec![SimpleCobordism::attach1(psi)?])
            }
            _ => return not_applicable("CylAbsorbPre needs (Cyl, Attach2) or (Attach1, Cyl)"),
        },
        CerfMove::CylAbsorbPre { emit: Some(phi), .. } => match step_at(c, at)? {
            Attach2(circ) if circ.genus() == phi.genus() => {
                let psi = circ.transport().compose(phi)?;
                c.with_replaced(at, 1, vec![Cyl(phi.clone()), SimpleCobordism::attach2(psi)?])
            }
            Attach1(circ) if circ.genus() == phi.genus() => {
                let psi = circ.transport().compose(&phi.inverse())?;
                c.with_replaced(at, 1, vec![SimpleCobordism::attach1(psi)?, Cyl(phi.clone())])
            }
            _ => return not_applicable("emitting a cylinder needs an attachment of matching genus"),
        },
        CerfMove::CylAbsorbPost { emit: None, .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Attach2(circ), Cyl(phi)) => {
                let psi = phi.lift().inverse().compose(circ.transport())?;
                c.with_replaced(at, 2, vec![SimpleCobordism::attach2(psi)?])
            }
            (Cyl(phi), Attach1(circ)) => {
                let psi = phi.inverse().lift().inverse().compose(circ.transport())?;
                c.with_replaced(at, 2, vec![SimpleCobordism::attach1(psi)?])
            }
            _ => return not_applicable("CylAbsorbPost needs (Attach2, Cyl) or (Cyl, Attach1)"),
        },
        CerfMove::CylAbsorbPost { emit: Some(phi), .. } => match step_at(c, at)? {
            Attach2(circ) if circ.genus() == phi.genus() + 1 => {
                let psi = phi.lift().compose(circ.transport())?;
                c.with_replaced(at, 1, vec![SimpleCobordism::attach2(psi)?, Cyl(phi.clone())])
            }
            Attach1(circ) if circ.genus() == phi.genus() + 1 => {
                let psi = phi.inverse().lift().compose(circ.transport())?;
                c.with_replaced(at, 1, vec![Cyl(phi.clone()), SimpleCobordism::attach1(psi)?])
            }
            _ => return not_applicable("emitting a cylinder needs an attachment one genus higher"),
        },
        CerfMove::CritCancel { .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Attach1(alpha), Attach2(beta)) => {
                let chi = beta.transport().compose(&alpha.transport().inverse())?;
                let phi = cancellation_automorphism(&chi)?;
                c.with_replaced(at, 2, vec![Cyl(phi)])
            }
            _ => return not_applicable("CritCancel needs (Attach1, Attach2)"),
        },
        CerfMove::CritCreate { alpha, beta, .. } => match step_at(c, at)? {
            Cyl(phi) if alpha.genus() == phi.genus() + 1 && beta.genus() == alpha.genus() => {
                let chi = beta.compose(&alpha.inverse())?;
                let got = cancellation_automorphism(&chi)?;
                if !got.surface_eq(phi) {
                    return not_applicable("the created pair does not cancel to the given cylinder");
                }
                c.with_replaced(
                    at,
                    1,
                    vec![SimpleCobordism::attach1(alpha.clone())?, SimpleCobordism::attach2(beta.clone())?],
                )
            }
            _ => return not_applicable("CritCreate needs a cylinder one genus below the pair"),
        },
        CerfMove::CritSwitch { inverse, .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Attach2(first), Attach2(second)) => {
                let psi1 = switched_first(first.transport(), second.transport(), *inverse);
                c.with_replaced(at, 2, vec![SimpleCobordism::attach2(psi1)?, Attach2(second.clone())])
            }
            (Attach1(lower), Attach1(upper)) => {
                let psi = switched_first(upper.transport(), lower.transport(), *inverse);
                c.with_replaced(at, 2, vec![Attach1(lower.clone()), SimpleCobordism::attach1(psi)?])
            }
            _ => return not_applicable("CritSwitch needs two attachments of the same index"),
        },
        CerfMove::CritSwitchMixed { transport: None, .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Attach1(alpha), Attach2(beta)) if alpha.genus() >= 2 => {
                let g = alpha.genus();
                let chi = beta.transport().compose(&alpha.transport().inverse())?;
                if !chi.surface_eq(&SurfaceAutomorphism::handle_swap(g, 1)) {
                    return not_applicable("the circles are not a transported disjoint pair (a1, a2)");
                }
                c.with_replaced(
                    at,
                    2,
                    vec![Attach2(AttachingCircle::canonical(g - 1)), Attach1(AttachingCircle::canonical(g - 1))],
                )
            }
            _ => return not_applicable("mixed switch needs (Attach1, Attach2) at genus >= 2"),
        },
        CerfMove::CritSwitchMixed { transport: Some(psi), .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Attach2(x), Attach1(y))
                if x.genus() == y.genus()
                    && psi.genus() == x.genus() + 1
                    && x.transport().is_identity()
                    && y.transport().is_identity() =>
            {
                let g = psi.genus();
                let beta = SurfaceAutomorphism::handle_swap(g, 1).compose(psi)?;
                c.with_replaced(
                    at,
                    2,
                    vec![SimpleCobordism::attach1(psi.clone())?, SimpleCobordism::attach2(beta)?],
                )
            }
            _ => return not_applicable("reverse mixed switch needs (Attach2 a1, Attach1 a1)"),
        },
    };
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

/// The move that takes `cerf_apply(c, m)` back to `c`.
pub fn inverse_move(c: &CobordismChain, m: &CerfMove) -> Result<CerfMove, BordismError> {
    use SimpleCobordism::*;
    let at = m.position();
    Ok(match m {
        CerfMove::CylMerge { .. } => match step_at(c, at)? {
            Cyl(phi) => CerfMove::CylSplit { at, first: phi.clone() },
            _ => return not_applicable("CylMerge needs two cylinders"),
        },
        CerfMove::CylSplit { .. } => CerfMove::CylMerge { at },
        CerfMove::CylAbsorbPre { emit: None, .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Cyl(phi), _) | (_, Cyl(phi)) => CerfMove::CylAbsorbPre { at, emit: Some(phi.clone()) },
            _ => return not_applicable("CylAbsorbPre needs a cylinder"),
        },
        CerfMove::CylAbsorbPre { emit: Some(_), .. } => CerfMove::CylAbsorbPre { at, emit: None },
        CerfMove::CylAbsorbPost { emit: None, .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Cyl(phi), _) | (_, Cyl(phi)) => CerfMove::CylAbsorbPost { at, emit: Some(phi.clone()) },
            _ => return not_applicable("CylAbsorbPost needs a cylinder"),
        },
        CerfMove::CylAbsorbPost { emit: Some(_), .. } => CerfMove::CylAbsorbPost { at, emit: None },
        CerfMove::CritCancel { .. } => match (step_at(c, at)?, step_at(c, at + 1)?) {
            (Attach1(x), Attach2(y)) => CerfMove::CritCreate {
                at,
                alpha: x.transport().clone(),
                beta: y.transport().clone(),
            },
            _ => return not_applicable("CritCancel needs (Attach1, Attach2)"),
        },
        CerfMove::CritCreate { .. } => CerfMove::CritCancel { at },
        CerfMove::CritSwitch { inverse, .. } => CerfMove::CritSwitch { at, inverse: !inverse },
        CerfMove::CritSwitchMixed { transport: None, .. } => match step_at(c, at)? {
            Attach1(x) => CerfMove::CritSwitchMixed { at, transport: Some(x.transport().clone()) },
            _ => return not_applicable("mixed switch needs (Attach1, Attach2)"),
        },
        CerfMove::CritSwitchMixed { transport: Some(_), .. } => CerfMove::CritSwitchMixed { at, transport: None },
    })
}

/// Every applicable move over the registered automorphism library, in a fixed order.
pub fn cerf_neighbors(c: &CobordismChain) -> Vec<(CerfMove, CobordismChain)> {
    use SimpleCobordism::*;
    let mut cands: Vec<CerfMove> = Vec::new();
    let n = c.steps.len();
    for at in 0..n {
        let s = &c.steps[at];
        let next = c.steps.get(at + 1);
        match (s, next) {
            (Cyl(_), Some(Cyl(_))) => cands.push(CerfMove::CylMerge { at }),
            (Cyl(_), Some(Attach2(_))) | (Attach1(_), Some(Cyl(_))) => {
                cands.push(CerfMove::CylAbsorbPre { at, emit: None })
            }
            (Attach2(_), Some(Cyl(_))) | (Cyl(_), Some(Attach1(_))) => {
                cands.push(CerfMove::CylAbsorbPost { at, emit: None })
            }
            (Attach1(_), Some(Attach2(_))) => {
                cands.push(CerfMove::CritCancel { at });
                cands.push(CerfMove::CritSwitchMixed { at, transport: None });
            }
            (Attach2(_), Some(Attach2(_))) | (Attach1(_), Some(Attach1(_))) => {
                cands.push(CerfMove::CritSwitch { at, inverse: false });
                cands.push(CerfMove::CritSwitch { at, inverse: true });
            }
            (Attach2(x), Some(Attach1(y))) if x.transport().is_identity() && y.transport().is_identity() => {
                let g = x.genus() + 1;
                cands.push(CerfMove::CritSwitchMixed { at, transport: Some(SurfaceAutomorphism::identity(g)) });
            }
            _ => {}
        }
        match s {
            Cyl(phi) => {
                let g = phi.genus();
                for (_, first) in SurfaceAutomorphism::library(g) {
                    cands.push(CerfMove::CylSplit { at, first });
                }
                let alpha = SurfaceAutomorphism::identity(g + 1);
                let beta = phi
                    .inverse()
                    .lift()
                    .compose(&SurfaceAutomorphism::s_move(g + 1, 1))
                    .and_then(|x| x.compose(&alpha))
                    .expect("same genus");
                cands.push(CerfMove::CritCreate { at, alpha, beta });
            }
            Attach2(x) | Attach1(x) => {
                let g = x.genus();
                for (_, phi) in SurfaceAutomorphism::library(g).into_iter().skip(1) {
                    cands.push(CerfMove::CylAbsorbPre { at, emit: Some(phi) });
                }
                for (_, phi) in SurfaceAutomorphism::library(g - 1).into_iter().skip(1) {
                    cands.push(CerfMove::CylAbsorbPost { at, emit: Some(phi) });
                }
            }
            _ => {}
        }
    }
    cands
        .into_par_iter()
        .filter_map(|m| cerf_apply(c, &m).ok().map(|out| (m, out)))
        .collect()
}

/// Chains keyed by a cheap invariant with exact comparison inside each bucket.
#[derive(Default)]
struct ChainSet {
    buckets: HashMap<(BordObject, Vec<(u8, Option<Vec<Vec<i64>>>)>), Vec<usize>>,
}

impl ChainSet {
    fn find(&self, all: &[CobordismChain], c: &CobordismChain) -> Option<usize> {
        self.buckets
            .get(&c.signature())
            .and_then(|ids| ids.iter().copied().find(|&i| all[i].surface_eq(c)))
    }

    fn insert(&mut self, id: usize, c: &CobordismChain) {
        self.buckets.entry(c.signature()).or_default().push(id);
    }
}

struct SearchSide {
    nodes: Vec<CobordismChain>,
    parent: Vec<Option<(usize, CerfMove)>>,
    index: ChainSet,
    frontier: Vec<usize>,
}

impl SearchSide {
    fn new(root: &CobordismChain) -> Self {
        let mut index = ChainSet::default();
        index.insert(0, root);
        SearchSide { nodes: vec![root.clone()], parent: vec![None], index, frontier: vec![0] }
    }

    /// Moves from the root to node `i`.
    fn path_to(&self, mut i: usize) -> Vec<(usize, CerfMove)> {
        let mut out = Vec::new();
        while let Some((p, m)) = &self.parent[i] {
            out.push((*p, m.clone()));
            i = *p;
        }
        out.reverse();
        out
    }

    /// Expands one layer; returns the first node that also lies in `other`.
    fn expand(&mut self, other: &SearchSide) -> Option<(usize, usize)> {
        let layer: Vec<Vec<(CerfMove, CobordismChain)>> =
            self.frontier.par_iter().map(|&i| cerf_neighbors(&self.nodes[i])).collect();
        let mut next = Vec::new();
        for (&from, nbrs) in self.frontier.iter().zip(layer) {
            for (m, ch) in nbrs {
                if self.index.find(&self.nodes, &ch).is_some() {
                    continue;
                }
                let id = self.nodes.len();
                self.index.insert(id, &ch);
                self.nodes.push(ch);
                self.parent.push(Some((from, m)));
                next.push(id);
                if let Some(j) = other.index.find(&other.nodes, &self.nodes[id]) {
                    self.frontier = next;
                    return Some((id, j));
                }
            }
        }
        self.frontier = next;
        None
    }
}

/// Bidirectional bounded search for a sequence of moves from `c1` to a chain
/// equal to `c2`. `None` means no path within `depth` moves, not that none exists.
pub fn cerf_connected(
    c1: &CobordismChain,
    c2: &CobordismChain,
    depth: usize,
) -> Result<Option<Vec<CerfMove>>, BordismError> {
    if c1.source != c2.source {
        return Err(BordismError::BoundaryMismatch { left: c1.source, right: c2.source });
    }
    if c1.target != c2.target {
        return Err(BordismError::BoundaryMismatch { left: c1.target, right: c2.target });
    }
    if c1.surface_eq(c2) {
        return Ok(Some(Vec::new()));
    }
    let mut fwd = SearchSide::new(c1);
    let mut bwd = SearchSide::new(c2);
    let mut used = 0;
    while used < depth {
        let hit = if used % 2 == 0 {
            fwd.expand(&bwd)
        } else {
            bwd.expand(&fwd).map(|(j, i)| (i, j))
        };
        used += 1;
        if let Some((i, j)) = hit {
            let mut moves: Vec<CerfMove> = fwd.path_to(i).into_iter().map(|(_, m)| m).collect();
            // walk back from the meeting point to c2 by inverting the backward moves
            for (p, m) in bwd.path_to(j).into_iter().rev() {
                moves.push(inverse_move(&bwd.nodes[p], &m)?);
            }
            return Ok(Some(moves));
        }
        if fwd.frontier.is_empty() && bwd.frontier.is_empty() {
            break;
        }
    }
    Ok(None)
}

/// Applies a move sequence, failing on the first inapplicable move.
pub fn apply_path(c: &CobordismChain, moves: &[CerfMove]) -> Result<CobordismChain, BordismError> {
    moves.iter().try_fold(c.clone(), |acc, m| cerf_apply(&acc, m))
}

/// Closed 3-manifold fixtures as Heegaard chains ∅ → ∅.
pub mod fixtures {
    use super::*;

    fn chain(steps: Vec<SimpleCobordism>) -> CobordismChain {
        CobordismChain::new(steps).expect("fixture chain")
    }

    /// Two genus-1 handlebodies glued so that the meridians meet once.
    pub fn s3() -> CobordismChain {
        lens(1, 0)
    }

    /// The same sphere with the crossing pair transported by the S-move.
    pub fn s3_rotated() -> CobordismChain {
        let s = SurfaceAutomorphism::s_move(1, 1);
        chain(vec![
            SimpleCobordism::Cap0,
            SimpleCobordism::attach1(s.clone()).unwrap(),
            SimpleCobordism::attach2(s.compose(&s).unwrap()).unwrap(),
            SimpleCobordism::Cap3,
        ])
    }

    pub fn s1_x_s2() -> CobordismChain {
        chain(vec![
            SimpleCobordism::Cap0,
            SimpleCobordism::Attach1(AttachingCircle::canonical(1)),
            SimpleCobordism::Attach2(AttachingCircle::canonical(1)),
            SimpleCobordism::Cap3,
        ])
    }

    /// L(p, q): the second circle has homology class q·a₁ + p·b₁.
    pub fn lens(p: u64, q: u64) -> CobordismChain {
        let psi = SurfaceAutomorphism::lens_transport(p, q).expect("coprime parameters");
        chain(vec![
            SimpleCobordism::Cap0,
            SimpleCobordism::Attach1(AttachingCircle::canonical(1)),
            SimpleCobordism::attach2(psi).unwrap(),
            SimpleCobordism::Cap3,
        ])
    }

    /// #²(S¹×S²) through a genus-2 Heegaard surface.
    pub fn double_s1_x_s2() -> CobordismChain {
        chain(vec![
            SimpleCobordism::Cap0,
            SimpleCobordism::Attach1(AttachingCircle::canonical(1)),
            SimpleCobordism::Attach1(AttachingCircle::canonical(2)),
            SimpleCobordism::Attach2(AttachingCircle::canonical(2)),
            SimpleCobordism::Attach2(AttachingCircle::canonical(1)),
            SimpleCobordism::Cap3,
        ])
    }

    /// Named fixtures with their fundamental-group presentations (generators, relator words).
    pub fn closed_fixtures() -> Vec<(String, CobordismChain)> {
        let mut out = vec![
            ("S3".to_string(), s3()),
            ("S1xS2".to_string(), s1_x_s2()),
        ];
        for p in 2..=5 {
            out.push((format!("L({p},1)"), lens(p, 1)));
        }
        out.push(("#2(S1xS2)".to_string(), double_s1_x_s2()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(g: usize) -> SurfaceAutomorphism {
        SurfaceAutomorphism::identity(g)
    }

    #[test]
    fn compose_and_adjoint_examples() {
        let e = CobordismChain::identity(BordObject::Surface(1));
        let h = CobordismChain::new(vec![
            SimpleCobordism::Attach2(AttachingCircle::canonical(1)),
            SimpleCobordism::Cap3,
        ])
        .unwrap();
        assert_eq!(e.compose(&h).unwrap(), h);
        assert_eq!(h.target(), BordObject::Empty);
        assert!(h.compose(&h).is_err());
        let adj = h.adjoint();
        assert_eq!(adj.steps()[0], SimpleCobordism::Cap0);
        assert_eq!(adj.adjoint(), h);
        assert!(CobordismChain::identity(BordObject::Empty).adjoint().is_empty());
    }

    #[test]
    fn merge_of_identities() {
        let c = CobordismChain::new(vec![SimpleCobordism::Cyl(id(1)), SimpleCobordism::Cyl(id(1))]).unwrap();
        let out = cerf_apply(&c, &CerfMove::CylMerge { at: 0 }).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out.steps()[0].surface_eq(&SimpleCobordism::Cyl(id(1))));
    }

    #[test]
    fn cancel_crossing_pair_on_torus() {
        let s3 = fixtures::s3();
        let out = cerf_apply(&s3, &CerfMove::CritCancel { at: 1 }).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.steps()[1].surface_eq(&SimpleCobordism::Cyl(id(0))));
        // parallel circles do not cancel
        assert!(cerf_apply(&fixtures::s1_x_s2(), &CerfMove::CritCancel { at: 1 }).is_err());
    }

    #[test]
    fn moves_invert() {
        for c in [fixtures::s3(), fixtures::double_s1_x_s2(), fixtures::lens(3, 1)] {
            for (m, out) in cerf_neighbors(&c) {
                let back = inverse_move(&c, &m).unwrap();
                let restored = cerf_apply(&out, &back).unwrap();
                assert!(restored.surface_eq(&c), "{} did not invert", m.describe());
            }
        }
    }

    #[test]
    fn search_examples() {
        let s3 = fixtures::s3();
        assert_eq!(cerf_connected(&s3, &s3, 0).unwrap(), Some(vec![]));
        let t = SurfaceAutomorphism::twist_a(1, 1);
        let c = CobordismChain::new(vec![SimpleCobordism::Cyl(t.clone()), SimpleCobordism::Cyl(t.inverse())])
            .unwrap();
        let target = CobordismChain::new(vec![SimpleCobordism::Cyl(id(1))]).unwrap();
        let path = cerf_connected(&c, &target, 1).unwrap().unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(path[0].kind(), MoveKind::CylMerge);
        let path = cerf_connected(&s3, &fixtures::s3_rotated(), 4).unwrap().unwrap();
        assert!(apply_path(&s3, &path).unwrap().surface_eq(&fixtures::s3_rotated()));
        assert!(cerf_connected(&s3, &target, 2).is_err());
    }
}
