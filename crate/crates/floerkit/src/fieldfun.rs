//! The representation functor on bordism chains: evaluation, closed
//! invariants, the Burnside oracle, move-compatibility reports and
//! generator-set certificates for Cerf moves.

use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

pub use crate::report::CheckEntry;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteGroup, SurfaceAutomorphism};
use crate::bordism::{cancellation_automorphism, cerf_apply, AttachingCircle, BordObject, BordismError, CerfMove, CobordismChain, SimpleCobordism};
use crate::config::{check_budget, pow_estimate, ResourceLimit};
use crate::relcat::{composition_bijection, generator_set, geometric_compose, is_embedded, CyclicChain, GeneratorSet, RelError, RelationChain};
use crate::repvar::{FiniteRelation, RepContext, RepError, RepVariety};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("closed invariants need a chain from the empty surface to itself, got {0} -> {1}")]
    BoundaryMismatch(BordObject, BordObject),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Bordism(#[from] BordismError),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("certificate failed: {0}")]
    Certificate(String),
}

/// The object and simple-morphism assignment for a fixed group, plus the
/// certificates recorded while verifying moves.
pub struct PartialFunctorSpec {
    ctx: RepContext,
    certificates: Mutex<Vec<CheckEntry>>,
}

impl PartialFunctorSpec {
    pub fn new(group: FiniteGroup, budget: u64) -> Self {
        PartialFunctorSpec { ctx: RepContext::with_budget(group, budget), certificates: Mutex::new(Vec::new()) }
    }

    pub fn ctx(&self) -> &RepContext {
        &self.ctx
    }

    pub fn group(&self) -> &FiniteGroup {
        self.ctx.group()
    }

    pub fn object(&self, obj: BordObject) -> Result<Arc<RepVariety>, RepError> {
        self.ctx.variety(obj)
    }

    pub fn simple(&self, s: &SimpleCobordism) -> Result<FiniteRelation, RepError> {
        self.ctx.relation_of_simple(s)
    }

    pub fn record(&self, entries: &[CheckEntry]) {
        self.certificates.lock().unwrap().extend_from_slice(entries);
    }

    pub fn certificates(&self) -> Vec<CheckEntry> {
        self.certificates.lock().unwrap().clone()
    }
}

#[derive(Debug, Clone)]
pub struct FunctorValue {
    pub source: Arc<RepVariety>,
    pub target: Arc<RepVariety>,
    pub chain: RelationChain,
    /// The single composite relation, present when every composition along the chain embeds.
    pub composed: Option<FiniteRelation>,
}

pub fn functor_eval(spec: &PartialFunctorSpec, c: &CobordismChain) -> Result<FunctorValue, FieldError> {
    let source = spec.object(c.source())?;
    let target = spec.object(c.target())?;
    let rels: Vec<FiniteRelation> =
        c.steps().par_iter().map(|s| spec.simple(s)).collect::<Result<_, _>>()?;
    let chain = if rels.is_empty() { RelationChain::identity(source.clone()) } else { RelationChain::new(rels)? };
    let composed = chain.composed_if_embedded()?;
    Ok(FunctorValue { source, target, chain, composed })
}

pub fn closed_cycle(spec: &PartialFunctorSpec, c: &CobordismChain) -> Result<CyclicChain, FieldError> {
    if c.source() != BordObject::Empty || c.target() != BordObject::Empty {
        return Err(FieldError::BoundaryMismatch(c.source(), c.target()));
    }
    let v = functor_eval(spec, c)?;
    Ok(CyclicChain::close(&v.chain)?)
}

/// Generator set of a closed chain read cyclically through the one-point variety.
pub fn closed_invariant(spec: &PartialFunctorSpec, c: &CobordismChain) -> Result<(GeneratorSet, usize), FieldError> {
    let cyc = closed_cycle(spec, c)?;
    let gens = generator_set(&cyc, spec.ctx.budget())?;
    let n = gens.len();
    Ok((gens, n))
}

/// ⟨x_1, …, x_n | r_1, …⟩ with relator letters ±k for x_k^{±1}.
#[derive(Debug, Clone, PartialEq, Eq, serde::Deserialize, Serialize)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

impl Presentation {
    pub fn trivial() -> Self {
        Presentation { generators: 0, relators: Vec::new() }
    }

    pub fn free(n: usize) -> Self {
        Presentation { generators: n, relators: Vec::new() }
    }

    pub fn cyclic(p: usize) -> Self {
        Presentation { generators: 1, relators: vec![vec![1; p]] }
    }

    /// π₁ of the closed genus-g surface.
    pub fn surface(g: usize) -> Self {
        let r = (0..g as i32).flat_map(|i| [2 * i + 1, 2 * i + 2, -(2 * i + 1), -(2 * i + 2)]).collect();
        Presentation { generators: 2 * g, relators: vec![r] }
    }

    fn holds(&self, g: &FiniteGroup, x: &[Elem]) -> bool {
        self.relators.iter().all(|r| {
            r.iter().fold(0, |acc, &l| {
                let v = x[l.unsigned_abs() as usize - 1];
                g.mul(acc, if l > 0 { v } else { g.inv(v) })
            }) == 0
        })
    }
}

/// |Hom(π, G)/G| by Burnside: the average over h ∈ G of the homomorphisms fixed by conjugation with h.
pub fn presentation_oracle(g: &FiniteGroup, p: &Presentation, budget: u64) -> Result<usize, ResourceLimit> {
    let n = p.generators;
    check_budget(pow_estimate(g.order(), n).saturating_mul(2), budget)?;
    if p.relators.iter().flatten().any(|&l| l == 0 || l.unsigned_abs() as usize > n) {
        return Ok(0);
    }
    let ord = g.order() as Elem;
    // centralizer membership: h fixes x iff h commutes with every coordinate
    let total: usize = (0..ord)
        .into_par_iter()
        .map(|first| {
            let mut x = vec![0 as Elem; n];
            if n > 0 {
                x[0] = first;
            } else if first > 0 {
                return 0;
            }
            let mut count = 0;
            loop {
                if p.holds(g, &x) {
                    count += g.elements().filter(|&h| x.iter().all(|&v| g.mul(h, v) == g.mul(v, h))).count();
                }
                // advance coordinates 1..n
                let mut k = n;
                loop {
                    if k <= 1 {
                        return count;
                    }
                    k -= 1;
                    x[k] += 1;
                    if x[k] < ord {
                        break;
                    }
                    x[k] = 0;
                }
            }
        })
        .sum();
    Ok(total / g.order())
}

/// Closed fixtures together with their fundamental groups.
pub fn fixture_presentations() -> Vec<(String, CobordismChain, Presentation)> {
    use crate::bordism::fixtures;
    let mut out = vec![
        ("S3".to_string(), fixtures::s3(), Presentation::trivial()),
        ("S1xS2".to_string(), fixtures::s1_x_s2(), Presentation::free(1)),
    ];
    for p in 2..=5u64 {
        out.push((format!("L({p},1)"), fixtures::lens(p, 1), Presentation::cyclic(p as usize)));
    }
    out.push(("#2(S1xS2)".to_string(), fixtures::double_s1_x_s2(), Presentation::free(2)));
    out
}

/// Lens spaces L(p, q) for p ≤ 6 and every admissible q.
pub fn lens_presentations() -> Vec<(String, CobordismChain, Presentation)> {
    use crate::bordism::fixtures;
    let mut out = Vec::new();
    for p in 2..=6u64 {
        for q in 1..p {
            if (1..=q).filter(|d| p % d == 0 && q % d == 0).count() == 1 {
                out.push((format!("L({p},{q})"), fixtures::lens(p, q), Presentation::cyclic(p as usize)));
            }
        }
    }
    out
}

fn rel_witness(l: &FiniteRelation, r: &FiniteRelation) -> Value {
    let only_l: Vec<_> = l.pairs().iter().filter(|p| !r.contains(p.0 as usize, p.1 as usize)).take(3).collect();
    let only_r: Vec<_> = r.pairs().iter().filter(|p| !l.contains(p.0 as usize, p.1 as usize)).take(3).collect();
    json!({ "left_size": l.len(), "right_size": r.len(), "only_left": only_l, "only_right": only_r })
}

fn equality_entry(name: String, l: &FiniteRelation, r: &FiniteRelation) -> CheckEntry {
    let ok = l.same_as(r);
    CheckEntry::new(name, ok, if ok { None } else { Some(rel_witness(l, r)) })
}

fn embedded_entry(name: String, l: &FiniteRelation, r: &FiniteRelation) -> Result<CheckEntry, FieldError> {
    let e = is_embedded(l, r)?;
    let witness = match e.witness {
        None => json!({ "composite_size": e.composite_size, "triples": e.triples }),
        Some((x, y, y2, z)) => {
            let pts = |v: &RepVariety, i: usize| v.points()[i].clone();
            json!({
                "x": pts(l.source(), x), "y": pts(l.target(), y),
                "y_alt": pts(l.target(), y2), "z": pts(r.target(), z),
            })
        }
    };
    Ok(CheckEntry::new(name, e.embedded, Some(witness)))
}

/// {(f(x), t(y)) : (x, y) ∈ L} for the cylinder graphs f, t.
fn push_forward(l: &FiniteRelation, f: &FiniteRelation, t: &FiniteRelation) -> Result<FiniteRelation, FieldError> {
    Ok(geometric_compose(&geometric_compose(&f.transpose(), l)?, t)?)
}

/// Exhaustive check of the equivariance, disjoint-pair and single-intersection
/// identities for every transport in the automorphism library at this genus.
pub fn verify_cerf_compatibility(spec: &PartialFunctorSpec, genus: usize) -> Result<Vec<CheckEntry>, FieldError> {
    let ctx = spec.ctx();
    let lib = SurfaceAutomorphism::library(genus);
    let lower = SurfaceAutomorphism::library(genus - 1);
    let attach2 = |psi: &SurfaceAutomorphism| -> Result<FiniteRelation, FieldError> {
        Ok(ctx.relation_of_attach2(&AttachingCircle::new(psi.clone())?)?)
    };
    let tag = format!("{}/g{}", spec.group().name(), genus);
    let mut out = Vec::new();
    for (pname, psi) in &lib {
        let l_alpha = attach2(psi)?;
        // transported circle φ(α) with the quotient basis moved by θ
        for (fname, phi) in &lib {
            for (tname, theta) in &lower {
                let moved = theta.lift().inverse().compose(psi)?.compose(phi)?;
                let lhs = push_forward(&l_alpha, &ctx.relation_of_cyl(phi)?, &ctx.relation_of_cyl(theta)?)?;
                out.push(equality_entry(
                    format!("{tag}/equivariance/psi={pname}/phi={fname}/theta={tname}"),
                    &lhs,
                    &attach2(&moved)?,
                ));
            }
        }
        if genus >= 2 {
            // α = ψ(a₁), β = ψ(a₂); both quotient circles are the standard a₁ and φ″ = id
            let l_beta = attach2(&SurfaceAutomorphism::handle_swap(genus, 1).compose(psi)?)?;
            let l_beta_q = attach2(&SurfaceAutomorphism::identity(genus - 1))?;
            let l_alpha_q = l_beta_q.clone();
            let name = |s: &str| format!("{tag}/disjoint/psi={pname}/{s}");
            let l1 = geometric_compose(&l_alpha, &l_beta_q)?;
            let r1 = geometric_compose(&l_beta, &l_alpha_q)?;
            out.push(equality_entry(name("two_handles"), &l1, &r1));
            let l2 = geometric_compose(&l_alpha.transpose(), &l_beta)?;
            let r2 = geometric_compose(&l_beta_q, &l_alpha_q.transpose())?;
            out.push(equality_entry(name("handle_swap"), &l2, &r2));
            out.push(embedded_entry(name("embedded/alphaT.beta"), &l_alpha.transpose(), &l_beta)?);
            out.push(embedded_entry(name("embedded/beta'.alpha'T"), &l_beta_q, &l_alpha_q.transpose())?);
            out.push(embedded_entry(name("embedded/alpha.beta'"), &l_alpha, &l_beta_q)?);
            out.push(embedded_entry(name("embedded/beta.alpha'"), &l_beta, &l_alpha_q)?);
        }
        // α = ψ(a₁), β = ψ(b₁) up to conjugacy
        let s = SurfaceAutomorphism::s_move(genus, 1);
        let beta = s.compose(psi)?;
        let phi = cancellation_automorphism(&beta.compose(&psi.inverse())?)?;
        let l_beta = attach2(&beta)?;
        let name = |x: &str| format!("{tag}/crossing/psi={pname}/{x}");
        let lhs = geometric_compose(&l_alpha.transpose(), &l_beta)?;
        out.push(equality_entry(name("graph"), &lhs, &ctx.relation_of_cyl(&phi)?));
        out.push(embedded_entry(name("embedded"), &l_alpha.transpose(), &l_beta)?);
    }
    spec.record(&out);
    Ok(out)
}

/// A chain of explicit bijections relating the generator sets of a closed
/// chain before and after a Cerf move.
#[derive(Debug, Clone)]
pub struct MoveCertificate {
    pub description: String,
    pub before: GeneratorSet,
    pub after: GeneratorSet,
    /// Index of each generator of `before` in `after`.
    pub map: Vec<usize>,
}

impl MoveCertificate {
    pub fn is_bijection(&self) -> bool {
        if self.map.len() != self.before.len() || self.before.len() != self.after.len() {
            return false;
        }
        let mut seen = vec![false; self.after.len()];
        self.map.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
    }
}

fn same_cycle(x: &CyclicChain, y: &CyclicChain) -> bool {
    x.len() == y.len() && x.relations().iter().zip(y.relations()).all(|(a, b)| a.same_as(b))
}

/// Builds the generator bijection for one move on a closed chain: contract the
/// pair the move touches on whichever side has it, then match the contracted
/// cycles relation by relation.
pub fn cerf_certificate(
    spec: &PartialFunctorSpec,
    c: &CobordismChain,
    m: &CerfMove,
) -> Result<MoveCertificate, FieldError> {
    let after_chain = cerf_apply(c, m)?;
    let before = closed_cycle(spec, c)?;
    let after = closed_cycle(spec, &after_chain)?;
    let budget = spec.ctx().budget();
    let at = m.position();
    let fail = |s: &str| FieldError::Certificate(format!("{}: {s}", m.describe()));
    let (gb, ga, map) = match (m.span(), m.output_span()) {
        (2, 1) => {
            let bij = composition_bijection(&before, at, budget)?;
            if !same_cycle(&bij.to.chain, &after) {
                return Err(fail("contracted cycle differs from the result"));
            }
            let ga = generator_set(&after, budget)?;
            (bij.from, ga, bij.map)
        }
        (1, 2) => {
            let bij = composition_bijection(&after, at, budget)?;
            if !same_cycle(&bij.to.chain, &before) {
                return Err(fail("contracted cycle differs from the source"));
            }
            let inv = bij.inverse();
            let gb = generator_set(&before, budget)?;
            (gb, inv.to, inv.map)
        }
        _ => {
            let b1 = composition_bijection(&before, at, budget)?;
            let b2 = composition_bijection(&after, at, budget)?;
            if !same_cycle(&b1.to.chain, &b2.to.chain) {
                return Err(fail("the two contractions differ"));
            }
            let back = b2.inverse();
            let map = b1.map.iter().map(|&k| back.map[k]).collect();
            (b1.from, back.to, map)
        }
    };
    let cert = MoveCertificate { description: m.describe(), before: gb, after: ga, map };
    if !cert.is_bijection() {
        return Err(fail("map is not a bijection"));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bordism::fixtures;
    use crate::config::DEFAULT_BUDGET;

    #[test]
    fn oracle_examples() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(presentation_oracle(&s3, &Presentation::trivial(), DEFAULT_BUDGET).unwrap(), 1);
        assert_eq!(presentation_oracle(&s3, &Presentation::cyclic(2), DEFAULT_BUDGET).unwrap(), 2);
        assert_eq!(presentation_oracle(&s3, &Presentation::surface(1), DEFAULT_BUDGET).unwrap(), 8);
        assert_eq!(presentation_oracle(&s3, &Presentation::free(2), DEFAULT_BUDGET).unwrap(), 11);
    }

    #[test]
    fn closed_invariant_examples() {
        let spec = PartialFunctorSpec::new(FiniteGroup::symmetric(3), DEFAULT_BUDGET);
        assert_eq!(closed_invariant(&spec, &fixtures::s3()).unwrap().1, 1);
        assert_eq!(closed_invariant(&spec, &fixtures::s1_x_s2()).unwrap().1, 3);
        assert_eq!(closed_invariant(&spec, &fixtures::lens(2, 1)).unwrap().1, 2);
        let open = CobordismChain::identity(BordObject::Surface(1));
        assert!(closed_invariant(&spec, &open).is_err());
    }

    #[test]
    fn handlebody_over_z2() {
        let spec = PartialFunctorSpec::new(FiniteGroup::cyclic(2), DEFAULT_BUDGET);
        let c = CobordismChain::new(vec![SimpleCobordism::Attach2(AttachingCircle::canonical(1)), SimpleCobordism::Cap3])
            .unwrap();
        let v = functor_eval(&spec, &c).unwrap();
        assert_eq!(v.chain.relations()[0].len(), 2);
        assert_eq!(v.chain.relations()[1].len(), 1);
        assert_eq!(v.composed.unwrap().len(), 2);
        let e = functor_eval(&spec, &CobordismChain::identity(BordObject::Surface(1))).unwrap();
        assert!(e.chain.is_empty());
        assert_eq!(e.source.len(), 4);
    }

    #[test]
    fn crossing_pair_on_torus_over_s3() {
        let spec = PartialFunctorSpec::new(FiniteGroup::symmetric(3), DEFAULT_BUDGET);
        let report = verify_cerf_compatibility(&spec, 1).unwrap();
        assert!(report.iter().all(CheckEntry::passed));
        assert!(report.iter().any(|e| e.check.contains("crossing/psi=id/graph")));
    }
}
