use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde_json::json;

use super::{find_isomorphism, quilt_glue, scramble, shrink_strip_unchecked, QuiltDiagram, QuiltError};
use crate::config::{check_budget, ResourceLimit};
use crate::relcat::{generator_set, GeneratorSet};
use crate::report::CheckEntry;
use crate::repvar::FiniteRelation;

type RelQuilt = QuiltDiagram<FiniteRelation>;

/// The full quilted composition map: every tuple of incoming generators
/// (in incoming-end order) with its set of outgoing generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub incoming: Vec<usize>,
    pub map: BTreeMap<Vec<Vec<u32>>, BTreeSet<Vec<u32>>>,
}

/// One constraint (x[a], x[b]) ∈ rel, with the transpose for backward lookups.
struct Constraint {
    a: usize,
    b: usize,
    fwd: Vec<Vec<u32>>,
    bwd: Vec<Vec<u32>>,
    rel: FiniteRelation,
}

struct Solver<'a> {
    sizes: Vec<usize>,
    constraints: Vec<Constraint>,
    adj: Vec<Vec<usize>>,
    order: Vec<usize>,
    /// Assignments past this index only need to exist.
    witness_from: usize,
    output: &'a [usize],
    budget: u64,
    steps: AtomicU64,
    over: AtomicBool,
}

impl Solver<'_> {
    fn candidates(&self, v: usize, x: &[u32]) -> Vec<u32> {
        let mut best: Option<&Vec<u32>> = None;
        for &ci in &self.adj[v] {
            let c = &self.constraints[ci];
            let list = if c.b == v && c.a != v && x[c.a] != u32::MAX {
                Some(&c.fwd[x[c.a] as usize])
            } else if c.a == v && c.b != v && x[c.b] != u32::MAX {
                Some(&c.bwd[x[c.b] as usize])
            } else {
                None
            };
            if let Some(l) = list {
                if best.is_none_or(|b| l.len() < b.len()) {
                    best = Some(l);
                }
            }
        }
        match best {
            Some(l) => l.clone(),
            None => (0..self.sizes[v] as u32).collect(),
        }
    }

    fn consistent(&self, v: usize, x: &[u32]) -> bool {
        self.adj[v].iter().all(|&ci| {
            let c = &self.constraints[ci];
            let (xa, xb) = (x[c.a], x[c.b]);
            xa == u32::MAX || xb == u32::MAX || c.rel.contains(xa as usize, xb as usize)
        })
    }

    fn tick(&self) -> bool {
        if self.steps.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.over.store(true, Ordering::Relaxed);
        }
        !self.over.load(Ordering::Relaxed)
    }

    /// Adds the outputs reachable from partial assignment x at depth i.
    fn search(&self, i: usize, x: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
        if i == self.witness_from {
            let key: Vec<u32> = self.output.iter().map(|&p| x[p]).collect();
            if out.contains(&key) {
                return;
            }
            if self.exists(i, x) {
                out.insert(key);
            }
            return;
        }
        let v = self.order[i];
        for c in self.candidates(v, x) {
            if !self.tick() {
                return;
            }
            x[v] = c;
            if self.consistent(v, x) {
                self.search(i + 1, x, out);
            }
            x[v] = u32::MAX;
        }
    }

    fn exists(&self, i: usize, x: &mut Vec<u32>) -> bool {
        if i == self.order.len() {
            return true;
        }
        let v = self.order[i];
        for c in self.candidates(v, x) {
            if !self.tick() {
                return false;
            }
            x[v] = c;
            if self.consistent(v, x) && self.exists(i + 1, x) {
                x[v] = u32::MAX;
                return true;
            }
            x[v] = u32::MAX;
        }
        false
    }
}

impl QuiltDiagram<FiniteRelation> {
    /// Generator sets of the incoming ends, in incoming-end order.
    pub fn input_generators(&self, budget: u64) -> Result<Vec<GeneratorSet>, QuiltError> {
        self.surface
            .incoming_ends()
            .into_iter()
            .map(|e| Ok(generator_set(&self.end_cyclic_morphism(e)?, budget)?))
            .collect()
    }

    fn check_input(&self, e: usize, t: &[u32]) -> Result<(), QuiltError> {
        let r = self.end_reading(e)?;
        let bad = || QuiltError::InputNotGenerator { end: e, tuple: t.to_vec() };
        if t.len() != r.nodes.len() || t.iter().zip(&r.objects).any(|(&x, v)| x as usize >= v.len()) {
            return Err(bad());
        }
        let k = r.labels.len();
        for (i, l) in r.labels.iter().enumerate() {
            if !l.contains(t[i] as usize, t[(i + 1) % k] as usize) {
                return Err(bad());
            }
        }
        Ok(())
    }

    /// Outgoing generators of all patch assignments satisfying every seam and
    /// restricting to `inputs` on the incoming ends. `budget` caps search steps.
    pub fn quilt_evaluate(&self, inputs: &[Vec<u32>], budget: u64) -> Result<BTreeSet<Vec<u32>>, QuiltError> {
        self.require_valid()?;
        let s = &self.surface;
        let incoming = s.incoming_ends();
        if inputs.len() != incoming.len() {
            return Err(QuiltError::InputCount { expected: incoming.len(), got: inputs.len() });
        }
        let np = s.patch_count();
        let mut x = vec![u32::MAX; np];
        for (&e, t) in incoming.iter().zip(inputs) {
            self.check_input(e, t)?;
            for (&p, &v) in s.node_patches(e)?.iter().zip(t) {
                if x[p] != u32::MAX && x[p] != v {
                    return Ok(BTreeSet::new());
                }
                x[p] = v;
            }
        }
        self.solve(x, budget)
    }

    fn solve(&self, mut x: Vec<u32>, budget: u64) -> Result<BTreeSet<Vec<u32>>, QuiltError> {
        let s = &self.surface;
        let np = s.patch_count();
        let mut constraints = Vec::new();
        for (seam, rel) in s.seams.iter().zip(&self.seam_labels).chain(s.circles.iter().zip(&self.circle_labels)) {
            constraints.push(Constraint {
                a: seam.minus,
                b: seam.plus,
                fwd: rel.forward_lists(),
                bwd: rel.transpose().forward_lists(),
                rel: rel.clone(),
            });
        }
        let mut adj = vec![Vec::new(); np];
        for (i, c) in constraints.iter().enumerate() {
            adj[c.a].push(i);
            if c.b != c.a {
                adj[c.b].push(i);
            }
        }
        let output = s.node_patches(s.outgoing)?;
        let fixed: Vec<usize> = (0..np).filter(|&p| x[p] != u32::MAX).collect();
        // fixed patches must satisfy the constraints among themselves
        for c in &constraints {
            let (xa, xb) = (x[c.a], x[c.b]);
            if xa != u32::MAX && xb != u32::MAX && !c.rel.contains(xa as usize, xb as usize) {
                return Ok(BTreeSet::new());
            }
        }
        let bfs = |seeds: &[usize], members: &[bool]| -> Vec<usize> {
            let mut dist = vec![usize::MAX; np];
            let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
            for &p in seeds {
                dist[p] = 0;
            }
            while let Some(v) = queue.pop_front() {
                for &ci in &adj[v] {
                    let w = if constraints[ci].a == v { constraints[ci].b } else { constraints[ci].a };
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            let mut v: Vec<usize> = (0..np).filter(|&p| members[p]).collect();
            v.sort_by_key(|&p| (dist[p], p));
            v
        };
        let mut is_out = vec![false; np];
        for &p in &output {
            is_out[p] = x[p] == u32::MAX;
        }
        let mut order = bfs(&fixed, &is_out);
        let witness_from = order.len();
        let mut seeds = fixed.clone();
        seeds.extend(&order);
        let rest: Vec<bool> = (0..np).map(|p| x[p] == u32::MAX && !is_out[p]).collect();
        order.extend(bfs(&seeds, &rest));

        let solver = Solver {
            sizes: self.patch_labels.iter().map(|v| v.len()).collect(),
            constraints,
            adj,
            order,
            witness_from,
            output: &output,
            budget,
            steps: AtomicU64::new(0),
            over: AtomicBool::new(false),
        };
        let result = if witness_from == 0 {
            let mut out = BTreeSet::new();
            solver.search(0, &mut x, &mut out);
            out
        } else {
            let v = solver.order[0];
            let parts: Vec<BTreeSet<Vec<u32>>> = solver
                .candidates(v, &x)
                .into_par_iter()
                .map(|c| {
                    let mut y = x.clone();
                    y[v] = c;
                    let mut out = BTreeSet::new();
                    if solver.consistent(v, &y) {
                        solver.search(1, &mut y, &mut out);
                    }
                    out
                })
                .collect();
            parts.into_iter().flatten().collect()
        };
        if solver.over.load(Ordering::Relaxed) {
            return Err(ResourceLimit { estimate: solver.steps.load(Ordering::Relaxed) as u128, budget }.into());
        }
        Ok(result)
    }

    /// Evaluates on every combination of incoming generators.
    pub fn evaluate_all(&self, budget: u64) -> Result<Evaluation, QuiltError> {
        let gens = self.input_generators(budget)?;
        let total = gens.iter().fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128));
        check_budget(total, budget)?;
        let combos: Vec<Vec<Vec<u32>>> = (0..total as usize)
            .map(|mut i| {
                let mut t = Vec::with_capacity(gens.len());
                for g in gens.iter().rev() {
                    t.push(g.tuples[i % g.len()].clone());
                    i /= g.len();
                }
                t.reverse();
                t
            })
            .collect();
        let values: Vec<BTreeSet<Vec<u32>>> =
            combos.par_iter().map(|c| self.quilt_evaluate(c, budget)).collect::<Result<_, _>>()?;
        Ok(Evaluation { incoming: self.surface.incoming_ends(), map: combos.into_iter().zip(values).collect() })
    }
}

fn tuples_json(t: &[Vec<u32>]) -> serde_json::Value {
    json!(t)
}

/// Cylinder axiom: every input generator maps to itself.
pub fn cylinder_check(name: &str, q: &RelQuilt, budget: u64) -> Result<CheckEntry, QuiltError> {
    let ev = q.evaluate_all(budget)?;
    for (input, out) in &ev.map {
        let expected: BTreeSet<Vec<u32>> = input.iter().cloned().collect();
        if input.len() != 1 || *out != expected {
            return Ok(CheckEntry::fail(
                format!("{name}/cylinder"),
                json!({"input": tuples_json(input), "output": out}),
            ));
        }
    }
    Ok(CheckEntry::pass(format!("{name}/cylinder")))
}

/// Gluing axiom: evaluating the glued diagram equals plugging the outputs of
/// q1 into end e of q2.
pub fn gluing_check(name: &str, q1: &RelQuilt, q2: &RelQuilt, e: usize, budget: u64) -> Result<CheckEntry, QuiltError> {
    let glued = quilt_glue(q1, q2, e)?;
    let ra = q1.end_reading(q1.surface.outgoing)?;
    let rb = q2.end_reading(e)?;
    let r = QuiltDiagram::match_readings(&ra, &rb)?;
    let m = ra.nodes.len();
    let e1 = q1.evaluate_all(budget)?;
    let g2 = q2.input_generators(budget)?;
    let inc2 = q2.surface.incoming_ends();
    let pos_e = inc2.iter().position(|&x| x == e).expect("incoming end");
    let eg = glued.evaluate_all(budget)?;
    for (input, out) in &eg.map {
        let (x1, x2) = input.split_at(e1.incoming.len());
        let mut expected = BTreeSet::new();
        for y in &e1.map[x1] {
            let mut z = vec![0u32; m];
            for i in 0..m {
                z[(i + r) % m] = y[i];
            }
            if g2[pos_e].index_of(&z).is_none() {
                continue;
            }
            let mut args = x2.to_vec();
            args.insert(pos_e, z);
            expected.extend(q2.quilt_evaluate(&args, budget)?);
        }
        if *out != expected {
            return Ok(CheckEntry::fail(
                format!("{name}/gluing"),
                json!({"input": tuples_json(input), "glued": out, "composed": expected}),
            ));
        }
    }
    Ok(CheckEntry::pass(format!("{name}/gluing")))
}

/// Strip-shrinking axiom at patch p, compared through the node projections.
/// Returns whether the merged composition is embedded, and the comparison.
pub fn strip_check(name: &str, q: &RelQuilt, p: usize, budget: u64) -> Result<(bool, CheckEntry), QuiltError> {
    let shrunk = shrink_strip_unchecked(q, p)?;
    let embedded = strip_embedded(q, p)?;
    let after = &shrunk.diagram;
    let project = |e: usize, t: &[u32]| -> Vec<u32> { shrunk.node_maps[e].iter().map(|&i| t[i]).collect() };
    let incoming = q.surface.incoming_ends();
    let before = q.evaluate_all(budget)?;
    for (input, out) in &before.map {
        let pin: Vec<Vec<u32>> = incoming.iter().zip(input).map(|(&e, t)| project(e, t)).collect();
        let o = q.surface.outgoing;
        let expected: BTreeSet<Vec<u32>> = out.iter().map(|t| project(o, t)).collect();
        let got = after.quilt_evaluate(&pin, budget);
        let ok = matches!(&got, Ok(g) if *g == expected);
        if !ok {
            let got = got.map(|g| json!(g)).unwrap_or_else(|err| json!(err.to_string()));
            return Ok((
                embedded,
                CheckEntry::fail(
                    format!("{name}/strip/{p}"),
                    json!({"embedded": embedded, "input": tuples_json(input), "before": expected, "after": got}),
                ),
            ));
        }
    }
    Ok((embedded, CheckEntry::pass(format!("{name}/strip/{p}"))))
}

fn strip_embedded(q: &RelQuilt, p: usize) -> Result<bool, QuiltError> {
    match super::shrink_strip(q, p) {
        Ok(_) => Ok(true),
        Err(QuiltError::NotEmbedded { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Deformation axiom: a scrambled copy is found isomorphic and evaluates to
/// the same map after transporting tuples along the isomorphism.
pub fn deformation_check(name: &str, q: &RelQuilt, seed: u64, budget: u64) -> Result<CheckEntry, QuiltError> {
    let check = format!("{name}/deformation/{seed}");
    let b = scramble(q, seed);
    let Some(iso) = find_isomorphism(q, &b) else {
        return Ok(CheckEntry::fail(check, json!({"reason": "no isomorphism found"})));
    };
    let ea = q.evaluate_all(budget)?;
    let incoming_b = b.surface.incoming_ends();
    let mut maps = Vec::new();
    for &eb in &incoming_b {
        let ea_end = iso.end_map.iter().position(|&x| x == eb).expect("bijective end map");
        let slot = ea.incoming.iter().position(|&x| x == ea_end).expect("incoming end");
        maps.push((slot, iso.node_map(q, &b, ea_end)?));
    }
    let out_map = iso.node_map(q, &b, q.surface.outgoing)?;
    let transport = |map: &[usize], t: &[u32]| -> Vec<u32> { map.iter().map(|&i| t[i]).collect() };
    for (input, out) in &ea.map {
        let args: Vec<Vec<u32>> = maps.iter().map(|(slot, m)| transport(m, &input[*slot])).collect();
        let expected: BTreeSet<Vec<u32>> = out.iter().map(|t| transport(&out_map, t)).collect();
        let got = b.quilt_evaluate(&args, budget)?;
        if got != expected {
            return Ok(CheckEntry::fail(
                check,
                json!({"input": tuples_json(input), "original": expected, "scrambled": got}),
            ));
        }
    }
    Ok(CheckEntry::pass(check))
}
