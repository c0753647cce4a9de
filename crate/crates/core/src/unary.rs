//! Fixed-point analysis for algebras of unary operations: the reachability
//! classification, the fixed-point-free three-partition, and the induced
//! partition that defeats homogeneity off the fixed-point set.

use std::collections::{BTreeSet, VecDeque};

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::algebra::{Signature, SortIndex, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnaryError {
    #[error("carrier elements must be distinct (duplicate at index {index})")]
    CarrierDuplicates { index: usize },
    #[error("op {op} maps {got} elements, carrier has {expected}")]
    OpWrongLength { op: usize, expected: usize, got: usize },
    #[error("op {op} sends element {element} to out-of-range image {image}")]
    ImageOutOfRange { op: usize, element: usize, image: usize },
    #[error("operation `{op}` is not a unary map on the chosen phylum")]
    NotUnary { op: String },
    #[error("phylum is infinite; unary analysis needs a finite carrier")]
    InfiniteCarrier,
    #[error("map fixes element {element}; the three-partition needs a fixed-point-free map")]
    FixedPoint { element: usize },
    #[error("element {element} lies outside the declared fixed-point set but no op moves it")]
    NotMoved { element: usize },
    #[error("element {element} out of range for a carrier of {len}")]
    ElementOutOfRange { element: usize, len: usize },
}

/// Finitely many unary operations over one finite carrier. Elements are
/// addressed by index into `carrier`; each op is a total map on indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryAlgebra {
    carrier: Vec<Value>,
    ops: Vec<Vec<usize>>,
}

impl UnaryAlgebra {
    pub fn new(carrier: Vec<Value>, ops: Vec<Vec<usize>>) -> Result<UnaryAlgebra, UnaryError> {
        for (index, v) in carrier.iter().enumerate() {
            if carrier[..index].contains(v) {
                return Err(UnaryError::CarrierDuplicates { index });
            }
        }
        for (op, map) in ops.iter().enumerate() {
            if map.len() != carrier.len() {
                return Err(UnaryError::OpWrongLength {
                    op,
                    expected: carrier.len(),
                    got: map.len(),
                });
            }
            for (element, &image) in map.iter().enumerate() {
                if image >= carrier.len() {
                    return Err(UnaryError::ImageOutOfRange { op, element, image });
                }
            }
        }
        Ok(UnaryAlgebra { carrier, ops })
    }

    /// Views one phylum of a signature as a unary algebra. Every operation
    /// must be a unary map from that phylum to itself, and the phylum must
    /// be finite.
    pub fn from_signature(sig: &Signature, sort: SortIndex) -> Result<UnaryAlgebra, UnaryError> {
        let carrier = sig.phylum_values(sort).ok_or(UnaryError::InfiniteCarrier)?;
        let mut ops = Vec::with_capacity(sig.op_count());
        for def in &sig.ops {
            if def.arg_sorts != vec![sort] || def.out_sort != sort {
                return Err(UnaryError::NotUnary { op: def.name.clone() });
            }
            let mut map = Vec::with_capacity(carrier.len());
            for v in &carrier {
                let image = sig
                    .evaluate_op(
                        crate::algebra::OpIndex(ops.len()),
                        std::slice::from_ref(v),
                    )
                    .map_err(|_| UnaryError::NotUnary { op: def.name.clone() })?;
                let index = carrier
                    .iter()
                    .position(|w| *w == image)
                    .ok_or(UnaryError::NotUnary { op: def.name.clone() })?;
                map.push(index);
            }
            ops.push(map);
        }
        Ok(UnaryAlgebra { carrier, ops })
    }

    pub fn carrier(&self) -> &[Value] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn ops(&self) -> &[Vec<usize>] {
        &self.ops
    }

    pub fn value(&self, i: usize) -> &Value {
        &self.carrier[i]
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.carrier.iter().position(|w| w == v)
    }

    /// Indices fixed by every operation.
    pub fn fixed_point_set(&self) -> BTreeSet<usize> {
        (0..self.carrier.len())
            .filter(|&i| self.ops.iter().all(|map| map[i] == i))
            .collect()
    }

    pub fn fixed_point_values(&self) -> Vec<Value> {
        self.fixed_point_set()
            .into_iter()
            .map(|i| self.carrier[i].clone())
            .collect()
    }

    pub fn values_of(&self, set: &BTreeSet<usize>) -> Vec<Value> {
        set.iter().map(|&i| self.carrier[i].clone()).collect()
    }
}

/// Verdict of the reachability classification: Ramsey exactly when every
/// element can be driven into the common fixed-point set by composing
/// operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_ramsey: bool,
    pub fixed: BTreeSet<usize>,
    pub unreachable: BTreeSet<usize>,
}

impl Classification {
    pub fn to_json(&self) -> Json {
        json!({
            "is_ramsey": self.is_ramsey,
            "fixed": self.fixed.iter().collect::<Vec<_>>(),
            "unreachable": self.unreachable.iter().collect::<Vec<_>>(),
        })
    }
}

/// Classifies by reverse breadth-first search from the fixed-point set over
/// the union of op-edges `x -> f(x)`.
pub fn unary_ramsey_classification(alg: &UnaryAlgebra) -> Classification {
    let n = alg.len();
    let fixed = alg.fixed_point_set();
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); n];
    for map in alg.ops() {
        for (x, &fx) in map.iter().enumerate() {
            preimages[fx].push(x);
        }
    }
    let mut reaches = vec![false; n];
    let mut queue: VecDeque<usize> = fixed.iter().copied().collect();
    for &s in &fixed {
        reaches[s] = true;
    }
    while let Some(y) = queue.pop_front() {
        for &x in &preimages[y] {
            if !reaches[x] {
                reaches[x] = true;
                queue.push_back(x);
            }
        }
    }
    let unreachable: BTreeSet<usize> = (0..n).filter(|&i| !reaches[i]).collect();
    Classification { is_ramsey: unreachable.is_empty(), fixed, unreachable }
}

/// Partition of `0..n` into three cells, none of which is stable under the
/// generating map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreePartition {
    pub parts: [BTreeSet<usize>; 3],
}

impl ThreePartition {
    pub fn part_of(&self, x: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&x))
    }

    /// Partition check plus `T[P_i] ∩ P_i = ∅` for each cell.
    pub fn separates(&self, t: &[usize]) -> bool {
        let covered: usize = self.parts.iter().map(BTreeSet::len).sum();
        if covered != t.len() {
            return false;
        }
        for (i, part) in self.parts.iter().enumerate() {
            for &x in part {
                if x >= t.len() || self.part_of(x) != Some(i) {
                    return false;
                }
                if part.contains(&t[x]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Json {
        json!({
            "P1": self.parts[0].iter().collect::<Vec<_>>(),
            "P2": self.parts[1].iter().collect::<Vec<_>>(),
            "P3": self.parts[2].iter().collect::<Vec<_>>(),
        })
    }
}

/// Three-partition of the functional graph of a fixed-point-free map `t`
/// (carrier `0..t.len()`) with no cell mapped into itself. Each weakly
/// connected component is one cycle with in-trees: cycles are colored
/// alternately from their least node (an odd cycle ends in the third color),
/// tree nodes take the least color different from their image's color.
/// The postcondition is re-checked by direct scan on every call.
pub fn katetov_partition(t: &[usize]) -> Result<ThreePartition, UnaryError> {
    let n = t.len();
    for (element, &image) in t.iter().enumerate() {
        if image >= n {
            return Err(UnaryError::ImageOutOfRange { op: 0, element, image });
        }
        if image == element {
            return Err(UnaryError::FixedPoint { element });
        }
    }

    // Peel nodes of in-degree zero; what survives is exactly the cycles.
    let mut indegree = vec![0usize; n];
    for &image in t {
        indegree[image] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| indegree[x] == 0).collect();
    let mut on_cycle = vec![true; n];
    while let Some(x) = queue.pop_front() {
        on_cycle[x] = false;
        let y = t[x];
        indegree[y] -= 1;
        if indegree[y] == 0 {
            queue.push_back(y);
        }
    }

    let mut color: Vec<Option<usize>> = vec![None; n];
    for start in 0..n {
        if !on_cycle[start] || color[start].is_some() {
            continue;
        }
        // `start` is the least uncolored node of its cycle.
        let mut cycle = vec![start];
        let mut x = t[start];
        while x != start {
            cycle.push(x);
            x = t[x];
        }
        for (k, &node) in cycle.iter().enumerate() {
            color[node] = Some(if k + 1 == cycle.len() && cycle.len() % 2 == 1 {
                2
            } else {
                k % 2
            });
        }
    }

    // Color in-trees outward from the cycles: breadth-first over preimages,
    // each node taking the least color its image does not use.
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, &y) in t.iter().enumerate() {
        preimages[y].push(x);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| on_cycle[x]).collect();
    while let Some(y) = queue.pop_front() {
        for &x in &preimages[y] {
            if color[x].is_none() {
                let image_color = color[t[x]].expect("image colored before preimage");
                color[x] = Some((0..3).find(|&c| c != image_color).expect("three colors"));
                queue.push_back(x);
            }
        }
    }

    let mut parts: [BTreeSet<usize>; 3] = Default::default();
    for (x, c) in color.iter().enumerate() {
        parts[c.expect("every node colored")].insert(x);
    }
    let partition = ThreePartition { parts };
    assert!(partition.separates(t), "three-partition postcondition failed");
    Ok(partition)
}

/// Builds the auxiliary map of the off-fixed-point homogeneity defeat and
/// returns its three-partition restricted to the carrier: elements of `s`
/// are sent to a fresh point α, α is sent to `a0`, and every other element
/// is moved by its least non-fixing op. Off `s`, each cell of the result is
/// exited by some operation.
pub fn premprop_partition(
    alg: &UnaryAlgebra,
    s: &BTreeSet<usize>,
    a0: usize,
) -> Result<ThreePartition, UnaryError> {
    let n = alg.len();
    if a0 >= n {
        return Err(UnaryError::ElementOutOfRange { element: a0, len: n });
    }
    if let Some(&element) = s.iter().find(|&&x| x >= n) {
        return Err(UnaryError::ElementOutOfRange { element, len: n });
    }
    let alpha = n;
    let mut t = Vec::with_capacity(n + 1);
    for a in 0..n {
        if s.contains(&a) {
            t.push(alpha);
        } else {
            let image = alg
                .ops()
                .iter()
                .map(|map| map[a])
                .find(|&fa| fa != a)
                .ok_or(UnaryError::NotMoved { element: a })?;
            t.push(image);
        }
    }
    t.push(a0);

    let extended = katetov_partition(&t)?;
    let mut parts = extended.parts;
    for part in &mut parts {
        part.remove(&alpha);
    }
    let partition = ThreePartition { parts };
    for a in 0..n {
        if s.contains(&a) {
            continue;
        }
        let cell = partition.part_of(a).expect("carrier covered");
        let exits = alg
            .ops()
            .iter()
            .any(|map| partition.part_of(map[a]) != Some(cell));
        assert!(exits, "element {a} cannot leave its cell");
    }
    Ok(partition)
}
