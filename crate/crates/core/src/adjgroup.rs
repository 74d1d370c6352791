//! Exhaustive group theory for the conjugation action on trace-zero
//! matrices over F_5.
//!
//! The projective linear group of degree 2 over F_5 has 120 elements and
//! acts by conjugation on the three-dimensional space of trace-zero 2x2
//! matrices. This module realizes the group through canonical matrix
//! representatives and the module in a fixed basis, then settles the
//! splitting, stabilizer, normality, and subgroup-classification questions
//! by direct enumeration. Everything is specific to the prime 5, where the
//! group is isomorphic to the symmetric group on five letters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_integer::lcm;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdjGroupError {
    #[error("matrix is not invertible over F_5")]
    NotInvertible,
    #[error("spans are not complementary")]
    NonComplementarySpans,
    #[error("first span is not a line")]
    NotALine,
    #[error("element set does not preserve the splitting")]
    SplitNotPreserved,
    #[error("element set is not closed under multiplication")]
    NotClosed,
}

const INVERSE: [u8; 5] = [0, 1, 3, 2, 4];

fn neg5(x: u8) -> u8 {
    (5 - x % 5) % 5
}

fn mat_mul(a: [u8; 4], b: [u8; 4]) -> [u8; 4] {
    let p = |x: u8, y: u8| u16::from(x) * u16::from(y);
    [
        ((p(a[0], b[0]) + p(a[1], b[2])) % 5) as u8,
        ((p(a[0], b[1]) + p(a[1], b[3])) % 5) as u8,
        ((p(a[2], b[0]) + p(a[3], b[2])) % 5) as u8,
        ((p(a[2], b[1]) + p(a[3], b[3])) % 5) as u8,
    ]
}

fn mat_inv(a: [u8; 4]) -> [u8; 4] {
    let det = (i32::from(a[0]) * i32::from(a[3]) - i32::from(a[1]) * i32::from(a[2]))
        .rem_euclid(5) as usize;
    let di = INVERSE[det];
    let scaled = |x: u8| (u16::from(x) * u16::from(di) % 5) as u8;
    [scaled(a[3]), scaled(neg5(a[1])), scaled(neg5(a[2])), scaled(a[0])]
}

/// An element of the projective linear group of degree 2 over F_5.
///
/// The stored representative is canonical: among the four scalar multiples
/// of an invertible matrix, the one whose first nonzero entry in row-major
/// order equals 1 is kept. Exactly 120 canonical representatives exist.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PGL2F5Element {
    entries: [u8; 4],
}

impl PGL2F5Element {
    /// Reduces the entries mod 5, rejects singular matrices, and normalizes
    /// the scalar ambiguity.
    pub fn new(entries: [i64; 4]) -> Result<Self, AdjGroupError> {
        let mut reduced = [0u8; 4];
        for (slot, &value) in reduced.iter_mut().zip(entries.iter()) {
            *slot = value.rem_euclid(5) as u8;
        }
        let det = (i32::from(reduced[0]) * i32::from(reduced[3])
            - i32::from(reduced[1]) * i32::from(reduced[2]))
        .rem_euclid(5);
        if det == 0 {
            return Err(AdjGroupError::NotInvertible);
        }
        Ok(Self::canonical(reduced))
    }

    fn canonical(entries: [u8; 4]) -> Self {
        let lead = entries
            .iter()
            .copied()
            .find(|&x| x != 0)
            .expect("an invertible matrix has a nonzero entry");
        let scale = INVERSE[usize::from(lead)];
        let mut normalized = [0u8; 4];
        for (slot, &x) in normalized.iter_mut().zip(entries.iter()) {
            *slot = (u16::from(x) * u16::from(scale) % 5) as u8;
        }
        PGL2F5Element { entries: normalized }
    }

    pub fn identity() -> Self {
        PGL2F5Element {
            entries: [1, 0, 0, 1],
        }
    }

    /// Entries of the canonical representative in row-major order.
    pub fn entries(&self) -> [u8; 4] {
        self.entries
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::canonical(mat_mul(self.entries, other.entries))
    }

    /// Group inverse. The adjugate represents the inverse projectively.
    pub fn inv(&self) -> Self {
        let [a, b, c, d] = self.entries;
        Self::canonical([d, neg5(b), neg5(c), a])
    }

    /// Multiplicative order in the projective group.
    pub fn order(&self) -> u32 {
        let mut power = *self;
        let mut k = 1;
        while power != Self::identity() {
            power = power.mul(self);
            k += 1;
        }
        k
    }

    /// All 120 canonical representatives, sorted by entries.
    pub fn all_elements() -> Vec<Self> {
        let mut out = Vec::with_capacity(120);
        for a in 0..5i64 {
            for b in 0..5i64 {
                for c in 0..5i64 {
                    for d in 0..5i64 {
                        if let Ok(g) = Self::new([a, b, c, d]) {
                            if g.entries == [a as u8, b as u8, c as u8, d as u8] {
                                out.push(g);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for PGL2F5Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// A trace-zero 2x2 matrix over F_5 stored by its coordinates in the fixed
/// basis {[[1,0],[0,4]], [[0,1],[0,0]], [[0,0],[1,0]]}.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TraceZeroVec {
    coords: [u8; 3],
}

impl TraceZeroVec {
    /// Reduces the three coordinates mod 5.
    pub fn new(c1: i64, c2: i64, c3: i64) -> Self {
        TraceZeroVec {
            coords: [
                c1.rem_euclid(5) as u8,
                c2.rem_euclid(5) as u8,
                c3.rem_euclid(5) as u8,
            ],
        }
    }

    pub fn zero() -> Self {
        TraceZeroVec { coords: [0, 0, 0] }
    }

    /// Coordinates in the fixed basis.
    pub fn coords(&self) -> [u8; 3] {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0, 0, 0]
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = k.rem_euclid(5) as u16;
        let c = self.coords;
        TraceZeroVec {
            coords: [
                (u16::from(c[0]) * k % 5) as u8,
                (u16::from(c[1]) * k % 5) as u8,
                (u16::from(c[2]) * k % 5) as u8,
            ],
        }
    }

    fn to_matrix(self) -> [u8; 4] {
        let [c1, c2, c3] = self.coords;
        [c1, c2, c3, neg5(c1)]
    }

    fn from_matrix(m: [u8; 4]) -> Self {
        debug_assert_eq!((m[0] + m[3]) % 5, 0, "conjugation preserves the trace");
        TraceZeroVec {
            coords: [m[0], m[1], m[2]],
        }
    }

    /// All 125 vectors of the module.
    pub fn all_vectors() -> Vec<Self> {
        let mut out = Vec::with_capacity(125);
        for c1 in 0..5 {
            for c2 in 0..5 {
                for c3 in 0..5 {
                    out.push(TraceZeroVec::new(c1, c2, c3));
                }
            }
        }
        out
    }
}

impl Add for TraceZeroVec {
    type Output = TraceZeroVec;
    fn add(self, rhs: TraceZeroVec) -> TraceZeroVec {
        TraceZeroVec {
            coords: [
                (self.coords[0] + rhs.coords[0]) % 5,
                (self.coords[1] + rhs.coords[1]) % 5,
                (self.coords[2] + rhs.coords[2]) % 5,
            ],
        }
    }
}

impl Sub for TraceZeroVec {
    type Output = TraceZeroVec;
    fn sub(self, rhs: TraceZeroVec) -> TraceZeroVec {
        self + (-rhs)
    }
}

impl Neg for TraceZeroVec {
    type Output = TraceZeroVec;
    fn neg(self) -> TraceZeroVec {
        TraceZeroVec {
            coords: [
                neg5(self.coords[0]),
                neg5(self.coords[1]),
                neg5(self.coords[2]),
            ],
        }
    }
}

impl fmt::Display for TraceZeroVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c1, c2, c3] = self.coords;
        write!(f, "({c1}, {c2}, {c3})")
    }
}

/// Conjugates the trace-zero matrix `m` by `g` and returns the coordinates
/// of the result in the fixed basis. The scalar ambiguity of the projective
/// representative cancels, so the action is well defined.
pub fn adjoint_action(g: PGL2F5Element, m: TraceZeroVec) -> TraceZeroVec {
    let rep = g.entries();
    let conjugated = mat_mul(mat_mul(rep, m.to_matrix()), mat_inv(rep));
    TraceZeroVec::from_matrix(conjugated)
}

/// An element (g, m) of the semidirect product of a matrix group with the
/// trace-zero module, multiplying by (g, m)(h, w) = (gh, m + g.w).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SemidirectElement {
    g: PGL2F5Element,
    m: TraceZeroVec,
}

impl SemidirectElement {
    pub fn new(g: PGL2F5Element, m: TraceZeroVec) -> Self {
        SemidirectElement { g, m }
    }

    pub fn identity() -> Self {
        SemidirectElement {
            g: PGL2F5Element::identity(),
            m: TraceZeroVec::zero(),
        }
    }

    pub fn g(&self) -> PGL2F5Element {
        self.g
    }

    pub fn m(&self) -> TraceZeroVec {
        self.m
    }

    pub fn mul(&self, other: &Self) -> Self {
        SemidirectElement {
            g: self.g.mul(&other.g),
            m: self.m + adjoint_action(self.g, other.m),
        }
    }

    pub fn inv(&self) -> Self {
        let gi = self.g.inv();
        SemidirectElement {
            g: gi,
            m: -adjoint_action(gi, self.m),
        }
    }

    /// The conjugate x (g, m) x^{-1}.
    pub fn conjugate_by(&self, x: &Self) -> Self {
        x.mul(self).mul(&x.inv())
    }
}

impl fmt::Display for SemidirectElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.g, self.m)
    }
}

fn span_of(vectors: &[TraceZeroVec]) -> BTreeSet<TraceZeroVec> {
    let mut set = BTreeSet::new();
    set.insert(TraceZeroVec::zero());
    for &v in vectors {
        let mut extended = BTreeSet::new();
        for &s in &set {
            for k in 0..5 {
                extended.insert(s + v.scale(k));
            }
        }
        set = extended;
    }
    set
}

/// Generators of the order-12 subgroup under which the module splits into
/// an invariant plane and an invariant line: two generators of a symmetric
/// group on three letters together with a commuting element of order 2.
pub fn splitting_subgroup_generators() -> [PGL2F5Element; 3] {
    [
        PGL2F5Element::new([1, 2, 2, 0]).expect("invertible"),
        PGL2F5Element::new([4, 2, 1, 1]).expect("invertible"),
        PGL2F5Element::new([3, 2, 2, 2]).expect("invertible"),
    ]
}

/// Spanning vector of the invariant line of the order-12 subgroup.
pub fn invariant_line() -> [TraceZeroVec; 1] {
    [TraceZeroVec::new(4, 1, 1)]
}

/// Spanning vectors of the invariant plane of the order-12 subgroup.
pub fn invariant_plane() -> [TraceZeroVec; 2] {
    [TraceZeroVec::new(3, 1, 0), TraceZeroVec::new(3, 0, 1)]
}

/// Checks that every listed element maps each of the two spans into itself.
///
/// The spans must be complementary: their intersection is zero and together
/// they span the whole three-dimensional module.
pub fn invariant_decomposition_check(
    gens: &[PGL2F5Element],
    v1: &[TraceZeroVec],
    v2: &[TraceZeroVec],
) -> Result<bool, AdjGroupError> {
    let s1 = span_of(v1);
    let s2 = span_of(v2);
    if s1.intersection(&s2).count() != 1 || s1.len() * s2.len() != 125 {
        return Err(AdjGroupError::NonComplementarySpans);
    }
    Ok(gens.iter().all(|g| {
        v1.iter().all(|&v| s1.contains(&adjoint_action(*g, v)))
            && v2.iter().all(|&v| s2.contains(&adjoint_action(*g, v)))
    }))
}

/// The elements of `subgroup` fixing `m` under conjugation. The input list
/// is expected to be closed under multiplication.
pub fn stabilizer_in(subgroup: &[PGL2F5Element], m: TraceZeroVec) -> Vec<PGL2F5Element> {
    subgroup
        .iter()
        .copied()
        .filter(|g| adjoint_action(*g, m) == m)
        .collect()
}

/// True when every listed element fixes every spanning vector pointwise.
pub fn acts_trivially(elements: &[PGL2F5Element], span: &[TraceZeroVec]) -> bool {
    elements
        .iter()
        .all(|g| span.iter().all(|&v| adjoint_action(*g, v) == v))
}

/// Brute-force normality test for the subproduct over the plane inside the
/// semidirect product over both spans.
///
/// `h` must be closed under multiplication and preserve both spans, `v1`
/// must span a line meeting the span of `v2` only in zero. The function
/// enumerates H x (V1 + V2), conjugates every element of H x V2 by every
/// element of the full product, and returns true exactly when all
/// conjugates land back in H x V2.
pub fn normality_check(
    h: &[PGL2F5Element],
    v1: &[TraceZeroVec],
    v2: &[TraceZeroVec],
) -> Result<bool, AdjGroupError> {
    let members: BTreeSet<PGL2F5Element> = h.iter().copied().collect();
    for a in h {
        for b in h {
            if !members.contains(&a.mul(b)) {
                return Err(AdjGroupError::NotClosed);
            }
        }
    }
    let s1 = span_of(v1);
    let s2 = span_of(v2);
    if s1.len() != 5 {
        return Err(AdjGroupError::NotALine);
    }
    if s1.intersection(&s2).count() != 1 {
        return Err(AdjGroupError::NonComplementarySpans);
    }
    let preserves = h.iter().all(|g| {
        v1.iter().all(|&v| s1.contains(&adjoint_action(*g, v)))
            && v2.iter().all(|&v| s2.contains(&adjoint_action(*g, v)))
    });
    if !preserves {
        return Err(AdjGroupError::SplitNotPreserved);
    }
    let joined: Vec<TraceZeroVec> = v1.iter().chain(v2.iter()).copied().collect();
    let ambient: Vec<TraceZeroVec> = span_of(&joined).into_iter().collect();
    let sub: Vec<SemidirectElement> = h
        .iter()
        .flat_map(|&g| s2.iter().map(move |&w| SemidirectElement::new(g, w)))
        .collect();
    let sub_set: BTreeSet<SemidirectElement> = sub.iter().copied().collect();
    for &g in h {
        for &w in &ambient {
            let x = SemidirectElement::new(g, w);
            let xi = x.inv();
            for n in &sub {
                if !sub_set.contains(&x.mul(n).mul(&xi)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Counts the lines and planes of the module left invariant by every listed
/// element, sweeping all 31 lines and all 31 planes.
pub fn invariant_subspace_census(elements: &[PGL2F5Element]) -> (usize, usize) {
    let directions: Vec<TraceZeroVec> = TraceZeroVec::all_vectors()
        .into_iter()
        .filter(|v| v.coords().iter().find(|&&c| c != 0) == Some(&1))
        .collect();
    let lines = directions
        .iter()
        .filter(|&&v| {
            let line = span_of(&[v]);
            elements.iter().all(|g| line.contains(&adjoint_action(*g, v)))
        })
        .count();
    let dot = |a: [u8; 3], v: TraceZeroVec| -> u8 {
        let c = v.coords();
        ((u16::from(a[0]) * u16::from(c[0])
            + u16::from(a[1]) * u16::from(c[1])
            + u16::from(a[2]) * u16::from(c[2]))
            % 5) as u8
    };
    let planes = directions
        .iter()
        .filter(|&&direction| {
            let normal = direction.coords();
            let plane: Vec<TraceZeroVec> = TraceZeroVec::all_vectors()
                .into_iter()
                .filter(|&v| dot(normal, v) == 0)
                .collect();
            let v1 = plane
                .iter()
                .copied()
                .find(|v| !v.is_zero())
                .expect("a plane contains nonzero vectors");
            let line = span_of(&[v1]);
            let v2 = plane
                .iter()
                .copied()
                .find(|v| !line.contains(v))
                .expect("a plane is two dimensional");
            elements.iter().all(|g| {
                dot(normal, adjoint_action(*g, v1)) == 0
                    && dot(normal, adjoint_action(*g, v2)) == 0
            })
        })
        .count();
    (lines, planes)
}

/// Isomorphism labels of the subgroups of order prime to 5.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum SubgroupLabel {
    #[serde(rename = "1")]
    Trivial,
    C2,
    C3,
    C4,
    #[serde(rename = "C2xC2")]
    C2xC2,
    C6,
    S3,
    D8,
    #[serde(rename = "S3xC2")]
    S3xC2,
    A4,
    S4,
}

impl SubgroupLabel {
    /// Order of a group carrying this label.
    pub fn order(&self) -> u32 {
        match self {
            SubgroupLabel::Trivial => 1,
            SubgroupLabel::C2 => 2,
            SubgroupLabel::C3 => 3,
            SubgroupLabel::C4 | SubgroupLabel::C2xC2 => 4,
            SubgroupLabel::C6 | SubgroupLabel::S3 => 6,
            SubgroupLabel::D8 => 8,
            SubgroupLabel::S3xC2 | SubgroupLabel::A4 => 12,
            SubgroupLabel::S4 => 24,
        }
    }
}

impl fmt::Display for SubgroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SubgroupLabel::Trivial => "1",
            SubgroupLabel::C2 => "C2",
            SubgroupLabel::C3 => "C3",
            SubgroupLabel::C4 => "C4",
            SubgroupLabel::C2xC2 => "C2xC2",
            SubgroupLabel::C6 => "C6",
            SubgroupLabel::S3 => "S3",
            SubgroupLabel::D8 => "D8",
            SubgroupLabel::S3xC2 => "S3xC2",
            SubgroupLabel::A4 => "A4",
            SubgroupLabel::S4 => "S4",
        };
        f.write_str(name)
    }
}

type Mask = u128;

struct GroupTable {
    elements: Vec<PGL2F5Element>,
    mul: Vec<u8>,
    conj: Vec<u8>,
    identity: usize,
}

fn group_table() -> &'static GroupTable {
    static TABLE: OnceLock<GroupTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let elements = PGL2F5Element::all_elements();
        let n = elements.len();
        let index: BTreeMap<PGL2F5Element, usize> = elements
            .iter()
            .copied()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let mut mul = vec![0u8; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                mul[i * n + j] = index[&a.mul(b)] as u8;
            }
        }
        let mut inv = vec![0u8; n];
        for (i, a) in elements.iter().enumerate() {
            inv[i] = index[&a.inv()] as u8;
        }
        let mut conj = vec![0u8; n * n];
        for g in 0..n {
            for x in 0..n {
                let gx = usize::from(mul[g * n + x]);
                conj[g * n + x] = mul[gx * n + usize::from(inv[g])];
            }
        }
        let identity = index[&PGL2F5Element::identity()];
        GroupTable {
            elements,
            mul,
            conj,
            identity,
        }
    })
}

fn mask_members(mask: Mask) -> Vec<usize> {
    (0..128).filter(|&i| mask >> i & 1 == 1).collect()
}

fn closure_mask(table: &GroupTable, seed: Mask) -> Mask {
    let n = table.elements.len();
    let mut mask = seed | (1 << table.identity);
    let mut members = mask_members(mask);
    let mut frontier = members.clone();
    while let Some(x) = frontier.pop() {
        let mut i = 0;
        while i < members.len() {
            let y = members[i];
            for z in [
                usize::from(table.mul[x * n + y]),
                usize::from(table.mul[y * n + x]),
            ] {
                if mask >> z & 1 == 0 {
                    mask |= 1 << z;
                    members.push(z);
                    frontier.push(z);
                }
            }
            i += 1;
        }
    }
    mask
}

fn conjugate_mask(table: &GroupTable, mask: Mask, g: usize) -> Mask {
    let n = table.elements.len();
    let mut out: Mask = 0;
    for x in mask_members(mask) {
        out |= 1 << usize::from(table.conj[g * n + x]);
    }
    out
}

fn all_subgroup_masks() -> &'static [Mask] {
    static SUBGROUPS: OnceLock<Vec<Mask>> = OnceLock::new();
    SUBGROUPS.get_or_init(|| {
        let table = group_table();
        let n = table.elements.len();
        let trivial: Mask = 1 << table.identity;
        let mut seen: BTreeSet<Mask> = BTreeSet::new();
        seen.insert(trivial);
        let mut queue = vec![trivial];
        while let Some(sub) = queue.pop() {
            for g in 0..n {
                if sub >> g & 1 == 1 {
                    continue;
                }
                let bigger = closure_mask(table, sub | (1 << g));
                if seen.insert(bigger) {
                    queue.push(bigger);
                }
            }
        }
        seen.into_iter().collect()
    })
}

fn label_for_mask(table: &GroupTable, mask: Mask) -> SubgroupLabel {
    let n = table.elements.len();
    let members = mask_members(mask);
    let order = members.len();
    let commutes = |x: usize, y: usize| table.mul[x * n + y] == table.mul[y * n + x];
    let abelian = members
        .iter()
        .all(|&x| members.iter().all(|&y| commutes(x, y)));
    let exponent = members
        .iter()
        .map(|&x| u64::from(table.elements[x].order()))
        .fold(1, lcm);
    let center = members
        .iter()
        .filter(|&&x| members.iter().all(|&y| commutes(x, y)))
        .count();
    match (order, abelian) {
        (1, _) => SubgroupLabel::Trivial,
        (2, _) => SubgroupLabel::C2,
        (3, _) => SubgroupLabel::C3,
        (4, true) if exponent == 4 => SubgroupLabel::C4,
        (4, true) => SubgroupLabel::C2xC2,
        (6, true) => SubgroupLabel::C6,
        (6, false) => SubgroupLabel::S3,
        (8, false) if exponent == 4 && center == 2 => SubgroupLabel::D8,
        (12, false) if center == 1 => SubgroupLabel::A4,
        (12, false) if center == 2 && exponent == 6 => SubgroupLabel::S3xC2,
        (24, false) if center == 1 => SubgroupLabel::S4,
        _ => unreachable!("fingerprint outside the subgroup types of the 120-element group"),
    }
}

fn normal_subgroup_masks() -> Vec<Mask> {
    let table = group_table();
    let n = table.elements.len();
    all_subgroup_masks()
        .iter()
        .copied()
        .filter(|&mask| (0..n).all(|g| conjugate_mask(table, mask, g) == mask))
        .collect()
}

/// Multiplicative closure of the given elements, sorted.
pub fn subgroup_elements(generators: &[PGL2F5Element]) -> Vec<PGL2F5Element> {
    let table = group_table();
    let mut seed: Mask = 0;
    for g in generators {
        let idx = table
            .elements
            .binary_search(g)
            .expect("canonical representatives index the table");
        seed |= 1 << idx;
    }
    let mask = closure_mask(table, seed);
    mask_members(mask)
        .into_iter()
        .map(|i| table.elements[i])
        .collect()
}

/// For each isomorphism label occurring among subgroups of order prime to
/// 5, the number of conjugacy classes carrying it and the total number of
/// such subgroups, computed by full enumeration.
pub fn prime_to_five_census() -> Vec<(SubgroupLabel, usize, usize)> {
    let table = group_table();
    let n = table.elements.len();
    let mut per_class: BTreeMap<Mask, usize> = BTreeMap::new();
    for &mask in all_subgroup_masks() {
        if mask.count_ones() % 5 == 0 {
            continue;
        }
        let canon = (0..n)
            .map(|g| conjugate_mask(table, mask, g))
            .min()
            .expect("the group is nonempty");
        *per_class.entry(canon).or_insert(0) += 1;
    }
    let mut per_label: BTreeMap<SubgroupLabel, (usize, usize)> = BTreeMap::new();
    for (&rep, &count) in &per_class {
        let entry = per_label.entry(label_for_mask(table, rep)).or_insert((0, 0));
        entry.0 += 1;
        entry.1 += count;
    }
    per_label
        .into_iter()
        .map(|(label, (classes, total))| (label, classes, total))
        .collect()
}

/// The distinct isomorphism labels occurring among subgroups of order prime
/// to 5, in increasing order of group order.
pub fn subgroups_prime_to_5() -> Vec<SubgroupLabel> {
    prime_to_five_census()
        .into_iter()
        .map(|(label, _, _)| label)
        .collect()
}

/// One pass/fail record per claim of the exhaustive suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Runs the full brute-force suite: group laws, action laws, faithfulness,
/// irreducibility of the full action, the displayed splitting, the
/// stabilizer of the invariant line, the normality criterion against the
/// trivial-action predicate, the module-wide normality of the enlarged
/// product with abelian point group, the subgroup census, and the
/// uniqueness of the proper normal subgroup.
pub fn verification_suite() -> Vec<SuiteCheck> {
    let mut checks = Vec::new();
    let all = PGL2F5Element::all_elements();
    let identity = PGL2F5Element::identity();
    let basis = [
        TraceZeroVec::new(1, 0, 0),
        TraceZeroVec::new(0, 1, 0),
        TraceZeroVec::new(0, 0, 1),
    ];

    let inverse_law = all.iter().all(|g| g.mul(&g.inv()) == identity);
    checks.push(SuiteCheck {
        name: "group-order",
        pass: all.len() == 120 && inverse_law,
        detail: format!("{} canonical representatives, inverse law holds", all.len()),
    });

    let composition = all.iter().all(|g| {
        all.iter().all(|h| {
            basis
                .iter()
                .all(|&e| adjoint_action(g.mul(h), e) == adjoint_action(*g, adjoint_action(*h, e)))
        })
    });
    checks.push(SuiteCheck {
        name: "action-composition",
        pass: composition,
        detail: "g(h.m) = (gh).m over all 14400 pairs on a basis".to_string(),
    });

    let linear = all.iter().all(|g| {
        basis.iter().all(|&u| {
            basis.iter().all(|&v| {
                (0..5).all(|k| {
                    adjoint_action(*g, u + v.scale(k))
                        == adjoint_action(*g, u) + adjoint_action(*g, v).scale(k)
                })
            })
        })
    });
    checks.push(SuiteCheck {
        name: "action-linearity",
        pass: linear,
        detail: "additivity and scaling on all basis pairs".to_string(),
    });

    let trivial_actors = all
        .iter()
        .filter(|g| basis.iter().all(|&e| adjoint_action(**g, e) == e))
        .count();
    checks.push(SuiteCheck {
        name: "action-faithful",
        pass: trivial_actors == 1,
        detail: format!("{trivial_actors} element(s) act trivially"),
    });

    let full_census = invariant_subspace_census(&all);
    checks.push(SuiteCheck {
        name: "full-action-irreducible",
        pass: full_census == (0, 0),
        detail: format!(
            "{} invariant lines, {} invariant planes under the full group",
            full_census.0, full_census.1
        ),
    });

    let gens = splitting_subgroup_generators();
    let sub = subgroup_elements(&gens);
    let line = invariant_line();
    let plane = invariant_plane();
    let split_ok = invariant_decomposition_check(&gens, &line, &plane) == Ok(true);
    let sub_census = invariant_subspace_census(&sub);
    checks.push(SuiteCheck {
        name: "splitting-invariant",
        pass: sub.len() == 12 && split_ok && sub_census == (1, 1),
        detail: format!(
            "order {} subgroup, invariant census {:?}",
            sub.len(),
            sub_census
        ),
    });

    let stab = stabilizer_in(&sub, line[0]);
    let stab_full = stabilizer_in(&all, line[0]);
    let cyclic = stab.iter().any(|g| g.order() == 6);
    let stabilizer_ok = stab.len() == 6
        && cyclic
        && stab_full == stab
        && acts_trivially(&stab, &line)
        && !acts_trivially(&sub, &line);
    checks.push(SuiteCheck {
        name: "line-stabilizer-order-six",
        pass: stabilizer_ok,
        detail: format!(
            "stabilizer order {} in the order-12 subgroup, {} in the full group",
            stab.len(),
            stab_full.len()
        ),
    });

    let table = group_table();
    let mut sub_mask: Mask = 0;
    for g in &sub {
        let idx = table
            .elements
            .binary_search(g)
            .expect("canonical representatives index the table");
        sub_mask |= 1 << idx;
    }
    let inner_subgroups: Vec<Vec<PGL2F5Element>> = all_subgroup_masks()
        .iter()
        .copied()
        .filter(|&m| m & !sub_mask == 0)
        .map(|m| {
            mask_members(m)
                .into_iter()
                .map(|i| table.elements[i])
                .collect()
        })
        .collect();
    let mut agree = true;
    let mut normal_count = 0;
    for h in &inner_subgroups {
        let expected = acts_trivially(h, &line);
        match normality_check(h, &line, &plane) {
            Ok(got) => {
                if got != expected {
                    agree = false;
                }
                if got {
                    normal_count += 1;
                }
            }
            Err(_) => agree = false,
        }
    }
    checks.push(SuiteCheck {
        name: "normality-iff-trivial-line-action",
        pass: agree && inner_subgroups.len() == 16 && normal_count == 4,
        detail: format!(
            "{} subgroups swept, {} normal, criterion matched: {}",
            inner_subgroups.len(),
            normal_count,
            agree
        ),
    });

    let plane_span: Vec<TraceZeroVec> = span_of(&plane).into_iter().collect();
    let module = TraceZeroVec::all_vectors();
    let small: Vec<SemidirectElement> = stab
        .iter()
        .flat_map(|&g| plane_span.iter().map(move |&w| SemidirectElement::new(g, w)))
        .collect();
    let small_set: BTreeSet<SemidirectElement> = small.iter().copied().collect();
    let mut enlarged_normal = true;
    'outer: for &g in &sub {
        for &w in &module {
            let x = SemidirectElement::new(g, w);
            let xi = x.inv();
            for n in &small {
                if !small_set.contains(&x.mul(n).mul(&xi)) {
                    enlarged_normal = false;
                    break 'outer;
                }
            }
        }
    }
    checks.push(SuiteCheck {
        name: "abelian-enlargement-normality",
        pass: enlarged_normal && small.len() == 150 && sub.len() * module.len() == 1500,
        detail: format!(
            "conjugated {} elements by all {}",
            small.len(),
            sub.len() * module.len()
        ),
    });

    let labels = subgroups_prime_to_5();
    let expected_labels = vec![
        SubgroupLabel::Trivial,
        SubgroupLabel::C2,
        SubgroupLabel::C3,
        SubgroupLabel::C4,
        SubgroupLabel::C2xC2,
        SubgroupLabel::C6,
        SubgroupLabel::S3,
        SubgroupLabel::D8,
        SubgroupLabel::S3xC2,
        SubgroupLabel::A4,
        SubgroupLabel::S4,
    ];
    let census = prime_to_five_census();
    let class_total: usize = census.iter().map(|&(_, c, _)| c).sum();
    let subgroup_total: usize = census.iter().map(|&(_, _, t)| t).sum();
    checks.push(SuiteCheck {
        name: "prime-to-five-subgroup-census",
        pass: labels == expected_labels && class_total == 14 && subgroup_total == 136,
        detail: format!(
            "{} labels over {} conjugacy classes and {} subgroups",
            labels.len(),
            class_total,
            subgroup_total
        ),
    });

    let normal = normal_subgroup_masks();
    let mut orders: Vec<u32> = normal.iter().map(|m| m.count_ones()).collect();
    orders.sort_unstable();
    checks.push(SuiteCheck {
        name: "unique-proper-normal-subgroup",
        pass: orders == vec![1, 60, 120],
        detail: format!("normal subgroup orders {orders:?}"),
    });

    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line_vec() -> TraceZeroVec {
        invariant_line()[0]
    }

    #[test]
    fn canonical_elements_enumerate_the_projective_group() {
        let all = PGL2F5Element::all_elements();
        assert_eq!(all.len(), 120);
        let identity = PGL2F5Element::identity();
        for g in &all {
            let lead = g.entries().iter().copied().find(|&x| x != 0);
            assert_eq!(lead, Some(1));
            assert_eq!(g.mul(&g.inv()), identity);
            assert_eq!(g.inv().mul(g), identity);
        }
        let mut by_order: BTreeMap<u32, usize> = BTreeMap::new();
        for g in &all {
            *by_order.entry(g.order()).or_insert(0) += 1;
        }
        let expected: BTreeMap<u32, usize> =
            [(1, 1), (2, 25), (3, 20), (4, 30), (5, 24), (6, 20)]
                .into_iter()
                .collect();
        assert_eq!(by_order, expected);
        assert_eq!(PGL2F5Element::new([0, 0, 0, 0]), Err(AdjGroupError::NotInvertible));
        assert_eq!(PGL2F5Element::new([1, 2, 2, 4]), Err(AdjGroupError::NotInvertible));
        assert_eq!(
            PGL2F5Element::new([2, 0, 0, 2]).unwrap(),
            PGL2F5Element::identity()
        );
        assert_eq!(
            PGL2F5Element::new([-1, 3, 0, 6]).unwrap().entries(),
            [1, 2, 0, 4]
        );
    }

    #[test]
    fn adjoint_action_satisfies_the_action_laws() {
        let all = PGL2F5Element::all_elements();
        let basis = [
            TraceZeroVec::new(1, 0, 0),
            TraceZeroVec::new(0, 1, 0),
            TraceZeroVec::new(0, 0, 1),
        ];
        for v in TraceZeroVec::all_vectors() {
            assert_eq!(adjoint_action(PGL2F5Element::identity(), v), v);
        }
        for g in &all {
            for h in &all {
                for &e in &basis {
                    assert_eq!(
                        adjoint_action(g.mul(h), e),
                        adjoint_action(*g, adjoint_action(*h, e))
                    );
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(408);
        let vectors = TraceZeroVec::all_vectors();
        for _ in 0..300 {
            let g = all[rng.gen_range(0..all.len())];
            let v = vectors[rng.gen_range(0..vectors.len())];
            let w = vectors[rng.gen_range(0..vectors.len())];
            let k = rng.gen_range(0..5i64);
            assert_eq!(
                adjoint_action(g, v + w.scale(k)),
                adjoint_action(g, v) + adjoint_action(g, w).scale(k)
            );
        }
        let trivial: Vec<&PGL2F5Element> = all
            .iter()
            .filter(|g| basis.iter().all(|&e| adjoint_action(**g, e) == e))
            .collect();
        assert_eq!(trivial, vec![&PGL2F5Element::identity()]);
    }

    #[test]
    fn quoted_stabilizer_facts_hold() {
        let [t1, t2, t3] = splitting_subgroup_generators();
        let v = line_vec();
        assert_eq!(adjoint_action(t3, v), v);
        assert_eq!(adjoint_action(t1, v), v);
        assert_eq!(adjoint_action(t2, v), -v);

        let sub = subgroup_elements(&splitting_subgroup_generators());
        assert_eq!(sub.len(), 12);
        let stab = stabilizer_in(&sub, v);
        assert_eq!(stab.len(), 6);
        assert!(stab.iter().any(|g| g.order() == 6));
        assert_eq!(subgroup_elements(&[t1, t3]), stab);
        assert!(acts_trivially(&stab, &invariant_line()));
        assert!(!acts_trivially(&sub, &invariant_line()));

        let all = PGL2F5Element::all_elements();
        let stab_full = stabilizer_in(&all, v);
        assert_eq!(stab_full.len(), 6);
        assert_eq!(stab_full, stab);
        assert_eq!(stabilizer_in(&sub, TraceZeroVec::zero()), sub);
    }

    #[test]
    fn displayed_splitting_is_invariant_only_for_the_subgroup() {
        let gens = splitting_subgroup_generators();
        let line = invariant_line();
        let plane = invariant_plane();
        assert_eq!(invariant_decomposition_check(&gens, &line, &plane), Ok(true));
        assert_eq!(invariant_decomposition_check(&gens, &plane, &line), Ok(true));
        assert_eq!(invariant_decomposition_check(&[], &line, &plane), Ok(true));

        let all = PGL2F5Element::all_elements();
        assert_eq!(invariant_decomposition_check(&all, &line, &plane), Ok(false));
        let axis1 = [TraceZeroVec::new(1, 0, 0)];
        let axis23 = [TraceZeroVec::new(0, 1, 0), TraceZeroVec::new(0, 0, 1)];
        assert_eq!(invariant_decomposition_check(&all, &axis1, &axis23), Ok(false));

        assert_eq!(
            invariant_decomposition_check(&gens, &[TraceZeroVec::new(3, 1, 0)], &plane),
            Err(AdjGroupError::NonComplementarySpans)
        );
        assert_eq!(
            invariant_decomposition_check(&gens, &axis1, &[TraceZeroVec::new(0, 1, 0)]),
            Err(AdjGroupError::NonComplementarySpans)
        );
    }

    #[test]
    fn normality_matches_the_trivial_action_predicate() {
        let gens = splitting_subgroup_generators();
        let sub = subgroup_elements(&gens);
        let line = invariant_line();
        let plane = invariant_plane();
        let stab = stabilizer_in(&sub, line_vec());

        assert_eq!(normality_check(&stab, &line, &plane), Ok(true));
        assert_eq!(normality_check(&sub, &line, &plane), Ok(false));
        assert_eq!(
            normality_check(&[PGL2F5Element::identity()], &line, &plane),
            Ok(true)
        );

        let table = group_table();
        let mut sub_mask: Mask = 0;
        for g in &sub {
            sub_mask |= 1 << table.elements.binary_search(g).unwrap();
        }
        let mut swept = 0;
        let mut normal = 0;
        for &mask in all_subgroup_masks() {
            if mask & !sub_mask != 0 {
                continue;
            }
            let h: Vec<PGL2F5Element> = mask_members(mask)
                .into_iter()
                .map(|i| table.elements[i])
                .collect();
            let expected = acts_trivially(&h, &line);
            assert_eq!(normality_check(&h, &line, &plane), Ok(expected));
            swept += 1;
            if expected {
                normal += 1;
            }
        }
        assert_eq!(swept, 16);
        assert_eq!(normal, 4);

        let [t1, _, _] = gens;
        assert_eq!(
            normality_check(&[t1], &line, &plane),
            Err(AdjGroupError::NotClosed)
        );
        assert_eq!(
            normality_check(&stab, &plane, &line),
            Err(AdjGroupError::NotALine)
        );
        assert_eq!(
            normality_check(&stab, &line, &[line_vec().scale(2)]),
            Err(AdjGroupError::NonComplementarySpans)
        );
        let all = PGL2F5Element::all_elements();
        assert_eq!(
            normality_check(&all, &line, &plane),
            Err(AdjGroupError::SplitNotPreserved)
        );
    }

    #[test]
    fn semidirect_product_laws_and_conjugation_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(409);
        let all = PGL2F5Element::all_elements();
        let vectors = TraceZeroVec::all_vectors();
        let random_elt = |rng: &mut ChaCha8Rng| {
            SemidirectElement::new(
                all[rng.gen_range(0..all.len())],
                vectors[rng.gen_range(0..vectors.len())],
            )
        };
        for _ in 0..200 {
            let x = random_elt(&mut rng);
            let y = random_elt(&mut rng);
            let z = random_elt(&mut rng);
            assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            assert_eq!(x.mul(&x.inv()), SemidirectElement::identity());
            assert_eq!(x.inv().mul(&x), SemidirectElement::identity());
            assert_eq!(
                x.mul(&y),
                SemidirectElement::new(
                    x.g().mul(&y.g()),
                    x.m() + adjoint_action(x.g(), y.m())
                )
            );
            let conjugated = y.conjugate_by(&x);
            let expected_g = x.g().mul(&y.g()).mul(&x.g().inv());
            let expected_m =
                x.m() + adjoint_action(x.g(), y.m()) - adjoint_action(expected_g, x.m());
            assert_eq!(conjugated, SemidirectElement::new(expected_g, expected_m));
        }
    }

    #[test]
    fn module_wide_normality_of_the_abelian_enlargement() {
        let sub = subgroup_elements(&splitting_subgroup_generators());
        let stab = stabilizer_in(&sub, line_vec());
        let plane_span: Vec<TraceZeroVec> = span_of(&invariant_plane()).into_iter().collect();
        assert_eq!(plane_span.len(), 25);
        let small: Vec<SemidirectElement> = stab
            .iter()
            .flat_map(|&g| plane_span.iter().map(move |&w| SemidirectElement::new(g, w)))
            .collect();
        let small_set: BTreeSet<SemidirectElement> = small.iter().copied().collect();
        assert_eq!(small_set.len(), 150);

        let module = TraceZeroVec::all_vectors();
        let mut big_set: BTreeSet<SemidirectElement> = BTreeSet::new();
        for &g in &sub {
            for &w in &module {
                big_set.insert(SemidirectElement::new(g, w));
            }
        }
        assert_eq!(big_set.len(), 1500);
        assert!(small_set.iter().all(|n| big_set.contains(n)));

        for x in &big_set {
            let xi = x.inv();
            for n in &small {
                assert!(small_set.contains(&x.mul(n).mul(&xi)));
            }
        }
    }

    #[test]
    fn subgroup_census_matches_the_known_types() {
        assert_eq!(all_subgroup_masks().len(), 156);
        let census = prime_to_five_census();
        let expected = vec![
            (SubgroupLabel::Trivial, 1, 1),
            (SubgroupLabel::C2, 2, 25),
            (SubgroupLabel::C3, 1, 10),
            (SubgroupLabel::C4, 1, 15),
            (SubgroupLabel::C2xC2, 2, 20),
            (SubgroupLabel::C6, 1, 10),
            (SubgroupLabel::S3, 2, 20),
            (SubgroupLabel::D8, 1, 15),
            (SubgroupLabel::S3xC2, 1, 10),
            (SubgroupLabel::A4, 1, 5),
            (SubgroupLabel::S4, 1, 5),
        ];
        assert_eq!(census, expected);

        let labels = subgroups_prime_to_5();
        assert_eq!(labels.len(), 11);
        assert!(labels.contains(&SubgroupLabel::S3xC2));
        assert!(labels.iter().all(|label| label.order() % 5 != 0));
        assert_eq!(
            labels.iter().map(SubgroupLabel::to_string).collect::<Vec<_>>(),
            vec!["1", "C2", "C3", "C4", "C2xC2", "C6", "S3", "D8", "S3xC2", "A4", "S4"]
        );
    }

    #[test]
    fn unique_proper_normal_subgroup_is_the_determinant_square_kernel() {
        let table = group_table();
        let normal = normal_subgroup_masks();
        let mut orders: Vec<u32> = normal.iter().map(|m| m.count_ones()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![1, 60, 120]);

        let middle = normal
            .iter()
            .copied()
            .find(|m| m.count_ones() == 60)
            .unwrap();
        for (i, g) in table.elements.iter().enumerate() {
            let [a, b, c, d] = g.entries();
            let det = (i32::from(a) * i32::from(d) - i32::from(b) * i32::from(c)).rem_euclid(5);
            let square_det = det == 1 || det == 4;
            assert_eq!(middle >> i & 1 == 1, square_det);
        }

        let sub = subgroup_elements(&splitting_subgroup_generators());
        let mut sub_mask: Mask = 0;
        for g in &sub {
            sub_mask |= 1 << table.elements.binary_search(g).unwrap();
        }
        let core = (0..table.elements.len())
            .map(|g| conjugate_mask(table, sub_mask, g))
            .fold(sub_mask, |acc, m| acc & m);
        assert_eq!(core, 1 << table.identity);
    }

    #[test]
    fn invariant_subspace_census_examples() {
        let all = PGL2F5Element::all_elements();
        assert_eq!(invariant_subspace_census(&all), (0, 0));
        let sub = subgroup_elements(&splitting_subgroup_generators());
        assert_eq!(invariant_subspace_census(&sub), (1, 1));
        let stab = stabilizer_in(&sub, line_vec());
        assert_eq!(invariant_subspace_census(&stab), (1, 1));
        assert_eq!(
            invariant_subspace_census(&[PGL2F5Element::identity()]),
            (31, 31)
        );
    }

    #[test]
    fn verification_suite_reports_all_pass() {
        let suite = verification_suite();
        assert_eq!(suite.len(), 11);
        for check in &suite {
            assert!(check.pass, "check {} failed: {}", check.name, check.detail);
        }
    }
}
