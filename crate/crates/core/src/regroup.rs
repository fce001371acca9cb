//! Bipartite groupings and the permutation operators that realize them.
//!
//! A cut is realized by an operator `G` that moves the cut's side-1 particles
//! (in increasing order) to the front while preserving relative order on each
//! side: for cut `{1,2}` of four particles, `G|abcd⟩ = |bcad⟩`. `G` is built
//! from adjacent two-particle swaps, each a [`pair_permutation`] sandwiched
//! between identities. [`GroupingPlan::permutation`] stores `U = Gᵀ`, so the
//! regrouped density matrix is `Uᵀ ρ U`.
//!
//! [`regroup_oracle`] computes the same relabeling directly on flat indices,
//! with no matrices involved, and is the reference the matrix path is checked
//! against.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{kron, matmul, ComplexMatrix, C64};
use crate::state::{Bipartition, DensityMatrix, PureState, SubsystemShape};

/// Above this total dimension the index-relabel path replaces the matrix path
/// inside [`regroup`] and [`regroup_pure`].
pub const MATRIX_PATH_MAX_DIM: usize = 256;

/// How complementary half-size cuts are treated for even particle counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CutMode {
    /// Every subset of size 1..=⌊N/2⌋, so both halves of an even split appear.
    #[default]
    Literal,
    /// Half-size cuts only when they contain particle 0.
    Distinct,
}

impl fmt::Display for CutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutMode::Literal => "literal",
            CutMode::Distinct => "distinct",
        })
    }
}

/// All subsets of `{0..N-1}` with size `1..=⌊N/2⌋`, ordered by size and then
/// lexicographically.
pub fn enumerate_bipartitions(shape: &SubsystemShape) -> Vec<Bipartition> {
    enumerate_cuts(shape, CutMode::Literal)
}

pub fn enumerate_cuts(shape: &SubsystemShape, mode: CutMode) -> Vec<Bipartition> {
    let n = shape.particles();
    let mut cuts = Vec::new();
    for size in 1..=n / 2 {
        let half = 2 * size == n;
        for subset in Combinations::new(n, size) {
            if mode == CutMode::Distinct && half && subset[0] != 0 {
                continue;
            }
            cuts.push(
                Bipartition::new(shape.clone(), subset)
                    .expect("enumerated subsets are valid cuts"),
            );
        }
    }
    cuts
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        // Rightmost slot that can still be incremented.
        if let Some(i) = (0..k).rev().find(|&i| next[i] < self.n - k + i) {
            next[i] += 1;
            for j in i + 1..k {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// The commutation matrix `P(n1, n2) = Σ_ij E_ij ⊗ E_ijᵀ`, with `E_ij` the
/// `n1 × n2` matrix unit.
///
/// Entry `(i·n2 + j, j·n1 + i)` is 1. As an operator,
/// `P(n1,n2)·(y ⊗ x) = x ⊗ y` for `x ∈ ℂ^n1`, `y ∈ ℂ^n2`; equivalently
/// `P(n1,n2)ᵀ·(x ⊗ y) = y ⊗ x`, and `P(n1,n2)ᵀ = P(n2,n1)`.
pub fn pair_permutation(n1: usize, n2: usize) -> Result<ComplexMatrix> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::OutOfRange(format!(
            "pair_permutation needs positive dimensions, got ({n1}, {n2})"
        )));
    }
    let size = n1
        .checked_mul(n2)
        .filter(|s| s.checked_mul(*s).is_some())
        .ok_or_else(|| Error::DimensionOverflow(format!("pair_permutation({n1}, {n2})")))?;
    let mut p = ComplexMatrix::zeros(size, size);
    for i in 0..n1 {
        for j in 0..n2 {
            p.set(i * n2 + j, j * n1 + i, C64::new(1.0, 0.0));
        }
    }
    Ok(p)
}

/// Full-space operator swapping the particles at `t` and `t + 1` of `layout`.
fn adjacent_swap(layout: &[usize], t: usize) -> Result<ComplexMatrix> {
    let left: usize = layout[..t].iter().product();
    let right: usize = layout[t + 2..].iter().product();
    // Maps a ⊗ b (a of dimension layout[t]) to b ⊗ a.
    let swap = pair_permutation(layout[t + 1], layout[t])?;
    kron(
        &kron(&ComplexMatrix::identity(left), &swap)?,
        &ComplexMatrix::identity(right),
    )
}

fn move_in_layout(layout: &[usize], i: usize, j: usize) -> Result<ComplexMatrix> {
    let total: usize = layout.iter().product();
    let mut layout = layout.to_vec();
    let mut op = ComplexMatrix::identity(total);
    for t in (i..j).rev() {
        op = matmul(&adjacent_swap(&layout, t)?, &op)?;
        layout.swap(t, t + 1);
    }
    Ok(op)
}

/// Operator that moves particle `j` to position `i` (`i ≤ j`), shifting
/// particles `i..j` one slot right. Built as a chain of adjacent swaps;
/// `move_permutation(shape, k, k)` is the identity.
pub fn move_permutation(shape: &SubsystemShape, i: usize, j: usize) -> Result<ComplexMatrix> {
    let n = shape.particles();
    if j >= n {
        return Err(Error::IndexOutOfRange(format!(
            "position {j} for {n} particles"
        )));
    }
    if i > j {
        return Err(Error::OutOfRange(format!(
            "move_permutation needs i <= j, got i = {i}, j = {j}"
        )));
    }
    move_in_layout(shape.dims(), i, j)
}

/// A cut together with the permutation that realizes it.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupingPlan {
    pub cut: Bipartition,
    /// `U` with `ρ_k = Uᵀ ρ U`; a 0/1 permutation matrix.
    pub permutation: ComplexMatrix,
    /// `(n1, n2)`: dimensions of side 1 and side 2.
    pub grouped_shape: (usize, usize),
}

impl GroupingPlan {
    /// The ket-space grouping operator `G = Uᵀ`.
    pub fn ket_operator(&self) -> ComplexMatrix {
        self.permutation.transpose()
    }
}

/// Composes the moves that bring side 1 to the front.
pub fn grouping_unitary(cut: &Bipartition) -> Result<GroupingPlan> {
    let shape = cut.shape();
    let mut layout = shape.dims().to_vec();
    let mut g = ComplexMatrix::identity(shape.total());
    for (slot, &pos) in cut.side1().iter().enumerate() {
        // Earlier moves only shift particles left of `pos`, so it is still
        // at its original position here.
        let step = move_in_layout(&layout, slot, pos)?;
        g = matmul(&step, &g)?;
        layout[slot..=pos].rotate_right(1);
    }
    Ok(GroupingPlan {
        cut: cut.clone(),
        permutation: g.transpose(),
        grouped_shape: (cut.n1(), cut.n2()),
    })
}

/// Shape after regrouping: side-1 dims, then side-2 dims.
pub fn regrouped_shape(cut: &Bipartition) -> SubsystemShape {
    let dims = cut.shape().dims();
    let order = cut.side1().iter().copied().chain(cut.side2());
    SubsystemShape::new(order.map(|p| dims[p]).collect())
        .expect("a permutation of a valid shape is valid")
}

/// `σ`: original flat index → regrouped flat index.
pub fn index_map(cut: &Bipartition) -> Vec<usize> {
    let shape = cut.shape();
    let target = regrouped_shape(cut);
    let order: Vec<usize> = cut.side1().iter().copied().chain(cut.side2()).collect();
    (0..shape.total())
        .map(|r| {
            let local = shape.local_indices(r).expect("r < total");
            let moved: Vec<usize> = order.iter().map(|&p| local[p]).collect();
            target.flat_index(&moved).expect("moved indices stay in range")
        })
        .collect()
}

/// `Uᵀ ρ U` via explicit permutation matrices.
pub fn regroup_density(rho: &DensityMatrix, cut: &Bipartition) -> Result<DensityMatrix> {
    cut.check_shape(rho.shape())?;
    let plan = grouping_unitary(cut)?;
    let u = &plan.permutation;
    let m = matmul(&matmul(&u.transpose(), rho.matrix())?, u)?;
    Ok(DensityMatrix::from_parts_unchecked(regrouped_shape(cut), m))
}

/// Regrouping by copying entry `(r, c)` to `(σ(r), σ(c))`.
pub fn regroup_oracle(rho: &DensityMatrix, cut: &Bipartition) -> Result<DensityMatrix> {
    cut.check_shape(rho.shape())?;
    let sigma = index_map(cut);
    let n = sigma.len();
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(n, n);
    for (r, &sr) in sigma.iter().enumerate() {
        for (c, &sc) in sigma.iter().enumerate() {
            out.set(sr, sc, src[(r, c)]);
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(regrouped_shape(cut), out))
}

/// Inverse of [`regroup_oracle`]: takes a regrouped matrix back to the
/// original particle order.
pub fn ungroup_oracle(rho_k: &DensityMatrix, cut: &Bipartition) -> Result<DensityMatrix> {
    let grouped = regrouped_shape(cut);
    if rho_k.shape() != &grouped {
        return Err(Error::ShapeMismatch(format!(
            "expected regrouped dims [{grouped}], got [{}]",
            rho_k.shape()
        )));
    }
    let sigma = index_map(cut);
    let n = sigma.len();
    let src = rho_k.matrix();
    let mut out = ComplexMatrix::zeros(n, n);
    for (r, &sr) in sigma.iter().enumerate() {
        for (c, &sc) in sigma.iter().enumerate() {
            out.set(r, c, src[(sr, sc)]);
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(cut.shape().clone(), out))
}

/// Inverse of [`regroup_density`]: `U ρ_k Uᵀ`.
pub fn ungroup_density(rho_k: &DensityMatrix, cut: &Bipartition) -> Result<DensityMatrix> {
    let grouped = regrouped_shape(cut);
    if rho_k.shape() != &grouped {
        return Err(Error::ShapeMismatch(format!(
            "expected regrouped dims [{grouped}], got [{}]",
            rho_k.shape()
        )));
    }
    let plan = grouping_unitary(cut)?;
    let u = &plan.permutation;
    let m = matmul(&matmul(u, rho_k.matrix())?, &u.transpose())?;
    Ok(DensityMatrix::from_parts_unchecked(cut.shape().clone(), m))
}

/// Matrix path up to [`MATRIX_PATH_MAX_DIM`], index path above.
pub fn regroup(rho: &DensityMatrix, cut: &Bipartition) -> Result<DensityMatrix> {
    if rho.shape().total() <= MATRIX_PATH_MAX_DIM {
        regroup_density(rho, cut)
    } else {
        regroup_oracle(rho, cut)
    }
}

/// Regroups a pure state's amplitudes, `G ψ`.
pub fn regroup_pure(psi: &PureState, cut: &Bipartition) -> Result<PureState> {
    cut.check_shape(psi.shape())?;
    let amplitudes = if psi.shape().total() <= MATRIX_PATH_MAX_DIM {
        grouping_unitary(cut)?.ket_operator().apply(psi.amplitudes())?
    } else {
        let mut out = vec![C64::new(0.0, 0.0); psi.shape().total()];
        for (r, s) in index_map(cut).into_iter().enumerate() {
            out[s] = psi.amplitudes()[r];
        }
        out
    };
    Ok(PureState::from_parts_unchecked(regrouped_shape(cut), amplitudes))
}
