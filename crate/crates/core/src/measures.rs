//! Bipartite entanglement measures across a single cut.
//!
//! Matrices passed to [`partial_trace`] and [`partial_transpose`] must already
//! be regrouped so that side 1 is the leading tensor factor of dimension
//! `n1` and side 2 the trailing factor of dimension `n2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{hermitian_eigenvalues, ComplexMatrix, C64};
use crate::regroup::{regroup, regroup_pure};
use crate::state::{Bipartition, DensityMatrix, PureState, State};

/// Magnitudes at or below this are reported as exactly zero.
pub const ZERO_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Concurrence,
    Entropy,
    Negativity,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [
        MeasureKind::Concurrence,
        MeasureKind::Entropy,
        MeasureKind::Negativity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Entropy => "entropy",
            MeasureKind::Negativity => "negativity",
        }
    }

    /// Whether the measure is only defined here for pure states.
    pub fn requires_pure(self) -> bool {
        !matches!(self, MeasureKind::Negativity)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::OutOfRange(format!(
                    "unknown measure `{s}` (expected concurrence, entropy or negativity)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Dimensions of the two factors of a regrouped matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grouping {
    pub n1: usize,
    pub n2: usize,
}

impl Grouping {
    pub fn of(cut: &Bipartition) -> Self {
        Self {
            n1: cut.n1(),
            n2: cut.n2(),
        }
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.n1 * self.n2;
        if m.rows() != n || m.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for grouping {}x{}",
                m.rows(),
                m.cols(),
                self.n1,
                self.n2
            )));
        }
        Ok(())
    }
}

/// One bipartite measure value across one cut.
#[derive(Clone, Debug, PartialEq)]
pub struct CutValue {
    pub cut: Bipartition,
    pub kind: MeasureKind,
    pub value: f64,
}

pub(crate) fn snap(value: f64) -> f64 {
    if value.abs() <= ZERO_SNAP {
        0.0
    } else {
        value
    }
}

/// Traces out the side not kept.
pub fn partial_trace(rho: &ComplexMatrix, g: Grouping, keep: Side) -> Result<ComplexMatrix> {
    g.check(rho)?;
    let Grouping { n1, n2 } = g;
    let at = |i: usize, j: usize, k: usize, l: usize| rho[(i * n2 + j, k * n2 + l)];
    let out = match keep {
        Side::First => {
            let mut out = ComplexMatrix::zeros(n1, n1);
            for i in 0..n1 {
                for k in 0..n1 {
                    out.set(i, k, (0..n2).map(|j| at(i, j, k, j)).sum());
                }
            }
            out
        }
        Side::Second => {
            let mut out = ComplexMatrix::zeros(n2, n2);
            for j in 0..n2 {
                for l in 0..n2 {
                    out.set(j, l, (0..n1).map(|i| at(i, j, i, l)).sum());
                }
            }
            out
        }
    };
    Ok(out)
}

/// Transposes the indices of one side: for side 1,
/// `((i,j),(k,l)) ↦ ((k,j),(i,l))`.
pub fn partial_transpose(rho: &ComplexMatrix, g: Grouping, side: Side) -> Result<ComplexMatrix> {
    g.check(rho)?;
    let Grouping { n1, n2 } = g;
    let n = n1 * n2;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n1 {
                for l in 0..n2 {
                    let z = rho[(i * n2 + j, k * n2 + l)];
                    let (r, c) = match side {
                        Side::First => (k * n2 + j, i * n2 + l),
                        Side::Second => (i * n2 + l, k * n2 + j),
                    };
                    out.set(r, c, z);
                }
            }
        }
    }
    Ok(out)
}

/// Amplitudes of the regrouped state as an `n1 × n2` row-major block.
fn amplitude_block(psi: &PureState, cut: &Bipartition) -> Result<(Vec<C64>, Grouping)> {
    let grouped = regroup_pure(psi, cut)?;
    Ok((grouped.amplitudes().to_vec(), Grouping::of(cut)))
}

/// Reduced density matrix of a pure state on one side of the cut.
pub fn reduced_state(psi: &PureState, cut: &Bipartition, keep: Side) -> Result<ComplexMatrix> {
    let (m, Grouping { n1, n2 }) = amplitude_block(psi, cut)?;
    let out = match keep {
        Side::First => {
            let mut out = ComplexMatrix::zeros(n1, n1);
            for i in 0..n1 {
                for k in 0..n1 {
                    let z = (0..n2).map(|j| m[i * n2 + j] * m[k * n2 + j].conj()).sum();
                    out.set(i, k, z);
                }
            }
            out
        }
        Side::Second => {
            let mut out = ComplexMatrix::zeros(n2, n2);
            for j in 0..n2 {
                for l in 0..n2 {
                    let z = (0..n1).map(|i| m[i * n2 + j] * m[i * n2 + l].conj()).sum();
                    out.set(j, l, z);
                }
            }
            out
        }
    };
    Ok(out)
}

/// `√(2(1 − Tr ρ_r²))` across the cut.
///
/// `1 − Tr ρ_r²` is evaluated as `2 Σ |M_ij M_kl − M_il M_kj|²` over the 2×2
/// minors of the regrouped amplitude block `M`. That sum is the same quantity
/// for normalized states, but it is a sum of non-negative terms and stays at
/// rounding level (≈1e-32) for product states, where the direct purity
/// difference would leave ≈1e-8 after the square root.
pub fn pure_concurrence(psi: &PureState, cut: &Bipartition) -> Result<CutValue> {
    let (m, Grouping { n1, n2 }) = amplitude_block(psi, cut)?;
    let mut minors = 0.0;
    for i in 0..n1 {
        for k in i + 1..n1 {
            let (ri, rk) = (&m[i * n2..(i + 1) * n2], &m[k * n2..(k + 1) * n2]);
            for j in 0..n2 {
                for l in j + 1..n2 {
                    minors += (ri[j] * rk[l] - ri[l] * rk[j]).norm_sqr();
                }
            }
        }
    }
    Ok(CutValue {
        cut: cut.clone(),
        kind: MeasureKind::Concurrence,
        value: snap(2.0 * minors.sqrt()),
    })
}

/// Von Neumann entropy (bits) of the reduced state on `side`.
pub fn entropy_of_side(psi: &PureState, cut: &Bipartition, side: Side) -> Result<f64> {
    let reduced = reduced_state(psi, cut, side)?;
    let value: f64 = hermitian_eigenvalues(&reduced)?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    Ok(snap(value))
}

/// `−Σ λ log₂ λ` over the reduced state's spectrum, with `0 log 0 = 0`.
pub fn entanglement_entropy(psi: &PureState, cut: &Bipartition) -> Result<CutValue> {
    // Both sides share their nonzero spectrum; diagonalize the smaller one.
    let side = if cut.n1() <= cut.n2() {
        Side::First
    } else {
        Side::Second
    };
    Ok(CutValue {
        cut: cut.clone(),
        kind: MeasureKind::Entropy,
        value: entropy_of_side(psi, cut, side)?,
    })
}

/// Sum of the absolute negative eigenvalues of the partial transpose on
/// `side`.
pub fn negativity_on_side(rho: &DensityMatrix, cut: &Bipartition, side: Side) -> Result<f64> {
    let grouped = regroup(rho, cut)?;
    let pt = partial_transpose(grouped.matrix(), Grouping::of(cut), side)?;
    let value: f64 = hermitian_eigenvalues(&pt)?
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(f64::abs)
        .sum();
    Ok(snap(value))
}

/// `(‖ρ^{T_1}‖₁ − 1)/2`, computed as the absolute sum of negative
/// eigenvalues of the side-1 partial transpose.
pub fn negativity(rho: &DensityMatrix, cut: &Bipartition) -> Result<CutValue> {
    Ok(CutValue {
        cut: cut.clone(),
        kind: MeasureKind::Negativity,
        value: negativity_on_side(rho, cut, Side::First)?,
    })
}

/// Evaluates `kind` on `state` across `cut`; concurrence and entropy on a
/// mixed state are rejected.
pub fn cut_value(state: &State, cut: &Bipartition, kind: MeasureKind) -> Result<CutValue> {
    match (state, kind) {
        (State::Pure(p), MeasureKind::Concurrence) => pure_concurrence(p, cut),
        (State::Pure(p), MeasureKind::Entropy) => entanglement_entropy(p, cut),
        (State::Pure(p), MeasureKind::Negativity) => negativity(&p.to_density(), cut),
        (State::Mixed(d), MeasureKind::Negativity) => negativity(d, cut),
        (State::Mixed(_), k) => Err(Error::RequiresPureState(k)),
    }
}
