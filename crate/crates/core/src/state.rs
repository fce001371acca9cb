//! Quantum-state types and the line-oriented state file format.
//!
//! Basis ordering: the first listed particle is the most significant digit of
//! the flat index. Every permutation operator in [`crate::regroup`] depends on
//! this convention.
//!
//! File grammar (`#` starts a comment):
//!
//! ```text
//! dims: 2 2 2
//! kind: pure            # or: mixed
//! a <index> <re> <im>   # pure amplitude
//! m <row> <col> <re> <im>  # mixed matrix entry
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use log::warn;

use crate::error::{Error, Result};
use crate::numeric::{hermitian_eigenvalues, ComplexMatrix, C64, HERMITIAN_TOL};

/// Largest supported total Hilbert-space dimension (12 qubits).
pub const MAX_TOTAL_DIM: usize = 4096;

/// Pure states whose norm is off by more than this are renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-12;
/// Pure states whose norm is off by more than this are rejected.
pub const NORM_REJECT_TOL: f64 = 1e-6;
/// Trace and PSD tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemShape {
    dims: Vec<usize>,
    total: usize,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidShape(format!(
                "need at least 2 particles, got {}",
                dims.len()
            )));
        }
        if let Some((k, d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidShape(format!(
                "particle {k} has dimension {d}; each dimension must be at least 2"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d).filter(|&t| t <= MAX_TOTAL_DIM))
            .ok_or_else(|| {
                Error::InvalidShape(format!(
                    "total dimension of {dims:?} exceeds {MAX_TOTAL_DIM}"
                ))
            })?;
        Ok(Self { dims, total })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn particles(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Mixed-radix flat index, first particle most significant.
    pub fn flat_index(&self, local: &[usize]) -> Result<usize> {
        if local.len() != self.dims.len() {
            return Err(Error::IndexOutOfRange(format!(
                "{} local indices for {} particles",
                local.len(),
                self.dims.len()
            )));
        }
        local
            .iter()
            .zip(&self.dims)
            .enumerate()
            .try_fold(0usize, |acc, (k, (&i, &d))| {
                if i < d {
                    Ok(acc * d + i)
                } else {
                    Err(Error::IndexOutOfRange(format!(
                        "local index {i} for particle {k} of dimension {d}"
                    )))
                }
            })
    }

    /// Inverse of [`Self::flat_index`].
    pub fn local_indices(&self, flat: usize) -> Result<Vec<usize>> {
        if flat >= self.total {
            return Err(Error::IndexOutOfRange(format!(
                "flat index {flat} for total dimension {}",
                self.total
            )));
        }
        let mut out = vec![0; self.dims.len()];
        let mut rest = flat;
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = rest % d;
            rest /= d;
        }
        Ok(out)
    }

    /// Product of the dimensions at `positions`.
    pub fn dim_of(&self, positions: &[usize]) -> usize {
        positions.iter().map(|&p| self.dims[p]).product()
    }
}

impl fmt::Display for SubsystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    shape: SubsystemShape,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Validates length and finiteness; renormalizes with a warning when the
    /// norm is off by more than [`RENORMALIZE_TOL`], rejects when off by more
    /// than [`NORM_REJECT_TOL`].
    pub fn new(shape: SubsystemShape, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_amplitudes(&shape, &amplitudes)?;
        let norm = norm(&amplitudes);
        let deviation = (norm - 1.0).abs();
        if deviation > NORM_REJECT_TOL {
            return Err(Error::Normalization(format!(
                "state norm {norm} deviates from 1 by {deviation:e} (limit {NORM_REJECT_TOL:e})"
            )));
        }
        let amplitudes = if deviation > RENORMALIZE_TOL {
            warn!("renormalizing pure state (norm deviation {deviation:e})");
            amplitudes.into_iter().map(|a| a / norm).collect()
        } else {
            amplitudes
        };
        Ok(Self { shape, amplitudes })
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(shape: SubsystemShape, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_amplitudes(&shape, &amplitudes)?;
        let norm = norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Normalization("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            shape,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis state with the given local indices.
    pub fn basis(shape: SubsystemShape, local: &[usize]) -> Result<Self> {
        let k = shape.flat_index(local)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); shape.total()];
        amplitudes[k] = C64::new(1.0, 0.0);
        Ok(Self { shape, amplitudes })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        let shape = SubsystemShape::qubits(n)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); shape.total()];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amplitudes[0] = C64::new(h, 0.0);
        amplitudes[shape.total() - 1] = C64::new(h, 0.0);
        Ok(Self { shape, amplitudes })
    }

    /// Tensor product `self ⊗ other`, particles of `self` first.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut dims = self.shape.dims.clone();
        dims.extend_from_slice(&other.shape.dims);
        let shape = SubsystemShape::new(dims)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self { shape, amplitudes })
    }

    pub(crate) fn from_parts_unchecked(shape: SubsystemShape, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(shape.total(), amplitudes.len());
        Self { shape, amplitudes }
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            shape: self.shape.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    fn check_amplitudes(shape: &SubsystemShape, amplitudes: &[C64]) -> Result<()> {
        if amplitudes.len() != shape.total() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                shape.total()
            )));
        }
        if let Some(k) = amplitudes
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Normalization(format!("non-finite amplitude at index {k}")));
        }
        Ok(())
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    shape: SubsystemShape,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates size, Hermiticity, unit trace, and positive semidefiniteness.
    pub fn new(shape: SubsystemShape, matrix: ComplexMatrix) -> Result<Self> {
        let n = shape.total();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for total dimension {n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation()?;
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (max deviation {dev:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not positive semidefinite (minimum eigenvalue {min:e})"
            )));
        }
        Ok(Self { shape, matrix })
    }

    pub(crate) fn from_parts_unchecked(shape: SubsystemShape, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(shape.total(), matrix.rows());
        Self { shape, matrix }
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // For Hermitian ρ, Tr ρ² = Σ |ρ_ij|².
        self.matrix.frobenius_norm_sq()
    }
}

/// A particle grouping: `side1` is one big subsystem, the complement the other.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    shape: SubsystemShape,
    side1: Vec<usize>,
}

impl Bipartition {
    pub fn new(shape: SubsystemShape, side1: Vec<usize>) -> Result<Self> {
        let n = shape.particles();
        if side1.is_empty() {
            return Err(Error::InvalidCut("side 1 is empty".into()));
        }
        if side1.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCut(format!(
                "positions {side1:?} are not strictly increasing"
            )));
        }
        if let Some(&p) = side1.iter().find(|&&p| p >= n) {
            return Err(Error::InvalidCut(format!(
                "position {p} out of range for {n} particles"
            )));
        }
        if side1.len() > n / 2 {
            return Err(Error::InvalidCut(format!(
                "side 1 has {} particles; at most {} allowed for {n} particles",
                side1.len(),
                n / 2
            )));
        }
        Ok(Self { shape, side1 })
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn side1(&self) -> &[usize] {
        &self.side1
    }

    pub fn side2(&self) -> Vec<usize> {
        (0..self.shape.particles())
            .filter(|p| !self.side1.contains(p))
            .collect()
    }

    /// Dimension of side 1.
    pub fn n1(&self) -> usize {
        self.shape.dim_of(&self.side1)
    }

    /// Dimension of side 2.
    pub fn n2(&self) -> usize {
        self.shape.total() / self.n1()
    }

    pub(crate) fn check_shape(&self, shape: &SubsystemShape) -> Result<()> {
        if &self.shape == shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "cut over dims [{}] applied to state with dims [{shape}]",
                self.shape
            )))
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "{{{}}} | {{{}}}", join(&self.side1), join(&self.side2()))
    }
}

/// Either kind of state a file can hold.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn shape(&self) -> &SubsystemShape {
        match self {
            State::Pure(p) => p.shape(),
            State::Mixed(d) => d.shape(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            State::Pure(_) => "pure",
            State::Mixed(_) => "mixed",
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(d) => d.clone(),
        }
    }

    /// Serializes to the file grammar with 17 significant digits; zero
    /// entries are omitted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dims: {}", self.shape());
        let _ = writeln!(out, "kind: {}", self.kind_name());
        let zero = C64::new(0.0, 0.0);
        match self {
            State::Pure(p) => {
                for (k, a) in p.amplitudes().iter().enumerate().filter(|(_, a)| **a != zero) {
                    let _ = writeln!(out, "a {k} {:.16e} {:.16e}", a.re, a.im);
                }
            }
            State::Mixed(d) => {
                let m = d.matrix();
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let z = m[(r, c)];
                        if z != zero {
                            let _ = writeln!(out, "m {r} {c} {:.16e} {:.16e}", z.re, z.im);
                        }
                    }
                }
            }
        }
        out
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityMatrix> for State {
    fn from(d: DensityMatrix) -> Self {
        State::Mixed(d)
    }
}

/// Parses the state file grammar and validates the result.
pub fn parse_state(text: &str) -> Result<State> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, dims_line) = lines.next().ok_or(Error::Syntax {
        line: 1,
        msg: "missing `dims:` line".into(),
    })?;
    let dims_body = dims_line.strip_prefix("dims:").ok_or_else(|| Error::Syntax {
        line: line_no,
        msg: format!("expected `dims: d1 d2 ...`, found `{dims_line}`"),
    })?;
    let dims = dims_body
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::Syntax {
                line: line_no,
                msg: format!("invalid dimension `{tok}`"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let shape = SubsystemShape::new(dims).map_err(|e| Error::Syntax {
        line: line_no,
        msg: e.to_string(),
    })?;

    let (line_no, kind_line) = lines.next().ok_or(Error::Syntax {
        line: line_no + 1,
        msg: "missing `kind:` line".into(),
    })?;
    let kind = kind_line
        .strip_prefix("kind:")
        .map(str::trim)
        .ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: format!("expected `kind: pure|mixed`, found `{kind_line}`"),
        })?;

    match kind {
        "pure" => parse_pure_body(shape, lines),
        "mixed" => parse_mixed_body(shape, lines),
        other => Err(Error::Syntax {
            line: line_no,
            msg: format!("unknown kind `{other}` (expected pure or mixed)"),
        }),
    }
}

fn parse_fields<'a>(line_no: usize, line: &'a str, tag: &str, count: usize) -> Result<Vec<&'a str>> {
    let mut toks = line.split_whitespace();
    let head = toks.next().unwrap_or("");
    if head != tag {
        return Err(Error::Syntax {
            line: line_no,
            msg: format!("expected a `{tag}` entry line, found `{line}`"),
        });
    }
    let fields: Vec<&str> = toks.collect();
    if fields.len() != count {
        return Err(Error::Syntax {
            line: line_no,
            msg: format!("`{tag}` line needs {count} fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

fn parse_index(line_no: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Syntax {
        line: line_no,
        msg: format!("invalid index `{tok}`"),
    })
}

fn parse_float(line_no: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: format!("invalid number `{tok}`"),
        })
}

fn parse_pure_body<'a>(
    shape: SubsystemShape,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<State> {
    let mut amplitudes = vec![C64::new(0.0, 0.0); shape.total()];
    let mut seen = vec![false; shape.total()];
    for (line_no, line) in lines {
        let f = parse_fields(line_no, line, "a", 3)?;
        let k = parse_index(line_no, f[0])?;
        if k >= shape.total() {
            return Err(Error::IndexOutOfRange(format!(
                "line {line_no}: amplitude index {k} for total dimension {}",
                shape.total()
            )));
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Syntax {
                line: line_no,
                msg: format!("duplicate amplitude index {k}"),
            });
        }
        amplitudes[k] = C64::new(parse_float(line_no, f[1])?, parse_float(line_no, f[2])?);
    }
    Ok(State::Pure(PureState::new(shape, amplitudes)?))
}

fn parse_mixed_body<'a>(
    shape: SubsystemShape,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<State> {
    let n = shape.total();
    let mut entries: BTreeMap<(usize, usize), (usize, C64)> = BTreeMap::new();
    for (line_no, line) in lines {
        let f = parse_fields(line_no, line, "m", 4)?;
        let r = parse_index(line_no, f[0])?;
        let c = parse_index(line_no, f[1])?;
        if r >= n || c >= n {
            return Err(Error::IndexOutOfRange(format!(
                "line {line_no}: entry ({r}, {c}) for total dimension {n}"
            )));
        }
        let z = C64::new(parse_float(line_no, f[2])?, parse_float(line_no, f[3])?);
        if entries.insert((r, c), (line_no, z)).is_some() {
            return Err(Error::Syntax {
                line: line_no,
                msg: format!("duplicate entry ({r}, {c})"),
            });
        }
    }

    // Off-diagonal entries must come in explicit conjugate pairs.
    for (&(r, c), &(line_no, z)) in &entries {
        if r == c {
            continue;
        }
        match entries.get(&(c, r)) {
            None => {
                return Err(Error::InvalidDensity(format!(
                    "line {line_no}: entry ({r}, {c}) has no matching ({c}, {r})"
                )))
            }
            Some(&(_, w)) if (z - w.conj()).norm() > HERMITIAN_TOL => {
                return Err(Error::InvalidDensity(format!(
                    "line {line_no}: entries ({r}, {c}) and ({c}, {r}) are not conjugate"
                )))
            }
            _ => {}
        }
    }

    let mut matrix = ComplexMatrix::zeros(n, n);
    for (&(r, c), &(_, z)) in &entries {
        matrix.set(r, c, z);
    }
    Ok(State::Mixed(DensityMatrix::new(shape, matrix)?))
}
