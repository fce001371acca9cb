//! Whole-system figures: the cut-averaged measure, the separability verdict,
//! and the two closed-form families used for self-validation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::{cut_value, snap, CutValue, MeasureKind};
use crate::numeric::{ComplexMatrix, C64};
use crate::regroup::{enumerate_cuts, CutMode};
use crate::state::{Bipartition, DensityMatrix, PureState, State, SubsystemShape};

/// Default zero threshold for [`classify`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficient normalization tolerance for the three-qubit family.
pub const COEFF_NORM_TOL: f64 = 1e-8;

/// Particle-count range accepted by the isotropic family.
pub const ISOTROPIC_MIN_N: usize = 2;
pub const ISOTROPIC_MAX_N: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureReport {
    pub kind: MeasureKind,
    pub cut_mode: CutMode,
    /// One entry per enumerated cut, in enumeration order.
    pub per_cut: Vec<CutValue>,
    pub e_bar: f64,
    pub cut_count: usize,
}

impl MeasureReport {
    fn from_values(kind: MeasureKind, cut_mode: CutMode, per_cut: Vec<CutValue>) -> Self {
        let cut_count = per_cut.len();
        let sum: f64 = per_cut.iter().map(|v| v.value).sum();
        Self {
            kind,
            cut_mode,
            e_bar: sum / cut_count as f64,
            per_cut,
            cut_count,
        }
    }
}

/// Cut-averaged measure with the literal cut list.
pub fn free_entanglement(state: &State, kind: MeasureKind) -> Result<MeasureReport> {
    free_entanglement_with_mode(state, kind, CutMode::Literal)
}

pub fn free_entanglement_with_mode(
    state: &State,
    kind: MeasureKind,
    mode: CutMode,
) -> Result<MeasureReport> {
    if matches!(state, State::Mixed(_)) && kind.requires_pure() {
        return Err(Error::RequiresPureState(kind));
    }
    // Pure-state negativity goes through the density matrix once, not per cut.
    let owned;
    let state = match (state, kind) {
        (State::Pure(p), MeasureKind::Negativity) => {
            owned = State::Mixed(p.to_density());
            &owned
        }
        _ => state,
    };
    let per_cut = enumerate_cuts(state.shape(), mode)
        .iter()
        .map(|cut| cut_value(state, cut, kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureReport::from_values(kind, mode, per_cut))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictClass {
    SemiseparableConsistent,
    IncompletelySeparable,
    FullyInseparableConsistent,
}

impl VerdictClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictClass::SemiseparableConsistent => "semiseparable-consistent",
            VerdictClass::IncompletelySeparable => "incompletely-separable",
            VerdictClass::FullyInseparableConsistent => "fully-inseparable-consistent",
        }
    }
}

impl fmt::Display for VerdictClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VerdictClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            VerdictClass::SemiseparableConsistent,
            VerdictClass::IncompletelySeparable,
            VerdictClass::FullyInseparableConsistent,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
        .ok_or_else(|| Error::OutOfRange(format!("unknown verdict `{s}`")))
    }
}

/// Separability verdict. A zero measure does not certify separability, hence
/// the `-consistent` suffix on the two extreme classes.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub class: VerdictClass,
    pub tol: f64,
    /// `true` where the cut value exceeds `tol`.
    pub per_cut_flags: Vec<bool>,
    pub report: MeasureReport,
}

impl Verdict {
    pub fn from_report(report: MeasureReport, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::OutOfRange(format!("tol must be positive, got {tol}")));
        }
        let per_cut_flags: Vec<bool> = report.per_cut.iter().map(|v| v.value > tol).collect();
        let class = if per_cut_flags.iter().all(|&f| !f) {
            VerdictClass::SemiseparableConsistent
        } else if per_cut_flags.iter().all(|&f| f) {
            VerdictClass::FullyInseparableConsistent
        } else {
            VerdictClass::IncompletelySeparable
        };
        Ok(Self {
            class,
            tol,
            per_cut_flags,
            report,
        })
    }
}

pub fn classify(state: &State, kind: MeasureKind, tol: f64) -> Result<Verdict> {
    classify_with_mode(state, kind, tol, CutMode::Literal)
}

pub fn classify_with_mode(
    state: &State,
    kind: MeasureKind,
    tol: f64,
    mode: CutMode,
) -> Result<Verdict> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::OutOfRange(format!("tol must be positive, got {tol}")));
    }
    Verdict::from_report(free_entanglement_with_mode(state, kind, mode)?, tol)
}

fn check_coefficients(c: &[C64; 8]) -> Result<()> {
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Normalization("non-finite coefficient".into()));
    }
    let norm_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > COEFF_NORM_TOL {
        return Err(Error::Normalization(format!(
            "Σ|c_i|² = {norm_sq}, expected 1 within {COEFF_NORM_TOL:e}"
        )));
    }
    Ok(())
}

/// The three-qubit state
///
/// ```text
/// (c1|0⟩ + c2|1⟩)_A |φ+⟩_BC + (c3|0⟩ + c4|1⟩)_A |φ-⟩_BC
///   + (c5|0⟩ + c6|1⟩)_A |ψ+⟩_BC + (c7|0⟩ + c8|1⟩)_A |ψ-⟩_BC
/// ```
///
/// expanded in the computational basis, with `|φ±⟩ = (|00⟩ ± |11⟩)/√2` and
/// `|ψ±⟩ = (|01⟩ ± |10⟩)/√2`. `c[0]` is `c1`.
pub fn build_three_qubit_state(c: &[C64; 8]) -> Result<PureState> {
    check_coefficients(c)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // Bell states on BC as (index, sign) pairs, BC index = 2b + c.
    let bell: [[(usize, f64); 2]; 4] = [
        [(0, h), (3, h)],
        [(0, h), (3, -h)],
        [(1, h), (2, h)],
        [(1, h), (2, -h)],
    ];
    let mut amplitudes = vec![C64::new(0.0, 0.0); 8];
    for (b, terms) in bell.iter().enumerate() {
        let (a0, a1) = (c[2 * b], c[2 * b + 1]);
        for &(bc, w) in terms {
            amplitudes[bc] += a0 * w;
            amplitudes[4 + bc] += a1 * w;
        }
    }
    PureState::new(SubsystemShape::qubits(3)?, amplitudes)
}

/// The `M`, `N`, `P` coefficients of the reduced single-qubit state
/// `[[M, P], [Q, N]]` (with `Q = P*`) for the cuts A–BC, B–AC, C–AB.
fn three_qubit_mnp(c: &[C64; 8]) -> [(f64, f64, C64); 3] {
    let [c1, c2, c3, c4, c5, c6, c7, c8] = *c;
    let sq = |z: C64| z.norm_sqr();

    let m_a = sq(c1) + sq(c3) + sq(c5) + sq(c7);
    let n_a = sq(c2) + sq(c4) + sq(c6) + sq(c8);
    let p_a = c1 * c2.conj() + c3 * c4.conj() + c5 * c6.conj() + c7 * c8.conj();

    let m_b = 0.5 * (sq(c1 + c3) + sq(c2 + c4) + sq(c5 + c7) + sq(c6 + c8));
    let n_b = 0.5 * (sq(c1 - c3) + sq(c2 - c4) + sq(c5 - c7) + sq(c6 - c8));
    let p_b = 0.5
        * ((c1 + c3) * (c5 - c7).conj()
            + (c5 + c7) * (c1 - c3).conj()
            + (c2 + c4) * (c6 - c8).conj()
            + (c6 + c8) * (c2 - c4).conj());

    let m_c = 0.5 * (sq(c1 + c3) + sq(c2 + c4) + sq(c5 - c7) + sq(c6 - c8));
    let n_c = 0.5 * (sq(c1 - c3) + sq(c2 - c4) + sq(c5 + c7) + sq(c6 + c8));
    let p_c = 0.5
        * ((c1 + c3) * (c5 + c7).conj()
            + (c5 - c7) * (c1 - c3).conj()
            + (c2 + c4) * (c6 + c8).conj()
            + (c6 - c8) * (c2 - c4).conj());

    [(m_a, n_a, p_a), (m_b, n_b, p_b), (m_c, n_c, p_c)]
}

/// Per-cut concurrences `√(2(1 − (M² + N² + 2PQ)))` of the three-qubit
/// family, in cut order A–BC, B–AC, C–AB, and their mean.
pub fn three_qubit_closed_form(c: &[C64; 8]) -> Result<MeasureReport> {
    check_coefficients(c)?;
    let shape = SubsystemShape::qubits(3)?;
    let per_cut = three_qubit_mnp(c)
        .into_iter()
        .enumerate()
        .map(|(k, (m, n, p))| {
            let q = p.conj();
            let purity = m * m + n * n + 2.0 * (p * q).re;
            Ok(CutValue {
                cut: Bipartition::new(shape.clone(), vec![k])?,
                kind: MeasureKind::Concurrence,
                value: snap((2.0 * (1.0 - purity)).max(0.0).sqrt()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureReport::from_values(
        MeasureKind::Concurrence,
        CutMode::Literal,
        per_cut,
    ))
}

fn check_isotropic(n: usize, x: f64) -> Result<()> {
    if !(ISOTROPIC_MIN_N..=ISOTROPIC_MAX_N).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "n = {n}; expected {ISOTROPIC_MIN_N} <= n <= {ISOTROPIC_MAX_N}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("x = {x}; expected 0 <= x <= 1")));
    }
    Ok(())
}

/// `x |GHZ⟩⟨GHZ| + (1 − x)/2ⁿ · 1` on `n` qubits.
pub fn isotropic_state(n: usize, x: f64) -> Result<DensityMatrix> {
    check_isotropic(n, x)?;
    let ghz = PureState::ghz(n)?;
    let dim = ghz.shape().total();
    let mixed = ComplexMatrix::identity(dim).scale(C64::new((1.0 - x) / dim as f64, 0.0));
    let pure = ghz.to_density().matrix().scale(C64::new(x, 0.0));
    DensityMatrix::new(ghz.shape().clone(), pure.add(&mixed)?)
}

/// `|1 − (1 + 2^{n−1}) x| / 2ⁿ` above the threshold `x = 1/(1 + 2^{n−1})`,
/// zero at or below it.
pub fn isotropic_closed_form(n: usize, x: f64) -> Result<f64> {
    check_isotropic(n, x)?;
    let half = (1u64 << (n - 1)) as f64;
    let threshold = 1.0 / (1.0 + half);
    if x > threshold {
        Ok(((1.0 - (1.0 + half) * x) / (2.0 * half)).abs())
    } else {
        Ok(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub e_bar_closed: f64,
    pub e_bar_generic: f64,
}

/// Evenly spaced `x` grid over `[x_min, x_max]` with closed-form and generic
/// negativity averages side by side.
pub fn sweep_isotropic(n: usize, x_min: f64, x_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::OutOfRange(format!("steps = {steps}; need at least 2")));
    }
    if x_min.is_nan() || x_max.is_nan() || x_min > x_max {
        return Err(Error::OutOfRange(format!(
            "x range [{x_min}, {x_max}] is empty"
        )));
    }
    check_isotropic(n, x_min)?;
    check_isotropic(n, x_max)?;
    (0..steps)
        .map(|k| {
            let x = if k + 1 == steps {
                x_max
            } else {
                x_min + (x_max - x_min) * k as f64 / (steps - 1) as f64
            };
            let generic = free_entanglement(
                &State::Mixed(isotropic_state(n, x)?),
                MeasureKind::Negativity,
            )?;
            Ok(SweepRow {
                x,
                e_bar_closed: isotropic_closed_form(n, x)?,
                e_bar_generic: generic.e_bar,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn coeffs(pairs: &[(usize, f64)]) -> [C64; 8] {
        let mut c = [C64::new(0.0, 0.0); 8];
        for &(k, v) in pairs {
            c[k] = C64::new(v, 0.0);
        }
        c
    }

    fn values(r: &MeasureReport) -> Vec<f64> {
        r.per_cut.iter().map(|v| v.value).collect()
    }

    #[test]
    fn ghz_average_concurrence_is_one() {
        let r = free_entanglement(&PureState::ghz(3).unwrap().into(), MeasureKind::Concurrence)
            .unwrap();
        assert_eq!(r.cut_count, 3);
        assert_abs_diff_eq!(r.e_bar, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_state_average_is_zero_for_every_measure() {
        let psi: State = PureState::basis(SubsystemShape::qubits(3).unwrap(), &[0, 0, 0])
            .unwrap()
            .into();
        for k in MeasureKind::ALL {
            assert_eq!(free_entanglement(&psi, k).unwrap().e_bar, 0.0);
        }
    }

    #[test]
    fn mixed_state_only_admits_negativity() {
        let rho: State = isotropic_state(3, 0.5).unwrap().into();
        assert_eq!(
            free_entanglement(&rho, MeasureKind::Entropy).unwrap_err(),
            Error::RequiresPureState(MeasureKind::Entropy)
        );
    }

    #[test]
    fn distinct_mode_records_denominator() {
        let psi: State = PureState::ghz(4).unwrap().into();
        let lit = free_entanglement(&psi, MeasureKind::Concurrence).unwrap();
        let dis =
            free_entanglement_with_mode(&psi, MeasureKind::Concurrence, CutMode::Distinct).unwrap();
        assert_eq!((lit.cut_count, dis.cut_count), (10, 7));
        assert_eq!(dis.cut_mode, CutMode::Distinct);
        // Singletons give 1, pairs give sqrt(2(1 - 1/2)) = 1 too for GHZ-4.
        assert_abs_diff_eq!(lit.e_bar, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dis.e_bar, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn classify_examples() {
        let s = SubsystemShape::qubits(3).unwrap();
        let zero: State = PureState::basis(s, &[0, 0, 0]).unwrap().into();
        assert_eq!(
            classify(&zero, MeasureKind::Concurrence, DEFAULT_TOL).unwrap().class,
            VerdictClass::SemiseparableConsistent
        );
        let ghz: State = PureState::ghz(3).unwrap().into();
        assert_eq!(
            classify(&ghz, MeasureKind::Concurrence, DEFAULT_TOL).unwrap().class,
            VerdictClass::FullyInseparableConsistent
        );
        // |0>_A ⊗ φ+_BC
        let split: State = PureState::new(
            SubsystemShape::qubits(3).unwrap(),
            vec![
                C64::new(H, 0.0),
                0.0.into(),
                0.0.into(),
                C64::new(H, 0.0),
                0.0.into(),
                0.0.into(),
                0.0.into(),
                0.0.into(),
            ],
        )
        .unwrap()
        .into();
        let v = classify(&split, MeasureKind::Concurrence, DEFAULT_TOL).unwrap();
        assert_eq!(v.class, VerdictClass::IncompletelySeparable);
        assert_eq!(v.per_cut_flags, vec![false, true, true]);
        assert!(classify(&split, MeasureKind::Concurrence, 0.0).is_err());
    }

    #[test]
    fn three_qubit_examples() {
        let ghz_like = coeffs(&[(0, H), (3, H)]);
        let r = three_qubit_closed_form(&ghz_like).unwrap();
        assert_abs_diff_eq!(r.e_bar, 1.0, epsilon = 1e-12);

        let product = coeffs(&[(0, H), (2, H)]);
        let r = three_qubit_closed_form(&product).unwrap();
        assert_eq!(values(&r), vec![0.0, 0.0, 0.0]);
        assert_eq!(r.e_bar, 0.0);

        let split = coeffs(&[(0, 1.0)]);
        let r = three_qubit_closed_form(&split).unwrap();
        let v = values(&r);
        assert_eq!(v[0], 0.0);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e_bar, 2.0 / 3.0, epsilon = 1e-12);

        assert!(matches!(
            three_qubit_closed_form(&coeffs(&[(0, 0.9)])),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn build_three_qubit_examples() {
        let psi = build_three_qubit_state(&coeffs(&[(0, H), (3, H)])).unwrap();
        let want = [0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, -0.5];
        for (a, w) in psi.amplitudes().iter().zip(want) {
            assert_abs_diff_eq!(a.re, w, epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }

        let psi = build_three_qubit_state(&coeffs(&[(0, H), (2, H)])).unwrap();
        assert_abs_diff_eq!(psi.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert!(psi.amplitudes()[1..].iter().all(|a| a.norm() < 1e-15));
    }

    #[test]
    fn isotropic_examples() {
        let rho = isotropic_state(3, 0.0).unwrap();
        let want = ComplexMatrix::identity(8).scale(C64::new(0.125, 0.0));
        assert_eq!(rho.matrix(), &want);
        let r = free_entanglement(&rho.into(), MeasureKind::Negativity).unwrap();
        assert!(values(&r).iter().all(|&v| v == 0.0));

        let rho = isotropic_state(2, 1.0).unwrap();
        let bell = PureState::ghz(2).unwrap().to_density();
        assert!(rho.matrix().max_abs_diff(bell.matrix()).unwrap() < 1e-15);

        let r = free_entanglement(&isotropic_state(3, 1.0).unwrap().into(), MeasureKind::Negativity)
            .unwrap();
        for v in values(&r) {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.e_bar, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn isotropic_closed_form_examples() {
        assert_abs_diff_eq!(isotropic_closed_form(3, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        for n in 2..=8 {
            let t = 1.0 / (1.0 + (1u64 << (n - 1)) as f64);
            assert_eq!(isotropic_closed_form(n, t).unwrap(), 0.0);
        }
        assert_eq!(isotropic_closed_form(2, 0.0).unwrap(), 0.0);
        assert!(isotropic_closed_form(1, 0.5).is_err());
        assert!(isotropic_closed_form(9, 0.5).is_err());
        assert!(isotropic_closed_form(3, 1.5).is_err());
        assert!(isotropic_state(3, -0.1).is_err());
    }

    #[test]
    fn sweep_three_points() {
        let rows = sweep_isotropic(3, 0.0, 1.0, 3).unwrap();
        let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        for (row, want) in rows.iter().zip([0.0, 0.1875, 0.5]) {
            assert_abs_diff_eq!(row.e_bar_closed, want, epsilon = 1e-15);
            assert_abs_diff_eq!(row.e_bar_generic, want, epsilon = 1e-9);
        }
        assert!(sweep_isotropic(3, 0.0, 1.0, 1).is_err());
        assert!(sweep_isotropic(3, 0.8, 0.2, 3).is_err());
    }

    #[test]
    fn verdict_class_round_trips_through_text() {
        for v in [
            VerdictClass::SemiseparableConsistent,
            VerdictClass::IncompletelySeparable,
            VerdictClass::FullyInseparableConsistent,
        ] {
            assert_eq!(v.to_string().parse::<VerdictClass>().unwrap(), v);
        }
    }
}
