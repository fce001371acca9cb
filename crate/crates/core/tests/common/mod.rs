//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use multient::numeric::{kron, matmul, ComplexMatrix, C64};
use multient::regroup::regroup_oracle;
use multient::{Bipartition, DensityMatrix, PureState, SubsystemShape};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn shape(dims: &[usize]) -> SubsystemShape {
    SubsystemShape::new(dims.to_vec()).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::new(rows, cols, (0..rows * cols).map(|_| gaussian(rng)).collect()).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n, n);
    a.add(&a.adjoint()).unwrap().scale(C64::new(0.5, 0.0))
}

pub fn random_pure(rng: &mut impl Rng, dims: &[usize]) -> PureState {
    let s = shape(dims);
    let amps = (0..s.total()).map(|_| gaussian(rng)).collect();
    PureState::normalized(s, amps).unwrap()
}

/// `A A† / Tr(A A†)` with `A` of the given rank.
pub fn random_density(rng: &mut impl Rng, dims: &[usize], rank: usize) -> DensityMatrix {
    let s = shape(dims);
    let a = random_matrix(rng, s.total(), rank);
    let aa = matmul(&a, &a.adjoint()).unwrap();
    let tr = aa.trace().re;
    DensityMatrix::new(s, aa.scale(C64::new(1.0 / tr, 0.0))).unwrap()
}

/// Haar-ish unitary via Gram–Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            data[r * n + c] = *z;
        }
    }
    ComplexMatrix::new(n, n, data).unwrap()
}

/// `U_0 ⊗ U_1 ⊗ … ⊗ U_{N-1}` with one random unitary per particle.
pub fn random_local_unitary(rng: &mut impl Rng, s: &SubsystemShape) -> ComplexMatrix {
    s.dims()
        .iter()
        .map(|&d| random_unitary(rng, d))
        .reduce(|acc, u| kron(&acc, &u).unwrap())
        .unwrap()
}

pub fn conjugate(rho: &DensityMatrix, u: &ComplexMatrix) -> DensityMatrix {
    let m = matmul(&matmul(u, rho.matrix()).unwrap(), &u.adjoint()).unwrap();
    DensityMatrix::new(rho.shape().clone(), m).unwrap()
}

pub fn evolve(psi: &PureState, u: &ComplexMatrix) -> PureState {
    PureState::new(psi.shape().clone(), u.apply(psi.amplitudes()).unwrap()).unwrap()
}

/// Relabels particles: particle `k` of the input ends up at `perm[k]`.
pub fn permute_pure(psi: &PureState, perm: &[usize]) -> PureState {
    let s = psi.shape();
    let mut dims = vec![0; s.particles()];
    for (k, &p) in perm.iter().enumerate() {
        dims[p] = s.dims()[k];
    }
    let target = shape(&dims);
    let mut amps = vec![C64::new(0.0, 0.0); s.total()];
    for (r, a) in psi.amplitudes().iter().enumerate() {
        let local = s.local_indices(r).unwrap();
        let mut moved = vec![0; local.len()];
        for (k, &p) in perm.iter().enumerate() {
            moved[p] = local[k];
        }
        amps[target.flat_index(&moved).unwrap()] = *a;
    }
    PureState::new(target, amps).unwrap()
}

pub fn permute_density(rho: &DensityMatrix, perm: &[usize]) -> DensityMatrix {
    let s = rho.shape();
    let mut dims = vec![0; s.particles()];
    for (k, &p) in perm.iter().enumerate() {
        dims[p] = s.dims()[k];
    }
    let target = shape(&dims);
    let map: Vec<usize> = (0..s.total())
        .map(|r| {
            let local = s.local_indices(r).unwrap();
            let mut moved = vec![0; local.len()];
            for (k, &p) in perm.iter().enumerate() {
                moved[p] = local[k];
            }
            target.flat_index(&moved).unwrap()
        })
        .collect();
    let n = s.total();
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            data[map[r] * n + map[c]] = rho.matrix()[(r, c)];
        }
    }
    DensityMatrix::new(target, ComplexMatrix::new(n, n, data).unwrap()).unwrap()
}

/// Reduced state on side 1, by summing over side-2 indices of the
/// index-regrouped density matrix.
pub fn reduced_by_sum(rho: &DensityMatrix, cut: &Bipartition) -> ComplexMatrix {
    let grouped = regroup_oracle(rho, cut).unwrap();
    let (n1, n2) = (cut.n1(), cut.n2());
    let m = grouped.matrix();
    let mut data = vec![C64::new(0.0, 0.0); n1 * n1];
    for i in 0..n1 {
        for k in 0..n1 {
            data[i * n1 + k] = (0..n2).map(|j| m[(i * n2 + j, k * n2 + j)]).sum();
        }
    }
    ComplexMatrix::new(n1, n1, data).unwrap()
}

/// `√(2(1 − Tr ρ_r²))` through the plain purity route.
pub fn purity_concurrence(psi: &PureState, cut: &Bipartition) -> f64 {
    let r = reduced_by_sum(&psi.to_density(), cut);
    let purity: f64 = r.frobenius_norm_sq();
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

/// Σ_{i=1}^{⌊N/2⌋} C(N, i) by direct binomial arithmetic.
pub fn binomial_cut_count(n: usize) -> usize {
    (1..=n / 2).map(|i| choose(n, i)).sum()
}

pub fn choose(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn random_coefficients(rng: &mut impl Rng) -> [C64; 8] {
    let mut c = [C64::new(0.0, 0.0); 8];
    for z in c.iter_mut() {
        *z = gaussian(rng);
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.map(|z| z / norm)
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}
