//! Elimination-based decompositions: kernels, inverses, integer weight spaces,
//! Jordan chains of nilpotent matrices.

use super::{LinalgError, PadicMatrix, Result};
use crate::padic::{Padic, PadicContext, EXACT};

/// Reduced row echelon form computed with full pivoting on the smallest valuation.
struct Echelon {
    /// Reduced matrix, columns permuted by `col_perm`.
    work: PadicMatrix,
    col_perm: Vec<usize>,
    rank: usize,
}

fn echelon(m: &PadicMatrix) -> Result<Echelon> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut work = m.clone();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in rank..rows {
            for j in rank..cols {
                let x = work.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(_, _, v)| x.valuation() < v) {
                    best = Some((i, j, x.valuation()));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        swap_rows(&mut work, rank, pi);
        swap_cols(&mut work, rank, pj);
        col_perm.swap(rank, pj);
        let inv = work.get(rank, rank).inv()?;
        for j in 0..cols {
            let x = work.get(rank, j) * &inv;
            work.set(rank, j, x);
        }
        for i in 0..rows {
            if i == rank {
                continue;
            }
            let factor = work.get(i, rank).clone();
            if factor.is_exact_zero() {
                continue;
            }
            for j in 0..cols {
                let x = work.get(i, j) - &(&factor * work.get(rank, j));
                work.set(i, j, x);
            }
        }
        rank += 1;
    }
    Ok(Echelon { work, col_perm, rank })
}

fn swap_rows(m: &mut PadicMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let (x, y) = (m.get(a, j).clone(), m.get(b, j).clone());
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn swap_cols(m: &mut PadicMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let (x, y) = (m.get(i, a).clone(), m.get(i, b).clone());
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

/// Scales `v` so its first nonzero coordinate is 1.
fn normalize_leading(v: &mut [Padic]) -> Result<()> {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        let inv = lead.inv()?;
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
    }
    Ok(())
}

impl PadicMatrix {
    pub fn rank(&self) -> Result<usize> {
        Ok(echelon(self)?.rank)
    }

    /// Basis of the right kernel, each vector normalized to a leading 1.
    pub fn kernel(&self) -> Result<Vec<Vec<Padic>>> {
        let ctx = self.ctx();
        let ech = echelon(self)?;
        let cols = self.cols();
        let mut basis = Vec::new();
        for f in ech.rank..cols {
            let mut permuted = vec![Padic::exact_zero(ctx.p()); cols];
            permuted[f] = ctx.one();
            for (k, slot) in permuted.iter_mut().enumerate().take(ech.rank) {
                *slot = -ech.work.get(k, f);
            }
            let mut v = vec![Padic::exact_zero(ctx.p()); cols];
            for (idx, x) in permuted.into_iter().enumerate() {
                v[ech.col_perm[idx]] = x;
            }
            normalize_leading(&mut v)?;
            basis.push(v);
        }
        Ok(basis)
    }

    pub fn inverse(&self) -> Result<PadicMatrix> {
        let n = self.require_square("inverse")?;
        let ctx = self.ctx();
        let aug = PadicMatrix::from_fn(ctx, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                ctx.one()
            } else {
                Padic::exact_zero(ctx.p())
            }
        });
        // Partial pivoting only: the right half must stay in place.
        let mut work = aug;
        for c in 0..n {
            let pivot = (c..n)
                .filter(|&i| !work.get(i, c).is_zero())
                .min_by_key(|&i| work.get(i, c).valuation());
            let Some(pr) = pivot else {
                let v = (c..n).map(|i| work.get(i, c).valuation()).min().unwrap_or(EXACT);
                return Err(LinalgError::Singular { pivot_valuation: v });
            };
            swap_rows(&mut work, c, pr);
            let inv = work.get(c, c).inv()?;
            for j in 0..2 * n {
                let x = work.get(c, j) * &inv;
                work.set(c, j, x);
            }
            for i in 0..n {
                if i == c {
                    continue;
                }
                let factor = work.get(i, c).clone();
                if factor.is_exact_zero() {
                    continue;
                }
                for j in 0..2 * n {
                    let x = work.get(i, j) - &(&factor * work.get(c, j));
                    work.set(i, j, x);
                }
            }
        }
        Ok(PadicMatrix::from_fn(ctx, n, n, |i, j| work.get(i, n + j).clone()))
    }

    /// Integer eigenspaces of `self` with eigenvalues in `[lo, hi]`.
    pub fn weight_decomposition(&self, lo: i64, hi: i64) -> Result<WeightDecomposition> {
        let d = self.require_square("weight_decomposition")?;
        let ctx = self.ctx();
        let mut spaces = Vec::new();
        let mut found = 0;
        for n in lo..=hi {
            let shifted = self.sub(&PadicMatrix::identity(ctx, d).scale(&ctx.int(n)))?;
            let basis = shifted.kernel()?;
            if !basis.is_empty() {
                found += basis.len();
                spaces.push(WeightSpace { weight: n, basis });
            }
            if found > d {
                break;
            }
        }
        if found != d {
            return Err(LinalgError::SpectrumNotInteger { found, dim: d, lo, hi });
        }
        Ok(WeightDecomposition { dim: d, spaces })
    }

    /// Jordan chains `v, Nv, ..., N^(len-1) v` of a nilpotent matrix, longest first.
    pub fn jordan_chains(&self) -> Result<Vec<JordanChain>> {
        let d = self.require_square("jordan_chains")?;
        let ctx = self.ctx();
        let r = self.nilpotency_index()?;
        // kernels[k] = basis of ker N^k
        let mut kernels: Vec<Vec<Vec<Padic>>> = vec![Vec::new()];
        let mut power = PadicMatrix::identity(ctx, d);
        for _ in 1..=r {
            power = power.mul(self)?;
            kernels.push(power.kernel()?);
        }
        let mut tops: Vec<(Vec<Padic>, usize)> = Vec::new();
        let mut level: Vec<Vec<Padic>> = Vec::new();
        for k in (1..=r).rev() {
            let mut current: Vec<Vec<Padic>> = kernels[k - 1].clone();
            current.extend(level.iter().cloned());
            let mut current_rank = rank_of(ctx, d, &current)?;
            for v in &kernels[k] {
                current.push(v.clone());
                let next_rank = rank_of(ctx, d, &current)?;
                if next_rank > current_rank {
                    current_rank = next_rank;
                    tops.push((v.clone(), k));
                    level.push(v.clone());
                } else {
                    current.pop();
                }
            }
            level = level.iter().map(|v| self.mul_vec(v)).collect::<Result<_>>()?;
        }
        tops.into_iter()
            .map(|(top, len)| {
                let mut vectors = vec![top];
                for _ in 1..len {
                    let next = self.mul_vec(vectors.last().expect("nonempty"))?;
                    vectors.push(next);
                }
                Ok(JordanChain { vectors })
            })
            .collect()
    }
}

fn rank_of(ctx: PadicContext, d: usize, vectors: &[Vec<Padic>]) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    PadicMatrix::from_columns(ctx, d, vectors).rank()
}

/// `v, Nv, ..., N^(len-1) v` with `N^len v = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanChain {
    pub vectors: Vec<Vec<Padic>>,
}

impl JordanChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpace {
    pub weight: i64,
    pub basis: Vec<Vec<Padic>>,
}

/// Eigenspace decomposition of an operator with integer spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDecomposition {
    pub dim: usize,
    pub spaces: Vec<WeightSpace>,
}

impl WeightDecomposition {
    pub fn multiplicity(&self, weight: i64) -> usize {
        self.spaces.iter().find(|s| s.weight == weight).map_or(0, |s| s.basis.len())
    }

    pub fn space(&self, weight: i64) -> Option<&WeightSpace> {
        self.spaces.iter().find(|s| s.weight == weight)
    }

    /// Weights repeated by multiplicity, in increasing order.
    pub fn weights(&self) -> Vec<i64> {
        self.spaces.iter().flat_map(|s| std::iter::repeat_n(s.weight, s.basis.len())).collect()
    }

    pub fn min_weight(&self) -> Option<i64> {
        self.spaces.first().map(|s| s.weight)
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.spaces.last().map(|s| s.weight)
    }

    /// Matrix whose columns are the eigenvectors, ordered as [`weights`](Self::weights).
    pub fn change_of_basis(&self, ctx: PadicContext) -> PadicMatrix {
        let cols: Vec<Vec<Padic>> = self.spaces.iter().flat_map(|s| s.basis.iter().cloned()).collect();
        PadicMatrix::from_columns(ctx, self.dim, &cols)
    }
}

/// Finds an invertible `P` with `P^-1 X P = Y` for every pair `(X, Y)`.
///
/// Solves the linear system `X P = P Y` and tries small combinations of its
/// solution basis until one is invertible.
pub fn find_conjugator(pairs: &[(&PadicMatrix, &PadicMatrix)]) -> Result<Option<PadicMatrix>> {
    let Some((first, _)) = pairs.first() else { return Ok(None) };
    let d = first.require_square("find_conjugator")?;
    let ctx = first.ctx();
    let unknowns = d * d;
    let mut system = PadicMatrix::zeros(ctx, pairs.len() * unknowns, unknowns);
    for (pi, (x, y)) in pairs.iter().enumerate() {
        if x.rows() != d || y.rows() != d || !x.is_square() || !y.is_square() {
            return Err(LinalgError::DimensionMismatch {
                op: "find_conjugator",
                left: (x.rows(), x.cols()),
                right: (y.rows(), y.cols()),
            });
        }
        for i in 0..d {
            for j in 0..d {
                let row = pi * unknowns + i * d + j;
                // (X P)[i][j] = sum_k X[i][k] P[k][j]
                for k in 0..d {
                    let idx = k * d + j;
                    let cur = system.get(row, idx) + x.get(i, k);
                    system.set(row, idx, cur);
                }
                // (P Y)[i][j] = sum_k P[i][k] Y[k][j]
                for k in 0..d {
                    let idx = i * d + k;
                    let cur = system.get(row, idx) - y.get(k, j);
                    system.set(row, idx, cur);
                }
            }
        }
    }
    let basis = system.kernel()?;
    if basis.is_empty() {
        return Ok(None);
    }
    let to_matrix = |v: &[Padic]| PadicMatrix::from_fn(ctx, d, d, |i, j| v[i * d + j].clone());
    let mut candidates: Vec<Vec<Padic>> = basis.clone();
    for seed in 1..=3i64 {
        let combo = basis.iter().enumerate().fold(
            vec![Padic::exact_zero(ctx.p()); unknowns],
            |acc, (b, v)| {
                let coeff = ctx.int(1 + (b as i64 * seed) % 7);
                acc.iter().zip(v).map(|(a, x)| a + &(x * &coeff)).collect()
            },
        );
        candidates.push(combo);
    }
    for c in candidates {
        let pm = to_matrix(&c);
        if pm.rank()? == d {
            return Ok(Some(pm));
        }
    }
    Ok(None)
}
