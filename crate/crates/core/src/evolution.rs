//! Schrödinger-picture evolution through beamsplitter networks, and the
//! permanent formula as an independent amplitude oracle.

use num_complex::Complex;

use crate::circuit::{BeamsplitterElement, Circuit};
use crate::error::{Error, Result};
use crate::fock::{FockStateVector, OccupationVector};
use crate::linalg::SquareMatrix;
use crate::scalar::{binomial, factorial, Real};

/// Largest photon-number sector the simulator accepts.
pub const MAX_PHOTONS: u32 = 4;

/// Largest matrix handed to [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 6;

fn check_sector(total: u32) -> Result<()> {
    if total > MAX_PHOTONS {
        return Err(Error::TooManyPhotons { found: total, max: MAX_PHOTONS });
    }
    Ok(())
}

/// Redistribute the photons on the element's two modes.
///
/// With `a†_j → Σ_i M_ij a†_i`, a ket holding `n_a, n_b` photons on the pair
/// expands binomially; each output term picks up `√(k!(N-k)!) / √(n_a! n_b!)`.
pub fn apply_element<T: Real>(
    state: &FockStateVector<T>,
    element: &BeamsplitterElement<T>,
) -> Result<FockStateVector<T>> {
    check_sector(state.total_photons())?;
    element.check(state.n_modes())?;
    let m = element.matrix()?;
    let (a, b) = (element.mode_a, element.mode_b);

    let mut out = FockStateVector::zero(state.n_modes(), state.total_photons());
    let mut poly: Vec<T> = Vec::new();
    for (occ, &amp) in state.iter() {
        let na = u32::from(occ.get(a));
        let nb = u32::from(occ.get(b));
        if na + nb == 0 {
            out.accumulate(occ.clone(), amp);
            continue;
        }
        let total = na + nb;
        // poly[k]: coefficient of (a†)^k (b†)^(total-k)
        poly.clear();
        poly.resize(total as usize + 1, T::zero());
        for i in 0..=na {
            // a† -> m[0][0] a† + m[1][0] b†
            let ca = binomial::<T>(na, i) * m[0][0].powi(i as i32) * m[1][0].powi((na - i) as i32);
            for j in 0..=nb {
                // b† -> m[0][1] a† + m[1][1] b†
                let cb = binomial::<T>(nb, j) * m[0][1].powi(j as i32) * m[1][1].powi((nb - j) as i32);
                poly[(i + j) as usize] += ca * cb;
            }
        }
        let inv_norm = (factorial::<T>(na) * factorial::<T>(nb)).sqrt().recip();
        for (k, &coef) in poly.iter().enumerate() {
            if coef == T::zero() {
                continue;
            }
            let k = k as u32;
            let weight = coef * (factorial::<T>(k) * factorial::<T>(total - k)).sqrt() * inv_norm;
            let mut key = occ.clone();
            key.counts_mut()[a] = k as u8;
            key.counts_mut()[b] = (total - k) as u8;
            out.accumulate(key, amp * weight);
        }
    }
    out.prune();
    Ok(out)
}

/// Apply every element of `circuit` in order.
pub fn evolve<T: Real>(state: &FockStateVector<T>, circuit: &Circuit<T>) -> Result<FockStateVector<T>> {
    if state.n_modes() != circuit.n_modes {
        return Err(Error::DimensionMismatch { expected: circuit.n_modes, found: state.n_modes() });
    }
    check_sector(state.total_photons())?;
    circuit.elements.iter().try_fold(state.clone(), |s, e| apply_element(&s, e))
}

/// Permanent by Ryser's inclusion-exclusion formula.
pub fn permanent<T: Real>(rows: &[Vec<Complex<T>>]) -> Result<Complex<T>> {
    let n = rows.len();
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::NonSquare { rows: n, row, cols: r.len() });
    }
    if n > MAX_PERMANENT_DIM {
        return Err(Error::PermanentTooLarge(n));
    }
    if n == 0 {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let mut total = Complex::default();
    for subset in 1u32..(1 << n) {
        let mut prod = Complex::new(T::one(), T::zero());
        for row in rows {
            let s: Complex<T> = (0..n).filter(|j| subset & (1 << j) != 0).map(|j| row[j]).sum();
            prod *= s;
        }
        if (n as u32 - subset.count_ones()) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// One transition amplitude `<output| U |input>` for a passive network.
#[derive(Clone, Copy, Debug)]
pub struct AmplitudeQuery<'a, T: Real> {
    pub transfer: &'a SquareMatrix<T>,
    pub input: &'a OccupationVector,
    pub output: &'a OccupationVector,
}

fn repeated_modes(occ: &OccupationVector) -> Vec<usize> {
    occ.counts()
        .iter()
        .enumerate()
        .flat_map(|(m, &k)| std::iter::repeat(m).take(k as usize))
        .collect()
}

/// `per(U[out, in]) / √(Π in! Π out!)` with rows/columns repeated by occupation.
pub fn oracle_amplitude<T: Real>(query: AmplitudeQuery<'_, T>) -> Result<Complex<T>> {
    let AmplitudeQuery { transfer, input, output } = query;
    for occ in [input, output] {
        if occ.n_modes() != transfer.dim() {
            return Err(Error::DimensionMismatch { expected: transfer.dim(), found: occ.n_modes() });
        }
    }
    if input.total() != output.total() {
        return Err(Error::SectorMismatch { expected: input.total(), found: output.total() });
    }
    check_sector(input.total())?;

    let sub = transfer.submatrix(&repeated_modes(output), &repeated_modes(input));
    let norm: T = input
        .counts()
        .iter()
        .chain(output.counts())
        .map(|&k| factorial::<T>(u32::from(k)))
        .fold(T::one(), |acc, f| acc * f);
    Ok(permanent(&sub)? / norm.sqrt())
}
