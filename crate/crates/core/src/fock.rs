//! Fock basis enumeration and sparse state vectors in a fixed photon-number sector.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Amplitudes with modulus below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Photon count per optical mode; the label of a Fock basis ket.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u8>);

impl OccupationVector {
    pub fn new(counts: impl Into<Vec<u8>>) -> Self {
        Self(counts.into())
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self(vec![0; n_modes])
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&c| u32::from(c)).sum()
    }

    pub fn get(&self, mode: usize) -> u8 {
        self.0[mode]
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u8] {
        &mut self.0
    }

    /// Keep only the listed modes, in the given order.
    pub fn select(&self, modes: &[usize]) -> Self {
        Self(modes.iter().map(|&m| self.0[m]).collect())
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&c| c < 10) {
            for c in &self.0 {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}>")
    }
}

impl From<Vec<u8>> for OccupationVector {
    fn from(v: Vec<u8>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u8; N]> for OccupationVector {
    fn from(v: [u8; N]) -> Self {
        Self(v.to_vec())
    }
}

/// All occupation vectors of `n_modes` modes holding `total_photons`, in
/// lexicographically descending order.
pub fn enumerate_basis(n_modes: usize, total_photons: u32) -> Vec<OccupationVector> {
    fn fill(prefix: &mut Vec<u8>, remaining_modes: usize, remaining: u32, out: &mut Vec<OccupationVector>) {
        if remaining_modes == 1 {
            prefix.push(remaining as u8);
            out.push(OccupationVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k as u8);
            fill(prefix, remaining_modes - 1, remaining - k, out);
            prefix.pop();
        }
    }

    if n_modes == 0 {
        return if total_photons == 0 { vec![OccupationVector(Vec::new())] } else { Vec::new() };
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(n_modes), n_modes, total_photons, &mut out);
    out
}

/// Sparse pure state over a single photon-number sector. May be unnormalized
/// (conditioned states carry their success probability in the norm).
#[derive(Clone, PartialEq)]
pub struct FockStateVector<T: Real> {
    n_modes: usize,
    total_photons: u32,
    amplitudes: BTreeMap<OccupationVector, Complex<T>>,
}

impl<T: Real> FockStateVector<T> {
    /// The zero vector of a sector.
    pub fn zero(n_modes: usize, total_photons: u32) -> Self {
        Self { n_modes, total_photons, amplitudes: BTreeMap::new() }
    }

    /// A single basis ket with unit amplitude.
    pub fn basis(occupation: OccupationVector) -> Self {
        let mut s = Self::zero(occupation.n_modes(), occupation.total());
        s.amplitudes.insert(occupation, Complex::new(T::one(), T::zero()));
        s
    }

    /// Build a state from explicit `(ket, amplitude)` pairs.
    pub fn from_entries<I>(n_modes: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationVector, Complex<T>)>,
    {
        let mut sector = None;
        let mut amplitudes = BTreeMap::new();
        for (occ, amp) in entries {
            if occ.n_modes() != n_modes {
                return Err(Error::DimensionMismatch { expected: n_modes, found: occ.n_modes() });
            }
            let total = occ.total();
            match sector {
                None => sector = Some(total),
                Some(expected) if expected != total => {
                    return Err(Error::SectorMismatch { expected, found: total })
                }
                _ => {}
            }
            if amplitudes.contains_key(&occ) {
                return Err(Error::DuplicateKey(occ.to_string()));
            }
            amplitudes.insert(occ, amp);
        }
        let total_photons = sector.ok_or(Error::EmptyState)?;
        let mut s = Self { n_modes, total_photons, amplitudes };
        s.prune();
        Ok(s)
    }

    /// Insert-or-accumulate without sector checks; callers guarantee the key fits.
    pub(crate) fn accumulate(&mut self, occ: OccupationVector, amp: Complex<T>) {
        debug_assert_eq!(occ.n_modes(), self.n_modes);
        debug_assert_eq!(occ.total(), self.total_photons);
        *self.amplitudes.entry(occ).or_insert_with(Complex::default) += amp;
    }

    pub(crate) fn prune(&mut self) {
        let threshold = lit::<T>(PRUNE_THRESHOLD);
        self.amplitudes.retain(|_, a| a.norm() >= threshold);
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn total_photons(&self) -> u32 {
        self.total_photons
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> Complex<T> {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    /// Nonzero entries in lexicographically descending ket order.
    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &Complex<T>)> {
        self.amplitudes.iter().rev()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.values().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut s = Self {
            n_modes: self.n_modes,
            total_photons: self.total_photons,
            amplitudes: self.amplitudes.iter().map(|(k, &a)| (k.clone(), a * factor)).collect(),
        };
        s.prune();
        s
    }

    /// Unit-norm copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n <= T::zero() {
            return None;
        }
        Some(self.scaled(Complex::new(T::one() / n.sqrt(), T::zero())))
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: Complex<T>) -> Result<Self> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (k, &a) in &other.amplitudes {
            *out.amplitudes.entry(k.clone()).or_insert_with(Complex::default) += a * factor;
        }
        out.prune();
        Ok(out)
    }

    pub(crate) fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: other.n_modes });
        }
        if self.total_photons != other.total_photons {
            return Err(Error::SectorMismatch { expected: self.total_photons, found: other.total_photons });
        }
        Ok(())
    }

    /// Tensor product with a state on additional modes appended after ours.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_modes + other.n_modes, self.total_photons + other.total_photons);
        for (ka, &a) in &self.amplitudes {
            for (kb, &b) in &other.amplitudes {
                let mut counts = ka.counts().to_vec();
                counts.extend_from_slice(kb.counts());
                out.amplitudes.insert(OccupationVector(counts), a * b);
            }
        }
        out.prune();
        out
    }
}

impl<T: Real> fmt::Debug for FockStateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockStateVector[{} modes, {} photons]{{", self.n_modes, self.total_photons)?;
        for (i, (k, a)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k:?}: {a}")?;
        }
        write!(f, "}}")
    }
}

/// Build a state from `(ket, amplitude)` pairs, rejecting mixed sectors and duplicates.
pub fn make_state<T: Real>(
    n_modes: usize,
    entries: impl IntoIterator<Item = (OccupationVector, Complex<T>)>,
) -> Result<FockStateVector<T>> {
    FockStateVector::from_entries(n_modes, entries)
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product<T: Real>(a: &FockStateVector<T>, b: &FockStateVector<T>) -> Result<Complex<T>> {
    a.check_same_space(b)?;
    let (small, large, conj_small) = if a.len() <= b.len() { (a, b, true) } else { (b, a, false) };
    let mut acc = Complex::default();
    for (k, &x) in &small.amplitudes {
        if let Some(&y) = large.amplitudes.get(k) {
            acc += if conj_small { x.conj() * y } else { y.conj() * x };
        }
    }
    Ok(acc)
}
