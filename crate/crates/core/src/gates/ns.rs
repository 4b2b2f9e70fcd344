//! Conditional maps of the nonlinear sign gate, its optimal reflectivities,
//! and the biased (interferometer-free) variant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Closed-form reflectivities. These are the only definitions in the crate;
/// the circuit-file loader resolves its symbolic tokens through them.
pub mod closed_form {
    use super::*;

    /// (√2 - 1)² = 3 - 2√2
    pub fn eta2_ns<T: Real>() -> T {
        let s = T::SQRT_2() - T::one();
        s * s
    }

    /// 1 / (4 - 2√2)
    pub fn eta13_ns<T: Real>() -> T {
        (lit::<T>(4.0) - lit::<T>(2.0) * T::SQRT_2()).recip()
    }

    /// (3 - √2) / 7
    pub fn eta2_biased<T: Real>() -> T {
        (lit::<T>(3.0) - T::SQRT_2()) / lit::<T>(7.0)
    }

    /// 5 - 3√2
    pub fn eta7_biased<T: Real>() -> T {
        lit::<T>(5.0) - lit::<T>(3.0) * T::SQRT_2()
    }
}

fn check_eta<T: Real>(eta: T) -> Result<T> {
    if eta >= T::zero() && eta <= T::one() {
        Ok(eta)
    } else {
        Err(Error::InvalidReflectivity(eta.to_f64_lossy()))
    }
}

/// Intensity reflectivities of the three splitters of the full NS gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NsParameters<T: Real> {
    pub eta1: T,
    pub eta2: T,
    pub eta3: T,
}

impl<T: Real> NsParameters<T> {
    pub fn new(eta1: T, eta2: T, eta3: T) -> Result<Self> {
        Ok(Self { eta1: check_eta(eta1)?, eta2: check_eta(eta2)?, eta3: check_eta(eta3)? })
    }

    pub fn optimal() -> Self {
        let e13 = closed_form::eta13_ns();
        Self { eta1: e13, eta2: closed_form::eta2_ns(), eta3: e13 }
    }
}

/// Amplitude for the ancilla photon to reach the "1" detector with vacuum signal.
pub fn ns_success_amplitude_vacuum<T: Real>(p: &NsParameters<T>) -> T {
    let NsParameters { eta1, eta2, eta3 } = *p;
    (eta1 * eta2 * eta3).sqrt() + ((T::one() - eta1) * (T::one() - eta3)).sqrt()
}

/// Conditional amplitudes `(λ0, λ1, λ2)` applied to the 0, 1, 2 photon
/// components of the signal when the ancilla detectors read (1, 0).
pub fn ns_conditional_map<T: Real>(p: &NsParameters<T>) -> [T; 3] {
    let NsParameters { eta1, eta2, eta3 } = *p;
    let one = T::one();
    let l0 = ns_success_amplitude_vacuum(p);
    let l1 = (eta1 * eta3).sqrt() * (one - eta2) - l0 * eta2.sqrt();
    let l2 = eta2 * l0 - lit::<T>(2.0) * (eta1 * eta2 * eta3).sqrt() * (one - eta2);
    [l0, l1, l2]
}

/// Residuals of the sign-gate conditions `λ0 = λ1` and `λ2 = -λ0`.
pub fn ns_balance_residuals<T: Real>(p: &NsParameters<T>) -> [T; 2] {
    let [l0, l1, l2] = ns_conditional_map(p);
    [l0 - l1, l0 + l2]
}

/// Damped Newton iteration on a 2-d system with a central-difference Jacobian.
/// Iterates are kept inside the open unit square. Returns `None` if the
/// residual does not drop below `tol`.
pub fn newton_2d<T: Real>(f: impl Fn(T, T) -> [T; 2], start: [T; 2], tol: T, max_iter: usize) -> Option<[T; 2]> {
    let lo = lit::<T>(1e-12);
    let hi = T::one() - lo;
    let h = T::epsilon().cbrt();
    let two = lit::<T>(2.0);
    let norm = |r: [T; 2]| r[0].abs().max(r[1].abs());
    let mut x = start;
    for _ in 0..max_iter {
        let r = f(x[0], x[1]);
        if !r[0].is_finite() || !r[1].is_finite() {
            return None;
        }
        if norm(r) < tol {
            return Some(x);
        }
        let mut jac = [[T::zero(); 2]; 2];
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] = (x[k] + h).min(hi);
            xm[k] = (x[k] - h).max(lo);
            let rp = f(xp[0], xp[1]);
            let rm = f(xm[0], xm[1]);
            let dx = xp[k] - xm[k];
            jac[0][k] = (rp[0] - rm[0]) / dx;
            jac[1][k] = (rp[1] - rm[1]) / dx;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let step = [
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (jac[0][0] * r[1] - jac[1][0] * r[0]) / det,
        ];
        // backtrack until the residual decreases
        let mut scale = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let cand = [(x[0] - scale * step[0]).max(lo).min(hi), (x[1] - scale * step[1]).max(lo).min(hi)];
            let rc = f(cand[0], cand[1]);
            if rc[0].is_finite() && rc[1].is_finite() && norm(rc) < norm(r) {
                x = cand;
                accepted = true;
                break;
            }
            scale = scale / two;
        }
        if !accepted {
            return if norm(r) < tol { Some(x) } else { None };
        }
    }
    let r = f(x[0], x[1]);
    (norm(r) < tol).then_some(x)
}

/// Numeric cross-check of the optimum: best `|λ0|` found on the constraint
/// curve `λ0 = λ1 = -λ2`, swept over η1 with (η2, η3) solved by Newton.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericNsOptimum<T: Real> {
    pub best_amplitude: T,
    pub best_params: NsParameters<T>,
    /// Grid points on which the constraint solve converged.
    pub feasible_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalNs<T: Real> {
    pub params: NsParameters<T>,
    /// Success amplitude C.
    pub amplitude: T,
    pub numeric: NumericNsOptimum<T>,
}

/// Solve `√η2` from `s² + 2s - 1 = 0` keeping physical roots, then maximise C
/// over η1 = η3. The closed forms are returned; the numeric sweep is reported
/// alongside for verification.
pub fn solve_optimal_ns<T: Real>() -> OptimalNs<T> {
    // Branch selection: the quadratic has roots -1 ± √2, only one lies in [0, 1].
    let roots = [-T::one() + T::SQRT_2(), -T::one() - T::SQRT_2()];
    let s = roots
        .into_iter()
        .filter(|&s| s >= T::zero() && s <= T::one())
        .find(|&s| {
            let eta2 = s * s;
            let eta = (T::one() + eta2).recip();
            NsParameters::new(eta, eta2, eta)
                .map(|p| ns_conditional_map(&p).iter().all(|l| l.abs() <= T::one()))
                .unwrap_or(false)
        })
        .expect("one admissible branch");
    debug_assert!((s * s - closed_form::eta2_ns::<T>()).abs() <= lit::<T>(1e-5));

    let params = NsParameters::optimal();
    OptimalNs { params, amplitude: ns_success_amplitude_vacuum(&params), numeric: numeric_ns_optimum() }
}

fn numeric_ns_optimum<T: Real>() -> NumericNsOptimum<T> {
    let tol = (T::epsilon() * lit::<T>(1e3)).max(lit::<T>(1e-13));
    let solve_at = |eta1: T, start: [T; 2]| -> Option<([T; 2], T)> {
        let x = newton_2d(
            |eta2, eta3| ns_balance_residuals(&NsParameters { eta1, eta2, eta3 }),
            start,
            tol,
            100,
        )?;
        let p = NsParameters { eta1, eta2: x[0], eta3: x[1] };
        let lambdas = ns_conditional_map(&p);
        if lambdas.iter().any(|l| l.abs() > T::one()) {
            return None;
        }
        Some((x, lambdas[0].abs()))
    };

    let mut best: Option<(T, NsParameters<T>)> = None;
    let mut feasible = 0;
    let mut start = [lit::<T>(0.2), lit::<T>(0.9)];
    for k in 50..=99 {
        let eta1 = lit::<T>(f64::from(k) / 100.0);
        if let Some((x, c)) = solve_at(eta1, start) {
            feasible += 1;
            start = x;
            if best.map_or(true, |(b, _)| c > b) {
                best = Some((c, NsParameters { eta1, eta2: x[0], eta3: x[1] }));
            }
        }
    }
    let (mut best_c, mut best_p) = best.expect("constraint curve reachable from the sweep");

    // golden-section refinement of η1 around the best grid point
    let ratio = (lit::<T>(5.0).sqrt() - T::one()) / lit::<T>(2.0);
    let mut lo = (best_p.eta1 - lit::<T>(0.01)).max(lit::<T>(0.01));
    let mut hi = (best_p.eta1 + lit::<T>(0.01)).min(lit::<T>(0.999));
    let seed = [best_p.eta2, best_p.eta3];
    let eval = |eta1: T| solve_at(eta1, seed).map(|(x, c)| (c, x)).unwrap_or((T::zero(), seed));
    for _ in 0..80 {
        let m1 = hi - ratio * (hi - lo);
        let m2 = lo + ratio * (hi - lo);
        if eval(m1).0 < eval(m2).0 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let mid = (lo + hi) / lit::<T>(2.0);
    let (c, x) = eval(mid);
    if c > best_c {
        best_c = c;
        best_p = NsParameters { eta1: mid, eta2: x[0], eta3: x[1] };
    }
    NumericNsOptimum { best_amplitude: best_c, best_params: best_p, feasible_points: feasible }
}

/// Reflectivities of the biased NS gate: η2 against the ancilla photon and η7
/// on the extra vacuum-fed splitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasedNsParameters<T: Real> {
    pub eta2: T,
    pub eta7: T,
}

impl<T: Real> BiasedNsParameters<T> {
    pub fn new(eta2: T, eta7: T) -> Result<Self> {
        Ok(Self { eta2: check_eta(eta2)?, eta7: check_eta(eta7)? })
    }

    pub fn balanced() -> Self {
        Self { eta2: closed_form::eta2_biased(), eta7: closed_form::eta7_biased() }
    }
}

/// `(√η2, √η7 (1 - 2η2), -η7 √η2 (2 - 3η2))`.
pub fn biased_ns_amplitudes<T: Real>(p: &BiasedNsParameters<T>) -> [T; 3] {
    let BiasedNsParameters { eta2, eta7 } = *p;
    let one = T::one();
    let r2 = eta2.sqrt();
    [r2, eta7.sqrt() * (one - lit::<T>(2.0) * eta2), -eta7 * r2 * (lit::<T>(2.0) - lit::<T>(3.0) * eta2)]
}

/// `[√η2 - √η7 (1 - 2η2), √η2 - η7 √η2 (2 - 3η2)]`, zero at the balanced point.
pub fn biased_balance_residuals<T: Real>(p: &BiasedNsParameters<T>) -> [T; 2] {
    let [l0, l1, l2] = biased_ns_amplitudes(p);
    [l0 - l1, l0 + l2]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasedSolution<T: Real> {
    pub params: BiasedNsParameters<T>,
    pub residuals: [T; 2],
    /// Newton root started from (0.2, 0.8).
    pub newton: Option<BiasedNsParameters<T>>,
    /// λ0² = η2.
    pub success_probability: T,
}

/// Balanced biased NS gate. Eliminating η7 = 1/(2 - 3η2) leaves
/// `7η2² - 6η2 + 1 = 0`; the root (3 + √2)/7 makes the one-photon amplitude
/// negative and is discarded.
pub fn solve_biased_ns<T: Real>() -> BiasedSolution<T> {
    let disc = T::SQRT_2();
    let seven = lit::<T>(7.0);
    let candidates = [(lit::<T>(3.0) - disc) / seven, (lit::<T>(3.0) + disc) / seven];
    let admissible = candidates.into_iter().find(|&eta2| {
        let eta7 = (lit::<T>(2.0) - lit::<T>(3.0) * eta2).recip();
        match BiasedNsParameters::new(eta2, eta7) {
            Ok(p) => {
                let [l0, l1, l2] = biased_ns_amplitudes(&p);
                l0 > T::zero() && l1 > T::zero() && l2 < T::zero()
            }
            Err(_) => false,
        }
    });
    debug_assert!(admissible.is_some_and(|e| (e - closed_form::eta2_biased::<T>()).abs() <= lit::<T>(1e-6)));

    let params = BiasedNsParameters::balanced();
    let tol = (T::epsilon() * lit::<T>(1e3)).max(lit::<T>(1e-14));
    let newton = newton_2d(
        |eta2, eta7| biased_balance_residuals(&BiasedNsParameters { eta2, eta7 }),
        [lit::<T>(0.2), lit::<T>(0.8)],
        tol,
        100,
    )
    .map(|x| BiasedNsParameters { eta2: x[0], eta7: x[1] });
    let l0 = biased_ns_amplitudes(&params)[0];
    BiasedSolution { params, residuals: biased_balance_residuals(&params), newton, success_probability: l0 * l0 }
}
