use alloc::string::String;
use alloc::vec::Vec;

use super::{
    boundary_data, extract_metric_expansion, mean_curvature_expansion, ricci_defect_direct_at, ricci_defect_fit,
    tensor_norm, NormalFormFamily,
};
use crate::error::Result;
use crate::fit::Ladder;
use crate::linalg::sym_eigenvalues;

/// A boolean verdict backed by a residual and the threshold it was tested against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flag {
    pub value: bool,
    pub residual: f64,
    pub threshold: f64,
}

impl Flag {
    /// Passes when `residual < tol · (1 + scale)`.
    pub fn test(residual: f64, tol: f64, scale: f64) -> Flag {
        let threshold = tol * (1.0 + scale.abs());
        Flag { value: residual < threshold, residual, threshold }
    }

    fn merge(self, other: Flag) -> Flag {
        if other.residual / other.threshold > self.residual / self.threshold {
            Flag { value: self.value && other.value, ..other }
        } else {
            Flag { value: self.value && other.value, ..self }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub tol: f64,
    pub ladder: Ladder,
    /// Boundary points at which every quantity is evaluated.
    pub points: Vec<Vec<f64>>,
    /// Number of radii per point for the Ricci-sign sampling.
    pub ricci_radii: usize,
}

/// Three characterisations that must agree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coherence {
    pub expansion: bool,
    pub ricci: bool,
    pub scalar_and_umbilic: bool,
}

impl Coherence {
    pub fn agrees(&self) -> bool {
        self.expansion == self.ricci && self.ricci == self.scalar_and_umbilic
    }
}

/// Sampled eigenvalue range of `r² (Ric_{g+} + n g_+)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RicciSignEvidence {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub samples: usize,
    pub nonnegative: bool,
    pub nonpositive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCurvatureBound {
    /// Second derivative of `H_r` at `r = 0`.
    pub h2: f64,
    /// `R̂ / (n − 1)`.
    pub bound: f64,
    pub holds: bool,
    pub equality: bool,
    pub equality_expected: bool,
}

impl MeanCurvatureBound {
    pub fn consistent(&self) -> bool {
        self.holds && self.equality == self.equality_expected
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub n: usize,
    pub tol: f64,
    pub points: usize,
    pub g1_zero: Flag,
    pub umbilic: Flag,
    pub totally_geodesic: Flag,
    pub mean_curvature_zero: Flag,
    /// Undefined when `n < 3`.
    pub g2_is_minus_schouten: Option<Flag>,
    pub w0i0j_zero: Option<Flag>,
    pub wpe: Option<bool>,
    /// `(c1, c2)` at the first point.
    pub scalar_defect: (f64, f64),
    pub c1_zero: Flag,
    pub c2_zero: Flag,
    /// From the direct fit of `r (Ric_{g+} + n g_+)`.
    pub ricci_order_m1_zero: Flag,
    pub ricci_order0_zero: Flag,
    pub part1: Coherence,
    pub part2: Option<Coherence>,
    pub ricci_sign: RicciSignEvidence,
    /// With sampled `Ric_{g+} + n g_+ ≥ 0` and `n ≥ 3`: WPE iff `c1 = c2 = 0`.
    pub nonnegative_ricci_check: Option<bool>,
    /// Umbilic boundary with sampled `Ric_{g+} + n g_+ ≤ 0` and `n ≥ 3`: same equivalence.
    pub nonpositive_ricci_check: Option<bool>,
    /// Present when `c1 = c2 = 0`.
    pub mean_curvature_bound: Option<MeanCurvatureBound>,
    pub notes: Vec<String>,
    /// False if any of the equivalences above fails on this instance.
    pub consistent: bool,
}

/// Deterministic points spread over the family's boundary box (Halton sequence).
pub fn boundary_points<F: NormalFormFamily + ?Sized>(fam: &F, count: usize, offset: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u32; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    let (lo, hi) = fam.boundary_box();
    let n = fam.boundary_dim();
    (0..count)
        .map(|k| {
            (0..n)
                .map(|d| {
                    let base = PRIMES[d % PRIMES.len()] as usize;
                    let mut i = k + offset + 1;
                    let mut f = 1.0;
                    let mut v = 0.0;
                    while i > 0 {
                        f /= base as f64;
                        v += f * (i % base) as f64;
                        i /= base;
                    }
                    lo + (hi - lo) * v
                })
                .collect()
        })
        .collect()
}

pub fn ricci_sign_evidence<F: NormalFormFamily + ?Sized>(
    fam: &F,
    points: &[Vec<f64>],
    radii: usize,
    tol: f64,
) -> Result<RicciSignEvidence> {
    let top = 0.9 * fam.r_max().min(1.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut samples = 0;
    for x in points {
        for k in 1..=radii {
            let r = top * k as f64 / radii as f64;
            let m = ricci_defect_direct_at(fam, r, x)?.scale(r * r);
            let ev = sym_eigenvalues(&m);
            lo = lo.min(ev[0]);
            hi = hi.max(ev[ev.len() - 1]);
            samples += 1;
        }
    }
    let scale = 1.0 + lo.abs().max(hi.abs());
    Ok(RicciSignEvidence {
        min_eigenvalue: lo,
        max_eigenvalue: hi,
        samples,
        nonnegative: lo >= -tol * scale,
        nonpositive: hi <= tol * scale,
    })
}

pub fn classify<F: NormalFormFamily + ?Sized>(fam: &F, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    let n = fam.boundary_dim();
    let nf = n as f64;
    let tol = cfg.tol;
    let zero = Flag { value: true, residual: 0.0, threshold: tol };
    let mut g1_zero = zero;
    let mut umbilic = zero;
    let mut totally_geodesic = zero;
    let mut mean_curvature_zero = zero;
    let mut g2_p: Option<Flag> = if n >= 3 { Some(zero) } else { None };
    let mut w_zero: Option<Flag> = if n >= 3 { Some(zero) } else { None };
    let mut c1_zero = zero;
    let mut c2_zero = zero;
    let mut ric_m1 = zero;
    let mut ric_0 = zero;
    let mut first_defect = None;
    let mut h2_checks: Vec<(f64, f64, bool)> = Vec::new();

    for x in &cfg.points {
        let data = boundary_data(fam, x)?;
        let exp = extract_metric_expansion(fam, x, &cfg.ladder, false)?;
        let gi = &data.ghat_inv;
        g1_zero = g1_zero.merge(Flag::test(tensor_norm(gi, &exp.g[1]), tol, 0.0));
        umbilic = umbilic.merge(Flag::test(tensor_norm(gi, &data.l_trace_free()), tol, 0.0));
        totally_geodesic = totally_geodesic.merge(Flag::test(libm::sqrt(data.l_norm2), tol, 0.0));
        mean_curvature_zero = mean_curvature_zero.merge(Flag::test(data.h_hat.abs(), tol, 0.0));
        if let (Some(f), Some(p)) = (g2_p.as_mut(), data.p_hat.as_ref()) {
            let res = tensor_norm(gi, &exp.g[2].add(p));
            *f = f.merge(Flag::test(res, tol, tensor_norm(gi, p)));
        }
        if let (Some(f), Some(w)) = (w_zero.as_mut(), data.w0i0j.as_ref()) {
            *f = f.merge(Flag::test(tensor_norm(gi, w), tol, 0.0));
        }
        let (c1, c2) = data.scalar_defect();
        first_defect.get_or_insert((c1, c2));
        c1_zero = c1_zero.merge(Flag::test(c1.abs(), tol, 0.0));
        c2_zero = c2_zero.merge(Flag::test(c2.abs(), tol, 0.0));

        let fit = ricci_defect_fit(fam, x, &cfg.ladder)?;
        let fit_tol = tol.max(10.0 * fit.error_estimate);
        ric_m1 = ric_m1.merge(Flag::test(fit.order_m1.max_abs(), fit_tol, 0.0));
        ric_0 = ric_0.merge(Flag::test(fit.order0.max_abs(), fit_tol, 0.0));

        let mc = mean_curvature_expansion(fam, x)?;
        let bound = if n >= 2 { data.scalar_hat / (nf - 1.0) } else { f64::NAN };
        h2_checks.push((2.0 * mc.singular_extracted[2], bound, libm::sqrt(data.l_norm2) < tol));
    }

    let wpe = match g2_p {
        Some(f) => Some(g1_zero.value && f.value),
        None => None,
    };
    let part1 = Coherence {
        expansion: g1_zero.value,
        ricci: ric_m1.value,
        scalar_and_umbilic: c1_zero.value && umbilic.value,
    };
    let part2 = match (wpe, w_zero) {
        (Some(w), Some(wz)) => Some(Coherence {
            expansion: w,
            ricci: ric_m1.value && ric_0.value,
            scalar_and_umbilic: c1_zero.value && c2_zero.value && umbilic.value && wz.value,
        }),
        _ => None,
    };
    let ricci_sign = ricci_sign_evidence(fam, &cfg.points, cfg.ricci_radii, tol)?;
    let scalar_small = c1_zero.value && c2_zero.value;
    let nonnegative_ricci_check = match wpe {
        Some(w) if ricci_sign.nonnegative => Some(w == scalar_small),
        _ => None,
    };
    let nonpositive_ricci_check = match wpe {
        Some(w) if ricci_sign.nonpositive && umbilic.value => Some(w == scalar_small),
        _ => None,
    };
    let mean_curvature_bound = if scalar_small && n >= 2 {
        let mut out: Option<MeanCurvatureBound> = None;
        for (h2, bound, tg) in h2_checks {
            let thr = tol * (1.0 + bound.abs());
            let b = MeanCurvatureBound {
                h2,
                bound,
                holds: h2 <= bound + thr,
                equality: (h2 - bound).abs() < thr,
                equality_expected: tg,
            };
            if out.map_or(true, |o| o.consistent() && !b.consistent()) {
                out = Some(b);
            }
        }
        out
    } else {
        None
    };

    let mut notes = Vec::new();
    if n < 3 {
        notes.push(String::from("n = 2: Schouten tensor of the boundary is undefined; WPE flag not reported"));
    }
    if ricci_sign.nonnegative || ricci_sign.nonpositive {
        notes.push(String::from("Ricci sign is sampled evidence only"));
    }
    let mut consistent = part1.agrees();
    if let Some(p) = part2 {
        consistent &= p.agrees();
    }
    for c in [nonnegative_ricci_check, nonpositive_ricci_check].into_iter().flatten() {
        consistent &= c;
    }
    if let Some(b) = mean_curvature_bound {
        consistent &= b.consistent();
    }
    Ok(ClassificationReport {
        n,
        tol,
        points: cfg.points.len(),
        g1_zero,
        umbilic,
        totally_geodesic,
        mean_curvature_zero,
        g2_is_minus_schouten: g2_p,
        w0i0j_zero: w_zero,
        wpe,
        scalar_defect: first_defect.unwrap_or((0.0, 0.0)),
        c1_zero,
        c2_zero,
        ricci_order_m1_zero: ric_m1,
        ricci_order0_zero: ric_0,
        part1,
        part2,
        ricci_sign,
        nonnegative_ricci_check,
        nonpositive_ricci_check,
        mean_curvature_bound,
        notes,
        consistent,
    })
}
