use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counts::{poisson_table, CountsTable};
use super::pool::Outcome;
use crate::qmat::{
    bloch_assemble, fidelity, hermitian_eig, BlochRep, HermitianEig, ComplexMatrix, DensityMatrix,
    DensityMatrixJson, HERMITIAN_TOL,
};
use crate::states::{family_state, retrieve_params, FamilyParams, RetrievedParams};
use crate::{Error, Result};

pub const DEFAULT_VARIATIONS: usize = 20;

/// Linear inversion from a 6×6 table of (possibly non-integer) weights.
///
/// Each basis pair `(i, j)` gives `T_ij` from its four cells. Local Bloch
/// components pool the two-outcome marginals over all three partner bases,
/// weighted by counts.
pub fn tomo_from_weights(w: &[[f64; 6]; 6]) -> Result<ComplexMatrix> {
    let total: f64 = w.iter().flatten().sum();
    if !(total > 0.0) {
        return Err(Error::EmptyCounts);
    }
    let mut rep = BlochRep {
        a: [0.0; 3],
        b: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    let mut a_num = [0.0; 3];
    let mut a_den = [0.0; 3];
    let mut b_num = [0.0; 3];
    let mut b_den = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (mut n, mut corr, mut sa, mut sb) = (0.0, 0.0, 0.0, 0.0);
            for a in [Outcome::from_index(2 * i).unwrap(), Outcome::from_index(2 * i + 1).unwrap()] {
                for b in [Outcome::from_index(2 * j).unwrap(), Outcome::from_index(2 * j + 1).unwrap()] {
                    let c = w[a.index()][b.index()];
                    n += c;
                    corr += a.sign() * b.sign() * c;
                    sa += a.sign() * c;
                    sb += b.sign() * c;
                }
            }
            if n > 0.0 {
                rep.t[i][j] = corr / n;
            }
            a_num[i] += sa;
            a_den[i] += n;
            b_num[j] += sb;
            b_den[j] += n;
        }
    }
    for k in 0..3 {
        if a_den[k] > 0.0 {
            rep.a[k] = a_num[k] / a_den[k];
        }
        if b_den[k] > 0.0 {
            rep.b[k] = b_num[k] / b_den[k];
        }
    }
    Ok(bloch_assemble(&rep))
}

/// Hermitian, unit-trace estimate; not necessarily PSD.
pub fn tomo_linear_inversion(counts: &CountsTable) -> Result<ComplexMatrix> {
    if counts.total() == 0 {
        return Err(Error::EmptyCounts);
    }
    tomo_from_weights(&counts.as_f64())
}

/// Frobenius-closest density matrix: clip the spectrum onto the simplex by
/// zeroing the most negative eigenvalues and spreading their mass evenly
/// over the rest.
pub fn project_to_physical(h: &ComplexMatrix) -> Result<DensityMatrix> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput(defect));
    }
    let eig = hermitian_eig(h)?;
    let d = eig.values.len();
    let mut vals = eig.values.clone();
    let shift = (1.0 - vals.iter().sum::<f64>()) / d as f64;
    for v in &mut vals {
        *v += shift;
    }
    let mut keep = d;
    let mut acc = 0.0;
    while keep > 0 && vals[keep - 1] + acc / (keep as f64) < 0.0 {
        acc += vals[keep - 1];
        vals[keep - 1] = 0.0;
        keep -= 1;
    }
    for v in vals.iter_mut().take(keep) {
        *v += acc / keep as f64;
    }
    let clipped = HermitianEig {
        values: vals,
        vectors: eig.vectors,
    };
    DensityMatrix::new(clipped.reconstruct().hermitian_part())
}

/// Inversion, projection and family retrieval for one table.
pub fn reconstruct(counts: &CountsTable) -> Result<(DensityMatrix, RetrievedParams)> {
    let rho = project_to_physical(&tomo_linear_inversion(counts)?)?;
    let params = retrieve_params(&rho)?;
    Ok((rho, params))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub sigma_p: f64,
    pub sigma_r: f64,
    pub per_resample: Vec<RetrievedParams>,
    #[serde(skip)]
    pub tables: Vec<CountsTable>,
}

fn sample_std(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    (xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Poisson resampling of every cell, rerunning the full reconstruction per
/// resample. Resample `k` uses its own generator stream, so results do not
/// depend on thread scheduling.
pub fn bootstrap(counts: &CountsTable, variations: usize, seed: u64) -> Result<BootstrapResult> {
    if counts.total() == 0 {
        return Err(Error::EmptyCounts);
    }
    let observed = counts.as_f64();
    let runs: Vec<(CountsTable, RetrievedParams)> = (0..variations)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1000 + k as u64);
            let table = CountsTable {
                counts: poisson_table(&observed, &mut rng),
                duration_s: counts.duration_s,
            };
            let (_, params) = reconstruct(&table)?;
            Ok((table, params))
        })
        .collect::<Result<_>>()?;
    let per_resample: Vec<RetrievedParams> = runs.iter().map(|(_, p)| *p).collect();
    Ok(BootstrapResult {
        sigma_p: sample_std(per_resample.iter().map(|x| x.p)),
        sigma_r: sample_std(per_resample.iter().map(|x| x.r)),
        per_resample,
        tables: runs.into_iter().map(|(t, _)| t).collect(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TomographyResult {
    pub rho_hat: DensityMatrixJson,
    /// Fidelity to the reference family member used for comparison.
    pub fidelity_to_target: f64,
    pub target: [f64; 2],
    pub retrieved: RetrievedParams,
    pub bootstrap_sigma_p: f64,
    pub bootstrap_sigma_r: f64,
    pub per_resample: Vec<RetrievedParams>,
    pub total_counts: u64,
}

/// Full analysis of one counts table. Without `target`, fidelity is taken
/// against the retrieved family member.
pub fn analyze_counts(
    counts: &CountsTable,
    target: Option<FamilyParams>,
    variations: usize,
    seed: u64,
) -> Result<(DensityMatrix, TomographyResult)> {
    let (rho, retrieved) = reconstruct(counts)?;
    let target = match target {
        Some(t) => t,
        None => FamilyParams::new(retrieved.p, retrieved.r)?,
    };
    let fid = fidelity(&rho, &family_state(target))?;
    let boot = bootstrap(counts, variations, seed)?;
    let result = TomographyResult {
        rho_hat: rho.to_json(),
        fidelity_to_target: fid,
        target: [target.p(), target.r()],
        retrieved,
        bootstrap_sigma_p: boot.sigma_p,
        bootstrap_sigma_r: boot.sigma_r,
        per_resample: boot.per_resample,
        total_counts: counts.total(),
    };
    Ok((rho, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsim::counts::{outcome_probabilities, simulate_counts, DetectorConfig};
    use crate::states::family_matrix;

    #[test]
    fn noiseless_mixed_and_family() {
        let w = outcome_probabilities(&ComplexMatrix::identity(4).scale(0.25));
        let back = tomo_from_weights(&w).unwrap();
        assert!(back.max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)) < 1e-12);
        let target = family_matrix(0.4078, 0.859);
        let back = tomo_from_weights(&outcome_probabilities(&target)).unwrap();
        assert!(back.max_abs_diff(&target) < 1e-10);
    }

    #[test]
    fn single_count_is_hermitian() {
        let mut t = CountsTable {
            counts: [[0; 6]; 6],
            duration_s: 1.0,
        };
        t.counts[4][5] = 1;
        let h = tomo_linear_inversion(&t).unwrap();
        assert!(h.is_hermitian(1e-15));
        assert!((h.trace().re - 1.0).abs() < 1e-15);
        assert!(project_to_physical(&h).is_ok());
        t.counts[4][5] = 0;
        assert!(matches!(tomo_linear_inversion(&t), Err(Error::EmptyCounts)));
    }

    #[test]
    fn water_filling_example() {
        let h = ComplexMatrix::from_real_diag(&[0.6, 0.6, 0.0, -0.2]);
        let rho = project_to_physical(&h).unwrap();
        let want = ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0, 0.0]);
        assert!(rho.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn water_filling_beats_simplex_grid() {
        // brute force over diagonal states on a 1/200 grid of the 3-simplex
        let target = [0.6, 0.6, 0.0, -0.2];
        let dist = |d: [f64; 4]| d.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let best = dist([0.5, 0.5, 0.0, 0.0]);
        let n = 200;
        for i in 0..=n {
            for j in 0..=n - i {
                for k in 0..=n - i - j {
                    let d = [i, j, k, n - i - j - k].map(|x| x as f64 / n as f64);
                    assert!(dist(d) >= best - 1e-12);
                }
            }
        }
    }

    #[test]
    fn psd_input_unchanged() {
        let m = family_matrix(0.3, 0.7);
        assert!(project_to_physical(&m).unwrap().matrix().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn bootstrap_deterministic_and_small_at_high_counts() {
        let rho = crate::states::family_state(FamilyParams::new(0.4, 0.85).unwrap());
        let det = DetectorConfig {
            rate_hz: 1e9,
            ..Default::default()
        };
        let t = simulate_counts(&rho, &det, 20.0, 1).unwrap();
        let a = bootstrap(&t, 20, 5).unwrap();
        let b = bootstrap(&t, 20, 5).unwrap();
        assert_eq!(a.per_resample, b.per_resample);
        assert!(a.sigma_p < 1e-3 && a.sigma_r < 1e-3);
        assert_eq!(a.per_resample.len(), 20);
    }

    #[test]
    fn bootstrap_sigma_scales_inverse_sqrt() {
        let rho = crate::states::family_state(FamilyParams::new(0.4, 0.85).unwrap());
        let det = DetectorConfig::default();
        // six totals spanning one decade
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let duration = 20.0 * 10f64.powf(i as f64 / 5.0);
                let t = simulate_counts(&rho, &det, duration, 2).unwrap();
                let s = bootstrap(&t, 400, 9).unwrap().sigma_p;
                ((t.total() as f64).ln(), s.ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 6.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 6.0;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope + 0.5).abs() <= 0.05, "slope = {slope}");
    }
}
