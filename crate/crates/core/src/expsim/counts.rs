use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::pool::Outcome;
use crate::qmat::{ComplexMatrix, DensityMatrix};
use crate::{Error, Result};

/// Coincidence counts indexed `[alice outcome][bob outcome]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountsTable {
    pub counts: [[u64; 6]; 6],
    pub duration_s: f64,
}

/// Metadata written next to a counts CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountsSidecar {
    pub duration_s: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl CountsTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn as_f64(&self) -> [[f64; 6]; 6] {
        self.counts.map(|row| row.map(|c| c as f64))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["outcome_a", "outcome_b", "counts"])?;
        for a in Outcome::ALL {
            for b in Outcome::ALL {
                let n = self.counts[a.index()][b.index()].to_string();
                w.write_record([a.token(), b.token(), n.as_str()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `outcome_a,outcome_b,counts`. All 36 pairs must appear once.
    pub fn read_csv<R: Read>(input: R, duration_s: f64) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            outcome_a: String,
            outcome_b: String,
            counts: u64,
        }
        let mut counts = [[0u64; 6]; 6];
        let mut seen = [[false; 6]; 6];
        let mut rdr = csv::Reader::from_reader(input);
        for row in rdr.deserialize() {
            let row: Row = row?;
            let a: Outcome = row.outcome_a.parse()?;
            let b: Outcome = row.outcome_b.parse()?;
            if std::mem::replace(&mut seen[a.index()][b.index()], true) {
                return Err(Error::Parse(format!(
                    "duplicate row for ({}, {})",
                    a.token(),
                    b.token()
                )));
            }
            counts[a.index()][b.index()] = row.counts;
        }
        for a in Outcome::ALL {
            for b in Outcome::ALL {
                if !seen[a.index()][b.index()] {
                    return Err(Error::Parse(format!(
                        "missing row for ({}, {})",
                        a.token(),
                        b.token()
                    )));
                }
            }
        }
        Ok(Self { counts, duration_s })
    }

    /// Reads `path` and, if present, the sidecar `path` with extension
    /// `.json` for the duration.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, Option<CountsSidecar>)> {
        let path = path.as_ref();
        let sidecar_path = path.with_extension("json");
        let sidecar: Option<CountsSidecar> = if sidecar_path.exists() && sidecar_path != path {
            Some(serde_json::from_str(&std::fs::read_to_string(&sidecar_path)?)?)
        } else {
            None
        };
        let duration = sidecar.as_ref().map_or(0.0, |s| s.duration_s);
        let table = Self::read_csv(std::fs::File::open(path)?, duration)?;
        Ok((table, sidecar))
    }

    /// Writes the CSV at `path` and the sidecar next to it.
    pub fn save(&self, path: impl AsRef<Path>, alpha: f64, seed: u64) -> Result<()> {
        let path = path.as_ref();
        self.write_csv(std::fs::File::create(path)?)?;
        let sidecar = CountsSidecar {
            duration_s: self.duration_s,
            alpha,
            seed,
        };
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }
}

/// Source rate, detection efficiency and optional outcome crosstalk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Pair rate before losses, in Hz.
    pub rate_hz: f64,
    pub efficiency: f64,
    /// Row-stochastic: measuring outcome `i` responds to ideal outcome `j`
    /// with weight `crosstalk[i][j]`.
    pub crosstalk: Option<[[f64; 6]; 6]>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            rate_hz: 1.0e4,
            efficiency: 0.172,
            crosstalk: None,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite()) {
            return Err(Error::InvalidRate(format!("rate {} Hz", self.rate_hz)));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidRate(format!("efficiency {}", self.efficiency)));
        }
        if let Some(c) = &self.crosstalk {
            for row in c {
                let s: f64 = row.iter().sum();
                if row.iter().any(|&x| x < 0.0) || (s - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidRate("crosstalk rows must be stochastic".into()));
                }
            }
        }
        Ok(())
    }
}

/// `⟨Π_a ⊗ Π_b⟩` for all 36 outcome pairs.
pub fn outcome_probabilities(rho: &ComplexMatrix) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            let ket: Vec<_> = a
                .ket()
                .iter()
                .flat_map(|x| b.ket().map(|y| x * y))
                .collect();
            out[a.index()][b.index()] = rho.expectation(&ket).re.max(0.0);
        }
    }
    out
}

fn apply_crosstalk(p: [[f64; 6]; 6], c: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut out = [[0.0; 6]; 6];
    for (i, row) in out.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..6 {
                for b in 0..6 {
                    acc += c[i][a] * c[k][b] * p[a][b];
                }
            }
            *cell = acc;
        }
    }
    out
}

/// Mean counts with every joint outcome measured for `duration_s / 36`.
pub fn expected_counts(
    rho: &DensityMatrix,
    detector: &DetectorConfig,
    duration_s: f64,
) -> Result<[[f64; 6]; 6]> {
    detector.validate()?;
    rho.matrix().check_dim(4)?;
    let mut probs = outcome_probabilities(rho.matrix());
    if let Some(c) = &detector.crosstalk {
        probs = apply_crosstalk(probs, c);
    }
    let scale = detector.rate_hz * detector.efficiency * duration_s / 36.0;
    Ok(probs.map(|row| row.map(|p| p * scale)))
}

pub(crate) fn poisson_table(mean: &[[f64; 6]; 6], rng: &mut ChaCha8Rng) -> [[u64; 6]; 6] {
    mean.map(|row| {
        row.map(|m| match Poisson::new(m) {
            Ok(d) if m > 0.0 => d.sample(rng) as u64,
            _ => 0,
        })
    })
}

/// Poisson coincidence counts from the state an animation produces.
pub fn simulate_counts(
    rho: &DensityMatrix,
    detector: &DetectorConfig,
    duration_s: f64,
    seed: u64,
) -> Result<CountsTable> {
    let mean = expected_counts(rho, detector, duration_s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4);
    Ok(CountsTable {
        counts: poisson_table(&mean, &mut rng),
        duration_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::psi_plus;

    #[test]
    fn mixed_state_expectations_equal() {
        let e = expected_counts(&DensityMatrix::maximally_mixed(4), &DetectorConfig::default(), 20.0)
            .unwrap();
        let first = e[0][0];
        assert!(first > 0.0);
        assert!(e.iter().flatten().all(|&x| (x - first).abs() < 1e-9));
    }

    #[test]
    fn singlet_zz_vanishes() {
        let rho = DensityMatrix::pure(&psi_plus()).unwrap();
        let e = expected_counts(&rho, &DetectorConfig::default(), 20.0).unwrap();
        assert!(e[Outcome::Z0.index()][Outcome::Z0.index()].abs() < 1e-12);
        assert!(e[Outcome::Z0.index()][Outcome::Z1.index()] > 0.0);
    }

    #[test]
    fn invalid_rates() {
        let rho = DensityMatrix::maximally_mixed(4);
        for det in [
            DetectorConfig {
                rate_hz: 0.0,
                ..Default::default()
            },
            DetectorConfig {
                efficiency: 1.5,
                ..Default::default()
            },
        ] {
            assert!(matches!(simulate_counts(&rho, &det, 1.0, 0), Err(Error::InvalidRate(_))));
        }
    }

    #[test]
    fn csv_roundtrip_and_sidecar() {
        let rho = DensityMatrix::maximally_mixed(4);
        let t = simulate_counts(&rho, &DetectorConfig::default(), 20.0, 3).unwrap();
        assert_eq!(t, simulate_counts(&rho, &DetectorConfig::default(), 20.0, 3).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("counts.csv");
        t.save(&path, 1.106, 3).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("outcome_a,outcome_b,counts\nX0,X0,"));
        let (back, side) = CountsTable::load(&path).unwrap();
        assert_eq!(back, t);
        assert_eq!(side.unwrap().seed, 3);
    }

    #[test]
    fn csv_rejects_bad_tokens() {
        let bad = "outcome_a,outcome_b,counts\nX0,W1,4\n";
        assert!(CountsTable::read_csv(bad.as_bytes(), 1.0).is_err());
        let dup = "outcome_a,outcome_b,counts\nX0,X1,4\nX0,X1,5\n";
        assert!(CountsTable::read_csv(dup.as_bytes(), 1.0).is_err());
        let short = "outcome_a,outcome_b,counts\nX0,X1,4\n";
        assert!(CountsTable::read_csv(short.as_bytes(), 1.0).is_err());
    }

    #[test]
    fn crosstalk_identity_is_noop() {
        let rho = DensityMatrix::pure(&psi_plus()).unwrap();
        let mut id = [[0.0; 6]; 6];
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let det = DetectorConfig {
            crosstalk: Some(id),
            ..Default::default()
        };
        let a = expected_counts(&rho, &det, 20.0).unwrap();
        let b = expected_counts(&rho, &DetectorConfig::default(), 20.0).unwrap();
        assert_eq!(a, b);
    }
}
