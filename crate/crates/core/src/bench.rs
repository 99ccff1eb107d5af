//! Metered sweeps: generate instances, run a mode on each, and tabulate the
//! meters against the oracle label.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::derive_rng;
use crate::dyck_codec::format_syms;
use crate::par::par_map;
use crate::run::{run_str, Mode, RunError, RunSpec};
use crate::testkit::{format_bits, gen_flipped, random_dyck, Base, Instance, InstanceKind, Label};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    pub ns: Vec<u64>,
    pub ks: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    /// Template for `c`, `epsilon`, `gamma`, `block_len` and `budget`.
    pub template: RunSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub mode: Mode,
    pub n: u64,
    pub k: u32,
    pub trial: u64,
    pub distance: u64,
    pub within_k: bool,
    pub accepted: bool,
    pub correct: bool,
    pub max_live_bytes: u64,
    pub randomness_bits: u64,
    pub items: u64,
    pub postprocess_steps: u64,
    pub ns_per_item: f64,
}

pub const CSV_HEADER: &str = "mode,n,k,trial,distance,within_k,accepted,correct,max_live_bytes,randomness_bits,items,postprocess_steps,ns_per_item";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.2}",
            self.mode,
            self.n,
            self.k,
            self.trial,
            self.distance,
            self.within_k,
            self.accepted,
            self.correct,
            self.max_live_bytes,
            self.randomness_bits,
            self.items,
            self.postprocess_steps,
            self.ns_per_item
        )
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

/// Distance planted in trial `trial`: even trials sit at `k`, odd trials just
/// beyond the mode's guarantee (`k + 1` for the fingerprint tests, `2k` for
/// the gap tests of the lite modes).
pub fn planted_distance(mode: Mode, k: u32, trial: u64) -> u64 {
    let k = k as u64;
    if trial.is_multiple_of(2) {
        k
    } else {
        match mode {
            Mode::HamLite | Mode::DyckLite => (2 * k).max(k + 1),
            _ => k + 1,
        }
    }
}

/// The instance for one sweep cell and trial.
pub fn bench_instance(mode: Mode, n: u64, k: u32, trial: u64, seed: u64) -> Result<Instance, RunError> {
    let mut rng = derive_rng(seed, &format!("bench/{mode}/{n}/{k}/{trial}"));
    let d = planted_distance(mode, k, trial) as usize;
    let kind = mode.default_kind();
    let base = match kind {
        InstanceKind::Ham => Base::Ham((0..n).map(|_| rng.random()).collect()),
        _ => {
            if n % 2 == 1 {
                return Err(RunError::Usage(format!("Dyck sweeps need even n, got {n}")));
            }
            Base::Dyck(random_dyck(n as usize, &mut rng))
        }
    };
    gen_flipped(&base, d, k as u64, &mut rng).map_err(|e| RunError::Usage(e.to_string()))
}

/// Runs every `(n, k, trial)` cell; trials run in parallel when enabled.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<BenchRow>, RunError> {
    if spec.trials == 0 {
        return Err(RunError::Usage("trials must be at least 1".into()));
    }
    if spec.ns.is_empty() || spec.ks.is_empty() {
        return Err(RunError::Usage("sweep needs at least one n and one k".into()));
    }
    let mut cells = vec![];
    for &n in &spec.ns {
        for &k in &spec.ks {
            for t in 0..spec.trials {
                cells.push((n, k, t));
            }
        }
    }
    par_map(&cells, |&(n, k, t)| bench_trial(spec, n, k, t)).into_iter().collect()
}

fn bench_trial(spec: &SweepSpec, n: u64, k: u32, trial: u64) -> Result<BenchRow, RunError> {
    let inst = bench_instance(spec.mode, n, k, trial, spec.seed)?;
    let run_spec = RunSpec { mode: spec.mode, kind: inst.kind, n: inst.n, k, seed: spec.seed.wrapping_add(trial), ..spec.template.clone() };
    let start = Instant::now();
    let report = run_str(&run_spec, &inst.payload)?;
    let elapsed = start.elapsed().as_nanos() as f64;
    let within = inst.label() == Label::WithinK;
    Ok(BenchRow {
        mode: spec.mode,
        n,
        k,
        trial,
        distance: inst.true_distance,
        within_k: within,
        accepted: report.accepted(),
        correct: report.accepted() == within,
        max_live_bytes: report.meter.max_live_bytes,
        randomness_bits: report.meter.randomness_bits,
        items: report.meter.items,
        postprocess_steps: report.meter.postprocess_steps,
        ns_per_item: elapsed / inst.payload.len().max(1) as f64,
    })
}

/// Least-squares fit of `y ≈ Σ_j a_j · f_j(x)` through the normal equations.
/// Returns the coefficients, or `None` if the system is singular.
#[allow(clippy::needless_range_loop)]
pub fn least_squares(features: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let m = features.first()?.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (f, yv) in features.iter().zip(y) {
        for i in 0..m {
            for j in 0..m {
                a[i][j] += f[i] * f[j];
            }
            a[i][m] += f[i] * yv;
        }
    }
    for col in 0..m {
        let piv = (col..m).max_by(|p, q| a[*p][col].abs().total_cmp(&a[*q][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

/// Symbols of a generated instance, for feeding the library directly.
pub fn instance_symbols(inst: &Instance) -> String {
    match inst.kind {
        InstanceKind::Ham => format_bits(&crate::testkit::parse_bits(&inst.payload).expect("generated")),
        _ => format_syms(&crate::dyck_codec::parse_syms(&inst.payload).expect("generated")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mode: Mode, ns: Vec<u64>, ks: Vec<u32>, trials: u64) -> SweepSpec {
        SweepSpec { mode, ns, ks, trials, seed: 3, template: RunSpec::new(mode, 1, 0) }
    }

    #[test]
    fn zero_trials_is_a_usage_error() {
        assert!(matches!(sweep(&spec(Mode::HamFp, vec![64], vec![2], 0)), Err(RunError::Usage(_))));
    }

    #[test]
    fn rows_cover_cells_and_are_correct() {
        let rows = sweep(&spec(Mode::HamFp, vec![64, 128], vec![1, 2], 4)).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.correct));
        assert!(rows.iter().filter(|r| r.trial % 2 == 0).all(|r| r.within_k && r.distance == r.k as u64));
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.starts_with(CSV_HEADER));
    }

    #[test]
    fn dyck_rows() {
        let rows = sweep(&spec(Mode::DyckFp, vec![256], vec![2], 4)).unwrap();
        assert!(rows.iter().all(|r| r.correct && r.items == 256));
        assert!(matches!(sweep(&spec(Mode::DyckFp, vec![255], vec![2], 1)), Err(RunError::Usage(_))));
    }

    #[test]
    fn instances_are_reproducible() {
        let a = bench_instance(Mode::HamLite, 100, 4, 3, 9).unwrap();
        let b = bench_instance(Mode::HamLite, 100, 4, 3, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.true_distance, 8);
        assert_eq!(instance_symbols(&a), a.payload);
    }

    #[test]
    fn fit_recovers_coefficients() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let feats: Vec<Vec<f64>> = xs.iter().map(|x| vec![x.sqrt(), 1.0]).collect();
        let y: Vec<f64> = xs.iter().map(|x| 3.0 * x.sqrt() + 7.0).collect();
        let c = least_squares(&feats, &y).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-9 && (c[1] - 7.0).abs() < 1e-9);
        assert!(least_squares(&[vec![1.0, 1.0]], &[1.0]).is_none());
    }
}
