//! Experiment drivers. Timings come from the solvers themselves and cover
//! the solve only, never problem generation or output.

use super::config::{Experiment, ExperimentConfig, OutputFormat};
use super::table::{emit, render, BenchRow};
use crate::dense::{inf_norm_vec, sub_vec};
use crate::error::{Error, Result};
use crate::perturb::{random_perturbation, Conditioning, PerturbReport};
use crate::problems::{add_noise, example1, example2, ill_posed, prony, IllPosed, PronySpec};
use crate::randomized::{arttls_with_basis, rtls, rttls, select_truncation_gcv, AdaptiveConfig, RandConfig};
use crate::tls::{tls_svd, ttls, TlsProblem};

/// `‖x − reference‖_∞ / ‖reference‖_∞`.
pub fn rel_inf_error(x: &[f64], reference: &[f64]) -> f64 {
    inf_norm_vec(&sub_vec(x, reference)) / inf_norm_vec(reference)
}

/// Adaptive tolerances used for the ill-posed problems at `m = 1000` when the
/// configuration does not give one.
pub fn default_tolerance(problem: &str) -> Option<f64> {
    Some(match problem.parse::<IllPosed>().ok()? {
        IllPosed::Baart => 8e-1,
        IllPosed::Deriv2 => 2e-2,
        IllPosed::Foxgood => 5e-1,
        IllPosed::Gravity => 7e-1,
        IllPosed::Heat => 4e-1,
        IllPosed::Phillips => 4.0,
        IllPosed::Shaw => 6e-1,
    })
}

/// Builds the problem named in `cfg`. Noise is only added to the ill-posed
/// problems; the first synthetic example draws a fresh instance per
/// repetition.
pub fn build_problem(cfg: &ExperimentConfig, noise: f64, rep: usize) -> Result<TlsProblem> {
    let m = cfg.m;
    match cfg.problem.as_str() {
        "example1" => example1(m, cfg.n.unwrap_or(2 * m / 5), cfg.eps_p, cfg.seed.split(rep as u64)),
        "example2" => example2(m),
        "prony" => prony(&PronySpec::standard(m, cfg.n.unwrap_or(m / 2))),
        name => Ok(add_noise(&ill_posed(name, m)?, &cfg.noise(noise))),
    }
}

fn same_problem(a: &TlsProblem, b: &TlsProblem) -> bool {
    a.a == b.a && a.b == b.b
}

/// Perturbation study: one report per repetition, with a perturbation of
/// Frobenius norm `cfg.scale`.
pub fn run_perturb(cfg: &ExperimentConfig) -> Result<Vec<PerturbReport>> {
    if !matches!(cfg.problem.as_str(), "example1" | "example2") {
        return Err(Error::InvalidArgument(format!("perturb runs on example1 or example2, not `{}`", cfg.problem)));
    }
    let mut rows = Vec::with_capacity(cfg.repetitions);
    let mut cached: Option<(TlsProblem, Conditioning)> = None;
    for rep in 0..cfg.repetitions {
        let p = build_problem(cfg, 0.0, rep)?;
        let cond = match &cached {
            Some((q, c)) if same_problem(q, &p) => *c,
            _ => {
                let c = Conditioning::evaluate(&p, cfg.size_cap)?;
                cached = Some((p.clone(), c));
                c
            }
        };
        let (da, db) = random_perturbation(p.m(), p.n(), cfg.scale, cfg.seed.split(1_000_000 + rep as u64));
        rows.push(PerturbReport::evaluate(&p, &da, &db, &cond)?);
    }
    Ok(rows)
}

/// Untruncated solvers: SVD-based TLS against the randomized inverse-Gram
/// solver with `l` samples. The `k` column records `l`.
pub fn run_rtls_bench(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    if !matches!(cfg.problem.as_str(), "example1" | "example2" | "deriv2") {
        return Err(Error::InvalidArgument(format!("rtls runs on example1, example2 or deriv2, not `{}`", cfg.problem)));
    }
    let l = cfg.samples_l;
    let mut rows = Vec::new();
    for &noise in &cfg.noise_levels {
        for rep in 0..cfg.repetitions {
            let p = build_problem(cfg, noise, rep)?;
            let exact = tls_svd(&p)?;
            let rand_cfg = RandConfig { samples_l: l, trunc_k: l, oversample_p: 0, seed: cfg.seed.split(rep as u64) };
            let approx = rtls(&p, &rand_cfg)?;
            rows.push(BenchRow {
                problem: cfg.problem.clone(),
                m: p.m(),
                n: p.n(),
                noise: applied_noise(cfg, noise),
                k: l,
                time_ttls: exact.elapsed_seconds,
                time_rttls: approx.elapsed_seconds,
                time_arttls: None,
                err_rttls: rel_inf_error(&approx.x, &exact.x),
                err_arttls: None,
                eps: None,
                basis_j: None,
            });
        }
    }
    Ok(rows)
}

fn applied_noise(cfg: &ExperimentConfig, noise: f64) -> f64 {
    if cfg.problem.parse::<IllPosed>().is_ok() {
        noise
    } else {
        0.0
    }
}

/// Truncation index from the configuration, or by GCV on a rank-`l` sketch.
pub fn truncation_index(cfg: &ExperimentConfig, p: &TlsProblem) -> Result<usize> {
    match cfg.trunc_k {
        Some(k) => Ok(k),
        None => {
            let l = cfg.samples_l;
            select_truncation_gcv(p, &RandConfig { samples_l: l, trunc_k: 1, oversample_p: l.saturating_sub(1), seed: cfg.seed })
        }
    }
}

/// Truncated solvers: full-SVD TTLS against the sketched solver, and the
/// adaptive solver when `adaptive` is set.
fn run_truncated(cfg: &ExperimentConfig, adaptive: bool) -> Result<Vec<BenchRow>> {
    let eps = if adaptive {
        Some(cfg.tolerance_eps.or_else(|| default_tolerance(&cfg.problem)).ok_or_else(|| {
            Error::InvalidArgument(format!("no default tolerance for `{}`; set `eps`", cfg.problem))
        })?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for &noise in &cfg.noise_levels {
        let p = build_problem(cfg, noise, 0)?;
        let k = truncation_index(cfg, &p)?;
        let reference = ttls(&p, k)?;
        for rep in 0..cfg.repetitions {
            let seed = cfg.seed.split(rep as u64);
            let l = cfg.samples_l.max(k);
            let sketch = rttls(&p, &RandConfig::new(k, l - k, seed))?;
            let mut row = BenchRow {
                problem: cfg.problem.clone(),
                m: p.m(),
                n: p.n(),
                noise: applied_noise(cfg, noise),
                k,
                time_ttls: reference.elapsed_seconds,
                time_rttls: sketch.elapsed_seconds,
                time_arttls: None,
                err_rttls: rel_inf_error(&sketch.x, &reference.x),
                err_arttls: None,
                eps,
                basis_j: None,
            };
            if let Some(eps) = eps {
                let (sol, basis) = arttls_with_basis(&p, &AdaptiveConfig::new(eps, cfg.num_probes, seed))?;
                row.time_arttls = Some(sol.elapsed_seconds);
                row.err_arttls = Some(rel_inf_error(&sol.x, &reference.x));
                row.basis_j = Some(basis.size());
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// TTLS against the sketched truncated solver on ill-posed problems.
pub fn run_rttls_bench(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    require_ill_posed(cfg)?;
    run_truncated(cfg, false)
}

/// Adds the adaptive solver to [`run_rttls_bench`].
pub fn run_arttls_bench(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    require_ill_posed(cfg)?;
    run_truncated(cfg, true)
}

fn require_ill_posed(cfg: &ExperimentConfig) -> Result<()> {
    cfg.problem.parse::<IllPosed>().map(|_| ())
}

/// The exponential-fitting system: TTLS against the sketched solver with the
/// model order as truncation index.
pub fn run_prony_bench(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    let spec = PronySpec::standard(cfg.m, cfg.n.unwrap_or(cfg.m / 2));
    let p = prony(&spec)?;
    let k = cfg.trunc_k.unwrap_or(spec.order());
    let l = if cfg.samples_l > k { cfg.samples_l } else { k + 1 };
    let reference = ttls(&p, k)?;
    (0..cfg.repetitions)
        .map(|rep| {
            let sketch = rttls(&p, &RandConfig::new(k, l - k, cfg.seed.split(rep as u64)))?;
            Ok(BenchRow {
                problem: "prony".into(),
                m: p.m(),
                n: p.n(),
                noise: 0.0,
                k,
                time_ttls: reference.elapsed_seconds,
                time_rttls: sketch.elapsed_seconds,
                time_arttls: None,
                err_rttls: rel_inf_error(&sketch.x, &reference.x),
                err_arttls: None,
                eps: None,
                basis_j: None,
            })
        })
        .collect()
}

/// Output of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Perturb(Vec<PerturbReport>),
    Bench(Vec<BenchRow>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Perturb(r) => r.len(),
            Table::Bench(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match self {
            Table::Perturb(r) => render(r, format),
            Table::Bench(r) => render(r, format),
        }
    }

    pub fn emit(&self, path: impl AsRef<std::path::Path>, format: OutputFormat) -> Result<()> {
        match self {
            Table::Perturb(r) => emit(r, path, format),
            Table::Bench(r) => emit(r, path, format),
        }
    }
}

/// Runs the experiment named in the configuration.
pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        Experiment::Perturb => Table::Perturb(run_perturb(cfg)?),
        Experiment::Rtls => Table::Bench(run_rtls_bench(cfg)?),
        Experiment::Rttls => Table::Bench(run_rttls_bench(cfg)?),
        Experiment::Arttls => Table::Bench(run_arttls_bench(cfg)?),
        Experiment::Prony => Table::Bench(run_prony_bench(cfg)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn perturb_rows_are_ordered() {
        let rows = run_perturb(&cfg("problem = example1\nm = 30\nn = 8\nrepetitions = 3")).unwrap();
        assert_eq!(rows.len(), 3);
        for r in rows {
            let err = r.observed_rel_err.unwrap();
            assert!(err <= r.bound_thm && r.bound_thm <= r.k_bg * r.delta_ratio * (1.0 + 1e-12), "{r:?}");
            assert!(r.k_lj.is_some() && r.k_zlwq.is_some());
        }
    }

    #[test]
    fn perturb_rejects_other_problems() {
        assert!(matches!(run_perturb(&cfg("problem = shaw")), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn runs_are_deterministic_apart_from_timing() {
        let c = cfg("experiment = rttls\nproblem = shaw\nm = 40\nrepetitions = 2");
        let strip = |rows: Vec<BenchRow>| {
            rows.into_iter().map(|r| (r.k, r.err_rttls.to_bits(), r.noise.to_bits())).collect::<Vec<_>>()
        };
        assert_eq!(strip(run_rttls_bench(&c).unwrap()), strip(run_rttls_bench(&c).unwrap()));
        let p = cfg("problem = example2\nm = 12");
        assert_eq!(
            run(&p).unwrap().render(OutputFormat::Csv),
            run(&p).unwrap().render(OutputFormat::Csv)
        );
    }

    #[test]
    fn adaptive_rows_carry_basis_size() {
        let rows = run_arttls_bench(&cfg("experiment = arttls\nproblem = shaw\nm = 60")).unwrap();
        assert_eq!(rows[0].eps, Some(0.6));
        assert!(rows[0].basis_j.unwrap() >= 1);
        assert!(matches!(
            run_arttls_bench(&cfg("experiment = arttls\nproblem = example1")),
            Err(Error::UnknownProblem(_))
        ));
    }

    #[test]
    fn rtls_on_consistent_example() {
        let rows = run_rtls_bench(&cfg("experiment = rtls\nproblem = example1\nm = 50")).unwrap();
        assert!(rows[0].err_rttls < 1e-6, "{:?}", rows[0]);
        assert_eq!(rows[0].noise, 0.0);
    }
}
