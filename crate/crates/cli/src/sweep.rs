use std::io::Write;
use std::path::{Path, PathBuf};

use qchaos::fock::{moments_up_to, ChaosPoly, QContext};
use qchaos::moments::{mixed_q_gaussian_moment, q_fourth_moment_decomposition, real_part, QGaussianSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::family::family_pair;

/// Environment variable naming a directory where computed sweep rows are cached.
pub const CACHE_ENV: &str = "QCHAOS_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub r: usize,
    pub value: f64,
    pub oracle: f64,
    pub gap: f64,
    /// `|gap| / |oracle|`, or `|gap|` when the oracle vanishes.
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SweepRow {
    pub k: usize,
    pub dim: usize,
    pub tau4: f64,
    pub target: f64,
    /// `tau4 − target`.
    pub residual: f64,
    pub decomposition_residual: f64,
    pub kappa_X: f64,
    pub kappa_Y: f64,
    pub kappa_XY: f64,
    pub sigma_X: f64,
    pub sigma_Y: f64,
    pub contraction_norms_f: Vec<f64>,
    pub contraction_norms_g: Vec<f64>,
    pub moments: Vec<MomentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub reduction: String,
    pub rate_note: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fits {
    /// Log-log slope of `|tau4 − target|` over `k ≥ fit_from`.
    pub gap_slope: Option<f64>,
    /// Log-log slopes of `‖f_k ⌢^p f_k‖²`, indexed by `p − 1`.
    pub contraction_slopes_f: Vec<Option<f64>>,
    pub contraction_slopes_g: Vec<Option<f64>>,
    /// `max_k k·|tau4 − target|`.
    pub observed_gap_constant: f64,
    /// `max_k k·rel_gap` over even moment orders.
    pub observed_moment_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// `"converged"` or `"no-convergence"`.
    pub flag: String,
    pub initial_gap: f64,
    pub final_gap: f64,
    pub threshold: f64,
    pub slopes_within_tolerance: bool,
    pub moments_within_tolerance: bool,
}

impl Convergence {
    pub fn converged(&self) -> bool {
        self.flag == "converged"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub header: ReportHeader,
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub fits: Fits,
    pub convergence: Convergence,
    /// Set when a row exceeded the size cap; `largest_feasible_k` is the last
    /// completed row.
    pub cap_error: Option<String>,
    pub largest_feasible_k: Option<usize>,
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(&self.rows, w)
    }

    /// Every row passes the bookkeeping checks and the run converged.
    pub fn passed(&self) -> bool {
        self.cap_error.is_none() && self.convergence.converged()
    }
}

/// Computes rows `k = 1..=k_max` in order, then fits and classifies them.
pub fn run_convergence_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let warnings = cfg.validate()?;
    let ctx = QContext::new(cfg.q)?;
    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let mut rows = Vec::with_capacity(cfg.k_max);
    let mut cap_error = None;
    for k in 1..=cfg.k_max {
        let cached = cache.as_deref().and_then(|dir| load_cached(dir, cfg, k));
        let row = match cached {
            Some(row) => row,
            None => match compute_row(&ctx, cfg, k) {
                Ok(row) => {
                    if let Some(dir) = cache.as_deref() {
                        store_cached(dir, cfg, &row)?;
                    }
                    row
                }
                Err(HarnessError::Core(e @ (qchaos::Error::CapExceeded { .. } | qchaos::Error::EnumerationCap { .. }))) => {
                    cap_error = Some(format!("row k = {k}: {e}"));
                    break;
                }
                Err(e) => return Err(e),
            },
        };
        rows.push(row);
    }
    let largest_feasible_k = cap_error.as_ref().map(|_| rows.len());
    let fits = fit(cfg, &rows);
    let convergence = classify(cfg, &rows, &fits);
    Ok(SweepReport {
        header: header(cfg),
        config: cfg.clone(),
        warnings,
        rows,
        fits,
        convergence,
        cap_error,
        largest_feasible_k,
    })
}

fn header(cfg: &ExperimentConfig) -> ReportHeader {
    let q = cfg.q;
    let (m, n) = (cfg.m, cfg.n);
    ReportHeader {
        reduction: format!(
            "Convergence in distribution is certified by moment matching up to order {}: the limit law is \
             compactly supported and the moments are uniformly bounded, so convergence of moments is \
             equivalent to convergence in distribution.",
            cfg.moments_up_to
        ),
        rate_note: "The 1/k decay rate is a property of the orthsum family, not a claim of the limit theorem."
            .into(),
        oracle: if q == 0.0 {
            "Oracle: free sum of semicircles, Q = 0, v = (sigma_X, sigma_Y).".into()
        } else {
            format!(
                "Oracle: mixed Q-Gaussian with Q = [[q^{}, q^{}], [q^{}, q^{}]] at q = {q}, v = (sigma_X, sigma_Y).",
                m * m,
                m * n,
                m * n,
                n * n
            )
        },
    }
}

fn compute_row(ctx: &QContext, cfg: &ExperimentConfig, k: usize) -> Result<SweepRow> {
    let (f, g) = family_pair(ctx, cfg, k)?;
    let dim = f.dim();
    let rep = q_fourth_moment_decomposition(ctx, &f, &g)?;
    let spec = QGaussianSpec::double_chaos_limit(cfg.q, cfg.m, cfg.n, rep.sigma_X, rep.sigma_Y)?;
    let s = ChaosPoly::from_kernel(f).add(&ChaosPoly::from_kernel(g))?;
    let values = moments_up_to(ctx, &s, cfg.moments_up_to)?;
    let mut moments = Vec::new();
    for (r, z) in values.into_iter().enumerate().skip(2) {
        let value = real_part(z)?;
        let oracle = mixed_q_gaussian_moment(&spec, r)?;
        let gap = value - oracle;
        let rel_gap = if oracle != 0.0 { gap.abs() / oracle.abs() } else { gap.abs() };
        moments.push(MomentEntry { r, value, oracle, gap, rel_gap });
    }
    Ok(SweepRow {
        k,
        dim,
        tau4: rep.tau4,
        target: rep.target,
        residual: rep.gap(),
        decomposition_residual: rep.decomposition_residual,
        kappa_X: rep.kappa_X,
        kappa_Y: rep.kappa_Y,
        kappa_XY: rep.kappa_XY,
        sigma_X: rep.sigma_X,
        sigma_Y: rep.sigma_Y,
        contraction_norms_f: rep.contraction_norms_f,
        contraction_norms_g: rep.contraction_norms_g,
        moments,
    })
}

/// Least-squares slope of `log y` against `log k`, skipping nonpositive `y`.
pub fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0 && y.is_finite())
        .map(|&(k, y)| ((k as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn fit(cfg: &ExperimentConfig, rows: &[SweepRow]) -> Fits {
    let tail: Vec<&SweepRow> = rows.iter().filter(|r| r.k >= cfg.tolerances.fit_from).collect();
    let slope_of = |get: &dyn Fn(&SweepRow) -> f64| {
        loglog_slope(&tail.iter().map(|r| (r.k, get(r))).collect::<Vec<_>>())
    };
    let gap_slope = slope_of(&|r| r.residual.abs());
    let norms = |take: fn(&SweepRow) -> &Vec<f64>, len: usize| -> Vec<Option<f64>> {
        (0..len).map(|p| slope_of(&|r| take(r)[p].powi(2))).collect()
    };
    let (nf, ng) = rows
        .first()
        .map(|r| (r.contraction_norms_f.len(), r.contraction_norms_g.len()))
        .unwrap_or((0, 0));
    let observed_gap_constant = rows.iter().map(|r| r.k as f64 * r.residual.abs()).fold(0.0, f64::max);
    let observed_moment_constant = rows
        .iter()
        .flat_map(|r| r.moments.iter().filter(|m| m.r % 2 == 0).map(move |m| r.k as f64 * m.rel_gap))
        .fold(0.0, f64::max);
    Fits {
        gap_slope,
        contraction_slopes_f: norms(|r| &r.contraction_norms_f, nf),
        contraction_slopes_g: norms(|r| &r.contraction_norms_g, ng),
        observed_gap_constant,
        observed_moment_constant,
    }
}

fn classify(cfg: &ExperimentConfig, rows: &[SweepRow], fits: &Fits) -> Convergence {
    let t = &cfg.tolerances;
    let initial_gap = rows.first().map_or(0.0, |r| r.residual.abs());
    let final_gap = rows.last().map_or(0.0, |r| r.residual.abs());
    let threshold = t.convergence * initial_gap;
    let decays = rows.len() >= 2 && (final_gap < threshold || (initial_gap == 0.0 && final_gap == 0.0));
    let near = |s: &Option<f64>| s.is_some_and(|s| (s + 1.0).abs() <= t.slope);
    let slopes_within_tolerance = fits.gap_slope.as_ref().map_or(initial_gap == 0.0, |_| near(&fits.gap_slope))
        && fits.contraction_slopes_f.iter().chain(&fits.contraction_slopes_g).all(near);
    let moments_within_tolerance = fits.observed_moment_constant <= t.moment_constant;
    Convergence {
        flag: if decays { "converged" } else { "no-convergence" }.into(),
        initial_gap,
        final_gap,
        threshold,
        slopes_within_tolerance,
        moments_within_tolerance,
    }
}

pub fn csv_header(rows: &[SweepRow]) -> Vec<String> {
    let mut h: Vec<String> = [
        "k", "dim", "tau4", "target", "residual", "decomposition_residual", "kappa_X", "kappa_Y", "kappa_XY",
        "sigma_X", "sigma_Y",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if let Some(r) = rows.first() {
        h.extend((1..=r.contraction_norms_f.len()).map(|p| format!("contraction_f_p{p}")));
        h.extend((1..=r.contraction_norms_g.len()).map(|p| format!("contraction_g_p{p}")));
        for m in &r.moments {
            h.push(format!("m{}", m.r));
            h.push(format!("m{}_oracle", m.r));
            h.push(format!("m{}_gap", m.r));
        }
    }
    h
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(csv_header(rows))?;
    for r in rows {
        let mut rec = vec![r.k.to_string(), r.dim.to_string()];
        rec.extend(
            [
                r.tau4,
                r.target,
                r.residual,
                r.decomposition_residual,
                r.kappa_X,
                r.kappa_Y,
                r.kappa_XY,
                r.sigma_X,
                r.sigma_Y,
            ]
            .iter()
            .chain(&r.contraction_norms_f)
            .chain(&r.contraction_norms_g)
            .map(|x| x.to_string()),
        );
        for m in &r.moments {
            rec.extend([m.value, m.oracle, m.gap].iter().map(|x| x.to_string()));
        }
        out.write_record(rec)?;
    }
    out.flush()?;
    Ok(())
}

fn cache_path(dir: &Path, cfg: &ExperimentConfig, k: usize) -> Option<PathBuf> {
    let key = serde_json::to_string(cfg).ok()?;
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update(key.as_bytes());
    h.update(k.to_le_bytes());
    let digest: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Some(dir.join(format!("row-{digest}.json")))
}

fn load_cached(dir: &Path, cfg: &ExperimentConfig, k: usize) -> Option<SweepRow> {
    let text = std::fs::read_to_string(cache_path(dir, cfg, k)?).ok()?;
    serde_json::from_str(&text).ok().filter(|r: &SweepRow| r.k == k)
}

fn store_cached(dir: &Path, cfg: &ExperimentConfig, row: &SweepRow) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(path) = cache_path(dir, cfg, row.k) {
        std::fs::write(path, serde_json::to_string(row)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Family;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..10).map(|k| (k, 3.0 / (k as f64).powi(2))).collect();
        assert!((loglog_slope(&pts).unwrap() + 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[(1, 1.0)]).is_none());
        assert!(loglog_slope(&[(1, 0.0), (2, 0.0)]).is_none());
    }

    #[test]
    fn small_orthsum_sweep_converges() {
        let cfg = ExperimentConfig { q: 0.5, k_max: 24, ..Default::default() };
        let rep = run_convergence_sweep(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 24);
        assert!(rep.convergence.converged(), "{:?}", rep.convergence);
        assert!(rep.convergence.slopes_within_tolerance, "{:?}", rep.fits);
        for row in &rep.rows {
            assert!(row.decomposition_residual.abs() < 1e-9 * (1.0 + row.tau4));
        }
    }

    #[test]
    fn fixed_family_does_not_converge() {
        let cfg = ExperimentConfig { q: 0.5, k_max: 6, family: Family::Fixed, ..Default::default() };
        let rep = run_convergence_sweep(&cfg).unwrap();
        assert_eq!(rep.convergence.flag, "no-convergence");
        assert!(rep.convergence.final_gap > 0.1);
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = ExperimentConfig { q: 0.3, m: 2, n: 3, k_max: 3, moments_up_to: 4, ..Default::default() };
        let mut a = Vec::new();
        let mut b = Vec::new();
        run_convergence_sweep(&cfg).unwrap().write_csv(&mut a).unwrap();
        run_convergence_sweep(&cfg).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("k,dim,tau4,target,residual"));
        assert!(text.lines().next().unwrap().contains("contraction_g_p2,m2,m2_oracle"));
    }
}
