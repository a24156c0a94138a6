use std::fs;

use geocount::counting::{
    grid, growth_exponent, margulis_ratio_curve, orbit_counts, entropy_estimate, riemann_sandwich_check,
};
use geocount::equidist::{endpoint_equidistribution, equidist_csv, PairBins, EQUIDIST_WINDOW};
use geocount::flowbox::aperture_report;
use geocount::group::build_fuchsian_rep;
use geocount::spectrum::{conjugacy_spectrum_with, fmt17, LengthSpectrum, SpectrumOptions};
use geocount::sweep::{flowbox_sweep, mixing_ratio_curve, SweepConfig};
use geocount::{FuchsianRep, GeoError, Point};

use crate::config::RunConfig;

/// Why a command did not pass, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Violation(String),
    Cap(String),
    Config(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Cap(_) => 2,
            Failure::Config(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Violation(m) | Failure::Cap(m) | Failure::Config(m) => m,
        }
    }
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            GeoError::Genus(_)
            | GeoError::OutOfRange { .. }
            | GeoError::GridMisaligned(_)
            | GeoError::ApertureTooLarge { .. }
            | GeoError::BallTooSmall { .. }
            | GeoError::WordParse(_) => Failure::Config(e.to_string()),
            _ => Failure::Violation(e.to_string()),
        }
    }
}

pub type Outcome = Result<(), Failure>;

fn write(cfg: &RunConfig, name: &str, body: &str) -> Outcome {
    fs::create_dir_all(&cfg.out).map_err(|e| Failure::Config(format!("{}: {e}", cfg.out.display())))?;
    let path = cfg.out.join(name);
    fs::write(&path, body).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn rep(cfg: &RunConfig) -> Result<FuchsianRep, Failure> {
    Ok(build_fuchsian_rep::<f64>(cfg.genus)?)
}

fn spectrum(cfg: &RunConfig, rep: &FuchsianRep, t_max: f64) -> Result<LengthSpectrum, Failure> {
    let opts = SpectrumOptions { workers: cfg.workers, cap: cfg.cap, histogram_step: None };
    Ok(conjugacy_spectrum_with(rep, t_max, &opts)?)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Outcome {
    let rep = rep(cfg)?;
    match spectrum(cfg, &rep, cfg.t_max) {
        Ok(s) => {
            write(cfg, "spectrum.csv", &s.to_csv(&cfg.describe("spectrum")))?;
            println!("classes: {}", s.len());
            if let Some(sys) = s.systole() {
                println!("systole: {}", fmt17(sys));
            }
            Ok(())
        }
        Err(Failure::Cap(m)) => {
            let body = format!(
                "# {}\n# PARTIAL: {m}\nlength,canonical_word,d,root_word,xi_minus_angle,xi_plus_angle\n",
                cfg.describe("spectrum")
            );
            write(cfg, "spectrum.csv", &body)?;
            Err(Failure::Cap(m))
        }
        Err(e) => Err(e),
    }
}

/// First grid point: five units below `t_max`, but at least one step.
fn grid_start(cfg: &RunConfig, span: f64) -> f64 {
    (cfg.t_max - span).max(cfg.step)
}

pub fn cmd_margulis(cfg: &RunConfig, synthetic: bool) -> Outcome {
    let g = grid(grid_start(cfg, 5.0), cfg.t_max, cfg.step);
    if synthetic {
        // injected #P(t) = e^t/t, so every ratio is 1
        let p = |t: f64| t.exp() / t;
        let mut body = String::new();
        body.push_str(&format!("# {} synthetic=true\n", cfg.describe("margulis")));
        body.push_str("t,P,C,ratio,fitted_exponent\n");
        for &t in &g {
            let c = p(t) - if t > cfg.eps { p(t - cfg.eps) } else { 0.0 };
            let slope = (p(t).ln() - p(g[0]).ln()) / (t - g[0]);
            body.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(t),
                fmt17(p(t)),
                fmt17(c),
                fmt17(p(t) * t * (-t).exp()),
                fmt17(slope)
            ));
        }
        return write(cfg, "margulis.csv", &body);
    }
    let rep = rep(cfg)?;
    let s = spectrum(cfg, &rep, cfg.t_max)?;
    let report = margulis_ratio_curve(&s, &g, cfg.eps)?;
    write(cfg, "margulis.csv", &report.to_csv(&cfg.describe("margulis")))?;
    for (k, t) in g.iter().enumerate() {
        println!(
            "t = {:>6.3}  P = {:>9}  ratio = {:.4}  smoothed = {:.4}",
            t, report.p_counts[k], report.ratio[k], report.smoothed[k]
        );
    }
    if let Ok(fit) = growth_exponent(&s, &g) {
        println!("growth exponent: {:.4} ± {:.4}", fit.slope, 2.0 * fit.slope_se);
    }
    report.hard_invariants(&s).map_err(Failure::Violation)?;
    println!("telescoping and monotonicity: pass");
    let k = ((cfg.t_max - g[0].max(1.0)) / cfg.eps).floor();
    if k >= 1.0 {
        let b = cfg.t_max - k * cfg.eps;
        let sw = riemann_sandwich_check(&s, b, cfg.t_max, cfg.eps)?;
        println!(
            "sandwich on [{:.3}, {:.3}]: N = {} sums [{:.1}, {:.1}] fitted Q = {:.3}",
            b, cfg.t_max, sw.n, sw.lower_sum, sw.upper_sum, sw.q_fit
        );
        if !sw.parts_bound_holds() {
            return Err(Failure::Violation("integration-by-parts bound".into()));
        }
    }
    Ok(())
}

pub fn cmd_flowbox(cfg: &RunConfig) -> Outcome {
    let rep = rep(cfg)?;
    let ap = aperture_report(cfg.theta, cfg.eps)?;
    println!(
        "aperture theta = {}: box radius {:.4}, diameter {:.4} (< 2 eps: {}), continuity {:.2e}",
        cfg.theta,
        ap.radius,
        ap.diameter,
        ap.diameter < 2.0 * cfg.eps,
        ap.continuity
    );
    let mut alphas = vec![cfg.alpha];
    let low = cfg.eps - 4.0 * cfg.eps * cfg.eps;
    if low > 0.0 && (low - cfg.alpha).abs() > 1e-12 {
        alphas.push(low);
    }
    let mut sc = SweepConfig::standard(cfg.theta, cfg.eps, grid(grid_start(cfg, 2.0), cfg.t_max, cfg.step), alphas);
    sc.workers = cfg.workers;
    sc.cap = cfg.cap;
    let s = spectrum(cfg, &rep, cfg.t_max)?;
    let sweep = flowbox_sweep(&rep, &sc, Some(&s))?;
    let describe = format!("{} boxes={}", cfg.describe("flowbox"), sweep.boxes());
    write(cfg, "flowbox.csv", &sweep.to_csv(&describe))?;

    let mut body = format!("# {describe}\nt,alpha,gamma,gamma_star,gamma_prime,R,R_star\n");
    let mut order_ok = true;
    for &alpha in &sc.alphas {
        let m = mixing_ratio_curve(&sweep, alpha, sc.t_grid[0]);
        for (row, c) in m.rows.iter().zip(sweep.counts.iter().filter(|c| c.alpha == alpha)) {
            order_ok &= c.counts.prime <= c.counts.star && c.counts.star <= c.counts.gamma;
            body.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt17(row.t),
                fmt17(alpha),
                c.counts.gamma,
                c.counts.star,
                c.counts.prime,
                fmt17(row.r_gamma),
                fmt17(row.r_star)
            ));
            println!(
                "t = {:>6.3} alpha = {:.3}  Gamma = {:>5}  Gamma* = {:>5}  R* = {:.3}",
                row.t, alpha, c.counts.gamma, c.counts.star, row.r_star
            );
        }
        println!(
            "alpha = {:.3}: R* band [{:.3}, {:.3}] holds on the grid: {}",
            alpha, m.band.0, m.band.1, m.star_tail_ok
        );
    }
    write(cfg, "mixing.csv", &body)?;

    let violations: usize = sweep.records.iter().map(|r| r.member.violations(cfg.eps)).sum();
    let stars = sweep.star_members();
    let scaling_bad = stars.iter().filter(|r| !r.scaling.is_some_and(|s| s.within)).count();
    let pi_bad: usize = sweep.pi.iter().map(|p| p.violations + p.theta_violations + p.unidentified).sum();
    println!("members: {}  distinct Gamma*: {}", sweep.records.len(), stars.len());
    println!("period window / endpoint / oscillation violations: {violations}");
    println!("scaling ratios outside band: {scaling_bad}");
    println!("Pi sandwich and multiplicity violations: {pi_bad}");
    println!("Gamma' <= Gamma* <= Gamma: {}", if order_ok { "pass" } else { "FAIL" });
    if violations > 0 || scaling_bad > 0 || pi_bad > 0 || !order_ok {
        return Err(Failure::Violation("flow-box lemma check failed".into()));
    }
    Ok(())
}

pub fn cmd_equidist(cfg: &RunConfig) -> Outcome {
    let rep = rep(cfg)?;
    let s = spectrum(cfg, &rep, cfg.t_max)?;
    let bins = PairBins::new(&rep, 16)?;
    let g = grid(grid_start(cfg, 4.0), cfg.t_max, 1.0);
    let rows = endpoint_equidistribution(&s, &bins, &g, EQUIDIST_WINDOW)?;
    write(cfg, "equidist.csv", &equidist_csv(&rows, &cfg.describe("equidist")))?;
    for r in &rows {
        println!("t = {:>6.3}  classes = {:>6}  TV = {:.4}", r.t, r.classes, r.tv);
    }
    if let (Some(a), Some(b)) = (rows.first(), rows.last()) {
        println!("TV decreased from first to last: {}", b.tv < a.tv);
    }
    Ok(())
}

pub fn cmd_entropy(cfg: &RunConfig) -> Outcome {
    let rep = rep(cfg)?;
    let radii = grid(grid_start(cfg, 4.0), cfg.t_max, cfg.step);
    let counts = orbit_counts(&rep, Point::i(), &radii, cfg.workers, cfg.cap)?;
    let est = entropy_estimate(&counts)?;
    let mut body = format!("# {}\nradius,count\n", cfg.describe("entropy"));
    for (r, n) in &counts {
        body.push_str(&format!("{},{}\n", fmt17(*r), n));
    }
    write(cfg, "entropy.csv", &body)?;
    println!("entropy estimate: {:.4} (band [{:.4}, {:.4}])", est.h, est.band.0, est.band.1);
    Ok(())
}
