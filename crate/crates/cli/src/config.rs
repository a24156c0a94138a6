//! Run configuration: a flat `key = value` file overridden by flags.

use std::path::PathBuf;

use geocount::group::build_fuchsian_rep;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub genus: usize,
    pub t_max: f64,
    pub eps: f64,
    pub theta: f64,
    pub alpha: f64,
    pub step: f64,
    pub workers: usize,
    pub cap: Option<usize>,
    pub out: PathBuf,
    pub seed: u64,
    pub paper_regime: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            genus: 2,
            t_max: 10.0,
            eps: 0.1,
            theta: 0.04,
            alpha: 0.1,
            step: 0.5,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            cap: None,
            out: PathBuf::from("."),
            seed: 1,
            paper_regime: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("bad value for {key}: {v:?}")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "genus" => self.genus = parse(key, v)?,
            "tmax" | "t_max" => self.t_max = parse(key, v)?,
            "eps" => self.eps = parse(key, v)?,
            "theta" => self.theta = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "step" => self.step = parse(key, v)?,
            "workers" => self.workers = parse(key, v)?,
            "cap" => self.cap = if v == "none" { None } else { Some(parse(key, v)?) },
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = parse(key, v)?,
            "paper_regime" | "paper-regime" => self.paper_regime = parse(key, v)?,
            _ => return Err(ConfigError(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        if self.genus < 2 {
            return err(format!("genus must be at least 2, got {}", self.genus));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return err(format!("tmax must be positive, got {}", self.t_max));
        }
        if !(self.eps > 0.0) {
            return err(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.5 * self.eps + 1e-12) {
            return err(format!("alpha must lie in (0, 3 eps/2], got {}", self.alpha));
        }
        if !(self.theta > 0.0 && self.theta < std::f64::consts::FRAC_PI_2) {
            return err(format!("theta must lie in (0, pi/2), got {}", self.theta));
        }
        if !(self.step > 0.0) {
            return err(format!("step must be positive, got {}", self.step));
        }
        if self.workers == 0 {
            return err("workers must be at least 1".into());
        }
        if self.paper_regime {
            let rep = build_fuchsian_rep::<f64>(self.genus).map_err(|e| ConfigError(e.to_string()))?;
            let inj = 0.5 * rep.generator_length();
            let limit = (0.125f64).min(inj / 4.0);
            if self.eps > limit {
                return err(format!("--paper-regime needs eps <= min(1/8, inj/4) = {limit:.6}, got {}", self.eps));
            }
        }
        Ok(())
    }

    /// Settings recorded in CSV comment lines. The worker count is left out
    /// because it does not affect any output.
    pub fn describe(&self, command: &str) -> String {
        format!(
            "geocount {} command={} genus={} tmax={} eps={} theta={} alpha={} step={} cap={} seed={} paper_regime={}",
            env!("CARGO_PKG_VERSION"),
            command,
            self.genus,
            self.t_max,
            self.eps,
            self.theta,
            self.alpha,
            self.step,
            self.cap.map(|c| c.to_string()).unwrap_or_else(|| "none".into()),
            self.seed,
            self.paper_regime
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_file("# experiment\ngenus = 3\ntmax = 7.5  # short\ncap = 1000\n").unwrap();
        assert_eq!((c.genus, c.t_max, c.cap), (3, 7.5, Some(1000)));
        c.set("tmax", "9").unwrap();
        assert_eq!(c.t_max, 9.0);
        assert!(c.apply_file("colour = blue").is_err());
        assert!(c.apply_file("genus 2").is_err());
    }

    #[test]
    fn paper_regime_limits_eps() {
        let mut c = RunConfig { eps: 0.2, alpha: 0.2, ..Default::default() };
        assert!(c.validate().is_ok());
        c.paper_regime = true;
        assert!(c.validate().is_err());
        c.eps = 0.1;
        c.alpha = 0.1;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn alpha_bound() {
        let c = RunConfig { alpha: 0.2, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
