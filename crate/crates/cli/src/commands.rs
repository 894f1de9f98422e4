use std::path::Path;

use drkernel::estimates::{
    axis_points, decay_fit, verify_lower_bound, verify_upper_bound, weighted_growth_check, DecayNorm, TimeRegime,
    UpperGrid,
};
use drkernel::acceptance::{self, Status, LARGE_TIME_RANGE};
use drkernel::kernels::{kernel_function, KernelEvaluator, KernelValue};
use drkernel::numeric::ode::OdeConfig;
use drkernel::propagator::{
    evolve_distinguished, evolve_schrodinger, is_admissible, mixed_norm_unchecked, AdmissiblePair, RadialSamples,
};
use drkernel::spherical::{basis, c_function_in_window, phi, SphericalConfig};
use drkernel::{ComplexTime, Execution, GroupPoint, RadialFunction, SpaceParams};
use num_complex::Complex64;
use serde_json::json;

use crate::config::RunConfig;
use crate::{num, CliError, Command, NormArg, RegimeArg, Sink, SpaceArgs, Verify, SCHEMA_VERSION};

fn space_args(cmd: &Command) -> Option<&SpaceArgs> {
    match cmd {
        Command::Kernel { space, .. }
        | Command::KernelGrid { space, .. }
        | Command::Phi { space, .. }
        | Command::Plancherel { space, .. }
        | Command::Decay { space, .. }
        | Command::WeightedGrowth { space, .. }
        | Command::Propagate { space, .. }
        | Command::Strichartz { space, .. }
        | Command::Acceptance { space, .. } => Some(space),
        Command::Verify { which: Verify::Upper { space, .. } | Verify::Lower { space, .. } } => Some(space),
        Command::Config => None,
    }
}

/// Copies every flag that shadows a config key into `cfg`.
pub fn apply_flags(cfg: &mut RunConfig, cmd: &Command) {
    if let Some(s) = space_args(cmd) {
        if let Some(name) = &s.space {
            cfg.space.name = Some(name.clone());
        }
        if s.m.is_some() || s.k.is_some() {
            cfg.space.name = None;
            cfg.space.m = s.m.unwrap_or(cfg.space.m);
            cfg.space.k = s.k.unwrap_or(cfg.space.k);
        }
    }
    let g = &mut cfg.grids;
    let set = |slot: &mut f64, v: &Option<f64>| {
        if let Some(v) = v {
            *slot = *v;
        }
    };
    match cmd {
        Command::KernelGrid { r_min, r_max, r_steps, tau_list, .. } => {
            set(&mut g.r_min, r_min);
            set(&mut g.r_max, r_max);
            g.r_steps = r_steps.unwrap_or(g.r_steps);
            if tau_list.is_some() {
                g.tau_list = tau_list.clone();
            }
        }
        Command::Phi { r_max, r_steps, .. } => {
            set(&mut g.r_max, r_max);
            g.r_steps = r_steps.unwrap_or(g.r_steps);
        }
        Command::Plancherel { s_min, s_max, steps, .. } => {
            set(&mut g.s_min, s_min);
            set(&mut g.s_max, s_max);
            g.s_steps = steps.unwrap_or(g.s_steps);
        }
        Command::Propagate { t_max, t_steps, r_max, .. } => {
            set(&mut g.t_max, t_max);
            g.t_steps = t_steps.unwrap_or(g.t_steps);
            set(&mut g.r_max, r_max);
        }
        Command::Decay { per_decade, .. } => {
            cfg.estimates.per_decade = per_decade.unwrap_or(cfg.estimates.per_decade);
        }
        Command::WeightedGrowth { c, .. } | Command::Verify { which: Verify::Lower { c, .. } } => {
            set(&mut cfg.estimates.c, c);
        }
        Command::Verify { which: Verify::Upper { r_min, .. } } => set(&mut g.r_min, r_min),
        _ => {}
    }
}

pub fn dispatch(cfg: &RunConfig, cmd: &Command, sink: &mut Sink) -> Result<(), CliError> {
    let exec = if cfg.run.sequential { Execution::Sequential } else { Execution::Parallel };
    let p = cfg.space()?;
    match cmd {
        Command::Kernel { tau_re, tau_im, r, .. } => {
            let tau = complex_time(*tau_re, *tau_im)?;
            let value = evaluator(cfg, p).eval(tau, *r)?;
            let mut w = kernel_writer(sink)?;
            kernel_row(&mut w, *r, tau, &value)?;
            w.flush()?;
        }
        Command::KernelGrid { .. } => {
            let path = cfg
                .grids
                .tau_list
                .as_ref()
                .ok_or_else(|| CliError::Usage("kernel-grid needs --tau-list or grids.tau_list".into()))?;
            let taus = read_tau_list(path)?;
            let g = &cfg.grids;
            let radii = linspace(g.r_min, g.r_max, g.r_steps);
            let ev = evaluator(cfg, p);
            let jobs: Vec<(ComplexTime, f64)> =
                taus.iter().flat_map(|&tau| radii.iter().map(move |&r| (tau, r))).collect();
            let values = exec.map(&jobs, |&(tau, r)| ev.eval(tau, r));
            let mut w = kernel_writer(sink)?;
            for (&(tau, r), v) in jobs.iter().zip(values) {
                kernel_row(&mut w, r, tau, &v?)?;
            }
            w.flush()?;
        }
        Command::Phi { s, .. } => {
            let radii = linspace(0.0, cfg.grids.r_max, cfg.grids.r_steps);
            let sol = phi(&p, *s, &radii, &ode_config(cfg))?;
            let mut w = sink.csv();
            w.write_record(["r", "phi", "dphi"])?;
            for ((r, v), d) in sol.r.iter().zip(&sol.phi).zip(&sol.dphi) {
                w.write_record([num(*r), num(*v), num(*d)])?;
            }
            w.flush()?;
        }
        Command::Plancherel { .. } => {
            let g = &cfg.grids;
            let spectrum = linspace(g.s_min, g.s_max, g.s_steps);
            let scfg = SphericalConfig { ode: ode_config(cfg), fit_residual: cfg.tolerances.fit, ..Default::default() };
            let estimates = exec.map(&spectrum, |&s| c_function_in_window(&p, s, scfg.fit_window, &scfg));
            let mut w = sink.csv();
            w.write_record(["s", "density", "residual", "reliable", "c_plus_re", "c_plus_im"])?;
            for c in estimates {
                let c = c?;
                w.write_record([
                    num(c.s),
                    num(c.plancherel_density),
                    num(c.residual),
                    c.reliable.to_string(),
                    num(c.c_plus.re),
                    num(c.c_plus.im),
                ])?;
            }
            w.flush()?;
        }
        Command::Verify { which } => {
            let report = match which {
                Verify::Upper { tau_min, tau_max, r_max, level, .. } => {
                    if !(*tau_min > 0.0 && tau_max > tau_min && *r_max > cfg.grids.r_min) || *level == 0 {
                        return Err(CliError::Usage("need 0 < tau-min < tau-max, r-min < r-max, level >= 1".into()));
                    }
                    let range = ((*tau_min, *tau_max), (cfg.grids.r_min, *r_max));
                    let grid = UpperGrid::new(range.0, range.1, *level);
                    let refined = UpperGrid::new(range.0, range.1, level + 1);
                    verify_upper_bound(&p, &grid, &refined, exec)?
                }
                Verify::Lower { t, r_max, count, c_scan, .. } => {
                    verify_lower_bound(&p, t, cfg.estimates.c, *r_max, *count, c_scan, exec)?
                }
            };
            sink.json(&report)?;
            if !report.valid {
                return Err(CliError::Failed(format!("bound not verified: ratio {}", report.refined_ratio)));
            }
        }
        Command::Decay { q, regime, norm, t_min, t_max, .. } => {
            let mut range = match regime {
                RegimeArg::Small => TimeRegime::Small.default_range(),
                RegimeArg::Large => LARGE_TIME_RANGE,
            };
            range.0 = t_min.unwrap_or(range.0);
            range.1 = t_max.unwrap_or(range.1);
            let norm = match norm {
                NormArg::Lq => DecayNorm::Lq,
                NormArg::Weak => DecayNorm::WeakLq,
                NormArg::Aq => DecayNorm::Aq,
            };
            let fit = decay_fit(&p, *q, norm, range, cfg.estimates.per_decade, exec)?;
            let mut w = sink.csv();
            w.write_record(["t", "norm"])?;
            for (t, v) in fit.times.iter().zip(&fit.norms) {
                w.write_record([num(*t), num(*v)])?;
            }
            w.flush()?;
            eprintln!(
                "slope {} ± {} residual {:.3e}{}",
                fit.slope,
                fit.slope_stderr,
                fit.residual,
                if fit.flagged { " (flagged: not a clean power law)" } else { "" }
            );
        }
        Command::WeightedGrowth { t, rho_min, rho_max, count, .. } => {
            let a_list = axis_points(*rho_min, *rho_max, *count);
            let fit = weighted_growth_check(&p, *t, &a_list, cfg.estimates.c)?;
            let mut w = sink.csv();
            w.write_record(["a", "ln_ln_inv_a", "ln_abs_sigma"])?;
            for (a, s) in fit.a.iter().zip(&fit.ln_sigma) {
                w.write_record([num(*a), num((1.0 / a).ln().ln()), num(*s)])?;
            }
            w.flush()?;
            eprintln!(
                "slope {} ± {} max/reference {:.3e}",
                fit.slope,
                fit.slope_stderr,
                fit.max_over_reference()
            );
        }
        Command::Propagate { data, distinguished, .. } => {
            let b = basis(&p)?;
            let f = RadialSamples::from_function(b.clone(), &parse_data(&p, data)?);
            let times = linspace(0.0, cfg.grids.t_max, cfg.grids.t_steps);
            let r_max = cfg.grids.r_max;
            let mut w = sink.csv();
            w.write_record(["t", "r", "re", "im"])?;
            if *distinguished {
                let rec = evolve_distinguished(&f, &times, exec);
                for (i, &t) in rec.core.times.iter().enumerate() {
                    for &r in rec.core.radii.iter().filter(|&&r| r <= r_max) {
                        let x = GroupPoint::on_axis(&p, (-r).exp())?;
                        let u = rec.u(&b, i, &x);
                        w.write_record([num(t), num(r), num(u.re), num(u.im)])?;
                    }
                }
            } else {
                let rec = evolve_schrodinger(&f, &times, exec);
                for (&t, row) in rec.times.iter().zip(&rec.samples) {
                    for (&r, u) in rec.radii.iter().zip(row).filter(|(&r, _)| r <= r_max) {
                        w.write_record([num(t), num(r), num(u.re), num(u.im)])?;
                    }
                }
            }
            w.flush()?;
        }
        Command::Strichartz { p: pp, q, window, data, dt, unchecked, .. } => {
            let window = parse_window(window)?;
            if !(*dt > 0.0) {
                return Err(CliError::Usage("dt must be positive".into()));
            }
            let pair = AdmissiblePair::new(*pp, *q).map_err(|e| CliError::Usage(e.to_string()))?;
            let admissible = is_admissible(p.dimension(), pair);
            if !admissible && !unchecked {
                return Err(CliError::Usage(format!(
                    "({pp}, {q}) is not admissible for n = {}; pass --unchecked to evaluate it anyway",
                    p.dimension()
                )));
            }
            let b = basis(&p)?;
            let f = RadialSamples::from_function(b.clone(), &parse_data(&p, data)?);
            let data_l2 = f.lq_norm(2.0);
            let norm_at = |step: f64| -> Result<f64, CliError> {
                let steps = (window.1 / step).round() as usize;
                let times: Vec<f64> = (0..=steps).map(|i| step * i as f64).collect();
                let rec = evolve_schrodinger(&f, &times, exec);
                Ok(mixed_norm_unchecked(&rec, &b, *pp, *q, window)?)
            };
            let coarse = norm_at(*dt)?;
            let fine = norm_at(0.5 * dt)?;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "space": p.to_string(),
                "pair": { "p": exponent(*pp), "q": exponent(*q) },
                "admissible": admissible,
                "window": [window.0, window.1],
                "dt": dt,
                "data": data,
                "data_l2": data_l2,
                "norm": coarse,
                "refined_norm": fine,
                "ratio": coarse / data_l2,
                "refined_ratio": fine / data_l2,
                "refinement_drift": ((coarse - fine) / fine).abs(),
            });
            sink.json(&report)?;
        }
        Command::Acceptance { all, json, .. } => {
            let spaces: Vec<SpaceParams> = if *all { SpaceParams::reference_spaces().to_vec() } else { vec![p] };
            let mut io_err = None;
            let outcomes = acceptance::run_with(&spaces, exec, |o| {
                if !json {
                    if let Err(e) = sink.line(&o.to_string()) {
                        io_err.get_or_insert(e);
                    }
                }
            });
            if let Some(e) = io_err {
                return Err(e);
            }
            if *json {
                sink.json(&json!({ "schema_version": SCHEMA_VERSION, "outcomes": outcomes }))?;
            }
            let failed: Vec<u8> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
            if !failed.is_empty() {
                return Err(CliError::Failed(format!("acceptance criteria failed: {failed:?}")));
            }
        }
        Command::Config => sink.line(cfg.to_toml().trim_end())?,
    }
    Ok(())
}

fn evaluator(cfg: &RunConfig, p: SpaceParams) -> KernelEvaluator {
    KernelEvaluator::new(p).with_tolerance(cfg.tolerances.quad).with_r_min(cfg.grids.r_min)
}

fn ode_config(cfg: &RunConfig) -> OdeConfig {
    OdeConfig { rtol: cfg.tolerances.ode, atol: 1e-2 * cfg.tolerances.ode, ..Default::default() }
}

fn complex_time(re: f64, im: f64) -> Result<ComplexTime, CliError> {
    ComplexTime::new(Complex64::new(re, im)).map_err(|e| CliError::Usage(e.to_string()))
}

/// `steps + 1` equally spaced points from `a` to `b`.
fn linspace(a: f64, b: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| a + (b - a) * i as f64 / steps as f64).collect()
}

type CsvOut<'a> = csv::Writer<&'a mut dyn std::io::Write>;

fn kernel_writer(sink: &mut Sink) -> Result<CsvOut<'_>, CliError> {
    let mut w = sink.csv();
    w.write_record(["r", "tau_re", "tau_im", "re", "im", "abs", "method", "quad_err", "ln_abs"])?;
    Ok(w)
}

fn kernel_row(w: &mut CsvOut<'_>, r: f64, tau: ComplexTime, v: &KernelValue) -> Result<(), CliError> {
    let z = v.value();
    w.write_record([
        num(r),
        num(tau.value().re),
        num(tau.value().im),
        num(z.re),
        num(z.im),
        num(z.norm()),
        v.method.as_str().to_string(),
        num(v.rel_error),
        num(v.ln_abs()),
    ])?;
    Ok(())
}

fn read_tau_list(path: &Path) -> Result<Vec<ComplexTime>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read tau list {}: {e}", path.display())))?;
    let mut taus = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CliError::Usage(format!("{}:{}: expected `re im`", path.display(), i + 1));
        let parts: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [re, im] => taus.push(complex_time(re, im)?),
            [re] => taus.push(complex_time(re, 0.0)?),
            _ => return Err(bad()),
        }
    }
    if taus.is_empty() {
        return Err(CliError::Usage(format!("{} lists no τ", path.display())));
    }
    Ok(taus)
}

fn parse_data(p: &SpaceParams, spec: &str) -> Result<RadialFunction, CliError> {
    let bad = || CliError::Usage(format!("data must be gaussian:σ or heat:τ with a positive parameter, got '{spec}'"));
    let (kind, v) = spec.split_once(':').ok_or_else(bad)?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(bad());
    }
    match kind.trim() {
        "gaussian" => Ok(RadialFunction::gaussian(v)),
        "heat" => Ok(kernel_function(p, ComplexTime::real(v)?)),
        _ => Err(bad()),
    }
}

/// JSON has no infinity; `∞` is written as the string `"inf"`.
fn exponent(x: f64) -> serde_json::Value {
    if x.is_finite() { json!(x) } else { json!("inf") }
}

fn parse_window(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("window must be `a,b` with 0 <= a < b, got '{spec}'"));
    let (a, b) = spec.split_once(',').ok_or_else(bad)?;
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(a >= 0.0 && b > a && b.is_finite()) {
        return Err(bad());
    }
    Ok((a, b))
}
