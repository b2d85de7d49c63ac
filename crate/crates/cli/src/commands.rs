//! Subcommand pipelines.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use girthlab::ball::{self, Ball};
use girthlab::certificate::{CertEntry, Status};
use girthlab::group::GroupSpec;
use girthlab::kernel::{self, Arithmetic, WalkKind};
use girthlab::perc::diagram::{triangle_diagram, DiagramMethod};
use girthlab::perc::estimate::{
    crossing_curve, estimate_pc, nonuniqueness_witness, theta, two_point, PcCriterion, WitnessStatus,
};
use girthlab::perc::exponents::{cluster_size_tail, fit_beta, fit_gamma, fit_tail, susceptibility, ExponentFit, FitRules, TailCurve};
use girthlab::perc::oracle;
use girthlab::saw::census::enumerate_saw;
use girthlab::saw::green::{bubble_diagram, susceptibility_saw, SawModel};
use girthlab::saw::law::{connective_constant, endpoint_decay, saw_speed, speed_alpha};
use girthlab::saw::rosenbluth::rosenbluth_sampler;
use girthlab::verify::{run_certificate, CertConfig};

use crate::output::{csv_bytes, num, opt, Outputs};
use crate::params::{parse_grid, Params};
use crate::plot::{emit_plot, PlotKind};
use crate::{GraphArgs, KernelArgs, PercArgs, ReportArgs, SawArgs, VerifyArgs};

/// Output sink that may be absent: with no directory configured, results are
/// only printed.
struct Sink(Option<Outputs>);

impl Sink {
    fn new(dir: Option<PathBuf>) -> Result<Self> {
        Ok(Self(dir.map(|d| Outputs::new(&d)).transpose()?))
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        match &mut self.0 {
            Some(o) => o.write(name, bytes),
            None => Ok(()),
        }
    }

    fn csv<S: AsRef<str>>(&mut self, name: &str, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
        if self.0.is_none() {
            return Ok(());
        }
        let bytes = csv_bytes(header, rows)?;
        self.write(name, &bytes)
    }

    /// CSV plus the plot drawn from it.
    fn csv_with_plot<S: AsRef<str>>(&mut self, kind: PlotKind, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
        if self.0.is_none() {
            return Ok(());
        }
        let bytes = csv_bytes(header, rows)?;
        let svg = emit_plot(kind, std::str::from_utf8(&bytes)?)?;
        self.write(kind.source(), &bytes)?;
        self.write(&format!("{}.svg", kind.name()), svg.as_bytes())
    }

    fn commit(self) -> Result<()> {
        if let Some(o) = self.0 {
            for p in o.commit()? {
                println!("wrote {}", p.display());
            }
        }
        Ok(())
    }
}

fn fmt_fit(f: &ExponentFit) -> String {
    format!(
        "fit {:?}: slope={:.4} (target {}) exponent={:.4} window=[{}, {}] residual={:.4} points={} {}",
        f.name,
        f.slope,
        f.target_slope,
        f.exponent,
        f.window.0,
        f.window.1,
        f.residual,
        f.points,
        if f.accepted { "accepted".to_string() } else { format!("rejected: {}", f.diagnostic.as_deref().unwrap_or("")) }
    )
}

fn tree_rho(spec: &GroupSpec, user: Option<f64>) -> Option<f64> {
    if spec.is_tree() && spec.degree() >= 2 {
        Some(kernel::kesten_rho(spec.degree()))
    } else {
        user
    }
}

pub fn graph(a: GraphArgs) -> Result<ExitCode> {
    let p = Params::load(&a.common, "graph")?;
    let spec = p.spec(a.spec.as_deref())?;
    let rmax = p.get_or(a.girth_rmax, "girth_rmax", 6usize)?;
    let g = ball::girth(&spec, rmax)?;
    let girth = if spec.is_tree() { "inf".to_string() } else { g.to_string() };
    println!("girth={girth} degree={}", spec.degree());
    let mut sink = Sink::new(p.out_dir())?;
    if let Some(r) = p.get(a.radius, "R")? {
        let b = Ball::build(&spec, r)?;
        let sizes = b.sphere_sizes();
        println!("ball R={r} vertices={} edges={} spheres={:?}", b.len(), b.edges().len(), sizes);
        let mut buf = Vec::new();
        b.write_edge_list(&mut buf)?;
        sink.write("ball.txt", &buf)?;
        let rows: Vec<Vec<String>> = sizes.iter().enumerate().map(|(r, s)| vec![r.to_string(), s.to_string()]).collect();
        sink.csv("spheres.csv", &["r", "size"], &rows)?;
    }
    sink.commit()?;
    Ok(ExitCode::SUCCESS)
}

pub fn kernel(a: KernelArgs) -> Result<ExitCode> {
    let p = Params::load(&a.common, "kernel")?;
    let spec = p.spec(a.spec.as_deref())?;
    let r = p.get_or(a.radius, "R", 6usize)?;
    let steps = p.get_or(a.steps, "N", r)?;
    let walk = p.raw(a.walk.as_deref(), "walk").unwrap_or_else(|| "both".into());
    let exact = a.exact || p.raw(None, "exact").is_some_and(|v| v == "true");
    let kinds: Vec<WalkKind> = match walk.as_str() {
        "srw" => vec![WalkKind::Srw],
        "nbw" => vec![WalkKind::Nbw],
        "both" => vec![WalkKind::Srw, WalkKind::Nbw],
        other => bail!("unknown walk {other:?} (srw, nbw or both)"),
    };
    let b = Ball::build(&spec, r)?;
    let mut sink = Sink::new(p.out_dir())?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for kind in kinds {
        if exact {
            let t = match kind {
                WalkKind::Srw => kernel::srw_kernel_exact(&b, steps)?,
                WalkKind::Nbw => kernel::nbw_kernel_exact(&b, steps)?,
            };
            for n in 0..=steps {
                for (v, &c) in t.row(n).iter().enumerate() {
                    if c > 0 {
                        rows.push(vec![kind.name().into(), n.to_string(), b.label(v as u32), t.prob(n, v as u32).to_string()]);
                    }
                }
            }
            println!("{} exact: p(return at {steps}) = {} (exact for n <= {})", kind.name(), t.prob(steps, 0), t.validity);
        } else {
            let t = match kind {
                WalkKind::Srw => kernel::srw_kernel(&b, steps),
                WalkKind::Nbw => kernel::nbw_kernel(&b, steps)?,
            };
            for n in 0..=steps {
                for (v, &x) in t.row(n).iter().enumerate() {
                    if x > 0.0 {
                        rows.push(vec![kind.name().into(), n.to_string(), b.label(v as u32), num(x)]);
                    }
                }
            }
            println!("{}: p(return at {steps}) = {} mass = {} (exact for n <= {})", kind.name(), t.prob(steps, 0), t.mass(steps), t.validity);
        }
    }
    sink.csv("kernel.csv", &["kind", "n", "vertex", "probability"], &rows)?;

    let user = p.get(a.rho_ub, "rho_ub")?;
    let rho_steps = p.get_or(a.rho_steps, "rho_steps", if spec.is_tree() { 200 } else { 2 * r })?;
    let rho_steps = rho_steps - rho_steps % 2;
    let est = kernel::estimate_spectral_radius(&spec, rho_steps, user)?;
    let rho_rows: Vec<Vec<String>> = est.sequence.iter().enumerate().map(|(i, v)| vec![(2 * (i + 1)).to_string(), num(*v)]).collect();
    sink.csv("rho.csv", &["steps", "estimate"], &rho_rows)?;
    match est.upper {
        Some(u) => println!(
            "rho: lower={:.6} upper={:.6} ({:?}) violations={}",
            est.lower_bound,
            u.value,
            u.provenance,
            est.violations().len()
        ),
        None => println!("rho: lower={:.6} upper=none (supply --rho-ub)", est.lower_bound),
    }
    let mut entries: Vec<CertEntry> = Vec::new();
    if let Some(u) = est.upper {
        let arith = if exact { Arithmetic::Exact } else { Arithmetic::Float };
        let n = steps.min(r);
        for rep in [
            kernel::check_lemma_nbw_tail(&b, n, u.value, arith, None),
            kernel::check_lemma_nbw_rho(&b, n, u.value, arith, None),
        ] {
            match rep {
                Ok(rep) => {
                    println!("{}: {} points, {} violations", rep.check, rep.checked, rep.violations.len());
                    entries.push(rep.to_entry(&spec.to_string()));
                }
                Err(e) => println!("kernel check skipped: {e}"),
            }
        }
    }
    if !entries.is_empty() {
        sink.write("kernel_checks.json", serde_json::to_string_pretty(&entries)?.as_bytes())?;
    }
    sink.commit()?;
    let failed = entries.iter().any(|e| e.status == Status::Fail) || !est.violations().is_empty();
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn p_grid(p: &Params, a: &PercArgs) -> Result<Vec<f64>> {
    if let Some(x) = a.p {
        return parse_grid(&x.to_string(), 0.0, 1.0);
    }
    let text = p
        .raw(a.p_grid.as_deref(), "p_grid")
        .or_else(|| p.raw(None, "p"))
        .ok_or_else(|| anyhow!("no retention probability given (use --p or --p-grid)"))?;
    parse_grid(&text, 0.0, 1.0)
}

fn single_p(p: &Params, a: &PercArgs) -> Result<f64> {
    let g = p_grid(p, a)?;
    match g[..] {
        [x] => Ok(x),
        _ => bail!("this task takes a single --p"),
    }
}

pub fn perc(a: PercArgs) -> Result<ExitCode> {
    let p = Params::load(&a.common, "perc")?;
    let spec = p.spec(a.spec.as_deref())?;
    let task = p.raw(a.task.as_deref(), "task").unwrap_or_else(|| "crossing".into());
    let seed = p.seed()?;
    let workers = p.workers()?;
    let d = spec.degree();
    let tree = spec.is_tree() && d >= 3;
    let mut sink = Sink::new(p.out_dir())?;
    match task.as_str() {
        "crossing" => {
            let grid = p_grid(&p, &a)?;
            let r = p.get_or(a.radius, "R", 10usize)?;
            let t = p.get_or(a.trials, "trials", 1000u64)?;
            let curve = crossing_curve(&spec, &grid, r, t, seed, workers);
            let mut rows = Vec::new();
            for c in &curve {
                let oracle_note = if tree { format!(" oracle={:.6}", oracle::crossing(d, c.p, r)) } else { String::new() };
                println!(
                    "crossing p={} R={r} estimate {} ci=[{:.4}, {:.4}] T={t}{oracle_note}",
                    c.p, c.estimate, c.ci_lo, c.ci_hi
                );
                rows.push(vec![num(c.p), r.to_string(), num(c.estimate), num(c.ci_lo), num(c.ci_hi), t.to_string(), seed.to_string()]);
            }
            sink.csv_with_plot(PlotKind::CrossingVsP, &["p", "R", "estimate", "ci_lo", "ci_hi", "T", "seed"], &rows)?;
        }
        "pc" => {
            let r = p.get_or(a.radius, "R", 10usize)?;
            let t = p.get_or(a.trials, "trials", 4000u64)?;
            let crit = match p.get(a.theta_star, "theta_star")? {
                Some(th) => PcCriterion::Threshold(th),
                None => PcCriterion::ScaleRatio,
            };
            let est = estimate_pc(&spec, r, t, seed, crit, workers).ok_or_else(|| anyhow!("criterion never reached on the p grid"))?;
            println!("p_c ~ {:.4} [{:.4}, {:.4}] criterion={:?} R={r} T={t} drift={:?}", est.point, est.lo, est.hi, est.criterion, est.drift);
            if tree {
                println!("exact tree p_c = {}", oracle::critical_probability(d));
            }
            println!("note: {}", est.warning);
            sink.write("pc.json", serde_json::to_string_pretty(&est)?.as_bytes())?;
        }
        "theta" => {
            let grid = p_grid(&p, &a)?;
            let r = p.get_or(a.radius, "R", 10usize)?;
            let t = p.get_or(a.trials, "trials", 2000u64)?;
            let radii = [r, 2 * r];
            let mut rows = Vec::new();
            let mut proxy = Vec::new();
            for &x in &grid {
                let th = theta(&spec, x, &radii, t, seed, workers);
                for c in &th.points {
                    rows.push(vec![num(c.p), c.radius.to_string(), num(c.estimate), num(c.ci_lo), num(c.ci_hi), t.to_string(), seed.to_string()]);
                }
                let oracle_note = if tree { format!(" survival={:.6}", oracle::survival(d, x)) } else { String::new() };
                println!("theta p={x} proxy(R={})={:.5} se={:.5}{oracle_note}", 2 * r, th.limit_proxy, th.limit_se);
                if th.limit_proxy > 0.0 {
                    proxy.push((x, th.limit_proxy));
                }
            }
            if tree && proxy.len() >= 2 {
                let pc = oracle::critical_probability(d);
                println!("{}", fmt_fit(&fit_beta(&proxy, pc, pc, &FitRules::default())));
            }
            sink.csv_with_plot(PlotKind::CrossingVsP, &["p", "R", "estimate", "ci_lo", "ci_hi", "T", "seed"], &rows)?;
        }
        "two-point" => {
            let x = single_p(&p, &a)?;
            let dmax = p.get_or(a.n, "N", 4usize)?;
            let slack = p.get_or(a.radius, "R", 2usize)?;
            let t = p.get_or(a.trials, "trials", 2000u64)?;
            let rho = tree_rho(&spec, p.get(a.rho_ub, "rho_ub")?);
            let mut rows = Vec::new();
            for k in 1..=dmax {
                let w = spec.geodesic_word(k as u32);
                let e = two_point(&spec, x, &w, k + slack, t, seed, rho, workers);
                println!(
                    "two-point p={x} x={} dist={k} estimate={:.5} ci=[{:.4}, {:.4}] tree={} bound={}",
                    e.target, e.estimate.estimate, e.estimate.ci_lo, e.estimate.ci_hi, opt(e.exact_tree), opt(e.decay_bound)
                );
                rows.push(vec![
                    k.to_string(),
                    e.target.clone(),
                    num(e.estimate.estimate),
                    num(e.estimate.ci_lo),
                    num(e.estimate.ci_hi),
                    opt(e.exact_tree),
                    opt(e.decay_bound),
                ]);
            }
            sink.csv("two_point.csv", &["dist", "vertex", "estimate", "ci_lo", "ci_hi", "exact_tree", "decay_bound"], &rows)?;
        }
        "witness" => {
            let x = single_p(&p, &a)?;
            let rmax = p.get_or(a.radius, "R", 4usize)?;
            let theta_r = p.get_or(a.n, "N", 12usize)?;
            let t = p.get_or(a.trials, "trials", 4000u64)?;
            let pc_upper = tree.then(|| oracle::critical_probability(d));
            let w = nonuniqueness_witness(&spec, x, rmax, theta_r, 2, t, seed, pc_upper, workers);
            println!("theta({x}) ~ {:.5} +- {:.5} (R={theta_r})", w.theta, w.theta_se);
            let mut rows = Vec::new();
            for pt in &w.points {
                println!("R={} two-point={:.5} margin={:.5} margin_lo={:.5}", pt.r, pt.two_point, pt.margin, pt.margin_lo);
                rows.push(vec![pt.r.to_string(), num(pt.two_point), num(pt.two_point_se), num(pt.margin), num(pt.margin_lo)]);
            }
            match (w.status, w.r0) {
                (WitnessStatus::Found, Some(r0)) => println!("witness found at R0={r0}"),
                _ => println!("witness inconclusive: {}", w.reason.as_deref().unwrap_or("no positive margin")),
            }
            sink.csv("witness.csv", &["R", "two_point", "two_point_se", "margin", "margin_lo"], &rows)?;
        }
        "triangle" => {
            let x = single_p(&p, &a)?;
            let t = p.get_or(a.trials, "trials", 2000u64)?;
            let rho = tree_rho(&spec, p.get(a.rho_ub, "rho_ub")?);
            let (method, default_r) = if tree { (DiagramMethod::ExactTree, 10) } else { (DiagramMethod::MonteCarlo, 3) };
            let r = p.get_or(a.radius, "R", default_r)?;
            let res = triangle_diagram(&spec, x, r, method, rho, t, seed, workers)?;
            println!(
                "triangle p={x} R={r} value={:.6} se={:.2e} tail_bound={} exact_tail={} certified={} lambda={}",
                res.value,
                res.se,
                opt(res.tail_bound),
                opt(res.exact_tail),
                res.certified,
                opt(res.lambda)
            );
            let rows = vec![vec![num(x), num(res.value), opt(res.tail_bound), res.certified.to_string(), num(res.se), format!("{:?}", res.method)]];
            sink.csv("diagram.csv", &["p", "value", "tail_bound", "certified", "se", "method"], &rows)?;
        }
        "tail" => {
            let x = single_p(&p, &a)?;
            let nmax = p.get_or(a.nmax, "nmax", 10_000usize)?;
            let t = p.get_or(a.trials, "trials", 10_000u64)?;
            let curve = cluster_size_tail(&spec, x, nmax, t, seed, workers);
            let grid = TailCurve::log_grid(1, nmax, 8);
            let rows: Vec<Vec<String>> = grid.iter().map(|&n| vec![n.to_string(), num(curve.survival(n))]).collect();
            println!("tail p={x} n_max={nmax} T={t} censored={}", curve.censored);
            println!("{}", fmt_fit(&fit_tail(&curve, (10.min(nmax), nmax), &FitRules::default())));
            sink.csv_with_plot(PlotKind::TailLogLog, &["n", "survival_fraction"], &rows)?;
        }
        "susceptibility" => {
            let grid = p_grid(&p, &a)?;
            let cap = p.get_or(a.nmax, "nmax", 100_000usize)?;
            let t = p.get_or(a.trials, "trials", 2000u64)?;
            let pts = susceptibility(&spec, &grid, cap, t, seed, workers);
            let mut rows = Vec::new();
            for s in &pts {
                println!("E|C| p={} mean={:.4} se={:.4} censored={} exact={}", s.p, s.mean.mean, s.mean.se, s.censored, opt(s.exact_tree));
                rows.push(vec![num(s.p), num(s.mean.mean), num(s.mean.se), s.censored.to_string(), opt(s.exact_tree)]);
            }
            if tree && pts.len() >= 2 {
                let pc = oracle::critical_probability(d);
                let xy: Vec<(f64, f64)> = pts.iter().map(|s| (s.p, s.mean.mean)).collect();
                println!("{}", fmt_fit(&fit_gamma(&xy, pc, pc, &FitRules::default())));
            }
            sink.csv("susceptibility.csv", &["p", "mean", "se", "censored", "exact_tree"], &rows)?;
        }
        other => bail!("unknown task {other:?}"),
    }
    sink.commit()?;
    Ok(ExitCode::SUCCESS)
}

pub fn saw(a: SawArgs) -> Result<ExitCode> {
    let p = Params::load(&a.common, "saw")?;
    let spec = p.spec(a.spec.as_deref())?;
    let nmax = p.get_or(a.nmax, "nmax", 10usize)?;
    let trunc = p.get_or(a.n, "N", nmax)?;
    let trials = p.get_or(a.trials, "trials", 2000u64)?;
    let d = spec.degree();
    let tree = spec.is_tree();
    let rho = tree_rho(&spec, p.get(a.rho_ub, "rho_ub")?);
    let mut sink = Sink::new(p.out_dir())?;

    let b = Ball::build(&spec, nmax)?;
    let census = enumerate_saw(&b, nmax)?;
    let rows: Vec<Vec<String>> = (0..=nmax).map(|n| vec![n.to_string(), census.count(n).to_string()]).collect();
    sink.csv("census.csv", &["n", "c_n"], &rows)?;
    let mut ep = Vec::new();
    for n in 0..=nmax {
        for (v, &c) in census.endpoint[n].iter().enumerate() {
            if c > 0 {
                ep.push(vec![n.to_string(), census.labels[v].clone(), c.to_string()]);
            }
        }
    }
    sink.csv("endpoints.csv", &["n", "vertex", "count"], &ep)?;
    let mu = connective_constant(&census, tree);
    println!("c_{nmax} = {} mu <= {:.6}{}", census.count(nmax), mu.best_upper, if tree { format!(" (exact {})", d - 1) } else { String::new() });

    let model = if tree { SawModel::Tree { degree: d } } else { SawModel::Census(&census) };
    let mu_inv = 1.0 / mu.value();
    if let Some(text) = p.raw(a.z_grid.as_deref(), "z_grid") {
        let grid = parse_grid(&text, 0.0, f64::INFINITY)?;
        let curve = susceptibility_saw(model, &grid, trunc, mu_inv)?;
        let mut rows = Vec::new();
        let mut brows = Vec::new();
        for pt in &curve.points {
            println!("chi z={} value={:.6} tail={} ratio=[{:.6}, {}]", pt.z, pt.chi, opt(pt.tail), pt.ratio_lo, opt(pt.ratio_hi));
            rows.push(vec![num(pt.z), num(pt.chi), opt(pt.tail), pt.tail.is_some().to_string(), num(pt.ratio_lo), opt(pt.ratio_hi)]);
            let bub = bubble_diagram(model, pt.z, trunc, rho);
            let tail = bub.exact_tail.or(bub.tail_bound);
            println!("bubble z={} value={:.6} tail={} certified={}", pt.z, bub.value, opt(tail), bub.certified);
            brows.push(vec![num(pt.z), num(bub.value), opt(tail), bub.certified.to_string()]);
        }
        println!("chi ratio bounds over grid: [{:.6}, {}]", curve.lower, opt(curve.upper));
        sink.csv_with_plot(PlotKind::ChiRatio, &["z", "value", "tail", "certified", "ratio_lo", "ratio_hi"], &rows)?;
        sink.csv("bubble.csv", &["z", "value", "tail", "certified"], &brows)?;
    }

    let eps = p.get(a.eps, "eps")?;
    let decay = endpoint_decay(&census, mu.best_upper, rho, eps);
    let drows: Vec<Vec<String>> = decay
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.sup), opt(r.bound), r.holds().map(|h| h.to_string()).unwrap_or_default()])
        .collect();
    println!(
        "endpoint decay: fitted rate={} lambda={} all bounds hold={}",
        opt(decay.fitted_rate),
        opt(decay.lambda),
        decay.all_hold.map(|h| h.to_string()).unwrap_or_else(|| "unknown (no rho bound)".into())
    );
    sink.csv_with_plot(PlotKind::DecayRate, &["n", "sup", "bound", "holds"], &drows)?;

    let alpha = match p.get(a.alpha, "alpha")? {
        Some(x) => Some(x),
        None => decay.lambda.and_then(|l| speed_alpha(d, l)),
    };
    let sampled = if trials > 0 {
        let seed = p.seed()?;
        Some(rosenbluth_sampler(&spec, nmax, trials, seed, p.workers()?))
    } else {
        None
    };
    if let Some(s) = &sampled {
        println!("rosenbluth c_{nmax} ~ {:.2} +- {:.2} (T={trials})", s.c_hat[nmax].mean, s.c_hat[nmax].se);
    }
    let ns: Vec<usize> = (1..=nmax).collect();
    let speed = saw_speed(Some(&census), sampled.as_ref(), &ns, alpha);
    let srows: Vec<Vec<String>> = speed
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), opt(r.exact), opt(r.sampled), opt(r.sampled_se), opt(speed.alpha), opt(r.mass_below)])
        .collect();
    if let Some(last) = speed.rows.last() {
        println!("speed n={} exact={} sampled={} alpha={}", last.n, opt(last.exact), opt(last.sampled), opt(speed.alpha));
    }
    sink.csv_with_plot(PlotKind::SpeedVsN, &["n", "exact", "sampled", "sampled_se", "alpha", "mass_below_alpha_n"], &srows)?;
    sink.commit()?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let p = Params::load(&a.common, "verify")?;
    let mut cfg = p.cfg.clone();
    let specs: Vec<String> = match &a.spec {
        Some(s) => {
            cfg.set("verify", "specs", s.as_str());
            s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
        }
        None => Vec::new(),
    };
    if let Some(s) = a.common.seed {
        cfg.set("verify", "seed", s.to_string());
    }
    if let Some(w) = a.common.workers {
        cfg.set("verify", "workers", w.to_string());
    }
    if let Some(r) = a.rho_ub {
        if specs.is_empty() {
            bail!("--rho-ub needs --spec");
        }
        for s in &specs {
            cfg.set("verify", &format!("rho_ub.{s}"), r.to_string());
        }
    }
    if let Some(c) = a.bnp_c {
        cfg.set("verify", "bnp_C", c.to_string());
    }
    if let Some(e) = a.eps {
        cfg.set("verify", "eps", e.to_string());
    }
    let cc = CertConfig::from_config(&cfg).context("reading verify settings")?;
    let cert = run_certificate(&cc);
    for e in &cert.entries {
        let status = match e.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        println!(
            "{status} {} {} lhs={} rhs={} margin={}{}",
            e.graph,
            e.id,
            opt(e.lhs),
            opt(e.rhs),
            opt(e.margin),
            e.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default()
        );
    }
    let count = |s| cert.entries.iter().filter(|e| e.status == s).count();
    println!(
        "certificate: {} pass, {} fail, {} inconclusive",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Inconclusive)
    );
    let mut sink = Sink::new(p.out_dir())?;
    sink.write("certificate.json", cert.to_json().as_bytes())?;
    sink.commit()?;
    Ok(if cert.any_failed() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

pub fn report(a: ReportArgs) -> Result<ExitCode> {
    let p = Params::load(&a.common, "report")?;
    let kind = p.raw(a.kind.as_deref(), "kind");
    let input = a.input.clone().or_else(|| p.raw(None, "input").map(PathBuf::from));
    let jobs: Vec<(PlotKind, PathBuf)> = match (kind, input) {
        (Some(k), Some(path)) => vec![(k.parse::<PlotKind>().map_err(|e| anyhow!(e))?, path)],
        (k, None) => {
            let dir = p.out_dir().ok_or_else(|| anyhow!("no --input and no output directory to scan"))?;
            let kinds = match k {
                Some(k) => vec![k.parse::<PlotKind>().map_err(|e| anyhow!(e))?],
                None => PlotKind::ALL.to_vec(),
            };
            let found: Vec<(PlotKind, PathBuf)> =
                kinds.into_iter().map(|k| (k, dir.join(k.source()))).filter(|(_, f)| f.exists()).collect();
            if found.is_empty() {
                bail!("no plottable CSV in {}", dir.display());
            }
            found
        }
        (None, Some(_)) => bail!("--input needs --kind"),
    };
    let out = p
        .out_dir()
        .or_else(|| jobs[0].1.parent().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let mut outputs = Outputs::new(&out)?;
    for (k, path) in &jobs {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let svg = emit_plot(*k, &text).with_context(|| format!("plotting {}", path.display()))?;
        outputs.write(&format!("{}.svg", k.name()), svg.as_bytes())?;
    }
    for f in outputs.commit()? {
        println!("wrote {}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}
