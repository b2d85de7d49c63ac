//! Individual inequality checks and the full certificate run.

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::ball::{self, Ball, Girth};
use crate::certificate::{CertEntry, Relation, Status};
use crate::config::{Config, ConfigError};
use crate::group::GroupSpec;
use crate::kernel::{self, Arithmetic, RhoProvenance};
use crate::perc::diagram::{triangle_diagram, DiagramMethod};
use crate::perc::estimate::{estimate_pc, PcCriterion};
use crate::perc::oracle;
use crate::saw::census::enumerate_saw;
use crate::saw::green::{bubble_diagram, SawModel};
use crate::saw::law::{connective_constant, endpoint_decay, saw_speed, speed_alpha};
use crate::saw::rosenbluth::rosenbluth_sampler;

/// `p̂_c (d-1) ρ < 1`, evaluated at the upper end of the `p_c` interval.
pub fn check_perccond(graph: &str, d: usize, pc_hi: f64, rho_ub: Option<f64>) -> CertEntry {
    const ANCHOR: &str = "p_c (d-1) rho < 1";
    match rho_ub {
        None => CertEntry::inconclusive("perc.perccond", graph, ANCHOR, Relation::Less, "no spectral radius bound"),
        Some(rho) => CertEntry::compare("perc.perccond", graph, ANCHOR, Relation::Less, pc_hi * (d - 1) as f64 * rho, 1.0)
            .with_param("pc_hi", pc_hi)
            .with_param("rho_ub", rho)
            .with_param("d", d),
    }
}

/// `L = C log(1 + (1-ρ)^{-2}) / (ρ^{-1} - 1)`.
pub fn girth_threshold(rho_ub: f64, c: f64) -> f64 {
    c * (1.0 + (1.0 - rho_ub).powi(-2)).ln() / (1.0 / rho_ub - 1.0)
}

/// Compares the girth with the threshold `L`; infinite girth is recorded as
/// an unbounded left side.
pub fn check_girth_threshold(graph: &str, girth: Girth, is_tree: bool, rho_ub: Option<f64>, c: Option<f64>) -> CertEntry {
    const ANCHOR: &str = "girth >= C log(1 + (1-rho)^-2) / (rho^-1 - 1)";
    let id = "graph.girth_threshold";
    let (Some(rho), Some(c)) = (rho_ub, c) else {
        let why = if c.is_none() { "constant C not supplied" } else { "no spectral radius bound" };
        return CertEntry::inconclusive(id, graph, ANCHOR, Relation::GreaterEq, why);
    };
    let l = girth_threshold(rho, c);
    let lhs = if is_tree { f64::INFINITY } else { girth.lower_bound() as f64 };
    let entry = CertEntry::compare(id, graph, ANCHOR, Relation::GreaterEq, lhs, l)
        .with_param("C", c)
        .with_param("rho_ub", rho)
        .with_param("girth", girth.to_string());
    match (is_tree, girth) {
        (true, _) => entry.with_reason("tree: girth is infinite"),
        (false, Girth::Exceeds(_)) => entry.with_reason("only a lower bound on the girth is known"),
        _ => entry,
    }
}

/// `1/(d-1) + C log(1 + (1-ρ)^{-2}) / (d g)`; infinite girth gives `1/(d-1)`.
pub fn bnp_bound(d: usize, girth: Option<f64>, rho_ub: f64, c: f64) -> f64 {
    let base = 1.0 / (d - 1) as f64;
    match girth {
        Some(g) if g.is_finite() => base + c * (1.0 + (1.0 - rho_ub).powi(-2)).ln() / (d as f64 * g),
        _ => base,
    }
}

pub fn check_bnp_bound(graph: &str, d: usize, girth: Option<f64>, rho_ub: Option<f64>, c: Option<f64>, pc_hi: f64) -> CertEntry {
    const ANCHOR: &str = "p_c <= 1/(d-1) + C log(1 + (1-rho)^-2) / (d g)";
    let id = "perc.pc_upper_bound";
    let (Some(rho), Some(c)) = (rho_ub, c) else {
        let why = if c.is_none() { "constant C not supplied" } else { "no spectral radius bound" };
        return CertEntry::inconclusive(id, graph, ANCHOR, Relation::LessEq, why);
    };
    CertEntry::compare(id, graph, ANCHOR, Relation::LessEq, pc_hi, bnp_bound(d, girth, rho, c))
        .with_param("C", c)
        .with_param("rho_ub", rho)
        .with_param("girth", girth.map_or_else(|| "inf".to_string(), |g| g.to_string()))
}

/// `μ p_c >= 1` with the upper ends of both estimates.
pub fn check_mu_pc(graph: &str, mu_ub: f64, pc_lo: f64, pc_hi: f64) -> CertEntry {
    CertEntry::compare("saw.mu_pc", graph, "mu p_c >= 1", Relation::GreaterEq, mu_ub * pc_hi, 1.0)
        .with_param("mu_ub", mu_ub)
        .with_param("pc_lo", pc_lo)
        .with_param("pc_hi", pc_hi)
        .with_param("product_lo", mu_ub * pc_lo)
}

/// Settings of a certificate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertConfig {
    pub specs: Vec<String>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub rho_ub: BTreeMap<String, f64>,
    pub bnp_c: Option<f64>,
    pub eps: Option<f64>,
    pub lemma_radius: usize,
    pub lemma_nmax: usize,
    pub arithmetic: Arithmetic,
    pub rho_steps: usize,
    pub pc_radius: usize,
    pub pc_trials: u64,
    pub saw_nmax: usize,
    pub triangle_radius: usize,
    pub triangle_mc_radius: usize,
    pub triangle_trials: u64,
    pub speed_trials: u64,
    pub girth_rmax: usize,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            specs: Vec::new(),
            seed: 1,
            workers: None,
            rho_ub: BTreeMap::new(),
            bnp_c: None,
            eps: None,
            lemma_radius: 10,
            lemma_nmax: 10,
            arithmetic: Arithmetic::Exact,
            rho_steps: 200,
            pc_radius: 10,
            pc_trials: 4000,
            saw_nmax: 10,
            triangle_radius: 10,
            triangle_mc_radius: 3,
            triangle_trials: 2000,
            speed_trials: 2000,
            girth_rmax: 6,
        }
    }
}

impl CertConfig {
    /// Reads the `[verify]` section (falling back to top-level keys). The
    /// seed is required.
    pub fn from_config(cfg: &Config) -> Result<Self, ConfigError> {
        const S: &str = "verify";
        let d = CertConfig::default();
        let seed = cfg.parsed::<u64>(S, "seed")?.ok_or(ConfigError::Missing { section: S.into(), key: "seed".into() })?;
        let mut rho_ub = BTreeMap::new();
        for (spec, v) in cfg.with_prefix(S, "rho_ub.").chain(cfg.with_prefix("", "rho_ub.")) {
            let x: f64 = v.parse().map_err(|_| ConfigError::Value {
                section: S.into(),
                key: format!("rho_ub.{spec}"),
                value: v.into(),
            })?;
            rho_ub.entry(canonical(spec)).or_insert(x);
        }
        let arithmetic = match cfg.lookup(S, "arithmetic") {
            None | Some("exact") => Arithmetic::Exact,
            Some("float") => Arithmetic::Float,
            Some(other) => {
                return Err(ConfigError::Value { section: S.into(), key: "arithmetic".into(), value: other.into() })
            }
        };
        Ok(Self {
            specs: cfg.list(S, "specs").iter().map(|s| canonical(s)).collect(),
            seed,
            workers: cfg.parsed(S, "workers")?,
            rho_ub,
            bnp_c: cfg.parsed(S, "bnp_C")?,
            eps: cfg.parsed(S, "eps")?,
            lemma_radius: cfg.parsed_or(S, "lemma_R", d.lemma_radius)?,
            lemma_nmax: cfg.parsed_or(S, "lemma_nmax", d.lemma_nmax)?,
            arithmetic,
            rho_steps: cfg.parsed_or(S, "rho_steps", d.rho_steps)?,
            pc_radius: cfg.parsed_or(S, "pc_R", d.pc_radius)?,
            pc_trials: cfg.parsed_or(S, "pc_trials", d.pc_trials)?,
            saw_nmax: cfg.parsed_or(S, "saw_nmax", d.saw_nmax)?,
            triangle_radius: cfg.parsed_or(S, "triangle_R", d.triangle_radius)?,
            triangle_mc_radius: cfg.parsed_or(S, "triangle_mc_R", d.triangle_mc_radius)?,
            triangle_trials: cfg.parsed_or(S, "triangle_trials", d.triangle_trials)?,
            speed_trials: cfg.parsed_or(S, "speed_trials", d.speed_trials)?,
            girth_rmax: cfg.parsed_or(S, "girth_rmax", d.girth_rmax)?,
        })
    }
}

/// Normal spelling of a spec string (`Z5 * Z5` -> `Z5*Z5`); unparsable
/// strings are kept so the run can report them.
fn canonical(spec: &str) -> String {
    GroupSpec::parse(spec).map(|g| g.to_string()).unwrap_or_else(|_| spec.trim().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInputs {
    pub degree: usize,
    pub girth: String,
    pub rho_ub: Option<f64>,
    pub rho_provenance: Option<RhoProvenance>,
    pub pc_lo: f64,
    pub pc_hi: f64,
    pub pc_provenance: String,
    pub mu_ub: f64,
    pub mu_provenance: String,
    pub bnp_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub workers: Option<usize>,
    pub unix_time: u64,
    pub durations_ms: BTreeMap<String, u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub graphs: Vec<String>,
    pub seed: u64,
    pub inputs: BTreeMap<String, GraphInputs>,
    pub entries: Vec<CertEntry>,
    pub notes: Vec<String>,
    pub meta: Meta,
}

/// Certificate without the `meta` block, for byte comparison.
#[derive(Serialize)]
struct Body<'a> {
    graphs: &'a [String],
    seed: u64,
    inputs: &'a BTreeMap<String, GraphInputs>,
    entries: &'a [CertEntry],
    notes: &'a [String],
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Everything except run metadata; identical for identical config and seed.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&Body {
            graphs: &self.graphs,
            seed: self.seed,
            inputs: &self.inputs,
            entries: &self.entries,
            notes: &self.notes,
        })
        .expect("certificate serializes")
    }

    pub fn any_failed(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::Fail)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::Inconclusive)
    }
}

/// Check ids run for every graph, in order.
pub const CHECK_IDS: [&str; 13] = [
    "graph.girth",
    "kernel.rho_sequence",
    "kernel.nbw_vs_srw_tail",
    "kernel.nbw_vs_rho",
    "perc.perccond",
    "graph.girth_threshold",
    "perc.pc_upper_bound",
    "saw.mu_pc",
    "perc.triangle_chain",
    "saw.census",
    "saw.bubble_chain",
    "saw.endpoint_decay",
    "saw.speed",
];

/// Runs every check on every configured graph. Failures are recorded, never
/// fatal; a check that cannot run is recorded as inconclusive.
pub fn run_certificate(cfg: &CertConfig) -> Certificate {
    let mut entries = Vec::new();
    let mut inputs = BTreeMap::new();
    let mut durations = BTreeMap::new();
    for name in &cfg.specs {
        let start = Instant::now();
        match GroupSpec::parse(name) {
            Ok(spec) => {
                let (inp, es) = certify_graph(&spec, cfg);
                inputs.insert(name.clone(), inp);
                entries.extend(es);
            }
            Err(e) => {
                for id in CHECK_IDS {
                    entries.push(CertEntry::inconclusive(id, name, "plumbing", Relation::LessEq, &format!("bad spec: {e}")));
                }
            }
        }
        durations.insert(name.clone(), start.elapsed().as_millis());
    }
    let notes = if cfg.specs.is_empty() {
        Vec::new()
    } else {
        vec![
            "rho enters every check through a certified upper bound; all checked inequalities are monotone in rho".to_string(),
            "estimated quantities enter at their conservative interval end".to_string(),
        ]
    };
    Certificate {
        graphs: cfg.specs.clone(),
        seed: cfg.seed,
        inputs,
        entries,
        notes,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            workers: cfg.workers,
            unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            durations_ms: durations,
        },
    }
}

fn certify_graph(spec: &GroupSpec, cfg: &CertConfig) -> (GraphInputs, Vec<CertEntry>) {
    let g = spec.to_string();
    let d = spec.degree();
    let tree = spec.is_tree();
    let mut out = Vec::new();

    // Girth.
    let girth = ball::girth(spec, cfg.girth_rmax);
    let girth_entry = match (&girth, spec.structural_girth()) {
        (Ok(found), expected) => {
            let ok = match (found, expected) {
                (Girth::Exact(a), Some(b)) => *a == b,
                (Girth::Exceeds(bound), Some(b)) => b > *bound,
                (Girth::Exceeds(_), None) => true,
                (Girth::Exact(_), None) => false,
            };
            let lhs = found.lower_bound() as f64;
            let e = CertEntry::compare("graph.girth", &g, "plumbing", Relation::GreaterEq, lhs, lhs)
                .with_param("girth", found.to_string())
                .with_param("r_max", cfg.girth_rmax);
            if ok { e } else { e.force_fail("ball girth disagrees with the factor orders") }
        }
        (Err(err), _) => CertEntry::inconclusive("graph.girth", &g, "plumbing", Relation::GreaterEq, &err.to_string()),
    };
    out.push(girth_entry);
    let girth = girth.unwrap_or(Girth::Exceeds(0));

    // Spectral radius.
    let user_rho = cfg.rho_ub.get(&g).copied();
    let steps = if tree { cfg.rho_steps } else { cfg.rho_steps.min(2 * cfg.lemma_radius) };
    let steps = steps - steps % 2;
    let rho_est = kernel::estimate_spectral_radius(spec, steps, user_rho);
    let rho_bound = rho_est.as_ref().ok().and_then(|e| e.upper);
    let rho_ub = rho_bound.map(|b| b.value).filter(|&r| r > 0.0 && r < 1.0);
    let anchor = "(p^2n(0,0))^(1/2n) <= rho";
    out.push(match (&rho_est, rho_bound) {
        (Ok(est), Some(b)) => CertEntry::compare("kernel.rho_sequence", &g, anchor, Relation::LessEq, est.lower_bound, b.value)
            .with_param("steps", steps)
            .with_param("provenance", serde_json::to_value(b.provenance).expect("enum")),
        (Ok(_), None) => CertEntry::inconclusive("kernel.rho_sequence", &g, anchor, Relation::LessEq, "no spectral radius bound"),
        (Err(e), _) => CertEntry::inconclusive("kernel.rho_sequence", &g, anchor, Relation::LessEq, &e.to_string()),
    });

    // Kernel comparison inequalities on a ball.
    let lemma_ball = Ball::build(spec, cfg.lemma_radius);
    for (id, anchor, which) in [
        ("kernel.nbw_vs_srw_tail", "q^n(0,x) <= sum_{j>=n} p^j(0,x)", 0),
        ("kernel.nbw_vs_rho", "q^n(0,x) <= rho^n / (1 - rho)", 1),
    ] {
        let entry = match (&lemma_ball, rho_ub) {
            (Ok(b), Some(rho)) => {
                let n = cfg.lemma_nmax.min(cfg.lemma_radius);
                let rep = if which == 0 {
                    kernel::check_lemma_nbw_tail(b, n, rho, cfg.arithmetic, None)
                } else {
                    kernel::check_lemma_nbw_rho(b, n, rho, cfg.arithmetic, None)
                };
                match rep {
                    Ok(r) => r.to_entry(&g),
                    Err(e) => CertEntry::inconclusive(id, &g, anchor, Relation::LessEq, &e.to_string()),
                }
            }
            (Err(e), _) => CertEntry::inconclusive(id, &g, anchor, Relation::LessEq, &e.to_string()),
            (_, None) => CertEntry::inconclusive(id, &g, anchor, Relation::LessEq, "no spectral radius bound"),
        };
        out.push(entry);
    }

    // p_c: exact on trees, Monte Carlo interval otherwise.
    let (pc_lo, pc_hi, pc_prov) = if tree && d >= 3 {
        let pc = oracle::critical_probability(d);
        (pc, pc, "exact-tree".to_string())
    } else {
        match estimate_pc(spec, cfg.pc_radius, cfg.pc_trials, cfg.seed, PcCriterion::ScaleRatio, cfg.workers) {
            Some(e) => (e.lo, e.hi, format!("monte-carlo scale-ratio R={} T={}", cfg.pc_radius, cfg.pc_trials)),
            None => (f64::NAN, f64::NAN, "unavailable".to_string()),
        }
    };
    let pc_known = pc_hi.is_finite();
    let pc_missing = |id: &str, anchor: &str, rel| CertEntry::inconclusive(id, &g, anchor, rel, "no p_c estimate");
    out.push(if pc_known { check_perccond(&g, d, pc_hi, rho_ub) } else { pc_missing("perc.perccond", "p_c (d-1) rho < 1", Relation::Less) });
    out.push(check_girth_threshold(&g, girth, tree, rho_ub, cfg.bnp_c));
    let girth_val = if tree { None } else { Some(girth.lower_bound() as f64) };
    out.push(if pc_known {
        check_bnp_bound(&g, d, girth_val, rho_ub, cfg.bnp_c, pc_hi)
    } else {
        pc_missing("perc.pc_upper_bound", "p_c <= 1/(d-1) + C log(1 + (1-rho)^-2) / (d g)", Relation::LessEq)
    });

    // Census.
    let n_saw = cfg.saw_nmax;
    let census = match &lemma_ball {
        Ok(b) if b.radius() >= n_saw => enumerate_saw(b, n_saw).map_err(|e| e.to_string()),
        _ => Ball::build(spec, n_saw)
            .map_err(|e| e.to_string())
            .and_then(|b| enumerate_saw(&b, n_saw).map_err(|e| e.to_string())),
    };
    let mu = census.as_ref().ok().map(|c| connective_constant(c, tree));
    let mu_ub = mu.as_ref().map_or(f64::NAN, |m| m.value());
    out.push(match (&mu, pc_known) {
        (Some(_), true) => check_mu_pc(&g, mu_ub, pc_lo, pc_hi),
        _ => CertEntry::inconclusive("saw.mu_pc", &g, "mu p_c >= 1", Relation::GreaterEq, "missing census or p_c"),
    });

    // Triangle at the p_c upper end.
    let tri_anchor = "p_c (d-1) rho < 1 bounds the triangle tail";
    out.push(match (rho_ub, pc_known) {
        (Some(rho), true) => {
            let (method, radius) = if tree { (DiagramMethod::ExactTree, cfg.triangle_radius) } else { (DiagramMethod::MonteCarlo, cfg.triangle_mc_radius) };
            match triangle_diagram(spec, pc_hi, radius, method, Some(rho), cfg.triangle_trials, cfg.seed, cfg.workers) {
                Ok(t) => {
                    let lambda = t.lambda.unwrap_or(f64::NAN);
                    let mut e = CertEntry::compare("perc.triangle_chain", &g, tri_anchor, Relation::Less, lambda, 1.0)
                        .with_param("p", pc_hi)
                        .with_param("truncation", radius)
                        .with_param("value", t.value)
                        .with_param("se", t.se)
                        .with_param("method", serde_json::to_value(t.method).expect("enum"));
                    if let Some(tb) = t.tail_bound {
                        e = e.with_param("tail_bound", tb);
                    }
                    if let Some(x) = t.exact_tail {
                        e = e.with_param("exact_tail", x);
                    }
                    e
                }
                Err(err) => CertEntry::inconclusive("perc.triangle_chain", &g, tri_anchor, Relation::Less, &err.to_string()),
            }
        }
        _ => CertEntry::inconclusive("perc.triangle_chain", &g, tri_anchor, Relation::Less, "needs rho bound and p_c"),
    });

    // Census consistency: c_n <= d (d-1)^{n-1}, rows sum to c_n, submultiplicativity.
    out.push(match &census {
        Ok(c) => {
            let worst = (1..=c.n_max)
                .map(|n| c.count_f64(n) / num_traits::ToPrimitive::to_f64(&c.nbw_count(n)).unwrap_or(f64::INFINITY))
                .fold(0.0f64, f64::max);
            let rows_ok = (0..=c.n_max).all(|n| {
                let s: u128 = c.endpoint[n].iter().map(|&x| x as u128).sum();
                num_bigint::BigUint::from(s) == c.counts[n]
            });
            let e = CertEntry::compare("saw.census", &g, "c_n <= d (d-1)^(n-1)", Relation::LessEq, worst, 1.0)
                .with_param("n_max", c.n_max)
                .with_param("c_n_max", c.count(c.n_max).to_string());
            match (rows_ok, c.submultiplicativity_violation()) {
                (true, None) => e,
                (false, _) => e.force_fail("endpoint rows do not sum to c_n"),
                (_, Some((a, b))) => e.force_fail(format!("c_(m+n) > c_m c_n at m={a}, n={b}")),
            }
        }
        Err(err) => CertEntry::inconclusive("saw.census", &g, "c_n <= d (d-1)^(n-1)", Relation::LessEq, err),
    });

    // Bubble at z = 1/μ̂.
    let mu_inv = mu.as_ref().map(|m| 1.0 / m.value());
    let bub_anchor = "z (d-1) rho < 1 bounds the bubble tail";
    out.push(match (rho_ub, mu_inv, &census) {
        (Some(rho), Some(z), Ok(c)) => {
            let model = if tree { SawModel::Tree { degree: d } } else { SawModel::Census(c) };
            let b = bubble_diagram(model, z, n_saw, Some(rho));
            let mut e = CertEntry::compare("saw.bubble_chain", &g, bub_anchor, Relation::Less, b.lambda.unwrap_or(f64::NAN), 1.0)
                .with_param("z", z)
                .with_param("truncation", b.truncation)
                .with_param("value", b.value);
            if let Some(tb) = b.tail_bound {
                e = e.with_param("tail_bound", tb);
            }
            if let Some(x) = b.exact_tail {
                e = e.with_param("exact_tail", x);
            }
            e
        }
        _ => CertEntry::inconclusive("saw.bubble_chain", &g, bub_anchor, Relation::Less, "needs rho bound and census"),
    });

    // Endpoint decay and speed.
    let decay_anchor = "sup_x c_n(x)/c_n <= d (d-1)^(n-1) rho^n / ((1-rho) c_n)";
    let decay = match (&census, rho_ub) {
        (Ok(c), Some(rho)) => Some(endpoint_decay(c, mu_ub, Some(rho), cfg.eps)),
        _ => None,
    };
    out.push(match &decay {
        Some(rep) => {
            let worst = rep
                .rows
                .iter()
                .filter_map(|r| r.bound.map(|b| r.sup / b))
                .fold(0.0f64, f64::max);
            let mut e = CertEntry::compare("saw.endpoint_decay", &g, decay_anchor, Relation::LessEq, worst, 1.0)
                .with_param("n_max", n_saw);
            if let Some(l) = rep.lambda {
                e = e.with_param("lambda", l);
            }
            if let Some(r) = rep.fitted_rate {
                e = e.with_param("fitted_rate", r);
            }
            e
        }
        None => CertEntry::inconclusive("saw.endpoint_decay", &g, decay_anchor, Relation::LessEq, "needs rho bound and census"),
    });
    let speed_anchor = "E dist(0, SAW(n)) / n >= alpha";
    out.push(match (&census, decay.as_ref().and_then(|r| r.lambda)) {
        (Ok(c), Some(lambda)) => match speed_alpha(d, lambda) {
            Some(alpha) => {
                let ros = rosenbluth_sampler(spec, n_saw, cfg.speed_trials, cfg.seed, cfg.workers);
                let rep = saw_speed(Some(c), Some(&ros), &[n_saw], Some(alpha));
                let row = &rep.rows[0];
                let mut e = CertEntry::compare("saw.speed", &g, speed_anchor, Relation::GreaterEq, row.exact.unwrap_or(f64::NAN), alpha)
                    .with_param("n", n_saw);
                if let Some(s) = row.sampled {
                    e = e.with_param("sampled", s);
                }
                if let Some(m) = row.mass_below {
                    e = e.with_param("mass_below_alpha_n", m);
                }
                e
            }
            None => CertEntry::inconclusive("saw.speed", &g, speed_anchor, Relation::GreaterEq, "decay rate lambda is not below 1"),
        },
        _ => CertEntry::inconclusive("saw.speed", &g, speed_anchor, Relation::GreaterEq, "needs rho bound and census"),
    });

    let inputs = GraphInputs {
        degree: d,
        girth: if tree { "inf".to_string() } else { girth.to_string() },
        rho_ub,
        rho_provenance: rho_bound.map(|b| b.provenance),
        pc_lo,
        pc_hi,
        pc_provenance: pc_prov,
        mu_ub,
        mu_provenance: format!("min c_n^(1/n), n <= {n_saw}"),
        bnp_c: cfg.bnp_c,
    };
    (inputs, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perccond_on_trees() {
        let rho = kernel::kesten_rho(4);
        let e = check_perccond("Z*Z", 4, 1.0 / 3.0, Some(rho));
        assert_eq!(e.status, Status::Pass);
        assert!((e.lhs.unwrap() - rho).abs() < 1e-12);
        let e = check_perccond("Z*Z", 4, 1.0 / 3.0, Some(1.0 / 3.0 * 3.0));
        assert_eq!(e.status, Status::Fail);
        assert_eq!(e.margin, Some(0.0));
        assert_eq!(check_perccond("g", 4, 0.3, None).status, Status::Inconclusive);
    }

    #[test]
    fn girth_threshold_formula() {
        assert!((girth_threshold(0.5, 1.0) - 5f64.ln()).abs() < 1e-15);
        assert!(girth_threshold(0.99, 1.0) > girth_threshold(0.9, 1.0));
    }

    #[test]
    fn bnp_edges() {
        assert_eq!(bnp_bound(4, Some(5.0), 0.9, 0.0), 1.0 / 3.0);
        assert_eq!(bnp_bound(4, None, 0.9, 2.0), 1.0 / 3.0);
    }

    #[test]
    fn empty_config_gives_empty_certificate() {
        let cert = run_certificate(&CertConfig::default());
        assert!(cert.entries.is_empty());
        assert!(cert.graphs.is_empty());
        assert!(!cert.any_failed());
    }
}
