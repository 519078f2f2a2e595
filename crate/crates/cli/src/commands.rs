//! Dispatch of a validated configuration to the solvers, one row per sweep
//! point.

use std::collections::BTreeMap;

use cascade_core::discrete::{
    eval_point, min_r1_cascade_search, read_aux, read_source, AuxiliarySystem, Network, SearchOptions, SourceSpec, StartKind,
};
use cascade_core::gaussian::{
    cascade_min_r1, extended_backward_achievability, extended_backward_region_check, triangular_min_r1,
    two_way_triangular_min_r1, CascadeSolution, GaussianCascadeSource, GaussianQuery,
};
use cascade_core::prob::{kaspi_leaky_reply_check, kaspi_lemma_check, DeterministicMap, JointPmf};
use cascade_core::sim::{run_simulation, TypicalityParams};
use cascade_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{CommandKind, RunConfig, Value};
use crate::sweep::grid;
use crate::table::{Cell, ResultTable, Status};

/// Values taken by optional keys that are not set.
const DEFAULTS: &[(&str, f64)] = &[
    ("solver.restarts", 16.0),
    ("solver.max_iters", 400.0),
    ("solver.tol", 1e-6),
    ("sim.epsilon", 0.4),
    ("sim.delta", 0.15),
    ("sim.trials", 1000.0),
    ("kaspi.instances", 200.0),
    ("kaspi.alphabet", 3.0),
];

/// Values of one sweep point, by full key.
struct Point<'a> {
    cfg: &'a RunConfig,
    swept: BTreeMap<&'static str, f64>,
    /// Defaults that depend on the source.
    derived: &'a [(&'static str, f64)],
}

impl Point<'_> {
    fn num(&self, key: &str) -> Option<f64> {
        self.swept
            .get(key)
            .copied()
            .or_else(|| self.cfg.values.get(key).and_then(Value::as_f64))
            .or_else(|| self.derived.iter().chain(DEFAULTS).find(|(k, _)| *k == key).map(|(_, v)| *v))
    }

    fn f(&self, key: &str) -> f64 {
        self.num(key).expect("validated key")
    }

    fn int(&self, key: &str) -> Option<usize> {
        self.num(key).map(|v| v.round() as usize)
    }

    fn text(&self, key: &str) -> Option<&str> {
        text_value(self.cfg, key)
    }
}

fn text_value<'a>(cfg: &'a RunConfig, key: &str) -> Option<&'a str> {
    match cfg.values.get(key) {
        Some(Value::Text(s)) => Some(s),
        _ => None,
    }
}

type Outcome = Result<Vec<Cell>, CoreError>;

fn output_columns(cmd: CommandKind) -> &'static [&'static str] {
    match cmd {
        CommandKind::GaussianCascade | CommandKind::GaussianTriangular => {
            &["r1", "alpha", "beta", "var_zstar", "r2_threshold", "var_a_given_ub", "var_ab_given_u"]
        }
        CommandKind::GaussianTwoWay => &[
            "r1",
            "alpha",
            "beta",
            "var_zstar",
            "r2_threshold",
            "var_a_given_ub",
            "var_ab_given_u",
            "r4_threshold",
        ],
        CommandKind::GaussianExtended => &["case", "r3_used", "r4_used", "r5_used", "dz1_achieved", "dz2_achieved", "min_slack"],
        CommandKind::DiscreteEval => &["r1", "r2", "r3", "r4", "rh", "d1", "d2", "d3"],
        CommandKind::DiscreteSearch => &["r1", "r2_bound", "d1_achieved", "d2_achieved", "start"],
        CommandKind::Simulate => &[
            "seed", "r_l", "r_10", "r_11", "r_2", "bits_l", "bits_b10", "bits_m11", "bits_b2", "e0", "e1", "e2", "e3", "e4", "e5",
            "flagged", "d1", "d1_ci", "d2", "d2_ci", "d1_clean", "d1_clean_ci", "d2_clean", "d2_clean_ci",
        ],
        CommandKind::KaspiCheck => &["max_first", "max_second", "max_third", "control_max", "control_share"],
    }
}

pub fn provenance(cfg: &RunConfig) -> Vec<String> {
    vec![
        format!("cascade-rd {}", env!("CARGO_PKG_VERSION")),
        format!("command = {}", cfg.command.name()),
        format!("seed = {}", cfg.seed),
        format!("config sha256 = {}", cfg.hash()),
    ]
}

fn gaussian_source(p: &Point) -> Result<GaussianCascadeSource, CoreError> {
    GaussianCascadeSource::new(p.f("source.var_a"), p.f("source.var_b"), p.f("source.var_z"))
}

fn forward_cells(s: &CascadeSolution) -> Vec<Cell> {
    vec![
        Cell::Num(s.r1),
        Cell::Num(s.aux.alpha),
        Cell::Num(s.aux.beta),
        Cell::Num(s.aux.var_zstar),
        Cell::Num(s.r2_threshold),
        Cell::Num(s.cond_var_a_given_ub),
        Cell::Num(s.cond_var_ab_given_u),
    ]
}

fn start_name(s: StartKind) -> String {
    match s {
        StartKind::Warm => "warm".into(),
        StartKind::ConstantU => "constant".into(),
        StartKind::IdentityU => "identity".into(),
        StartKind::Deterministic(c) => format!("deterministic-{c}"),
        StartKind::Optimized(i) => format!("optimized-{i}"),
    }
}

fn random_pair_pmf(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Result<JointPmf, CoreError> {
    let w = (0..n * m).map(|_| -rng.gen_range(1e-9f64..1.0).ln()).collect();
    JointPmf::from_weights(vec![n, m], w)
}

fn random_map(rng: &mut ChaCha8Rng, inputs: Vec<usize>, out: usize) -> Result<DeterministicMap, CoreError> {
    DeterministicMap::from_fn(inputs, out, |_| rng.gen_range(0..out))
}

/// Largest lemma quantities and control statistics over random instances.
fn kaspi_point(instances: usize, alphabet: usize, seed: u64) -> Outcome {
    if alphabet < 2 {
        return Err(CoreError::InvalidArgument("kaspi alphabet must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 3];
    let mut control_max: f64 = 0.0;
    let mut broken = 0;
    for _ in 0..instances {
        let mut k = || rng.gen_range(2..=alphabet);
        let (a1, b1, a2, b2, m1, m2) = (k(), k(), k(), k(), k(), k());
        let p1 = random_pair_pmf(&mut rng, a1, b1)?;
        let p2 = random_pair_pmf(&mut rng, a2, b2)?;
        let f = random_map(&mut rng, vec![a1, a2], m1)?;
        let g = random_map(&mut rng, vec![b1, b2, m1], m2)?;
        let r = kaspi_lemma_check(&p1, &p2, &f, &g)?;
        worst[0] = worst[0].max(r.first);
        worst[1] = worst[1].max(r.second);
        worst[2] = worst[2].max(r.third);
        let leaky = random_map(&mut rng, vec![b1, b2, m1, a2], m2)?;
        let c = kaspi_leaky_reply_check(&p1, &p2, &f, &leaky)?.max();
        control_max = control_max.max(c);
        broken += (c > 1e-3) as usize;
    }
    let share = if instances > 0 { Some(broken as f64 / instances as f64) } else { None };
    Ok(vec![
        Cell::Num(worst[0]),
        Cell::Num(worst[1]),
        Cell::Num(worst[2]),
        Cell::Num(control_max),
        Cell::opt(share),
    ])
}

fn read_file<T>(path: Option<&str>, parse: fn(&str) -> cascade_core::Result<T>) -> Result<T, CoreError> {
    let path = path.ok_or_else(|| CoreError::InvalidArgument("missing file path".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::InvalidArgument(format!("cannot read {path}: {e}")))?;
    parse(&text)
}

/// Run every sweep point and collect the table. Module errors become rows
/// with status `error` (or `infeasible`), never a missing row.
pub fn run_command(cfg: &RunConfig) -> ResultTable {
    let inputs = cfg.command.numeric_keys();
    let outputs = output_columns(cfg.command);
    let columns = inputs
        .iter()
        .map(|k| k.rsplit('.').next().unwrap().to_string())
        .chain(outputs.iter().map(|s| s.to_string()))
        .collect();
    let mut table = ResultTable::new(columns, provenance(cfg));

    // discrete inputs are read once per run
    let source: Option<Result<SourceSpec, CoreError>> = cfg
        .values
        .contains_key("source.file")
        .then(|| read_file(text_value(cfg, "source.file"), read_source));
    let aux: Option<Result<AuxiliarySystem, CoreError>> = cfg
        .values
        .contains_key("source.aux")
        .then(|| read_file(text_value(cfg, "source.aux"), read_aux));
    let mut warm: Option<AuxiliarySystem> = None;
    let derived: Vec<(&'static str, f64)> = match (&source, cfg.command) {
        (Some(Ok(src)), CommandKind::DiscreteSearch) => vec![("solver.u_size", (src.x_size() * src.y_size()) as f64)],
        _ => vec![],
    };

    for point in grid(&cfg.sweeps) {
        let p = Point {
            cfg,
            swept: point.iter().map(|(name, v)| (cfg.resolve(name), *v)).collect(),
            derived: &derived,
        };
        let echoed: Vec<Cell> = inputs
            .iter()
            .map(|k| match crate::config::key_spec(k).unwrap().kind {
                crate::config::Kind::Int => p.int(k).map_or(Cell::Empty, |v| Cell::Int(v as i64)),
                _ => Cell::opt(p.num(k)),
            })
            .collect();
        let result: Outcome = (|| -> Outcome {
            let src_ref = || -> Result<&SourceSpec, CoreError> {
                source.as_ref().expect("validated key").as_ref().map_err(Clone::clone)
            };
            let aux_ref = || -> Result<&AuxiliarySystem, CoreError> {
                aux.as_ref().expect("validated key").as_ref().map_err(Clone::clone)
            };
            match cfg.command {
                CommandKind::GaussianCascade => {
                    let q = GaussianQuery::cascade(p.f("query.d1"), p.f("query.d2"), p.f("query.r2"));
                    Ok(forward_cells(&cascade_min_r1(&gaussian_source(&p)?, &q)?))
                }
                CommandKind::GaussianTriangular => {
                    let q = GaussianQuery::triangular(p.f("query.d1"), p.f("query.d2"), p.f("query.r2"), p.f("query.r3"));
                    Ok(forward_cells(&triangular_min_r1(&gaussian_source(&p)?, &q)?))
                }
                CommandKind::GaussianTwoWay => {
                    let q = GaussianQuery::two_way(
                        p.f("query.d1"),
                        p.f("query.d2"),
                        p.f("query.d3"),
                        p.f("query.r2"),
                        p.f("query.r3"),
                        p.f("query.r4"),
                    );
                    let s = two_way_triangular_min_r1(&gaussian_source(&p)?, &q)?;
                    let mut cells = forward_cells(&s.forward);
                    cells.push(Cell::Num(s.r4_threshold));
                    Ok(cells)
                }
                CommandKind::GaussianExtended => {
                    let src = gaussian_source(&p)?;
                    let (dz1, dz2) = (p.f("query.dz1"), p.f("query.dz2"));
                    let b = extended_backward_achievability(&src, dz1, dz2, (p.f("query.r3"), p.f("query.r4")))?;
                    let a = b.achieved;
                    let check = extended_backward_region_check(&src, (a.r3, a.r4, a.r5), dz1, dz2)?;
                    Ok(vec![
                        Cell::Int(b.case_id as i64),
                        Cell::Num(a.r3),
                        Cell::Num(a.r4),
                        Cell::Num(a.r5),
                        Cell::Num(a.dz1),
                        Cell::Num(a.dz2),
                        Cell::Num(check.slacks.iter().copied().fold(f64::INFINITY, f64::min)),
                    ])
                }
                CommandKind::DiscreteEval => {
                    let net = Network::parse(p.text("solver.network").unwrap_or("cascade"))?;
                    let r = eval_point(net, src_ref()?, aux_ref()?)?;
                    Ok(vec![
                        Cell::Num(r.r1),
                        Cell::Num(r.r2),
                        Cell::opt(r.r3),
                        Cell::opt(r.r4),
                        Cell::opt(r.rh),
                        Cell::Num(r.d1),
                        Cell::Num(r.d2),
                        Cell::opt(r.d3),
                    ])
                }
                CommandKind::DiscreteSearch => {
                    let src = src_ref()?;
                    let mut opts = SearchOptions::new(p.int("solver.u_size").unwrap());
                    opts.seed = cfg.seed;
                    opts.restarts = p.int("solver.restarts").unwrap();
                    opts.max_iters = p.int("solver.max_iters").unwrap();
                    opts.tol = p.f("solver.tol");
                    opts.warm_start = warm.clone();
                    let out = min_r1_cascade_search(src, p.f("query.d1"), p.f("query.d2"), p.f("query.r2"), &opts)?;
                    warm = Some(out.aux.clone());
                    Ok(vec![
                        Cell::Num(out.r1),
                        Cell::Num(out.point.r2),
                        Cell::Num(out.point.d1),
                        Cell::Num(out.point.d2),
                        Cell::Text(start_name(out.start)),
                    ])
                }
                CommandKind::Simulate => {
                    let tp = TypicalityParams::new(p.f("sim.epsilon"), p.int("sim.n").unwrap())?;
                    let delta = p.f("sim.delta");
                    let trials = p.int("sim.trials").unwrap();
                    let r = run_simulation(src_ref()?, aux_ref()?, tp, delta, trials, cfg.seed)?;
                    eprint!("{}", r.summary());
                    eprintln!("seed = {}\n", cfg.seed);
                    let finite = |v: f64| Cell::opt(v.is_finite().then_some(v));
                    let mut cells = vec![
                        Cell::Int(cfg.seed as i64),
                        Cell::Num(r.rates.r_l),
                        Cell::Num(r.rates.r_10),
                        Cell::Num(r.rates.r_11),
                        Cell::Num(r.rates.r_2),
                        Cell::Int(r.sizes.l as i64),
                        Cell::Int(r.sizes.b10 as i64),
                        Cell::Int(r.sizes.m11 as i64),
                        Cell::Int(r.sizes.b2 as i64),
                    ];
                    cells.extend(r.event_rates.iter().map(|e| Cell::Num(e.mean)));
                    cells.push(Cell::Num(r.flagged as f64 / r.trials as f64));
                    for e in [r.d1, r.d2, r.d1_clean, r.d2_clean] {
                        cells.push(finite(e.mean));
                        cells.push(finite(e.half_width));
                    }
                    Ok(cells)
                }
                CommandKind::KaspiCheck => kaspi_point(
                    p.int("kaspi.instances").unwrap(),
                    p.int("kaspi.alphabet").unwrap(),
                    cfg.seed,
                ),
            }
        })();

        let width = outputs.len();
        match result {
            Ok(cells) => table.push(echoed.into_iter().chain(cells).collect(), Status::Ok, String::new()),
            Err(e) => {
                let status = match e {
                    CoreError::Infeasible { .. } | CoreError::NoFeasiblePointFound(_) => Status::Infeasible,
                    _ => Status::Error,
                };
                let mut cells = vec![Cell::Empty; width];
                if let (CoreError::Infeasible { threshold: Some(t), .. }, Some(i)) =
                    (&e, outputs.iter().position(|c| *c == "r2_threshold"))
                {
                    if !matches!(cfg.command, CommandKind::GaussianTwoWay) {
                        cells[i] = Cell::Num(*t);
                    }
                }
                table.push(echoed.into_iter().chain(cells).collect(), status, e.to_string());
            }
        }
    }
    table
}
