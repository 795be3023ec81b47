use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regstruct::numerics::{
    run_ladder, solve_phi4_2, toy_distribution, toy_limit, wick_constant, EtaProfile, LadderConfig, MollifierSpec,
    NumericsError, Phi4Options, Profile, SheOptions, ToyQuadrature, TorusGrid,
};
use regstruct::{
    check_subcriticality, generate_symbols, two_connectivity, weinberg_check, Character, CountertermConfig,
    CountertermError, DecoratedTree, Degree, EquationSpec, FeynmanGraph, Flavour, NoiseDegree, Poly, RenormEngine,
    TreePolynomial,
};
use serde::Deserialize;
use serde_json::json;

use crate::render::{csv_table, num, CliError, Outcome};

fn input_error(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn parse_degree(text: &str) -> Result<Degree, CliError> {
    text.parse::<Degree>().map_err(|e| CliError::Input(format!("bad degree `{text}`: {e}")))
}

fn numerics_error(e: NumericsError) -> CliError {
    match e {
        NumericsError::InvalidGrid(_) | NumericsError::InvalidMollifier(_) | NumericsError::InvalidConfig(_) => {
            CliError::Input(e.to_string())
        }
        other => CliError::Numerics(other.to_string()),
    }
}

pub fn symbols(input: &str, gamma: Option<&str>) -> Result<Outcome, CliError> {
    let mut spec = EquationSpec::from_json(input).map_err(input_error)?;
    if let Some(g) = gamma {
        spec.degree_cutoff = Some(parse_degree(g)?);
    }
    let sub = check_subcriticality(&spec);
    if !sub.subcritical {
        let diagnosis = match generate_symbols(&spec) {
            Err(e) => e.to_string(),
            Ok(_) => "rule closure does not terminate".to_string(),
        };
        let text = format!("# symbols for {}\nnon-subcritical: {diagnosis}\n", spec.name);
        let json = json!({
            "name": spec.name,
            "subcritical": false,
            "worst_shape_degree": sub.worst_shape_degree.to_string(),
            "noise_floor": sub.noise_floor.to_string(),
            "diagnosis": diagnosis,
        });
        let mut o = Outcome::new("symbols", text, json);
        o.exit_code = 2;
        return Ok(o);
    }
    let table = generate_symbols(&spec).map_err(input_error)?;
    let rows: Vec<serde_json::Value> = table
        .entries
        .iter()
        .map(|e| {
            json!({
                "tree": e.tree.to_string(),
                "degree": e.degree.to_string(),
                "const_part": e.degree.const_part.to_string(),
                "kappa_part": e.degree.kappa_part.to_string(),
                "solution": e.solution,
                "rhs": e.rhs,
                "negative_sector": e.in_negative_sector(),
            })
        })
        .collect();
    let json = json!({
        "name": table.spec_name,
        "cutoff": table.cutoff.to_string(),
        "subcritical": true,
        "worst_shape_degree": sub.worst_shape_degree.to_string(),
        "symbols": rows,
    });
    Ok(Outcome::new("symbols", table.to_text(), json).with_csv(table.to_csv()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RenormInput {
    /// Equation whose grading is used; the three-dimensional cubic model
    /// when absent.
    #[serde(default)]
    spec: Option<EquationSpec>,
    character: serde_json::Value,
    trees: Vec<DecoratedTree>,
    /// Number of random character pairs in the group-law check.
    #[serde(default = "default_checks")]
    group_law_checks: usize,
}

fn default_checks() -> usize {
    10
}

pub fn renorm(input: &str, seed: u64) -> Result<Outcome, CliError> {
    let cfg: RenormInput = serde_json::from_str(input).map_err(input_error)?;
    let spec = cfg.spec.unwrap_or_else(|| EquationSpec::cubic(3, NoiseDegree::White));
    let grading = spec.grading();
    let g = Character::from_json(&cfg.character.to_string()).map_err(input_error)?;
    g.validate(&grading).map_err(input_error)?;
    let engine = RenormEngine::new(grading.clone(), g.flavour());

    let mut text = String::new();
    let mut results = Vec::new();
    for t in &cfg.trees {
        let image = engine.act_on_tree(&g, t).map_err(input_error)?;
        let _ = writeln!(text, "M_g {t} = {image}");
        results.push(json!({ "tree": t.to_string(), "image": image.to_string() }));
    }

    // random characters on the negative sector of the equation
    let table = generate_symbols(&spec).map_err(input_error)?;
    let support: Vec<DecoratedTree> = table
        .entries
        .iter()
        .filter(|e| e.in_negative_sector() && e.tree.edge_count() > 0)
        .map(|e| e.tree.clone())
        .collect();
    let domain = engine.extraction_domain(&cfg.trees).map_err(input_error)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| {
        let mut c = Character::new(Flavour::Plain);
        for t in &support {
            c.set(t.clone(), Poly::rational(rng.gen_range(-6..=6), rng.gen_range(1..=4)));
        }
        c
    };
    let mut failures = Vec::new();
    if g.flavour() == Flavour::Plain {
        for _ in 0..cfg.group_law_checks {
            let f = random(&mut rng);
            let h = random(&mut rng);
            let fh = engine.compose(&f, &h, &domain).map_err(input_error)?;
            let h_inv = engine.invert(&h, &domain).map_err(input_error)?;
            for t in &cfg.trees {
                let mh = engine.act_on_tree(&h, t).map_err(input_error)?;
                if engine.renorm_map(&f, &mh).map_err(input_error)? != engine.act_on_tree(&fh, t).map_err(input_error)? {
                    failures.push(format!("composition on {t}"));
                }
                if engine.renorm_map(&h_inv, &mh).map_err(input_error)? != TreePolynomial::tree(t.clone()) {
                    failures.push(format!("inverse on {t}"));
                }
            }
        }
    }
    let status = if g.flavour() != Flavour::Plain {
        "skipped (extended character)".to_string()
    } else if failures.is_empty() {
        format!("PASS ({} random pairs, seed {seed})", cfg.group_law_checks)
    } else {
        format!("FAIL: {}", failures.join(", "))
    };
    let _ = writeln!(text, "group law: {status}");
    let json = json!({ "results": results, "group_law": status });
    let mut o = Outcome::new("renorm", text, json);
    if !failures.is_empty() {
        o.exit_code = 4;
    }
    Ok(o)
}

pub fn counterterm(input: &str, gamma: Option<&str>) -> Result<Outcome, CliError> {
    let cfg = CountertermConfig::from_json(input).map_err(input_error)?;
    let gamma = gamma.map(parse_degree).transpose()?;
    let ct = match cfg.run(gamma) {
        Ok(ct) => ct,
        Err(CountertermError::ResidualTerms(p)) => return Err(CliError::Residual(p.to_string())),
        Err(e) => return Err(input_error(e)),
    };
    let text = format!("counterterm: {}\nmultiple: {}\n{}\n", ct.survivors, ct.multiple, ct.dual_text());
    let dual: serde_json::Map<String, serde_json::Value> =
        ct.dual.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect();
    let json = json!({
        "counterterm": ct.survivors.to_string(),
        "multiple": ct.multiple.to_string(),
        "dual": dual,
    });
    Ok(Outcome::new("counterterm", text, json))
}

pub fn powercount(input: &str) -> Result<Outcome, CliError> {
    let g = FeynmanGraph::from_json(input).map_err(input_error)?;
    let report = weinberg_check(&g).map_err(input_error)?;
    let names: Vec<&str> = report.worst_subgraph.iter().map(|&v| g.vertex_name(v)).collect();
    let connected = two_connectivity(&g, true);
    let text = format!(
        "{}: {report}\nworst subgraph: {}\ntwo-connected without test edges: {}\n",
        g.name,
        names.join(", "),
        if connected { "yes" } else { "no" }
    );
    let json = json!({
        "name": g.name,
        "verdict": report.verdict(),
        "margin": report.margin.to_string(),
        "edge_sum": report.edge_sum.to_string(),
        "bound": report.bound.to_string(),
        "worst_subgraph": names,
        "two_connected": connected,
    });
    Ok(Outcome::new("powercount", text, json))
}

#[derive(Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
enum SimulateInput {
    /// Renormalised and naive solutions along a ladder of widths.
    Ladder(LadderConfig),
    /// A single solution of the cubic equation.
    Phi4 {
        grid: TorusGrid,
        mollifier: MollifierSpec,
        coupling: f64,
        #[serde(default = "yes")]
        renormalised: bool,
        #[serde(default)]
        options: Option<Phi4Options>,
    },
    /// Wick constants along a ladder of widths.
    Wick {
        grid: TorusGrid,
        profile: Profile,
        epsilons: Vec<f64>,
        #[serde(default)]
        options: Option<SheOptions>,
    },
}

fn yes() -> bool {
    true
}

pub fn simulate(input: &str, seed: Option<u64>, ladder: Option<Vec<f64>>) -> Result<Outcome, CliError> {
    let cfg: SimulateInput = serde_json::from_str(input).map_err(input_error)?;
    match cfg {
        SimulateInput::Ladder(mut c) => {
            if let Some(s) = seed {
                c.grid.seed = s;
            }
            if let Some(l) = ladder {
                c.epsilons = l;
            }
            simulate_ladder(&c)
        }
        SimulateInput::Phi4 { mut grid, mollifier, coupling, renormalised, options } => {
            if let Some(s) = seed {
                grid.seed = s;
            }
            if ladder.is_some() {
                return Err(CliError::Input("--epsilon-ladder does not apply to a single run".into()));
            }
            simulate_phi4(&grid, &mollifier, coupling, renormalised, &options.unwrap_or_default())
        }
        SimulateInput::Wick { mut grid, profile, mut epsilons, options } => {
            if let Some(s) = seed {
                grid.seed = s;
            }
            if let Some(l) = ladder {
                epsilons = l;
            }
            simulate_wick(&grid, profile, &epsilons, &options.unwrap_or_default())
        }
    }
}

fn simulate_ladder(c: &LadderConfig) -> Result<Outcome, CliError> {
    if c.epsilons.is_empty() || c.replicas == 0 {
        return Err(CliError::Input("the ladder needs at least one width and one replica".into()));
    }
    let report = run_ladder(c).map_err(numerics_error)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![num(r.epsilon), num(r.wick_constant), num(r.renormalised), num(r.naive)])
        .collect();
    let csv = csv_table(&["epsilon", "wick_constant", "renormalised", "naive"], &rows);
    let mut replicas = Vec::new();
    for r in &report.rows {
        for (i, (a, b)) in r.renormalised_per_replica.iter().zip(&r.naive_per_replica).enumerate() {
            replicas.push(vec![i.to_string(), num(r.epsilon), num(*a), num(*b)]);
        }
    }
    let mut text = String::from("epsilon  wick_constant  renormalised  naive\n");
    for r in &rows {
        let _ = writeln!(text, "{}", r.join("  "));
    }
    let list = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", ");
    let _ = writeln!(text, "renormalised gaps: [{}]", list(&report.renormalised_gaps));
    let _ = writeln!(text, "renormalised gap ratios: [{}]", list(&report.renormalised_gap_ratios));
    let _ = writeln!(text, "naive gaps: [{}]", list(&report.naive_gaps));
    let _ = writeln!(text, "naive drift monotone: {}", report.naive_monotone);
    let json = serde_json::to_value(&report).expect("report serialises");
    let mut o = Outcome::new("ladder", text, json).with_csv(csv);
    o.extra.push(("ladder_replicas.csv".into(), csv_table(&["replica", "epsilon", "renormalised", "naive"], &replicas)));
    Ok(o)
}

fn simulate_phi4(
    grid: &TorusGrid,
    moll: &MollifierSpec,
    coupling: f64,
    renormalised: bool,
    opts: &Phi4Options,
) -> Result<Outcome, CliError> {
    let test = vec![1.0; grid.size()];
    let run = solve_phi4_2(grid, moll, coupling, renormalised, opts, &test).map_err(numerics_error)?;
    let rows: Vec<Vec<String>> =
        run.samples.iter().map(|s| vec![num(s.time), num(s.pairing(&test)), num(s.sup_norm())]).collect();
    let csv = csv_table(&["time", "mean", "sup_norm"], &rows);
    let text = format!(
        "wick constant: {}\naveraged pairing: {}\nstep halvings: {}\nsamples: {}\n",
        num(run.wick_constant),
        num(run.averaged_pairing),
        run.step_halvings,
        run.samples.len()
    );
    let json = json!({
        "wick_constant": run.wick_constant,
        "averaged_pairing": run.averaged_pairing,
        "step_halvings": run.step_halvings,
        "renormalised": renormalised,
        "seed": grid.seed,
    });
    let mut field = String::new();
    if let Some(last) = run.samples.last() {
        field = csv_table(&["index", "value"], &last.values.iter().enumerate().map(|(i, v)| vec![i.to_string(), num(*v)]).collect::<Vec<_>>());
    }
    let mut o = Outcome::new("phi4", text, json).with_csv(csv);
    o.extra.push(("phi4_final_field.csv".into(), field));
    Ok(o)
}

fn simulate_wick(grid: &TorusGrid, profile: Profile, epsilons: &[f64], opts: &SheOptions) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &eps in epsilons {
        let c = wick_constant(grid, &MollifierSpec::new(profile, eps), opts).map_err(numerics_error)?;
        rows.push(vec![num(eps), num((1.0 / eps).ln()), num(c)]);
        values.push(json!({ "epsilon": eps, "wick_constant": c }));
    }
    let csv = csv_table(&["epsilon", "log_inverse_epsilon", "wick_constant"], &rows);
    let mut text = String::from("epsilon  log(1/epsilon)  wick_constant\n");
    for r in &rows {
        let _ = writeln!(text, "{}", r.join("  "));
    }
    Ok(Outcome::new("wick", text, json!({ "values": values })).with_csv(csv))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TestFunction {
    /// `exp(-((x - center)/width)²)`.
    Gaussian {
        #[serde(default)]
        center: f64,
        #[serde(default = "unit")]
        width: f64,
    },
    /// Smooth bump supported on `|x - center| < radius`.
    Bump { center: f64, radius: f64 },
}

fn unit() -> f64 {
    1.0
}

impl TestFunction {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Gaussian { center, width } => (-((x - center) / width).powi(2)).exp(),
            TestFunction::Bump { center, radius } => {
                let y = (x - center) / radius;
                if y.abs() < 1.0 {
                    (-1.0 / (1.0 - y * y)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    fn reach(&self) -> f64 {
        match *self {
            TestFunction::Gaussian { center, width } => center.abs() + 8.0 * width,
            TestFunction::Bump { center, radius } => center.abs() + radius,
        }
    }
}

#[derive(Deserialize)]
struct ToyInput {
    #[serde(default = "all_etas")]
    etas: Vec<EtaProfile>,
    epsilons: Vec<f64>,
    hat_c: [f64; 2],
    test_function: TestFunction,
}

fn all_etas() -> Vec<EtaProfile> {
    EtaProfile::ALL.to_vec()
}

pub fn toy_dist(input: &str, ladder: Option<Vec<f64>>) -> Result<Outcome, CliError> {
    let mut cfg: ToyInput = serde_json::from_str(input).map_err(input_error)?;
    if let Some(l) = ladder {
        cfg.epsilons = l;
    }
    let quad = ToyQuadrature { tail_cutoff: cfg.test_function.reach().max(2.0), ..ToyQuadrature::default() };
    let phi = |x: f64| cfg.test_function.eval(x);
    let limit = toy_limit(cfg.hat_c, &phi, &quad).map_err(numerics_error)?;
    let h = 1e-3;
    let shifted = |d: f64| toy_limit([cfg.hat_c[0], cfg.hat_c[1] + d], &phi, &quad);
    let derivative = (shifted(h).map_err(numerics_error)? - shifted(-h).map_err(numerics_error)?) / (2.0 * h);

    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut text = format!("limit: {}\nd limit / d hat_c2: {} (-phi(0) = {})\n", num(limit), num(derivative), num(-phi(0.0)));
    text.push_str("eta  epsilon  value  error\n");
    for &eta in &cfg.etas {
        for &eps in &cfg.epsilons {
            let v = toy_distribution(eta, eps, cfg.hat_c, &phi, &quad).map_err(numerics_error)?;
            let name = serde_json::to_value(eta).expect("profile names serialise");
            let name = name.as_str().unwrap_or_default().to_string();
            let _ = writeln!(text, "{name}  {}  {}  {}", num(eps), num(v), num(v - limit));
            values.push(json!({ "eta": name, "epsilon": eps, "value": v, "error": v - limit }));
            rows.push(vec![name, num(eps), num(v), num(limit), num(v - limit)]);
        }
    }
    let csv = csv_table(&["eta", "epsilon", "value", "limit", "error"], &rows);
    let json = json!({
        "limit": limit,
        "derivative_in_hat_c2": derivative,
        "phi_at_zero": phi(0.0),
        "values": values,
    });
    Ok(Outcome::new("toy", text, json).with_csv(csv))
}
