//! Command-line front end: instance generation, serialization, theorem
//! verification, the d=2 classification, slope reports, and distributivity
//! checks. Exit codes: 0 success, 1 a requested conclusion failed, 2 input
//! or usage error.

mod formats;

use clap::{Parser, Subcommand, ValueEnum};
use formats::{EigenDataFile, FormatError, ModuleFile, SubjectFile};
use plectic::quadratic::{
    find_structure_preserving_isos, make_tensor_lambda, IntertwinerVerdict, QuadraticError,
    QuadraticStructure,
};
use plectic::theorems::{
    phi_stability_check, strictness_check, theorem_main_verify, xs_decomposition, Report,
    RootChoice,
};
use plectic::{
    format_rat, is_distributive, is_prime, parse_rat, random_rank2, slope_report, tensor_induce,
    valuation_of, PlecticModule, Rank2FPhi, Rank2GenOptions, Rat, RootPair, SubsetIndex,
    Valuation, WeightData, DEFAULT_CLOSURE_CAP,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "plectic", version, about = "Exact verifiers for plectic filtered phi-modules")]
struct Cli {
    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded tensor-induced module file (with a bilinear form
    /// and factor data when d = 2).
    Generate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a theorem on a module file.
    Check {
        file: PathBuf,
        #[arg(long)]
        theorem: TheoremKind,
        /// Subset S as 1-based place indices, e.g. --S 1,2
        #[arg(long = "S", value_delimiter = ',')]
        s: Vec<u8>,
        /// Chosen roots; see each theorem's expectations.
        #[arg(long, value_delimiter = ',')]
        roots: Vec<String>,
        /// Subset T for the strictness check (may be empty).
        #[arg(long = "T", value_delimiter = ',')]
        t: Vec<u8>,
        /// Distinguished place j (1-based) for the stability check.
        #[arg(long)]
        j: Option<u8>,
    },
    /// Compute the X(S)-line decomposition for a full root map.
    Decompose {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        roots: Vec<String>,
    },
    /// Classify structure-preserving isomorphisms between two d=2 modules
    /// carrying bilinear forms.
    Classify2 { source: PathBuf, target: PathBuf },
    /// Slope and hypothesis report for Hecke eigenvalue records.
    Slopes { file: PathBuf },
    /// Lattice-closure distributivity check for a module or a bare
    /// generator family.
    Distributivity {
        file: PathBuf,
        /// Override the lattice-closure cap (also: PLECTIC_CLOSURE_CAP).
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremKind {
    /// Simultaneous-eigenspace splitting (needs --S and --roots).
    Main,
    /// X(S)-decomposition (needs --roots, one per place).
    Xs,
    /// Filtration stability under the other operators (needs --j and
    /// --roots as alpha,beta pairs for each place i != j, ascending i).
    Stability,
    /// Filtered-quotient strictness (needs --S, --roots and --T).
    Strictness,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

fn run(cli: &Cli) -> Result<u8, FormatError> {
    match &cli.cmd {
        Cmd::Generate { d, p, seed, out } => cmd_generate(cli, *d, *p, *seed, out),
        Cmd::Check { file, theorem, s, roots, t, j } => {
            cmd_check(cli, file, *theorem, s, roots, t, *j)
        }
        Cmd::Decompose { file, roots } => {
            let (module, _) = load_module(file)?;
            run_xs(cli, &module, roots)
        }
        Cmd::Classify2 { source, target } => cmd_classify2(cli, source, target),
        Cmd::Slopes { file } => cmd_slopes(cli, file),
        Cmd::Distributivity { file, cap } => cmd_distributivity(cli, file, *cap),
    }
}

// ---------------------------------------------------------------- generate

fn generation_weights(d: usize, seed: u64) -> Vec<(i64, i64)> {
    // motivic weight 4 throughout: k in {2, 4}, t = (4 - k) / 2
    (0..d)
        .map(|i| {
            let k = if (seed >> i) & 1 == 0 { 2 } else { 4 };
            (k, (4 - k) / 2)
        })
        .collect()
}

fn generate_module(
    d: usize,
    p: u64,
    seed: u64,
) -> Result<(PlecticModule, Vec<Rank2FPhi>), FormatError> {
    let factors: Vec<Rank2FPhi> = generation_weights(d, seed)
        .iter()
        .enumerate()
        .map(|(i, &(k, t))| {
            random_rank2(
                seed.wrapping_mul(1000).wrapping_add(i as u64),
                p,
                k,
                t,
                Rank2GenOptions { self_dual: true, ..Default::default() },
            )
        })
        .collect();
    let module = tensor_induce(&factors).map_err(|e| FormatError(e.to_string()))?;
    Ok((module, factors))
}

fn cmd_generate(cli: &Cli, d: usize, p: u64, seed: u64, out: &Path) -> Result<u8, FormatError> {
    if !(1..=8).contains(&d) {
        return fail(format!("--d must lie in [1, 8], got {d}"));
    }
    if !is_prime(p) {
        return fail(format!("--p must be prime, got {p}"));
    }
    let (module, factors) = generate_module(d, p, seed)?;
    let lambda = if d == 2 {
        Some(make_tensor_lambda(&factors).map_err(|e| FormatError(e.to_string()))?)
    } else {
        None
    };
    let file = ModuleFile::from_module(
        &module,
        lambda.as_ref(),
        Some(&factors),
        Some(format!("generated: d={d} p={p} seed={seed}")),
    );
    let body = serde_json::to_string_pretty(&file).map_err(|e| FormatError(e.to_string()))?;
    std::fs::write(out, body + "\n").map_err(|e| FormatError(e.to_string()))?;
    if cli.json {
        println!(
            "{}",
            json!({ "written": out.display().to_string(), "d": d, "p": p, "seed": seed,
                    "dimension": module.dim(), "lambda": d == 2 })
        );
    } else {
        println!("wrote {} (d={d}, p={p}, dimension {})", out.display(), module.dim());
    }
    Ok(0)
}

// ------------------------------------------------------------------- check

fn load_module(
    path: &Path,
) -> Result<(PlecticModule, Option<QuadraticStructure>), FormatError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| FormatError(format!("{}: {e}", path.display())))?;
    let file: ModuleFile = serde_json::from_str(&body)
        .map_err(|e| FormatError(format!("{}: {e}", path.display())))?;
    let (module, lambda) = file.to_module()?;
    // factor data, when present, must reproduce the module exactly
    if let Some(factors) = file.parsed_factors()? {
        let rebuilt = tensor_induce(&factors).map_err(|e| FormatError(e.to_string()))?;
        if rebuilt != module {
            return fail(format!(
                "{}: factor data does not rebuild the stored module",
                path.display()
            ));
        }
    }
    Ok((module, lambda))
}

fn parse_roots(roots: &[String]) -> Result<Vec<Rat>, FormatError> {
    roots.iter().map(|s| parse_rat(s).map_err(|e| FormatError(e.to_string()))).collect()
}

fn subset_from(d: usize, elements: &[u8]) -> Result<SubsetIndex, FormatError> {
    for &i in elements {
        if i == 0 || i as usize > d {
            return fail(format!("place index {i} out of range for d={d}"));
        }
    }
    Ok(SubsetIndex::from_elements(d as u8, elements))
}

fn require_eigenvalue(m: &PlecticModule, i: usize, root: &Rat) -> Result<(), FormatError> {
    if !m.is_eigenvalue(i, root) {
        return fail(format!("{} is not an eigenvalue of phi_{}", format_rat(root), i + 1));
    }
    Ok(())
}

fn emit_report(cli: &Cli, command: &str, report: &Report) -> u8 {
    if cli.json {
        let checks: Vec<serde_json::Value> = report
            .checks
            .iter()
            .map(|c| {
                json!({
                    "check_id": c.id,
                    "hypothesis_ok": c.hypothesis_ok,
                    "conclusion_ok": c.conclusion_ok,
                    "witness": c.witness,
                })
            })
            .collect();
        println!(
            "{}",
            json!({
                "command": command,
                "checks": checks,
                "all_conclusions_hold": report.all_conclusions_hold(),
                "all_hypotheses_hold": report.all_hypotheses_hold(),
            })
        );
    } else {
        print!("{report}");
        println!(
            "=> {}",
            if report.all_conclusions_hold() { "all conclusions hold" } else { "FAILED" }
        );
    }
    u8::from(!report.all_conclusions_hold())
}

fn cmd_check(
    cli: &Cli,
    file: &Path,
    theorem: TheoremKind,
    s: &[u8],
    roots: &[String],
    t: &[u8],
    j: Option<u8>,
) -> Result<u8, FormatError> {
    let (module, _) = load_module(file)?;
    let d = module.d();
    match theorem {
        TheoremKind::Main | TheoremKind::Strictness => {
            let subset = subset_from(d, s)?;
            let parsed = parse_roots(roots)?;
            if parsed.len() != subset.len() {
                return fail(format!("--roots must give {} value(s) for S={subset}", subset.len()));
            }
            let pairs: Vec<(usize, Rat)> = subset
                .elements()
                .iter()
                .zip(parsed)
                .map(|(&i, r)| (i as usize - 1, r))
                .collect();
            for (i, r) in &pairs {
                require_eigenvalue(&module, *i, r)?;
            }
            let rc = RootChoice::new(subset, pairs).map_err(|e| FormatError(e.to_string()))?;
            if theorem == TheoremKind::Main {
                let report = theorem_main_verify(&module, &rc);
                Ok(emit_report(cli, "check.main", &report))
            } else {
                let subset_t = subset_from(d, t)?;
                let outcome = strictness_check(&module, &rc, &subset_t);
                let mut report = Report::default();
                report.push(
                    format!("strictness.injective[S={}, T={subset_t}]", rc.s()),
                    None,
                    outcome.injective,
                );
                report.push(
                    format!("strictness.surjective[S={}, T={subset_t}]", rc.s()),
                    None,
                    outcome.surjective,
                );
                Ok(emit_report(cli, "check.strictness", &report))
            }
        }
        TheoremKind::Xs => run_xs(cli, &module, roots),
        TheoremKind::Stability => {
            let Some(j) = j else {
                return fail("--j is required for the stability check");
            };
            if j == 0 || j as usize > d {
                return fail(format!("--j={j} out of range for d={d}"));
            }
            let j = j as usize - 1;
            let parsed = parse_roots(roots)?;
            if parsed.len() != 2 * (d - 1) {
                return fail(format!(
                    "--roots must give alpha,beta pairs for the {} places other than j",
                    d - 1
                ));
            }
            let mut map = BTreeMap::new();
            let mut it = parsed.into_iter();
            for i in (0..d).filter(|&i| i != j) {
                let alpha = it.next().unwrap();
                let beta = it.next().unwrap();
                require_eigenvalue(&module, i, &alpha)?;
                require_eigenvalue(&module, i, &beta)?;
                map.insert(i, RootPair::new(alpha, beta).map_err(|e| FormatError(e.to_string()))?);
            }
            let report =
                phi_stability_check(&module, j, &map).map_err(|e| FormatError(e.to_string()))?;
            Ok(emit_report(cli, "check.stability", &report.to_report()))
        }
    }
}

fn run_xs(cli: &Cli, module: &PlecticModule, roots: &[String]) -> Result<u8, FormatError> {
    let parsed = parse_roots(roots)?;
    if parsed.len() != module.d() {
        return fail(format!("--roots must give one root per place ({} values)", module.d()));
    }
    for (i, r) in parsed.iter().enumerate() {
        require_eigenvalue(module, i, r)?;
    }
    let report = xs_decomposition(module, &parsed).map_err(|e| FormatError(e.to_string()))?;
    if !cli.json {
        for (s, line) in &report.lines {
            println!("X({s}) = {line}");
        }
    }
    Ok(emit_report(cli, "check.xs", &report.to_report()))
}

// --------------------------------------------------------------- classify2

fn cmd_classify2(cli: &Cli, source: &Path, target: &Path) -> Result<u8, FormatError> {
    let (src, src_lambda) = load_module(source)?;
    let (tgt, tgt_lambda) = load_module(target)?;
    if src.d() != 2 || tgt.d() != 2 {
        return fail("classify2 requires d = 2 modules");
    }
    let (Some(ls), Some(lt)) = (src_lambda, tgt_lambda) else {
        return fail("classify2 requires a lambda form on both modules");
    };
    let classes = match find_structure_preserving_isos((&src, &ls), (&tgt, &lt)) {
        Ok(cs) => cs,
        Err(e @ QuadraticError::UnsupportedDegeneracy) => return fail(e.to_string()),
        Err(e) => return fail(e.to_string()),
    };
    if cli.json {
        let out: Vec<serde_json::Value> = classes
            .iter()
            .map(|c| {
                let verdict = match &c.verdict {
                    IntertwinerVerdict::Plectic => json!({"kind": "plectic"}),
                    IntertwinerVerdict::AntiPlectic(xi) => {
                        json!({"kind": "anti-plectic", "xi": format_rat(xi)})
                    }
                    IntertwinerVerdict::Incompatible => json!({"kind": "incompatible"}),
                };
                json!({
                    "verdict": verdict,
                    "filtrations": c.filtration.to_string(),
                    "lambda_scale": format_rat(&c.lambda_scale),
                    "witness": formats::matrix_to_strings(&c.witness),
                })
            })
            .collect();
        println!("{}", json!({ "command": "classify2", "classes": out }));
    } else {
        if classes.is_empty() {
            println!("no structure-preserving isomorphisms found");
        }
        for (idx, c) in classes.iter().enumerate() {
            println!(
                "class {}: {} ({}), lambda scale {}",
                idx + 1,
                c.verdict,
                c.filtration,
                format_rat(&c.lambda_scale)
            );
            print!("{}", c.witness);
        }
    }
    Ok(0)
}

// ------------------------------------------------------------------ slopes

fn cmd_slopes(cli: &Cli, file: &Path) -> Result<u8, FormatError> {
    let body = std::fs::read_to_string(file)
        .map_err(|e| FormatError(format!("{}: {e}", file.display())))?;
    let data: EigenDataFile = serde_json::from_str(&body)
        .map_err(|e| FormatError(format!("{}: {e}", file.display())))?;
    data.validate()?;
    let mut out_records = Vec::new();
    for rec in &data.records {
        let d = rec.primes.len();
        let weight = WeightData::new(
            rec.p,
            rec.primes.iter().map(|e| e.k).collect(),
            rec.primes.iter().map(|e| e.t).collect(),
        )
        .map_err(|e| FormatError(e.to_string()))?;
        let mut places = Vec::new();
        let mut pairs = Vec::new();
        let mut main_hyp_all = true;
        for (i, pe) in rec.primes.iter().enumerate() {
            let alpha = parse_rat(&pe.alpha).map_err(|e| FormatError(e.to_string()))?;
            let beta = parse_rat(&pe.beta).map_err(|e| FormatError(e.to_string()))?;
            let ra = slope_report(&alpha, i, &weight).map_err(|e| FormatError(e.to_string()))?;
            let rb = slope_report(&beta, i, &weight).map_err(|e| FormatError(e.to_string()))?;
            let va = valuation_of(&alpha, rec.p).map_err(|e| FormatError(e.to_string()))?;
            let vb = valuation_of(&beta, rec.p).map_err(|e| FormatError(e.to_string()))?;
            let symmetric = match (va, vb) {
                (Valuation::Finite(a), Valuation::Finite(b)) => a + b == 2 * pe.t + pe.k + 1,
                _ => false,
            };
            let distinct = alpha != beta;
            let place_hyp = distinct && (ra.strictly_small || rb.strictly_small);
            main_hyp_all &= place_hyp;
            places.push(json!({
                "place": i + 1,
                "k": pe.k,
                "t": pe.t,
                "v_alpha": va.to_string(),
                "v_beta": vb.to_string(),
                "strictly_small": [ra.strictly_small, rb.strictly_small],
                "weil_interval": [ra.in_weil_interval, rb.in_weil_interval],
                "slope_symmetric": symmetric,
                "distinct_roots": distinct,
                "splitting_hypothesis": place_hyp,
            }));
            pairs.push((alpha, beta));
        }
        let mut record_json = json!({
            "label": rec.label,
            "p": rec.p,
            "places": places,
            "splitting_hypotheses_all_places": main_hyp_all,
        });
        if d == 2 {
            let (a1, b1) = pairs[0].clone();
            let (a2, b2) = pairs[1].clone();
            let products = [&a1 * &a2, &a1 * &b2, &b1 * &a2, &b1 * &b2];
            let mut uniq: Vec<&Rat> = products.iter().collect();
            uniq.sort();
            uniq.dedup();
            let distinct_count = uniq.len();
            let pw1 = plectic::p_power(rec.p, weight.w() + 1);
            let trivial_character = (&a1 * &b1) == pw1 && (&a2 * &b2) == pw1;
            let some_small = pairs.iter().enumerate().any(|(i, (a, b))| {
                slope_report(a, i, &weight).map(|r| r.strictly_small).unwrap_or(false)
                    || slope_report(b, i, &weight).map(|r| r.strictly_small).unwrap_or(false)
            });
            // unique plectic class route: trivial character, a strictly
            // small root somewhere, four distinct products
            let unique_class = trivial_character && some_small && distinct_count == 4;
            // base-change route: equal root sets, equal k, three distinct
            // products, distinct roots with a non-sign ratio
            let same_sets = {
                let mut s1 = vec![a1.clone(), b1.clone()];
                let mut s2 = vec![a2.clone(), b2.clone()];
                s1.sort();
                s2.sort();
                s1 == s2
            };
            let ratio_not_sign = {
                let r = &a1 / &b1;
                r != plectic::rat_int(1) && r != plectic::rat_int(-1)
            };
            let base_change = same_sets
                && rec.primes[0].k == rec.primes[1].k
                && distinct_count == 3
                && a1 != b1
                && some_small
                && ratio_not_sign;
            record_json["products_distinct_count"] = json!(distinct_count);
            record_json["trivial_character_shape"] = json!(trivial_character);
            record_json["hypotheses_unique_class"] = json!(unique_class);
            record_json["hypotheses_base_change"] = json!(base_change);
        }
        out_records.push(record_json);
    }
    if cli.json {
        println!("{}", json!({ "command": "slopes", "records": out_records }));
    } else {
        for rec in &out_records {
            println!("record {}", rec["label"]);
            for place in rec["places"].as_array().unwrap() {
                println!(
                    "  place {}: v(alpha)={} v(beta)={} strictly_small={} weil={} symmetric={} distinct={}",
                    place["place"],
                    place["v_alpha"],
                    place["v_beta"],
                    place["strictly_small"],
                    place["weil_interval"],
                    place["slope_symmetric"],
                    place["distinct_roots"],
                );
            }
            if let Some(c) = rec.get("products_distinct_count") {
                println!(
                    "  products distinct: {c}; splitting hypotheses: {}; unique-class hypotheses: {}; base-change hypotheses: {}",
                    rec["splitting_hypotheses_all_places"],
                    rec["hypotheses_unique_class"],
                    rec["hypotheses_base_change"],
                );
            } else {
                println!(
                    "  splitting hypotheses at all places: {}",
                    rec["splitting_hypotheses_all_places"]
                );
            }
        }
    }
    Ok(0)
}

// --------------------------------------------------------- distributivity

fn closure_cap(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("PLECTIC_CLOSURE_CAP").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_CLOSURE_CAP)
}

fn cmd_distributivity(cli: &Cli, file: &Path, cap: Option<usize>) -> Result<u8, FormatError> {
    let body = std::fs::read_to_string(file)
        .map_err(|e| FormatError(format!("{}: {e}", file.display())))?;
    let subject: SubjectFile = serde_json::from_str(&body)
        .map_err(|e| FormatError(format!("{}: {e}", file.display())))?;
    let generators = match &subject {
        SubjectFile::Module(mf) => {
            let (module, _) = mf.to_module()?;
            module.fil_steps().to_vec()
        }
        SubjectFile::Filtration(ff) => ff.to_generators()?,
    };
    let filtration =
        plectic::WeakIFiltration::build(generators).map_err(|e| FormatError(e.to_string()))?;
    let report =
        is_distributive(&filtration, closure_cap(cap)).map_err(|e| FormatError(e.to_string()))?;
    if cli.json {
        let witness = report
            .witness
            .as_ref()
            .map(|(a, b, c)| json!([a.to_string(), b.to_string(), c.to_string()]));
        println!(
            "{}",
            json!({ "command": "distributivity", "distributive": report.distributive,
                    "witness": witness })
        );
    } else if report.distributive {
        println!("distributive: yes");
    } else {
        let (a, b, c) = report.witness.as_ref().unwrap();
        println!("distributive: NO");
        println!("witness A = {a}");
        println!("witness B = {b}");
        println!("witness C = {c}");
    }
    Ok(u8::from(!report.distributive))
}
