use std::path::Path;

use serde_json::{json, Value};
use xfam::exact::format_rational;
use xfam::extremal::{
    block_family, bound_main, bound_nonuniform, bound_single, bound_uniform, scatter_family, BoundReport, FamilyRole,
};
use xfam::nip::{nip_cross, nip_single, reduce_cross_to_extremal, reduce_single_to_extremal, NipReport, Trace};
use xfam::oracle::{exhaustive_max_with, Guard, Objective, Restriction, SearchOptions, SearchSpec};
use xfam::props::{is_cross_t_intersecting, is_shifted, is_t_intersecting, meet_floor, shift_family, shift_to_fixpoint};
use xfam::{CrossInstance, Error, Family, MeasureTable};

use crate::output::{self, set_string, Format, Report};
use crate::{
    BoundArgs, BoundMode, Cli, Command, ConstructArgs, ConstructKind, FilesArgs, ObjectiveArg, ReplayArgs,
    RestrictionArg, SearchArgs, SearchMode, ShiftArgs, SweepArgs, SweepMode,
};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::ResourceGuard(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome = Result<Report, Failure>;

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let (report, code) = match &cli.command {
        Command::Bound(a) => (bound(a)?, 0),
        Command::Construct(a) => (construct(a)?, 0),
        Command::Check(a) => check(a)?,
        Command::Nip(a) => (nip(a)?, 0),
        Command::Shift(a) => (shift(a)?, 0),
        Command::Replay(a) => (replay(a)?, 0),
        Command::Search(a) => (search(a)?, 0),
        Command::Sweep(a) => (sweep(a)?, 0),
    };
    let default = match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Json,
    };
    let text = report.render(cli.format.unwrap_or(default));
    output::write(&text, cli.output.as_deref())
        .map_err(|e| usage(format!("cannot write output: {e}")))?;
    Ok(code)
}

fn read_family(path: &Path) -> Result<Family, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Family::from_json_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_families(paths: &[std::path::PathBuf]) -> Result<Vec<Family>, Failure> {
    let families = paths.iter().map(|p| read_family(p)).collect::<Result<Vec<_>, _>>()?;
    let n = families[0].n();
    if let Some((p, f)) = paths.iter().zip(&families).find(|(_, f)| f.n() != n) {
        return Err(usage(format!("{}: ground set n = {} differs from n = {n}", p.display(), f.n())));
    }
    Ok(families)
}

fn parse_measure(spec: &str, n: usize) -> Result<MeasureTable, Failure> {
    let mu = match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            MeasureTable::from_json_str(&text).map_err(|e| usage(format!("{path}: {e}")))?
        }
        None => MeasureTable::from_spec(spec, n)?,
    };
    if mu.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.n(),
        }
        .into());
    }
    Ok(mu)
}

/// One measure per family: none means counting, one is shared by all.
fn measures_for(specs: &[String], n: usize, r: usize) -> Result<Vec<MeasureTable>, Failure> {
    match specs.len() {
        0 => Ok(vec![MeasureTable::counting(n); r]),
        1 => Ok(vec![parse_measure(&specs[0], n)?; r]),
        m if m == r => specs.iter().map(|s| parse_measure(s, n)).collect(),
        m => Err(usage(format!("{m} measures given for {r} families"))),
    }
}

fn need(v: Option<usize>, flag: &str, mode: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| usage(format!("{mode} needs {flag}")))
}

fn families_json(fs: &[Family]) -> Value {
    Value::Array(fs.iter().map(Family::to_json_value).collect())
}

fn family_rows(fs: &[Family]) -> Vec<Vec<String>> {
    fs.iter()
        .enumerate()
        .flat_map(|(j, f)| f.to_sets().into_iter().map(move |s| vec![(j + 1).to_string(), set_string(&s)]))
        .collect()
}

fn family_human(fs: &[Family]) -> String {
    fs.iter()
        .enumerate()
        .map(|(j, f)| {
            let sets: Vec<String> = f.to_sets().iter().map(|s| set_string(s)).collect();
            format!("family {} (n = {}, {} sets): {}", j + 1, f.n(), f.len(), sets.join(" "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn bound_report(mode: &str, report: &BoundReport) -> Report {
    let mut json = report.to_json_value();
    json["mode"] = json!(mode);
    let value = format_rational(&report.value);
    let rows = report
        .argmax
        .iter()
        .map(|m| vec![value.clone(), m.role.to_string(), m.a.to_string()])
        .collect();
    let pairs: Vec<String> = report.argmax.iter().map(|m| format!("(ℓ={}, a={})", m.role, m.a)).collect();
    Report {
        json,
        header: vec!["value", "role", "a"],
        rows,
        human: format!("value {value}\nattained at {}", pairs.join(" ")),
    }
}

fn bound(a: &BoundArgs) -> Outcome {
    let n = a.n;
    match a.mode {
        BoundMode::Uniform => {
            let k = need(a.k, "-k", "uniform mode")?;
            let r = need(a.r, "-r", "uniform mode")?;
            let t = need(a.t, "-t", "uniform mode")?;
            Ok(bound_report("uniform", &bound_uniform(n, k, r, t)?))
        }
        BoundMode::Nonuniform => {
            let r = need(a.r, "-r", "nonuniform mode")?;
            let t = need(a.t, "-t", "nonuniform mode")?;
            Ok(bound_report("nonuniform", &bound_nonuniform(n, r, t)?))
        }
        BoundMode::Main => {
            let caps = a.caps.clone().ok_or_else(|| usage("main mode needs --caps"))?;
            let r = caps.len();
            if a.r.is_some_and(|x| x != r) {
                return Err(usage(format!("-r {} disagrees with {r} caps", a.r.unwrap_or(0))));
            }
            let t = a.t.unwrap_or(1);
            let measures = measures_for(&a.measure, n, r)?;
            let ks = match &a.ks {
                Some(ks) if ks.len() == r => ks.clone(),
                Some(ks) => return Err(usage(format!("{} window starts for {r} families", ks.len()))),
                None => measures.iter().map(|m| m.window().map_or(1, |w| w.0)).collect(),
            };
            let roles: Vec<FamilyRole> = (0..r)
                .map(|j| FamilyRole::new(ks[j], caps[j], measures[j].clone()))
                .collect();
            Ok(bound_report("main", &bound_main(n, t, &roles)?))
        }
        BoundMode::Single => {
            let khat = need(a.khat, "--khat", "single mode")?;
            let mu = measures_for(&a.measure, n, 1)?.remove(0);
            let k = a.k.unwrap_or_else(|| mu.window().map_or(1, |w| w.0));
            let value = format_rational(&bound_single(n, k, khat, &mu)?);
            Ok(Report {
                json: json!({
                    "mode": "single",
                    "value": value,
                    "n": n,
                    "k": k,
                    "khat": khat,
                    "measure": mu.to_json_value(),
                }),
                header: vec!["value", "n", "k", "khat"],
                rows: vec![vec![value.clone(), n.to_string(), k.to_string(), khat.to_string()]],
                human: format!("value {value}"),
            })
        }
    }
}

fn construct(a: &ConstructArgs) -> Outcome {
    let mut f = match a.kind {
        ConstructKind::Scatter => {
            let t = a.t.ok_or_else(|| usage("scatter needs -t"))?;
            scatter_family(a.n, a.a, t)?
        }
        ConstructKind::Block => {
            if a.t.is_some() {
                return Err(usage("block takes no -t"));
            }
            block_family(a.n, a.a)?
        }
    };
    if let Some(cap) = a.max_size {
        if cap > a.n {
            return Err(Error::Param(format!("--max-size {cap} exceeds n = {}", a.n)).into());
        }
        f = f.slice(0, cap)?;
    }
    let fs = [f];
    Ok(Report {
        json: fs[0].to_json_value(),
        header: vec!["family", "set"],
        rows: family_rows(&fs),
        human: family_human(&fs),
    })
}

fn check(a: &FilesArgs) -> Result<(Report, u8), Failure> {
    let families = read_families(&a.files)?;
    let t = a.t.unwrap_or(1);
    if t == 0 {
        return Err(usage("-t must be at least 1"));
    }
    let (property, holds) = if families.len() == 1 {
        ("t-intersecting", is_t_intersecting(&families[0], t))
    } else {
        ("cross-t-intersecting", is_cross_t_intersecting(&families, t))
    };
    let smallest = if families.len() == 1 {
        meet_floor(&[families[0].clone(), families[0].clone()])?
    } else {
        meet_floor(&families)?
    }
    .iter()
    .map(|m| m.count_ones() as usize)
    .min();
    let json = json!({
        "property": property,
        "t": t,
        "r": families.len(),
        "holds": holds,
        "min_meet_size": smallest,
        "shifted": families.iter().map(is_shifted).collect::<Vec<_>>(),
    });
    let report = Report {
        json,
        header: vec!["property", "t", "r", "holds"],
        rows: vec![vec![property.into(), t.to_string(), families.len().to_string(), holds.to_string()]],
        human: format!("{property} (t = {t}): {}", if holds { "holds" } else { "fails" }),
    };
    Ok((report, if holds { 0 } else { 1 }))
}

fn nip_report(rep: &NipReport) -> Report {
    let points: Vec<String> = rep.points.iter().map(usize::to_string).collect();
    let max = rep.max_point.map_or_else(|| "none".to_string(), |a| a.to_string());
    Report {
        json: rep.to_json_value(),
        header: vec!["point", "maximal"],
        rows: rep
            .points
            .iter()
            .map(|&p| vec![p.to_string(), (Some(p) == rep.max_point).to_string()])
            .collect(),
        human: format!("necessary intersection points: {}\nmaximal: {max}", points.join(" ")),
    }
}

fn nip(a: &FilesArgs) -> Outcome {
    let families = read_families(&a.files)?;
    if families.len() == 1 {
        if a.t.is_some_and(|t| t != 1) {
            return Err(usage("a single family is handled with t = 1"));
        }
        Ok(nip_report(&nip_single(&families[0])?))
    } else {
        Ok(nip_report(&nip_cross(&families, a.t.unwrap_or(1))?))
    }
}

fn shift(a: &ShiftArgs) -> Outcome {
    let families = read_families(&a.files)?;
    let shifted = match (a.i, a.j) {
        (Some(i), Some(j)) => families.iter().map(|f| shift_family(f, i, j)).collect::<Result<Vec<_>, _>>()?,
        _ => shift_to_fixpoint(&families)?,
    };
    Ok(Report {
        json: json!({
            "families": families_json(&shifted),
            "shifted": shifted.iter().map(is_shifted).collect::<Vec<_>>(),
        }),
        header: vec!["family", "set"],
        rows: family_rows(&shifted),
        human: family_human(&shifted),
    })
}

fn trace_report(trace: &Trace) -> Report {
    let rows = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                (i + 1).to_string(),
                s.a_star.to_string(),
                s.case.tag().to_string(),
                format_rational(&s.measure_before),
                format_rational(&s.measure_after),
                if s.matched { "matching" } else { "smallest" }.to_string(),
            ]
        })
        .collect();
    let mut human: Vec<String> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            format!(
                "step {}: a_* = {}, {}, measure {} -> {}",
                i + 1,
                s.a_star,
                s.case.tag(),
                format_rational(&s.measure_before),
                format_rational(&s.measure_after)
            )
        })
        .collect();
    human.push(format!(
        "measure {} -> {} in {} steps",
        format_rational(&trace.measure_start),
        format_rational(&trace.measure_end),
        trace.steps.len()
    ));
    human.push(family_human(&trace.end));
    Report {
        json: trace.to_json_value(),
        header: vec!["step", "a_star", "case", "measure_before", "measure_after", "assignment"],
        rows,
        human: human.join("\n"),
    }
}

fn replay(a: &ReplayArgs) -> Outcome {
    let families = read_families(&a.files)?;
    let n = families[0].n();
    let measures = measures_for(&a.measure, n, families.len())?;
    if families.len() == 1 {
        if a.t.is_some_and(|t| t != 1) {
            return Err(usage("a single family is handled with t = 1"));
        }
        if a.caps.is_some() {
            return Err(usage("--caps is for several families; use --khat"));
        }
        let mu = &measures[0];
        let k = a.k.unwrap_or_else(|| mu.window().map_or(1, |w| w.0));
        let khat = a.khat.unwrap_or_else(|| mu.window().map_or(n, |w| w.1));
        return Ok(trace_report(&reduce_single_to_extremal(&families[0], mu, k, khat)?));
    }
    if a.k.is_some() || a.khat.is_some() {
        return Err(usage("-k/--khat are for a single family; windows come from the measures"));
    }
    let mut inst = CrossInstance::new(a.t.unwrap_or(1), families)?.with_measures(measures)?;
    if let Some(caps) = &a.caps {
        inst = inst.with_caps(caps.clone())?;
    }
    Ok(trace_report(&reduce_cross_to_extremal(&inst)?))
}

fn search(a: &SearchArgs) -> Outcome {
    let n = a.n;
    let t = a.t.unwrap_or(1);
    let spec = match a.mode {
        SearchMode::Uniform => {
            let k = need(a.k, "-k", "uniform mode")?;
            SearchSpec::uniform(n, k, need(a.r, "-r", "uniform mode")?, t)
        }
        SearchMode::Nonuniform => SearchSpec::nonuniform(n, need(a.r, "-r", "nonuniform mode")?, t),
        SearchMode::Truncated => {
            let caps = a.caps.clone().ok_or_else(|| usage("truncated mode needs --caps"))?;
            if a.r.is_some_and(|r| r != caps.len()) {
                return Err(usage("-r disagrees with the number of caps"));
            }
            let measures = measures_for(&a.measure, n, caps.len())?;
            SearchSpec::truncated(n, t, caps, measures)
        }
        SearchMode::Single => {
            let khat = need(a.khat, "--khat", "single mode")?;
            let measures = measures_for(&a.measure, n, 1)?;
            SearchSpec::truncated(n, t, vec![khat], measures)
        }
    };
    let spec = spec
        .with_objective(match a.objective {
            ObjectiveArg::Sum => Objective::Sum,
            ObjectiveArg::Product => Objective::Product,
        })
        .with_restriction(match a.restriction {
            RestrictionArg::UpClosed => Restriction::UpClosed,
            RestrictionArg::Shifted => Restriction::Shifted,
            RestrictionArg::None => Restriction::None,
        });
    let options = SearchOptions {
        threads: a.threads,
        guard: Guard::from_env()?,
    };
    let result = exhaustive_max_with(&spec, &options)?;
    let mut json = result.to_json_value();
    json["n"] = json!(spec.n);
    json["r"] = json!(spec.r);
    json["t"] = json!(spec.t);
    if a.timing {
        json["wall_time_ms"] = json!(result.wall_time_ms as u64);
    }
    let value = result.value.as_ref().map_or_else(|| "none".to_string(), format_rational);
    let mut human = format!("value {value} ({} nodes)", result.nodes_explored);
    if let Some(w) = &result.witness {
        human.push('\n');
        human.push_str(&family_human(w));
    }
    Ok(Report {
        json,
        header: vec!["value", "nodes_explored"],
        rows: vec![vec![value, result.nodes_explored.to_string()]],
        human,
    })
}

fn sweep(a: &SweepArgs) -> Outcome {
    let guard = Guard::from_env()?;
    let mut records = Vec::new();
    for n in 1..=a.n_max {
        for r in 2..=a.r_max.max(2) {
            for t in 1..=a.t_max.min(n) {
                let ks: Vec<Option<usize>> = match a.mode {
                    SweepMode::Uniform => (t..=n).filter(|&k| n + t > 2 * k).map(Some).collect(),
                    SweepMode::Nonuniform => vec![None],
                };
                for k in ks {
                    let (report, spec) = match k {
                        Some(k) => (bound_uniform(n, k, r, t)?, SearchSpec::uniform(n, k, r, t)),
                        None => (bound_nonuniform(n, r, t)?, SearchSpec::nonuniform(n, r, t)),
                    };
                    let oracle = if a.oracle {
                        let options = SearchOptions {
                            threads: 1,
                            guard: guard.clone(),
                        };
                        match exhaustive_max_with(&spec, &options) {
                            Ok(res) => res.value,
                            Err(Error::ResourceGuard(_)) => None,
                            Err(e) => return Err(e.into()),
                        }
                    } else {
                        None
                    };
                    let mut points: Vec<usize> = report.argmax.iter().map(|m| m.a).collect();
                    points.sort_unstable();
                    points.dedup();
                    records.push((n, k, r, t, report.value, points, oracle));
                }
            }
        }
    }
    let mode = match a.mode {
        SweepMode::Uniform => "uniform",
        SweepMode::Nonuniform => "nonuniform",
    };
    let json = Value::Array(
        records
            .iter()
            .map(|(n, k, r, t, v, pts, o)| {
                json!({
                    "mode": mode, "n": n, "k": k, "r": r, "t": t,
                    "value": format_rational(v),
                    "argmax_a": pts,
                    "oracle": o.as_ref().map(format_rational),
                })
            })
            .collect(),
    );
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|(n, k, r, t, v, pts, o)| {
            let pts: Vec<String> = pts.iter().map(usize::to_string).collect();
            vec![
                mode.to_string(),
                n.to_string(),
                k.map_or_else(String::new, |k| k.to_string()),
                r.to_string(),
                t.to_string(),
                format_rational(v),
                pts.join(" "),
                o.as_ref().map_or_else(String::new, format_rational),
            ]
        })
        .collect();
    let human = rows
        .iter()
        .map(|row| format!("n={} k={} r={} t={}: {} at a ∈ {{{}}}", row[1], row[2], row[3], row[4], row[5], row[6]))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report {
        json,
        header: vec!["mode", "n", "k", "r", "t", "value", "argmax_a", "oracle"],
        rows,
        human,
    })
}
