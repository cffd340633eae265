use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use num_rational::BigRational;
use oamcapture::am_algebra::{cg, QuadRational};
use oamcapture::cross_sections::{builtin_methods, reconcile, CaptureModel, Mode};
use oamcapture::experiment::{
    discriminability_sweep, fit_k, io, simulate_counts, FitMode, FitOptions, MeasurementSetting,
};
use oamcapture::kinematics::{check_kinematics, ReactionKinematics};
use oamcapture::levels::{builtin_levels, channel_detuning_kev, level_table_version};
use oamcapture::numeric::{format_rational, format_rational_decimal};
use oamcapture::polarization::PolarizationTriple;
use oamcapture::Error;
use serde_json::{json, Value};

use crate::output::{Report, Table};
use crate::{
    CgArgs, Command, FitArgs, KinematicsArgs, ModelArgs, OracleCheckArgs, SimulateArgs, SweepArgs,
    XsecArgs,
};

pub struct Outcome {
    pub report: Report,
    pub exit_code: u8,
    /// Printed to stderr after the report.
    pub note: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome {
            report,
            exit_code: 0,
            note: None,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Domain(Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Cg(args) => cg_command(args).map(Outcome::from),
        Command::Xsec(args) => xsec(args).map(Outcome::from),
        Command::OracleCheck(args) => oracle_check(args),
        Command::Sweep(args) => sweep(args).map(Outcome::from),
        Command::Fit(args) => fit(args).map(Outcome::from),
        Command::Simulate(args) => simulate(args).map(Outcome::from),
        Command::Levels => levels().map(Outcome::from),
        Command::Kinematics(args) => Ok(kinematics(args)),
    }
}

fn number(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        x.to_string()
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        CliError::Domain(Error::InvalidInput(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })
}

fn capture_model(args: &ModelArgs) -> Result<CaptureModel> {
    if args.k.is_empty() {
        return Ok(CaptureModel::unit(args.mode));
    }
    let expected = args.mode.channels().len();
    if args.k.len() != expected {
        return Err(CliError::Usage(format!(
            "--k needs {expected} values for {} mode, got {}",
            args.mode,
            args.k.len()
        )));
    }
    Ok(CaptureModel::new(args.mode, args.k.clone())?)
}

fn cg_command(args: CgArgs) -> Result<Report> {
    let value = cg(args.j1, args.m1, args.j2, args.m2, args.j, args.m)?;
    let mut table = Table::new("cg", &["exact", "decimal"]);
    table.push(vec![value.to_string(), value.to_decimal_string()]);
    Ok(Report::from_tables(vec![table]))
}

fn xsec(args: XsecArgs) -> Result<Report> {
    let model = capture_model(&args.model)?;
    let pol = PolarizationTriple::new(args.p, args.pl, args.pn)?;
    let method = builtin_methods()
        .get(args.model.mode, &args.method)
        .map_err(|_| {
            CliError::Usage(format!(
                "unknown --method {:?} for {} mode (available: {})",
                args.method,
                args.model.mode,
                builtin_methods().names(args.model.mode).join(", ")
            ))
        })?;
    let values = method.cross_sections(&pol, &model)?;
    let total: QuadRational = values.iter().map(|v| v.value.clone()).sum();

    let mut table = Table::new(
        "cross-sections",
        &["channel", "exact", "decimal", "fraction"],
    );
    for v in &values {
        let fraction = match v.value.checked_div(&total) {
            Ok(f) => f.to_decimal_string(),
            Err(_) => "undefined".into(),
        };
        table.push(vec![
            v.channel.to_string(),
            v.value.to_string(),
            v.value.to_decimal_string(),
            fraction,
        ]);
    }
    let total_fraction = if total.is_zero() { "undefined" } else { "1" };
    table.push(vec![
        "total".into(),
        total.to_string(),
        total.to_decimal_string(),
        total_fraction.into(),
    ]);
    Ok(Report::from_tables(vec![table]))
}

fn oracle_check(args: OracleCheckArgs) -> Result<Outcome> {
    let report = reconcile(args.grid as usize)?;

    let mut verdict = Table::new("verdict", &["grid", "verdict", "closed_forms_agree"]);
    verdict.push(vec![
        report.points_per_axis.to_string(),
        report.verdict.clone(),
        report.closed_forms_agree.to_string(),
    ]);

    let mut channels = Table::new("channels", &["mode", "channel", "points", "mismatches"]);
    for c in &report.channels {
        channels.push(vec![
            c.mode.to_string(),
            c.channel.to_string(),
            c.points.to_string(),
            c.mismatches.to_string(),
        ]);
    }

    let mut properties = Table::new(
        "oracle properties",
        &[
            "mode",
            "nonnegative",
            "sign_flip_invariant",
            "unpolarized",
            "statistical_weights",
        ],
    );
    for p in &report.oracle_properties {
        let join = |m: &std::collections::BTreeMap<_, String>| {
            m.iter()
                .map(|(c, v)| format!("{c}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        properties.push(vec![
            p.mode.to_string(),
            p.nonnegative.to_string(),
            p.sign_flip_invariant.to_string(),
            join(&p.unpolarized),
            join(&p.statistical_weights),
        ]);
    }

    let mut claims = Table::new(
        "claims",
        &["channel", "claim", "condition", "supported", "observed"],
    );
    for c in &report.claims {
        let kind = serde_json::to_value(c.kind).expect("claim kinds serialize");
        claims.push(vec![
            c.channel.to_string(),
            kind.as_str().unwrap_or_default().to_string(),
            c.condition.clone(),
            c.supported.to_string(),
            c.observed.clone(),
        ]);
    }

    let mut tables = vec![verdict, channels, properties, claims];
    if !report.discrepancies.is_empty() {
        let mut table = Table::new(
            "discrepancies",
            &[
                "mode",
                "channel",
                "p",
                "P_L",
                "P_N",
                "closed_form",
                "oracle",
                "difference",
                "difference_decimal",
            ],
        );
        for d in &report.discrepancies {
            table.push(vec![
                d.mode.to_string(),
                d.channel.to_string(),
                d.p.clone(),
                d.p_l.clone(),
                d.p_n.clone(),
                d.closed_form.clone(),
                d.oracle.clone(),
                d.difference.clone(),
                d.difference_decimal.clone(),
            ]);
        }
        tables.push(table);
    }

    let (exit_code, note) = if report.closed_forms_agree {
        (0, None)
    } else {
        (
            3,
            Some(format!(
                "closed forms disagree with the coupling sum for channel(s) {}",
                report.disagreeing_channels().join(", ")
            )),
        )
    };
    let result = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome {
        report: Report {
            tables,
            result: Some(result),
            ..Report::default()
        },
        exit_code,
        note,
    })
}

fn sweep(args: SweepArgs) -> Result<Report> {
    let mut rows = discriminability_sweep(args.grid as usize, args.mode)?;
    if let Some(top) = args.top {
        rows.truncate(top);
    }
    let channels = args.mode.channels();
    let mut columns: Vec<String> = ["p", "P_L", "P_N"].iter().map(|s| s.to_string()).collect();
    for c in &channels {
        columns.push(format!("fraction_{c}"));
    }
    for c in &channels {
        columns.push(format!("fraction_{c}_exact"));
    }
    columns.push("condition_number".into());

    let mut table = Table::with_columns("sweep", columns);
    for row in &rows {
        let mut cells = vec![
            format_rational(row.pol.p()),
            format_rational(row.pol.p_l()),
            format_rational(row.pol.p_n()),
        ];
        match &row.fractions {
            Some(f) => {
                cells.extend(f.iter().map(QuadRational::to_decimal_string));
                cells.extend(f.iter().map(QuadRational::to_string));
            }
            None => cells.extend(std::iter::repeat_n(
                "undefined".to_string(),
                2 * channels.len(),
            )),
        }
        cells.push(number(row.condition_number));
        table.push(cells);
    }
    Ok(Report::from_tables(vec![table]))
}

fn fit(args: FitArgs) -> Result<Report> {
    let settings = io::read_settings(open(&args.settings)?)?;
    let records = io::read_counts(open(&args.counts)?, &settings, args.mode)?;
    let channels = if args.resolved {
        FitMode::Resolved
    } else {
        FitMode::Summed
    };
    let result = fit_k(&records, args.mode, FitOptions::new(channels, args.weights))?;

    let mut table = Table::new("fit", &["channel", "K_hat", "std_error"]);
    for ((c, est), sd) in result
        .channels
        .iter()
        .zip(result.estimates())
        .zip(result.std_errors())
    {
        table.push(vec![c.to_string(), number(est), number(sd)]);
    }
    let mut summary = Table::new("summary", &["residual_norm", "iterations", "records"]);
    summary.push(vec![
        number(result.residual_norm),
        result.iterations.to_string(),
        records.len().to_string(),
    ]);
    Ok(Report {
        tables: vec![table, summary],
        result: Some(serde_json::to_value(&result).expect("fit serializes")),
        ..Report::default()
    })
}

fn simulate(args: SimulateArgs) -> Result<Report> {
    let model = capture_model(&args.model)?;
    let mode = model.mode();
    let settings = match &args.settings {
        Some(path) => io::read_settings(open(path)?)?,
        None => MeasurementSetting::grid(args.grid as usize, args.exposure, args.depth)?,
    };
    if let Some(path) = &args.settings_out {
        let file = File::create(path).map_err(|e| {
            CliError::Domain(Error::InvalidInput(format!(
                "cannot write {}: {e}",
                path.display()
            )))
        })?;
        io::write_settings(file, &settings)?;
    }
    let records = simulate_counts(&settings, &model, args.seed)?;

    let mut csv = Vec::new();
    io::write_counts(&mut csv, &records, mode, args.resolved)?;

    let split = io::channel_columns(mode);
    let mut columns: Vec<String> = ["setting_id", "p", "P_L", "P_N", "capture", "transmitted"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if args.resolved {
        columns.extend(split.iter().cloned());
    }
    let mut table = Table::with_columns("counts", columns);
    let mut json_rows = Vec::new();
    for r in &records {
        let pol = &r.setting.pol;
        let mut cells = vec![
            r.setting_id.to_string(),
            format_rational(pol.p()),
            format_rational(pol.p_l()),
            format_rational(pol.p_n()),
            r.capture_counts.to_string(),
            r.transmitted_counts.to_string(),
        ];
        let mut row = json!({
            "setting_id": r.setting_id,
            "p": cells[1],
            "P_L": cells[2],
            "P_N": cells[3],
            "exposure": r.setting.exposure,
            "depth": r.setting.depth,
            "capture": r.capture_counts,
            "transmitted": r.transmitted_counts,
        });
        if args.resolved {
            cells.extend(r.channel_captures.iter().map(u64::to_string));
            for (name, n) in split.iter().zip(&r.channel_captures) {
                row[name.as_str()] = Value::from(*n);
            }
        }
        table.push(cells);
        json_rows.push(row);
    }
    Ok(Report {
        tables: vec![table],
        result: Some(Value::Array(json_rows)),
        seed: Some(args.seed),
        csv: Some(String::from_utf8(csv).expect("CSV of ASCII cells")),
    })
}

fn levels() -> Result<Report> {
    let records = builtin_levels();
    let mut table = Table::new("levels", &["role", "energy_kev", "J_pi", "T", "width"]);
    for r in &records {
        let role = serde_json::to_value(r.role).expect("roles serialize");
        table.push(vec![
            role.as_str().unwrap_or_default().to_string(),
            r.energy_kev.to_string(),
            r.channel()
                .map_or_else(|| "-".to_string(), |c| c.to_string()),
            r.isospin_t.to_string(),
            r.width_note.clone(),
        ]);
    }
    let mut detunings = Table::new(
        "detunings",
        &["mode", "channel", "detuning_kev", "detuning_mev"],
    );
    for mode in Mode::ALL {
        for channel in mode.channels() {
            let kev = channel_detuning_kev(channel)?;
            detunings.push(vec![
                mode.to_string(),
                channel.to_string(),
                kev.to_string(),
                format_rational_decimal(&BigRational::new(kev.into(), 1000.into())),
            ]);
        }
    }
    let mut report = Report::from_tables(vec![table, detunings]);
    let mut result = serde_json::Map::new();
    result.insert("version".into(), Value::from(level_table_version()));
    result.insert(
        "levels".into(),
        serde_json::to_value(&records).expect("levels serialize"),
    );
    result.insert(
        "detunings".into(),
        Value::Array(
            report.tables[1]
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "mode": row[0],
                        "channel": row[1],
                        "detuning_kev": row[2].parse::<i64>().expect("integer keV"),
                        "detuning_mev": row[3],
                    })
                })
                .collect(),
        ),
    );
    report.result = Some(Value::Object(result));
    Ok(report)
}

fn kinematics(args: KinematicsArgs) -> Outcome {
    let report = check_kinematics(&ReactionKinematics::new(args.q, args.ep, args.et));
    let mut table = Table::new("kinematics", &["check", "passed", "detail"]);
    for c in &report.checks {
        table.push(vec![
            c.name.to_string(),
            c.passed.to_string(),
            c.detail.clone(),
        ]);
    }
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    Outcome {
        report: Report {
            tables: vec![table],
            result: Some(serde_json::to_value(&report).expect("report serializes")),
            ..Report::default()
        },
        exit_code: if report.passed { 0 } else { 1 },
        note: (!failed.is_empty())
            .then(|| format!("kinematics check failed: {}", failed.join(", "))),
    }
}
