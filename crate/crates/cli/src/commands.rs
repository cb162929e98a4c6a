//! Execution of resolved invocations.

use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde_json::{json, Value};
use tandem_core::bounds::theorem3_bound;
use tandem_core::bruteforce::{certify_with, ProtocolOracle};
use tandem_core::{
    exponent_fit, joint_p_min, simulate, two_hop_exponent, BinaryInputChannel, ChernoffCurve,
    Error, ExponentReport, SimResult,
};

use crate::config::{SimConfig, SweepConfig, MAX_SWEEP_CELLS};
use crate::error::{CliError, CliResult};
use crate::manifest::Invocation;
use crate::output::{bits_view, fmt_number, to_rounded_value, write_json_line, write_json_pretty};
use crate::spec::ChannelSpec;

/// Fixed sweep CSV columns.
pub const SWEEP_COLUMNS: [&str; 11] = [
    "p", "q", "e_star", "s_star", "e1_p", "e1_q", "regime", "type_p", "type_q", "ambiguous",
    "reduction",
];

const SWEEP_CHUNK: usize = 64;

pub struct Context<'a> {
    pub bits: bool,
    pub interrupted: &'a AtomicBool,
}

impl Context<'_> {
    fn stop(&self) -> bool {
        self.interrupted.load(Ordering::Relaxed)
    }
}

pub fn execute(inv: &Invocation, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    match inv {
        Invocation::Exponent { p, q } => exponent(p, q, ctx, out),
        Invocation::Bound { p, q, n } => bound(p, q, *n, ctx, out),
        Invocation::Bruteforce {
            p,
            q,
            n,
            override_cap,
        } => bruteforce(p, q, *n, *override_cap, out),
        Invocation::Simulate { config } => simulate_runs(config, ctx, out),
        Invocation::Sweep { config } => sweep(config, ctx, out),
        Invocation::Curve { p, q, s_grid } => curve(p, q.as_ref(), s_grid, ctx, out),
    }
}

fn channels(p: &ChannelSpec, q: &ChannelSpec) -> CliResult<(BinaryInputChannel, BinaryInputChannel)> {
    Ok((p.resolve("--p")?, q.resolve("--q")?))
}

fn label(c: &BinaryInputChannel) -> Value {
    match c.label() {
        Some(l) => json!(l),
        None => json!(c.to_raw()),
    }
}

fn reduction_note(report: &ExponentReport) -> Option<&'static str> {
    use tandem_core::exponent::Reduction;
    match report.reduction? {
        Reduction::PSeparable => {
            Some("P separates its inputs perfectly; the exponent is the one-hop exponent of Q")
        }
        Reduction::QSeparable => {
            Some("Q separates its inputs perfectly; the exponent is the one-hop exponent of P")
        }
    }
}

fn exponent(p: &ChannelSpec, q: &ChannelSpec, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let (pc, qc) = channels(p, q)?;
    let mut v = match two_hop_exponent(&pc, &qc) {
        Ok(report) => {
            let mut v = to_rounded_value(&report);
            if let Some(note) = reduction_note(&report) {
                v["note"] = json!(note);
            }
            v
        }
        Err(Error::BothDegenerate) => json!({
            "e_star": "unbounded",
            "e1_p": "unbounded",
            "e1_q": "unbounded",
            "note": "both hops separate their inputs perfectly; the error can be made zero",
        }),
        Err(e) => return Err(CliError::core("--p/--q", e)),
    };
    v["p"] = label(&pc);
    v["q"] = label(&qc);
    v["unit"] = json!("nats");
    if ctx.bits {
        v["bits"] = bits_view(&v, &[("e_star", "e_star"), ("e1_p", "e1_p"), ("e1_q", "e1_q")]);
    }
    write_json_pretty(out, &v)
}

fn bound(
    p: &ChannelSpec,
    q: &ChannelSpec,
    n: usize,
    ctx: &Context,
    out: &mut dyn Write,
) -> CliResult<()> {
    let (pc, qc) = channels(p, q)?;
    let b = theorem3_bound(n, &pc, &qc).map_err(|e| CliError::core("--p/--q/--n", e))?;
    let e_star = two_hop_exponent(&pc, &qc)
        .map_err(|e| CliError::core("--p/--q", e))?
        .e_star;
    let mut v = to_rounded_value(&json!({
        "p": label(&pc),
        "q": label(&qc),
        "n": n,
        "e_star": e_star,
        "p_min": joint_p_min(&pc, &qc),
        "bound_nats": b,
        "bound_per_n": b / n as f64,
        "unit": "nats",
    }));
    if ctx.bits {
        v["bits"] = bits_view(
            &v,
            &[("e_star", "e_star"), ("bound_nats", "bound"), ("bound_per_n", "bound_per_n")],
        );
    }
    write_json_pretty(out, &v)
}

fn bruteforce(
    p: &ChannelSpec,
    q: &ChannelSpec,
    n: usize,
    override_cap: bool,
    out: &mut dyn Write,
) -> CliResult<()> {
    let (pc, qc) = channels(p, q)?;
    let oracle = ProtocolOracle::new(&pc, &qc, n, override_cap).map_err(|e| match e {
        Error::CapExceeded { .. } => CliError::Cap(format!("{e}; pass --override-cap to run anyway")),
        other => CliError::core("--n", other),
    })?;
    let report = certify_with(&oracle).map_err(|e| CliError::core("--n", e))?;
    let mut v = to_rounded_value(&report);
    v["p"] = label(&pc);
    v["q"] = label(&qc);
    v["protocols_searched"] = json!(oracle.protocol_count().to_string());
    write_json_pretty(out, &v)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "certification failed at n = {n}: -ln(pe sum) {} exceeds bound {}",
            report.lhs, report.bound
        )))
    }
}

fn simulate_runs(config: &SimConfig, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    config.validate()?;
    let (pc, qc) = channels(&config.p, &config.q)?;
    let ns = config.n.values();
    let mut results: Vec<SimResult> = Vec::new();
    for (done, &n) in ns.iter().enumerate() {
        if ctx.stop() {
            write_json_line(out, &json!({"truncated": true, "completed": done, "total": ns.len()}))?;
            return Err(CliError::Interrupted {
                done,
                total: ns.len(),
            });
        }
        let (x0, x1) = config.encoder.codewords(n)?;
        let r = simulate(&pc, &qc, n, &config.strategy, (&x0, &x1), config.trials, config.seed)
            .map_err(|e| CliError::core("config", e))?;
        write_json_line(out, &to_rounded_value(&r))?;
        out.flush()?;
        results.push(r);
    }
    if config.fit {
        let line = match exponent_fit(&results) {
            Ok(fit) => json!({ "exponent_fit": to_rounded_value(&fit) }),
            Err(e) => json!({ "exponent_fit_error": e.to_string() }),
        };
        write_json_line(out, &line)?;
    }
    Ok(())
}

fn type_name(v: &Value, key: &str) -> String {
    v.get(key)
        .and_then(|t| t.get("kind"))
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_owned()
}

fn label_text(c: &BinaryInputChannel) -> String {
    c.label()
        .map(str::to_owned)
        .unwrap_or_else(|| format!("{:?}", c.to_raw()))
}

fn sweep_row(p: &BinaryInputChannel, q: &BinaryInputChannel) -> CliResult<Vec<String>> {
    let mut row = vec![label_text(p), label_text(q)];
    match two_hop_exponent(p, q) {
        Ok(r) => {
            let v = serde_json::to_value(&r).expect("report serializes");
            let text = |key: &str| match &v[key] {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            row.extend([
                fmt_number(r.e_star),
                fmt_number(r.s_star),
                fmt_number(r.e1_p.as_f64()),
                fmt_number(r.e1_q.as_f64()),
                text("regime"),
                type_name(&v, "type_p"),
                type_name(&v, "type_q"),
                r.ambiguous.to_string(),
                text("reduction"),
            ]);
        }
        Err(Error::BothDegenerate) => row.extend(
            ["unbounded", "", "unbounded", "unbounded", "BothDegenerate", "", "", "false", ""]
                .map(String::from),
        ),
        Err(e) => return Err(CliError::core("sweep cell", e)),
    }
    Ok(row)
}

fn sweep(config: &SweepConfig, ctx: &Context, out: &mut dyn Write) -> CliResult<()> {
    let ps = config.p.expand("p")?;
    let qs = config.q.expand("q")?;
    let total = ps.len() * qs.len();
    if total == 0 {
        return Err(CliError::input(
            "config",
            format!("sweep grid is empty ({} P values x {} Q values)", ps.len(), qs.len()),
        ));
    }
    if total > MAX_SWEEP_CELLS {
        return Err(CliError::Cap(format!(
            "sweep has {total} cells, more than the limit of {MAX_SWEEP_CELLS}"
        )));
    }
    let pc = ps
        .iter()
        .enumerate()
        .map(|(i, s)| s.resolve(&format!("p[{i}]")))
        .collect::<CliResult<Vec<_>>>()?;
    let qc = qs
        .iter()
        .enumerate()
        .map(|(i, s)| s.resolve(&format!("q[{i}]")))
        .collect::<CliResult<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> = (0..pc.len())
        .flat_map(|i| (0..qc.len()).map(move |j| (i, j)))
        .collect();

    let mut csv = csv::WriterBuilder::new().from_writer(&mut *out);
    csv.write_record(SWEEP_COLUMNS).map_err(csv_error)?;
    let mut done = 0;
    for chunk in cells.chunks(SWEEP_CHUNK) {
        if ctx.stop() {
            csv.flush()?;
            drop(csv);
            writeln!(out, "# truncated: {done} of {total} cells")?;
            return Err(CliError::Interrupted { done, total });
        }
        let rows: Vec<Vec<String>> = chunk
            .par_iter()
            .map(|&(i, j)| sweep_row(&pc[i], &qc[j]))
            .collect::<CliResult<_>>()?;
        for row in rows {
            csv.write_record(&row).map_err(csv_error)?;
        }
        csv.flush()?;
        done += chunk.len();
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// `max(d(s), d(1 - s))`, infinite for a separable channel.
fn folded(curve: Option<&ChernoffCurve>, s: f64) -> f64 {
    curve.map_or(f64::INFINITY, |c| c.value(s).max(c.value(1.0 - s)))
}

fn curve(
    p: &ChannelSpec,
    q: Option<&ChannelSpec>,
    grid: &[f64],
    ctx: &Context,
    out: &mut dyn Write,
) -> CliResult<()> {
    let pc = p.resolve("--p")?;
    let qc = q.map(|q| q.resolve("--q")).transpose()?;
    let cp = pc.chernoff_curve().ok();
    let cq = qc.as_ref().map(|c| c.chernoff_curve().ok());
    let (unit, scale) = if ctx.bits {
        ("bits", 1.0 / std::f64::consts::LN_2)
    } else {
        ("nats", 1.0)
    };
    let mut header = vec!["s".to_owned(), format!("d_p_{unit}")];
    if cq.is_some() {
        header.push(format!("d_q_{unit}"));
        header.push(format!("e_s_{unit}"));
    }
    let mut csv = csv::WriterBuilder::new().from_writer(&mut *out);
    csv.write_record(&header).map_err(csv_error)?;
    for &s in grid {
        let dp = cp.as_ref().map_or(f64::INFINITY, |c| c.value(s));
        let mut row = vec![fmt_number(s), fmt_number(dp * scale)];
        if let Some(cq) = &cq {
            let dq = cq.as_ref().map_or(f64::INFINITY, |c| c.value(s));
            let e = folded(cp.as_ref(), s).min(folded(cq.as_ref(), s));
            row.push(fmt_number(dq * scale));
            row.push(fmt_number(e * scale));
        }
        csv.write_record(&row).map_err(csv_error)?;
    }
    csv.flush()?;
    Ok(())
}
