// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each returns an [`Outcome`] and writes nothing.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use rfqlink_core::cryo::{self, CryoError};
use rfqlink_core::metrics::{self, GainCurve, PowerSweep};
use rfqlink_core::network::{self, NetworkError, TwoPortNetwork};
use rfqlink_core::noise::{self, ColdSourceConfig, GainSpectrum, NoiseDensitySpectrum};
use rfqlink_core::qubitlink::{self, AmplifierCard, QubitDriveSpec};
use rfqlink_core::touchstone::{self, FreqUnit, TouchstoneDocument, ValueFormat};

use crate::input::{self, Inputs};
use crate::{CliError, Command, Outcome};

fn analysis(e: impl std::fmt::Display) -> CliError {
    CliError::Analysis(e.to_string())
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn dispatch(cmd: &Command, inputs: &mut Inputs, t0: f64) -> Result<Outcome, CliError> {
    match cmd {
        Command::Convert { input, to } => convert(inputs, input, *to),
        Command::Cascade { first, second, resample } => cascade(inputs, first, second, *resample),
        Command::Deembed { measured, left, right } => deembed(inputs, measured, left.as_deref(), right.as_deref()),
        Command::NfExtract {
            casc_gain,
            casc_onpd,
            dc_gain,
            dc_onpd,
            tsource,
        } => nf_extract(inputs, [casc_gain, casc_onpd, dc_gain, dc_onpd], *tsource, t0),
        Command::Band { input, delta } => band(inputs, input, *delta),
        Command::P1db { input } => p1db(inputs, input),
        Command::Passives { input, compare } => passives(inputs, input, compare.as_deref()),
        Command::Bias { input, j, vdd, pdc } => bias(inputs, input, *j, vdd.zip(*pdc)),
        Command::Budget { card, spec, gain_curve } => budget(inputs, card, spec, gain_curve.as_deref()),
    }
}

fn convert(inputs: &mut Inputs, path: &Path, kind: rfqlink_core::RepresentationKind) -> Result<Outcome, CliError> {
    let (net, _, _) = inputs.network(path)?;
    let mats = network::convert(&net, kind).map_err(analysis)?;
    let mut text = String::from("freq_hz");
    for ij in ["11", "12", "21", "22"] {
        let _ = write!(text, ",re_{ij},im_{ij}");
    }
    text.push('\n');
    let mut rows = Vec::with_capacity(mats.len());
    for (f, m) in net.freqs().iter().zip(&mats) {
        let mut row = vec![*f];
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            row.push(m.get(i, j).re);
            row.push(m.get(i, j).im);
        }
        let line: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(text, "{}", line.join(","));
        rows.push(row);
    }
    Ok(Outcome {
        text,
        results: json!({
            "kind": kind.to_string(),
            "z0_ohm": net.z0(),
            "columns": ["freq_hz", "re_11", "im_11", "re_12", "im_12", "re_21", "im_21", "re_22", "im_22"],
            "rows": rows,
        }),
        warnings: Vec::new(),
    })
}

fn consistency_warnings(net: &TwoPortNetwork) -> (Value, Vec<String>) {
    let p = network::check_passivity(net);
    let r = network::check_reciprocity(net);
    let mut w = Vec::new();
    if !p.all_ok() {
        w.push(format!(
            "result is not passive: largest singular value exceeds 1 by {:e} at {} Hz",
            -p.worst_margin, p.worst_freq_hz
        ));
    }
    if !r.all_ok() {
        w.push(format!("result is not reciprocal (worst at {} Hz)", r.worst_freq_hz));
    }
    (json!({ "passivity": to_value(&p), "reciprocity": to_value(&r) }), w)
}

fn touchstone_outcome(net: &TwoPortNetwork, unit: FreqUnit, format: ValueFormat) -> Result<Outcome, CliError> {
    let ri = TouchstoneDocument::from_network(net, unit);
    let doc = ri.with_format(format).unwrap_or(ri);
    let text = touchstone::serialize_touchstone(&doc).map_err(analysis)?;
    let (checks, warnings) = consistency_warnings(net);
    Ok(Outcome {
        text,
        results: json!({
            "label": net.label,
            "z0_ohm": net.z0(),
            "points": net.len(),
            "freq_min_hz": net.freqs().first(),
            "freq_max_hz": net.freqs().last(),
            "checks": checks,
        }),
        warnings,
    })
}

fn cascade(inputs: &mut Inputs, a: &Path, b: &Path, resample: bool) -> Result<Outcome, CliError> {
    let (na, unit, format) = inputs.network(a)?;
    let (nb, _, _) = inputs.network(b)?;
    let (na, nb) = if resample {
        network::align(&na, &nb).map_err(analysis)?
    } else {
        (na, nb)
    };
    let out = network::cascade(&na, &nb).map_err(|e| match e {
        NetworkError::GridMismatch => analysis(format!("{e} (use --resample to interpolate)")),
        e => analysis(e),
    })?;
    touchstone_outcome(&out, unit, format)
}

fn deembed(inputs: &mut Inputs, meas: &Path, left: Option<&Path>, right: Option<&Path>) -> Result<Outcome, CliError> {
    let (mut net, unit, format) = inputs.network(meas)?;
    let label = net.label.clone();
    if let Some(p) = left {
        let (fix, _, _) = inputs.network(p)?;
        net = network::deembed_left(&net, &fix).map_err(analysis)?;
    }
    if let Some(p) = right {
        let (fix, _, _) = inputs.network(p)?;
        net = network::deembed_right(&net, &fix).map_err(analysis)?;
    }
    net.label = label;
    touchstone_outcome(&net, unit, format)
}

fn nf_extract(inputs: &mut Inputs, paths: [&Path; 4], t_source: f64, t0: f64) -> Result<Outcome, CliError> {
    let mut gain = |p: &Path, label: &str| -> Result<GainSpectrum, CliError> {
        let t = inputs.columns(p, 2)?;
        let [f, g]: [Vec<f64>; 2] = t.columns.try_into().expect("two columns");
        GainSpectrum::new(f, g, label).map_err(|e| input_err(p, e))
    };
    let cg = gain(paths[0], "cascade gain")?;
    let dg = gain(paths[2], "downconverter gain")?;
    let mut onpd = |p: &Path, label: &str| -> Result<NoiseDensitySpectrum, CliError> {
        let t = inputs.columns(p, 2)?;
        let [f, n]: [Vec<f64>; 2] = t.columns.try_into().expect("two columns");
        NoiseDensitySpectrum::new(f, n, label).map_err(|e| input_err(p, e))
    };
    let cn = onpd(paths[1], "cascade noise density")?;
    let dn = onpd(paths[3], "downconverter noise density")?;
    let config = ColdSourceConfig { t_source, t0 };
    let nf = noise::coldsource_extract_with(&cg, &cn, &dg, &dn, &config).map_err(analysis)?;

    let mut text = String::from("freq_hz,gain_db,noise_temperature_k,nf_db\n");
    for p in &nf.points {
        let nf_db = p.nf_db.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(text, "{},{},{},{}", p.freq_hz, p.gain_db, p.noise_temperature, nf_db);
    }
    let min = nf.min_nf().map(|(f, v)| json!({ "freq_hz": f, "nf_db": v }));
    Ok(Outcome {
        text,
        results: json!({
            "t_source_k": t_source,
            "t0_k": t0,
            "points": to_value(&nf.points),
            "min_nf": min,
        }),
        warnings: nf.diagnostics.clone(),
    })
}

fn kv_text(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn band(inputs: &mut Inputs, path: &Path, delta: f64) -> Result<Outcome, CliError> {
    let t = inputs.columns(path, 2)?;
    let [f, g]: [Vec<f64>; 2] = t.columns.try_into().expect("two columns");
    let curve = GainCurve::new(f, g).map_err(|e| input_err(path, e))?;
    let r = metrics::band_3db(&curve, delta).map_err(analysis)?;
    let mut warnings = Vec::new();
    if r.low_clipped {
        warnings.push("lower band edge is below the sweep; reported edge is the sweep start".into());
    }
    if r.high_clipped {
        warnings.push("upper band edge is above the sweep; reported edge is the sweep end".into());
    }
    let text = kv_text(&[
        ("f0_hz", r.f0.to_string()),
        ("gain_at_f0_db", r.gain_at_f0.to_string()),
        ("f_low_hz", r.f_low.to_string()),
        ("f_high_hz", r.f_high.to_string()),
        ("bw_hz", r.bw.to_string()),
        ("low_clipped", r.low_clipped.to_string()),
        ("high_clipped", r.high_clipped.to_string()),
    ]);
    Ok(Outcome {
        text,
        results: json!({ "delta_db": delta, "band": to_value(&r) }),
        warnings,
    })
}

fn p1db(inputs: &mut Inputs, path: &Path) -> Result<Outcome, CliError> {
    let t = inputs.columns(path, 2)?;
    let [p, g]: [Vec<f64>; 2] = t.columns.try_into().expect("two columns");
    let sweep = PowerSweep::new(p, g).map_err(|e| input_err(path, e))?;
    let ip1 = metrics::p1db(&sweep).map_err(analysis)?;
    Ok(Outcome {
        text: kv_text(&[("ip1db_dbm", ip1.to_string())]),
        results: json!({ "ip1db_dbm": ip1 }),
        warnings: Vec::new(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn passives(inputs: &mut Inputs, rt_path: &Path, ct_path: Option<&Path>) -> Result<Outcome, CliError> {
    let (rt, _, _) = inputs.network(rt_path)?;
    let params = cryo::extract_lqk(&rt).map_err(analysis)?;
    let mut warnings = Vec::new();
    let no_k = params.iter().filter(|p| p.k.is_none()).count();
    if no_k > 0 {
        warnings.push(format!("coupling undefined at {no_k} point(s) with non-positive self-inductance"));
    }
    let Some(ct_path) = ct_path else {
        let mut text = String::from("freq_hz,l1_h,l2_h,m_h,k,q1,q2\n");
        for p in &params {
            let _ = writeln!(text, "{},{},{},{},{},{},{}", p.freq, p.l1, p.l2, p.m, opt(p.k), p.q1, p.q2);
        }
        return Ok(Outcome {
            text,
            results: json!({ "params": to_value(&params) }),
            warnings,
        });
    };

    let (ct, _, _) = inputs.network(ct_path)?;
    let cmp = cryo::compare_passive(&rt, &ct).map_err(|e| match e {
        CryoError::NoOverlap => analysis(format!("{}: {e}", ct_path.display())),
        e => analysis(e),
    })?;
    let mut text = format!(
        "# median_dq_pct = {}\n# median_dl_pct = {}\n# q_increased = {}\n# l_decreased = {}\n",
        cmp.median_dq_pct, cmp.median_dl_pct, cmp.q_increased, cmp.l_decreased
    );
    text.push_str("freq_hz,dq1_pct,dq2_pct,dl1_pct,dl2_pct,dk\n");
    for d in &cmp.deltas {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            d.freq, d.dq1_pct, d.dq2_pct, d.dl1_pct, d.dl2_pct, opt(d.dk)
        );
    }
    Ok(Outcome {
        text,
        results: json!({ "params": to_value(&params), "comparison": to_value(&cmp) }),
        warnings,
    })
}

fn bias(inputs: &mut Inputs, path: &Path, j: f64, supply: Option<(f64, f64)>) -> Result<Outcome, CliError> {
    let text = inputs.read(path)?;
    let table = input::parse_iv(&text).map_err(|e| input_err(path, e))?;
    let v = cryo::solve_backgate(&table, j).map_err(analysis)?;
    let mut pairs = vec![
        ("polarity", table.polarity.to_string()),
        ("j_target_ma_per_um", j.to_string()),
        ("v_backgate_v", v.to_string()),
    ];
    let mut results = json!({
        "polarity": table.polarity.to_string(),
        "width_um": table.width,
        "temperature_k": table.temperature,
        "j_target_ma_per_um": j,
        "v_backgate_v": v,
    });
    if let Some((vdd, pdc)) = supply {
        let i = cryo::current_budget(vdd, pdc).map_err(analysis)?;
        let d = cryo::density(i, table.width).map_err(analysis)?;
        pairs.push(("v_ds_v", (vdd / 2.0).to_string()));
        pairs.push(("supply_current_ma", i.to_string()));
        pairs.push(("supply_density_ma_per_um", d.to_string()));
        results["v_ds_v"] = json!(vdd / 2.0);
        results["supply_current_ma"] = json!(i);
        results["supply_density_ma_per_um"] = json!(d);
    }
    Ok(Outcome {
        text: kv_text(&pairs),
        results,
        warnings: Vec::new(),
    })
}

fn budget(inputs: &mut Inputs, card_path: &Path, spec_path: &Path, curve: Option<&Path>) -> Result<Outcome, CliError> {
    let text = inputs.read(card_path)?;
    let card = AmplifierCard::from_kv_text(&text).map_err(|e| input_err(card_path, e))?;
    let text = inputs.read(spec_path)?;
    let spec = QubitDriveSpec::from_kv_text(&text).map_err(|e| input_err(spec_path, e))?;
    let report = match curve {
        None => qubitlink::check_link(&card, &spec),
        Some(p) => {
            let t = inputs.columns(p, 2)?;
            let [f, g]: [Vec<f64>; 2] = t.columns.try_into().expect("two columns");
            let c = GainCurve::new(f, g).map_err(|e| input_err(p, e))?;
            qubitlink::check_link_at_larmor(&card, &spec, &c).map_err(analysis)?
        }
    };
    let mut out = String::new();
    for c in &report.criteria {
        let _ = writeln!(
            out,
            "{:<10} {}  margin {}  ({})",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.margin,
            c.detail
        );
    }
    let _ = writeln!(out, "overall    {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(Outcome {
        text: out,
        results: json!({
            "card": to_value(&card),
            "spec": to_value(&spec),
            "report": to_value(&report),
        }),
        warnings: Vec::new(),
    })
}
