//! CSV and JSON rendering. CSV numbers use 17 significant digits; JSON
//! numbers use the shortest representation that round-trips exactly.

use std::fmt::Write;

use radaim_core::RadialWavefunction;
use serde_json::{json, Value};

use crate::commands::{AimTable, SpectrumRow};
use crate::config::{Format, RunConfig};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn header(cfg: &RunConfig) -> Value {
    json!({
        "potential": cfg.potential,
        "params": cfg.params,
        "units": { "hbar": cfg.units.hbar, "mu": cfg.units.mu },
    })
}

fn finish_json(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json serializes") + "\n"
}

pub fn spectrum(cfg: &RunConfig, rows: &[SpectrumRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from("n,l,e_closed,e_aim,e_oracle,rel_diff_aim,rel_diff_oracle,status\n");
            for row in rows {
                let r = &row.result;
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.n,
                    r.l,
                    num(r.e_closed),
                    opt(r.e_aim),
                    opt(r.e_oracle),
                    opt(r.rel_diff_aim),
                    opt(r.rel_diff_oracle),
                    row.status
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut v = serde_json::to_value(&row.result).expect("row serializes");
                    v["status"] = json!(row.status);
                    v
                })
                .collect();
            let mut v = header(cfg);
            v["command"] = json!("spectrum");
            v["verify"] = json!(cfg.output.verify);
            v["rows"] = json!(rows);
            finish_json(v)
        }
    }
}

pub fn wavefunction(cfg: &RunConfig, w: &RadialWavefunction, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = format!(
                "# potential={} n={} l={} energy={} norm_constant={} node_count={} residual_l2={}\nr,R\n",
                cfg.potential.as_deref().unwrap_or(""),
                w.n,
                w.l,
                num(w.energy),
                num(w.norm_constant),
                w.node_count,
                num(w.residual_l2)
            );
            for (r, v) in w.r_grid.iter().zip(&w.values) {
                writeln!(s, "{},{}", num(*r), num(*v)).unwrap();
            }
            s
        }
        Format::Json => {
            let mut v = header(cfg);
            v["command"] = json!("wavefunction");
            v["n"] = json!(w.n);
            v["l"] = json!(w.l);
            v["energy"] = json!(w.energy);
            v["norm_constant"] = json!(w.norm_constant);
            v["node_count"] = json!(w.node_count);
            v["residual_l2"] = json!(w.residual_l2);
            v["r"] = json!(w.r_grid);
            v["R"] = json!(w.values);
            finish_json(v)
        }
    }
}

fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn aim_table(cfg: &RunConfig, t: &AimTable, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = format!(
                "# potential={} l={} energy={} rho0={}\nk,delta,sign\n",
                cfg.potential.as_deref().unwrap_or(""),
                t.l,
                num(t.energy),
                num(t.rho0)
            );
            for &(k, d) in &t.rows {
                writeln!(s, "{k},{},{}", num(d), sign(d)).unwrap();
            }
            s
        }
        Format::Json => {
            let mut v = header(cfg);
            v["command"] = json!("aim-table");
            v["l"] = json!(t.l);
            v["energy"] = json!(t.energy);
            v["rho0"] = json!(t.rho0);
            v["rows"] =
                json!(t.rows.iter().map(|&(k, d)| json!({"k": k, "delta": d, "sign": sign(d)})).collect::<Vec<_>>());
            finish_json(v)
        }
    }
}
