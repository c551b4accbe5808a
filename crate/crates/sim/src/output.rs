//! CSV and summary files. Floats use `{:.16e}` (17 significant digits),
//! lines end in `\n`, and files are written in plan order, so identical
//! configs give byte-identical output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use unruh_core::dynamics::TimeSeries;

use crate::bec_design::BecReport;
use crate::run::{Outcome, RunSummary};
use crate::SimError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(num).collect::<Vec<_>>().join(",")
}

pub fn series_header(n_atoms: usize) -> String {
    let mut h = String::from("t");
    for j in 1..=n_atoms {
        write!(h, ",P_{j}").unwrap();
    }
    h.push_str(",P_tot,R_tot,C_coh,C_conc,trace_err,min_eig");
    h
}

pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = series_header(series.n_atoms);
    out.push('\n');
    for (t, r) in series.times.iter().zip(&series.records) {
        out.push_str(&num(*t));
        for p in &r.populations {
            out.push(',');
            out.push_str(&num(*p));
        }
        for x in [r.p_tot, r.r_tot, r.c_coh, r.c_conc, r.trace_err, r.min_eig] {
            out.push(',');
            out.push_str(&num(x));
        }
        out.push('\n');
    }
    out
}

fn toml_str(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn run_table(out: &mut String, s: &RunSummary) {
    let _ = writeln!(out, "\n[[run]]");
    let _ = writeln!(out, "label = {}", toml_str(&s.label));
    let _ = writeln!(out, "n_atoms = {}", s.n_atoms);
    let _ = writeln!(out, "t_final = {}", num(s.t_final));
    let _ = writeln!(out, "final_populations = [{}]", join(s.final_populations.iter().copied()));
    let _ = writeln!(out, "final_p_tot = {}", num(s.final_p_tot));
    let _ = writeln!(out, "final_c_coh = {}", num(s.final_c_coh));
    let _ = writeln!(out, "final_c_conc = {}", num(s.final_c_conc));
    let _ = writeln!(out, "initial_r_tot = {}", num(s.initial_r_tot));
    let _ = writeln!(out, "max_r_tot = {}", num(s.max_r_tot));
    let _ = writeln!(out, "superradiant_peak = {}", s.emission_peak.is_some());
    if let Some((t, v)) = s.emission_peak {
        let _ = writeln!(out, "peak_r_time = {}", num(t));
        let _ = writeln!(out, "peak_r = {}", num(v));
    }
    let _ = writeln!(out, "max_c_coh_time = {}", num(s.max_c_coh.0));
    let _ = writeln!(out, "max_c_coh = {}", num(s.max_c_coh.1));
    let _ = writeln!(out, "max_c_conc_time = {}", num(s.max_c_conc.0));
    let _ = writeln!(out, "max_c_conc = {}", num(s.max_c_conc.1));
    let _ = writeln!(out, "max_trace_drift = {}", num(s.max_trace_drift));
    if let Some(m) = s.zero_multiplicity {
        let _ = writeln!(out, "zero_multiplicity = {m}");
    }
    if let Some(r) = s.oracle_residual {
        let _ = writeln!(out, "correlation_oracle_residual = {}", num(r));
    }
    if let Some(c) = s.inter_wedge_coherence {
        let _ = writeln!(out, "inter_wedge_coherence = {}", num(c));
    }
}

pub fn summary_toml(o: &Outcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name = {}", toml_str(&o.name));
    let _ = writeln!(out, "scenario = {}", toml_str(&o.scenario.to_string()));
    for c in &o.comparisons {
        let _ = writeln!(out, "{} = {}", c.label, num(c.value));
    }
    for r in &o.runs {
        run_table(&mut out, &r.summary);
    }
    if let Some(m) = &o.mapping {
        let _ = writeln!(out, "\n[mapping]");
        let _ = writeln!(out, "a = {}", num(m.frame.a));
        let _ = writeln!(out, "beta = {}", num(m.frame.beta()));
        let warnings: Vec<String> = m.warnings.iter().map(|w| toml_str(w)).collect();
        let _ = writeln!(out, "warnings = [{}]", warnings.join(", "));
        for (site, atom) in m.sites.iter().zip(&m.atoms) {
            let _ = writeln!(out, "\n[[mapping.atom]]");
            let _ = writeln!(out, "a0 = {}", num(atom.design.a0));
            let _ = writeln!(out, "omega = {}", num(atom.design.omega));
            let _ = writeln!(out, "k_res = {}", num(atom.k_res));
            let _ = writeln!(out, "coupling_abs = {}", num(atom.coupling.norm()));
            let _ = writeln!(out, "relative_coupling = {}", num(site.g));
            let _ = writeln!(out, "xi = {}", num(site.xi));
            let _ = writeln!(out, "stark_shift = {}", num(atom.stark_shift));
            let _ = writeln!(out, "n_b_closed_form = {}", atom.design.bound_states.closed_form);
            let _ = writeln!(out, "n_b_numeric = {}", atom.design.bound_states.numeric);
        }
    }
    if let Some(b) = &o.bec {
        let _ = writeln!(out, "\n[bound_state_report]");
        let _ = writeln!(out, "points = {}", b.bound_states.len());
        let _ = writeln!(out, "disagreements = {}", b.disagreements());
    }
    out
}

fn bec_files(name: &str, b: &BecReport) -> Vec<(String, String)> {
    let mut disp = String::from("k,E,u,v,S\n");
    for m in &b.dispersion {
        disp.push_str(&join([m.k, m.energy, m.u, m.v, m.s]));
        disp.push('\n');
    }
    let mut width = String::from("w,a0,Omega\n");
    for p in &b.width {
        width.push_str(&join([p.w, p.a0, p.omega]));
        width.push('\n');
    }
    let mut coupling = String::from("k,abs_G00,abs_G11,abs_G10\n");
    for p in &b.coupling {
        coupling.push_str(&join([p.k, p.g00, p.g11, p.g10]));
        coupling.push('\n');
    }
    let mut bound = String::from("V0,w,n_b_closed_form,n_b_numeric,agree\n");
    for p in &b.bound_states {
        let _ = writeln!(
            bound,
            "{},{},{},{},{}",
            num(p.v0),
            num(p.w),
            p.closed_form,
            p.numeric,
            u8::from(p.closed_form == p.numeric)
        );
    }
    vec![
        (format!("{name}_dispersion.csv"), disp),
        (format!("{name}_width.csv"), width),
        (format!("{name}_coupling.csv"), coupling),
        (format!("{name}_bound_states.csv"), bound),
    ]
}

/// File names and contents for an outcome, in a fixed order.
pub fn render(o: &Outcome) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = o
        .runs
        .iter()
        .map(|r| (format!("{}.csv", r.summary.label), series_csv(&r.series)))
        .collect();
    if let Some(b) = &o.bec {
        files.extend(bec_files(&o.name, b));
    }
    files.push(("summary.toml".into(), summary_toml(o)));
    files
}

/// Writes every file of `o` below `dir`, returning the paths written.
pub fn write_outcome(o: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, SimError> {
    fs::create_dir_all(dir).map_err(|e| SimError::io(format!("creating {}", dir.display()), e))?;
    render(o)
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| SimError::io(format!("writing {}", path.display()), e))?;
            Ok(path)
        })
        .collect()
}
