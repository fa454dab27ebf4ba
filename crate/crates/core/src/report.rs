//! Deterministic JSON and CSV emission. Numbers are printed with 17
//! significant digits so identical runs produce byte-identical output.

use crate::spectra::SpectrumFamily;
use crate::torsion::TorsionReport;

/// One configuration entry echoed into the report.
#[derive(Debug, Clone)]
pub enum ConfigValue {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

/// 17-significant-digit float formatting, stable across runs.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid the "-0" artifact
        "0.0000000000000000e0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn emit_pairs(out: &mut String, pairs: &[(String, f64)]) {
    out.push('{');
    for (i, (k, v)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\"{}\":{}", escape(k), fmt_f64(*v)));
    }
    out.push('}');
}

/// Render a torsion report with the stable field order
/// quantity, value, error, route, components, discrepancies, config.
pub fn report_to_json(r: &TorsionReport, config: &[(String, ConfigValue)]) -> String {
    let mut out = String::new();
    out.push('{');
    out.push_str(&format!("\"quantity\":\"{}\",", escape(&r.quantity)));
    out.push_str(&format!("\"value\":{},", fmt_f64(r.value)));
    out.push_str(&format!("\"error\":{},", fmt_f64(r.error_estimate)));
    out.push_str(&format!("\"route\":\"{}\",", r.route.name()));
    out.push_str("\"components\":");
    emit_pairs(&mut out, &r.components);
    out.push_str(",\"discrepancies\":");
    emit_pairs(&mut out, &r.discrepancies);
    out.push_str(",\"config\":{");
    for (i, (k, v)) in config.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("\"{}\":", escape(k)));
        match v {
            ConfigValue::Num(x) => out.push_str(&fmt_f64(*x)),
            ConfigValue::Int(n) => out.push_str(&n.to_string()),
            ConfigValue::Str(s) => out.push_str(&format!("\"{}\"", escape(s))),
            ConfigValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        }
    }
    out.push_str("}}");
    out
}

/// CSV dump of the branches of a spectrum family:
/// branch_id,kind,a,c,multiplicity,first8_eigenvalues
/// with the eigenvalues joined by ';' inside the last column.
pub fn spectrum_to_csv(fam: &SpectrumFamily, count: usize) -> String {
    let mut out = String::from("branch_id,kind,a,c,multiplicity,first8_eigenvalues\n");
    for b in &fam.branches {
        let per = if b.is_family() { count.max(8).min(8) } else { 1 };
        let evs: Vec<String> = (0..per as u64).map(|m| fmt_f64(b.eigenvalue(m))).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            b.label,
            b.kind.name(),
            fmt_f64(b.a),
            fmt_f64(b.c),
            b.multiplicity,
            evs.join(";")
        ));
    }
    out
}

/// CSV dump of a sampled heat curve: t,value,error.
pub fn heat_to_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("t,value,error\n");
    for (t, v, e) in rows {
        out.push_str(&format!("{},{},{}\n", fmt_f64(*t), fmt_f64(*v), fmt_f64(*e)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::Route;

    #[test]
    fn json_shape_and_determinism() {
        let r = TorsionReport {
            quantity: "test".into(),
            value: 2.0f64.ln(),
            error_estimate: 1e-12,
            route: Route::Closed,
            components: vec![("a".into(), 1.0), ("b".into(), -0.5)],
            discrepancies: vec![("d".into(), 0.25)],
        };
        let cfg = vec![
            ("alpha".to_string(), ConfigValue::Num(0.5)),
            ("grid".to_string(), ConfigValue::Int(64)),
            ("route".to_string(), ConfigValue::Str("closed".into())),
            ("deterministic".to_string(), ConfigValue::Bool(true)),
        ];
        let a = report_to_json(&r, &cfg);
        let b = report_to_json(&r, &cfg);
        assert_eq!(a, b);
        assert!(
            a.starts_with("{\"quantity\":\"test\",\"value\":6.9314718055994529e-1"),
            "{a}"
        );
        assert!(a.contains("\"components\":{\"a\":"));
        assert!(a.contains("\"config\":{"));
        assert!(a.ends_with("}}"));
    }

    #[test]
    fn seventeen_digit_floats() {
        assert_eq!(fmt_f64(1.25), "1.2500000000000000e0");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(-0.0), "0.0000000000000000e0");
    }

    #[test]
    fn csv_headers() {
        let rows = vec![(0.1, -1.0, 1e-14)];
        let s = heat_to_csv(&rows);
        assert!(s.starts_with("t,value,error\n"));
        assert!(s.ends_with("\n"));
        assert!(!s.contains('\r'));
    }
}
