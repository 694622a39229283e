//! CSV output: `,` separators, `.` decimals, LF endings.

use std::fs;
use std::io;
use std::path::Path;

/// Shortest round-trip decimal, or scientific notation when `|x| < 1e-4` (nonzero) or `|x| > 1e6`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if x != 0.0 && !(1e-4..=1e6).contains(&a) {
        format!("{x:e}")
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn nums(xs: &[f64]) -> String {
    xs.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";")
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(-0.25), "-0.25");
        assert_eq!(num(1e-5), "1e-5");
        assert_eq!(num(2.5e7), "2.5e7");
        assert_eq!(num(1e6), "1000000");
        assert_eq!(num(1e-4), "0.0001");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(nums(&[1.0, -2.0]), "1;-2");
    }

    #[test]
    fn render_lf() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x".into()]);
        assert_eq!(t.render(), "a,b\n1,x\n");
    }
}
