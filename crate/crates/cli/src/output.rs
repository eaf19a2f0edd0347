use std::io::Write;
use std::path::Path;

/// Floats serialized with 17 significant digits so reruns are byte-stable
/// and round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Minimal deterministic CSV writer: a header row, then rows in call order;
/// every file carries the config hash as its last column.
pub struct CsvWriter {
    out: std::io::BufWriter<std::fs::File>,
    columns: usize,
    hash: String,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str], config_hash: &str) -> std::io::Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut cols: Vec<&str> = header.to_vec();
        cols.push("config_hash");
        writeln!(out, "{}", cols.join(","))?;
        Ok(Self {
            out,
            columns: header.len(),
            hash: config_hash.to_string(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        assert_eq!(fields.len(), self.columns, "column count mismatch");
        let mut line = fields.join(",");
        line.push(',');
        line.push_str(&self.hash);
        writeln!(self.out, "{line}")
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

/// Writes a JSON report with the config hash injected at the top level.
pub fn write_json(
    path: &Path,
    mut value: serde_json::Value,
    config_hash: &str,
) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    if let Some(obj) = value.as_object_mut() {
        obj.insert(
            "config_hash".into(),
            serde_json::Value::String(config_hash.into()),
        );
    }
    std::fs::write(path, serde_json::to_string_pretty(&value).expect("serializable"))
}
