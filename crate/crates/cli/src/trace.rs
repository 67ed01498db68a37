//! Trial-point traces, one CSV row per trial.

use std::io::Write;

use cdos::problems::format_f64;
use cdos::Trial;

pub struct TraceWriter<W: Write> {
    out: csv::Writer<W>,
    error: Option<csv::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W, dim: usize) -> csv::Result<Self> {
        let mut out = csv::Writer::from_writer(out);
        let mut header = vec!["eval_index".to_string()];
        header.extend((1..=dim).map(|k| format!("x{k}")));
        header.extend(["f".to_string(), "feasible".to_string()]);
        out.write_record(header)?;
        Ok(Self { out, error: None })
    }

    /// Record a trial; infeasible trials have an empty `f`. The first write
    /// error is kept and later trials are dropped.
    pub fn record(&mut self, t: &Trial<'_>) {
        if self.error.is_some() {
            return;
        }
        let mut rec = vec![t.eval_index.to_string()];
        rec.extend(t.x.iter().copied().map(format_f64));
        rec.push(t.f.map_or(String::new(), format_f64));
        rec.push(t.feasible.to_string());
        if let Err(e) = self.out.write_record(rec) {
            self.error = Some(e);
        }
    }

    pub fn finish(mut self) -> csv::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows() {
        let mut buf = Vec::new();
        let mut t = TraceWriter::new(&mut buf, 2).unwrap();
        t.record(&Trial {
            eval_index: 1,
            x: &[0.5, -1.0],
            f: Some(2.25),
            feasible: true,
        });
        t.record(&Trial {
            eval_index: 1,
            x: &[3.0, 4.0],
            f: None,
            feasible: false,
        });
        t.finish().unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "eval_index,x1,x2,f,feasible\n1,0.5,-1,2.25,true\n1,3,4,,false\n"
        );
    }
}
