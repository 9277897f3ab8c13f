use std::io::{self, Write};

/// Round-trippable float: 17 significant digits in scientific notation.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub(crate) struct Csv<'a> {
    out: &'a mut Vec<u8>,
    columns: usize,
}

impl<'a> Csv<'a> {
    pub(crate) fn new(out: &'a mut Vec<u8>, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self {
            out,
            columns: header.len(),
        })
    }

    pub(crate) fn row(&mut self, fields: &[String]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        writeln!(self.out, "{}", fields.join(","))
    }

    pub(crate) fn comment(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "# {text}")
    }
}

pub(crate) fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    b
                } else {
                    a + (b - a) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 5.105_386, 1e-300, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.1, 0.25, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[19], 0.25);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
