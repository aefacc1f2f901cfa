//! Plain-text spectral-data files for [`MatrixSection`].
//!
//! ```text
//! n <cone-dim> nodes <count> [period <L>]
//! node <i> <weight> <coords...>        (count lines, any order)
//! <lower-triangular matrix, row by row, whitespace separated>
//! ```
//!
//! Row `i` of the matrix block holds `A[i][0..=i]`; line breaks inside the
//! block are free. Blank lines and `#` comments are ignored. With
//! `period <L>` the first node coordinate is arc length on a circle of
//! circumference `L`; otherwise `d_h` is the Euclidean coordinate distance.

use std::fmt::Write as _;
use std::path::Path;

use super::matrix::{MatrixSection, NodeMetric};
use crate::error::{Error, Result};

/// Parsed contents of a spectral-data file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFile {
    pub n: usize,
    pub coords: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Full symmetric matrix, row-major.
    pub matrix: Vec<f64>,
    pub period: Option<f64>,
}

impl SpectralFile {
    pub fn from_section_data(
        n: usize,
        coords: Vec<Vec<f64>>,
        weights: Vec<f64>,
        matrix: Vec<f64>,
        period: Option<f64>,
    ) -> Self {
        Self { n, coords, weights, matrix, period }
    }

    pub fn into_section(self) -> Result<MatrixSection> {
        let metric = match self.period {
            Some(l) => NodeMetric::Periodic(l),
            None => NodeMetric::Euclidean,
        };
        MatrixSection::build(self.n, self.coords, self.weights, &self.matrix, metric)
    }

    /// Serializes with round-trip precision.
    pub fn to_text(&self) -> String {
        let count = self.weights.len();
        let mut out = format!("n {} nodes {}", self.n, count);
        if let Some(l) = self.period {
            let _ = write!(out, " period {l:e}");
        }
        out.push('\n');
        for i in 0..count {
            let _ = write!(out, "node {i} {:e}", self.weights[i]);
            for c in &self.coords[i] {
                let _ = write!(out, " {c:e}");
            }
            out.push('\n');
        }
        for i in 0..count {
            let row: Vec<String> = (0..=i).map(|j| format!("{:e}", self.matrix[i * count + j])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} from '{token}'"),
    })
}

/// Parses the text of a spectral-data file.
pub fn parse_spectral_file(text: &str) -> Result<SpectralFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if !(tokens.len() == 4 || tokens.len() == 6) || tokens[0] != "n" || tokens[2] != "nodes" {
        return Err(Error::Parse {
            line: hline,
            message: "header must read 'n <cone-dim> nodes <count> [period <L>]'".into(),
        });
    }
    let n: usize = parse_num(tokens[1], hline, "cone dimension")?;
    let count: usize = parse_num(tokens[3], hline, "node count")?;
    let period = if tokens.len() == 6 {
        if tokens[4] != "period" {
            return Err(Error::Parse { line: hline, message: format!("unknown header key '{}'", tokens[4]) });
        }
        Some(parse_num::<f64>(tokens[5], hline, "period")?)
    } else {
        None
    };
    if count == 0 {
        return Err(Error::Parse { line: hline, message: "node count must be positive".into() });
    }

    let mut weights = vec![f64::NAN; count];
    let mut coords: Vec<Option<Vec<f64>>> = vec![None; count];
    let mut last_line = hline;
    for seen in 0..count {
        let (lno, line) = lines.next().ok_or(Error::Parse {
            line: last_line + 1,
            message: format!("expected {count} node lines, found {seen}"),
        })?;
        last_line = lno;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.first() != Some(&"node") || tokens.len() < 3 {
            return Err(Error::Parse {
                line: lno,
                message: format!("expected 'node <i> <weight> <coords...>' ({seen} of {count} node lines read)"),
            });
        }
        let i: usize = parse_num(tokens[1], lno, "node index")?;
        if i >= count {
            return Err(Error::Parse { line: lno, message: format!("node index {i} out of range 0..{count}") });
        }
        if coords[i].is_some() {
            return Err(Error::Parse { line: lno, message: format!("node {i} listed twice") });
        }
        weights[i] = parse_num(tokens[2], lno, "weight")?;
        coords[i] = Some(
            tokens[3..]
                .iter()
                .map(|t| parse_num(t, lno, "coordinate"))
                .collect::<Result<Vec<f64>>>()?,
        );
    }

    let expected = count * (count + 1) / 2;
    let mut values = Vec::with_capacity(expected);
    for (lno, line) in lines {
        last_line = lno;
        for t in line.split_whitespace() {
            if values.len() == expected {
                return Err(Error::Parse {
                    line: lno,
                    message: format!("matrix block has more than {expected} entries"),
                });
            }
            values.push(parse_num::<f64>(t, lno, "matrix entry")?);
        }
    }
    if values.len() != expected {
        return Err(Error::Parse {
            line: last_line,
            message: format!("matrix block has {} entries, expected {expected} for {count} nodes", values.len()),
        });
    }
    let mut matrix = vec![0.0; count * count];
    let mut it = values.into_iter();
    for i in 0..count {
        for j in 0..=i {
            let v = it.next().expect("length checked");
            matrix[i * count + j] = v;
            matrix[j * count + i] = v;
        }
    }
    Ok(SpectralFile {
        n,
        coords: coords.into_iter().map(|c| c.expect("every node seen")).collect(),
        weights,
        matrix,
        period,
    })
}

pub fn read_spectral_file(path: impl AsRef<Path>) -> Result<MatrixSection> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse_spectral_file(&text)?.into_section()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::CrossSection;

    const SMALL: &str = "\
# three-node path graph
n 2 nodes 3
node 0 1.0 0.0
node 2 1.0 2.0
node 1 1.0 1.0
3
-1 3
0 -1
3
";

    #[test]
    fn parses_small_file() {
        let f = parse_spectral_file(SMALL).unwrap();
        assert_eq!(f.n, 2);
        assert_eq!(f.coords[2], vec![2.0]);
        assert_eq!(f.matrix, vec![3.0, -1.0, 0.0, -1.0, 3.0, -1.0, 0.0, -1.0, 3.0]);
        let section = f.into_section().unwrap();
        assert_eq!(section.block_count(), Some(3));
        assert!((section.mode(0).unwrap().lambda - (3.0 - 2f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn round_trips_through_text() {
        let f = parse_spectral_file(SMALL).unwrap();
        let again = parse_spectral_file(&f.to_text()).unwrap();
        assert_eq!(f, again);
        let periodic = SpectralFile { period: Some(6.5), ..f };
        assert_eq!(parse_spectral_file(&periodic.to_text()).unwrap(), periodic);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let missing_node = "n 2 nodes 3\nnode 0 1 0\nnode 1 1 1\n1 0 1 0 0 1\n";
        match parse_spectral_file(missing_node).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("unexpected {e}"),
        }
        let short_matrix = "n 2 nodes 2\nnode 0 1 0\nnode 1 1 1\n1\n0\n";
        match parse_spectral_file(short_matrix).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("expected 3"));
            }
            e => panic!("unexpected {e}"),
        }
        let bad_header = "n two nodes 2\n";
        assert!(matches!(parse_spectral_file(bad_header), Err(Error::Parse { line: 1, .. })));
        let long_matrix = "n 2 nodes 2\nnode 0 1 0\nnode 1 1 1\n1 0 1\n7\n";
        assert!(matches!(parse_spectral_file(long_matrix), Err(Error::Parse { line: 5, .. })));
    }
}
