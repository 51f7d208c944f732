//! Human-readable numbers and tables.

const DIGITS: usize = 9;

/// `x` to nine significant digits, trailing zeros dropped.
///
/// Plain notation for magnitudes in `[1e-5, 1e9)`, scientific otherwise.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(mut s: String) -> String {
    if s.contains('.') {
        let keep = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(keep);
    }
    s
}

/// Left-aligned columns separated by two spaces.
pub fn table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}  ", w = widths[c]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.5), "0.5");
        assert_eq!(sig(1.6), "1.6");
        assert_eq!(sig(4.0), "4");
        assert_eq!(sig(-0.0), "0");
        assert_eq!(sig(0.188_721_875_540_867_14), "0.188721876");
        assert_eq!(sig(2.089_290_763_653_925_8e-4), "0.000208929076");
        assert_eq!(sig(-1.5e-6), "-1.5e-6");
        assert_eq!(sig(5.787_037_037e-7), "5.78703704e-7");
        assert_eq!(sig(123_456_789_012.0), "1.23456789e11");
        assert_eq!(sig(0.999_999_999_7), "1");
    }

    #[test]
    fn aligned_table() {
        let rows = vec![
            vec!["rule".to_string(), "fraction".to_string()],
            vec!["heuristic".to_string(), "0.19".to_string()],
        ];
        assert_eq!(table(&rows), "rule       fraction\nheuristic  0.19\n");
    }
}
