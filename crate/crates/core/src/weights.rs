use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::relation::Value;

/// Per-attribute value weights.
///
/// Values without an explicit entry fall back to the identity default: an
/// integer weighs its own value, a string weighs 0.
#[derive(Debug, Clone, Default)]
pub struct WeightMap {
    // keyed by the value's text form so "5" in a string column and 5 in an
    // integer column can both be addressed from a CSV file
    explicit: HashMap<String, HashMap<String, f64>>,
}

impl WeightMap {
    pub fn identity() -> Self {
        WeightMap::default()
    }

    pub fn set(&mut self, attr: &str, value: &Value, weight: f64) {
        self.explicit
            .entry(attr.to_string())
            .or_default()
            .insert(value.to_string(), weight);
    }

    pub fn weight(&self, attr: &str, value: &Value) -> f64 {
        if let Some(w) = self
            .explicit
            .get(attr)
            .and_then(|m| m.get(value.to_string().as_str()))
        {
            return *w;
        }
        match value {
            Value::Int(v) => *v as f64,
            Value::Str(_) => 0.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.explicit.values().all(HashMap::is_empty)
    }

    /// Copies the entries of `from` onto attribute `to` (self-join renaming).
    pub fn alias(&mut self, from: &str, to: &str) {
        if let Some(m) = self.explicit.get(from).cloned() {
            self.explicit.entry(to.to_string()).or_default().extend(m);
        }
    }
}

/// Loads `attribute,value,weight` rows. Rows for attributes outside `attrs`
/// are skipped; with no file the identity map is returned.
pub fn load_weights(path: Option<&Path>, attrs: &[String]) -> Result<WeightMap> {
    let mut wm = WeightMap::identity();
    let Some(path) = path else {
        return Ok(wm);
    };
    let context = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Csv {
            context: context.clone(),
            row,
            message: e.to_string(),
        })?;
        if rec.len() != 3 {
            return Err(Error::Csv {
                context: context.clone(),
                row,
                message: "expected attribute,value,weight".into(),
            });
        }
        let weight: f64 = rec[2].parse().map_err(|_| Error::Csv {
            context: context.clone(),
            row,
            message: format!("non-numeric weight `{}`", &rec[2]),
        })?;
        if !weight.is_finite() {
            return Err(Error::Csv {
                context: context.clone(),
                row,
                message: format!("weight `{}` is not finite", &rec[2]),
            });
        }
        let attr = &rec[0];
        if !attrs.is_empty() && !attrs.iter().any(|a| a == attr) {
            continue;
        }
        wm.explicit
            .entry(attr.to_string())
            .or_default()
            .insert(rec[1].to_string(), weight);
    }
    Ok(wm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_default() {
        let wm = load_weights(None, &["A".into()]).unwrap();
        assert_eq!(wm.weight("A", &Value::Int(5)), 5.0);
        assert_eq!(wm.weight("A", &Value::str("x")), 0.0);
    }

    #[test]
    fn explicit_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        std::fs::write(&p, "attribute,value,weight\nA,alice,3.5\nB,7,-1\n").unwrap();
        let wm = load_weights(Some(&p), &["A".into(), "B".into()]).unwrap();
        assert_eq!(wm.weight("A", &Value::str("alice")), 3.5);
        assert_eq!(wm.weight("A", &Value::str("bob")), 0.0);
        assert_eq!(wm.weight("B", &Value::Int(7)), -1.0);
        assert_eq!(wm.weight("B", &Value::Int(8)), 8.0);
    }

    #[test]
    fn non_numeric_weight_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        std::fs::write(&p, "attribute,value,weight\nA,1,heavy\n").unwrap();
        assert!(matches!(
            load_weights(Some(&p), &[]),
            Err(Error::Csv { row: 2, .. })
        ));
    }
}
