use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::{LoadError, Result};
use crate::spectral::{mode_order, EigenBasis, BASIS_SCHEMA_VERSION};

/// Writes `basis` as a JSON document; floats use shortest round-trip form.
///
/// The file is written to a sibling temporary and renamed into place.
pub fn save_basis(basis: &EigenBasis, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(basis)
        .map_err(|e| LoadError::Malformed(format!("serialisation failed: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes()).map_err(LoadError::Io)?;
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

/// Reads a basis written by [`save_basis`], checking the schema version and
/// basic structural invariants.
pub fn load_basis(path: &Path) -> Result<EigenBasis> {
    let text = fs::read_to_string(path).map_err(LoadError::Io)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| LoadError::Malformed(e.to_string()))?;
    let found = value
        .pointer("/metadata/schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| LoadError::Malformed("missing metadata.schema_version".into()))?;
    if found != BASIS_SCHEMA_VERSION as u64 {
        return Err(LoadError::Version { found: found as u32, expected: BASIS_SCHEMA_VERSION }.into());
    }
    let basis: EigenBasis =
        serde_json::from_value(value).map_err(|e| LoadError::Malformed(e.to_string()))?;
    validate(&basis)?;
    Ok(basis)
}

fn validate(basis: &EigenBasis) -> Result<(), LoadError> {
    let bad = |msg: String| Err(LoadError::Malformed(msg));
    if !(basis.cutoff > 0.0) {
        return bad(format!("cutoff {} is not positive", basis.cutoff));
    }
    for (i, m) in basis.modes.iter().enumerate() {
        if !(m.lambda.is_finite() && m.lambda > 0.0 && m.lambda <= basis.cutoff) {
            return bad(format!("mode {i}: eigenvalue {} outside (0, cutoff]", m.lambda));
        }
        if (m.k == 0) != m.phase.is_none() {
            return bad(format!("mode {i}: phase inconsistent with k = {}", m.k));
        }
    }
    if basis.modes.windows(2).any(|w| mode_order(&w[0], &w[1]) != std::cmp::Ordering::Less) {
        return bad("modes are not in canonical order".into());
    }
    Ok(())
}
