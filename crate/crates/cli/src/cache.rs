//! On-disk cache of constructed modules. One JSON file per `(group, Lambda)`
//! and record format; writes go through a temporary file and a rename so
//! concurrent readers never see a partial file.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qmeasure::rootdata::parse_group;
use qmeasure::uqmod::{cache_insert, cached_modules, ModuleRecord, UqModule, MODULE_FORMAT};

pub const CACHE_ENV: &str = "QMEASURE_CACHE_DIR";

/// Flag value, then the environment override, then the user cache directory.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os(CACHE_ENV).filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p));
    }
    if let Some(p) = std::env::var_os("XDG_CACHE_HOME").filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p).join("qmeasure"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("qmeasure"))
}

pub fn file_name(group: &str, highest: &[i64]) -> String {
    let wt: Vec<String> = highest.iter().map(|x| x.to_string()).collect();
    format!("{group}_{}.{MODULE_FORMAT}.json", wt.join("_"))
}

/// Loads every readable record of the current format. Unreadable or stale
/// files are skipped and later overwritten.
pub fn load(dir: &Path) -> usize {
    let Ok(entries) = fs::read_dir(dir) else { return 0 };
    let suffix = format!(".{MODULE_FORMAT}.json");
    let mut n = 0;
    for e in entries.flatten() {
        let path = e.path();
        if !path.file_name().and_then(|s| s.to_str()).is_some_and(|s| s.ends_with(&suffix)) {
            continue;
        }
        let Some(rec) = fs::read_to_string(&path).ok().and_then(|t| serde_json::from_str::<ModuleRecord>(&t).ok()) else {
            continue;
        };
        let Ok(cd) = parse_group(&rec.group) else { continue };
        if let Ok(m) = UqModule::from_record(&Arc::new(cd), &rec) {
            cache_insert(m);
            n += 1;
        }
    }
    n
}

/// Writes modules that are not on disk yet. Returns the number written.
pub fn store(dir: &Path) -> std::io::Result<usize> {
    fs::create_dir_all(dir)?;
    let mut n = 0;
    for m in cached_modules() {
        let path = dir.join(file_name(&m.cd.label(), &m.highest));
        if path.exists() {
            continue;
        }
        let tmp = dir.join(format!(".{}.{}.tmp", path.file_name().and_then(|s| s.to_str()).unwrap_or("m"), std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&m.to_record())?)?;
        fs::rename(&tmp, &path)?;
        n += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmeasure::rootdata::build_cartan;
    use qmeasure::uqmod::irrep;

    #[test]
    fn store_then_load() {
        let dir = std::env::temp_dir().join(format!("qmeasure-cache-test-{}", std::process::id()));
        let cd = Arc::new(build_cartan('A', 2).unwrap());
        irrep(&cd, &[1, 1]).unwrap();
        assert!(store(&dir).unwrap() >= 1);
        assert!(dir.join(file_name("A2", &[1, 1])).exists());
        // a corrupt file of the right name is skipped
        fs::write(dir.join(file_name("A2", &[9, 9])), "{").unwrap();
        assert!(load(&dir) >= 1);
        assert_eq!(store(&dir).unwrap(), 0);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn flag_beats_environment() {
        let p = PathBuf::from("/tmp/x");
        assert_eq!(resolve_dir(Some(&p)), Some(p));
    }
}
