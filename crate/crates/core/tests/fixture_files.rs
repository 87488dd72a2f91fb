//! The fixture files shipped under `fixtures/` match the built-in sets and
//! survive a save/load cycle unchanged.

use std::path::PathBuf;

use unembed::fixtures;
use unembed::io::{load_model, save_model, ModelFormat};
use unembed::{SoftmaxModel, UnembeddingSet};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn shipped() -> Vec<(&'static str, UnembeddingSet)> {
    vec![
        ("unrestricted", fixtures::unrestricted_unembeddings()),
        ("centered", fixtures::centered_unembeddings()),
        ("centered_unit", fixtures::centered_unit_unembeddings()),
        ("centered_unit_as_printed", fixtures::centered_unit_unembeddings_as_printed()),
    ]
}

#[test]
fn files_match_builtin_sets() {
    for (name, u) in shipped() {
        for (ext, format) in [("csv", ModelFormat::Csv), ("json", ModelFormat::Json)] {
            let path = fixture_dir().join(format!("{name}.{ext}"));
            let m = load_model(&path, format, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(m.unembeddings(), &u, "{}", path.display());
        }
    }
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, _) in shipped() {
        for (ext, format) in [("csv", ModelFormat::Csv), ("json", ModelFormat::Json)] {
            let src = fixture_dir().join(format!("{name}.{ext}"));
            let m = load_model(&src, format, None).unwrap();
            let dst = dir.path().join(format!("{name}.{ext}"));
            save_model(&m, &dst, format).unwrap();
            assert_eq!(load_model(&dst, format, None).unwrap(), m);
            if format == ModelFormat::Csv {
                let a = std::fs::read_to_string(&src).unwrap();
                let b = std::fs::read_to_string(&dst).unwrap();
                assert_eq!(a, b, "{name}.csv is not in canonical form");
            }
        }
    }
}

#[test]
fn cloud_attached_models_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in fixtures::ExampleName::ALL {
        let m: SoftmaxModel = fixtures::example(name).with_synthetic_cloud(7, 64).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        save_model(&m, &path, ModelFormat::Json).unwrap();
        assert_eq!(load_model(&path, ModelFormat::Json, None).unwrap(), m);
    }
}
