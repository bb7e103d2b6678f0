//! Every example runs to completion. `cargo test` builds the examples next to the test
//! binaries, so they are found relative to this executable.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 8] = [
    "affine_invariance",
    "cadelniza_roofing",
    "double_arrowhead_trace",
    "export_obj",
    "finite_to_periodic",
    "lk_gallery",
    "paneled_simplex",
    "reduce_one_dof",
];

fn example_path(name: &str) -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    let profile = exe.parent().and_then(|deps| deps.parent()).expect("target profile directory");
    profile.join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

#[test]
fn all_examples_succeed() {
    for name in EXAMPLES {
        let path = example_path(name);
        assert!(path.exists(), "{name} was not built at {}", path.display());
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(&path).current_dir(dir.path()).output().unwrap();
        assert!(
            out.status.success(),
            "{name} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}

#[test]
fn example_list_matches_directory() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut found: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "rs").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    found.sort();
    assert_eq!(found, EXAMPLES);
}
